"""Moyal and damped star products, star-exponentials and the equivalence map.

Both products are ``exp((i hbar / 2) B)(f, g)`` for a constant-coefficient
bidifferential operator ``B``: the Poisson operator for Moyal, and
``P - 2 gamma m d_p1 d_p2`` for the damped product.  Expanding the
exponential multinomially gives the finite formula

    f * g = sum_{a,b,c} (i hbar/2)^(a+b+c) / (a! b! c!) (-1)^b (-2 gamma m)^c
            (d_q^a d_p^(b+c) f) (d_q^b d_p^(a+c) g),

which terminates whenever one factor is a polynomial.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

from .errors import DegreeOverflow, SingularTime, UnsupportedOperands
from .gauss_class import ExpPoly, QuadExp, heat_apply
from .phase_poly import MAX_DEGREE, PhasePoly, PhysParams, hamiltonian, poly_sum

__all__ = [
    "Kind",
    "ProductKind",
    "moyal",
    "damped",
    "star",
    "star_bracket",
    "star_power",
    "star_exp_series",
    "star_exp_closed",
    "equivalence_T",
]

Symbol = Union[PhasePoly, ExpPoly]
SINGULAR_TOL = 1e-12


class Kind(Enum):
    MOYAL = "moyal"
    GAMMA = "gamma"


@dataclass(frozen=True)
class ProductKind:
    """Which star product, with its physical constants.

    A Moyal product ignores ``params.gamma``; a damped product with
    ``gamma == 0`` takes exactly the same code path as Moyal.
    """

    kind: Kind
    params: PhysParams

    @property
    def effective(self) -> PhysParams:
        """Parameters with the damping the product actually uses."""
        if self.kind is Kind.MOYAL and self.params.gamma != 0:
            return self.params.undamped()
        return self.params

    @property
    def gamma(self) -> float:
        return self.effective.gamma


def moyal(params: PhysParams | None = None) -> ProductKind:
    return ProductKind(Kind.MOYAL, params or PhysParams())


def damped(params: PhysParams) -> ProductKind:
    return ProductKind(Kind.GAMMA, params)


class _Derivatives:
    """Memoised mixed partial derivatives ``d_q^i d_p^j`` of one symbol."""

    def __init__(self, f: Symbol):
        self.f = f
        self.cache = {(0, 0): f}
        self.poly = isinstance(f, PhasePoly)

    def __call__(self, i: int, j: int) -> Symbol:
        key = (i, j)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        if j > 0:
            out = self(i, j - 1).derive("p")
        else:
            out = self(i - 1, j).derive("q")
        self.cache[key] = out
        return out

    def bound_q(self) -> float:
        return self.f.deg_q if self.poly else math.inf

    def bound_p(self) -> float:
        return self.f.deg_p if self.poly else math.inf


def _is_zero(s: Symbol) -> bool:
    return s.poly.is_zero() if isinstance(s, ExpPoly) else s.is_zero()


def _as_symbol(f) -> Symbol:
    if isinstance(f, (PhasePoly, ExpPoly)):
        return f
    if isinstance(f, (int, float, complex)):
        return PhasePoly(complex(f))
    raise TypeError(f"unsupported symbol type {type(f).__name__}")


def star(prod: ProductKind, f, g) -> Symbol:
    """Star product of two symbols, at least one of them polynomial."""
    f, g = _as_symbol(f), _as_symbol(g)
    f_poly, g_poly = isinstance(f, PhasePoly), isinstance(g, PhasePoly)
    if not (f_poly or g_poly):
        raise UnsupportedOperands(
            "star product of two Gaussian symbols does not terminate; use fock_oracle"
        )
    if f_poly and g_poly and f.degree + g.degree > MAX_DEGREE:
        raise DegreeOverflow(f"star product degree {f.degree + g.degree} exceeds {MAX_DEGREE}")
    params = prod.effective
    half = 0.5j * params.hbar
    damp = -2.0 * params.gamma * params.m
    df, dg = _Derivatives(f), _Derivatives(g)
    # f carries d_q^a d_p^(b+c); g carries d_q^b d_p^(a+c)
    a_max = min(df.bound_q(), dg.bound_p())
    b_max = min(df.bound_p(), dg.bound_q())
    terms = []
    a = 0
    while a <= a_max:
        b = 0
        while b <= b_max:
            c = 0
            c_max = min(df.bound_p() - b, dg.bound_p() - a)
            while c <= c_max:
                if c > 0 and damp == 0.0:
                    break
                fd = df(a, b + c)
                if _is_zero(fd):
                    break
                gd = dg(b, a + c)
                if _is_zero(gd):
                    break
                k = a + b + c
                weight = half**k / (math.factorial(a) * math.factorial(b) * math.factorial(c))
                weight *= (-1) ** b * damp**c
                terms.append((weight, fd, gd))
                c += 1
            b += 1
        a += 1
    return _combine(terms, f, g)


def _combine(terms, f: Symbol, g: Symbol) -> Symbol:
    if isinstance(f, PhasePoly) and isinstance(g, PhasePoly):
        return poly_sum(fd * gd * w for w, fd, gd in terms)
    if isinstance(g, ExpPoly):
        base = g
        polys = [fd * gd.poly * w for w, fd, gd in terms]
    else:
        base = f
        polys = [fd.poly * gd * w for w, fd, gd in terms]
    return base.with_poly(poly_sum(polys))


def star_bracket(prod: ProductKind, f, g) -> Symbol:
    """``(f * g - g * f) / (i hbar)``."""
    fg = star(prod, f, g)
    gf = star(prod, g, f)
    return (fg - gf) * (1.0 / (1j * prod.effective.hbar))


def star_power(prod: ProductKind, h: PhasePoly, n: int) -> PhasePoly:
    """Left fold ``h * h * ... * h`` (n factors); ``h^0 = 1``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n * max(h.degree, 0) > MAX_DEGREE:
        raise DegreeOverflow(f"star power degree {n * h.degree} exceeds {MAX_DEGREE}")
    out = PhasePoly(1.0)
    for _ in range(n):
        out = star(prod, out, h)
    return out


def star_exp_series(prod: ProductKind, t: complex, n_terms: int) -> PhasePoly:
    """Partial sum ``sum_{n <= N} (t / i hbar)^n H^{*n} / n!`` of the star-exponential of H."""
    if n_terms < 0:
        raise ValueError("number of terms must be non-negative")
    h = hamiltonian(prod.effective)
    if 2 * n_terms > MAX_DEGREE:
        raise DegreeOverflow(f"{n_terms} terms need degree {2 * n_terms} > {MAX_DEGREE}")
    step = complex(t) / (1j * prod.effective.hbar)
    term = PhasePoly(1.0)
    terms = [term]
    for n in range(1, n_terms + 1):
        term = star(prod, term, h) * (step / n)
        terms.append(term)
    return poly_sum(terms)


def star_exp_closed(prod: ProductKind, t: complex) -> ExpPoly:
    """Closed form of ``Exp_*(t H / i hbar)``.

    Moyal:  ``cos(wt/2)^-1 exp((2H / i hbar w) tan(wt/2))``.
    Damped: ``e^(gamma t/2) / (cos(wt/2) sqrt(1 + (2gamma/w) tan(wt/2)))``
    times ``exp(-(i/hbar w) tan(wt/2) (m w^2 q^2 + p^2 / (m (1 + (2 gamma/w) tan(wt/2)))))``.
    """
    params = prod.effective
    m, w, hbar, gamma = params.m, params.omega, params.hbar, params.gamma
    half = complex(t) * w / 2
    cos = cmath.cos(half)
    if abs(cos) < SINGULAR_TOL:
        raise SingularTime(f"cos(omega t / 2) vanishes at t={t}")
    tan = cmath.sin(half) / cos
    width = 1 + 2 * params.ratio * tan
    if abs(width) < SINGULAR_TOL:
        raise SingularTime(f"1 + (2 gamma/omega) tan(omega t/2) vanishes at t={t}")
    k = 1j * tan / (hbar * w)
    exponent = QuadExp(A=k * m * w * w, B=k / (m * width))
    if gamma == 0:
        prefactor = 1 / cos
    else:
        prefactor = cmath.exp(gamma * complex(t) / 2) / (cos * cmath.sqrt(width))
    return ExpPoly.gaussian(exponent, prefactor)


def equivalence_T(f, params: PhysParams, direction: str = "forward"):
    """``T = exp(-i hbar m gamma / 2 d^2/dp^2)`` (or its inverse).

    ``T(f *_Moyal g) = T(f) *_gamma T(g)``.
    """
    c = -0.5j * params.hbar * params.m * params.gamma
    if direction == "inverse":
        c = -c
    elif direction != "forward":
        raise ValueError("direction must be 'forward' or 'inverse'")
    if c == 0:
        return f
    return heat_apply(c, f)
