"""Polynomial-times-Gaussian functions on the phase plane.

An :class:`ExpPoly` is ``prefactor * poly(q, p) * exp(-Q(q, p))`` with

    Q = A q**2 + B p**2 + C q p + Dq q + Dp p + E.

The exponent is stored with this minus sign so that a larger real part
means faster decay.  The class is closed under differentiation,
multiplication and the heat operator ``exp(c d^2/dp^2)``; integrals against
the Liouville measure ``dq dp / (2 pi hbar)`` are evaluated in closed form.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from math import comb, factorial, pi

import numpy as np

from .errors import NonIntegrable, SingularWidth
from .phase_poly import PhasePoly, PhysParams, poly_eval

__all__ = [
    "QuadExp",
    "ExpPoly",
    "expoly_derive",
    "gauss_integrate",
    "heat_apply",
    "heat_apply_poly",
    "gaussian_moments",
]

SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class QuadExp:
    """Quadratic form ``A q^2 + B p^2 + C qp + Dq q + Dp p + E`` (enters as ``exp(-Q)``)."""

    A: complex = 0j
    B: complex = 0j
    C: complex = 0j
    Dq: complex = 0j
    Dp: complex = 0j
    E: complex = 0j

    def __post_init__(self):
        for name in ("A", "B", "C", "Dq", "Dp", "E"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    def __add__(self, other: "QuadExp") -> "QuadExp":
        return QuadExp(self.A + other.A, self.B + other.B, self.C + other.C,
                       self.Dq + other.Dq, self.Dp + other.Dp, self.E + other.E)

    def conj(self) -> "QuadExp":
        return QuadExp(*(complex(v).conjugate() for v in self.astuple()))

    def astuple(self) -> tuple:
        return (self.A, self.B, self.C, self.Dq, self.Dp, self.E)

    def as_poly(self) -> PhasePoly:
        return PhasePoly({(2, 0): self.A, (0, 2): self.B, (1, 1): self.C,
                          (1, 0): self.Dq, (0, 1): self.Dp, (0, 0): self.E})

    def grad_q(self) -> PhasePoly:
        return PhasePoly({(1, 0): 2 * self.A, (0, 1): self.C, (0, 0): self.Dq})

    def grad_p(self) -> PhasePoly:
        return PhasePoly({(0, 1): 2 * self.B, (1, 0): self.C, (0, 0): self.Dp})

    def __call__(self, q, p):
        return (self.A * q * q + self.B * p * p + self.C * q * p
                + self.Dq * q + self.Dp * p + self.E)

    def is_integrable(self) -> bool:
        a, b, c = self.A.real, self.B.real, self.C.real
        return a > 0 and b > 0 and 4 * a * b > c * c

    def same_shape(self, other: "QuadExp", tol: float = 0.0) -> bool:
        """Equal quadratic and linear parts (the constant E may differ)."""
        mine, theirs = self.astuple()[:5], other.astuple()[:5]
        if tol == 0.0:
            return mine == theirs
        return all(abs(x - y) <= tol * max(1.0, abs(x), abs(y)) for x, y in zip(mine, theirs))

    def scaled(self, sq: float, sp: float) -> "QuadExp":
        """Exponent of ``f(sq * q, sp * p)``."""
        return QuadExp(self.A * sq * sq, self.B * sp * sp, self.C * sq * sp,
                       self.Dq * sq, self.Dp * sp, self.E)


class ExpPoly:
    """``prefactor * poly(q, p) * exp(-exponent(q, p))``."""

    __slots__ = ("prefactor", "poly", "exponent")

    def __init__(self, poly, exponent: QuadExp | None = None, prefactor: complex = 1.0):
        self.poly = poly if isinstance(poly, PhasePoly) else PhasePoly(poly)
        self.exponent = exponent if exponent is not None else QuadExp()
        self.prefactor = complex(prefactor)

    @classmethod
    def gaussian(cls, exponent: QuadExp, prefactor: complex = 1.0) -> "ExpPoly":
        return cls(PhasePoly(1.0), exponent, prefactor)

    def __repr__(self):
        return f"ExpPoly(prefactor={self.prefactor:.6g}, poly={self.poly!r}, exponent={self.exponent!r})"

    # -- algebra -----------------------------------------------------------
    def amplitude(self) -> PhasePoly:
        """``prefactor * exp(-E) * poly``: the polynomial that multiplies the
        normalised Gaussian ``exp(-(Q - E))``."""
        return self.poly * (self.prefactor * cmath.exp(-self.exponent.E))

    def with_poly(self, poly: PhasePoly) -> "ExpPoly":
        return ExpPoly(poly, self.exponent, self.prefactor)

    def scale(self, c) -> "ExpPoly":
        return ExpPoly(self.poly, self.exponent, self.prefactor * complex(c))

    def __mul__(self, other):
        if isinstance(other, ExpPoly):
            return ExpPoly(self.poly * other.poly, self.exponent + other.exponent,
                           self.prefactor * other.prefactor)
        if isinstance(other, PhasePoly):
            return ExpPoly(self.poly * other, self.exponent, self.prefactor)
        if isinstance(other, (int, float, complex, np.number)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self.scale(1.0 / complex(other))
        return NotImplemented

    def __neg__(self):
        return self.scale(-1.0)

    def _aligned_poly(self, other: "ExpPoly") -> PhasePoly:
        """``other``'s polynomial rescaled to share ``self``'s prefactor and E."""
        if not self.exponent.same_shape(other.exponent):
            raise ValueError("ExpPoly addition requires identical Gaussian exponents")
        if self.prefactor == 0:
            raise ValueError("cannot align to a zero prefactor")
        factor = other.prefactor / self.prefactor * cmath.exp(self.exponent.E - other.exponent.E)
        return other.poly * factor

    def __add__(self, other):
        if isinstance(other, ExpPoly):
            if other.prefactor == 0 or other.poly.is_zero():
                return self
            if self.prefactor == 0 or self.poly.is_zero():
                return other
            return self.with_poly(self.poly + self._aligned_poly(other))
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, ExpPoly):
            return self + (-other)
        return NotImplemented

    def conj(self) -> "ExpPoly":
        return ExpPoly(self.poly.conj(), self.exponent.conj(), self.prefactor.conjugate())

    def derive(self, var: str, order: int = 1) -> "ExpPoly":
        return expoly_derive(self, var, order)

    def __call__(self, q, p):
        q = np.asarray(q)
        p = np.asarray(p)
        out = self.prefactor * poly_eval(self.poly, q, p) * np.exp(-self.exponent(q, p))
        return complex(out) if np.ndim(out) == 0 else out

    def substitute_scale(self, sq: float = 1.0, sp: float = 1.0) -> "ExpPoly":
        """Return ``f(sq * q, sp * p)``."""
        return ExpPoly(self.poly.substitute_scale(sq, sp), self.exponent.scaled(sq, sp), self.prefactor)

    # -- comparison --------------------------------------------------------
    def max_abs_diff(self, other: "ExpPoly") -> float:
        """Largest coefficient modulus of the amplitude difference.

        Both operands must share the Gaussian shape; otherwise ``inf``.
        """
        if not self.exponent.same_shape(other.exponent, tol=1e-13):
            return float("inf")
        return self.amplitude().max_abs_diff(other.amplitude())

    def allclose(self, other: "ExpPoly", rtol: float = 1e-10) -> bool:
        """Coefficient comparison relative to the largest amplitude coefficient."""
        if not self.exponent.same_shape(other.exponent, tol=rtol):
            return False
        a, b = self.amplitude(), other.amplitude()
        scale = max(a.max_abs(), b.max_abs(), 1e-300)
        return a.max_abs_diff(b) <= rtol * scale


def expoly_derive(f: ExpPoly, var: str, order: int = 1) -> ExpPoly:
    """Product-rule derivative; the polynomial degree rises by ``order``."""
    if order < 0:
        raise ValueError("order must be non-negative")
    if var == "q":
        grad = f.exponent.grad_q()
    elif var == "p":
        grad = f.exponent.grad_p()
    else:
        raise ValueError(f"var must be 'q' or 'p', got {var!r}")
    poly = f.poly
    for _ in range(order):
        poly = poly.derive(var) - poly * grad
    return f.with_poly(poly)


# -- integration -----------------------------------------------------------

def gaussian_moments(cov: np.ndarray, max_i: int, max_j: int) -> np.ndarray:
    """Moments ``E[x^i y^j]`` of a centred (complex) Gaussian with covariance ``cov``.

    Uses the Stein recursion ``E[x f] = S_xx E[d_x f] + S_xy E[d_y f]``.
    """
    sxx, sxy, syy = cov[0, 0], cov[0, 1], cov[1, 1]
    mom = np.zeros((max_i + 1, max_j + 1), dtype=complex)
    mom[0, 0] = 1.0
    for j in range(2, max_j + 1):
        mom[0, j] = (j - 1) * syy * mom[0, j - 2]
    for i in range(1, max_i + 1):
        for j in range(max_j + 1):
            val = 0j
            if i >= 2:
                val += (i - 1) * sxx * mom[i - 2, j]
            if j >= 1:
                val += j * sxy * mom[i - 1, j - 1]
            mom[i, j] = val
    return mom


def _shift_matrix(n: int, mu: complex) -> np.ndarray:
    """``S[i, k] = C(i, k) mu^(i - k)`` so that ``(x + mu)^i = sum_k S[i, k] x^k``."""
    s = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for k in range(i + 1):
            s[i, k] = comb(i, k) * mu ** (i - k)
    return s


def gauss_integrate(f: ExpPoly, params: PhysParams) -> complex:
    """``integral f dq dp / (2 pi hbar)`` in closed form.

    The linear terms are removed by a (complex) shift, the Gaussian
    normalisation is ``pi / sqrt(det K)`` with the square root taken
    eigenvalue by eigenvalue (each lies in the right half plane), and
    polynomial moments follow from Wick's theorem.
    """
    ex = f.exponent
    if not ex.is_integrable():
        raise NonIntegrable(
            f"real part of the quadratic form is not positive definite: "
            f"A={ex.A}, B={ex.B}, C={ex.C}"
        )
    if f.prefactor == 0 or f.poly.is_zero():
        return 0j
    K = np.array([[ex.A, ex.C / 2], [ex.C / 2, ex.B]], dtype=complex)
    d = np.array([ex.Dq, ex.Dp], dtype=complex)
    Kinv = np.linalg.inv(K)
    mu = -Kinv @ d / 2
    log_shift = mu @ K @ mu - ex.E
    coeff = f.poly.array
    nq, np_ = coeff.shape
    if mu[0] != 0:
        coeff = _shift_matrix(nq, mu[0]).T @ coeff
    if mu[1] != 0:
        coeff = coeff @ _shift_matrix(np_, mu[1])
    eig = np.linalg.eigvals(K)
    sqrt_det = np.prod(np.sqrt(eig.astype(complex)))
    mom = gaussian_moments(Kinv / 2, nq - 1, np_ - 1)
    total = np.sum(coeff * mom)
    norm = pi / sqrt_det * np.exp(log_shift)
    return complex(f.prefactor * norm * total / (2 * pi * params.hbar))


# -- heat operator ---------------------------------------------------------

def _hermite_heat_table(n: int, s: complex) -> np.ndarray:
    """``T[j, r]``: coefficient of ``u^r`` in ``h_j(u) = sum_k j!/(k!(j-2k)!) (s/2)^k u^(j-2k)``."""
    t = np.zeros((n, n), dtype=complex)
    for j in range(n):
        for k in range(j // 2 + 1):
            t[j, j - 2 * k] = factorial(j) / (factorial(k) * factorial(j - 2 * k)) * (s / 2) ** k
    return t


def _linear_powers(n: int, uq: complex, up: complex, u0: complex) -> list[np.ndarray]:
    """Dense coefficient arrays of ``(uq q + up p + u0)^r`` for ``r < n``."""
    base = np.zeros((2, 2), dtype=complex)
    base[1, 0], base[0, 1], base[0, 0] = uq, up, u0
    powers = [np.ones((1, 1), dtype=complex)]
    for _ in range(1, n):
        prev = powers[-1]
        nxt = np.zeros((prev.shape[0] + 1, prev.shape[1] + 1), dtype=complex)
        nxt[:-1, :-1] += u0 * prev
        nxt[1:, :-1] += uq * prev
        nxt[:-1, 1:] += up * prev
        powers.append(nxt)
    return powers


def heat_apply_poly(c: complex, f: PhasePoly) -> PhasePoly:
    """``exp(c d^2/dp^2) f`` for a polynomial: the terminating series."""
    arr = f.array
    n = arr.shape[1]
    table = np.zeros((n, n), dtype=complex)
    for j in range(n):
        for k in range(j // 2 + 1):
            table[j, j - 2 * k] = c**k * factorial(j) / (factorial(k) * factorial(j - 2 * k))
    return PhasePoly(arr @ table)


def heat_apply(c: complex, f):
    """Apply ``exp(c d^2/dp^2)`` to a polynomial or an :class:`ExpPoly`.

    With ``beta = C q + Dp`` and ``w = 1 + 4 c B`` the Gaussian part maps as

        exp(-B p^2 - beta p) -> w^(-1/2) exp(-(B p^2 + beta p - c beta^2) / w)

    and a monomial ``q^i p^j`` in front becomes ``q^i h_j(u)`` where
    ``u = (p - 2 c beta) / w`` and ``h_j`` is the Hermite-type polynomial of
    :func:`_hermite_heat_table` with ``s = 2c/w``.  The square root uses the
    principal branch (cut along the negative real axis).
    """
    c = complex(c)
    if isinstance(f, PhasePoly):
        return heat_apply_poly(c, f)
    ex = f.exponent
    w = 1 + 4 * c * ex.B
    if abs(w) < SINGULAR_TOL:
        raise SingularWidth(f"1 + 4cB = {w} vanishes for c={c}, B={ex.B}")
    new_ex = QuadExp(
        A=ex.A - c * ex.C**2 / w,
        B=ex.B / w,
        C=ex.C / w,
        Dq=ex.Dq - 2 * c * ex.C * ex.Dp / w,
        Dp=ex.Dp / w,
        E=ex.E - c * ex.Dp**2 / w,
    )
    prefactor = f.prefactor / cmath.sqrt(w)
    arr = f.poly.array
    n = arr.shape[1]
    s = 2 * c / w
    table = _hermite_heat_table(n, s)
    # u = (p - 2c(Cq + Dp)) / w
    uq, up, u0 = -2 * c * ex.C / w, 1 / w, -2 * c * ex.Dp / w
    powers = _linear_powers(n, uq, up, u0)
    mixed = arr @ table  # [i, r]: coefficient of q^i u^r
    if uq == 0:
        upow = np.zeros((n, n), dtype=complex)
        for r, pw in enumerate(powers):
            upow[r, : pw.shape[1]] = pw[0, :]
        poly = PhasePoly(mixed @ upow)
    else:
        nq = arr.shape[0]
        out = np.zeros((nq + n, n), dtype=complex)
        for r, pw in enumerate(powers):
            for i in range(nq):
                if mixed[i, r] != 0:
                    out[i: i + pw.shape[0], : pw.shape[1]] += mixed[i, r] * pw
        poly = PhasePoly(out)
    return ExpPoly(poly, new_ex, prefactor)
