"""Brute-force operator-matrix oracle.

A symbol ``F`` is represented by the truncated matrix
``F[n, m] = <n|F|m> = integral F * S_mn dmu`` where ``S_mn`` is the Moyal
symbol of ``|m><n|``.  Star products then become matrix products.  Damped
symbols are pulled back to the Moyal side with the inverse equivalence map
first, so the oracle's correctness reduces to the Moyal case.

The basis symbols are Laguerre-type polynomials whose monomial expansion
cancels catastrophically at high levels, so the pairing is evaluated with
the dyads built exactly in the complex coordinates ``(a_bar, a)`` (rational
coefficients) and summed in extended precision.  This path applies whenever
the symbol's Gaussian is rotation invariant in oscillator units, which holds
for every state, projector and star-exponential of the oscillator; other
Gaussians fall back to double-precision Wick integration.

Polynomial symbols give banded matrices: a degree-d polynomial couples
levels up to d/2 apart, so products involving them are only exact at least
d/2 levels away from the truncation boundary.
"""

from __future__ import annotations

import math
from fractions import Fraction
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache

import mpmath
import numpy as np
from scipy.signal import convolve2d

from .errors import DegreeOverflow, NonIntegrable, TruncationTail
from .gauss_class import ExpPoly, gauss_integrate
from .phase_poly import PhasePoly, PhysParams, annihilation, creation, length_scales
from .star_engine import Kind, ProductKind, equivalence_T, star
from .eigensystem import vacuum

__all__ = [
    "DEFAULT_N",
    "TAIL_TOL",
    "CoeffMatrix",
    "dyad_symbol",
    "normalized_dyad",
    "symbol_to_matrix",
    "oracle_product",
]

DEFAULT_N = 16
MAX_N = 20
TAIL_TOL = 1e-9
WORKING_DPS = 40


class CoeffMatrix(np.ndarray):
    """``(N + 1) x (N + 1)`` complex matrix in the Fock basis; ``N`` is the top level."""

    def __new__(cls, entries):
        arr = np.asarray(entries, dtype=complex).view(cls)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("CoeffMatrix must be square")
        return arr

    @property
    def N(self) -> int:
        return self.shape[0] - 1


def _check_levels(*levels: int):
    for n in levels:
        if n < 0 or n > MAX_N:
            raise DegreeOverflow(f"oracle level {n} outside 0..{MAX_N}")


def dyad_symbol(kind: ProductKind, n: int, m: int) -> ExpPoly:
    """Unnormalised ``a_bar^{*n} * vacuum * a^{*m}``, proportional to ``|n><m|``."""
    _check_levels(n, m)
    return _dyad_row(kind, n, m)[m]


@lru_cache(maxsize=64)
def _dyad_row(kind: ProductKind, n: int, m_max: int) -> tuple:
    p = kind.effective
    abar, a = creation(p), annihilation(p)
    left = vacuum(kind)
    for _ in range(n):
        left = star(kind, abar, left)
    row = [left]
    for _ in range(m_max):
        row.append(star(kind, row[-1], a))
    return tuple(row)


@lru_cache(maxsize=8)
def _moyal_basis(params: PhysParams, N: int) -> tuple:
    """Normalised Moyal symbols ``S[m][n]`` of ``|m><n|`` for ``m, n <= N``."""
    kind = ProductKind(Kind.MOYAL, params.undamped())
    return tuple(
        tuple(s / math.sqrt(math.factorial(m) * math.factorial(n))
              for n, s in enumerate(_dyad_row(kind, m, N)))
        for m in range(N + 1)
    )


def normalized_dyad(kind: ProductKind, n: int, m: int) -> ExpPoly:
    """Symbol of ``|n><m|`` itself.

    The constant is computed from the L2 norm of the Moyal pull-back (which
    equals ``sqrt(n! m!)``), so the damped dyad is the equivalence-map image
    of the Moyal one.
    """
    from .eigensystem import l2_inner

    raw = dyad_symbol(kind, n, m)
    params = kind.effective
    pulled = equivalence_T(raw, params, "inverse") if params.gamma else raw
    norm = math.sqrt(l2_inner(pulled, pulled, params).real)
    return raw / norm


def _pullback(kind: ProductKind, F):
    params = kind.effective
    if kind.kind is Kind.GAMMA and params.gamma != 0:
        return equivalence_T(F, params, "inverse")
    return F


@lru_cache(maxsize=None)
def exact_dyad_terms(m: int, n: int) -> tuple:
    """Exact expansion of ``a_bar^{*m} * pi_0 * a^{*n} = 2 sum_k s_k a_bar^(m-k) a^(n-k) e^(-2 a_bar a)``.

    Returns ``((k, s_k), ...)`` with rational ``s_k``.  In oscillator units
    ``a_bar * G`` multiplies the polynomial part by ``2 a_bar - (1/2) d/da``
    and ``G * a`` by ``2 a - (1/2) d/da_bar``.
    """
    _check_levels(m, n)
    poly = {(0, 0): Fraction(1)}
    for _ in range(m):
        nxt = {}
        for (j, l), c in poly.items():
            nxt[(j + 1, l)] = nxt.get((j + 1, l), 0) + 2 * c
            if l:
                nxt[(j, l - 1)] = nxt.get((j, l - 1), 0) - Fraction(l, 2) * c
        poly = {k: v for k, v in nxt.items() if v}
    for _ in range(n):
        nxt = {}
        for (j, l), c in poly.items():
            nxt[(j, l + 1)] = nxt.get((j, l + 1), 0) + 2 * c
            if j:
                nxt[(j - 1, l)] = nxt.get((j - 1, l), 0) - Fraction(j, 2) * c
        poly = {k: v for k, v in nxt.items() if v}
    return tuple(sorted(((m - j, c) for (j, l), c in poly.items()), key=lambda t: t[0]))


@lru_cache(maxsize=None)
def _xy_to_ladder(n: int) -> tuple:
    """Dense arrays of ``x^i y^j`` in powers of ``(a_bar, a)`` for ``i, j < n``.

    Oscillator units: ``x = -i (a_bar - a) / sqrt 2``, ``y = (a_bar + a) / sqrt 2``.
    """
    r = 1 / math.sqrt(2)
    xs = [np.ones((1, 1), dtype=complex)]
    ys = [np.ones((1, 1), dtype=complex)]
    x1 = np.array([[0, 1j * r], [-1j * r, 0]], dtype=complex)  # [j, l] -> a_bar^j a^l
    y1 = np.array([[0, r], [r, 0]], dtype=complex)
    for _ in range(1, n):
        xs.append(convolve2d(xs[-1], x1))
        ys.append(convolve2d(ys[-1], y1))
    return tuple(xs), tuple(ys)


def _ladder_coeffs(poly: PhasePoly) -> np.ndarray:
    arr = poly.array
    n = max(arr.shape)
    xs, ys = _xy_to_ladder(n)
    deg = arr.shape[0] + arr.shape[1] - 2
    out = np.zeros((deg + 1, deg + 1), dtype=complex)
    for i in range(arr.shape[0]):
        for j in range(arr.shape[1]):
            c = arr[i, j]
            if c != 0:
                term = convolve2d(xs[i], ys[j])
                out[: term.shape[0], : term.shape[1]] += c * term
    return out


def _rotational_form(F, params: PhysParams):
    """``(constant, ladder coefficients, kappa)`` with ``F = constant * G(a_bar, a) e^(-2 kappa a_bar a)``,
    or ``None`` if the Gaussian is not rotation invariant in oscillator units."""
    lq, lp = length_scales(params)
    if isinstance(F, PhasePoly):
        return 1.0 + 0j, _ladder_coeffs(F.substitute_scale(lq, lp)), 0j
    ex = F.exponent
    a_s, b_s = ex.A * lq * lq, ex.B * lp * lp
    scale = max(abs(a_s), abs(b_s), 1.0)
    if ex.C != 0 or ex.Dq != 0 or ex.Dp != 0 or abs(a_s - b_s) > 1e-14 * scale:
        return None
    const = F.prefactor * mpmath.exp(-mpmath.mpc(ex.E))
    return complex(const), _ladder_coeffs(F.poly.substitute_scale(lq, lp)), (a_s + b_s) / 2


def _exact_matrix(form, N: int) -> np.ndarray:
    const, G, kappa = form
    with mpmath.workdps(WORKING_DPS):
        c = 2 * (1 + mpmath.mpc(kappa))
        if mpmath.re(c) <= 0:
            raise NonIntegrable(f"combined Gaussian width {complex(c)} is not decaying")
        top = G.shape[0] + N + 1
        inv_pow = [1 / c]
        for _ in range(top):
            inv_pow.append(inv_pow[-1] / c)
        fact = [mpmath.mpf(1)]
        for e in range(1, top + 1):
            fact.append(fact[-1] * e)
        diag = {}
        for j, l in zip(*np.nonzero(G)):
            diag.setdefault(int(l - j), []).append((int(j), mpmath.mpc(G[j, l])))
        out = np.zeros((N + 1, N + 1), dtype=complex)
        for n in range(N + 1):
            for m in range(N + 1):
                entries = diag.get(m - n)
                if not entries:
                    continue
                total = mpmath.mpc(0)
                for k, s in exact_dyad_terms(m, n):
                    s_mp = mpmath.mpf(s.numerator) / s.denominator
                    acc = mpmath.mpc(0)
                    for j, g in entries:
                        e = j + m - k
                        acc += g * fact[e] * inv_pow[e]
                    total += s_mp * acc
                norm = 2 / mpmath.sqrt(fact[m] * fact[n])
                out[n, m] = complex(total * norm * const)
    return out


def symbol_to_matrix(kind: ProductKind, F, N: int = DEFAULT_N, workers: int | None = None) -> CoeffMatrix:
    """Matrix ``<n|F|m> = integral F * S_mn dmu`` for ``n, m <= N``.

    ``S_mn`` is the normalised Moyal symbol of ``|m><n|``.  Damped symbols are
    pulled back with the inverse equivalence map first.
    """
    _check_levels(N)
    params = kind.effective
    G = _pullback(kind, F)
    if isinstance(G, (int, float, complex)):
        G = PhasePoly(complex(G))
    form = _rotational_form(G, params)
    if form is not None:
        return CoeffMatrix(_exact_matrix(form, N))
    basis = _moyal_basis(params.undamped(), N)

    def entry(nm):
        n, m = nm
        return gauss_integrate(basis[m][n] * G, params)

    index = [(n, m) for n in range(N + 1) for m in range(N + 1)]
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            values = list(pool.map(entry, index))
    else:
        values = [entry(nm) for nm in index]
    return CoeffMatrix(np.array(values).reshape(N + 1, N + 1))


def tail_weight(M: np.ndarray) -> float:
    """Largest modulus on the last row or column."""
    return float(max(np.abs(M[-1, :]).max(), np.abs(M[:, -1]).max()))


def oracle_product(kind: ProductKind, F, G, N: int = DEFAULT_N) -> CoeffMatrix:
    """Matrix of ``F * G`` computed as a product of truncated matrices.

    Gaussian operands must have negligible weight at level N; polynomial
    operands are banded and exempt (see module docstring).
    """
    MF = symbol_to_matrix(kind, F, N)
    MG = symbol_to_matrix(kind, G, N)
    for label, sym, M in (("left", F, MF), ("right", G, MG)):
        if isinstance(sym, ExpPoly):
            tail = tail_weight(M)
            if tail >= TAIL_TOL:
                raise TruncationTail(f"{label} operand has weight {tail:.3g} at level {N}")
    return CoeffMatrix(MF @ MG)
