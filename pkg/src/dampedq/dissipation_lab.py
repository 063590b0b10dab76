"""Inject / evolve / eject toy model of a measurement on a damped oscillator.

An undamped eigenstate is carried into the damped algebra by the
prescription ``a_bar^n rho_0 -> b_bar^n rho^gamma_0`` (with
``b_bar(q, p) = a_bar(q, p / (1 - 2i gamma/w))``), evolved with the complex
energies of the damped Hamiltonian, carried back by the inverse
prescription and renormalised.  Everything after the initial construction
is linear algebra on amplitude vectors.

Amplitudes refer to two fixed families of basis functions:

* Moyal side, level ``l``: ``a_bar^l rho_0 / sqrt(l!)``.  These have
  squared L2 norm ``4^-l``; the default ``"unit"`` convention normalises
  amplitude vectors as if they were orthonormal, ``"l2"`` uses the true
  norms.
* Damped side, level ``m``: ``H_m``-type states whose expansion
  coefficients follow from the Hermite monomial expansion.

The functions ``inject_projection`` and ``eject_projection`` recompute both
maps by L2 projection of explicit symbols; they agree with the closed
formulas up to one overall constant per vector.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ZeroNorm
from .gauss_class import ExpPoly
from .phase_poly import PhysParams, creation
from .star_engine import Kind, ProductKind
from .eigensystem import MAX_LEVEL, hermite_state, l2_inner, normalize, vacuum

__all__ = [
    "Basis",
    "StateVector",
    "GammaSchedule",
    "inject",
    "inject_projection",
    "evolve_damped",
    "eject",
    "eject_projection",
    "beta_coefficients",
    "normalize_state",
    "post_evolution",
    "pipeline",
    "transition_probabilities",
    "transition_sweep",
    "expected_energy",
    "schedule_evolve",
    "schedule_trace",
    "revival_factor",
    "prescribe",
    "prescribe_symbol",
    "overlap_modulus",
]

REVIVAL_TOL = 1e-12
CONVENTIONS = ("unit", "l2")


class Basis(Enum):
    MOYAL_EIGEN = "moyal"
    GAMMA_EIGEN = "gamma"


@dataclass(frozen=True)
class StateVector:
    """Amplitudes over eigenstate levels, sorted by decreasing level."""

    basis: Basis
    params: PhysParams
    coeffs: tuple = field(default=())

    def __post_init__(self):
        pairs = list(self.coeffs.items() if isinstance(self.coeffs, dict) else self.coeffs)
        items = sorted(((int(l), complex(a)) for l, a in pairs), key=lambda t: t[0], reverse=True)
        if len({l for l, _ in items}) != len(items):
            raise ValueError("levels must be distinct")
        if any(l < 0 for l, _ in items):
            raise ValueError("levels must be non-negative")
        object.__setattr__(self, "coeffs", tuple(items))

    @classmethod
    def pure(cls, basis: Basis, params: PhysParams, level: int) -> "StateVector":
        return cls(basis, params, ((level, 1.0),))

    @property
    def levels(self) -> np.ndarray:
        return np.array([l for l, _ in self.coeffs], dtype=int)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([a for _, a in self.coeffs], dtype=complex)

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def amplitude(self, level: int) -> complex:
        return self.as_dict().get(level, 0j)

    def norm(self, convention: str = "unit") -> float:
        return math.sqrt(float(np.sum(_weights(self, convention))))

    def probabilities(self, convention: str = "unit") -> dict:
        w = _weights(self, convention)
        total = w.sum()
        if not total > 0:
            raise ZeroNorm("zero state vector")
        return {int(l): float(x / total) for l, x in zip(self.levels, w)}


@dataclass(frozen=True)
class GammaSchedule:
    """Piecewise-constant damping: ``((gamma_i, duration_i), ...)``."""

    segments: tuple

    def __post_init__(self):
        segs = tuple((float(g), float(d)) for g, d in self.segments)
        if not segs:
            raise ValueError("schedule needs at least one segment")
        for g, d in segs:
            if not (math.isfinite(g) and g >= 0):
                raise ValueError(f"segment rate must be finite and >= 0, got {g}")
            if not (math.isfinite(d) and d > 0):
                raise ValueError(f"segment duration must be finite and > 0, got {d}")
        object.__setattr__(self, "segments", segs)


def _check_convention(convention: str):
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}")


def _weights(sv: StateVector, convention: str) -> np.ndarray:
    _check_convention(convention)
    w = np.abs(sv.amplitudes) ** 2
    if convention == "l2":
        if sv.basis is not Basis.MOYAL_EIGEN:
            raise ValueError("l2 weights are defined for the Moyal basis only")
        w = w * 0.25 ** sv.levels.astype(float)
    return w


def _check_n(n: int):
    if n < 0 or n > MAX_LEVEL:
        raise ValueError(f"level must be in 0..{MAX_LEVEL}")


# -- closed-form maps --------------------------------------------------------

def _alpha(l: int, k: int, mixing: complex) -> complex:
    return mixing**k / (2.0**l * math.factorial(k)) * math.sqrt(math.factorial(l) / math.factorial(l - 2 * k))


def _eject_entry(m: int, j: int, mixing: complex) -> complex:
    return ((-1) ** j * 2.0 ** (m - 2 * j) * mixing**j * math.sqrt(math.factorial(m))
            / (math.factorial(j) * math.sqrt(math.factorial(m - 2 * j))))


def _apply(sv: StateVector, entry, basis: Basis, params: PhysParams) -> StateVector:
    out: dict[int, complex] = {}
    mixing = params.mixing
    for l, amp in sv.coeffs:
        for k in range(l // 2 + 1):
            out[l - 2 * k] = out.get(l - 2 * k, 0j) + amp * entry(l, k, mixing)
    return StateVector(basis, params, tuple(out.items()))


def prescribe(sv: StateVector, params: PhysParams) -> StateVector:
    """Forward prescription of a Moyal-basis vector into the damped basis."""
    if sv.basis is not Basis.MOYAL_EIGEN:
        raise ValueError("prescribe expects a Moyal-basis state")
    return _apply(sv, _alpha, Basis.GAMMA_EIGEN, params)


def inject(n: int, params: PhysParams, with_oracle: bool = False):
    """Damped-basis amplitudes ``alpha_k = Gamma^k / (2^n k!) sqrt(n! / (n-2k)!)`` of level ``n - 2k``.

    With ``with_oracle`` the projection-based vector is returned as well.
    """
    _check_n(n)
    sv = prescribe(StateVector.pure(Basis.MOYAL_EIGEN, params, n), params)
    if with_oracle:
        return sv, inject_projection(n, params)
    return sv


def evolve_damped(sv: StateVector, t: float) -> StateVector:
    """Multiply level ``l`` by ``exp(E_l t / i hbar) = e^(-i w (l + 1/2) t) e^(gamma t / 2)``."""
    if sv.basis is not Basis.GAMMA_EIGEN:
        raise ValueError("evolve_damped expects a damped-basis state")
    p = sv.params
    grow = math.exp(p.gamma * t / 2)
    return StateVector(sv.basis, p, tuple(
        (l, a * cmath.exp(-1j * p.omega * (l + 0.5) * t) * grow) for l, a in sv.coeffs))


def eject(sv: StateVector, params: PhysParams | None = None) -> StateVector:
    """Inverse prescription ``b_bar^n rho^gamma_0 -> a_bar^n rho_0``, unnormalised.

    Level ``m`` feeds level ``m - 2j`` with weight
    ``(-1)^j 2^(m-2j) Gamma^j sqrt(m!) / (j! sqrt((m-2j)!))``.
    """
    if sv.basis is not Basis.GAMMA_EIGEN:
        raise ValueError("eject expects a damped-basis state")
    params = params or sv.params
    return _apply(sv, _eject_entry, Basis.MOYAL_EIGEN, params)


def revival_factor(omega_tau, exact: Fraction | None = None) -> complex:
    """``e^(2i w tau) - 1``, exactly zero at revival times.

    ``exact`` is ``w tau / pi`` as a rational, when known; otherwise values
    within ``REVIVAL_TOL`` of zero are snapped.
    """
    if exact is not None:
        r = Fraction(exact)
        if r.denominator == 1:
            return 0j
        if r.denominator == 2:
            return -2 + 0j
        return cmath.exp(2j * math.pi * float(r)) - 1
    f = cmath.exp(2j * omega_tau) - 1
    return 0j if abs(f) < REVIVAL_TOL else f


def beta_coefficients(n: int, tau: float, params: PhysParams, exact: Fraction | None = None) -> StateVector:
    """Closed form ``beta_k = Gamma^k / (4^k k!) sqrt(n!/(n-2k)!) e^(-i w (n + 1/2 + i g/2w) tau) (e^(2i w tau) - 1)^k``."""
    _check_n(n)
    w_tau = params.omega * tau
    lead = cmath.exp(-1j * w_tau * complex(n + 0.5, params.ratio / 2))
    factor = revival_factor(w_tau, exact)
    G = params.mixing
    coeffs = []
    for k in range(n // 2 + 1):
        c = G**k / (4.0**k * math.factorial(k)) * math.sqrt(math.factorial(n) / math.factorial(n - 2 * k))
        coeffs.append((n - 2 * k, c * lead * factor**k))
    return StateVector(Basis.MOYAL_EIGEN, params, tuple(coeffs))


def normalize_state(sv: StateVector, convention: str = "unit") -> tuple[StateVector, float]:
    """Return the unit vector and ``N = (sum |beta_k|^2)^(1/2)``."""
    norm = sv.norm(convention) if sv.basis is Basis.MOYAL_EIGEN else sv.norm("unit")
    if not norm > 0:
        raise ZeroNorm("cannot normalize a zero state vector")
    return StateVector(sv.basis, sv.params, tuple((l, a / norm) for l, a in sv.coeffs)), norm


def post_evolution(sv: StateVector, t: float, tau: float) -> StateVector:
    """Free Moyal evolution from ``tau`` to ``t``: phase ``-w (l + 1/2)(t - tau)`` per level."""
    if sv.basis is not Basis.MOYAL_EIGEN:
        raise ValueError("post_evolution expects a Moyal-basis state")
    if t < tau:
        raise ValueError("t must not precede tau")
    w = sv.params.omega
    return StateVector(sv.basis, sv.params, tuple(
        (l, a * cmath.exp(-1j * w * (l + 0.5) * (t - tau))) for l, a in sv.coeffs))


def pipeline(n: int, gamma: float, tau: float, params: PhysParams | None = None,
             convention: str = "unit") -> tuple[StateVector, float]:
    """inject -> evolve(tau) -> eject -> normalize; returns the state and ``N_n(tau)``."""
    _check_convention(convention)
    params = (params or PhysParams()).with_gamma(gamma)
    out = eject(evolve_damped(inject(n, params), tau), params)
    return normalize_state(out, convention)


def transition_probabilities(n: int, gamma: float, tau: float, params: PhysParams | None = None,
                             convention: str = "unit") -> list[tuple[int, float]]:
    """``[(k, |beta_hat_k|^2)]`` for levels ``n - 2k``; sums to one."""
    sv, _ = pipeline(n, gamma, tau, params, convention)
    probs = sv.probabilities(convention)
    return [(k, probs[n - 2 * k]) for k in range(n // 2 + 1)]


def transition_sweep(n: int, gamma_over_omega: float, omega_taus: Sequence[float],
                     convention: str = "unit") -> np.ndarray:
    """Probabilities for many times at once, shape ``(len(omega_taus), n//2 + 1)``.

    Evaluates the closed form for ``beta`` on arrays; the common factor
    ``exp(-i w (n + 1/2 + i g/2w) tau)`` drops out after normalisation.
    """
    _check_n(n)
    _check_convention(convention)
    x = np.asarray(omega_taus, dtype=float)
    G = PhysParams(gamma=gamma_over_omega).mixing
    ks = np.arange(n // 2 + 1)
    base = np.array([abs(G) ** (2 * k) / (16.0**k * math.factorial(k) ** 2)
                     * math.factorial(n) / math.factorial(n - 2 * k) for k in ks])
    if convention == "l2":
        base = base * 0.25 ** (n - 2 * ks).astype(float)
    f2 = np.abs(np.expm1(2j * x)) ** 2
    f2[f2 < REVIVAL_TOL**2] = 0.0
    w = base[None, :] * f2[:, None] ** ks[None, :]
    return w / w.sum(axis=1, keepdims=True)


def expected_energy(sv: StateVector, params: PhysParams | None = None, convention: str = "unit") -> float:
    """``sum_k prob_k hbar w (level_k + 1/2)``."""
    params = params or sv.params
    probs = sv.probabilities(convention)
    return float(sum(pr * params.hbar * params.omega * (l + 0.5) for l, pr in probs.items()))


def schedule_trace(n: int, schedule: GammaSchedule, params: PhysParams | None = None,
                   convention: str = "unit") -> list[StateVector]:
    """Normalised Moyal-basis state after each segment.

    A damped segment re-applies the prescription pair around its own
    evolution, so every joint passes through the Moyal basis; a segment
    with ``gamma = 0`` is a pure phase rotation.
    """
    _check_n(n)
    params = params or PhysParams()
    sv = StateVector.pure(Basis.MOYAL_EIGEN, params, n)
    trace = []
    for gamma, duration in schedule.segments:
        seg = params.with_gamma(gamma)
        sv = StateVector(Basis.MOYAL_EIGEN, seg, sv.coeffs)
        if gamma == 0:
            sv = post_evolution(sv, duration, 0.0)
        else:
            sv = eject(evolve_damped(prescribe(sv, seg), duration), seg)
        sv, _ = normalize_state(sv, convention)
        trace.append(sv)
    return trace


def schedule_evolve(n: int, schedule: GammaSchedule, params: PhysParams | None = None,
                    convention: str = "unit") -> StateVector:
    """Final normalised state of :func:`schedule_trace`."""
    return schedule_trace(n, schedule, params, convention)[-1]


# -- projection oracles ------------------------------------------------------

def _relative_poly(f: ExpPoly, base: ExpPoly):
    return base._aligned_poly(f)


def _moyal_basis_fn(params: PhysParams, l: int) -> ExpPoly:
    # pointwise a_bar^l rho_0 / sqrt(l!), i.e. the star ladder state scaled by 2^-l
    vac = vacuum(ProductKind(Kind.MOYAL, params.undamped()))
    return vac.with_poly(creation(params.undamped()) ** l) / math.sqrt(math.factorial(l))


def _gamma_basis_fn(params: PhysParams, m: int) -> ExpPoly:
    return normalize(hermite_state(ProductKind(Kind.GAMMA, params), m), params)[0]


def prescribe_symbol(f: ExpPoly, params: PhysParams, direction: str = "forward") -> ExpPoly:
    """``P(q, p) rho_0 -> P(q, p / w) rho^gamma_0`` (or the inverse), ``w = 1 - 2i gamma/w``."""
    moyal_vac = vacuum(ProductKind(Kind.MOYAL, params.undamped()))
    gamma_vac = vacuum(ProductKind(Kind.GAMMA, params))
    w = params.width
    if direction == "forward":
        poly = _relative_poly(f, moyal_vac).substitute_scale(1.0, 1.0 / w)
        return gamma_vac.with_poly(poly)
    if direction == "inverse":
        poly = _relative_poly(f, gamma_vac).substitute_scale(1.0, w)
        return moyal_vac.with_poly(poly)
    raise ValueError("direction must be 'forward' or 'inverse'")


def inject_projection(n: int, params: PhysParams) -> StateVector:
    """Amplitudes ``<rho^gamma_m | prescribed state>`` on the computed orthonormal damped states."""
    _check_n(n)
    psi = prescribe_symbol(_moyal_basis_fn(params, n), params, "forward")
    coeffs = [(m, l2_inner(_gamma_basis_fn(params, m), psi, params)) for m in range(n, -1, -2)]
    return StateVector(Basis.GAMMA_EIGEN, params, tuple(coeffs))


def _synthesize(sv: StateVector, params: PhysParams) -> ExpPoly:
    total = None
    for m, amp in sv.coeffs:
        term = _gamma_basis_fn(params, m) * amp
        total = term if total is None else total + term
    return total


def eject_projection(sv: StateVector, params: PhysParams | None = None) -> StateVector:
    """Moyal-basis amplitudes of the inverse-prescribed symbol.

    ``sv`` holds amplitudes on the orthonormal damped states (as produced
    by :func:`inject_projection`).  Coefficients are
    ``<e_l|psi> / <e_l|e_l>`` with ``e_l = a_bar^l rho_0 / sqrt(l!)``.
    """
    params = params or sv.params
    psi = prescribe_symbol(_synthesize(sv, params), params, "inverse")
    top = int(sv.levels.max())
    coeffs = []
    for l in range(top, -1, -2):
        e = _moyal_basis_fn(params, l)
        coeffs.append((l, l2_inner(e, psi, params) / l2_inner(e, e, params)))
    return StateVector(Basis.MOYAL_EIGEN, params, tuple(coeffs))


def overlap_modulus(u: StateVector, v: StateVector) -> float:
    """``|<u|v>| / (|u| |v|)`` over the union of levels."""
    levels = sorted(set(u.as_dict()) | set(v.as_dict()))
    a = np.array([u.amplitude(l) for l in levels])
    b = np.array([v.amplitude(l) for l in levels])
    return float(abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b)))
