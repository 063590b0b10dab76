"""Named numerical checks grouped into suites, as run by ``dampedq verify``.

Every check reports the largest error it observed (or the smallest
deviation, for witnesses that must be non-zero) against a fixed threshold.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dissipation_lab import (
    beta_coefficients,
    eject_projection,
    evolve_damped,
    expected_energy,
    inject,
    overlap_modulus,
    pipeline,
    transition_probabilities,
)
from .eigensystem import (
    energy_level,
    fourier_coefficient,
    fourier_partial_sum,
    hermite_state,
    l2_inner,
    laguerre_projector,
    normalize,
    vacuum,
)
from .fock_oracle import oracle_product, symbol_to_matrix
from .gauss_class import ExpPoly
from .phase_poly import PhasePoly, PhysParams, annihilation, creation, hamiltonian, momentum
from .star_engine import (
    damped,
    equivalence_T,
    moyal,
    star,
    star_bracket,
    star_exp_closed,
    star_exp_series,
)

__all__ = ["Check", "SUITES", "run_suite", "random_poly", "diff"]

SEED = 20240607


@dataclass(frozen=True)
class Check:
    name: str
    observed: float
    threshold: float
    relation: str = "<"  # "<": error below threshold; ">": witness above threshold
    label: str = "max_err"

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.observed):
            return False
        if self.relation == "<":
            return self.observed < self.threshold
        return self.observed > self.threshold

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.label}{self.relation}{self.threshold:g} (observed {self.observed:.3e})"


# -- helpers -----------------------------------------------------------------

def random_poly(rng: np.random.Generator, degree: int = 4) -> PhasePoly:
    """Random complex polynomial of total degree at most ``degree``."""
    coeffs = {}
    for i in range(degree + 1):
        for j in range(degree + 1 - i):
            coeffs[(i, j)] = complex(rng.normal(), rng.normal())
    return PhasePoly(coeffs)


def diff(a, b) -> float:
    """Largest coefficient difference of two symbols (inf if Gaussian shapes differ)."""
    if isinstance(a, ExpPoly) or isinstance(b, ExpPoly):
        return a.max_abs_diff(b)
    return PhasePoly(a).max_abs_diff(PhasePoly(b))


def _products(params: PhysParams):
    return (moyal(params), damped(params))


def _grid(params: PhysParams, n: int = 5):
    lq = math.sqrt(params.hbar / (params.m * params.omega))
    lp = math.sqrt(params.m * params.hbar * params.omega)
    x = np.linspace(-1.0, 1.0, n)
    q, p = np.meshgrid(x * lq, x * lp, indexing="ij")
    return q.ravel(), p.ravel()


# -- algebra -----------------------------------------------------------------

def commutators(params: PhysParams) -> Check:
    """Star brackets ``[a, a_bar] = 1/i hbar``, ``[a, H] = -i w a``, ``[a_bar, H] = i w a_bar``."""
    w = params.omega
    a, ab, H = annihilation(params), creation(params), hamiltonian(params)
    err = 0.0
    for k in _products(params):
        err = max(err,
                  diff(star_bracket(k, a, ab), PhasePoly(1 / (1j * params.hbar))),
                  diff(star_bracket(k, a, H), a * (-1j * w)),
                  diff(star_bracket(k, ab, H), ab * (1j * w)))
    return Check("commutators", err, 1e-12)


def associativity(params: PhysParams, trials: int = 50) -> Check:
    rng = np.random.default_rng(SEED)
    err = 0.0
    for k in _products(params):
        for _ in range(trials):
            f, g, h = (random_poly(rng) for _ in range(3))
            lhs = star(k, star(k, f, g), h)
            rhs = star(k, f, star(k, g, h))
            err = max(err, diff(lhs, rhs))
    return Check("associativity", err, 1e-10)


def intertwining(params: PhysParams, trials: int = 50) -> Check:
    rng = np.random.default_rng(SEED + 1)
    mo, ga = _products(params)
    err = 0.0
    for _ in range(trials):
        f, g = random_poly(rng), random_poly(rng)
        lhs = equivalence_T(star(mo, f, g), params)
        rhs = star(ga, equivalence_T(f, params), equivalence_T(g, params))
        err = max(err, diff(lhs, rhs))
    return Check("intertwining", err, 1e-10)


def hermiticity_witness(params: PhysParams) -> Check:
    """``conj(p *g p^2)`` against ``conj(p^2) *g conj(p)``."""
    k = damped(params)
    f, g = momentum(), momentum() ** 2
    dev = diff(star(k, f, g).conj(), star(k, g.conj(), f.conj()))
    if params.gamma == 0:
        return Check("hermiticity_witness", dev, 1e-12)
    return Check("hermiticity_witness", dev, 1e-3, ">", "deviation")


def star_exp_agreement(params: PhysParams, omega_t: float = 0.1, terms: int = 40) -> Check:
    t = omega_t / params.omega
    q, p = _grid(params)
    err = 0.0
    for k in _products(params):
        series = star_exp_series(k, t, terms)(q, p)
        closed = star_exp_closed(k, t)(q, p)
        err = max(err, float(np.abs(series - closed).max()))
    return Check("star_exp_series_vs_closed", err, 1e-8)


def schrodinger_ode(params: PhysParams, omega_t: float = 0.5, delta: float = 1e-5) -> Check:
    t = omega_t / params.omega
    q, p = _grid(params)
    H = hamiltonian(params)
    err = 0.0
    for k in _products(params):
        dU = (star_exp_closed(k, t + delta)(q, p) - star_exp_closed(k, t - delta)(q, p)) / (2 * delta)
        rhs = star(k, H, star_exp_closed(k, t))(q, p) / (1j * params.hbar)
        err = max(err, float(np.abs(dU - rhs).max()))
    return Check("schrodinger_ode", err, 1e-6)


# -- spectra -----------------------------------------------------------------

def eigen_equations(params: PhysParams, n_max: int = 10) -> Check:
    H = hamiltonian(params)
    err = 0.0
    for k in _products(params):
        for n in range(n_max + 1):
            E = energy_level(k, n)
            for state in (hermite_state(k, n), laguerre_projector(k, n)):
                scale = max(state.amplitude().max_abs(), 1.0)
                err = max(err, diff(star(k, H, state), state * E) / scale)
    return Check("eigen_equations", err, 1e-10)


def gram_matrix(params: PhysParams, n_max: int = 8) -> Check:
    k = damped(params)
    states = [normalize(hermite_state(k, n), params)[0] for n in range(n_max + 1)]
    G = np.array([[l2_inner(a, b, params) for b in states] for a in states])
    return Check("gram_matrix", float(np.abs(G - np.eye(n_max + 1)).max()), 1e-9)


def vacuum_checks(params: PhysParams) -> Check:
    k = damped(params)
    pi0 = laguerre_projector(k, 0)
    kill = star(k, annihilation(params), pi0)
    err = max(kill.amplitude().max_abs(),
              abs(l2_inner(pi0, pi0, params) - 1),
              diff(equivalence_T(laguerre_projector(moyal(params), 0), params), vacuum(k)))
    return Check("vacuum", err, 1e-10)


def moyal_fourier(params: PhysParams, n_max: int = 12) -> Check:
    err = 0.0
    for omega_t in (0.3, 1.0):
        t = omega_t / params.omega
        for n in range(n_max + 1):
            c = fourier_coefficient(params, n, t)
            err = max(err, abs(c - cmath.exp(-1j * (n + 0.5) * omega_t)))
    return Check("moyal_fourier_coefficients", err, 1e-7)


def damped_fourier(params: PhysParams, n_max: int = 40, eps: float = 0.3) -> Check:
    """Abel-regularised partial sums against the closed star-exponential."""
    k = damped(params)
    q, p = _grid(params, 3)
    err = 0.0
    for omega_t in (0.5, 2.0):
        t = (omega_t - 1j * eps) / params.omega
        partial = fourier_partial_sum(k, t, n_max, q, p)
        err = max(err, float(np.abs(partial - star_exp_closed(k, t)(q, p)).max()))
    return Check("damped_fourier_partial_sums", err, 1e-3)


def self_adjointness_witness(params: PhysParams) -> Check:
    """``|<H*phi|phi> - <phi|H*phi>|`` for the normalised damped vacuum; equals ``hbar gamma``."""
    k = damped(params)
    H = hamiltonian(params)
    phi = normalize(hermite_state(k, 0), params)[0]
    dev = abs(l2_inner(star(k, H, phi), phi, params) - l2_inner(phi, star(k, H, phi), params))
    if params.gamma == 0:
        return Check("self_adjointness_witness", dev, 1e-10)
    return Check("self_adjointness_witness", dev, 1e-3, ">", "deviation")


# -- oracle ------------------------------------------------------------------

def oracle_idempotency(params: PhysParams, n_max: int = 6, N: int = 16) -> Check:
    err = 0.0
    for k in _products(params):
        pis = [laguerre_projector(k, n) for n in range(n_max + 1)]
        mats = [symbol_to_matrix(k, f, N) for f in pis]
        for i in range(n_max + 1):
            for j in range(n_max + 1):
                R = oracle_product(k, pis[i], pis[j], N)
                target = mats[i] if i == j else 0
                err = max(err, float(np.abs(R - target).max()))
    return Check("oracle_idempotency", err, 1e-8)


def oracle_evolution(params: PhysParams, N: int = 16) -> Check:
    k = moyal(params)
    err = 0.0
    for omega_t in (0.3, 1.0):
        U = symbol_to_matrix(k, star_exp_closed(k, omega_t / params.omega), N)
        target = np.diag(np.exp(-1j * (np.arange(N + 1) + 0.5) * omega_t))
        err = max(err, float(np.abs(U - target)[: N - 2, : N - 2].max()))
    return Check("oracle_evolution", err, 1e-7)


def oracle_hamiltonian(params: PhysParams, N: int = 16) -> Check:
    k = moyal(params)
    M = symbol_to_matrix(k, hamiltonian(params), N) / (params.hbar * params.omega)
    target = np.diag(np.arange(N + 1) + 0.5)
    return Check("oracle_hamiltonian", float(np.abs(M - target).max()), 1e-9)


# -- dissipation ---------------------------------------------------------------

def _taus(count: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).uniform(0.05, 2 * math.pi, count)


def dissipation_normalization(params: PhysParams) -> Check:
    ratio = params.ratio
    err = 0.0
    for n in range(11):
        for x in _taus(20, SEED + n):
            probs = transition_probabilities(n, ratio * params.omega, x / params.omega, params)
            err = max(err, abs(sum(pr for _, pr in probs) - 1))
    return Check("probability_normalization", err, 1e-12)


def dissipation_parity(params: PhysParams) -> Check:
    bad = 0
    for n in range(11):
        for x in _taus(20, SEED + n):
            sv, _ = pipeline(n, params.gamma, x / params.omega, params)
            if set(sv.as_dict()) - set(range(n, -1, -2)):
                bad += 1
    return Check("parity_selection", float(bad), 0.5, label="violations")


def dissipation_revival(params: PhysParams) -> Check:
    err = 0.0
    for n in range(11):
        for m in range(3):
            x = math.pi + 2 * m * math.pi
            probs = dict(transition_probabilities(n, params.gamma, x / params.omega, params))
            err = max(err, abs(probs[0] - 1))
    return Check("revival", err, 1e-12)


def dissipation_energy(params: PhysParams) -> Check:
    """Largest value of ``<H> / (hbar w) - (n + 1/2)`` on a 50-point grid; must be <= 0."""
    worst = -math.inf
    grid = np.linspace(0.1, 2 * math.pi - 0.1, 50)
    for n in range(2, 11):
        for x in grid:
            sv, _ = pipeline(n, params.gamma, x / params.omega, params)
            worst = max(worst, expected_energy(sv, params) / (params.hbar * params.omega) - (n + 0.5))
    if params.gamma == 0:
        return Check("energy_bound", abs(worst), 1e-12)
    return Check("energy_bound", worst, 0.0, label="max_excess")


def dissipation_reference_case() -> Check:
    params = PhysParams(gamma=0.5)
    probs = dict(transition_probabilities(2, 0.5, math.pi / 2, params))
    beta = beta_coefficients(2, math.pi / 2, params).probabilities()
    err = max(abs(probs[0] - beta[2]), abs(probs[1] - beta[0]),
              abs(probs[0] - 16 / 17), abs(probs[1] - 1 / 17))
    return Check("reference_16_17", err, 1e-10)


def dissipation_parallelism(params: PhysParams, n_max: int = 6) -> Check:
    worst = 0.0
    for n in range(n_max + 1):
        alpha, oracle = inject(n, params, with_oracle=True)
        worst = max(worst, 1 - overlap_modulus(alpha, oracle))
        for x in (0.7, 2.1):
            tau = x / params.omega
            b = beta_coefficients(n, tau, params)
            b_oracle = eject_projection(evolve_damped(oracle, tau), params)
            worst = max(worst, 1 - overlap_modulus(b, b_oracle))
    return Check("formula_vs_projection", worst, 1e-8, label="1-overlap")


SUITES: dict[str, list[Callable[[PhysParams], Check]]] = {
    "algebra": [commutators, associativity, intertwining, hermiticity_witness,
                star_exp_agreement, schrodinger_ode],
    "spectra": [eigen_equations, gram_matrix, vacuum_checks, moyal_fourier,
                damped_fourier, self_adjointness_witness],
    "oracle": [oracle_hamiltonian, oracle_idempotency, oracle_evolution],
    "dissipation": [dissipation_normalization, dissipation_parity, dissipation_revival,
                    dissipation_energy, lambda p: dissipation_reference_case(),
                    dissipation_parallelism],
}


def run_suite(name: str, params: PhysParams) -> list[Check]:
    """Run one suite (or ``"all"``) and return its checks in order."""
    names = list(SUITES) if name == "all" else [name]
    if any(n not in SUITES for n in names):
        raise KeyError(f"unknown suite {name!r}")
    return [check(params) for n in names for check in SUITES[n]]
