import cmath
import math
import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dampedq.dissipation_lab import (
    Basis,
    GammaSchedule,
    StateVector,
    beta_coefficients,
    eject,
    eject_projection,
    evolve_damped,
    expected_energy,
    inject,
    normalize_state,
    overlap_modulus,
    pipeline,
    post_evolution,
    prescribe_symbol,
    revival_factor,
    schedule_evolve,
    schedule_trace,
    transition_probabilities,
    transition_sweep,
)
from dampedq.eigensystem import l2_inner
from dampedq.errors import ZeroNorm
from dampedq.phase_poly import PhysParams

HALF = PhysParams(gamma=0.5)
GAMMA_HALF = -0.25 + 0.25j


# -- StateVector and schedule types -------------------------------------------

def test_state_vector_validation_and_order():
    sv = StateVector(Basis.MOYAL_EIGEN, HALF, {0: 0.5, 2: 1j})
    assert list(sv.levels) == [2, 0]
    assert sv.amplitude(2) == 1j and sv.amplitude(5) == 0
    assert sv.norm() == pytest.approx(math.sqrt(1.25))
    with pytest.raises(ValueError):
        StateVector(Basis.MOYAL_EIGEN, HALF, [(1, 1.0), (1, 2.0)])
    with pytest.raises(ValueError):
        StateVector(Basis.MOYAL_EIGEN, HALF, [(-1, 1.0)])


def test_schedule_validation():
    GammaSchedule([(0.5, 1.0), (0.0, 2.0)])
    for bad in ([], [(-0.1, 1.0)], [(0.5, 0.0)], [(0.5, float("inf"))]):
        with pytest.raises(ValueError):
            GammaSchedule(bad)


# -- inject ----------------------------------------------------------------------

def test_inject_single_level():
    sv = inject(1, HALF)
    assert sv.basis is Basis.GAMMA_EIGEN
    assert list(sv.levels) == [1]


def test_inject_ratio_reference_case():
    sv = inject(2, HALF)
    assert HALF.mixing == pytest.approx(GAMMA_HALF)
    assert sv.amplitude(0) / sv.amplitude(2) == pytest.approx(GAMMA_HALF * math.sqrt(2))


def test_inject_without_damping_keeps_one_level():
    sv = inject(6, PhysParams())
    assert sv.amplitude(6) == pytest.approx(2.0**-6)
    assert all(sv.amplitude(l) == 0 for l in (4, 2, 0))


@pytest.mark.parametrize("n", [0, 3, 4, 7])
def test_inject_formula(n):
    sv = inject(n, HALF)
    for k in range(n // 2 + 1):
        expected = GAMMA_HALF**k / (2**n * math.factorial(k)) * math.sqrt(
            math.factorial(n) / math.factorial(n - 2 * k))
        assert sv.amplitude(n - 2 * k) == pytest.approx(expected, abs=1e-15)


def test_inject_oracle_is_parallel():
    for n in range(7):
        alpha, oracle = inject(n, HALF, with_oracle=True)
        assert sorted(oracle.as_dict()) == sorted(alpha.as_dict())
        assert overlap_modulus(alpha, oracle) > 1 - 1e-8


# -- evolve / eject / beta -----------------------------------------------------------

def test_evolve_examples():
    sv = inject(3, HALF)
    assert evolve_damped(sv, 0.0) == sv
    t = 0.8
    out = evolve_damped(StateVector.pure(Basis.GAMMA_EIGEN, HALF, 3), t)
    assert abs(out.amplitude(3)) == pytest.approx(math.exp(0.25 * t))
    assert cmath.phase(out.amplitude(3)) == pytest.approx(cmath.phase(cmath.exp(-3.5j * t)))
    two = evolve_damped(evolve_damped(sv, 0.3), 0.5)
    one = evolve_damped(sv, 0.8)
    for l in sv.levels:
        assert two.amplitude(l) == pytest.approx(one.amplitude(l))
    with pytest.raises(ValueError):
        evolve_damped(StateVector.pure(Basis.MOYAL_EIGEN, HALF, 1), 1.0)


@pytest.mark.parametrize("n", range(9))
def test_eject_composition_equals_beta(n):
    tau = 1.1
    out = eject(evolve_damped(inject(n, HALF), tau), HALF)
    beta = beta_coefficients(n, tau, HALF)
    for l in beta.levels:
        assert out.amplitude(l) == pytest.approx(beta.amplitude(l), abs=1e-14)


def test_beta_reference_ratio():
    beta = beta_coefficients(2, math.pi / 2, HALF)
    ratio = abs(beta.amplitude(0) / beta.amplitude(2)) ** 2
    assert ratio == pytest.approx(abs(GAMMA_HALF) ** 2 / 2)
    assert ratio == pytest.approx(0.0625)


def test_beta_against_direct_formula():
    n, tau = 6, 0.9
    beta = beta_coefficients(n, tau, HALF)
    G = GAMMA_HALF
    for k in range(4):
        ref = (G**k / (4**k * math.factorial(k)) * math.sqrt(math.factorial(n) / math.factorial(n - 2 * k))
               * cmath.exp(-1j * tau * (n + 0.5 + 0.25j)) * (cmath.exp(2j * tau) - 1) ** k)
        assert beta.amplitude(n - 2 * k) == pytest.approx(ref, abs=1e-14)


def test_revival_beta():
    n = 4
    tau = math.pi
    beta = beta_coefficients(n, tau, HALF)
    assert beta.amplitude(2) == 0 and beta.amplitude(0) == 0
    probs = dict(transition_probabilities(n, 0.5, tau, HALF))
    assert probs[0] == pytest.approx(1.0, abs=1e-12)
    sv, _ = pipeline(n, 0.5, tau, HALF)
    assert sv.amplitude(n) == pytest.approx(cmath.exp(-1j * (n + 0.5) * tau), abs=1e-12)


def test_revival_factor_exact_and_snapped():
    assert revival_factor(0.0, Fraction(3)) == 0
    assert revival_factor(0.0, Fraction(1, 2)) == -2
    assert revival_factor(3 * math.pi) == 0
    assert revival_factor(1.0) == pytest.approx(cmath.exp(2j) - 1)


def test_beta_projection_oracle_is_parallel():
    for n in range(7):
        _, oracle = inject(n, HALF, with_oracle=True)
        for tau in (0.7, 2.1):
            b = beta_coefficients(n, tau, HALF)
            b_oracle = eject_projection(evolve_damped(oracle, tau), HALF)
            assert overlap_modulus(b, b_oracle) > 1 - 1e-8


# -- normalisation and probabilities --------------------------------------------------

def test_normalize_examples():
    unit = StateVector.pure(Basis.MOYAL_EIGEN, HALF, 3)
    same, N = normalize_state(unit)
    assert N == 1 and same == unit
    _, N0 = pipeline(5, 0.0, 2.3, PhysParams())
    assert N0 == pytest.approx(1.0)
    with pytest.raises(ZeroNorm):
        normalize_state(StateVector(Basis.MOYAL_EIGEN, HALF, {0: 0.0}))


def test_reference_probabilities():
    probs = transition_probabilities(2, 0.5, math.pi / 2, HALF)
    assert probs == [(0, pytest.approx(16 / 17, abs=1e-12)), (1, pytest.approx(1 / 17, abs=1e-12))]


def test_single_level_is_trivial():
    for tau in (0.3, 1.7, 4.0):
        assert transition_probabilities(1, 0.7, tau, PhysParams(gamma=0.7)) == [(0, 1.0)]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10), st.floats(0.01, 2.0), st.floats(0.05, 12.0))
def test_normalisation_and_parity(n, ratio, omega_tau):
    P = PhysParams(gamma=ratio)
    sv, _ = pipeline(n, ratio, omega_tau, P)
    assert set(sv.as_dict()) <= set(range(n, -1, -2))
    assert sum(sv.probabilities().values()) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("m", [0, 1, 2])
def test_revival_all_levels(m):
    for n in range(11):
        for ratio in (0.1, 0.5):
            probs = dict(transition_probabilities(n, ratio, math.pi + 2 * m * math.pi, PhysParams(gamma=ratio)))
            assert probs[0] == pytest.approx(1.0, abs=1e-12)


def test_energy_examples():
    pure = StateVector.pure(Basis.MOYAL_EIGEN, PhysParams(hbar=0.5, omega=2.0), 3)
    assert expected_energy(pure) == pytest.approx(3.5)
    sv, _ = pipeline(2, 0.5, math.pi / 2, HALF)
    assert expected_energy(sv) == pytest.approx(40.5 / 17)


def test_energy_decreases_off_revival():
    grid = np.linspace(0.1, 2 * math.pi - 0.1, 50)
    for n in range(2, 11):
        for x in grid:
            sv, _ = pipeline(n, 0.5, x, HALF)
            assert expected_energy(sv) < n + 0.5


def test_small_damping_limit():
    P = PhysParams(gamma=1e-3)
    for n in range(11):
        for x in (0.4, 1.3, 2.9):
            probs = dict(transition_probabilities(n, 1e-3, x, P))
            assert abs(probs[0] - 1) < 1e-4


def test_post_evolution():
    sv, _ = pipeline(4, 0.5, 1.0, HALF)
    assert post_evolution(sv, 1.0, 1.0) == sv
    for t in (2.0, 11.0):
        later = post_evolution(sv, t, 1.0)
        for l in sv.levels:
            assert abs(later.amplitude(l)) == pytest.approx(abs(sv.amplitude(l)))
            phase = later.amplitude(l) / sv.amplitude(l)
            assert phase == pytest.approx(cmath.exp(-1j * (l + 0.5) * (t - 1.0)))
    with pytest.raises(ValueError):
        post_evolution(sv, 0.5, 1.0)


# -- conventions -------------------------------------------------------------------------

def test_l2_convention_reference_case():
    probs = dict(transition_probabilities(2, 0.5, math.pi / 2, HALF, convention="l2"))
    assert probs[0] == pytest.approx(0.5) and probs[1] == pytest.approx(0.5)


def test_l2_convention_uses_true_norms():
    # the Moyal amplitude basis a_bar^l rho_0 / sqrt(l!) has squared norm 4^-l
    from dampedq.dissipation_lab import _moyal_basis_fn
    for l in range(5):
        e = _moyal_basis_fn(HALF, l)
        assert l2_inner(e, e, HALF).real == pytest.approx(0.25**l)


def test_bad_convention():
    with pytest.raises(ValueError):
        transition_probabilities(2, 0.5, 1.0, HALF, convention="other")


# -- prescription symbols ---------------------------------------------------------------

def test_prescription_round_trip():
    from dampedq.dissipation_lab import _moyal_basis_fn
    f = _moyal_basis_fn(HALF, 3)
    back = prescribe_symbol(prescribe_symbol(f, HALF), HALF, "inverse")
    assert back.allclose(f, rtol=1e-12)
    with pytest.raises(ValueError):
        prescribe_symbol(f, HALF, "sideways")


# -- sweeps ------------------------------------------------------------------------------

def test_sweep_matches_pipeline_and_is_fast():
    xs = np.linspace(0.01, 2 * math.pi, 10_000)
    t0 = time.perf_counter()
    table = transition_sweep(10, 0.5, xs)
    assert time.perf_counter() - t0 < 1.0
    assert table.shape == (10_000, 6)
    for i in (0, 1234, 9999):
        probs = [pr for _, pr in transition_probabilities(10, 0.5, xs[i], HALF)]
        np.testing.assert_allclose(table[i], probs, atol=1e-12)
    l2 = transition_sweep(2, 0.5, [math.pi / 2], convention="l2")
    np.testing.assert_allclose(l2[0], [0.5, 0.5])


# -- schedules ------------------------------------------------------------------------------

def test_single_segment_matches_pipeline():
    sv = schedule_evolve(4, GammaSchedule([(0.5, 1.3)]), HALF)
    ref, _ = pipeline(4, 0.5, 1.3, HALF)
    for l in ref.levels:
        assert sv.amplitude(l) == pytest.approx(ref.amplitude(l))


def test_undamped_segment_keeps_probabilities():
    trace = schedule_trace(4, GammaSchedule([(0.5, 1.3), (0.0, 2.0)]), HALF)
    assert len(trace) == 2
    a, b = trace[0].probabilities(), trace[1].probabilities()
    assert a.keys() == b.keys()
    for l in a:
        assert b[l] == pytest.approx(a[l])


def test_split_at_equal_rate_is_seamless():
    # the prescription pair cancels at a joint between equal rates
    one = schedule_evolve(4, GammaSchedule([(0.5, 1.2)]), HALF).probabilities()
    two = schedule_evolve(4, GammaSchedule([(0.5, 0.6), (0.5, 0.6)]), HALF).probabilities()
    assert max(abs(one[l] - two[l]) for l in one) < 1e-12


def test_joint_between_different_rates_depends_on_order():
    up = schedule_evolve(4, GammaSchedule([(0.2, 0.6), (0.8, 0.6)]), HALF).probabilities()
    down = schedule_evolve(4, GammaSchedule([(0.8, 0.6), (0.2, 0.6)]), HALF).probabilities()
    assert sum(up.values()) == pytest.approx(1.0) and sum(down.values()) == pytest.approx(1.0)
    assert abs(up[4] - down[4]) > 1e-2


def test_later_damping_can_raise_top_level_weight():
    # a second damped segment completing w tau = pi restores the initial level
    trace = schedule_trace(4, GammaSchedule([(0.5, 0.6), (0.5, math.pi - 0.6)]), HALF)
    assert trace[0].probabilities()[4] < 0.9
    assert trace[1].probabilities()[4] == pytest.approx(1.0, abs=1e-12)
