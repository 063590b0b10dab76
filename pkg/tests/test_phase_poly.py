import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dampedq.errors import DegreeOverflow
from dampedq.phase_poly import (
    MAX_DEGREE,
    PhasePoly,
    PhysParams,
    annihilation,
    bracket_power_M,
    bracket_power_P,
    creation,
    damped_creation,
    from_scaled,
    hamiltonian,
    hochschild_theta,
    momentum,
    poly_derive,
    poly_eval,
    position,
    scaled_params,
    to_scaled,
)

q, p = position(), momentum()

coeff = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


@st.composite
def polys(draw, max_degree=4):
    terms = {}
    for i in range(max_degree + 1):
        for j in range(max_degree + 1 - i):
            if draw(st.booleans()):
                terms[(i, j)] = draw(coeff)
    return PhasePoly(terms)


gammas = st.floats(min_value=0.0, max_value=2.0)


def rand_poly(rng, degree=4):
    return PhasePoly({(i, j): complex(*rng.normal(size=2))
                      for i in range(degree + 1) for j in range(degree + 1 - i)})


# -- representation --------------------------------------------------------

def test_canonical_form_drops_zero_coefficients():
    f = PhasePoly({(2, 0): 1.0, (0, 1): 0.0, (3, 3): 0})
    assert f.coeffs == {(2, 0): 1 + 0j}
    assert f.degree == 2
    assert PhasePoly().degree == -1
    assert PhasePoly().is_zero()


def test_arithmetic_identities():
    f = q * q * p + 2 * q
    assert (f - f).is_zero()
    assert f * 1 == f
    assert (f + 1) * (f - 1) == f * f - 1
    assert (q + p) ** 3 == q**3 + 3 * q * q * p + 3 * q * p * p + p**3


def test_degree_overflow_on_products():
    big = q ** (MAX_DEGREE // 2)
    with pytest.raises(DegreeOverflow):
        big * big * q


def test_cancellation_litter_is_pruned():
    a = PhasePoly({(1, 0): 0.1, (0, 0): 0.2})
    b = PhasePoly({(1, 0): 0.3, (0, 0): -0.1})
    c = a * 3 - b
    assert c.deg_q == 0  # 0.3 - 0.3 cancels to round-off and is removed


# -- derivatives and evaluation -------------------------------------------

def test_poly_derive_examples():
    f = q * q * p
    assert poly_derive(f, "q", 1) == 2 * q * p
    assert poly_derive(f, "p", 2).is_zero()
    P = PhysParams(m=2.0)
    assert poly_derive(hamiltonian(P), "p", 1).allclose(p / 2.0)
    with pytest.raises(ValueError):
        poly_derive(f, "x")


def test_poly_eval_examples():
    assert poly_eval(hamiltonian(PhysParams()), 0, 0) == 0
    assert poly_eval(q * p + 1, 1, 2) == 3
    P = PhysParams(m=1.3, omega=0.7, hbar=0.9)
    q0, p0 = 0.4, -1.1
    aa = creation(P) * annihilation(P)
    assert poly_eval(aa, q0, p0) == pytest.approx(poly_eval(hamiltonian(P), q0, p0) / (P.hbar * P.omega))


def test_eval_broadcasts_over_arrays():
    f = q * q + 2j * p
    x = np.linspace(-1, 1, 7)
    np.testing.assert_allclose(f(x, x[::-1]), x**2 + 2j * x[::-1])


# -- brackets --------------------------------------------------------------

def test_bracket_power_P_examples():
    assert bracket_power_P(1, q, p) == PhasePoly(1.0)
    assert bracket_power_P(2, q * q, p * p) == PhasePoly(4.0)
    H = hamiltonian(PhysParams())
    assert bracket_power_P(1, H, H).is_zero()


def test_bracket_power_M_examples():
    P = PhysParams(m=1.5, omega=0.8, gamma=0.3)
    H = hamiltonian(P)
    expected = q * (-P.m * P.omega**2) - p * (2 * P.gamma)
    assert bracket_power_M(1, p, H, P).allclose(expected)
    assert bracket_power_M(1, H, H, P).allclose(p * p * (-2 * P.gamma / P.m))
    assert bracket_power_M(1, p, p, P).allclose(PhasePoly(-2 * P.gamma * P.m))


@settings(max_examples=40, deadline=None)
@given(polys(), polys(), gammas)
def test_antisymmetric_part_is_twice_poisson(f, g, gamma):
    P = PhysParams(gamma=gamma)
    lhs = bracket_power_M(1, f, g, P) - bracket_power_M(1, g, f, P)
    assert lhs.allclose(bracket_power_P(1, f, g) * 2, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(polys(3), polys(3), polys(3), gammas)
def test_leibniz_rule(f, g, h, gamma):
    P = PhysParams(gamma=gamma)
    lhs = bracket_power_M(1, f * g, h, P)
    rhs = f * bracket_power_M(1, g, h, P) + bracket_power_M(1, f, h, P) * g
    assert lhs.allclose(rhs, atol=1e-8)


@settings(max_examples=40, deadline=None)
@given(polys(), polys(), gammas)
def test_hochschild_form(f, g, gamma):
    P = PhysParams(m=1.2, gamma=gamma)
    th = hochschild_theta
    rhs = bracket_power_P(1, f, g) + (f * th(g) - th(f * g) + th(f) * g) * (2 * P.m * gamma)
    assert bracket_power_M(1, f, g, P).allclose(rhs, atol=1e-9)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_M_reduces_to_P_at_zero_gamma(k):
    rng = np.random.default_rng(k)
    f, g = rand_poly(rng), rand_poly(rng)
    assert bracket_power_M(k, f, g, PhysParams()) == bracket_power_P(k, f, g)


# -- observables and scaling -----------------------------------------------

def test_params_validation():
    for bad in ({"m": 0}, {"omega": -1}, {"hbar": float("nan")}, {"gamma": -0.1}):
        with pytest.raises(ValueError):
            PhysParams(**bad)
    P = PhysParams(omega=2.0, gamma=0.5)
    assert P.ratio == 0.25
    assert P.width == 1 - 0.5j
    assert P.mixing == pytest.approx(0.25j / (1 - 0.5j))


def test_mixing_parameter_reference_value():
    assert PhysParams(gamma=0.5).mixing == pytest.approx(-0.25 + 0.25j)


def test_damped_creation_substitutes_momentum():
    P = PhysParams(gamma=0.4)
    b = damped_creation(P)
    assert b(0.3, 0.7) == pytest.approx(creation(P)(0.3, 0.7 / P.width))


def test_scaling_round_trip_and_invariance():
    P = PhysParams(m=2.5, omega=0.4, hbar=0.3, gamma=0.2)
    rng = np.random.default_rng(7)
    f = rand_poly(rng, 5)
    assert from_scaled(to_scaled(f, P), P).allclose(f, atol=1e-9)
    # H / (hbar omega) is (x^2 + y^2) / 2 in oscillator units
    h = to_scaled(hamiltonian(P), P) * (1 / (P.hbar * P.omega))
    assert h.allclose(hamiltonian(scaled_params(P)))
    assert scaled_params(P).gamma == pytest.approx(P.ratio)


def test_raw_and_scaled_brackets_agree():
    P = PhysParams(m=2.5, omega=0.4, hbar=0.3, gamma=0.2)
    S = scaled_params(P)
    rng = np.random.default_rng(11)
    f, g = rand_poly(rng, 3), rand_poly(rng, 3)
    # M scales like 1 / (hbar) in oscillator units: M_raw(f, g) = M_scaled(f~, g~) / hbar
    raw = to_scaled(bracket_power_M(1, f, g, P), P)
    scaled = bracket_power_M(1, to_scaled(f, P), to_scaled(g, P), S) * (1 / P.hbar)
    assert raw.allclose(scaled, atol=1e-10 * max(raw.max_abs(), 1))


def test_annihilation_normalisation():
    P = PhysParams(m=1.7, omega=2.2, hbar=0.6)
    a, ab = annihilation(P), creation(P)
    assert (a * ab * (P.hbar * P.omega)).allclose(hamiltonian(P))
    assert bracket_power_P(1, a, ab).allclose(PhasePoly(1 / (1j * P.hbar)))
    assert math.isclose(abs(a(1.0, 0.0)), math.sqrt(P.m * P.omega / (2 * P.hbar)))
