"""Vacua, eigenstates, projectors and spectra for both star products.

Normalisation constants are always computed from :func:`l2_inner`; closed
forms are compared against computed states only up to a constant per level.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.polynomial import laguerre

from .errors import DegreeOverflow, ZeroNorm
from .gauss_class import ExpPoly, QuadExp, gauss_integrate
from .phase_poly import (
    MAX_DEGREE,
    PhasePoly,
    PhysParams,
    creation,
    damped_creation,
    hamiltonian,
    poly_sum,
)
from .star_engine import Kind, ProductKind, equivalence_T, star, star_exp_closed

__all__ = [
    "Picture",
    "EigenLabel",
    "vacuum",
    "ladder_state",
    "hermite_state",
    "generating_function",
    "laguerre_projector",
    "eigenstate",
    "l2_inner",
    "normalize",
    "energy_level",
    "fourier_coefficient",
    "fourier_partial_sum",
]

MAX_LEVEL = MAX_DEGREE // 2


class Picture(Enum):
    SCHRODINGER = "schrodinger"
    HEISENBERG = "heisenberg"


@dataclass(frozen=True)
class EigenLabel:
    n: int
    picture: Picture
    kind: ProductKind

    def __post_init__(self):
        _check_level(self.n)


def _check_level(n: int):
    if n < 0:
        raise ValueError("level must be non-negative")
    if n > MAX_LEVEL:
        raise DegreeOverflow(f"level {n} exceeds the supported maximum {MAX_LEVEL}")


def vacuum(kind: ProductKind) -> ExpPoly:
    """``2 (1 - 2i g)^(-1/2) exp(-(m w^2 q^2 + p^2 / (m (1 - 2i g))) / hbar w)``, ``g = gamma/w``.

    Reduces to ``2 exp(-2H / hbar w)`` for the Moyal product.
    """
    p = kind.effective
    a = p.m * p.omega / p.hbar
    b = 1.0 / (p.m * p.hbar * p.omega)
    if p.gamma == 0:
        return ExpPoly.gaussian(QuadExp(A=a, B=b), 2.0)
    w = p.width
    return ExpPoly.gaussian(QuadExp(A=a, B=b / w), 2.0 / cmath.sqrt(w))


def ladder_state(kind: ProductKind, n: int) -> ExpPoly:
    """Unnormalised ``a_bar * ... * a_bar * vacuum`` with n creation functions."""
    _check_level(n)
    abar = creation(kind.effective)
    state = vacuum(kind)
    for _ in range(n):
        state = star(kind, abar, state)
    return state


def _hermite_poly(n: int, mixing: complex, bbar: PhasePoly) -> PhasePoly:
    # mixing^(n/2) H_n(z / sqrt(mixing)) = sum_j (-1)^j n!/((n-2j)! j!) 2^(n-2j) mixing^j z^(n-2j)
    powers = [PhasePoly(1.0)]
    for _ in range(n):
        powers.append(powers[-1] * bbar)
    terms = []
    for j in range(n // 2 + 1):
        coeff = (-1) ** j * math.factorial(n) / (math.factorial(n - 2 * j) * math.factorial(j))
        coeff *= 2.0 ** (n - 2 * j) * mixing**j
        terms.append(powers[n - 2 * j] * coeff)
    return poly_sum(terms)


def hermite_state(kind: ProductKind, n: int) -> ExpPoly:
    """Closed-form unnormalised eigenstate ``Gamma^(n/2) H_n(b_bar / sqrt(Gamma)) vacuum``.

    Written in the branch-free expanded form, which also covers
    ``gamma = 0`` where it equals ``2^n a_bar^n vacuum``.
    """
    _check_level(n)
    p = kind.effective
    poly = _hermite_poly(n, p.mixing, damped_creation(p))
    vac = vacuum(kind)
    return vac.with_poly(poly * vac.poly)


def generating_function(kind: ProductKind, s: complex) -> ExpPoly:
    """``exp(2 s b_bar - Gamma s^2) vacuum`` evaluated as a Gaussian with a linear exponent."""
    p = kind.effective
    bbar = damped_creation(p)
    lin = bbar.coeffs
    ex = vacuum(kind).exponent
    # exp(+2 s b_bar) enters the stored exponent with a minus sign
    shifted = QuadExp(
        A=ex.A, B=ex.B, C=ex.C,
        Dq=ex.Dq - 2 * s * lin.get((1, 0), 0),
        Dp=ex.Dp - 2 * s * lin.get((0, 1), 0),
        E=ex.E + p.mixing * s * s,
    )
    return ExpPoly.gaussian(shifted, vacuum(kind).prefactor)


def laguerre_projector(kind: ProductKind, n: int) -> ExpPoly:
    """Heisenberg projector ``2 exp(-2H/hbar w) (-1)^n L_n(4H/hbar w)``, pushed
    through the equivalence map for the damped product."""
    _check_level(n)
    p = kind.effective
    moyal_params = p.undamped()
    x = hamiltonian(moyal_params) * (4.0 / (p.hbar * p.omega))
    coeffs = laguerre.lag2poly([0] * n + [1])
    poly = PhasePoly(0.0)
    for c in coeffs[::-1]:
        poly = poly * x + float(c)
    poly = poly * ((-1) ** n)
    base = vacuum(ProductKind(Kind.MOYAL, moyal_params))
    proj = base.with_poly(poly)
    if p.gamma == 0:
        return proj
    return equivalence_T(proj, p, "forward")


def l2_inner(f: ExpPoly, g: ExpPoly, params: PhysParams) -> complex:
    """``<f|g> = integral conj(f) g dq dp / (2 pi hbar)``."""
    return gauss_integrate(f.conj() * g, params)


def normalize(f: ExpPoly, params: PhysParams) -> tuple[ExpPoly, float]:
    """Return ``(f / ||f||, ||f||)``."""
    norm2 = l2_inner(f, f, params).real
    if not norm2 > 0:
        raise ZeroNorm("cannot normalize a zero-norm state")
    norm = math.sqrt(norm2)
    return f / norm, norm


def eigenstate(kind: ProductKind, n: int, picture: Picture = Picture.SCHRODINGER) -> ExpPoly:
    """Normalised Schrodinger eigenstate, or the Heisenberg projector."""
    if picture is Picture.HEISENBERG:
        return laguerre_projector(kind, n)
    return normalize(hermite_state(kind, n), kind.effective)[0]


def energy_level(kind: ProductKind, n: int) -> complex:
    """``hbar w (n + 1/2 + i gamma / 2w)``; real for the Moyal product."""
    p = kind.effective
    return p.hbar * p.omega * complex(n + 0.5, p.ratio / 2)


def fourier_coefficient(params: PhysParams, n: int, t: complex) -> complex:
    """Moyal Fourier coefficient ``integral pi_n Exp_*(tH/i hbar) dmu``."""
    kind = ProductKind(Kind.MOYAL, params.undamped())
    return gauss_integrate(laguerre_projector(kind, n) * star_exp_closed(kind, t), params)


def fourier_partial_sum(kind: ProductKind, t: complex, n_max: int, q, p):
    """``e^(gamma t/2) sum_{n <= N} e^(t lambda_n / i hbar) pi_n(q, p)``, lambda_n = hbar w (n + 1/2)."""
    prm = kind.effective
    total = 0
    for n in range(n_max + 1):
        phase = cmath.exp(-1j * (n + 0.5) * prm.omega * complex(t))
        total = total + phase * laguerre_projector(kind, n)(q, p)
    return cmath.exp(prm.gamma * complex(t) / 2) * np.asarray(total)
