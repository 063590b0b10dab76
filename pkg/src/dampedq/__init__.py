"""Star-product quantum mechanics of the damped harmonic oscillator.

The package implements the Moyal product and its damped deformation on
polynomial and Gaussian-times-polynomial phase-space symbols, the
eigenstates and projectors of the oscillator Hamiltonian for both products,
a truncated Fock-matrix oracle, and a coefficient-space model of injecting
an undamped eigenstate into the damped dynamics and back.
"""

from .errors import (
    DampedQError,
    DegreeOverflow,
    NonIntegrable,
    SingularTime,
    SingularWidth,
    TruncationTail,
    UnsupportedOperands,
    ZeroNorm,
)
from .phase_poly import PhasePoly, PhysParams, annihilation, creation, hamiltonian
from .gauss_class import ExpPoly, QuadExp, gauss_integrate, heat_apply
from .star_engine import (
    Kind,
    ProductKind,
    damped,
    equivalence_T,
    moyal,
    star,
    star_bracket,
    star_exp_closed,
    star_exp_series,
)
from .eigensystem import (
    Picture,
    eigenstate,
    energy_level,
    hermite_state,
    l2_inner,
    ladder_state,
    laguerre_projector,
    normalize,
    vacuum,
)
from .fock_oracle import oracle_product, symbol_to_matrix
from .dissipation_lab import (
    GammaSchedule,
    StateVector,
    schedule_evolve,
    transition_probabilities,
)

__version__ = "0.1.0"

__all__ = [
    "DampedQError",
    "DegreeOverflow",
    "ExpPoly",
    "GammaSchedule",
    "Kind",
    "NonIntegrable",
    "PhasePoly",
    "PhysParams",
    "Picture",
    "ProductKind",
    "QuadExp",
    "SingularTime",
    "SingularWidth",
    "StateVector",
    "TruncationTail",
    "UnsupportedOperands",
    "ZeroNorm",
    "annihilation",
    "creation",
    "damped",
    "eigenstate",
    "energy_level",
    "equivalence_T",
    "gauss_integrate",
    "hamiltonian",
    "heat_apply",
    "hermite_state",
    "l2_inner",
    "ladder_state",
    "laguerre_projector",
    "moyal",
    "normalize",
    "oracle_product",
    "schedule_evolve",
    "star",
    "star_bracket",
    "star_exp_closed",
    "star_exp_series",
    "symbol_to_matrix",
    "transition_probabilities",
    "vacuum",
]
