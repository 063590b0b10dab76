"""Complex polynomials on the phase plane and the bidifferential brackets.

A :class:`PhasePoly` is a finite sum ``sum c[i, j] q**i p**j``.  The public
view is a sparse ``{(i, j): c}`` mapping; internally coefficients live in a
trimmed dense ``complex128`` array so that products, derivatives and
evaluation are vectorised.

Coefficients that arise from cancellation are pruned when their modulus is
below ``PRUNE_RTOL`` times the magnitude of the terms that produced them.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial, sqrt
from typing import Iterable, Mapping

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.signal import convolve2d

from .errors import DegreeOverflow

__all__ = [
    "MAX_DEGREE",
    "PRUNE_RTOL",
    "PhysParams",
    "PhasePoly",
    "poly_derive",
    "poly_eval",
    "bracket_power_P",
    "bracket_power_M",
    "hochschild_theta",
    "position",
    "momentum",
    "hamiltonian",
    "annihilation",
    "creation",
    "damped_creation",
    "length_scales",
    "scaled_params",
    "to_scaled",
    "from_scaled",
    "poly_sum",
]

MAX_DEGREE = 80
PRUNE_RTOL = 1e-14


@dataclass(frozen=True)
class PhysParams:
    """Physical constants of the (damped) oscillator.

    ``gamma`` is the damping rate of ``q'' + 2 gamma q' + omega**2 q = 0``.
    """

    m: float = 1.0
    omega: float = 1.0
    hbar: float = 1.0
    gamma: float = 0.0

    def __post_init__(self):
        for name in ("m", "omega", "hbar"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
        if not np.isfinite(self.gamma) or self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma!r}")

    @property
    def ratio(self) -> float:
        """Dimensionless damping ``gamma / omega``."""
        return self.gamma / self.omega

    @property
    def width(self) -> complex:
        """``1 - 2i gamma/omega``, the momentum width factor of the damped vacuum."""
        return 1.0 - 2j * self.ratio

    @property
    def mixing(self) -> complex:
        """``(i gamma/omega) / (1 - 2i gamma/omega)``."""
        return 1j * self.ratio / self.width

    def undamped(self) -> "PhysParams":
        return PhysParams(self.m, self.omega, self.hbar, 0.0)

    def with_gamma(self, gamma: float) -> "PhysParams":
        return PhysParams(self.m, self.omega, self.hbar, gamma)


def _trim(arr: np.ndarray) -> np.ndarray:
    nz = np.nonzero(arr)
    if len(nz[0]) == 0:
        return np.zeros((1, 1), dtype=complex)
    return arr[: nz[0].max() + 1, : nz[1].max() + 1]


def _prune(arr: np.ndarray, scale: np.ndarray) -> np.ndarray:
    arr = arr.copy()
    arr[np.abs(arr) <= PRUNE_RTOL * scale] = 0.0
    return arr


def _pad_to(arr: np.ndarray, shape) -> np.ndarray:
    if arr.shape == tuple(shape):
        return arr
    out = np.zeros(shape, dtype=complex)
    out[: arr.shape[0], : arr.shape[1]] = arr
    return out


def _falling(n_max: int, k: int) -> np.ndarray:
    """``i! / (i - k)!`` for ``i = k .. n_max`` as floats."""
    out = np.ones(n_max - k + 1)
    for i in range(k, n_max + 1):
        out[i - k] = float(factorial(i) // factorial(i - k))
    return out


class PhasePoly:
    """Polynomial in ``(q, p)`` with complex coefficients.

    Instances are immutable.  Construct from a mapping ``{(i, j): c}``, a 2-D
    array indexed ``[q_degree, p_degree]`` or a scalar.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs=None):
        if coeffs is None:
            arr = np.zeros((1, 1), dtype=complex)
        elif isinstance(coeffs, PhasePoly):
            arr = coeffs._c
        elif isinstance(coeffs, Mapping):
            if coeffs:
                dq = max(i for i, _ in coeffs) + 1
                dp = max(j for _, j in coeffs) + 1
            else:
                dq = dp = 1
            arr = np.zeros((dq, dp), dtype=complex)
            for (i, j), value in coeffs.items():
                if i < 0 or j < 0:
                    raise ValueError(f"negative exponent {(i, j)}")
                arr[i, j] += value
        elif np.isscalar(coeffs):
            arr = np.full((1, 1), coeffs, dtype=complex)
        else:
            arr = np.array(coeffs, dtype=complex)
            if arr.ndim != 2:
                raise ValueError("coefficient array must be two-dimensional")
        arr = _trim(np.array(arr, dtype=complex))
        arr.flags.writeable = False
        self._c = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "PhasePoly":
        obj = cls.__new__(cls)
        arr = _trim(arr)
        arr.flags.writeable = False
        obj._c = arr
        return obj

    @classmethod
    def constant(cls, value) -> "PhasePoly":
        return cls(complex(value))

    @classmethod
    def monomial(cls, i: int, j: int, coeff=1.0) -> "PhasePoly":
        return cls({(i, j): coeff})

    # -- views -------------------------------------------------------------
    @property
    def array(self) -> np.ndarray:
        """Read-only dense coefficient array ``[q_degree, p_degree]``."""
        return self._c

    @property
    def coeffs(self) -> dict:
        """Sparse ``{(i, j): c}`` view without zero entries."""
        i, j = np.nonzero(self._c)
        return {(int(a), int(b)): complex(self._c[a, b]) for a, b in zip(i, j)}

    @property
    def deg_q(self) -> int:
        return -1 if self.is_zero() else self._c.shape[0] - 1

    @property
    def deg_p(self) -> int:
        return -1 if self.is_zero() else self._c.shape[1] - 1

    @property
    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        i, j = np.nonzero(self._c)
        if len(i) == 0:
            return -1
        return int((i + j).max())

    def is_zero(self) -> bool:
        return not self._c.any()

    def max_abs(self) -> float:
        return float(np.abs(self._c).max())

    def __repr__(self):
        terms = []
        for (i, j), c in sorted(self.coeffs.items()):
            mono = "".join(s for s in (
                "" if i == 0 else ("q" if i == 1 else f"q^{i}"),
                "" if j == 0 else ("p" if j == 1 else f"p^{j}"),
            ))
            terms.append(f"({c:.6g}){mono}" if mono else f"({c:.6g})")
        return "PhasePoly(" + (" + ".join(terms) if terms else "0") + ")"

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other) -> "PhasePoly | None":
        if isinstance(other, PhasePoly):
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return PhasePoly(complex(other))
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        shape = (max(self._c.shape[0], other._c.shape[0]), max(self._c.shape[1], other._c.shape[1]))
        a, b = _pad_to(self._c, shape), _pad_to(other._c, shape)
        return PhasePoly._wrap(_prune(a + b, np.maximum(np.abs(a), np.abs(b))))

    __radd__ = __add__

    def __neg__(self):
        return PhasePoly._wrap(-self._c)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return PhasePoly._wrap(self._c * complex(other))
        if not isinstance(other, PhasePoly):
            return NotImplemented
        if self.degree + other.degree > MAX_DEGREE:
            raise DegreeOverflow(
                f"product degree {self.degree + other.degree} exceeds {MAX_DEGREE}"
            )
        return PhasePoly._wrap(_mul_arrays(self._c, other._c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return PhasePoly._wrap(self._c / complex(other))
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise ValueError("power must be a non-negative integer")
        result = PhasePoly(1.0)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._c.shape == other._c.shape and bool(np.array_equal(self._c, other._c))

    __hash__ = None

    def conj(self) -> "PhasePoly":
        return PhasePoly._wrap(np.conj(self._c))

    def derive(self, var: str, order: int = 1) -> "PhasePoly":
        return poly_derive(self, var, order)

    def __call__(self, q, p):
        return poly_eval(self, q, p)

    def substitute_scale(self, sq=1.0, sp=1.0) -> "PhasePoly":
        """Return ``f(sq * q, sp * p)``."""
        dq, dp = self._c.shape
        wq = np.power(complex(sq), np.arange(dq))
        wp = np.power(complex(sp), np.arange(dp))
        return PhasePoly._wrap(self._c * np.outer(wq, wp))

    def max_abs_diff(self, other) -> float:
        """Largest coefficient modulus of ``self - other`` (no pruning)."""
        other = self._coerce(other)
        shape = (max(self._c.shape[0], other._c.shape[0]), max(self._c.shape[1], other._c.shape[1]))
        return float(np.abs(_pad_to(self._c, shape) - _pad_to(other._c, shape)).max())

    def allclose(self, other, atol: float = 1e-10) -> bool:
        return self.max_abs_diff(other) <= atol


def _mul_arrays(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.size == 1:
        return a[0, 0] * b
    if b.size == 1:
        return a * b[0, 0]
    out = convolve2d(a, b)
    scale = convolve2d(np.abs(a), np.abs(b))
    return _prune(out, scale)


def poly_sum(terms: Iterable[PhasePoly]) -> PhasePoly:
    """Sum polynomials, pruning only at the end relative to the summand sizes."""
    terms = [t for t in terms if not t.is_zero()]
    if not terms:
        return PhasePoly()
    shape = (max(t._c.shape[0] for t in terms), max(t._c.shape[1] for t in terms))
    total = np.zeros(shape, dtype=complex)
    scale = np.zeros(shape)
    for t in terms:
        a = _pad_to(t._c, shape)
        total += a
        scale = np.maximum(scale, np.abs(a))
    return PhasePoly._wrap(_prune(total, scale))


def poly_derive(f: PhasePoly, var: str, order: int = 1) -> PhasePoly:
    """Exact partial derivative of ``f`` of the given order in ``"q"`` or ``"p"``."""
    if order < 0:
        raise ValueError("order must be non-negative")
    if order == 0:
        return f
    c = f.array
    if var == "q":
        if order >= c.shape[0]:
            return PhasePoly()
        w = _falling(c.shape[0] - 1, order)
        return PhasePoly._wrap(c[order:, :] * w[:, None])
    if var == "p":
        if order >= c.shape[1]:
            return PhasePoly()
        w = _falling(c.shape[1] - 1, order)
        return PhasePoly._wrap(c[:, order:] * w[None, :])
    raise ValueError(f"var must be 'q' or 'p', got {var!r}")


def poly_eval(f: PhasePoly, q, p):
    """Evaluate ``f`` at ``(q, p)``; arrays broadcast."""
    q = np.asarray(q)
    p = np.asarray(p)
    out = npoly.polyval2d(q, p, f.array)
    return complex(out) if out.ndim == 0 else out


def _mixed(f: PhasePoly, i: int, j: int) -> PhasePoly:
    return poly_derive(poly_derive(f, "q", i), "p", j)


def bracket_power_P(k: int, f: PhasePoly, g: PhasePoly) -> PhasePoly:
    """k-th power of the Poisson bidifferential operator, restricted to the diagonal.

    ``(d_q1 d_p2 - d_p1 d_q2)**k f(q1, p1) g(q2, p2)`` at ``q1 = q2, p1 = p2``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    terms = []
    for a in range(k + 1):
        b = k - a
        fd = _mixed(f, a, b)
        if fd.is_zero():
            continue
        gd = _mixed(g, b, a)
        if gd.is_zero():
            continue
        terms.append(fd * gd * (comb(k, a) * (-1) ** b))
    return poly_sum(terms)


def bracket_power_M(k: int, f: PhasePoly, g: PhasePoly, params: PhysParams) -> PhasePoly:
    """k-th power of ``P - 2 gamma m d_p1 d_p2`` restricted to the diagonal.

    Expanded multinomially: the term with ``a`` factors ``d_q1 d_p2``, ``b``
    factors ``-d_p1 d_q2`` and ``c`` factors ``-2 gamma m d_p1 d_p2``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    damp = -2.0 * params.gamma * params.m
    terms = []
    for c in range(k + 1):
        if c > 0 and damp == 0.0:
            break
        for a in range(k - c + 1):
            b = k - a - c
            fd = _mixed(f, a, b + c)
            if fd.is_zero():
                continue
            gd = _mixed(g, b, a + c)
            if gd.is_zero():
                continue
            weight = factorial(k) // (factorial(a) * factorial(b) * factorial(c))
            terms.append(fd * gd * (weight * (-1) ** b * damp**c))
    return poly_sum(terms)


def hochschild_theta(f: PhasePoly) -> PhasePoly:
    """``theta(f) = (1/2) d^2 f / dp^2``."""
    return poly_derive(f, "p", 2) * 0.5


# -- observables -----------------------------------------------------------

def position() -> PhasePoly:
    return PhasePoly.monomial(1, 0)


def momentum() -> PhasePoly:
    return PhasePoly.monomial(0, 1)


def hamiltonian(params: PhysParams) -> PhasePoly:
    """``p**2 / 2m + m omega**2 q**2 / 2``."""
    return PhasePoly({(0, 2): 0.5 / params.m, (2, 0): 0.5 * params.m * params.omega**2})


def annihilation(params: PhysParams) -> PhasePoly:
    """``a = p / sqrt(2 m hbar omega) - i sqrt(m omega / 2 hbar) q``."""
    m, w, h = params.m, params.omega, params.hbar
    return PhasePoly({(0, 1): 1.0 / sqrt(2 * m * h * w), (1, 0): -1j * sqrt(m * w / (2 * h))})


def creation(params: PhysParams) -> PhasePoly:
    """Complex conjugate of :func:`annihilation`."""
    return annihilation(params).conj()


def damped_creation(params: PhysParams) -> PhasePoly:
    """``b_bar(q, p) = a_bar(q, p / (1 - 2i gamma/omega))``."""
    return creation(params).substitute_scale(1.0, 1.0 / params.width)


# -- nondimensionalisation -------------------------------------------------

def length_scales(params: PhysParams) -> tuple[float, float]:
    """``(sqrt(hbar / m omega), sqrt(m hbar omega))``: q = l_q x, p = l_p y."""
    return sqrt(params.hbar / (params.m * params.omega)), sqrt(params.m * params.hbar * params.omega)


def scaled_params(params: PhysParams) -> PhysParams:
    """Parameters of the rescaled problem: m = omega = hbar = 1, gamma -> gamma/omega."""
    return PhysParams(1.0, 1.0, 1.0, params.ratio)


def to_scaled(f: PhasePoly, params: PhysParams) -> PhasePoly:
    """Express ``f(q, p)`` in the dimensionless variables ``(x, y)``."""
    lq, lp = length_scales(params)
    return f.substitute_scale(lq, lp)


def from_scaled(f: PhasePoly, params: PhysParams) -> PhasePoly:
    """Inverse of :func:`to_scaled`."""
    lq, lp = length_scales(params)
    return f.substitute_scale(1.0 / lq, 1.0 / lp)
