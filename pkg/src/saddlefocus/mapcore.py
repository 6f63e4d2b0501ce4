"""Saddle-focus interval maps.

Two variants share the parameters (rho, mu, omega, phi):

    one-sided   x' = mu + x**rho * cos(omega*ln(x) + phi),            x > 0
    symmetric   x' = sign(x) * (mu + |x|**rho * cos(omega*ln|x| + phi))

The origin is the saddle-focus itself.  The symmetric map is discontinuous
there, so ``step`` refuses x = 0 and ``step_from_origin`` makes the caller
pick the branch of the unstable manifold explicitly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import DomainError, NonFiniteError

DIVERGENCE_GUARD = K.DIVERGENCE_GUARD
ZERO_EPS = 1e-12


class Variant(enum.Enum):
    ONE_SIDED = "one-sided"
    SYMMETRIC = "symmetric"


class Branch(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


class Status(enum.IntEnum):
    MAX_ITERATIONS = K.MAX_ITERATIONS
    REACHED_ZERO = K.REACHED_ZERO
    DIVERGED = K.DIVERGED
    LEFT_DOMAIN = K.LEFT_DOMAIN


@dataclass(frozen=True)
class MapParams:
    rho: float
    mu: float
    omega: float
    phi: float = 0.0
    variant: Variant = Variant.SYMMETRIC

    def __post_init__(self):
        for name in ("rho", "mu", "omega", "phi"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.rho <= 0.0:
            raise DomainError(f"rho must be positive, got {self.rho}")
        if self.omega <= 0.0:
            raise DomainError(f"omega must be positive, got {self.omega}")
        if not isinstance(self.variant, Variant):
            object.__setattr__(self, "variant", Variant(self.variant))

    @property
    def symmetric(self) -> bool:
        return self.variant is Variant.SYMMETRIC


@dataclass(frozen=True)
class Trajectory:
    """Finite orbit x0, f(x0), ... together with the reason it stopped."""

    params: MapParams
    points: np.ndarray = field(repr=False)
    status: Status
    zero_eps: float = ZERO_EPS

    def __len__(self) -> int:
        return len(self.points)

    @property
    def last(self) -> float:
        return float(self.points[-1])


def _check_state(params: MapParams, x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"state must be finite, got {x}")
    if x == 0.0:
        raise DomainError("x = 0 is the saddle-focus; use step_from_origin")
    if not params.symmetric and x < 0.0:
        raise DomainError(f"one-sided map is defined for x > 0, got {x}")
    return x


def step(params: MapParams, x: float) -> float:
    """One application of the map."""
    x = _check_state(params, x)
    y = K.map_step(x, params.rho, params.mu, params.omega, params.phi)
    if not math.isfinite(y):
        raise NonFiniteError(f"map overflowed at x={x!r}")
    return y


def step_from_origin(params: MapParams, branch: Branch = Branch.POSITIVE) -> float:
    """Image of the origin along one side of the unstable manifold (0 -> +mu or -mu)."""
    branch = Branch(branch)
    if branch is Branch.NEGATIVE:
        if not params.symmetric:
            raise DomainError("the one-sided map has only the positive branch")
        return -params.mu
    return params.mu


def derivative(params: MapParams, x: float) -> float:
    """df/dx = |x|**(rho-1) * sqrt(rho^2+omega^2) * cos(omega*ln|x| + atan(omega/rho) + phi).

    The symmetric map is odd, so its derivative is even in x.
    """
    x = _check_state(params, x)
    return K.map_derivative(x, params.rho, params.omega, params.phi)


def iterate(params: MapParams, x0: float, max_iter: int, zero_eps: float = ZERO_EPS) -> Trajectory:
    """Orbit of x0 under at most ``max_iter`` map applications.

    Stops early when |x| < zero_eps, when |x| exceeds the divergence guard,
    or when a one-sided orbit leaves x > 0.  The stopping state is kept as
    the last point.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if not zero_eps > 0.0:
        raise ValueError("zero_eps must be positive")
    _check_state(params, x0)
    out = np.empty(max_iter + 1)
    n, status = K.iterate_into(float(x0), params.rho, params.mu, params.omega, params.phi,
                               params.symmetric, zero_eps, out)
    points = out[:n].copy()
    points.flags.writeable = False
    return Trajectory(params, points, Status(status), zero_eps)


def envelope_threshold(rho: float) -> float:
    """rho**(1/(1-rho)) * (1 - 1/rho): largest |mu| whose envelope meets the diagonal (rho > 1)."""
    if rho <= 1.0:
        raise DomainError(f"defined for rho > 1, got {rho}")
    return math.pow(rho, 1.0 / (1.0 - rho)) * (1.0 - 1.0 / rho)


def invariant_bound(params: MapParams) -> float | None:
    """A priori bound beta with |x_n| <= beta for the orbit of x_1 = mu.

    For rho < 1 this is (|mu|+1)**(1/(1-rho)).  For rho > 1 it is the
    smallest positive root of x**rho - x + |mu|, which exists only below the
    envelope threshold.  rho = 1 and rho > 1 above the threshold give None.
    """
    rho, m = params.rho, abs(params.mu)
    if rho < 1.0:
        return math.pow(m + 1.0, 1.0 / (1.0 - rho))
    if rho == 1.0:
        return None
    if m == 0.0:
        # x**rho - x vanishes at 0 and 1; 1 is the smallest positive root
        return 1.0
    if m > envelope_threshold(rho):
        return None
    lo = m
    hi = math.pow(rho, 1.0 / (1.0 - rho))
    if math.pow(hi, rho) - hi + m > 0.0:
        # double root lost to rounding on the threshold itself
        return hi
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return hi
        if math.pow(mid, rho) - mid + m > 0.0:
            lo = mid
        else:
            hi = mid
