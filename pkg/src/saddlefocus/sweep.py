"""Two-parameter lattice sweeps of scalar fields.

Exceptional cells are stored as reserved finite codes instead of NaN or
infinity so the payload stays a plain binary64 array:

    DIVERGED      1e308                    orbit left |x| <= 1e12 (or LE = +inf)
    REACHED_ZERO  -1e308                   orbit hit the origin (or LE = -inf)
    UNDEFINED     1.7976931348623157e308   mu = 0, domain violations, NaN

Rows are indexed by the y axis and columns by the x axis (row-major,
``values[j, i]``).  Every cell is computed independently by the same
compiled kernel, so the result does not depend on how rows are split
between worker threads.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .analysis import N_SAMPLE, N_TRANSIENT, PERIOD_TOL
from .mapcore import ZERO_EPS, Branch, MapParams, Variant

DIVERGED = K.SENTINEL_DIVERGED
REACHED_ZERO = K.SENTINEL_REACHED_ZERO
UNDEFINED = K.SENTINEL_UNDEFINED
SENTINELS = {"diverged": DIVERGED, "reached_zero": REACHED_ZERO, "undefined": UNDEFINED}

PARAM_NAMES = ("rho", "mu", "omega", "phi")


class FieldKind(enum.Enum):
    ITERATE = "iterate"
    EMBEDDING = "embedding"
    LYAPUNOV = "lyapunov"
    LZ = "lz"
    PERIOD = "period"


_KIND_CODE = {
    FieldKind.ITERATE: K.FIELD_ITERATE,
    FieldKind.EMBEDDING: K.FIELD_EMBEDDING,
    FieldKind.LYAPUNOV: K.FIELD_LYAPUNOV,
    FieldKind.LZ: K.FIELD_LZ,
    FieldKind.PERIOD: K.FIELD_PERIOD,
}


@dataclass(frozen=True)
class AxisSpec:
    param: str
    min: float
    max: float
    count: int

    def __post_init__(self):
        if self.param not in PARAM_NAMES:
            raise ValueError(f"unknown axis parameter {self.param!r}")
        object.__setattr__(self, "min", float(self.min))
        object.__setattr__(self, "max", float(self.max))
        object.__setattr__(self, "count", int(self.count))
        if not (math.isfinite(self.min) and math.isfinite(self.max)) or not self.min < self.max:
            raise ValueError(f"axis {self.param} needs finite min < max")
        if self.count < 2:
            raise ValueError("an axis needs at least 2 points")
        if self.param in ("rho", "omega") and self.min <= 0.0:
            raise ValueError(f"{self.param} axis must stay positive")

    @property
    def step(self) -> float:
        return (self.max - self.min) / (self.count - 1)

    def values(self) -> np.ndarray:
        # linspace pins the last point to max exactly
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class FieldSpec:
    """Which scalar to compute at each lattice point, and with which knobs.

    ``fixed`` supplies the map parameters that are not swept.  Only the
    knobs of the chosen kind are used:

    - ITERATE: ``n`` map applications after leaving the origin, F^n(x_1)
    - EMBEDDING: ``max_len`` symbols embedded into [0, 1)
    - LYAPUNOV: ``n_transient`` then ``n_sample`` iterates from x_1
    - LZ: normalized complexity of a ``length``-symbol itinerary
    - PERIOD: minimal period up to ``max_period`` (0 = none found)
    """

    kind: FieldKind
    fixed: dict = field(default_factory=lambda: {"phi": 0.0})
    variant: Variant = Variant.SYMMETRIC
    branch: Branch = Branch.POSITIVE
    zero_eps: float = ZERO_EPS
    n: int = 1
    max_len: int = 64
    n_transient: int = N_TRANSIENT
    n_sample: int = N_SAMPLE
    length: int = 5000
    max_period: int = 32
    period_tol: float = PERIOD_TOL

    def __post_init__(self):
        object.__setattr__(self, "kind", FieldKind(self.kind))
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "branch", Branch(self.branch))
        object.__setattr__(self, "fixed", {k: float(v) for k, v in self.fixed.items()})
        unknown = set(self.fixed) - set(PARAM_NAMES)
        if unknown:
            raise ValueError(f"unknown fixed parameters {sorted(unknown)}")
        if min(self.n, self.max_len, self.n_sample, self.length, self.max_period) < 1:
            raise ValueError("field lengths must be >= 1")
        if self.n_transient < 0:
            raise ValueError("n_transient must be >= 0")
        if not self.zero_eps > 0.0:
            raise ValueError("zero_eps must be positive")

    def kernel_args(self) -> tuple[int, int, int]:
        k = self.kind
        if k is FieldKind.ITERATE:
            return _KIND_CODE[k], self.n, 0
        if k is FieldKind.EMBEDDING:
            return _KIND_CODE[k], self.max_len, 0
        if k is FieldKind.LYAPUNOV:
            return _KIND_CODE[k], self.n_transient, self.n_sample
        if k is FieldKind.LZ:
            return _KIND_CODE[k], self.length, 0
        return _KIND_CODE[k], self.max_period, self.n_transient


@dataclass(frozen=True)
class SweepGrid:
    x_axis: AxisSpec
    y_axis: AxisSpec
    field: FieldSpec
    values: np.ndarray

    def __post_init__(self):
        shape = (self.y_axis.count, self.x_axis.count)
        values = np.ascontiguousarray(self.values, dtype=np.float64).reshape(shape)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def sentinel_mask(self) -> np.ndarray:
        return is_sentinel(self.values)

    def sentinel_counts(self) -> dict[str, int]:
        return {name: int(np.count_nonzero(self.values == code)) for name, code in SENTINELS.items()}


def is_sentinel(values) -> np.ndarray:
    values = np.asarray(values)
    return (values == DIVERGED) | (values == REACHED_ZERO) | (values == UNDEFINED)


def _eval_flat(field: FieldSpec, rho, mu, omega, phi, symmetric: bool, out) -> None:
    code, a0, a1 = field.kernel_args()
    K.fill_field(code, rho, mu, omega, phi, symmetric, field.branch is Branch.NEGATIVE,
                 field.zero_eps, a0, a1, field.period_tol, out)


def field_eval(field: FieldSpec, point: MapParams) -> float:
    """Field value (or sentinel code) at one fully specified parameter point."""
    arrays = [np.array([getattr(point, name)]) for name in PARAM_NAMES]
    out = np.empty(1)
    _eval_flat(field, *arrays, point.symmetric, out)
    return float(out[0])


def run_sweep(x: AxisSpec, y: AxisSpec, field: FieldSpec, workers: int = 1) -> SweepGrid:
    """Evaluate ``field`` on the x-by-y lattice using ``workers`` threads."""
    if x.param == y.param:
        raise ValueError("the two axes must sweep different parameters")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    for name in PARAM_NAMES:
        if name not in (x.param, y.param) and name not in field.fixed:
            raise ValueError(f"parameter {name} is neither swept nor fixed")
    for name in ("rho", "omega"):
        if name in field.fixed and field.fixed[name] <= 0.0:
            raise ValueError(f"{name} must be positive")

    xs, ys = x.values(), y.values()
    nx, ny = len(xs), len(ys)
    values = np.empty((ny, nx))
    symmetric = field.variant is Variant.SYMMETRIC

    def band(rows):
        if len(rows) == 0:
            return
        j0, j1 = rows[0], rows[-1] + 1
        cells = (j1 - j0) * nx
        arrays = []
        for name in PARAM_NAMES:
            if name == x.param:
                arrays.append(np.tile(xs, j1 - j0))
            elif name == y.param:
                arrays.append(np.repeat(ys[j0:j1], nx))
            else:
                arrays.append(np.full(cells, field.fixed[name]))
        _eval_flat(field, *arrays, symmetric, values[j0:j1].reshape(-1))

    # several bands per worker keeps threads busy when row costs differ
    bands = np.array_split(np.arange(ny), min(ny, 4 * workers))
    if workers == 1:
        for rows in bands:
            band(rows)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(band, bands))
    return SweepGrid(x, y, field, values)
