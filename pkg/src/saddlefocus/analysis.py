"""Stability measures: Lyapunov exponents, fixed and periodic points, orbit diagrams."""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels as K
from .errors import DomainError, NonFiniteError
from .mapcore import MapParams, Status, derivative, iterate, step

N_TRANSIENT = 500
N_SAMPLE = 5000
PERIOD_TOL = 1e-9
NEWTON_TOL = 1e-12


class SeedRule(enum.Enum):
    FROM_MU = "from-mu"
    CONTINUATION = "continuation"


@dataclass(frozen=True)
class OrbitDiagnosis:
    attractor_points: np.ndarray = field(repr=False)
    period: int | None
    lyapunov: float
    status: Status


def lyapunov(params: MapParams, x0: float | None = None, n_transient: int = N_TRANSIENT,
             n_sample: int = N_SAMPLE) -> float:
    """Mean of log|f'(x_i)| over ``n_sample`` iterates after a transient.

    Returns +inf if the orbit diverges and -inf if it lands exactly on the
    superstable origin (or a sampled derivative underflows to zero).  The
    default seed is x0 = mu.
    """
    if x0 is None:
        x0 = params.mu
    if x0 == 0.0:
        raise DomainError("x0 = 0 is the saddle-focus")
    if not params.symmetric and x0 < 0.0:
        raise DomainError("one-sided map needs x0 > 0")
    if n_sample < 1:
        raise ValueError("n_sample must be >= 1")
    return K.lyapunov(float(x0), params.rho, params.mu, params.omega, params.phi,
                      params.symmetric, n_transient, n_sample)


def find_fixed_point(params: MapParams, lo: float, hi: float) -> float | None:
    """Root of f(x) - x on [lo, hi] by bisection, or None without a sign change."""
    if not 0.0 < lo < hi:
        raise ValueError("need 0 < lo < hi")

    def g(x):
        return step(params, x) - x

    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if (glo > 0.0) == (ghi > 0.0):
        return None
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (gm > 0.0) == (glo > 0.0):
            lo, glo = mid, gm
        else:
            hi, ghi = mid, gm
    return lo if abs(glo) <= abs(ghi) else hi


def detect_period(params: MapParams, x0: float | None = None, n_transient: int = N_TRANSIENT,
                  max_period: int = 64, tol: float = PERIOD_TOL) -> int | None:
    """Minimal period of the attractor reached from x0, or None.

    After the transient, p is accepted when |x_{n+p} - x_n| < tol * amplitude
    for 3p consecutive n; periods are tried in increasing order so the first
    hit is minimal.  Chaotic, diverging and zero-hitting orbits give None.
    """
    if max_period < 1:
        raise ValueError("max_period must be >= 1")
    if x0 is None:
        x0 = params.mu
    if x0 == 0.0:
        return None
    p, status = K.detect_period(float(x0), params.rho, params.mu, params.omega, params.phi,
                                params.symmetric, n_transient, max_period, tol)
    if status != K.MAX_ITERATIONS or p == 0:
        return None
    return int(p)


def _orbit_and_slope(params: MapParams, x: float, p: int) -> tuple[float, float]:
    slope = 1.0
    for _ in range(p):
        slope *= derivative(params, x)
        x = step(params, x)
    return x, slope


def _divisors(p: int) -> list[int]:
    return [d for d in range(1, p) if p % d == 0]


def newton_periodic(params: MapParams, x_guess: float, p: int, max_steps: int = 50) -> float | None:
    """Refine a point of minimal period p by Newton's method on F^p(x) - x.

    The slope of F^p comes from the chain rule over the orbit.  Returns None
    if the iteration fails to reach |F^p(x) - x| < 1e-12, hits the origin,
    or converges to a point whose period is a proper divisor of p.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    x = float(x_guess)
    try:
        for _ in range(max_steps + 1):
            y, slope = _orbit_and_slope(params, x, p)
            resid = y - x
            if abs(resid) < NEWTON_TOL:
                break
            d = slope - 1.0
            if d == 0.0 or not math.isfinite(d):
                return None
            x = x - resid / d
            if not math.isfinite(x) or x == 0.0:
                return None
        else:
            return None
        for d in _divisors(p):
            y, _ = _orbit_and_slope(params, x, d)
            if abs(y - x) < 1e-10:
                return None
    except (DomainError, NonFiniteError):
        return None
    return x


def _diagnose(params: MapParams, samples: np.ndarray, status: int, period_tol: float) -> OrbitDiagnosis:
    samples.flags.writeable = False
    if status != K.MAX_ITERATIONS or len(samples) == 0:
        le = {K.DIVERGED: math.inf, K.REACHED_ZERO: -math.inf}.get(status, math.nan)
        return OrbitDiagnosis(samples, None, le, Status(status))
    p = K.window_period(samples, len(samples) // 4, period_tol)
    le = K.mean_log_derivative(samples, params.rho, params.omega, params.phi)
    return OrbitDiagnosis(samples, int(p) or None, le, Status(status))


def orbit_diagram(params: MapParams, rho_range: tuple[float, float, int],
                  x0_rule: SeedRule = SeedRule.FROM_MU, n_transient: int = N_TRANSIENT,
                  n_keep: int = 200, period_tol: float = PERIOD_TOL,
                  workers: int = 1) -> list[tuple[float, OrbitDiagnosis]]:
    """Post-transient samples along a lattice of rho values, other parameters fixed.

    ``params.rho`` is ignored.  With FROM_MU every lattice point starts at
    x0 = mu and the lattice may be split across threads; with CONTINUATION
    each point starts from the final state of its predecessor (restarting
    from mu after a divergence), which is inherently sequential.
    """
    lo, hi, steps = rho_range
    if steps < 2:
        raise ValueError("need at least 2 rho steps")
    if n_keep < 1:
        raise ValueError("n_keep must be >= 1")
    x0_rule = SeedRule(x0_rule)
    rhos = np.linspace(lo, hi, int(steps))
    mu, omega, phi, sym = params.mu, params.omega, params.phi, params.symmetric
    if mu == 0.0:
        raise DomainError("orbit diagrams start from x0 = mu, which must be nonzero")

    def run(rho, x0):
        out = np.empty(n_keep)
        count, status = K.orbit_run(x0, rho, mu, omega, phi, sym, n_transient, out)
        return out[:count].copy(), status

    if x0_rule is SeedRule.CONTINUATION:
        results = []
        x0 = mu
        for rho in rhos:
            samples, status = run(rho, x0)
            results.append((samples, status))
            if status == K.MAX_ITERATIONS:
                x0 = float(K.map_step(samples[-1], rho, mu, omega, phi))
            else:
                x0 = mu
    else:
        def chunk(idx):
            return [run(rhos[i], mu) for i in idx]

        parts = np.array_split(np.arange(len(rhos)), max(1, int(workers)))
        with ThreadPoolExecutor(max_workers=max(1, int(workers))) as pool:
            results = [r for part in pool.map(chunk, parts) for r in part]

    return [(float(rho), _diagnose(replace(params, rho=float(rho)), s, st, period_tol))
            for rho, (s, st) in zip(rhos, results)]


def cobweb(params: MapParams, x0: float, n: int) -> list[tuple[tuple[float, float], tuple[float, float]]]:
    """Staircase segments (x_k, x_k) -> (x_k, x_{k+1}) -> (x_{k+1}, x_{k+1})."""
    if n < 1:
        raise ValueError("n must be >= 1")
    traj = iterate(params, x0, n)
    pts = traj.points
    if traj.status is Status.DIVERGED:
        pts = pts[:-1]
    segments = []
    for a, b in zip(pts[:-1], pts[1:]):
        a, b = float(a), float(b)
        segments.append(((a, a), (a, b)))
        segments.append(((a, b), (b, b)))
    return segments
