"""Bifurcation boundaries in the (rho, mu) plane.

- ``gamma_g``: largest |mu| (rho > 1) for which the envelope mu + x**rho
  meets the diagonal, i.e. an invariant interval [0, beta] exists.
- ``gamma_p``: largest |mu| (rho > 1) for which |f'| < 1 on that interval,
  forcing convergence to a unique stable fixed point.
- ``belyakov_explicit``: the k-th critical point of the map is sent to 0.
- ``belyakov_implicit``: the image of the k-th critical point is sent to 0.
- ``extract_zero_contours``: zero sets of F^(n-1)(mu) from a sweep grid,
  i.e. homoclinic curves of order n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import DomainError, EmptyResultError
from .mapcore import ZERO_EPS, MapParams, envelope_threshold
from .sweep import PARAM_NAMES, FieldKind, SweepGrid, is_sentinel

SCAN_SUBDIVISIONS = 10_000

KINDS = ("gamma_g", "gamma_p", "belyakov_explicit", "belyakov_implicit", "homoclinic_order_n")


@dataclass(frozen=True)
class CurveLabel:
    kind: str
    index: int | None = None  # k for tangency families, n for homoclinic orders

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown curve kind {self.kind!r}")


@dataclass(frozen=True)
class Curve:
    label: CurveLabel
    points: np.ndarray = field(repr=False)  # shape (m, 2): columns rho, mu

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64).reshape(-1, 2)
        if not np.all(np.isfinite(pts)):
            raise ValueError("curve points must be finite")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)


@dataclass
class CurveSet:
    curves: list[Curve] = field(default_factory=list)

    def __iter__(self):
        return iter(self.curves)

    def __len__(self) -> int:
        return len(self.curves)

    def of_kind(self, kind: str) -> list[Curve]:
        return [c for c in self.curves if c.label.kind == kind]

    def all_points(self) -> np.ndarray:
        if not self.curves:
            return np.empty((0, 2))
        return np.vstack([c.points for c in self.curves])


# ---------------------------------------------------------------------------
# Closed-form boundaries
# ---------------------------------------------------------------------------

def gamma_g(rho: float) -> float:
    return envelope_threshold(rho)


def gamma_p(rho: float, omega: float) -> float:
    """(1 - 1/rho) * (rho^2 + omega^2) ** (1 / (2(1 - rho)))"""
    if rho <= 1.0:
        raise DomainError(f"defined for rho > 1, got {rho}")
    return (1.0 - 1.0 / rho) * math.pow(rho * rho + omega * omega, 0.5 / (1.0 - rho))


def critical_point(rho: float, omega: float, k: int, phi: float = 0.0) -> float:
    """k-th positive critical point below 1: omega*ln(x) + atan(omega/rho) + phi = -pi(k + 1/2)."""
    return math.exp((-math.pi * (k + 0.5) - math.atan2(omega, rho) - phi) / omega)


def belyakov_explicit(rho: float, omega: float, k: int, phi: float = 0.0) -> tuple[float, float]:
    """(mu, x_c) at which the k-th critical point x_c is mapped onto the origin.

    mu = (-1)^k * omega/sqrt(rho^2+omega^2) * x_c**rho; with phi = 0 this is
    (-1)^k omega/A * exp((rho/omega)(-pi(k+1/2) - atan(omega/rho))).
    """
    if rho <= 0.0 or omega <= 0.0:
        raise DomainError("need rho > 0 and omega > 0")
    if k < 0:
        raise ValueError("k must be >= 0")
    xc = critical_point(rho, omega, k, phi)
    mu = (-1) ** k * omega / math.hypot(rho, omega) * math.pow(xc, rho)
    return mu, xc


def _tangency_scale(rho, omega, k, phi):
    return abs(belyakov_explicit(rho, omega, k, phi)[0])


def implicit_residual(mu: float, rho: float, omega: float, k: int, form: str = "map",
                      phi: float = 0.0) -> float:
    """Residual mu + |x_2|**rho cos(omega ln|x_2| + phi) of the second-image tangency.

    ``form="map"`` takes x_2 = f(x_c) = mu - (-1)^k c, the image of the k-th
    critical point under the map.  ``form="signed"`` takes the sign variant
    x_2 = (-1)^k mu + c, whose roots do not in general satisfy the map.
    """
    c = _tangency_scale(rho, omega, k, phi)
    return K.implicit_residual(float(mu), rho, omega, phi, c, k % 2 == 0, _signed_form(form))


def _signed_form(form: str) -> bool:
    if form not in ("map", "signed"):
        raise ValueError(f"form must be 'map' or 'signed', got {form!r}")
    return form == "signed"


def tangency_defect(rho: float, mu: float, omega: float, k: int, phi: float = 0.0) -> float:
    """|F^2(x_c)| for the k-th critical point: zero on a second-image tangency."""
    params = MapParams(rho, mu, omega, phi)
    x = critical_point(rho, omega, k, phi)
    for _ in range(2):
        if x == 0.0:
            return 0.0
        x = K.map_step(x, params.rho, params.mu, params.omega, params.phi)
    return abs(x)


# ---------------------------------------------------------------------------
# Root scanning
# ---------------------------------------------------------------------------

def _bisect(g, a: float, b: float, ga: float) -> float:
    while True:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        gm = g(m)
        if gm == 0.0:
            return m
        if (gm > 0.0) == (ga > 0.0):
            a, ga = m, gm
        else:
            b = m
    gb = g(b)
    return a if abs(ga) <= abs(gb) else b


def _scan_roots(scan, g, lo: float, hi: float, subdivisions: int) -> list[float]:
    """All sign changes of g on a uniform pre-scan of [lo, hi], bisected to full precision."""
    if not lo < hi:
        raise ValueError("bracket needs lo < hi")
    mus = np.linspace(lo, hi, subdivisions + 1)
    vals = np.empty_like(mus)
    scan(mus, vals)
    roots = []
    for i in range(subdivisions):
        va, vb = vals[i], vals[i + 1]
        if va == 0.0:
            roots.append(float(mus[i]))
        elif vb != 0.0 and (va > 0.0) != (vb > 0.0):
            roots.append(_bisect(g, float(mus[i]), float(mus[i + 1]), float(va)))
    if vals[-1] == 0.0:
        roots.append(float(mus[-1]))
    return roots


def belyakov_implicit_roots(rho: float, omega: float, k: int, mu_bracket: tuple[float, float],
                            form: str = "map", phi: float = 0.0,
                            subdivisions: int = SCAN_SUBDIVISIONS) -> list[float]:
    if rho <= 0.0 or omega <= 0.0:
        raise DomainError("need rho > 0 and omega > 0")
    c = _tangency_scale(rho, omega, k, phi)
    even, signed = k % 2 == 0, _signed_form(form)
    lo, hi = mu_bracket
    return _scan_roots(lambda m, out: K.implicit_scan(rho, omega, phi, c, even, signed, m, out),
                       lambda m: K.implicit_residual(m, rho, omega, phi, c, even, signed),
                       float(lo), float(hi), subdivisions)


def belyakov_implicit(rho: float, omega: float, k: int, mu_bracket: tuple[float, float],
                      form: str = "map", phi: float = 0.0,
                      subdivisions: int = SCAN_SUBDIVISIONS) -> float | None:
    """Root mu of the second-image tangency system closest to mu = 0, or None."""
    roots = belyakov_implicit_roots(rho, omega, k, mu_bracket, form, phi, subdivisions)
    if not roots:
        return None
    return min(roots, key=lambda m: (abs(m), m))


def find_secondary_roots(rho: float, omega: float, mu_bracket: tuple[float, float],
                         phi: float = 0.0, subdivisions: int = SCAN_SUBDIVISIONS) -> list[float]:
    """All mu in the bracket with f(mu) = 0 (0 -> mu -> 0), ascending."""
    lo, hi = mu_bracket
    if not 0.0 < lo < hi:
        raise ValueError("need 0 < lo < hi")
    return _scan_roots(lambda m, out: K.secondary_scan(rho, omega, phi, m, out),
                       lambda m: K.secondary_residual(m, rho, omega, phi),
                       float(lo), float(hi), subdivisions)


def find_secondary(rho: float, omega: float, mu_bracket: tuple[float, float],
                   phi: float = 0.0, subdivisions: int = SCAN_SUBDIVISIONS) -> float | None:
    """Largest secondary-homoclinic mu in the bracket, or None."""
    roots = find_secondary_roots(rho, omega, mu_bracket, phi, subdivisions)
    return roots[-1] if roots else None


# ---------------------------------------------------------------------------
# Polylines for the closed-form families
# ---------------------------------------------------------------------------

def gamma_curves(rhos, omega: float | None = None) -> CurveSet:
    """gamma_g (and gamma_p when omega is given) over rho > 1, both signs of mu."""
    rhos = np.asarray(rhos, dtype=float)
    if np.any(rhos <= 1.0):
        raise DomainError("gamma curves are defined for rho > 1")
    out = CurveSet()
    g = np.array([gamma_g(r) for r in rhos])
    out.curves += [Curve(CurveLabel("gamma_g"), np.column_stack([rhos, s * g])) for s in (1, -1)]
    if omega is not None:
        p = np.array([gamma_p(r, omega) for r in rhos])
        out.curves += [Curve(CurveLabel("gamma_p"), np.column_stack([rhos, s * p])) for s in (1, -1)]
    return out


def explicit_family(rhos, omega: float, k_max: int, phi: float = 0.0) -> CurveSet:
    rhos = np.asarray(rhos, dtype=float)
    out = CurveSet()
    for k in range(k_max + 1):
        mus = [belyakov_explicit(r, omega, k, phi)[0] for r in rhos]
        out.curves.append(Curve(CurveLabel("belyakov_explicit", k), np.column_stack([rhos, mus])))
    return out


def implicit_family(rhos, omega: float, k_max: int, mu_bracket: tuple[float, float],
                    form: str = "map", phi: float = 0.0,
                    subdivisions: int = SCAN_SUBDIVISIONS) -> CurveSet:
    """Closest-to-zero implicit root per rho; polylines break where no root exists."""
    out = CurveSet()
    for k in range(k_max + 1):
        run: list[tuple[float, float]] = []
        for r in np.asarray(rhos, dtype=float):
            mu = belyakov_implicit(r, omega, k, mu_bracket, form, phi, subdivisions)
            if mu is None:
                if run:
                    out.curves.append(Curve(CurveLabel("belyakov_implicit", k), run))
                run = []
            else:
                run.append((float(r), mu))
        if run:
            out.curves.append(Curve(CurveLabel("belyakov_implicit", k), run))
    return out


# ---------------------------------------------------------------------------
# Contours of iterate fields
# ---------------------------------------------------------------------------

def _grid_orientation(grid: SweepGrid) -> bool:
    axes = (grid.x_axis.param, grid.y_axis.param)
    if axes == ("rho", "mu"):
        return False
    if axes == ("mu", "rho"):
        return True
    raise ValueError(f"contours need a (rho, mu) grid, got {axes}")


def _reevaluate(grid: SweepGrid, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    f = grid.field
    arrays = []
    for name in PARAM_NAMES:
        if name == grid.x_axis.param:
            arrays.append(np.ascontiguousarray(xs, dtype=float))
        elif name == grid.y_axis.param:
            arrays.append(np.ascontiguousarray(ys, dtype=float))
        else:
            arrays.append(np.full(len(xs), f.fixed[name]))
    out = np.empty(len(xs))
    code, a0, a1 = f.kernel_args()
    K.fill_field(code, *arrays, f.variant.value == "symmetric", f.branch.value == "negative",
                 f.zero_eps, a0, a1, f.period_tol, out)
    return out


def extract_zero_contours(grid: SweepGrid, contour_tol: float = 0.1) -> CurveSet:
    """Zero-level polylines of an iterate field F^(n-1)(mu) by marching squares.

    Crossings are placed by linear interpolation along cell edges.  Cells
    touching a sentinel value or the line |mu| < 10*zero_eps are skipped.
    Each interpolated vertex is re-evaluated on the exact field and kept
    only if |F| <= contour_tol * |jump across the edge|; this discards the
    sign flips caused by the discontinuity of the map at the origin.
    """
    if grid.field.kind is not FieldKind.ITERATE:
        raise ValueError("contours are extracted from iterate fields")
    swapped = _grid_orientation(grid)
    v = np.array(grid.values)
    ny, nx = v.shape
    if nx < 2 or ny < 2:
        raise ValueError("grid must be at least 2x2")
    xs, ys = grid.x_axis.values(), grid.y_axis.values()
    mus = xs[None, :] if swapped else ys[:, None]
    ok = ~is_sentinel(v) & np.isfinite(v) & (np.abs(mus) >= 10 * max(grid.field.zero_eps, ZERO_EPS))
    ok = np.broadcast_to(ok, v.shape)
    pos = v >= 0.0

    cell_ok = ok[:-1, :-1] & ok[1:, :-1] & ok[:-1, 1:] & ok[1:, 1:]
    h_cross = (pos[:, :-1] != pos[:, 1:]) & ok[:, :-1] & ok[:, 1:]
    v_cross = (pos[:-1, :] != pos[1:, :]) & ok[:-1, :] & ok[1:, :]
    if not (h_cross.any() or v_cross.any()):
        raise EmptyResultError("the field has no sign change on the grid")

    # interpolated vertex for every crossing edge, keyed by ("h"|"v", j, i)
    hj, hi_ = np.nonzero(h_cross)
    vj, vi = np.nonzero(v_cross)
    a_h, b_h = v[hj, hi_], v[hj, hi_ + 1]
    t_h = a_h / (a_h - b_h)
    a_v, b_v = v[vj, vi], v[vj + 1, vi]
    t_v = a_v / (a_v - b_v)
    px = np.concatenate([xs[hi_] + t_h * (xs[hi_ + 1] - xs[hi_]), xs[vi]])
    py = np.concatenate([ys[hj], ys[vj] + t_v * (ys[vj + 1] - ys[vj])])
    jump = np.concatenate([np.abs(a_h - b_h), np.abs(a_v - b_v)])
    resid = _reevaluate(grid, px, py)
    sound = ~is_sentinel(resid) & (np.abs(resid) <= contour_tol * jump)

    vertex = {}
    for n, key in enumerate([("h", j, i) for j, i in zip(hj, hi_)] + [("v", j, i) for j, i in zip(vj, vi)]):
        if sound[n]:
            vertex[key] = (float(px[n]), float(py[n]))

    adjacency: dict[tuple, list[tuple]] = {key: [] for key in vertex}

    def link(a, b):
        if a in vertex and b in vertex:
            adjacency[a].append(b)
            adjacency[b].append(a)

    cj, ci = np.nonzero(cell_ok & (h_cross[:-1, :] | h_cross[1:, :] | v_cross[:, :-1] | v_cross[:, 1:]))
    for j, i in zip(cj.tolist(), ci.tolist()):
        bottom, top = ("h", j, i), ("h", j + 1, i)
        left, right = ("v", j, i), ("v", j, i + 1)
        edges = [e for e, c in ((bottom, h_cross[j, i]), (right, v_cross[j, i + 1]),
                                (top, h_cross[j + 1, i]), (left, v_cross[j, i])) if c]
        if len(edges) == 2:
            link(*edges)
        elif len(edges) == 4:
            # saddle cell: the centre value decides which corners connect
            centre = v[j, i] + v[j, i + 1] + v[j + 1, i] + v[j + 1, i + 1]
            if (centre >= 0.0) == pos[j, i]:
                link(bottom, right)
                link(top, left)
            else:
                link(bottom, left)
                link(top, right)

    out = CurveSet()
    seen: set = set()
    starts = sorted(k for k, nb in adjacency.items() if len(nb) == 1)
    starts += sorted(k for k, nb in adjacency.items() if len(nb) == 2)
    n_order = grid.field.n + 1
    for start in starts:
        if start in seen or not adjacency[start]:
            continue
        chain = [start]
        seen.add(start)
        prev, cur = None, start
        while True:
            nxt = [b for b in adjacency[cur] if b != prev and b not in seen]
            if not nxt:
                if len(chain) > 2 and start in adjacency[cur]:
                    chain.append(start)  # closed loop
                break
            prev, cur = cur, nxt[0]
            chain.append(cur)
            seen.add(cur)
        pts = np.array([vertex[key] for key in chain])
        if swapped:
            pts = pts[:, ::-1]
        if len(pts) > 1 and tuple(pts[0]) > tuple(pts[-1]):
            pts = pts[::-1]
        out.curves.append(Curve(CurveLabel("homoclinic_order_n", n_order), pts))
    if not out.curves:
        raise EmptyResultError("no sign change survived the soundness check")
    return out
