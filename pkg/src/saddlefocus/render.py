"""Heatmaps of sweep grids as binary PPM (P6) or PGM (P5) images.

Colormaps are fixed 256-entry tables built by piecewise-linear
interpolation between the anchors below (index 0 = low end of the clip
range, 255 = high end):

    diverging  blue (0,0,255) -> white (255,255,255) -> red (255,0,0)
    linear     (48,18,59) -> (40,120,220) -> (60,200,120) -> (240,220,40) -> (180,20,10)
    grayscale  black -> white (the only map allowed for PGM)

Values are mapped to ``floor((v - lo) / (hi - lo) * 256)`` clamped to
[0, 255].  The diverging map defaults to a clip range symmetric about 0 so
that 0 lands on the white midpoint (index 128, one step off pure white).  Sentinel cells get dedicated colors: Diverged is black,
ReachedZero white, Undefined mid gray.  The top image row is the largest
y value.
"""

from __future__ import annotations

import numpy as np

from .curves import CurveSet
from .sweep import DIVERGED, REACHED_ZERO, UNDEFINED, SweepGrid, is_sentinel

_ANCHORS = {
    "diverging": [(0, 0, 255), (255, 255, 255), (255, 0, 0)],
    "linear": [(48, 18, 59), (40, 120, 220), (60, 200, 120), (240, 220, 40), (180, 20, 10)],
    "grayscale": [(0, 0, 0), (255, 255, 255)],
}

SENTINEL_RGB = {DIVERGED: (0, 0, 0), REACHED_ZERO: (255, 255, 255), UNDEFINED: (128, 128, 128)}
OVERLAY_RGB = [(0, 200, 0), (255, 0, 255), (255, 160, 0), (0, 200, 200)]
OVERLAY_GRAY = 0


class OverlayAxesError(ValueError):
    """Curve coordinates are (rho, mu) but the grid does not span that plane."""


def colormap(name: str) -> np.ndarray:
    """The 256x3 uint8 table for a colormap name."""
    try:
        anchors = np.array(_ANCHORS[name], dtype=float)
    except KeyError:
        raise ValueError(f"unknown colormap {name!r}") from None
    pos = np.linspace(0.0, 255.0, len(anchors))
    idx = np.arange(256)
    table = np.column_stack([np.interp(idx, pos, anchors[:, c]) for c in range(3)])
    return np.rint(table).astype(np.uint8)


def default_clip(values: np.ndarray, cmap: str) -> tuple[float, float]:
    finite = values[~is_sentinel(values) & np.isfinite(values)]
    if finite.size == 0:
        return (-1.0, 1.0) if cmap == "diverging" else (0.0, 1.0)
    if cmap == "diverging":
        m = float(np.max(np.abs(finite))) or 1.0
        return -m, m
    lo, hi = float(finite.min()), float(finite.max())
    return (lo, hi) if hi > lo else (lo, lo + 1.0)


def color_indices(values: np.ndarray, lo: float, hi: float) -> np.ndarray:
    if not hi > lo:
        raise ValueError("clip range needs lo < hi")
    with np.errstate(invalid="ignore", over="ignore"):
        t = np.floor((values - lo) / (hi - lo) * 256.0)
    t = np.nan_to_num(t, nan=0.0, posinf=255.0, neginf=0.0)
    return np.clip(t, 0, 255).astype(np.intp)


def _bresenham(x0: int, y0: int, x1: int, y1: int):
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    while True:
        yield x0, y0
        if x0 == x1 and y0 == y1:
            return
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def _pixel_coords(grid: SweepGrid, points: np.ndarray) -> np.ndarray:
    axes = (grid.x_axis.param, grid.y_axis.param)
    if axes == ("rho", "mu"):
        xs, ys = points[:, 0], points[:, 1]
    elif axes == ("mu", "rho"):
        xs, ys = points[:, 1], points[:, 0]
    else:
        raise OverlayAxesError(f"overlay curves live in the (rho, mu) plane, grid axes are {axes}")
    px = np.rint((xs - grid.x_axis.min) / grid.x_axis.step)
    py = grid.y_axis.count - 1 - np.rint((ys - grid.y_axis.min) / grid.y_axis.step)
    return np.column_stack([px, py])


def _draw(img: np.ndarray, grid: SweepGrid, curves: CurveSet, color) -> None:
    h, w = img.shape[:2]
    limit = 4 * (h + w)
    for curve in curves:
        pix = _pixel_coords(grid, curve.points)
        if len(pix) == 1:
            pix = np.vstack([pix, pix])
        for (x0, y0), (x1, y1) in zip(pix[:-1], pix[1:]):
            # a segment far outside the frame contributes nothing visible
            if max(abs(x0), abs(x1), abs(y0), abs(y1)) > limit:
                continue
            for x, y in _bresenham(int(x0), int(y0), int(x1), int(y1)):
                if 0 <= x < w and 0 <= y < h:
                    img[y, x] = color


def render(grid: SweepGrid, cmap: str = "diverging", clip: tuple[float, float] | None = None,
           overlays: list[CurveSet] = (), gray: bool = False) -> bytes:
    """Encode the grid as a P6 (or P5 when ``gray``) image."""
    if gray and cmap != "grayscale":
        raise ValueError("PGM output needs the grayscale colormap")
    table = colormap(cmap)
    values = np.asarray(grid.values)[::-1]
    lo, hi = clip if clip is not None else default_clip(values, cmap)
    img = table[color_indices(values, lo, hi)]
    for code, rgb in SENTINEL_RGB.items():
        img[values == code] = rgb
    for i, curves in enumerate(overlays):
        _draw(img, grid, curves, OVERLAY_RGB[i % len(OVERLAY_RGB)])
    h, w = values.shape
    if gray:
        body = img[:, :, 0].copy()
        for i, curves in enumerate(overlays):
            _draw(body, grid, curves, OVERLAY_GRAY)
        return b"P5\n%d %d\n255\n" % (w, h) + body.tobytes()
    return b"P6\n%d %d\n255\n" % (w, h) + np.ascontiguousarray(img).tobytes()
