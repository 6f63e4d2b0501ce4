"""Byte-level encodings of grids and curve sets.

GridFile (HSFG1)
    A UTF-8 header of ``key=value`` lines closed by an empty line, then the
    grid values as row-major little-endian binary64.  Floats in the header
    use ``repr`` so they read back exactly; every field knob is recorded, so
    decoding and re-encoding reproduces the original bytes.

CurveFile
    CSV with LF line endings and a ``kind,k_or_n,rho,mu`` header row.  Each
    polyline is a run of records; an empty record separates polylines.
    Coordinates are written with 17 significant digits.

These functions only convert between objects and bytes or text; reading and
writing files is left to the command-line layer.
"""

from __future__ import annotations

import csv
import io

import numpy as np

from .curves import Curve, CurveLabel, CurveSet
from .mapcore import Branch, Variant
from .sweep import PARAM_NAMES, SENTINELS, AxisSpec, FieldKind, FieldSpec, SweepGrid

MAGIC = "HSFG1"
FORMAT_VERSION = "0.1.0"

_INT_KNOBS = ("n", "max_len", "n_transient", "n_sample", "length", "max_period")


class FormatError(ValueError):
    pass


def _field_label(field: FieldSpec) -> str:
    k = field.kind
    if k is FieldKind.ITERATE:
        return f"iterate:{field.n}"
    if k is FieldKind.EMBEDDING:
        return f"embedding:{field.max_len}"
    if k is FieldKind.LZ:
        return f"lz:{field.length}"
    if k is FieldKind.PERIOD:
        return f"period:{field.max_period}"
    return "lyapunov"


def encode_grid(grid: SweepGrid) -> bytes:
    f = grid.field
    lines = [f"format={MAGIC}", f"version={FORMAT_VERSION}"]
    for tag, ax in (("x", grid.x_axis), ("y", grid.y_axis)):
        lines += [f"{tag}param={ax.param}", f"{tag}min={ax.min!r}", f"{tag}max={ax.max!r}",
                  f"{tag}count={ax.count}"]
    lines += [f"field={_field_label(f)}", f"variant={f.variant.value}", f"branch={f.branch.value}",
              f"zero_eps={f.zero_eps!r}", f"period_tol={f.period_tol!r}"]
    lines += [f"{name}={getattr(f, name)}" for name in _INT_KNOBS]
    lines += [f"fixed.{name}={f.fixed[name]!r}" for name in PARAM_NAMES if name in f.fixed]
    lines += [f"sentinel.{name}={code!r}" for name, code in SENTINELS.items()]
    lines += ["byteorder=little", "dtype=float64"]
    header = ("\n".join(lines) + "\n\n").encode("utf-8")
    return header + np.ascontiguousarray(grid.values, dtype="<f8").tobytes()


def decode_grid(data: bytes) -> SweepGrid:
    end = data.find(b"\n\n")
    if end < 0:
        raise FormatError("no header terminator")
    try:
        text = data[:end].decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError("header is not UTF-8") from exc
    meta: dict[str, str] = {}
    for line in text.split("\n"):
        key, sep, value = line.partition("=")
        if not sep:
            raise FormatError(f"malformed header line {line!r}")
        meta[key] = value
    if meta.get("format") != MAGIC:
        raise FormatError("not an HSFG1 grid")
    if meta.get("byteorder", "little") != "little" or meta.get("dtype", "float64") != "float64":
        raise FormatError("unsupported payload encoding")
    for name, code in SENTINELS.items():
        if f"sentinel.{name}" in meta and float(meta[f"sentinel.{name}"]) != code:
            raise FormatError(f"sentinel {name} does not match this version")
    try:
        axes = [AxisSpec(meta[f"{t}param"], float(meta[f"{t}min"]), float(meta[f"{t}max"]),
                         int(meta[f"{t}count"])) for t in ("x", "y")]
        fixed = {k[6:]: float(v) for k, v in meta.items() if k.startswith("fixed.")}
        field = FieldSpec(
            kind=FieldKind(meta["field"].split(":")[0]),
            fixed=fixed,
            variant=Variant(meta["variant"]),
            branch=Branch(meta["branch"]),
            zero_eps=float(meta["zero_eps"]),
            period_tol=float(meta["period_tol"]),
            **{name: int(meta[name]) for name in _INT_KNOBS},
        )
    except (KeyError, ValueError) as exc:
        raise FormatError(f"bad header: {exc}") from exc
    payload = data[end + 2:]
    expected = 8 * axes[0].count * axes[1].count
    if len(payload) != expected:
        raise FormatError(f"payload has {len(payload)} bytes, expected {expected}")
    values = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    return SweepGrid(axes[0], axes[1], field, values)


def _num(x: float) -> str:
    return "%.17g" % x


def encode_curves(curves: CurveSet) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "k_or_n", "rho", "mu"])
    for i, c in enumerate(curves):
        if i:
            w.writerow([])
        idx = "" if c.label.index is None else str(c.label.index)
        for rho, mu in c.points:
            w.writerow([c.label.kind, idx, _num(rho), _num(mu)])
    return buf.getvalue()


def decode_curves(text: str) -> CurveSet:
    rows = csv.reader(io.StringIO(text))
    if next(rows, None) != ["kind", "k_or_n", "rho", "mu"]:
        raise FormatError("missing CurveFile header")
    out = CurveSet()
    label, pts = None, []

    def flush():
        if pts:
            out.curves.append(Curve(label, pts))

    for row in rows:
        if not row:
            flush()
            label, pts = None, []
            continue
        if len(row) != 4:
            raise FormatError(f"bad record {row!r}")
        try:
            this = CurveLabel(row[0], int(row[1]) if row[1] else None)
            point = (float(row[2]), float(row[3]))
        except ValueError as exc:
            raise FormatError(f"bad record {row!r}") from exc
        if label is not None and this != label:
            raise FormatError("label changes inside a polyline")
        label = this
        pts.append(point)
    flush()
    return out
