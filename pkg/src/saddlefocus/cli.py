"""Command-line interface.

Exit codes: 0 success, 1 a verify check failed, 2 invalid flags or
parameters, 3 file I/O failure, 4 an implicit tangency family has no root
in the bracket, 5 overlay curves do not match the grid axes.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
import time

import numpy as np

from . import __version__
from . import curves as C
from .analysis import N_SAMPLE, N_TRANSIENT, PERIOD_TOL, SeedRule, cobweb, detect_period, lyapunov, orbit_diagram
from .errors import SaddleFocusError
from .formats import FormatError, decode_curves, decode_grid, encode_curves, encode_grid
from .mapcore import ZERO_EPS, Branch, MapParams, Variant, derivative, invariant_bound, step
from .render import OverlayAxesError, render
from .sweep import AxisSpec, FieldKind, FieldSpec, run_sweep
from .symbolic import embed, encode, normalized_lz, truncate_one_sided

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO, EXIT_NO_ROOT, EXIT_AXES = 0, 1, 2, 3, 4, 5

EMBED_LEN = 64
LZ_LEN = 5000


class UsageError(Exception):
    pass


class IOFailure(Exception):
    pass


# ---------------------------------------------------------------------------
# Flag parsing helpers
# ---------------------------------------------------------------------------

def _floats(text: str, n: int, what: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != n:
        raise argparse.ArgumentTypeError(f"{what} expects {n} ':'-separated fields, got {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number in {text!r}") from None


def axis_arg(text: str) -> AxisSpec:
    """PARAM:MIN:MAX:COUNT"""
    name, _, rest = text.partition(":")
    lo, hi, count = _floats(rest, 3, "axis")
    if count != int(count):
        raise argparse.ArgumentTypeError("axis count must be an integer")
    try:
        return AxisSpec(name, lo, hi, int(count))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def range_arg(text: str) -> tuple[float, float, int]:
    """MIN:MAX:COUNT"""
    lo, hi, count = _floats(text, 3, "range")
    if count != int(count) or count < 1 or not lo <= hi:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    return lo, hi, int(count)


def pair_arg(text: str) -> tuple[float, float]:
    lo, hi = _floats(text, 2, "bracket")
    if not lo < hi:
        raise argparse.ArgumentTypeError("need LO < HI")
    return lo, hi


def field_arg(text: str) -> tuple[FieldKind, int | None]:
    kind, _, arg = text.partition(":")
    try:
        kind = FieldKind(kind)
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown field {kind!r}") from None
    if not arg:
        return kind, None
    if kind is FieldKind.LYAPUNOV or not arg.isdigit() or int(arg) < 1:
        raise argparse.ArgumentTypeError(f"bad field argument in {text!r}")
    return kind, int(arg)


def curve_kind_arg(text: str) -> tuple[str, int | None]:
    if text.startswith("homoclinic:"):
        n = text.split(":", 1)[1]
        if not n.isdigit() or int(n) < 2:
            raise argparse.ArgumentTypeError("homoclinic order must be an integer >= 2")
        return "homoclinic", int(n)
    if text not in ("gamma-g", "gamma-p", "belyakov-explicit", "belyakov-implicit"):
        raise argparse.ArgumentTypeError(f"unknown curve kind {text!r}")
    return text, None


def _params(args, rho=None) -> MapParams:
    try:
        return MapParams(args.rho if rho is None else rho, args.mu, args.omega, args.phi,
                         Variant(args.variant))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _read(path: str, binary: bool):
    try:
        with open(path, "rb" if binary else "r", **({} if binary else {"newline": ""})) as fh:
            return fh.read()
    except OSError as exc:
        raise IOFailure(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, data) -> None:
    binary = isinstance(data, bytes)
    try:
        with open(path, "wb" if binary else "w", **({} if binary else {"newline": ""})) as fh:
            fh.write(data)
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc.strerror}") from None


def _add_map_flags(p, rho=True, mu=True):
    if rho:
        p.add_argument("--rho", type=float, required=True, help="saddle index")
    if mu:
        p.add_argument("--mu", type=float, required=True, help="splitting parameter")
    p.add_argument("--omega", type=float, required=True, help="focal frequency")
    p.add_argument("--phi", type=float, default=0.0, help="phase")
    p.add_argument("--variant", choices=[v.value for v in Variant], default="symmetric")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_sweep(args) -> int:
    kind, karg = args.field
    x, y = args.x, args.y
    fixed = {}
    for name in ("rho", "mu", "omega", "phi"):
        if name in (x.param, y.param):
            continue
        value = getattr(args, name)
        if value is None:
            raise UsageError(f"--{name} is required when {name} is not swept")
        fixed[name] = value
    knobs = dict(zero_eps=args.zero_eps, n_transient=args.le_transient, n_sample=args.le_samples,
                 period_tol=args.period_tol)
    if kind is FieldKind.ITERATE:
        knobs["n"] = karg or args.iter_n
    elif kind is FieldKind.EMBEDDING:
        knobs["max_len"] = karg or args.seq_len or EMBED_LEN
    elif kind is FieldKind.LZ:
        knobs["length"] = karg or args.seq_len or LZ_LEN
    elif kind is FieldKind.PERIOD:
        knobs["max_period"] = karg or args.max_period
    try:
        field = FieldSpec(kind, fixed, Variant(args.variant), Branch(args.branch), **knobs)
        t0 = time.perf_counter()
        grid = run_sweep(x, y, field, workers=args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    wall = time.perf_counter() - t0
    _write(args.out, encode_grid(grid))
    counts = " ".join(f"{k}={v}" for k, v in grid.sentinel_counts().items())
    print(f"cells={grid.values.size} {counts} wall={wall:.3f}s out={args.out}")
    return EXIT_OK


def cmd_curves(args) -> int:
    kind, order = args.kind
    if kind == "homoclinic":
        if not args.from_grid:
            raise UsageError("homoclinic curves need --from-grid")
        grid = decode_grid(_read(args.from_grid, binary=True))
        if grid.field.kind is not FieldKind.ITERATE or grid.field.n != order - 1:
            raise UsageError(f"order {order} needs an iterate:{order - 1} grid")
        try:
            out = C.extract_zero_contours(grid, args.contour_tol)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        _write(args.out, encode_curves(out))
        print(f"curves={len(out)} points={len(out.all_points())} out={args.out}")
        return EXIT_OK

    if args.rho is None:
        raise UsageError(f"{kind} needs --rho MIN:MAX:COUNT")
    rhos = np.linspace(*args.rho)
    needs_omega = kind != "gamma-g"
    if needs_omega and args.omega is None:
        raise UsageError(f"{kind} needs --omega")
    status = EXIT_OK
    try:
        if kind == "gamma-g":
            out = C.gamma_curves(rhos)
        elif kind == "gamma-p":
            out = C.CurveSet(C.gamma_curves(rhos, args.omega).of_kind("gamma_p"))
        elif kind == "belyakov-explicit":
            out = C.explicit_family(rhos, args.omega, args.k_max, args.phi)
        else:
            out = C.implicit_family(rhos, args.omega, args.k_max, args.mu_bracket, args.form, args.phi)
            missing = sorted(set(range(args.k_max + 1)) - {c.label.index for c in out})
            if missing:
                print(f"no root in bracket for k={missing}", file=sys.stderr)
                status = EXIT_NO_ROOT
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(args.out, encode_curves(out))
    print(f"curves={len(out)} points={len(out.all_points())} out={args.out}")
    return status


def cmd_render(args) -> int:
    grid = decode_grid(_read(args.grid, binary=True))
    overlays = [decode_curves(_read(path, binary=False)) for path in args.overlay]
    gray = args.out.lower().endswith(".pgm")
    if not gray and not args.out.lower().endswith(".ppm"):
        raise UsageError("--out must end in .ppm or .pgm")
    cmap = args.colormap or ("grayscale" if gray else "diverging")
    data = render(grid, cmap, args.clip, overlays, gray)
    _write(args.out, data)
    return EXIT_OK


def cmd_orbit(args) -> int:
    params = _params(args, rho=max(args.rho[0], 1e-300))
    rows = orbit_diagram(params, args.rho, SeedRule(args.seed), args.transient, args.keep,
                         args.period_tol, args.workers)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["rho", "x"])
    for rho, diag in rows:
        for x in diag.attractor_points:
            w.writerow(["%.17g" % rho, "%.17g" % x])
    return EXIT_OK


def cmd_cobweb(args) -> int:
    params = _params(args)
    x0 = params.mu if args.x0 is None else args.x0
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["x0", "y0", "x1", "y1"])
    for (a, b), (c, d) in cobweb(params, x0, args.n):
        w.writerow(["%.17g" % v for v in (a, b, c, d)])
    return EXIT_OK


def cmd_encode(args) -> int:
    params = _params(args)
    seq = encode(params, Branch(args.branch), args.max_len, args.zero_eps)
    if not params.symmetric:
        seq = truncate_one_sided(seq)
    print(f"bits={seq}")
    print(f"terminated={str(seq.terminated).lower()}")
    print(f"status={seq.source_status.name}")
    print(f"embedding={embed(seq)!r}")
    lz = normalized_lz(seq) if len(seq) >= 2 else math.nan
    print(f"lz_normalized={lz!r}")
    return EXIT_OK


def cmd_lyapunov(args) -> int:
    params = _params(args)
    le = lyapunov(params, args.x0, args.transient, args.samples)
    p = detect_period(params, args.x0, args.transient, args.max_period, args.period_tol)
    print(f"lyapunov={le!r}")
    print(f"period={p if p is not None else 'none'}")
    return EXIT_OK


def _check(ok: bool, text: str, tally: list) -> None:
    tally.append(ok)
    print(("PASS " if ok else "FAIL ") + text)


def _verify_belyakov(args, tally) -> None:
    for rho in args.rho_values:
        for k in range(args.k_max + 1):
            mu, xc = C.belyakov_explicit(rho, args.omega, k, args.phi)
            p = MapParams(rho, mu, args.omega, args.phi)
            d, f = abs(derivative(p, xc)), abs(step(p, xc))
            _check(d < 1e-9 and f < 1e-9, f"explicit rho={rho} k={k}: |f'(xc)|={d:.2e} |f(xc)|={f:.2e}", tally)
            _check((mu > 0) == (k % 2 == 0), f"explicit rho={rho} k={k}: sign(mu)={'+' if mu > 0 else '-'}", tally)
            root = C.belyakov_implicit(rho, args.omega, k, args.mu_bracket, args.form, args.phi)
            if root is None:
                print(f"NOTE implicit rho={rho} k={k}: no root in bracket")
                continue
            r = abs(C.implicit_residual(root, rho, args.omega, k, args.form, args.phi))
            defect = C.tangency_defect(rho, root, args.omega, k, args.phi)
            _check(r < 1e-10 and defect < 1e-8,
                   f"implicit[{args.form}] rho={rho} k={k} mu={root:.6g}: residual={r:.2e} |F^2(xc)|={defect:.2e}",
                   tally)


def _verify_gamma(args, tally) -> None:
    for rho in (1.2, 1.5, 2.0, 3.0):
        g, gp = C.gamma_g(rho), C.gamma_p(rho, args.omega)
        _check(gp <= g, f"gamma rho={rho}: gamma_p={gp:.6g} <= gamma_g={g:.6g}", tally)
        inside = MapParams(rho, 0.9 * gp, args.omega, args.phi)
        per = detect_period(inside)
        _check(per == 1, f"gamma rho={rho} mu=0.9*gamma_p: period={per}", tally)
        beta_in = invariant_bound(MapParams(rho, 0.99 * g, args.omega, args.phi))
        beta_out = invariant_bound(MapParams(rho, 1.01 * g, args.omega, args.phi))
        _check(beta_in is not None and beta_out is None,
               f"gamma rho={rho}: invariant interval exists below gamma_g only", tally)


def cmd_verify(args) -> int:
    tally: list[bool] = []
    if args.suite in ("belyakov", "all"):
        _verify_belyakov(args, tally)
    if args.suite in ("gamma", "all"):
        _verify_gamma(args, tally)
    failed = tally.count(False)
    print(f"{len(tally) - failed} passed, {failed} failed")
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Formatter(argparse.ArgumentDefaultsHelpFormatter):
    def _get_help_string(self, action):
        if action.default is None:
            return action.help
        return super()._get_help_string(action)


def build_parser() -> argparse.ArgumentParser:
    fmt = _Formatter
    parser = argparse.ArgumentParser(prog="saddlefocus", formatter_class=fmt,
                                     description="Saddle-focus return maps: sweeps, curves, images.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", formatter_class=fmt, help="evaluate a field on a 2-D lattice")
    p.add_argument("--field", type=field_arg, required=True,
                   help="iterate[:N] | embedding[:LEN] | lyapunov | lz[:LEN] | period[:MAXP]")
    p.add_argument("--x", type=axis_arg, required=True, help="PARAM:MIN:MAX:COUNT")
    p.add_argument("--y", type=axis_arg, required=True, help="PARAM:MIN:MAX:COUNT")
    for name in ("rho", "mu", "omega"):
        p.add_argument(f"--{name}", type=float, help=f"fixed {name} when not swept")
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--variant", choices=[v.value for v in Variant], default="symmetric")
    p.add_argument("--branch", choices=[b.value for b in Branch], default="positive")
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--iter-n", type=int, default=1, help="iterate count when --field iterate has no :N")
    p.add_argument("--seq-len", type=int, default=None,
                   help=f"symbols for embedding (default {EMBED_LEN}) or lz (default {LZ_LEN})")
    p.add_argument("--le-samples", type=int, default=N_SAMPLE)
    p.add_argument("--le-transient", type=int, default=N_TRANSIENT)
    p.add_argument("--max-period", type=int, default=32)
    p.add_argument("--period-tol", type=float, default=PERIOD_TOL)
    p.add_argument("--zero-eps", type=float, default=ZERO_EPS)
    p.set_defaults(run=cmd_sweep)

    p = sub.add_parser("curves", formatter_class=fmt, help="write a bifurcation curve family")
    p.add_argument("--kind", type=curve_kind_arg, required=True,
                   help="gamma-g | gamma-p | belyakov-explicit | belyakov-implicit | homoclinic:N")
    p.add_argument("--omega", type=float)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--k-max", type=int, default=6)
    p.add_argument("--rho", type=range_arg, help="MIN:MAX:COUNT")
    p.add_argument("--mu-bracket", type=pair_arg, default=(-1.0, 1.0), help="LO:HI")
    p.add_argument("--form", choices=["map", "signed"], default="map",
                   help="implicit tangency system: x_2 = mu -+ c (image of the critical point) or x_2 = +-mu + c")
    p.add_argument("--from-grid", help="iterate grid for homoclinic:N")
    p.add_argument("--contour-tol", type=float, default=0.1)
    p.add_argument("--out", required=True)
    p.set_defaults(run=cmd_curves)

    p = sub.add_parser("render", formatter_class=fmt, help="grid to PPM/PGM heatmap")
    p.add_argument("--grid", required=True)
    p.add_argument("--out", required=True, help="PATH.ppm or PATH.pgm")
    p.add_argument("--colormap", choices=["diverging", "linear", "grayscale"],
                   help="default: diverging for .ppm, grayscale for .pgm")
    p.add_argument("--clip", type=pair_arg, help="LO:HI (default: data range)")
    p.add_argument("--overlay", action="append", default=[], help="CurveFile, repeatable")
    p.set_defaults(run=cmd_render)

    p = sub.add_parser("orbit", formatter_class=fmt, help="orbit diagram CSV over a rho range")
    _add_map_flags(p, rho=False)
    p.add_argument("--rho", type=range_arg, required=True, help="MIN:MAX:COUNT")
    p.add_argument("--seed", choices=[s.value for s in SeedRule], default="from-mu")
    p.add_argument("--transient", type=int, default=N_TRANSIENT)
    p.add_argument("--keep", type=int, default=200)
    p.add_argument("--period-tol", type=float, default=PERIOD_TOL)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(run=cmd_orbit)

    p = sub.add_parser("cobweb", formatter_class=fmt, help="cobweb segments CSV")
    _add_map_flags(p)
    p.add_argument("--x0", type=float, help="start (default mu)")
    p.add_argument("--n", type=int, default=50)
    p.set_defaults(run=cmd_cobweb)

    p = sub.add_parser("encode", formatter_class=fmt, help="symbolic itinerary of the orbit of 0")
    _add_map_flags(p)
    p.add_argument("--branch", choices=[b.value for b in Branch], default="positive")
    p.add_argument("--max-len", type=int, default=EMBED_LEN)
    p.add_argument("--zero-eps", type=float, default=ZERO_EPS)
    p.set_defaults(run=cmd_encode)

    p = sub.add_parser("lyapunov", formatter_class=fmt, help="Lyapunov exponent and period")
    _add_map_flags(p)
    p.add_argument("--x0", type=float, help="start (default mu)")
    p.add_argument("--transient", type=int, default=N_TRANSIENT)
    p.add_argument("--samples", type=int, default=N_SAMPLE)
    p.add_argument("--max-period", type=int, default=64)
    p.add_argument("--period-tol", type=float, default=PERIOD_TOL)
    p.set_defaults(run=cmd_lyapunov)

    p = sub.add_parser("verify", formatter_class=fmt, help="run residual oracles, PASS/FAIL per check")
    p.add_argument("--suite", choices=["belyakov", "gamma", "all"], default="all")
    p.add_argument("--omega", type=float, default=10.0)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--k-max", type=int, default=6)
    p.add_argument("--rho-values", type=float, nargs="+", default=[0.3, 0.7, 1.0, 1.5])
    p.add_argument("--mu-bracket", type=pair_arg, default=(-1.0, 1.0), help="LO:HI")
    p.add_argument("--form", choices=["map", "signed"], default="map")
    p.set_defaults(run=cmd_verify)

    # show every default in --help, including flags without their own help text
    for subparser in sub.choices.values():
        for action in subparser._actions:
            if action.help is None and action.default not in (None, argparse.SUPPRESS):
                action.help = "(default: %(default)s)"
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OverlayAxesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_AXES
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except (UsageError, SaddleFocusError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
