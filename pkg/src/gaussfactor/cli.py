"""Command-line interface.

    gaussfactor factor 1309 --method revival --delta-n 250
    gaussfactor curlicue 21 --format csv
    gaussfactor gauss-sum --r 2 --q 1
    gaussfactor carpet --geometry box --size 1 --tmax 1 --nx 256 --nt 256 --format pgm -o carpet.pgm
    gaussfactor figures --outdir data/

Exit status: 0 on success, 1 on computation, resource or I/O errors, 2 on
usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConvergenceError, DomainError, ResourceError
from .factoring import auto_delta_n, factorize, trial_division
from .phase import curlicue_series, decompose_real_time, gauss_sum_table
from .propagators import (PropagatorConfig, box_grid, carpet_grid, gaussian_packet,
                          period_grid)
from .revivals import RevivalParams, autocorrelation

log = logging.getLogger("gaussfactor")

FIG1_N = 1309
FIG1_DELTA_N = 250.0
FIG1_ELLS = (2, 3, 5, 7, 11, 13, 14, 17, 19)
FIG1_HALFWIDTH = 0.4
FIG1_SAMPLES = 801
FIG2_N = 21


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    """Round-trip exact text for a float."""
    return format(float(x), ".17g")


def write_csv(stream, header, rows):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def write_pgm(stream, density: np.ndarray):
    """Binary 8-bit PGM, rows in time order, scaled to the maximum density."""
    peak = float(density.max()) if density.size else 0.0
    scaled = np.zeros(density.shape) if peak == 0 else density / peak
    pixels = np.rint(255 * np.clip(scaled, 0, 1)).astype(np.uint8)
    rows, cols = pixels.shape
    stream.write(f"P5\n{cols} {rows}\n255\n".encode("ascii"))
    stream.write(pixels.tobytes())


# --- figure datasets ---------------------------------------------------------

def fig1_rows(delta_n: float = FIG1_DELTA_N, samples: int = FIG1_SAMPLES):
    params = RevivalParams.gaussian(FIG1_N, delta_n)
    offsets = np.linspace(-FIG1_HALFWIDTH, FIG1_HALFWIDTH, samples)
    offsets[samples // 2] = 0.0
    for ell in FIG1_ELLS:
        for d in offsets:
            yield ell, float(d), abs(autocorrelation(params, ell + float(d))) ** 2


def fig2_rows():
    series = curlicue_series(FIG2_N)
    for n, s in enumerate(series.values):
        yield n, abs(float(s.real)), abs(float(s.imag))


def emit_figure_datasets(outdir) -> list[Path]:
    """Write ``fig1_N1309.csv`` and ``fig2_N21.csv`` into ``outdir``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    fig1 = outdir / "fig1_N1309.csv"
    with open(fig1, "w", newline="") as fh:
        write_csv(fh, ["ell", "delta_tau", "S2"], fig1_rows())
    fig2 = outdir / f"fig2_N{FIG2_N}.csv"
    with open(fig2, "w", newline="") as fh:
        write_csv(fh, ["n", "abs_re", "abs_im"], fig2_rows())
    return [fig1, fig2]


# --- parser ------------------------------------------------------------------

def _delta_n(text: str):
    if text == "auto":
        return None
    return float(text)


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="output file (default: standard output)")
    common.add_argument("--format", choices=("csv", "json", "pgm"), help="output format")
    common.add_argument("--config", help="flat key=value file overriding defaults")
    common.add_argument("--threads", type=int, default=1, help="worker threads (default: 1)")

    parser = argparse.ArgumentParser(prog="gaussfactor", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = sub.add_parser("factor", parents=[common], help="factor an integer")
    p.add_argument("N", type=int)
    p.add_argument("--method", choices=("revival", "curlicue"), default="revival")
    p.add_argument("--delta-n", type=_delta_n, default=None,
                   help="weight width, or 'auto' for 3N/(2 pi) (default: auto)")
    p.add_argument("--window", type=float, default=0.4, help="window half-width (default: 0.4)")
    p.add_argument("--samples", type=int, default=1, help="odd samples per window (default: 1)")
    p.add_argument("--threshold", type=float, default=1.5, help="score threshold (default: 1.5)")
    p.add_argument("--lmax", type=int, default=None, help="largest ell scanned per stage")
    subs["factor"] = p

    p = sub.add_parser("autocorr", parents=[common], help="|S_N|^2 around an integer time")
    p.add_argument("N", type=int)
    p.add_argument("--center", type=int)
    p.add_argument("--halfwidth", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--delta-n", type=_delta_n, default=None)
    subs["autocorr"] = p

    p = sub.add_parser("curlicue", parents=[common], help="curlicue sum s_N(n)")
    p.add_argument("N", type=int)
    subs["curlicue"] = p

    p = sub.add_parser("carpet", parents=[common], help="quantum carpet |psi(x,t)|^2")
    p.add_argument("--geometry", choices=("box", "talbot"))
    p.add_argument("--size", type=float, help="box length L or grating period d")
    p.add_argument("--tmax", type=float, help="final time in units of T")
    p.add_argument("--nx", type=int)
    p.add_argument("--nt", type=int)
    p.add_argument("--cutoff", type=int, default=256, help="mode cutoff (default: 256)")
    p.add_argument("--width", type=float, default=None,
                   help="packet width (default: size/20)")
    subs["carpet"] = p

    p = sub.add_parser("gauss-sum", parents=[common], help="Gauss sums W_m^(r)")
    p.add_argument("--r", type=int)
    p.add_argument("--q", type=int)
    subs["gauss-sum"] = p

    p = sub.add_parser("decompose", parents=[common], help="split t into (q/r)N + eps + dt")
    p.add_argument("--t", type=float)
    p.add_argument("--N", type=int, dest="N")
    p.add_argument("--rmax", type=int)
    subs["decompose"] = p

    p = sub.add_parser("figures", parents=[common], help="write both figure datasets")
    p.add_argument("--outdir", default=".")
    subs["figures"] = p
    return parser, subs


def read_config(path: str) -> dict[str, str]:
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


def parse(argv) -> argparse.Namespace:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        sub = subs[args.command]
        known = {a.dest for a in sub._actions}
        try:
            overrides = read_config(args.config)
        except OSError as exc:
            sub.error(f"cannot read config: {exc}")
        except UsageError as exc:
            sub.error(str(exc))
        unknown = sorted(set(overrides) - known)
        if unknown:
            sub.error(f"unknown config keys: {', '.join(unknown)}")
        sub.set_defaults(**overrides)
        args = parser.parse_args(argv)
    validate(args, subs[args.command])
    return args


def _require(sub, args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            sub.error(f"--{name.replace('_', '-')} is required")


def validate(args, sub):
    def positive(name, minimum=1):
        value = getattr(args, name)
        if value is not None and not value >= minimum:
            sub.error(f"{name} must be at least {minimum}, got {value}")

    def finite(name):
        value = getattr(args, name)
        if value is not None and not math.isfinite(value):
            sub.error(f"{name} must be finite")

    if args.threads < 1:
        sub.error("--threads must be at least 1")
    cmd = args.command
    if cmd == "factor":
        positive("N", 2)
        positive("samples")
        if args.samples % 2 == 0:
            sub.error("--samples must be odd")
        if args.delta_n is not None and not (math.isfinite(args.delta_n) and args.delta_n > 0):
            sub.error("--delta-n must be positive")
        finite("window")
        finite("threshold")
        if args.window < 0:
            sub.error("--window must be non-negative")
        positive("lmax", 2)
    elif cmd == "autocorr":
        _require(sub, args, "center", "halfwidth", "samples")
        positive("N", 2)
        positive("center", 0)
        positive("samples")
        finite("halfwidth")
        if args.samples % 2 == 0:
            sub.error("--samples must be odd")
        if args.halfwidth < 0:
            sub.error("--halfwidth must be non-negative")
        if args.delta_n is not None and not (math.isfinite(args.delta_n) and args.delta_n > 0):
            sub.error("--delta-n must be positive")
    elif cmd == "curlicue":
        positive("N")
    elif cmd == "carpet":
        _require(sub, args, "geometry", "size", "tmax", "nx", "nt")
        finite("size")
        finite("tmax")
        if not args.size > 0:
            sub.error("--size must be positive")
        if args.tmax < 0:
            sub.error("--tmax must be non-negative")
        positive("nx", 16)
        positive("nt", 16)
        positive("cutoff")
        if args.width is not None and not args.width > 0:
            sub.error("--width must be positive")
    elif cmd == "gauss-sum":
        _require(sub, args, "r", "q")
        positive("r")
        positive("q", 0)
    elif cmd == "decompose":
        _require(sub, args, "t", "N", "rmax")
        finite("t")
        positive("N")
        positive("rmax")
    if args.format == "pgm" and cmd != "carpet":
        sub.error("--format pgm is only available for carpet")
    if cmd == "carpet" and args.format == "json":
        sub.error("carpet writes csv or pgm")


# --- commands ----------------------------------------------------------------

def cmd_factor(args, out):
    report = factorize(args.N, args.method, args.delta_n, args.window, args.samples,
                       args.threshold, args.lmax, args.threads)
    oracle = trial_division(args.N)
    if report.complete:
        agree = "agrees" if report.confirmed_factors == oracle else "DISAGREES"
        log.info("trial-division oracle %s: %s", agree, oracle)
    else:
        log.info("incomplete: cofactor %d left unfactored", report.cofactor)
    if args.format == "csv":
        rows = [(rec.N, rec.ell, d, v, int(rec.flagged)) for rec in report.scan
                for d, v in rec.window]
        write_csv(out, ["N", "ell", "delta_tau", "S2", "flagged"], rows)
    else:
        json.dump(report.to_dict(), out, indent=2)
        out.write("\n")


def cmd_autocorr(args, out):
    width = auto_delta_n(args.N) if args.delta_n is None else args.delta_n
    params = RevivalParams.gaussian(args.N, width)
    offsets = np.linspace(-args.halfwidth, args.halfwidth, args.samples)
    offsets[args.samples // 2] = 0.0
    rows = []
    for d in offsets:
        s = autocorrelation(params, args.center + float(d))
        rows.append((args.center + float(d), float(d), s.real, s.imag, abs(s) ** 2))
    header = ["tau", "delta_tau", "re", "im", "S2"]
    _emit_table(args, out, header, rows)


def cmd_curlicue(args, out):
    series = curlicue_series(args.N)
    rows = [(n, float(s.real), float(s.imag), abs(s)) for n, s in enumerate(series.values)]
    _emit_table(args, out, ["n", "re", "im", "magnitude"], rows)


def cmd_gauss_sum(args, out):
    table = gauss_sum_table(args.r, args.q)
    rows = [(m, float(w.real), float(w.imag), abs(w)) for m, w in enumerate(table.values)]
    _emit_table(args, out, ["m", "re", "im", "magnitude"], rows)


def cmd_decompose(args, out):
    fraction, delta_t = decompose_real_time(args.t, args.N, args.rmax)
    record = {"t": args.t, "N": args.N, "q": fraction.q, "r": fraction.r,
              "epsilon": fraction.epsilon, "delta_t": delta_t}
    if args.format == "csv":
        write_csv(out, list(record), [list(record.values())])
    else:
        json.dump(record, out, indent=2)
        out.write("\n")


def cmd_carpet(args, out):
    config = PropagatorConfig(args.geometry, args.size, args.cutoff)
    width = args.size / 20 if args.width is None else args.width
    if args.geometry == "box":
        packet = gaussian_packet(box_grid(args.size, args.nx), args.size / 2, width)
    else:
        packet = gaussian_packet(period_grid(args.size, args.nx), 0.0, width)
    t_values = np.linspace(0.0, args.tmax, args.nt)
    grid = carpet_grid(packet, config, t_values)
    if args.format == "pgm":
        write_pgm(out, grid.density)
        return
    rows = [(x, t, rho) for t, row in zip(grid.t_grid, grid.density)
            for x, rho in zip(grid.x_grid, row)]
    write_csv(out, ["x", "t", "density"], rows)


def cmd_figures(args, out):
    for path in emit_figure_datasets(args.outdir):
        log.info("wrote %s", path)


def _emit_table(args, out, header, rows):
    if args.format == "json":
        json.dump([dict(zip(header, row)) for row in rows], out, indent=2)
        out.write("\n")
    else:
        write_csv(out, header, rows)


COMMANDS = {
    "factor": cmd_factor,
    "autocorr": cmd_autocorr,
    "curlicue": cmd_curlicue,
    "carpet": cmd_carpet,
    "gauss-sum": cmd_gauss_sum,
    "decompose": cmd_decompose,
    "figures": cmd_figures,
}


def run(argv=None) -> int:
    try:
        args = parse(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO)
    binary = args.format == "pgm"
    try:
        if args.output:
            mode, newline = ("wb", None) if binary else ("w", "")
            with open(args.output, mode, newline=newline) as fh:
                COMMANDS[args.command](args, fh)
        elif binary:
            COMMANDS[args.command](args, sys.stdout.buffer)
            sys.stdout.buffer.flush()
        else:
            buffer = io.StringIO()
            COMMANDS[args.command](args, buffer)
            sys.stdout.write(buffer.getvalue())
    except DomainError as exc:
        print(f"gaussfactor: error: {exc}", file=sys.stderr)
        return 2
    except (ResourceError, ConvergenceError, OSError) as exc:
        print(f"gaussfactor: error: {exc}", file=sys.stderr)
        return 1
    finally:
        log.removeHandler(handler)
    return 0


def main():
    raise SystemExit(run())


if __name__ == "__main__":
    main()
