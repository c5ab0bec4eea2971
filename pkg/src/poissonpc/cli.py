"""Command-line entry point: ``poissonpc <command> [options]``.

Exit codes: 0 on success, 1 when the input is rejected, 2 on an internal error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._validation import ValidationError
from .analytic import hua_moment, mean_value_integral
from .energy import approx_energy, energy_exponent
from .lattice.geometry import LatticeBody, body_area, lattice_point_count, successive_minima
from .lattice.sums import DifferenceWeights, count_S, differences
from .paircorr import FRACTIONAL, NEAREST, PairCorrConfig, pair_correlation
from .sequences import generate, load_sequence, parse_spec, save_sequence
from .verifier import BATTERIES, rows_to_csv, run_experiment

log = logging.getLogger("poissonpc")


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ValidationError(f"cannot parse {text!r} as a list of reals") from exc


def _ints(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ValidationError(f"cannot parse {text!r} as a list of integers") from exc


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj, out):
    _emit(json.dumps(obj, indent=2, sort_keys=True) + "\n", out)


def load_weights(path):
    """Rows ``x [alpha]``; a missing weight means 1."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        text = line.split("#", 1)[0].split()
        if not text:
            continue
        try:
            x = float(text[0])
            a = int(text[1]) if len(text) > 1 else 1
        except ValueError:
            raise ValidationError(f"{path}:{lineno}: expected 'x [alpha]'") from None
        rows.append((x, a))
    if not rows:
        raise ValidationError(f"{path}: no weights")
    return DifferenceWeights.from_pairs(rows)


def cmd_gen(args):
    window = generate(parse_spec(args.spec), args.n)
    if args.out:
        save_sequence(window, args.out)
    else:
        sys.stdout.write("".join(f"{x:.17g}\n" for x in window.values))


def cmd_ppc(args):
    window = load_sequence(args.input)
    values = window.prefix(args.n).values if args.n else window.values
    config = PairCorrConfig(s_grid=tuple(_floats(args.s)), convention=args.convention,
                            scale_alpha=args.alpha)
    rows = []
    for s in config.s_grid:
        count, R = pair_correlation(values, s, config, method=args.method)
        rows.append({"N": values.size, "s": s, "count": count, "R": R})
    _emit(rows_to_csv(rows), args.out)


def cmd_energy(args):
    window = load_sequence(args.input)
    res = approx_energy(window, args.n, args.gamma, method=args.method, slack=True)
    _emit_json({"N": res.N, "gamma": res.gamma, "value": res.value, "method": res.method,
                "boundary_sensitive": res.boundary_sensitive}, args.out)


def cmd_energy_slope(args):
    fit, values = energy_exponent(parse_spec(args.spec), _ints(args.ns), ("const", args.gamma))
    _emit_json({"Ns": list(fit.Ns), "values": values, "slope": fit.slope,
                "intercept": fit.intercept, "residual": fit.residual}, args.out)


def cmd_scount(args):
    if args.weights:
        weights = load_weights(args.weights)
    else:
        weights = differences(load_sequence(args.input), args.n)
    value = count_S(weights, args.m, args.k, method=args.method)
    _emit_json({"M": args.m, "K": args.k, "size": len(weights), "value": value,
                "method": args.method}, args.out)


def cmd_minima(args):
    body = LatticeBody(args.x1, args.x2, args.bign, args.k)
    m = successive_minima(body)
    area, bound = body_area(body)
    out = {"lambda1": m.lambda1, "lambda2": m.lambda2, "v1": list(m.v1), "v2": list(m.v2),
           "area": area, "area_bound": bound}
    if args.count:
        out["lattice_count"] = lattice_point_count(body)
    _emit_json(out, args.out)


def cmd_moment(args):
    res = hua_moment(tuple(_floats(args.poly)), args.n, args.pow, method=args.method)
    _emit_json({"value": res.value, "errorEstimate": res.error_estimate,
                "gridSize": res.grid_size, "method": res.method}, args.out)


def cmd_mv(args):
    weights = load_weights(args.input)
    res = mean_value_integral(weights, args.t, N=args.bign)
    _emit_json({"value": res.value, "errorEstimate": res.error_estimate,
                "gridSize": res.grid_size, "method": res.method}, args.out)


def cmd_verify(args):
    out, summary = run_experiment(args.config, battery=args.battery, out_dir=args.out,
                                  seed=args.seed, threads=args.threads)
    sys.stdout.write(f"{out}: {'PASS' if summary['passed'] else 'FAIL'}\n")
    return 0 if summary["passed"] else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="poissonpc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=fn)
        p.add_argument("--out", help="output file (stdout by default)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", default=None)
        return p

    p = add("gen", cmd_gen, "generate a sequence window")
    p.add_argument("--spec", required=True, help="e.g. poly:1,0,0 or power:alpha=1,theta=1.5")
    p.add_argument("--n", type=int, required=True)

    p = add("ppc", cmd_ppc, "pair-correlation counts")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--s", default="1", help="comma-separated s values")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--n", type=int)
    p.add_argument("--convention", choices=(NEAREST, FRACTIONAL), default=NEAREST)
    p.add_argument("--method", choices=("sort", "brute"), default="sort")

    p = add("energy", cmd_energy, "approximate additive energy")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--method", choices=("auto", "twopointer", "brute"), default="auto")

    p = add("energy-slope", cmd_energy_slope, "fit the energy growth exponent")
    p.add_argument("--spec", required=True)
    p.add_argument("--ns", required=True, help="comma-separated ascending N values")
    p.add_argument("--gamma", type=float, default=1.0)

    p = add("scount", cmd_scount, "weighted count S(X, alpha, M, K)")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--in", dest="input", help="sequence file; its differences are used")
    src.add_argument("--weights", help="file of 'x alpha' rows")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--method", choices=("auto", "brute", "interval", "productsort"), default="auto")

    p = add("minima", cmd_minima, "successive minima of a lattice body")
    p.add_argument("--x1", type=float, required=True)
    p.add_argument("--x2", type=float, required=True)
    p.add_argument("--bign", type=float, required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--count", action="store_true", help="also count lattice points")

    p = add("moment", cmd_moment, "Weyl-sum moment integral")
    p.add_argument("--poly", required=True, help="coefficients, highest degree first")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--pow", type=int, required=True, help="even exponent 2s")
    p.add_argument("--method", choices=("auto", "nyquist", "refined"), default="auto")

    p = add("mv", cmd_mv, "Dirichlet-polynomial mean value")
    p.add_argument("--in", dest="input", required=True, help="file of 'x alpha' rows")
    p.add_argument("--bign", type=float)
    p.add_argument("--t", type=float, required=True)

    p = add("verify", cmd_verify, "run a verification battery")
    p.add_argument("--battery", choices=sorted(BATTERIES))
    p.add_argument("--config")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    np.random.seed(args.seed % 2**32)
    try:
        code = args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - report, do not traceback, at the CLI boundary
        log.debug("internal error", exc_info=True)
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
