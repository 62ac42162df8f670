"""qtf: command-line front end.

Exit codes: 0 all checks passed, 1 some check failed, 2 invalid input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from .errors import BallTooLarge, InvalidInput, QTFError
from .graph_metric import load_graph
from .scenarios import SCENARIOS, run_analyze, run_demo, run_free_norm, run_scenario

EXIT_OK, EXIT_FAILED, EXIT_INVALID = 0, 1, 2


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qtf", description="Exact checks for quasi-tree metrics, "
                                     "Lipschitz-free norms and affine group actions.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write the JSON report here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="seed for all random sampling (default 0)")
    common.add_argument("--cap", type=_positive, default=None,
                        help="max ball size; defaults to $QTF_CAP or 20000")
    common.add_argument("--timing", action="store_true", help="add wall-clock timing to the report")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="quotient tree of a pointed graph")
    p.add_argument("--input", "-i", required=True, help="graph JSON {n, edges, basepoint}")

    p = sub.add_parser("free-norm", parents=[common], help="free norm of a vector, by duality and by flow")
    p.add_argument("--input", "-i", required=True, help="graph JSON")
    p.add_argument("--vector", "-v", required=True, help='vector JSON {"coeffs": {"vertex": "p/q"}}')

    p = sub.add_parser("verify-action", parents=[common], help="run an action scenario")
    p.add_argument("scenario", help=f"one of {', '.join(SCENARIOS)}")
    p.add_argument("--group", "-g", help='group spec such as "free:2" or "product(cyclic:2,cyclic:3)"')
    p.add_argument("--radius", "-r", type=_positive, help="ball radius")
    p.add_argument("--maxlen", type=_positive, help="max word length")
    p.add_argument("--p", type=_positive, default=1, help="ℓᵖ exponent (integer, default 1)")

    p = sub.add_parser("demo", parents=[common], help="write the example corpus and analyze it")
    p.add_argument("--outdir", help="directory for the corpus files")
    return parser


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InvalidInput(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: malformed JSON ({exc})") from None


def _load_graph(path):
    if not Path(path).is_file():
        raise InvalidInput(f"{path}: no such file")
    return load_graph(path)


def dispatch(args):
    if args.command == "analyze":
        return run_analyze(_load_graph(args.input), args.input)
    if args.command == "free-norm":
        return run_free_norm(_load_graph(args.input), _read_json(args.vector), args.input)
    if args.command == "verify-action":
        return run_scenario(args.scenario, group=args.group, radius=args.radius, maxlen=args.maxlen,
                            p=args.p, seed=args.seed, cap=args.cap)
    return run_demo(args.outdir, args.seed)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    start = time.perf_counter()
    saved = os.environ.get("QTF_CAP")
    if args.cap is not None:
        os.environ["QTF_CAP"] = str(args.cap)  # every ball enumeration reads the cap from here
    try:
        report = dispatch(args)
    except (InvalidInput, BallTooLarge) as exc:
        print(f"qtf: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (QTFError, AssertionError) as exc:
        print(f"qtf: check failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED
    finally:
        if args.cap is not None:
            if saved is None:
                os.environ.pop("QTF_CAP", None)
            else:
                os.environ["QTF_CAP"] = saved
    if args.timing:
        report.timing = {"seconds": time.perf_counter() - start}
    text = report.to_json()
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    for c in report.failed:
        print(f"qtf: FAIL {c['name']}", file=sys.stderr)
    return EXIT_FAILED if report.failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
