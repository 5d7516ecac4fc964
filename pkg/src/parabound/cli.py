"""Command line front end.

Subcommands: solve (march the scheme, write the field), verify (run all
enabled checks), sweep (one row per axis value), report (stability
verdict on a sweep CSV).  Exit codes: 0 success, 2 configuration
problem, 3 solver non-convergence, 4 failed verification.
"""

from __future__ import annotations

import argparse
import sys

from .errors import (ConfigError, InsufficientData, NonConvergence,
                     ParaboundError)
from .runner import (EXIT_CONFIG, EXIT_OK, EXIT_SOLVER, EXIT_VERIFY,
                     load_scenario, run_scenario, run_sweep, solve_only,
                     stability_report)


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="parabound",
        description="Nonlinear diffusion lab: solve, verify sup bounds, "
                    "sweep parameters, judge p->2 stability.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, out_required=True):
        sp.add_argument("--scenario", required=True,
                        help="scenario JSON file")
        if out_required:
            sp.add_argument("--out", required=True, help="output directory")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the scenario's seed")

    sp = sub.add_parser("solve", help="run the solver, write the field")
    common(sp)
    sp = sub.add_parser("verify", help="run enabled verification checks")
    common(sp)
    sp = sub.add_parser("sweep", help="run the scenario across one axis")
    sp.add_argument("axis", nargs="?", default="p",
                    choices=("p", "sigma", "grid"), help="sweep axis")
    common(sp)
    sp.add_argument("--jobs", type=int, default=1,
                    help="concurrent sweep points")
    sp = sub.add_parser("report", help="stability verdict for a sweep CSV")
    sp.add_argument("--scenario", required=True,
                    help="sweep CSV file to judge")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "report":
            rep = stability_report(args.scenario)
            print(f"stability: {rep.verdict} "
                  f"(max smooth jump {rep.max_smooth_jump:.4f})")
            for reason in rep.reasons:
                print(f"  - {reason}")
            return EXIT_OK if rep.passed else EXIT_VERIFY

        sc = load_scenario(args.scenario)
        if args.command == "solve":
            code, summary = solve_only(sc, args.out, seed=args.seed)
        elif args.command == "verify":
            code, summary = run_scenario(sc, args.out, seed=args.seed)
        else:
            code, summary = run_sweep(sc, args.axis, args.out,
                                      jobs=args.jobs, seed=args.seed)
        if "error" in summary:
            print(f"error: {summary['error']}", file=sys.stderr)
        else:
            flags = summary.get("satisfied")
            if flags:
                for check, ok in sorted(flags.items()):
                    print(f"{check}: {'ok' if ok else 'FAILED'}")
            print(f"{args.command}: exit {code}")
        return code
    except InsufficientData as exc:
        print(f"insufficient data: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonConvergence as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ParaboundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
