"""Command-line front end: ``indlogic <command> [file] [flags]``.

Commands: ``check``, ``consistency``, ``derive``, ``poi``, ``bertrand``,
``example``, ``self-test``.  A problem argument is a path to a problem file
or the name of a registered example.  Exit codes: 0 success, 2 an
inconsistency verdict, 1 a usage or parse error (also a failing self-test).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .commands import (EXIT_OK, EXIT_USAGE, Options, UsageError, cmd_bertrand, cmd_check, cmd_consistency,
                       cmd_derive, cmd_poi)
from .parser import ParseError
from .problem import Problem, load_problem
from .registry import EXAMPLES, check_example, example_registry, get_example, load_example, run_example
from .report import dumps, new_report, render_text

PROBLEM_COMMANDS = {"check": cmd_check, "consistency": cmd_consistency, "derive": cmd_derive, "poi": cmd_poi}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="print the JSON report")
    p.add_argument("--explain", action="store_true", help="include witnesses, certificates and full rule lists")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="indlogic", description="Inductive logic on finite languages.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, text in (("check", "check the rules on the stated table or a given model"),
                       ("consistency", "find a model of the assumptions, or report none"),
                       ("derive", "forced values or intervals for the queries"),
                       ("poi", "values forced by the principle of indifference")):
        p = sub.add_parser(name, help=text)
        p.add_argument("problem", help="problem file or registered example name")
        _common(p)
        p.add_argument("--bound", type=int, help="domain-size bound for first-order universes")
        p.add_argument("--max-pv", type=int, help="cap on propositional variables in one atom space")
    p = sub.add_parser("bertrand", help="Bertrand's chord problem")
    p.add_argument("--scheme", required=True, choices=["endpoints", "radius", "midpoint"])
    p.add_argument("--exact", action="store_true", help="exact probability (default when nothing else is asked)")
    p.add_argument("--mc", type=int, metavar="N", help="Monte Carlo with N samples")
    p.add_argument("--seed", type=int, default=0, help="Monte Carlo seed (default 0)")
    p.add_argument("--invariance", type=int, metavar="K", help="rotation check on K sectors and K shells")
    _common(p)
    p = sub.add_parser("example", help="run a registered example, or list them")
    p.add_argument("name", nargs="?")
    p.add_argument("--list", action="store_true")
    _common(p)
    p = sub.add_parser("self-test", help="run every registered example and compare with its expectation")
    _common(p)
    return ap


def _load(arg: str) -> Problem:
    path = Path(arg)
    if path.exists():
        return load_problem(path)
    if arg in example_registry() and get_example(arg).file:
        return load_example(arg)
    raise UsageError(f"no such file or example: {arg}")


def run(argv: list[str]) -> tuple[dict, int]:
    """Parse arguments and run one command; returns ``(report, exit code)``."""
    args = build_parser().parse_args(argv)
    if args.command in PROBLEM_COMMANDS:
        opts = Options(explain=args.explain, bound=args.bound, max_pv=args.max_pv)
        if args.bound is not None and args.bound < 1:
            raise UsageError("--bound must be positive")
        return PROBLEM_COMMANDS[args.command](_load(args.problem), opts)
    if args.command == "bertrand":
        return cmd_bertrand(args.scheme, args.exact, args.mc, args.seed, args.invariance)
    if args.command == "example":
        if args.list or not args.name:
            items = [{"name": e.name, "command": e.command, "description": e.description} for e in EXAMPLES]
            return new_report("example", examples_list=items), EXIT_OK
        try:
            get_example(args.name)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
        return run_example(args.name, Options(explain=args.explain))
    # self-test
    rows = []
    for name in example_registry():
        ok, got, code = check_example(name)
        rows.append({"name": name, "passed": ok, "summary": _summary_text(got, code)})
    passed = all(r["passed"] for r in rows)
    return (new_report("self-test", examples=rows, verdict="pass" if passed else "fail"),
            EXIT_OK if passed else EXIT_USAGE)


def _summary_text(got: list, code: int) -> str:
    parts = [" ".join(str(x) for x in row) for row in got]
    return "; ".join(parts) + (f" (exit {code})" if code else "")


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        report, code = run(argv)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:            # argparse usage errors
        return EXIT_USAGE if exc.code else EXIT_OK
    json_mode = "--json" in argv
    if json_mode:
        sys.stdout.write(dumps(report))
    else:
        sys.stdout.write(render_text(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
