"""Canned example problems with their recorded expected verdicts.

Each entry names a problem file shipped in ``indlogic/problems`` (or the
built-in Bertrand demonstration), the command to run, and the expected
:func:`~indlogic.commands.summarize` output, written down by hand from the
known answers rather than produced by running the code.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .commands import Options, cmd_bertrand, cmd_consistency, cmd_derive, cmd_poi, summarize
from .problem import Problem, parse_problem
from .report import new_report


@dataclass(frozen=True)
class Example:
    name: str
    command: str
    description: str
    expected: tuple
    file: str | None = None
    expected_exit: int = 0


def _forced(*vals):
    return tuple(["forced", v] for v in vals)


EXAMPLES: tuple[Example, ...] = (
    Example("mathse-half", "derive",
            "P(r1) = P(r2) = P(r1 <-> r2) = 1/2 forces P(r1 & r2) = 1/4",
            _forced("1/4", "3/4"), "mathse_half.prob"),
    Example("mathse-quarter", "derive",
            "the same statements at 1/4 are closed under the rules yet have no model",
            (["inconsistent"],), "mathse_quarter.prob", expected_exit=2),
    Example("incomplete-theory", "derive",
            "P(r1) = 1/2 and P(r2 | r3) = 1 leave P(r3) anywhere in [0, 1]",
            (["interval", "0", "1"], ["forced", "1"]), "incomplete_theory.prob"),
    Example("unknown-false-3", "derive",
            "all variables true with probability 1/2, otherwise only r1 false",
            _forced("1/2", "1/2", "1"), "unknown_false_3.prob"),
    Example("fair-coins-n10", "derive",
            "ten independent fair flips: patterns get 2^-|I|, their negations 1 - 2^-10",
            _forced("1/2", "1/4", "1/16", "1/1024", "1023/1024", "1023/1024"), "fair_coins_n10.prob"),
    Example("true-or-not", "poi",
            "no symmetry, nothing forced",
            (["not-forced", "0", "1"],), "true_or_not.prob"),
    Example("one-coin", "poi",
            "swapping the side names forces 1/2",
            _forced("1/2"), "one_coin.prob"),
    Example("single-trial", "poi",
            "swapping success and failure forces 1/2",
            _forced("1/2"), "single_trial.prob"),
    Example("success-good", "poi",
            "'every success is good' in the root breaks the symmetry",
            (["not-forced", "0", "1"],), "success_good.prob"),
    Example("goodness-independent", "poi",
            "independence of success and goodness restores 1/2 for the conditional query",
            _forced("1/2"), "goodness_independent.prob"),
    Example("lowered-root", "poi",
            "goodness assumed with probability 1 instead of in the root: 1/2",
            _forced("1/2"), "lowered_root.prob"),
    Example("three-balls", "poi",
            "three balls, both colours present: each mixed colouring gets 1/6",
            _forced("0", "1/6", "1/6", "1/6", "1/6", "1/6", "1/6", "0"), "three_balls.prob"),
    Example("two-balls", "poi",
            "two balls: only p0 = p3 and p1 = p2 are forced",
            tuple(["not-forced", "0", "1/2"] for _ in range(4)), "two_balls.prob"),
    Example("random-number", "poi",
            "a number that is 0 or 1 with 0 < 1: nothing forced",
            (["not-forced", "0", "1"],), "random_number.prob"),
    Example("random-number-defined", "poi",
            "adding 'd is the other number' makes swapping c and d a symmetry: 1/2",
            _forced("1/2"), "random_number_defined.prob"),
    Example("bertrand", "bertrand",
            "three chord schemes, three answers; each midpoint law is rotation invariant",
            (["endpoints", "1/3", True], ["radius", "1/2", True], ["midpoint", "1/4", True])),
)


def example_registry() -> list[str]:
    return [e.name for e in EXAMPLES]


def get_example(name: str) -> Example:
    for e in EXAMPLES:
        if e.name == name:
            return e
    raise KeyError(f"unknown example {name!r}; known: {', '.join(example_registry())}")


def problem_text(filename: str) -> str:
    return resources.files("indlogic").joinpath("problems").joinpath(filename).read_text()


def load_example(name: str) -> Problem:
    e = get_example(name)
    if e.file is None:
        raise KeyError(f"example {name!r} has no problem file")
    return parse_problem(problem_text(e.file), e.name)


_RUNNERS = {"derive": cmd_derive, "poi": cmd_poi, "consistency": cmd_consistency}


def run_example(name: str, opts: Options | None = None) -> tuple[dict, int]:
    """Run an example's command; Bertrand runs all three schemes (exact + k = 12 invariance)."""
    opts = opts or Options()
    e = get_example(name)
    if e.command == "bertrand":
        parts = [cmd_bertrand(s, exact=True, invariance=12)[0] for s in ("endpoints", "radius", "midpoint")]
        ok = all(p["verdict"] == "ok" for p in parts)
        return new_report("bertrand", schemes=[p["bertrand"] for p in parts], verdict="ok" if ok else "failed"), 0
    return _RUNNERS[e.command](load_example(name), opts)


def example_summary(name: str, report: dict) -> list:
    if get_example(name).command == "bertrand":
        return [[b["scheme"], b.get("exact"), b.get("invariance", {}).get("passed")] for b in report["schemes"]]
    return summarize(report)


def check_example(name: str) -> tuple[bool, list, int]:
    """Run an example and compare with its recorded expectation."""
    e = get_example(name)
    rep, code = run_example(name)
    got = example_summary(name, rep)
    return got == [list(x) for x in e.expected] and code == e.expected_exit, got, code
