"""The command implementations behind the CLI.

Each command takes a parsed :class:`~indlogic.problem.Problem` (or Bertrand
options) and returns ``(report, exit_code)``.  Exit codes: 0 success, 2 an
inconsistency verdict, 1 a usage error (raised as :class:`UsageError`).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import bertrand as bt
from .formula import AndAll, Top
from .fostruct import conditional_prob
from .indifference import build_universe, enumerate_permutations, poi_forced, poi_verify
from .inductive import (Forced, Inconsistent, R1Conflict, UndefinedProbability, check_rules, collapse,
                        consistency, derive, derive_under_independence, is_complete, satisfies, table_from_space)
from .measure import atoms_of, unions
from .problem import Problem
from .report import derive_result_json, new_report, poi_result_json, rat, space_json
from .semantics import event_of

EXIT_OK, EXIT_USAGE, EXIT_INCONSISTENT = 0, 1, 2


class UsageError(ValueError):
    """The command cannot be applied to this input."""


@dataclass(frozen=True)
class Options:
    explain: bool = False
    bound: int | None = None
    max_pv: int | None = None
    seed: int = 0


def _head(problem: Problem, command: str, **fields) -> dict:
    kind = "first-order" if problem.first_order else "propositional"
    return new_report(command, problem=problem.name, kind=kind, **fields)


def _space(problem: Problem, opts: Options):
    try:
        return problem.atom_space(opts.max_pv)
    except ValueError as exc:
        raise UsageError(f"{exc} (raise the limit with --max-pv)") from None


# ---------------------------------------------------------------------------
# check


def cmd_check(problem: Problem, opts: Options) -> tuple[dict, int]:
    """Rule check of the stated table, or of a given model's statements."""
    if problem.first_order:
        return _check_fo(problem, opts)
    space = _space(problem, opts)
    stmts = problem.statements()
    if problem.model is not None:
        model = problem.prob_space()
        ok = all(satisfies(model, s, space) for s in stmts)
        root = event_of(AndAll(tuple(problem.root)), space).bits
        events = [root] + [e for s in stmts for e in (s.antecedent.event(space).bits,
                                                      event_of(s.consequent, space).bits)]
        family = sorted(unions(atoms_of(space.size, events)))
        try:
            table = table_from_space(model, space, root, conditions=family, targets=family)
        except ValueError as exc:
            rep = _head(problem, "check", model=space_json(model), satisfies_assumptions=False,
                        rules=[str(exc)], verdict="inconsistent")
            return rep, EXIT_INCONSISTENT
        rules = [f"{v.rule} {v.kind}: {v.detail}" for v in check_rules(table)]
        rep = _head(problem, "check", model=space_json(model), satisfies_assumptions=ok,
                    rules=rules, complete=is_complete(table),
                    verdict="ok" if ok and not rules else "inconsistent")
        return rep, EXIT_OK if ok and not rules else EXIT_INCONSISTENT
    try:
        table = collapse(stmts, problem.root, space)
    except R1Conflict as exc:
        return _head(problem, "check", rules=[f"R1 conflict: {exc}"], entire=False,
                     verdict="inconsistent"), EXIT_INCONSISTENT
    rules = [f"{v.rule} {v.kind}: {v.detail}" for v in check_rules(table)]
    if not opts.explain:
        shown = rules[:20] + ([f"... {len(rules) - 20} more"] if len(rules) > 20 else [])
    else:
        shown = rules
    rep = _head(problem, "check", rules=shown, entire=not rules, complete=is_complete(table), verdict="ok")
    return rep, EXIT_OK


def _check_fo(problem: Problem, opts: Options) -> tuple[dict, int]:
    bound = opts.bound or problem.bound
    pp = problem.poi_problem(bound)
    universe = build_universe(pp.signature, pp.axioms, pp.bound)
    perms = enumerate_permutations(pp.signature)
    inv = [pi.cycles() for pi in perms if universe.is_invariant(pi)]
    if problem.model is None:
        rep = _head(problem, "check", invariant_permutations=inv, universe_size=universe.size,
                    verdict="ok" if universe.size else "inconsistent")
        return rep, EXIT_OK if universe.size else EXIT_INCONSISTENT
    model = problem.fin_model()
    sat = True
    for a in problem.assumptions:
        p = conditional_prob(model, list(problem.root) + list(a.extras), a.consequent)
        sat = sat and p == a.prob
    for ax in problem.root:
        sat = sat and conditional_prob(model, [], ax) == 1
    pairs = [(list(problem.root) + list(q.extras), q.consequent) for q in problem.queries]
    pairs += [(list(problem.root) + list(a.extras), a.consequent) for a in problem.assumptions]
    vr = poi_verify(model, perms, pairs, pp.axioms, pp.bound)
    violations = [f"{v.permutation}: P({v.consequent} | {v.antecedent}) = {_opt(v.value)} "
                  f"but the permuted statement has {_opt(v.image_value)}" for v in vr.violations]
    violations += [f"{c}: indifference fails for some antecedent" for c in vr.failing_permutations]
    ok = sat and vr.ok
    rep = _head(problem, "check", invariant_permutations=inv, universe_size=universe.size,
                satisfies_assumptions=sat, indifference_ok=vr.ok, full_check=vr.full_check,
                iso_sufficient=vr.iso_sufficient, violations=violations,
                verdict="ok" if ok else "violated")
    return rep, EXIT_OK if ok else EXIT_INCONSISTENT


def _opt(x) -> str:
    return "undefined" if x is None else rat(x)


# ---------------------------------------------------------------------------
# consistency


def cmd_consistency(problem: Problem, opts: Options) -> tuple[dict, int]:
    if problem.first_order:
        v = poi_forced(problem.poi_problem(opts.bound))
        ok = v.consistent is not False
        rep = _head(problem, "consistency", consistent=v.consistent, caveats=list(v.caveats),
                    verdict="consistent" if v.consistent else "unverified" if ok else "inconsistent")
        return rep, EXIT_OK if ok else EXIT_INCONSISTENT
    space = _space(problem, opts)
    if problem.independence:
        r = _independent_value(problem, Top(), ())
        ok = not isinstance(r, Inconsistent)
        rep = _head(problem, "consistency", consistent=ok, verdict="consistent" if ok else "inconsistent")
        return rep, EXIT_OK if ok else EXIT_INCONSISTENT
    model = consistency(problem.statements(), problem.root, space)
    rep = _head(problem, "consistency", consistent=model is not None,
                model=None if model is None else space_json(model),
                verdict="consistent" if model is not None else "inconsistent")
    return rep, EXIT_OK if model is not None else EXIT_INCONSISTENT


# ---------------------------------------------------------------------------
# derive


def _independent_value(problem: Problem, query, extras: tuple):
    marginals = []
    for a in problem.assumptions:
        if a.extras:
            raise UsageError("under independence, assumptions must be unconditional")
        marginals.append((a.consequent, a.prob))
    try:
        blocks = problem.blocks()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    kwargs = dict(pv=problem.pv, blocks=blocks)
    if not extras:
        return derive_under_independence(marginals, problem.root, query, **kwargs)
    joint = derive_under_independence(marginals, problem.root, AndAll((query,) + extras), **kwargs)
    cond = derive_under_independence(marginals, problem.root, AndAll(extras), **kwargs)
    if isinstance(joint, Inconsistent) or isinstance(cond, Inconsistent):
        return Inconsistent()
    if isinstance(joint, Forced) and isinstance(cond, Forced):
        if cond.value == 0:
            raise UndefinedProbability("the query antecedent has probability zero")
        return Forced(joint.value / cond.value)
    raise UsageError("conditional queries under independence need forced joint and antecedent values")


def cmd_derive(problem: Problem, opts: Options) -> tuple[dict, int]:
    if problem.first_order:
        return cmd_poi(problem, opts, command="derive")
    space = _space(problem, opts)
    stmts = problem.statements()
    results = []
    inconsistent = False
    for q in problem.queries:
        text = q.text()
        try:
            if problem.independence:
                r = _independent_value(problem, q.consequent, q.extras)
            else:
                r = derive(stmts, problem.root, problem.antecedent(q), q.consequent, space)
        except UndefinedProbability as exc:
            results.append({"query": text, "status": "undefined", "reason": str(exc)})
            continue
        inconsistent = inconsistent or isinstance(r, Inconsistent)
        results.append(derive_result_json(text, r, opts.explain))
    rep = _head(problem, "derive", results=results, verdict="inconsistent" if inconsistent else "ok")
    return rep, EXIT_INCONSISTENT if inconsistent else EXIT_OK


# ---------------------------------------------------------------------------
# poi


def cmd_poi(problem: Problem, opts: Options, command: str = "poi") -> tuple[dict, int]:
    if not problem.first_order:
        raise UsageError("indifference needs a first-order problem (a 'signature' block)")
    v = poi_forced(problem.poi_problem(opts.bound))
    results = [poi_result_json(q.text(), r, opts.explain) for q, r in v.results]
    bad = v.consistent is False or any(r.status == "inconsistent" for _, r in v.results)
    rep = _head(problem, command, results=results, invariant_permutations=list(v.invariant_permutations),
                universe_size=v.universe_size, caveats=list(v.caveats), consistent=v.consistent,
                verdict="inconsistent" if bad else "ok")
    return rep, EXIT_INCONSISTENT if bad else EXIT_OK


# ---------------------------------------------------------------------------
# bertrand


def cmd_bertrand(scheme: str, exact: bool = False, mc: int | None = None, seed: int = 0,
                 invariance: int | None = None) -> tuple[dict, int]:
    try:
        sch = bt.ChordScheme(scheme)
    except ValueError:
        raise UsageError(f"unknown scheme {scheme!r}") from None
    if not exact and mc is None and invariance is None:
        exact = True
    out: dict = {"scheme": sch.value}
    p = bt.bertrand_exact(sch)
    if exact:
        out["exact"] = rat(p)
    if mc is not None:
        if mc < 1:
            raise UsageError("--mc needs at least one sample")
        e = bt.bertrand_mc(sch, mc, seed)
        sigma = e.sigma(p)
        dev = abs(float(e.estimate) - float(p)) / sigma if sigma else 0.0
        out["mc"] = {"samples": e.samples, "hits": e.hits, "estimate": rat(e.estimate),
                     "estimate_float": f"{float(e.estimate):.6f}", "seed": seed,
                     "sigma": f"{sigma:.6g}", "deviation_sigmas": f"{dev:.2f}"}
    if invariance is not None:
        if invariance < 2:
            raise UsageError("--invariance needs k >= 2")
        r = bt.rotation_invariance_check(sch, invariance)
        out["invariance"] = {"k": r.k, "passed": r.passed, "p": str(r.p),
                             "failing_rotations": list(r.failing_rotations)}
    ok = "invariance" not in out or out["invariance"]["passed"]
    return new_report("bertrand", bertrand=out, verdict="ok" if ok else "failed"), EXIT_OK


def summarize(report: dict) -> list:
    """A compact verdict list used for expected outcomes: per query, status and values."""
    if report["command"] == "bertrand":
        b = report["bertrand"]
        return [[b["scheme"], b.get("exact"), b.get("invariance", {}).get("passed")]]
    out = []
    for r in report.get("results", []):
        st = r["status"]
        if st == "forced":
            out.append([st, r["value"]])
        elif st in ("interval", "not-forced"):
            out.append([st, r["lower"], r["upper"]])
        else:
            out.append([st])
    if not out and "verdict" in report:
        out.append([report["verdict"]])
    return out

