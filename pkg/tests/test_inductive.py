"""Inductive statements, event tables, the rule checker and derivation."""

import itertools
import random
from fractions import Fraction as F

import pytest
from helpers import rand_formula, rand_space, tt_eval

from indlogic.formula import AndAll, Not, Or, Var
from indlogic.inductive import (Antecedent, Forced, Inconsistent, Interval, OverlapError, R1Conflict,
                                UndefinedProbability, check_rules, closure, collapse, consistency, derive,
                                derive_under_independence, independent_in, is_complete, satisfies, statement,
                                table_from_space)
from indlogic.measure import FiniteProbSpace
from indlogic.semantics import AtomSpace

a, b, c = Var("a"), Var("b"), Var("c")
PV = ("a", "b", "c")
SPACE = AtomSpace(PV)
VALUES = [F(0), F(1, 4), F(1, 3), F(1, 2), F(2, 3), F(3, 4), F(1)]


def test_statement_validation_and_text():
    st = statement([a], b, F(1, 3), extras=[c])
    assert st.text() == "P(b | T0, c) = 1/3"
    with pytest.raises(ValueError):
        statement([], b, F(3, 2))


def test_equivalent_statements_must_agree():
    s1 = statement([], AndAll((a, b)), F(1, 2))
    s2 = statement([], AndAll((b, a)), F(1, 3))
    with pytest.raises(R1Conflict):
        collapse([s1, s2], [], SPACE)
    # same event, same value: merged into one entry
    table = collapse([s1, statement([], AndAll((b, a)), F(1, 2))], [], SPACE)
    assert len(table.entries) == 1
    with pytest.raises(ValueError):
        collapse([statement([a], b, F(1, 2))], [], SPACE)


def test_model_tables_are_complete_and_tampering_is_caught():
    rng = random.Random(20)
    for _ in range(40):
        model = rand_space(rng, 8, max_blocks=4)
        table = table_from_space(model, SPACE)
        assert check_rules(table) == [] and is_complete(table)
        movable = [k for k, v in table.entries.items() if k[1] not in (0, k[0])]
        if not movable:
            continue
        key = rng.choice(movable)
        table.entries[key] = 1 - table.entries[key] if table.entries[key] != F(1, 2) else F(1, 3)
        assert any(v.kind == "value" for v in check_rules(table))


def test_closure_adds_complements_and_is_idempotent():
    table = collapse([statement([], a, F(1, 3)), statement([], b, F(1, 2))], [], SPACE)
    full = (1 << SPACE.size) - 1
    closed = closure(table)
    not_a = full ^ SPACE.var_event("a").bits
    assert closed.get(full, not_a) == F(2, 3)
    assert closed.get(full, full) == 1 and closed.get(full, 0) == 0
    assert closure(closed).entries == closed.entries


def test_satisfies_reads_root_and_extras():
    # outcome i is atom i of (a, b, c); put mass on a∧b∧¬c and a∧¬b∧¬c
    masses = [F(0)] * 8
    masses[0b011], masses[0b001] = F(1, 4), F(3, 4)
    model = FiniteProbSpace.from_masses(masses)
    assert satisfies(model, statement([a], b, F(1, 4)), SPACE)
    assert satisfies(model, statement([a, Not(c)], b, F(1, 1), extras=[b]), SPACE)
    assert not satisfies(model, statement([b], a, 1), SPACE)             # root not certain
    assert not satisfies(model, statement([], a, 1, extras=[c]), SPACE)   # antecedent null


def test_derive_interval_with_distinct_witnesses():
    stmts = [statement([], a, F(1, 2))]
    res = derive(stmts, [], Antecedent(), AndAll((a, b)), SPACE)
    assert isinstance(res, Interval) and (res.lower, res.upper) == (0, F(1, 2))
    assert res.witness_values[0] != res.witness_values[1]
    for w, v in zip(res.witnesses, res.witness_values):
        assert all(satisfies(w, s, SPACE) for s in stmts)
        assert satisfies(w, statement([], AndAll((a, b)), v), SPACE)
    assert isinstance(derive(stmts + [statement([], a, F(1, 3))], [], Antecedent(), b, SPACE), Inconsistent)
    with pytest.raises(UndefinedProbability):
        derive([statement([], a, 0)], [], Antecedent((), (a,)), b, SPACE)


def test_consistency_gives_positive_antecedents():
    stmts = [statement([], b, F(1, 2), extras=[a]), statement([], a, F(1, 4))]
    m = consistency(stmts, [], SPACE)
    assert m is not None and all(satisfies(m, s, SPACE) for s in stmts)
    assert consistency([statement([], a, 0), statement([], b, 1, extras=[a])], [], SPACE) is None


def test_independent_in():
    masses = [F(p) for p in (F(1, 8),) * 8]
    model = FiniteProbSpace.from_masses(masses)
    assert independent_in(model, Antecedent(), [a, b, c], SPACE)
    skew = list(masses)
    skew[0b011], skew[0b000] = F(2, 8), F(0)
    assert not independent_in(FiniteProbSpace.from_masses(skew), Antecedent(), [a, b], SPACE)
    with pytest.raises(UndefinedProbability):
        independent_in(FiniteProbSpace.from_masses(masses), Antecedent((), (AndAll((a, Not(a))),)), [a], SPACE)


def _product_value(phi, probs):
    """Σ over satisfying assignments of the product measure, by direct enumeration."""
    total = F(0)
    for vals in itertools.product((False, True), repeat=len(PV)):
        env = dict(zip(PV, vals))
        if tt_eval(phi, env):
            w = F(1)
            for v, x in env.items():
                w *= probs[v] if x else 1 - probs[v]
            total += w
    return total


def test_independence_matches_product_measure():
    rng = random.Random(21)
    for _ in range(200):
        phi = rand_formula(rng, PV, 3)
        probs = {v: rng.choice(VALUES) for v in PV}
        res = derive_under_independence([(Var(v), p) for v, p in probs.items()], [], phi, pv=PV)
        assert isinstance(res, Forced) and res.value == _product_value(phi, probs)
        # leaving c free: the value is affine in P(c), so the extremes sit at 0 and 1
        free = derive_under_independence([(Var(v), probs[v]) for v in ("a", "b")], [], phi, pv=PV)
        ends = sorted(_product_value(phi, {**probs, "c": x}) for x in (F(0), F(1)))
        if ends[0] == ends[1]:
            assert isinstance(free, Forced) and free.value == ends[0]
        else:
            assert isinstance(free, Interval) and (free.lower, free.upper) == tuple(ends)


def test_independence_blocks_and_errors():
    marg = [(Or((a, b)), F(3, 4)), (c, F(1, 2))]
    res = derive_under_independence(marg, [], AndAll((Or((a, b)), c)), pv=PV)
    assert isinstance(res, Forced) and res.value == F(3, 8)
    with pytest.raises(OverlapError):
        derive_under_independence(marg, [], a, pv=PV, blocks=[("a",), ("b",), ("c",)])
    with pytest.raises(ValueError):
        derive_under_independence(marg, [], a, pv=PV, blocks=[("a", "b")])
    bad = derive_under_independence([(a, F(1, 2)), (a, F(1, 3))], [], a, pv=PV)
    assert isinstance(bad, Inconsistent)
    # a root conjunct stays inside its block
    rooted = derive_under_independence([(c, F(1, 2))], [Or((a, b))], AndAll((c, Or((a, b)))), pv=PV)
    assert isinstance(rooted, Forced) and rooted.value == F(1, 2)
