"""Bounded universes, invariance, indifference checks and forced values."""

from fractions import Fraction as F

from indlogic.formula import FinSignature, SignaturePermutation
from indlogic.fostruct import FinModel, FinStructure
from indlogic.indifference import (OrbitEquality, PoIAssumption, PoIForced, PoIInconsistent, PoINotForced,
                                   PoIProblem, PoIQuery, bounded_entails, build_universe, enumerate_permutations,
                                   full_r10_check, invariant, poi_forced, poi_verify, replay_certificate,
                                   verify_certificate)
from indlogic.parser import parse_sentence

SIG = FinSignature.build(constants=["a", "b"], relations={"S": 1})
UNARY = FinSignature.build(relations={"S": 1})


def s(text, sig=SIG):
    return parse_sentence(text, sig)


def test_universe_counts_isomorphism_classes():
    # one unary relation: a size-n domain has n+1 classes
    assert build_universe(UNARY, (), 3).size == 2 + 3 + 4
    u = build_universe(UNARY, (s("exists x. S(x)", UNARY),), 3)
    assert u.size == 1 + 2 + 3
    assert u.event(s("forall x. S(x)", UNARY)).bit_count() == 3


def test_bounded_entailment_and_invariance():
    assert bounded_entails([s("forall x. S(x)", UNARY)], s("exists x. S(x)", UNARY), UNARY, 3)
    assert not bounded_entails([s("exists x. S(x)", UNARY)], s("forall x. S(x)", UNARY), UNARY, 3)
    swap = SignaturePermutation.from_cycles(SIG, "(a b)")
    assert not invariant([s("S(a)")], swap, 2, SIG)
    assert invariant([s("S(a) <-> S(b)")], swap, 2, SIG)
    assert invariant([s("a != b")], swap, 2, SIG)
    assert [p.cycles() for p in enumerate_permutations(SIG)][0] == enumerate_permutations(SIG)[0].cycles()
    assert len(enumerate_permutations(SIG)) == 2


def test_poi_verify_detects_asymmetry():
    w1 = FinStructure.build(SIG, 2, {"a": 0, "b": 1, "S": [0]})
    w2 = FinStructure.build(SIG, 2, {"a": 0, "b": 1, "S": [1]})
    perms = enumerate_permutations(SIG)
    stmts = [((), s("S(a)")), ((s("a != b"),), s("S(a) & ~S(b)"))]
    good = poi_verify(FinModel(((w1, F(1, 2)), (w2, F(1, 2)))), perms, stmts, bound=2)
    assert good.ok and good.violations == () and good.full_check and good.iso_sufficient
    bad = poi_verify(FinModel(((w1, F(1)), (w2, F(0)))), perms, stmts, bound=2)
    assert not bad.ok and not bad.iso_sufficient
    v = bad.violations[0]
    assert (v.value, v.image_value) == (1, 0) and v.permutation == "(a b)"
    assert bad.failing_permutations == ("(a b)",)


def test_full_check_on_universe_measures():
    u = build_universe(SIG, (), 2)
    perms = enumerate_permutations(SIG)
    assert full_r10_check(u, [F(1, u.size)] * u.size, perms) == []
    skew = [F(0)] * u.size
    skew[u.index(FinStructure.build(SIG, 2, {"a": 0, "b": 1, "S": [0]}))] = F(1)
    assert [p.cycles() for p in full_r10_check(u, skew, perms)] == ["(a b)"]


def test_forced_value_with_replayable_certificate():
    problem = PoIProblem(SIG, (s("a != b"),), assumed=(PoIAssumption(s("S(a)"), F(1, 3)),),
                         queries=(PoIQuery(s("S(b)")), PoIQuery(s("S(a) & S(b)"))), bound=2)
    verdict = poi_forced(problem)
    forced, loose = verdict.result(0), verdict.result(1)
    assert isinstance(forced, PoIForced) and forced.value == F(1, 3)
    orbit = [c for c in forced.certificate if isinstance(c, OrbitEquality)]
    assert orbit and verify_certificate(problem, forced.certificate)
    assert replay_certificate(problem, problem.queries[0], forced.certificate) == F(1, 3)
    assert replay_certificate(problem, problem.queries[0], ()) is None
    assert isinstance(loose, PoINotForced) and (loose.lower, loose.upper) == (0, F(1, 3))
    assert len(set(loose.witness_values)) == 2
    assert verdict.consistent


def test_symmetry_alone_does_not_fix_a_marginal():
    problem = PoIProblem(SIG, (s("a != b"),), queries=(PoIQuery(s("S(a)")), PoIQuery(s("S(b)"))), bound=2)
    res = poi_forced(problem).result(0)
    assert isinstance(res, PoINotForced) and (res.lower, res.upper) == (0, 1)
    assert res.equalities == ("P(S(a) | T0) = P(S(b) | T0)",)


def test_inconsistent_problems():
    clash = PoIProblem(SIG, (s("a != b"),), assumed=(PoIAssumption(s("S(a)"), F(1, 3)),
                                                     PoIAssumption(s("S(b)"), F(1, 2))),
                       queries=(PoIQuery(s("S(a)")),), bound=2)
    assert isinstance(poi_forced(clash).result(), PoIInconsistent)
    empty = PoIProblem(SIG, (s("a != a"),), queries=(PoIQuery(s("S(a)")),), bound=2)
    v = poi_forced(empty)
    assert isinstance(v.result(), PoIInconsistent) and v.universe_size == 0
