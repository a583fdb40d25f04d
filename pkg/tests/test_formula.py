"""Formula AST, pretty printer, parser and signature permutations."""

import random

import pytest
from helpers import rand_formula, tt_mask
from hypothesis import given, settings
from hypothesis import strategies as st

from indlogic.formula import (AndAll, Const, Eq, Exists, ExistsExactly, FinSignature, Forall, Func, Iff, Implies,
                              Not, Or, Rel, SignaturePermutation, Symbol, Top, TVar, Var, all_permutations,
                              check_signature, desugar, free_variables, is_sentence, node_count, permute, symbols,
                              to_text, variables)
from indlogic.parser import ParseError, UndeclaredError, parse_formula, parse_sentence, parse_structure, tokenize
from indlogic.semantics import equivalent

PV = ("p", "q", "r", "s")


@st.composite
def formulas(draw):
    seed = draw(st.integers(0, 2 ** 32))
    return rand_formula(random.Random(seed), PV, 4)


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_pretty_printer_round_trips(phi):
    assert parse_formula(to_text(phi), PV) == phi


@settings(max_examples=200, deadline=None)
@given(formulas())
def test_desugar_keeps_meaning_and_uses_primitives(phi):
    d = desugar(phi, r0="p")
    assert tt_mask(d, PV) == tt_mask(phi, PV)
    assert all(type(f).__name__ in ("Var", "Not", "AndAll") for f in _nodes(d))


def _nodes(f):
    yield f
    for c in getattr(f, "args", ()) or ():
        yield from _nodes(c)
    for attr in ("arg", "left", "right"):
        if hasattr(f, attr):
            yield from _nodes(getattr(f, attr))


def test_precedence_and_associativity():
    f = lambda s: parse_formula(s, PV)  # noqa: E731
    assert f("p | q & r") == Or((Var("p"), AndAll((Var("q"), Var("r")))))
    assert f("p -> q -> r") == Implies(Var("p"), Implies(Var("q"), Var("r")))
    assert f("p <-> q <-> r") == Iff(Iff(Var("p"), Var("q")), Var("r"))
    assert f("~p & q") == AndAll((Not(Var("p")), Var("q")))
    assert f("TRUE") == Top()


def test_indexed_families_expand():
    pv = [f"h{i}" for i in range(1, 4)]
    phi = parse_formula("AND i in 1..3 : h{i}", pv)
    assert phi == AndAll(tuple(Var(f"h{i}") for i in range(1, 4)))
    psi = parse_formula("OR i in 1..2 : (h{i} & h{i+1})", pv)
    assert psi == Or((AndAll((Var("h1"), Var("h2"))), AndAll((Var("h2"), Var("h3")))))
    assert parse_formula("AND i in 1..0 : h{i}", pv) == AndAll(())


def test_parse_errors_carry_positions():
    with pytest.raises(UndeclaredError) as e:
        parse_formula("p & zz", PV)
    assert e.value.line == 1 and e.value.col == 5
    with pytest.raises(ParseError) as e:
        parse_formula("p &\n  (q | ", PV)
    assert e.value.line == 2
    with pytest.raises(ParseError):
        tokenize("p $ q")


def test_first_order_sentences():
    sig = FinSignature.build(constants=["a", "b"], relations={"S": 1, "L": 2}, functions={"f": 1})
    phi = parse_sentence("forall x. (S(x) -> exists y. L(x, f(y)))", sig)
    assert isinstance(phi, Forall) and is_sentence(phi)
    assert parse_sentence(to_text(phi), sig) == phi
    assert parse_sentence("a != b", sig) == Not(Eq(Const("a"), Const("b"))) or \
        to_text(parse_sentence("a != b", sig)) == "a != b"
    e = parse_sentence("exists =2 x. S(x)", sig)
    assert isinstance(e, ExistsExactly) and e.count == 2
    assert symbols(phi) >= {"S", "L", "f"}
    with pytest.raises(ParseError):
        parse_sentence("S(x)", sig)          # free variable
    with pytest.raises(ParseError):
        parse_sentence("L(a)", sig)          # wrong arity


def test_free_variables_and_counts():
    phi = Forall("x", Rel("S", (TVar("x"), TVar("y"))))
    assert free_variables(phi) == {"y"}
    assert node_count(AndAll((Var("p"), Not(Var("q"))))) == 4
    assert variables(Implies(Var("p"), Or((Var("q"), Var("p"))))) == {"p", "q"}


def test_check_signature_rejects_kind_mismatch():
    sig = FinSignature.build(constants=["a"], relations={"S": 1})
    check_signature(Rel("S", (Const("a"),)), sig)
    with pytest.raises(ValueError):
        check_signature(Rel("a", (Const("S"),)), sig)
    with pytest.raises(ValueError):
        check_signature(Eq(Func("g", (Const("a"),)), Const("a")), sig)


def test_symbol_validation():
    with pytest.raises(ValueError):
        Symbol("c", "constant", 1)
    with pytest.raises(ValueError):
        Symbol("R", "relation", 0)
    with pytest.raises(ValueError):
        FinSignature((Symbol("a", "constant"), Symbol("a", "constant")))


def test_permutation_group_laws():
    sig = FinSignature.build(constants=["a", "b", "c"], relations={"S": 1, "T": 1, "L": 2})
    perms = all_permutations(sig)
    assert len(perms) == 6 * 2 and perms[0].is_identity
    rng = random.Random(0)
    for _ in range(30):
        p, q = rng.choice(perms), rng.choice(perms)
        assert p.compose(p.inverse()).is_identity
        assert SignaturePermutation.from_cycles(sig, p.cycles()) == p
        phi = Exists("x", AndAll((Rel("S", (Const("a"),)), Rel("L", (TVar("x"), Const("b"))))))
        assert permute(permute(phi, q), p) == permute(phi, p.compose(q))
    with pytest.raises(ValueError):
        SignaturePermutation.from_dict(sig, {"a": "S", "S": "a"})
    with pytest.raises(ValueError):
        SignaturePermutation.from_cycles(sig, "(a b)(b c)")


def test_structure_literal_round_trip():
    sig = FinSignature.build(constants=["a"], relations={"S": 1, "L": 2}, functions={"f": 1})
    w = parse_structure("structure { domain 2; a = 1; S = {0}; L = {(0, 1), (1, 1)}; f = {(0) -> 1, 1 -> 0}; }", sig)
    assert w.n == 2 and w.value("a") == 1 and w.value("f") == (1, 0)
    assert parse_structure(w.text(), sig) == w


def test_equivalence_of_connective_forms():
    p, q = Var("p"), Var("q")
    assert equivalent(Implies(p, q), Or((Not(p), q)))
    assert equivalent(Iff(p, q), AndAll((Implies(p, q), Implies(q, p))))
    assert not equivalent(Implies(p, q), Implies(q, p))
