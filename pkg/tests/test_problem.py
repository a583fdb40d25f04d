"""The problem-file language."""

from fractions import Fraction as F

import pytest

from indlogic.formula import AndAll, Not, Or, Var
from indlogic.inductive import Forced, derive
from indlogic.parser import ParseError, UndeclaredError
from indlogic.problem import parse_problem
from indlogic.registry import EXAMPLES, load_example


def test_propositional_items():
    pr = parse_problem("""
        # comment line
        name "demo";
        vars a, b, c;
        axiom a | b;
        assume P(a) = 1/3;
        assume P(b | a, ~c) = 0.25;
        query P((a | c) | b);
        query P(a & b);
    """)
    assert pr.name == "demo" and pr.pv == ("a", "b", "c") and not pr.first_order
    assert pr.root == [Or((Var("a"), Var("b")))]
    assert [(x.consequent, x.extras, x.prob) for x in pr.assumptions] == [
        (Var("a"), (), F(1, 3)), (Var("b"), (Var("a"), Not(Var("c"))), F(1, 4))]
    assert pr.queries[0].consequent == Or((Var("a"), Var("c"))) and pr.queries[0].extras == (Var("b"),)
    assert pr.queries[1].text() == "P((a & b) | T0)"
    assert pr.statements()[1].antecedent.root == (Or((Var("a"), Var("b"))),)


def test_loops_expand_in_order():
    pr = parse_problem("""
        vars h{i} for i in 1..3;
        assume P(h{i} | h{j}) = 1/2 for i in 1..2 for j in 2..3;
        condition independence [h1] [h2, h3];
    """)
    assert pr.pv == ("h1", "h2", "h3")
    got = [(x.consequent.name, x.extras[0].name) for x in pr.assumptions]
    assert got == [("h1", "h2"), ("h1", "h3"), ("h2", "h2"), ("h2", "h3")]
    assert pr.blocks() == [("h1",), ("h2", "h3")]


def test_model_block_gives_a_space():
    pr = parse_problem("vars a, b; model { 1/4 : {a, b}; 3/4 : {}; }")
    space = pr.prob_space()
    assert space.point_masses() == [F(3, 4), 0, 0, F(1, 4)]
    with pytest.raises(ParseError):
        parse_problem("vars a; model { 1/2 : {a}; }")


def test_first_order_items():
    pr = parse_problem("""
        signature { const a, b; rel S/1; func f/1; }
        axiom a != b;
        condition indifference { bound 3; }
        condition independence [S(a), S(b)] given a != b;
        query P(S(f(a)) | S(a));
        model { 1 : structure { domain 2; a = 0; b = 1; S = {0}; f = {0 -> 1, 1 -> 0}; }; }
    """)
    assert pr.first_order and pr.bound == 3
    pp = pr.poi_problem()
    assert pp.bound == 3 and len(pp.independence) == 1 and len(pp.independence[0].members) == 2
    assert pr.fin_model().structures[0].value("f") == (1, 0)


@pytest.mark.parametrize("text, cls", [
    ("vars a; assume P(b) = 1/2;", UndeclaredError),
    ("vars a, a;", ParseError),
    ("vars a; assume P(a) = 3/2;", ParseError),
    ("vars a; assume P(a) = 1/0;", ParseError),
    ("vars a; query P(a)", ParseError),
    ("vars a; frobnicate a;", ParseError),
    ("axiom a;", ParseError),
    ("name \"x\";", ParseError),
    ("vars a; signature { const c; }", ParseError),
    ("vars a; condition indifference { bound 2; }", ParseError),
    ("vars a, b; condition independence [a] [b] given a;", ParseError),
    ("signature { rel S/1; } condition independence [S(x)];", ParseError),
    ("vars a; assume P(a) = 1/2 for i in 1..2 for i in 1..2;", ParseError),
])
def test_errors(text, cls):
    with pytest.raises(cls):
        parse_problem(text)


def test_error_positions():
    with pytest.raises(ParseError) as e:
        parse_problem("vars a;\nassume P(a) = 2;\n")
    assert e.value.line == 2


def test_incomplete_blocks_are_rejected():
    pr = parse_problem("vars a, b, c; condition independence [a] [b];")
    with pytest.raises(ValueError):
        pr.blocks()


def test_every_shipped_problem_parses():
    for ex in [e for e in EXAMPLES if e.file is not None]:
        pr = load_example(ex.name)
        assert pr.pv is not None or pr.signature is not None


def test_parsed_problem_drives_derivation():
    pr = parse_problem("vars a, b; assume P(a) = 1/2; assume P(b | a) = 1/2; query P(a & b);")
    q = pr.queries[0]
    res = derive(pr.statements(), pr.root, pr.antecedent(q), q.consequent, pr.atom_space())
    assert isinstance(res, Forced) and res.value == F(1, 4)
    assert q.consequent == AndAll((Var("a"), Var("b")))
