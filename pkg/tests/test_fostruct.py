"""Finite structures: evaluation, relabeling, isomorphism and symbol permutations."""

import itertools
import random
from fractions import Fraction as F

import pytest

from indlogic.formula import FinSignature, SignaturePermutation, all_permutations, permute
from indlogic.fostruct import (FinModel, FinStructure, canonical_key, class_masses, conditional_prob,
                               count_structures, enumerate_structures, eval_sentence, model_iso,
                               pi_image_model, pi_image_structure, relabel, structure_iso)
from indlogic.parser import parse_sentence

SIG = FinSignature.build(constants=["a", "b"], relations={"S": 1, "T": 1, "L": 2})
FSIG = FinSignature.build(constants=["a"], functions={"f": 1})

SENTENCES = [
    "S(a)", "S(a) & ~T(b)", "a = b", "exists x. S(x) & T(x)", "forall x. S(x) -> exists y. L(x, y)",
    "exists =2 x. S(x)", "exists =1 x. L(x, x)", "forall x. forall y. L(x, y) <-> L(y, x)",
    "exists x. (x != a & x != b)",
]


def _random_structure(rng, sig, n):
    interp = {}
    for sym in sig.symbols:
        if sym.kind == "constant":
            interp[sym.name] = rng.randrange(n)
        elif sym.kind == "relation":
            tuples = list(itertools.product(range(n), repeat=sym.arity))
            interp[sym.name] = [t for t in tuples if rng.random() < 0.4]
        else:
            interp[sym.name] = [rng.randrange(n) for _ in range(n ** sym.arity)]
    return FinStructure.build(sig, n, interp)


def test_semantics_of_sample_sentences():
    rng = random.Random(30)
    phis = [parse_sentence(s, SIG) for s in SENTENCES]
    for _ in range(150):
        n = rng.randint(1, 4)
        w = _random_structure(rng, SIG, n)
        S, T, L = w.value("S"), w.value("T"), w.value("L")
        a, b = w.value("a"), w.value("b")
        expected = [
            (a,) in S, (a,) in S and (b,) not in T, a == b,
            any((x,) in S and (x,) in T for x in range(n)),
            all((x,) not in S or any((x, y) in L for y in range(n)) for x in range(n)),
            len(S) == 2, sum((x, x) in L for x in range(n)) == 1,
            all(((x, y) in L) == ((y, x) in L) for x in range(n) for y in range(n)),
            any(x not in (a, b) for x in range(n)),
        ]
        assert [eval_sentence(w, p) for p in phis] == expected


def test_function_terms():
    phi = parse_sentence("f(f(a)) = a", FSIG)
    for w in enumerate_structures(FSIG, 3):
        f, a = w.value("f"), w.value("a")
        assert eval_sentence(w, phi) == (f[f[a]] == a)


def test_relabeling_preserves_truth_and_canonical_key():
    rng = random.Random(31)
    phis = [parse_sentence(s, SIG) for s in SENTENCES]
    for _ in range(60):
        n = rng.randint(1, 4)
        w = _random_structure(rng, SIG, n)
        g = list(range(n))
        rng.shuffle(g)
        v = relabel(w, g)
        assert [eval_sentence(w, p) for p in phis] == [eval_sentence(v, p) for p in phis]
        assert canonical_key(v) == canonical_key(w)
        f = structure_iso(w, v)
        assert f is not None and relabel(w, f) == v


def test_canonical_key_decides_isomorphism():
    sig = FinSignature.build(constants=["a"], relations={"S": 1, "L": 2})
    structs = list(enumerate_structures(sig, 2))
    assert len(structs) == count_structures(sig, 2) == 2 * 4 * 16
    for w, v in itertools.combinations(structs[:80], 2):
        assert (canonical_key(w) == canonical_key(v)) == (structure_iso(w, v) is not None)
    # one unary relation on three elements: isomorphism classes are the sizes of S
    unary = FinSignature.build(relations={"S": 1})
    assert len({canonical_key(w) for w in enumerate_structures(unary, 3)}) == 4


def test_symbol_permutation_transports_truth():
    rng = random.Random(32)
    perms = all_permutations(SIG)
    phis = [parse_sentence(s, SIG) for s in SENTENCES]
    for _ in range(60):
        w = _random_structure(rng, SIG, rng.randint(1, 3))
        pi = rng.choice(perms)
        wp = pi_image_structure(w, pi)
        assert all(eval_sentence(wp, permute(p, pi)) == eval_sentence(w, p) for p in phis)


def test_structure_validation():
    with pytest.raises(ValueError):
        FinStructure.build(FSIG, 2, {"a": 0, "f": {0: 1}})             # partial function
    with pytest.raises(ValueError):
        FinStructure.build(SIG, 2, {"a": 0, "b": 5, "S": [], "T": [], "L": []})
    with pytest.raises(ValueError):
        FinStructure.build(SIG, 2, {"a": 0, "b": 1, "S": [], "T": []})
    with pytest.raises(ValueError):
        FinStructure(SIG, 0, ())


def test_models_conditionals_and_isomorphism():
    sig = FinSignature.build(constants=["a", "b"], relations={"S": 1})
    w1 = FinStructure.build(sig, 2, {"a": 0, "b": 1, "S": [0]})
    w2 = FinStructure.build(sig, 2, {"a": 0, "b": 1, "S": [1]})
    w3 = FinStructure.build(sig, 1, {"a": 0, "b": 0, "S": [0]})
    m = FinModel(((w1, F(1, 4)), (w2, F(1, 4)), (w3, F(1, 2))))
    Sa, Sb = parse_sentence("S(a)", sig), parse_sentence("S(b)", sig)
    assert conditional_prob(m, [], Sa) == F(3, 4)
    assert conditional_prob(m, [Sb], Sa) == F(2, 3)
    assert conditional_prob(m, [parse_sentence("a = b & ~S(a)", sig)], Sa) is None
    pi = SignaturePermutation.from_cycles(sig, "(a b)")
    assert model_iso(m, pi_image_model(m, pi))
    lopsided = FinModel(((w1, F(3, 4)), (w2, F(1, 4))))
    assert not model_iso(lopsided, pi_image_model(lopsided, pi))
    assert sorted(class_masses(lopsided).values()) == [F(1, 4), F(3, 4)]
    with pytest.raises(ValueError):
        FinModel(((w1, F(1, 2)),))
    with pytest.raises(ValueError):
        FinModel(())
