"""Set families, finite probability spaces, Dynkin spaces and extensions."""

import random
from fractions import Fraction as F

import pytest
from helpers import rand_space

from indlogic.events import Event
from indlogic.measure import (DynkinSpace, FiniteProbSpace, InfeasibleExtension, NotMeasurable, OutOfRange,
                              SetFamily, atoms_of, boolean_measure_iso, check_dynkin_space, completion,
                              extend_with_set, extension_range, generate_dynkin, generate_sigma, inner_outer,
                              restrict, subsets_of)


def test_atoms_partition_the_universe():
    rng = random.Random(1)
    for _ in range(100):
        n = rng.randint(1, 7)
        fam = [rng.randrange(1 << n) for _ in range(rng.randint(0, 3))]
        atoms = atoms_of(n, fam)
        assert sum(atoms) == (1 << n) - 1 and all(a & b == 0 for a in atoms for b in atoms if a != b)
        # every generator is a union of atoms
        for s in fam:
            assert all(a & s in (0, a) for a in atoms)
        sigma = generate_sigma(n, fam)
        assert sigma.is_sigma_algebra() and len(sigma) == 2 ** len(atoms)
        dyn = generate_dynkin(n, fam)
        assert dyn.is_dynkin() and dyn.members <= sigma.members
        assert all(s in dyn for s in fam)


def test_dynkin_system_that_is_not_sigma():
    dyn = generate_dynkin(4, [0b0011, 0b0110])
    assert dyn.members == {0, 0b1111, 0b0011, 0b1100, 0b0110, 0b1001}
    assert dyn.is_dynkin() and not dyn.is_pi_system() and not dyn.is_sigma_algebra()
    assert not SetFamily.of(2, [0b01]).is_dynkin()
    with pytest.raises(ValueError):
        SetFamily.of(2, [0b100])


def test_space_validation_and_measure():
    with pytest.raises(ValueError):
        FiniteProbSpace(("a", "b"), (0b01, 0b11), (F(1, 2), F(1, 2)))      # overlapping atoms
    with pytest.raises(ValueError):
        FiniteProbSpace(("a", "b"), (0b01,), (F(1),))                      # not covering
    with pytest.raises(ValueError):
        FiniteProbSpace.from_masses([F(1, 2), F(1, 3)])                    # sum ≠ 1
    with pytest.raises(ValueError):
        FiniteProbSpace.from_masses([F(3, 2), F(-1, 2)])
    s = FiniteProbSpace(("a", "b", "c"), (0b011, 0b100), ("1/3", "2/3"))
    assert s.mu(0b011) == F(1, 3) and s.mu(Event(3, 0b111)) == 1 and s.mu(0) == 0
    assert s.measurable(0b100) and not s.measurable(0b001)
    with pytest.raises(NotMeasurable):
        s.mu(0b001)
    assert s.point_masses() is None
    assert FiniteProbSpace.uniform(4).point_masses() == [F(1, 4)] * 4


def test_from_family_checks_sigma_and_additivity():
    fam = [0, 0b0011, 0b1100, 0b1111]
    s = FiniteProbSpace.from_family("abcd", fam, {0: 0, 0b0011: F(1, 4), 0b1100: F(3, 4), 0b1111: 1})
    assert s.atoms == (0b0011, 0b1100)
    with pytest.raises(ValueError):
        FiniteProbSpace.from_family("abcd", [0, 0b0011, 0b1111], {0: 0, 0b0011: 1, 0b1111: 1})
    with pytest.raises(ValueError):
        FiniteProbSpace.from_family("abcd", fam, {0: 0, 0b0011: F(1, 4), 0b1100: F(1, 4), 0b1111: 1})


def test_completion_adds_null_subsets_and_preserves_measure_algebra():
    rng = random.Random(2)
    for _ in range(60):
        s = rand_space(rng, rng.randint(1, 6))
        c = completion(s)
        assert s.sigma.members <= c.sigma.members
        assert all(c.mu(a) == s.mu(a) for a in s.sigma)
        null = s.null_mask()
        assert all(c.measurable(x) and c.mu(x) == 0 for x in subsets_of(null))
        assert boolean_measure_iso(s, c) and completion(c) == c


def test_inner_outer_match_brute_force():
    rng = random.Random(3)
    for _ in range(80):
        n = rng.randint(1, 6)
        s = rand_space(rng, n)
        a = rng.randrange(1 << n)
        inner = max(s.mu(m) for m in s.sigma if m & ~a == 0)
        outer = min(s.mu(m) for m in s.sigma if a & ~m == 0)
        assert inner_outer(s, a) == (inner, outer)
        # the additive extensions realize exactly the inner/outer interval
        assert extension_range(s, a) == (inner, outer)


def test_extend_with_set():
    rng = random.Random(4)
    for _ in range(60):
        n = rng.randint(1, 6)
        s = rand_space(rng, n)
        a = rng.randrange(1 << n)
        lo, hi = extension_range(s, a)
        for alpha in {lo, hi, (lo + hi) / 2}:
            t = extend_with_set(s, a, alpha)
            assert t.mu(a) == alpha
            assert all(t.mu(m) == s.mu(m) for m in s.sigma)
        if hi < 1:
            with pytest.raises(OutOfRange):
                extend_with_set(s, a, (hi + 1) / 2)


def test_extension_from_partial_values():
    d = DynkinSpace(2, SetFamily.of(2, [0b01, 0b11]), {0b01: 1, 0b11: F(1, 2)})
    with pytest.raises(InfeasibleExtension):
        extension_range(d, 0b10)
    d = DynkinSpace(4, generate_dynkin(4, [0b0011, 0b0110]),
                    {0: 0, 0b1111: 1, 0b0011: F(1, 2), 0b1100: F(1, 2), 0b0110: F(1, 2), 0b1001: F(1, 2)})
    assert check_dynkin_space(d) == []
    assert extension_range(d, 0b0001) == (0, F(1, 2))
    assert inner_outer(d, 0b0111) == (F(1, 2), 1)


def test_dynkin_space_violations():
    rng = random.Random(5)
    for _ in range(40):
        n = rng.randint(2, 5)
        s = rand_space(rng, n)
        fam = generate_dynkin(n, [rng.randrange(1 << n) for _ in range(2)])
        fam = SetFamily(n, fam.members & s.sigma.members | {0, (1 << n) - 1})
        fam = generate_dynkin(n, fam.members)
        d = restrict(s, fam)
        assert check_dynkin_space(d) == []
    omega = 0b111
    bad = DynkinSpace(3, SetFamily.of(3, [0, omega, 0b001, 0b110]), {0: 0, omega: 1, 0b001: F(1, 3), 0b110: F(1, 3)})
    assert [v.clause for v in check_dynkin_space(bad)] == ["(ii)", "(ii)"]   # Ω∖{0} and Ω∖{1,2}
    missing = DynkinSpace(3, SetFamily.of(3, [0, omega, 0b001]), {0: 0, omega: 1, 0b001: F(1, 3)})
    assert any(v.clause == "(ii)" for v in check_dynkin_space(missing))
    no_top = DynkinSpace(3, SetFamily.of(3, [0]), {0: 0, 0b1: 2})
    clauses = {v.clause for v in check_dynkin_space(no_top)}
    assert {"(i)", "domain", "range"} <= clauses
