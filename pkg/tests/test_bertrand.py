"""Chord problem: exact answers, the generator, Monte Carlo and rotation checks."""

import math
from fractions import Fraction as F

import numpy as np
import pytest

from indlogic.bertrand import (Chord, ChordScheme, DegenerateChord, PiLinear, bertrand_exact, bertrand_mc,
                               circle_point, cutoff_radius, density_for, endpoints_by_gap, longer_than_side,
                               radial_cdf, rotation_invariance_check, splitmix64, uniforms)

MASK = (1 << 64) - 1


def _splitmix_ref(seed, count):
    """Scalar reference implementation on Python integers."""
    out, state = [], seed & MASK
    for _ in range(count):
        state = (state + 0x9E3779B97F4A7C15) & MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        out.append(z ^ (z >> 31))
    return out


def test_splitmix64_known_vectors():
    assert [int(x) for x in splitmix64(0, 3)] == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]
    for seed in (1, 12345, 2 ** 63 + 7):
        assert [int(x) for x in splitmix64(seed, 20)] == _splitmix_ref(seed, 20)
    # streams can be resumed at any offset
    assert [int(x) for x in splitmix64(9, 5, start=3)] == _splitmix_ref(9, 8)[3:]
    u = uniforms(3, 1000)
    assert u.dtype == np.float64 and u.min() >= 0 and u.max() < 1


def test_monte_carlo_is_deterministic_across_chunking_and_threads():
    for scheme in ChordScheme:
        a = bertrand_mc(scheme, 50_000, seed=7, chunk=1 << 12)
        b = bertrand_mc(scheme, 50_000, seed=7, chunk=1 << 12, workers=4)
        assert a.hits == b.hits
        assert bertrand_mc(scheme, 50_000, seed=8, chunk=1 << 12).hits != a.hits
    with pytest.raises(ValueError):
        bertrand_mc(ChordScheme.RADIUS, 0, seed=0)


def test_exact_answers_and_cutoff():
    assert cutoff_radius() == F(1, 2)
    assert {s: bertrand_exact(s) for s in ChordScheme} == {
        ChordScheme.ENDPOINTS: F(1, 3), ChordScheme.RADIUS: F(1, 2), ChordScheme.MIDPOINT: F(1, 4)}
    assert endpoints_by_gap() == F(1, 3)
    for scheme in ChordScheme:
        cdf = radial_cdf(scheme)
        assert cdf(F(0)) == 0 and cdf(F(1)) == 1


def test_pi_linear_arithmetic():
    x = PiLinear.acos_over_pi(F(1, 3))
    assert not x.is_rational and (x - x) == 0 and (x + 1 - x).rational() == 1
    assert PiLinear.acos_over_pi(F(-1, 2)) == F(2, 3)
    assert math.isclose(float(2 * x), 2 * math.acos(1 / 3) / math.pi)
    assert str(1 - 2 * x) == "1 - 2·acos(1/3)/π"
    with pytest.raises(ValueError):
        x.rational()
    with pytest.raises(ValueError):
        PiLinear.acos_over_pi(2)


def test_chords():
    # a midpoint at distance exactly 1/2 gives the triangle side, squared length 3
    assert Chord.from_midpoint(F(3, 10), F(2, 5)).length_sq == 3
    p, q = circle_point(F(1, 2)), circle_point(F(-1, 2))
    c = Chord.from_endpoints(p, q)
    assert c.length_sq == 4 * (1 - c.radius_sq)
    assert longer_than_side(Chord.from_midpoint(0, F(1, 3)))
    assert not longer_than_side(Chord.from_midpoint(F(3, 10), F(2, 5)))   # r = 1/2 exactly
    with pytest.raises(DegenerateChord):
        Chord.from_midpoint(F(3, 5), F(4, 5))
    with pytest.raises(ValueError):
        Chord.from_midpoint(1, 1)
    with pytest.raises(ValueError):
        Chord.from_endpoints((1, 1), (1, 0))


def test_rotation_invariance_and_custom_densities():
    for scheme in ChordScheme:
        rep = rotation_invariance_check(scheme, k=6)
        assert rep.passed and rep.total == 1 and rep.p == bertrand_exact(scheme)
        assert rep.p_from_shells == rep.p
    for p in (F(0), F(1, 5), F(1)):
        rep = rotation_invariance_check(cdf=density_for(p), k=4)
        assert rep.passed and rep.p == p
    skew = rotation_invariance_check(ChordScheme.RADIUS, k=4, sectors=[F(1, 2), F(1, 6), F(1, 6), F(1, 6)])
    assert not skew.passed and skew.failing_rotations == (1, 2, 3)
    with pytest.raises(ValueError):
        rotation_invariance_check(k=4)
    with pytest.raises(ValueError):
        density_for(F(3, 2))
