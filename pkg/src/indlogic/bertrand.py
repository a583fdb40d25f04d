"""Bertrand's chord problem: exact answers, Monte Carlo, and rotation invariance.

A chord of the unit circle is longer than the side of the inscribed
equilateral triangle (length ``√3``) exactly when its midpoint lies at
distance less than ``1/2`` from the centre: a chord whose midpoint is at
distance ``r`` has squared length ``4(1 − r²)``.  Every verdict here compares
squared lengths against ``3`` so that no square root is taken.

Three classical ways of drawing "a random chord" give three different
probabilities.  The exact values are derived from each scheme's radial
midpoint distribution ``F(r) = P(midpoint distance ≤ r)``:

* ``ENDPOINTS``: two independent uniform endpoints.  The half-gap ``h`` is
  uniform on ``[0, π]`` and the midpoint distance is ``|cos h|``, so
  ``F(r) = 1 − 2·acos(r)/π``.
* ``RADIUS``: uniform direction and uniform distance along the radius, so
  ``F(r) = r``.
* ``MIDPOINT``: uniform midpoint in the disk, so ``F(r) = r²``.

Values of ``acos(r)/π`` are kept symbolic (:class:`PiLinear`); for rational
``r`` they are rational only at ``r ∈ {0, ±1/2, ±1}`` (Niven's theorem), which
is all the exact answers need.

Monte Carlo sampling uses SplitMix64, a counter-based 64-bit generator:
the ``i``-th raw output for seed ``s`` is ``mix(s + (i + 1)·γ mod 2⁶⁴)`` with
``γ = 0x9E3779B97F4A7C15`` and

    z ← (z ⊕ (z ≫ 30))·0xBF58476D1CE4E5B9
    z ← (z ⊕ (z ≫ 27))·0x94D049BB133111EB
    mix(z) = z ⊕ (z ≫ 31)

(all mod 2⁶⁴).  A uniform double is ``(mix ≫ 11)·2⁻⁵³``.  Chunk ``c`` of a
run uses the seed ``mix(seed + (c + 1)·γ)``, so results depend only on the
master seed, the sample count and the chunk size, never on scheduling.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

ZERO, ONE = Fraction(0), Fraction(1)
SIDE_SQ = Fraction(3)                 # squared side of the inscribed equilateral triangle


class ChordScheme(enum.Enum):
    ENDPOINTS = "endpoints"
    RADIUS = "radius"
    MIDPOINT = "midpoint"


class DegenerateChord(ValueError):
    """The chord has zero length (its midpoint is on the circle)."""


# -- exact arithmetic with acos(r)/π -------------------------------------

# acos(r)/π for the rationals where it is rational (Niven's theorem).
_ACOS_OVER_PI = {ONE: ZERO, Fraction(1, 2): Fraction(1, 3), ZERO: Fraction(1, 2),
                 Fraction(-1, 2): Fraction(2, 3), -ONE: ONE}


@dataclass(frozen=True)
class PiLinear:
    """An exact number ``const + Σ coef·acos(r)/π`` with rational ``r`` and coefficients.

    Terms whose ``acos(r)/π`` is rational are folded into ``const``; the
    remaining ``acos(r)/π`` are irrational, and equality is decided on the
    normalized form.  This suffices for the identities checked here, where
    the same transcendental terms appear on both sides.
    """

    const: Fraction = ZERO
    terms: tuple = ()                 # sorted ((r, coef), ...) with coef ≠ 0

    @staticmethod
    def of(x) -> "PiLinear":
        return x if isinstance(x, PiLinear) else PiLinear(Fraction(x))

    @staticmethod
    def acos_over_pi(r) -> "PiLinear":
        r = Fraction(r)
        if not -1 <= r <= 1:
            raise ValueError(f"acos undefined at {r}")
        if r in _ACOS_OVER_PI:
            return PiLinear(_ACOS_OVER_PI[r])
        return PiLinear(ZERO, ((r, ONE),))

    def _combine(self, other: "PiLinear", sign: int) -> "PiLinear":
        other = PiLinear.of(other)
        acc = dict(self.terms)
        for r, c in other.terms:
            acc[r] = acc.get(r, ZERO) + sign * c
        return PiLinear(self.const + sign * other.const,
                        tuple(sorted((r, c) for r, c in acc.items() if c)))

    def __add__(self, other):
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, -1)

    def __rsub__(self, other):
        return PiLinear.of(other)._combine(self, -1)

    def __neg__(self):
        return PiLinear(-self.const, tuple((r, -c) for r, c in self.terms))

    def __mul__(self, k):
        k = Fraction(k)
        if not k:
            return PiLinear()
        return PiLinear(self.const * k, tuple((r, c * k) for r, c in self.terms))

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self * (ONE / Fraction(k))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PiLinear(Fraction(other))
        if not isinstance(other, PiLinear):
            return NotImplemented
        return self.const == other.const and self.terms == other.terms

    def __hash__(self):
        return hash((self.const, self.terms))

    @property
    def is_rational(self) -> bool:
        return not self.terms

    def rational(self) -> Fraction:
        if self.terms:
            raise ValueError(f"{self} is not rational")
        return self.const

    def __float__(self) -> float:
        return float(self.const) + sum(float(c) * math.acos(float(r)) / math.pi for r, c in self.terms)

    def __str__(self) -> str:
        out = str(self.const) if self.const or not self.terms else ""
        for r, c in self.terms:
            sign = "-" if c < 0 else "+"
            out += f" {sign} " if out else ("-" if c < 0 else "")
            out += f"{abs(c)}·acos({r})/π"
        return out


def _sqrt_rational(q: Fraction) -> Fraction:
    """The exact square root of a rational square."""
    n, d = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if n * n != q.numerator or d * d != q.denominator:
        raise ValueError(f"{q} is not a rational square")
    return Fraction(n, d)


def cutoff_radius() -> Fraction:
    """The midpoint distance at which a chord's length equals the triangle side.

    From ``4(1 − r²) = 3``.
    """
    return _sqrt_rational(ONE - SIDE_SQ / 4)


# -- chords ----------------------------------------------------------------

def circle_point(t) -> tuple[Fraction, Fraction]:
    """A rational point of the unit circle: ``((1 − t²)/(1 + t²), 2t/(1 + t²))``."""
    t = Fraction(t)
    d = 1 + t * t
    return ((1 - t * t) / d, 2 * t / d)


@dataclass(frozen=True)
class Chord:
    """A chord of the unit circle, given by its midpoint ``(mx, my)``.

    The midpoint determines the chord except at the centre, where any
    diameter will do; lengths depend only on the midpoint distance.
    """

    mx: Fraction
    my: Fraction
    length_sq_value: Fraction | None = None    # from the endpoints, when known

    @staticmethod
    def from_midpoint(mx, my) -> "Chord":
        c = Chord(Fraction(mx), Fraction(my))
        c._validate()
        return c

    @staticmethod
    def from_endpoints(p: Sequence, q: Sequence) -> "Chord":
        p = tuple(Fraction(v) for v in p)
        q = tuple(Fraction(v) for v in q)
        for pt in (p, q):
            if pt[0] ** 2 + pt[1] ** 2 != 1:
                raise ValueError(f"{pt} is not on the unit circle")
        c = Chord((p[0] + q[0]) / 2, (p[1] + q[1]) / 2, (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2)
        c._validate()
        return c

    def _validate(self) -> None:
        r2 = self.radius_sq
        if r2 > 1:
            raise ValueError("midpoint outside the unit disk")
        if r2 == 1:
            raise DegenerateChord("zero-length chord")

    @property
    def radius_sq(self) -> Fraction:
        """Squared distance of the midpoint from the centre."""
        return self.mx ** 2 + self.my ** 2

    @property
    def length_sq(self) -> Fraction:
        if self.length_sq_value is not None:
            return self.length_sq_value
        return 4 * (1 - self.radius_sq)


def longer_than_side(chord: Chord) -> bool:
    """Whether the chord is strictly longer than the inscribed triangle's side.

    Decided on the midpoint: ``r < 1/2``, compared as ``r² < 1/4``.
    """
    if chord.radius_sq >= 1:
        raise DegenerateChord("zero-length chord")
    return chord.radius_sq < cutoff_radius() ** 2


# -- exact answers ---------------------------------------------------------

def radial_cdf(scheme: ChordScheme) -> Callable[[Fraction], PiLinear]:
    """``r ↦ P(midpoint distance ≤ r)`` for the scheme, exactly, on ``[0, 1]``."""
    if scheme is ChordScheme.ENDPOINTS:
        return lambda r: 1 - 2 * PiLinear.acos_over_pi(r)
    if scheme is ChordScheme.RADIUS:
        return lambda r: PiLinear(Fraction(r))
    if scheme is ChordScheme.MIDPOINT:
        return lambda r: PiLinear(Fraction(r) ** 2)
    raise ValueError(scheme)


def bertrand_exact(scheme: ChordScheme) -> Fraction:
    """``P(chord longer than the side)`` under the scheme, via the midpoint criterion."""
    return radial_cdf(scheme)(cutoff_radius()).rational()


def endpoints_by_gap() -> Fraction:
    """The endpoints answer from the angular gap ``θ`` between the endpoints.

    The chord has squared length ``2 − 2cos θ``, which exceeds ``3`` iff
    ``cos θ < −1/2``, i.e. ``θ ∈ (acos(−1/2), 2π − acos(−1/2))``; ``θ`` is
    uniform on ``[0, 2π)``.
    """
    threshold = (2 - SIDE_SQ) / 2           # cos θ below this
    a = PiLinear.acos_over_pi(threshold)    # in units of π
    return ((2 - 2 * a) / 2).rational()


# -- Monte Carlo -------------------------------------------------------------

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def splitmix64(seed: int, count: int, start: int = 0) -> np.ndarray:
    """Raw outputs ``start .. start + count − 1`` of the SplitMix64 stream for ``seed``."""
    counters = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & _MASK64) + counters * _GAMMA
        return _mix(z)


def uniforms(seed: int, count: int, start: int = 0) -> np.ndarray:
    """Uniform doubles in ``[0, 1)`` from the SplitMix64 stream."""
    return (splitmix64(seed, count, start) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def chunk_seed(seed: int, chunk: int) -> int:
    return int(splitmix64(seed, 1, chunk)[0])


def _chunk_hits(scheme: ChordScheme, seed: int, n: int) -> int:
    u = uniforms(seed, 2 * n)
    a, b = u[:n], u[n:]
    if scheme is ChordScheme.ENDPOINTS:
        len_sq = 2.0 - 2.0 * np.cos(2.0 * np.pi * (a - b))
    elif scheme is ChordScheme.RADIUS:
        d = b
        len_sq = 4.0 * (1.0 - d * d)
    else:
        rho, phi = np.sqrt(b), 2.0 * np.pi * a
        x, y = rho * np.cos(phi), rho * np.sin(phi)
        len_sq = 4.0 * (1.0 - (x * x + y * y))
    return int(np.count_nonzero(len_sq > float(SIDE_SQ)))


@dataclass(frozen=True)
class McEstimate:
    scheme: ChordScheme
    samples: int
    hits: int
    seed: int

    @property
    def estimate(self) -> Fraction:
        return Fraction(self.hits, self.samples)

    def sigma(self, p) -> float:
        """Binomial standard error ``√(p(1 − p)/n)`` around a reference value ``p``."""
        p = float(p)
        return math.sqrt(p * (1 - p) / self.samples)


def bertrand_mc(scheme: ChordScheme, n: int, seed: int, chunk: int = 1 << 18,
                workers: int = 1) -> McEstimate:
    """Estimate the probability by sampling ``n`` chords; reproducible from ``seed``."""
    if n < 1:
        raise ValueError("need at least one sample")
    sizes = [min(chunk, n - s) for s in range(0, n, chunk)]
    jobs = [(scheme, chunk_seed(seed, c), m) for c, m in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(workers) as ex:
            hits = list(ex.map(lambda j: _chunk_hits(*j), jobs))
    else:
        hits = [_chunk_hits(*j) for j in jobs]
    return McEstimate(scheme, n, sum(hits), seed)


# -- rotation invariance -----------------------------------------------------

@dataclass(frozen=True)
class InvarianceReport:
    """Cell masses of a discretized midpoint distribution and the rotation check.

    ``cells[i][j]`` is the mass of angular sector ``i`` and radial shell ``j``
    (shell ``j`` spans radii ``[j/k, (j+1)/k]``).
    """

    label: str
    k: int
    cells: tuple
    passed: bool
    failing_rotations: tuple
    p: PiLinear                     # P(midpoint distance < 1/2) = F(1/2)
    p_from_shells: PiLinear | None  # mass of the shells inside radius 1/2 (k even)

    @property
    def total(self) -> PiLinear:
        return sum((m for row in self.cells for m in row), PiLinear())


def rotation_invariance_check(scheme: ChordScheme | None = None, k: int = 8,
                              cdf: Callable[[Fraction], object] | None = None,
                              sectors: Sequence | None = None) -> InvarianceReport:
    """Check that the midpoint distribution is invariant under rotations by ``2π/k``.

    The distribution is the scheme's radial law (or a user-supplied radial
    CDF ``cdf`` on ``[0, 1]``) combined with an angular law: uniform, or the
    given ``sectors`` weights (which should sum to 1).  Every rotation
    ``s·2π/k`` must map each cell's mass onto the mass of its image cell.
    """
    if k < 2:
        raise ValueError("need k ≥ 2")
    if (scheme is None) == (cdf is None):
        raise ValueError("give exactly one of scheme and cdf")
    F = radial_cdf(scheme) if scheme is not None else (lambda r: PiLinear.of(cdf(Fraction(r))))
    ang = [Fraction(1, k)] * k if sectors is None else [Fraction(w) for w in sectors]
    if len(ang) != k:
        raise ValueError("need one weight per sector")
    shells = [F(Fraction(j + 1, k)) - F(Fraction(j, k)) for j in range(k)]
    cells = tuple(tuple(shell * w for shell in shells) for w in ang)
    failing = tuple(s for s in range(1, k)
                    if any(cells[(i + s) % k][j] != cells[i][j] for i in range(k) for j in range(k)))
    half = cutoff_radius()
    p = F(half)
    inside = None
    if (half * k).denominator == 1:
        inside = sum((m for row in cells for m in row[: int(half * k)]), PiLinear())
    label = scheme.value if scheme is not None else "custom"
    return InvarianceReport(label, k, cells, not failing, failing, p, inside)


def density_for(p) -> Callable[[Fraction], Fraction]:
    """A radial CDF giving ``P(midpoint distance < 1/2) = p``.

    Mass ``p`` spread uniformly over radii ``[0, 1/2]`` and ``1 − p`` over
    ``[1/2, 1]``; combined with a uniform angle it is rotation invariant.
    """
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")

    def F(r: Fraction) -> Fraction:
        r = Fraction(r)
        return p * min(ONE, 2 * r) + (1 - p) * max(ZERO, 2 * r - 1)

    return F
