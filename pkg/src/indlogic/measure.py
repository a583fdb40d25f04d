"""Exact finite measure theory over bit-vector events.

Outcomes are ``0..n-1`` and sets are integer bit masks (see
:mod:`indlogic.events`).  A :class:`FiniteProbSpace` stores its σ-algebra by
its atoms (the minimal nonempty members) together with their masses; a
:class:`DynkinSpace` stores an arbitrary family with explicit per-member
values, which is what domains of non-complete inductive theories look like.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .events import Event, full_mask, members


class NotMeasurable(ValueError):
    pass


class InfeasibleExtension(ValueError):
    """No finitely additive extension exists."""


class OutOfRange(ValueError):
    """A requested value lies outside the feasible interval."""


# ---------------------------------------------------------------------------
# Set families


@dataclass(frozen=True)
class SetFamily:
    """A deduplicated family of subsets of ``{0..size-1}``."""

    size: int
    members: frozenset

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        top = full_mask(self.size)
        for m in self.members:
            if m < 0 or m & ~top:
                raise ValueError("family member outside the universe")

    @classmethod
    def of(cls, size: int, sets: Iterable) -> "SetFamily":
        return cls(size, frozenset(s.bits if isinstance(s, Event) else s for s in sets))

    def __contains__(self, s) -> bool:
        return (s.bits if isinstance(s, Event) else s) in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))

    def events(self) -> list[Event]:
        return [Event(self.size, m) for m in sorted(self.members)]

    @property
    def full(self) -> int:
        return full_mask(self.size)

    def is_sigma_algebra(self) -> bool:
        f = self.members
        if self.full not in f:
            return False
        return all((self.full ^ a) in f for a in f) and all((a | b) in f for a in f for b in f)

    def is_pi_system(self) -> bool:
        return all((a & b) in self.members for a in self.members for b in self.members)

    def is_dynkin(self) -> bool:
        """Contains Ω and is closed under complement and disjoint union (finite λ-system)."""
        f = self.members
        if self.full not in f:
            return False
        if any((self.full ^ a) not in f for a in f):
            return False
        return all((a | b) in f for a in f for b in f if a & b == 0)


def atoms_of(size: int, family: Iterable[int]) -> list[int]:
    """Atoms of the σ-algebra generated by ``family`` (a partition of Ω)."""
    blocks = [full_mask(size)] if size else []
    for a in family:
        a = a.bits if isinstance(a, Event) else a
        nxt = []
        for b in blocks:
            for part in (b & a, b & ~a):
                if part:
                    nxt.append(part)
        blocks = nxt
    return sorted(blocks)


def unions(atoms: Sequence[int]) -> frozenset:
    out = [0]
    for a in atoms:
        out += [u | a for u in out]
    return frozenset(out)


def generate_sigma(size: int, family: Iterable) -> SetFamily:
    """Smallest σ-algebra containing ``family`` (finite: all unions of the generated atoms)."""
    return SetFamily(size, unions(atoms_of(size, family)))


def generate_dynkin(size: int, family: Iterable) -> SetFamily:
    """Smallest Dynkin system containing ``family``: close under complement and disjoint union."""
    top = full_mask(size)
    fam = {top, 0}
    fam |= {s.bits if isinstance(s, Event) else s for s in family}
    frontier = set(fam)
    while frontier:
        new = set()
        for a in frontier:
            c = top ^ a
            if c not in fam:
                new.add(c)
            for b in fam:
                if a & b == 0 and (a | b) not in fam:
                    new.add(a | b)
        fam |= new
        frontier = new
    return SetFamily(size, frozenset(fam))


# ---------------------------------------------------------------------------
# Probability spaces


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class FiniteProbSpace:
    """A probability space on a finite Ω, stored as a partition into atoms with masses.

    The σ-algebra is the set of all unions of atoms.  ``outcomes`` are labels
    only; outcome ``i`` is bit ``i`` of every event.
    """

    outcomes: tuple
    atoms: tuple
    masses: tuple

    def __post_init__(self):
        object.__setattr__(self, "outcomes", tuple(self.outcomes))
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "masses", tuple(_frac(m) for m in self.masses))
        n = len(self.outcomes)
        if len(self.atoms) != len(self.masses):
            raise ValueError("one mass per atom required")
        seen = 0
        for a in self.atoms:
            if a == 0 or a & seen or a & ~full_mask(n):
                raise ValueError("atoms must be nonempty, disjoint subsets of Ω")
            seen |= a
        if seen != full_mask(n):
            raise ValueError("atoms must cover Ω")
        if any(m < 0 for m in self.masses):
            raise ValueError("masses must be nonnegative")
        if sum(self.masses) != 1:
            raise ValueError(f"masses sum to {sum(self.masses)}, not 1")

    # -- constructors -------------------------------------------------------
    @classmethod
    def from_masses(cls, masses: Sequence, outcomes: Sequence | None = None) -> "FiniteProbSpace":
        """Full power set with the given point masses."""
        outcomes = tuple(outcomes) if outcomes is not None else tuple(f"w{i}" for i in range(len(masses)))
        return cls(outcomes, tuple(1 << i for i in range(len(masses))), tuple(masses))

    @classmethod
    def uniform(cls, n: int) -> "FiniteProbSpace":
        return cls.from_masses([Fraction(1, n)] * n)

    @classmethod
    def from_family(cls, outcomes: Sequence, family: Iterable, mu: Mapping) -> "FiniteProbSpace":
        """Build from an explicit σ-algebra and measure, validating both."""
        n = len(outcomes)
        fam = SetFamily.of(n, family)
        if not fam.is_sigma_algebra():
            raise ValueError("family is not a σ-algebra on Ω")
        mu = {(k.bits if isinstance(k, Event) else k): _frac(v) for k, v in mu.items()}
        if set(mu) != set(fam.members):
            raise ValueError("measure must be given on every member of the family")
        atoms = atoms_of(n, fam.members)
        space = cls(tuple(outcomes), tuple(atoms), tuple(mu[a] for a in atoms))
        for s, v in mu.items():
            if space.mu(s) != v:
                raise ValueError("measure is not additive over the atoms")
        return space

    # -- queries --------------------------------------------------------------
    @property
    def size(self) -> int:
        return len(self.outcomes)

    @property
    def full(self) -> int:
        return full_mask(self.size)

    @property
    def sigma(self) -> SetFamily:
        return SetFamily(self.size, unions(self.atoms))

    def measurable(self, s) -> bool:
        s = s.bits if isinstance(s, Event) else s
        return all(a & s in (0, a) for a in self.atoms)

    def mu(self, s) -> Fraction:
        s = s.bits if isinstance(s, Event) else s
        total = Fraction(0)
        for a, m in zip(self.atoms, self.masses):
            inter = a & s
            if inter == a:
                total += m
            elif inter:
                raise NotMeasurable(f"set {s:#x} is not measurable")
        return total

    def point_masses(self) -> list[Fraction] | None:
        """Masses of singletons when Σ is the power set, else ``None``."""
        if all(a & (a - 1) == 0 for a in self.atoms):
            out = [Fraction(0)] * self.size
            for a, m in zip(self.atoms, self.masses):
                out[a.bit_length() - 1] = m
            return out
        return None

    def null_mask(self) -> int:
        out = 0
        for a, m in zip(self.atoms, self.masses):
            if m == 0:
                out |= a
        return out

    def support(self) -> int:
        return self.full ^ self.null_mask()

    def to_json(self) -> dict:
        from .report import rat
        return {"outcomes": list(self.outcomes),
                "atoms": [Event(self.size, a).hex() for a in self.atoms],
                "masses": [rat(m) for m in self.masses]}


@dataclass(frozen=True)
class DynkinSpace:
    """A triple (Ω, Δ, ρ) with explicit values on each member of Δ."""

    size: int
    delta: SetFamily
    rho: Mapping = field(hash=False)

    def __post_init__(self):
        object.__setattr__(self, "rho", {(k.bits if isinstance(k, Event) else k): _frac(v)
                                         for k, v in dict(self.rho).items()})

    @property
    def full(self) -> int:
        return full_mask(self.size)


@dataclass(frozen=True)
class Violation:
    clause: str
    detail: str


def check_dynkin_space(d: DynkinSpace) -> list[Violation]:
    """All violations of the Dynkin-space clauses; empty when valid.

    Checked: ρ is defined exactly on Δ with values in [0, 1]; (i) Ω ∈ Δ with
    ρΩ = 1; (ii) for A ⊆ B in Δ, B∖A ∈ Δ and ρ(B∖A) = ρB − ρA.  Clause (iii),
    increasing unions, holds automatically on a finite Ω.
    """
    out = []
    fam = d.delta.members
    for s in fam:
        if s not in d.rho:
            out.append(Violation("domain", f"ρ undefined on {Event(d.size, s).hex()}"))
    for s, v in d.rho.items():
        if s not in fam:
            out.append(Violation("domain", f"ρ defined outside Δ at {Event(d.size, s).hex()}"))
        if not 0 <= v <= 1:
            out.append(Violation("range", f"ρ({Event(d.size, s).hex()}) = {v} outside [0,1]"))
    if d.full not in fam:
        out.append(Violation("(i)", "Ω is not in Δ"))
    elif d.rho.get(d.full) != 1:
        out.append(Violation("(i)", f"ρΩ = {d.rho.get(d.full)} instead of 1"))
    for a in fam:
        for b in fam:
            if a & ~b:
                continue
            diff = b & ~a
            if diff not in fam:
                out.append(Violation("(ii)", f"{Event(d.size, b).hex()}∖{Event(d.size, a).hex()} not in Δ"))
            elif a in d.rho and b in d.rho and diff in d.rho and d.rho[diff] != d.rho[b] - d.rho[a]:
                out.append(Violation("(ii)", f"ρ({Event(d.size, diff).hex()}) ≠ ρ({Event(d.size, b).hex()}) − "
                                             f"ρ({Event(d.size, a).hex()})"))
    return out


def restrict(space: FiniteProbSpace, family: Iterable) -> DynkinSpace:
    """Restrict a probability space's measure to a subfamily of its σ-algebra."""
    fam = SetFamily.of(space.size, family)
    return DynkinSpace(space.size, fam, {s: space.mu(s) for s in fam.members})


def inner_outer(space: FiniteProbSpace | DynkinSpace, a) -> tuple[Fraction, Fraction]:
    """Inner and outer measure of ``a`` relative to the space's family."""
    a = a.bits if isinstance(a, Event) else a
    if isinstance(space, FiniteProbSpace):
        lo = sum((m for at, m in zip(space.atoms, space.masses) if at & ~a == 0), Fraction(0))
        hi = sum((m for at, m in zip(space.atoms, space.masses) if at & a), Fraction(0))
        return lo, hi
    below = [v for s, v in space.rho.items() if s & ~a == 0]
    above = [v for s, v in space.rho.items() if a & ~s == 0]
    return max(below, default=Fraction(0)), min(above, default=Fraction(1))


def _extension_system(size: int, known: Mapping[int, Fraction], a: int):
    """Linear system for measures on the atoms of σ(known ∪ {a}) matching ``known``."""
    from .ratlp import LinearConstraintSystem
    atoms = atoms_of(size, list(known) + [a])
    rows = []
    for s, v in sorted(known.items()):
        rows.append(([Fraction(1) if at & ~s == 0 else Fraction(0) for at in atoms], v))
    target = [Fraction(1) if at & ~a == 0 else Fraction(0) for at in atoms]
    return atoms, LinearConstraintSystem(len(atoms), tuple(rows)), target


def extension_range(space: FiniteProbSpace | DynkinSpace, a) -> tuple[Fraction, Fraction]:
    """The interval of values ν(a) over all additive extensions ν; raises if none exists."""
    from .ratlp import Infeasible, optimize
    a = a.bits if isinstance(a, Event) else a
    known = _known_values(space)
    atoms, system, target = _extension_system(_size(space), known, a)
    try:
        res = optimize(target, system)
    except Infeasible:
        raise InfeasibleExtension("no finitely additive measure extends the given values") from None
    return res.min, res.max


def extend_with_set(space: FiniteProbSpace | DynkinSpace, a, alpha) -> FiniteProbSpace:
    """A probability space on σ(Σ ∪ {a}) agreeing with ``space`` and giving ``a`` mass ``alpha``.

    The new atoms' masses come from an exact linear-programming solve.  Raises
    :class:`InfeasibleExtension` if no additive extension exists at all, and
    :class:`OutOfRange` if ``alpha`` is outside the feasible interval.
    """
    from .ratlp import LinearConstraintSystem, feasible
    a = a.bits if isinstance(a, Event) else a
    alpha = _frac(alpha)
    lo, hi = extension_range(space, a)
    if not lo <= alpha <= hi:
        raise OutOfRange(f"value {alpha} outside the feasible interval [{lo}, {hi}]")
    known = _known_values(space)
    atoms, system, target = _extension_system(_size(space), known, a)
    system = LinearConstraintSystem(system.n, system.eqs + ((tuple(target), alpha),))
    x = feasible(system)
    assert x is not None
    outcomes = space.outcomes if isinstance(space, FiniteProbSpace) else tuple(f"w{i}" for i in range(space.size))
    return FiniteProbSpace(outcomes, tuple(atoms), tuple(x))


def _known_values(space) -> dict:
    if isinstance(space, FiniteProbSpace):
        return dict(zip(space.atoms, space.masses))
    return dict(space.rho)


def _size(space) -> int:
    return space.size


def completion(space: FiniteProbSpace) -> FiniteProbSpace:
    """Adjoin all subsets of null sets: null atoms split into singletons."""
    atoms, masses = [], []
    for a, m in zip(space.atoms, space.masses):
        if m == 0 and a & (a - 1):
            for i in members(a):
                atoms.append(1 << i)
                masses.append(Fraction(0))
        else:
            atoms.append(a)
            masses.append(m)
    order = sorted(range(len(atoms)), key=lambda i: atoms[i])
    return FiniteProbSpace(space.outcomes, tuple(atoms[i] for i in order), tuple(masses[i] for i in order))


def boolean_measure_iso(s1: FiniteProbSpace, s2: FiniteProbSpace) -> bool:
    """Isomorphism of the measure algebras Σ/N: equal multisets of positive atom masses."""
    return sorted(m for m in s1.masses if m) == sorted(m for m in s2.masses if m)


def subsets_of(mask: int) -> list[int]:
    """All subsets of a bit mask (including 0 and the mask itself)."""
    out = [0]
    for i in members(mask):
        out += [s | 1 << i for s in out]
    return out
