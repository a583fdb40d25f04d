"""Truth-table semantics for propositional formulas.

An :class:`AtomSpace` enumerates every truth assignment to an ordered list of
variables.  Atom ``i`` assigns to the ``k``-th variable (1-based) the ``k``-th
binary digit of ``i`` counted from the right, so with variables ``r1, r2`` the
atom ``ω3`` makes both true and ``ω1`` makes only ``r1`` true.

Events are computed for all atoms at once with big-integer bit operations,
which keeps exhaustive checking fast up to the default cap of 24 variables.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .events import Event
from .formula import (AndAll, Bottom, Formula, Iff, Implies, Not, Or, Top, Var, variables)

MAX_PV = 24


class TooManyVariables(ValueError):
    pass


@dataclass(frozen=True)
class StrictModel:
    """A truth assignment, packed as the atom index over ``pv``."""

    pv: tuple
    index: int

    def __getitem__(self, name: str) -> bool:
        return bool(self.index >> self.pv.index(name) & 1)

    def as_dict(self) -> dict:
        return {v: self[v] for v in self.pv}


@dataclass(frozen=True)
class AtomSpace:
    """All ``2^|pv|`` strict models over an ordered variable list."""

    pv: tuple
    max_pv: int = MAX_PV

    def __post_init__(self):
        object.__setattr__(self, "pv", tuple(self.pv))
        if not self.pv:
            raise ValueError("an atom space needs at least one variable")
        if len(set(self.pv)) != len(self.pv):
            raise ValueError("duplicate variable names")
        if len(self.pv) > self.max_pv:
            raise TooManyVariables(f"{len(self.pv)} variables exceed the cap of {self.max_pv}")

    @property
    def size(self) -> int:
        return 1 << len(self.pv)

    def atoms(self) -> list[StrictModel]:
        return [StrictModel(self.pv, i) for i in range(self.size)]

    def full(self) -> Event:
        return Event.full(self.size)

    def empty(self) -> Event:
        return Event.empty(self.size)

    @cached_property
    def _var_masks(self) -> dict:
        masks = {}
        n = self.size
        for k, name in enumerate(self.pv):
            # atoms whose k-th bit is set: blocks of 2^k ones after 2^k zeros
            block = ((1 << (1 << k)) - 1) << (1 << k)
            period = 1 << (k + 1)
            mask, reps = 0, n // period
            # repeat the period pattern by doubling
            pattern, width, count = block, period, 1
            while count < reps:
                pattern |= pattern << width
                width *= 2
                count *= 2
            mask = pattern & ((1 << n) - 1)
            masks[name] = mask
        return masks

    def var_event(self, name: str) -> Event:
        try:
            return Event(self.size, self._var_masks[name])
        except KeyError:
            raise KeyError(f"variable {name!r} not in atom space {self.pv}") from None

    def label(self, i: int) -> str:
        return f"w{i}"


def eval_formula(omega: StrictModel | dict, phi: Formula) -> bool:
    """Evaluate ``phi`` at a single strict model (dict or :class:`StrictModel`)."""
    if isinstance(phi, Var):
        return bool(omega[phi.name])
    if isinstance(phi, Not):
        return not eval_formula(omega, phi.arg)
    if isinstance(phi, AndAll):
        return all(eval_formula(omega, a) for a in phi.args)
    if isinstance(phi, Or):
        return any(eval_formula(omega, a) for a in phi.args)
    if isinstance(phi, Implies):
        return (not eval_formula(omega, phi.left)) or eval_formula(omega, phi.right)
    if isinstance(phi, Iff):
        return eval_formula(omega, phi.left) == eval_formula(omega, phi.right)
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bottom):
        return False
    raise TypeError(f"not a propositional formula: {phi!r}")


def _event_bits(phi: Formula, space: AtomSpace, full: int, cache: dict) -> int:
    hit = cache.get(phi)
    if hit is not None:
        return hit
    if isinstance(phi, Var):
        bits = space.var_event(phi.name).bits
    elif isinstance(phi, Not):
        bits = full ^ _event_bits(phi.arg, space, full, cache)
    elif isinstance(phi, AndAll):
        bits = full
        for a in phi.args:
            bits &= _event_bits(a, space, full, cache)
    elif isinstance(phi, Or):
        bits = 0
        for a in phi.args:
            bits |= _event_bits(a, space, full, cache)
    elif isinstance(phi, Implies):
        bits = (full ^ _event_bits(phi.left, space, full, cache)) | _event_bits(phi.right, space, full, cache)
    elif isinstance(phi, Iff):
        bits = full ^ (_event_bits(phi.left, space, full, cache) ^ _event_bits(phi.right, space, full, cache))
    elif isinstance(phi, Top):
        bits = full
    elif isinstance(phi, Bottom):
        bits = 0
    else:
        raise TypeError(f"not a propositional formula: {phi!r}")
    cache[phi] = bits
    return bits


def event_of(phi: Formula, space: AtomSpace | Sequence[StrictModel | dict]) -> Event:
    """The set of outcomes satisfying ``phi``.

    ``space`` is either a full :class:`AtomSpace` or an explicit outcome list,
    in which case outcome ``i`` of the list is bit ``i`` of the event.
    """
    if isinstance(space, AtomSpace):
        return Event(space.size, _event_bits(phi, space, (1 << space.size) - 1, {}))
    return Event.of(len(space), (i for i, w in enumerate(space) if eval_formula(w, phi)))


def event_of_all(phis: Iterable[Formula], space: AtomSpace) -> Event:
    """Event of the conjunction of ``phis`` (the full space for an empty list)."""
    return event_of(AndAll(tuple(phis)), space)


def _joint_space(formulas: Iterable[Formula], max_pv: int = MAX_PV) -> AtomSpace:
    names: set = set()
    for f in formulas:
        names |= variables(f)
    return AtomSpace(tuple(sorted(names)) or ("_r0",), max_pv)


def entails(X: Iterable[Formula], phi: Formula, max_pv: int = MAX_PV) -> bool:
    """``X ⊢ φ``, decided by truth tables over the variables that occur."""
    X = list(X)
    space = _joint_space(X + [phi], max_pv)
    return event_of_all(X, space) <= event_of(phi, space)


def equivalent(phi: Formula, psi: Formula, max_pv: int = MAX_PV) -> bool:
    space = _joint_space([phi, psi], max_pv)
    return event_of(phi, space) == event_of(psi, space)


def tautology(phi: Formula, max_pv: int = MAX_PV) -> bool:
    return entails((), phi, max_pv)
