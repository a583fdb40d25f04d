"""Inductive statements over a finite propositional language.

An inductive statement ``(X, φ, p)`` says that the antecedent ``X`` entails the
consequent ``φ`` to degree ``p``.  Every antecedent in a problem is the shared
root ``T0`` plus finitely many extra formulas.

Statements collapse to an :class:`EventTable`: the antecedent becomes its
*condition event* (the atoms satisfying the root and the extras) and the
consequent becomes its *target event* intersected with the condition, so
logically equivalent statements land on the same key.

Consistency and derivation are decided semantically: the feasible models are
the probability vectors on the atom space that satisfy every statement with
positive antecedent mass, and a probability is forced exactly when it is the
same at every such model.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .events import Event, members
from .formula import AndAll, Formula, Not, to_text, variables
from .measure import DynkinSpace, FiniteProbSpace, SetFamily, atoms_of, completion
from .ratlp import (DenominatorZero, Infeasible, LinearConstraintSystem, dot, indicator, positive_point, ratio_bounds, vertices)
from .semantics import AtomSpace, eval_formula, event_of

ZERO, ONE = Fraction(0), Fraction(1)


class R1Conflict(ValueError):
    """Two equivalent statements carry different probabilities."""


class ClosureContradiction(ValueError):
    """Closing a table under the rules produced two values for one key."""


class UndefinedProbability(ValueError):
    """A conditional probability needed by the operation does not exist."""


class OverlapError(ValueError):
    """A formula straddles two independence blocks."""


# ---------------------------------------------------------------------------
# Statements


@dataclass(frozen=True)
class Antecedent:
    """The root axioms ``T0`` plus finitely many extra formulas."""

    root: tuple = ()
    extras: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "root", tuple(self.root))
        object.__setattr__(self, "extras", tuple(self.extras))

    def event(self, space: AtomSpace) -> Event:
        return event_of(AndAll(self.root + self.extras), space)

    def text(self) -> str:
        parts = ["T0"] + [to_text(e) for e in self.extras]
        return ", ".join(parts)


@dataclass(frozen=True)
class InductiveStatement:
    antecedent: Antecedent
    consequent: Formula
    prob: Fraction

    def __post_init__(self):
        p = Fraction(self.prob)
        if not 0 <= p <= 1:
            raise ValueError(f"probability {p} outside [0, 1]")
        object.__setattr__(self, "prob", p)

    def text(self) -> str:
        return f"P({to_text(self.consequent)} | {self.antecedent.text()}) = {self.prob}"


def statement(root: Sequence[Formula], consequent: Formula, prob, extras: Sequence[Formula] = ()) -> InductiveStatement:
    return InductiveStatement(Antecedent(tuple(root), tuple(extras)), consequent, Fraction(prob))


# ---------------------------------------------------------------------------
# Event tables


@dataclass
class EventTable:
    """``(condition, target) ↦ probability`` with targets normalized to lie inside conditions.

    ``universe`` holds raw events of interest (consequents and extras) that
    the closure may relativize to other conditions.
    """

    space: AtomSpace
    entries: dict = field(default_factory=dict)
    universe: frozenset = frozenset()
    sources: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.space.size

    def conditions(self) -> list[int]:
        return sorted({c for c, _ in self.entries})

    def domain(self, cond: int) -> dict:
        return {t: v for (c, t), v in self.entries.items() if c == cond}

    def get(self, cond: int, target: int):
        return self.entries.get((cond, target & cond))

    def by_condition(self) -> dict:
        out: dict = {}
        for (c, t), v in self.entries.items():
            out.setdefault(c, {})[t] = v
        return out

    def copy(self) -> "EventTable":
        return EventTable(self.space, dict(self.entries), self.universe, dict(self.sources))


def collapse(statements: Iterable[InductiveStatement], root: Sequence[Formula], space: AtomSpace) -> EventTable:
    """Collapse statements to events, detecting conflicting equivalent statements."""
    table = EventTable(space)
    universe = set()
    for st in statements:
        if tuple(st.antecedent.root) != tuple(root):
            raise ValueError("every antecedent must share the problem's root")
        cond = st.antecedent.event(space).bits
        target = event_of(st.consequent, space).bits
        universe.add(target)
        for e in st.antecedent.extras:
            universe.add(event_of(e, space).bits)
        key = (cond, target & cond)
        old = table.entries.get(key)
        if old is not None and old != st.prob:
            raise R1Conflict(f"{table.sources[key].text()} and {st.text()} are equivalent "
                             f"but assign {old} and {st.prob}")
        table.entries[key] = st.prob
        table.sources.setdefault(key, st)
    table.universe = frozenset(universe)
    return table


def table_from_space(space: FiniteProbSpace, atom_space: AtomSpace, root_event: int | None = None,
                     conditions: Iterable[int] | None = None, targets: Iterable[int] | None = None) -> EventTable:
    """The statements a model makes, restricted to antecedents at or above the root.

    Conditions default to every completion-measurable event of positive mass
    inside the root event; targets default to every completion-measurable set.
    """
    full = completion(space)
    root = full.full if root_event is None else root_event
    if full.mu(root) != 1:
        raise ValueError("the model does not give the root probability one")
    from .measure import unions
    measurable = sorted(unions(full.atoms))
    conds = measurable if conditions is None else list(conditions)
    targs = measurable if targets is None else list(targets)
    table = EventTable(atom_space)
    for c in conds:
        c &= root
        if not full.measurable(c) or full.mu(c) == 0:
            continue
        mc = full.mu(c)
        for t in targs:
            t &= c
            if full.measurable(t):
                table.entries[(c, t)] = full.mu(t) / mc
    table.universe = frozenset(targs)
    return table


def table_from_dynkin(d: DynkinSpace, atom_space: AtomSpace) -> EventTable:
    """Statements of the form ``ρ(φ∩ψ)/ρ(ψ)`` for every positive ``ψ`` and every ``φ∩ψ`` in Δ."""
    table = EventTable(atom_space)
    fam = d.delta.members
    for c in sorted(fam):
        if d.rho[c] == 0:
            continue
        for t in sorted(fam):
            if t & ~c == 0:
                table.entries[(c, t)] = d.rho[t] / d.rho[c]
    table.universe = frozenset(fam)
    return table


# ---------------------------------------------------------------------------
# Rule checking


@dataclass(frozen=True)
class RuleViolation:
    rule: str
    kind: str          # "value" (wrong number) or "missing" (a required entry is absent)
    detail: str


def _hx(table: EventTable, m: int) -> str:
    return Event(table.size, m).hex()


def check_rules(table: EventTable) -> list[RuleViolation]:
    """Every instantiation of the entireness rules over the table's keys that fails.

    Logical implication, material implication, deductive transitivity, addition
    and multiplication are checked.  Continuity is vacuous on a finite atom
    space: every increasing chain of events is eventually constant.
    """
    out: list[RuleViolation] = []
    dom = table.by_condition()
    conds = sorted(dom)
    H = lambda m: _hx(table, m)  # noqa: E731

    def need(rule, c, t, value, why):
        have = dom.get(c, {}).get(t)
        if have is None:
            out.append(RuleViolation(rule, "missing", f"P({H(t)} | {H(c)}) must exist ({why})"))
        elif have != value:
            out.append(RuleViolation(rule, "value", f"P({H(t)} | {H(c)}) = {have}, expected {value} ({why})"))

    for c in conds:
        d = dom[c]
        # logical implication: X ⊢ φ  ⇒  P(φ|X) = 1 ; normalized, that is the key (c, c)
        need("R2", c, c, ONE, "the antecedent entails it")
        # deductive transitivity, first clause: certainty passes to every weaker target
        extra = {u & c for u in table.universe} | set(d)
        for t, v in d.items():
            if v == 1:
                for u in extra:
                    if t & ~u == 0 and u != t:
                        need("R4", c, u, ONE, f"{H(t)} has probability one and entails it")
        # addition
        items = sorted(d.items())
        for (a, va), (b, vb) in itertools.combinations(items, 2):
            if a & b == 0:
                need("R5", c, a | b, va + vb, f"disjoint {H(a)} and {H(b)}")
            if a & ~b == 0:
                need("R5", c, b & ~a, vb - va, f"{H(b)} splits as {H(a)} plus remainder")
            elif b & ~a == 0:
                need("R5", c, a & ~b, va - vb, f"{H(a)} splits as {H(b)} plus remainder")
        for a, va in items:
            if a == 0 and va != 0:
                out.append(RuleViolation("R5", "value", f"P(∅ | {H(c)}) = {va}, expected 0"))
    for c in conds:
        for c2 in conds:
            if c2 == c or c2 & ~c:
                continue
            # c2 ⊊ c: c2 is the antecedent X ∪ {c2}
            d, d2 = dom[c], dom[c2]
            for t2, v2 in d2.items():
                if v2 == 1:  # material implication
                    need("R3", c, (c & ~c2) | t2, ONE, f"P({H(t2)} | {H(c2)}) = 1")
            for t, v in d.items():
                if v == 1:  # deductive transitivity, second clause
                    need("R4", c2, t & c2, ONE, f"stronger antecedent, P({H(t)} | {H(c)}) = 1")
            a = d.get(c2)
            for g, b in d2.items():
                cval = d.get(g)
                if a is not None and a > 0 and b > 0:
                    need("R6", c, g, a * b, "multiplication rule")
                elif a is not None and cval is not None and a > 0 and cval > 0 and b != cval / a:
                    out.append(RuleViolation("R6", "value", f"P({H(g)} | {H(c2)}) = {b}, expected {cval / a}"))
            if a is not None and a > 0:
                for g, cval in d.items():
                    if g & ~c2 == 0 and cval > 0 and g not in d2:
                        need("R6", c2, g, cval / a, "multiplication rule")
            elif a is None:
                for g, b in d2.items():
                    cval = d.get(g)
                    if cval is not None and b > 0 and cval > 0:
                        need("R6", c, c2, cval / b, "multiplication rule")
    # multiplication with a positive target whose antecedent is absent (existence of X ∪ {φ})
    for c in conds:
        for t, v in dom[c].items():
            if v > 0 and t != c and t not in dom:
                out.append(RuleViolation("R6", "missing", f"antecedent {H(t)} must exist since "
                                                          f"P({H(t)} | {H(c)}) = {v} > 0"))
    return out


def is_entire(table: EventTable) -> bool:
    return not check_rules(table)


def is_complete(table: EventTable) -> bool:
    """Entire, domains closed under conjunction, and chained antecedents connected."""
    if check_rules(table):
        return False
    dom = table.by_condition()
    for c, d in dom.items():
        keys = list(d)
        if any((a & b) not in d for a in keys for b in keys):
            return False
    for c in dom:
        for c2 in dom:
            if c2 & ~c == 0 and c2 not in dom[c]:
                return False
    return True


# ---------------------------------------------------------------------------
# Closure


def closure(table: EventTable, max_entries: int = 200_000) -> EventTable:
    """Least fixpoint under the derived rules of the finite calculus.

    Applied: logical implication, negation and relative negation, finite
    additivity and inclusion–exclusion, certainty closure and its converse,
    and the multiplication rule between nested antecedents present in the
    table (which subsumes Bayes' rule and deductive extension).  No new
    antecedents are invented.
    """
    t = table.copy()
    dom = t.by_condition()
    conds = sorted(dom)

    def put(c, e, v):
        if not 0 <= v <= 1:
            raise ClosureContradiction(f"derived P({_hx(t, e)} | {_hx(t, c)}) = {v} outside [0, 1]")
        d = dom[c]
        old = d.get(e)
        if old is None:
            d[e] = v
            return True
        if old != v:
            raise ClosureContradiction(f"P({_hx(t, e)} | {_hx(t, c)}) derived as both {old} and {v}")
        return False

    changed = True
    while changed:
        changed = False
        for c in conds:
            d = dom[c]
            changed |= put(c, c, ONE)
            rel = [u & c for u in t.universe]
            for a, va in list(d.items()):
                changed |= put(c, c & ~a, 1 - va)
            items = list(d.items())
            for (a, va), (b, vb) in itertools.product(items, repeat=2):
                if a >= b and (a, va) != (b, vb):
                    pass
                if a & ~b == 0 and a != b:
                    changed |= put(c, b & ~a, vb - va)
                if a & b == 0 and a < b:
                    changed |= put(c, a | b, va + vb)
                u, i = d.get(a | b), d.get(a & b)
                if u is not None and i is None:
                    changed |= put(c, a & b, va + vb - u)
                elif i is not None and u is None:
                    changed |= put(c, a | b, va + vb - i)
                if va in (0, 1):
                    changed |= put(c, a | b, max(va, vb))
                    changed |= put(c, a & b, min(va, vb))
            for s, vs in list(d.items()):
                if vs == 1:
                    for e in rel:
                        w = d.get(e & s)
                        if w is not None:
                            changed |= put(c, e, w)
            if len(d) > max_entries:
                raise ValueError("closure exceeded the entry cap")
        for c in conds:
            for c2 in conds:
                if c2 == c or c2 & ~c:
                    continue
                a = dom[c].get(c2)
                if a is None or a == 0:
                    continue
                for g, b in list(dom[c2].items()):
                    changed |= put(c, g, a * b)
                for g, cv in list(dom[c].items()):
                    if g & ~c2 == 0:
                        changed |= put(c2, g, cv / a)
    t.entries = {(c, e): v for c, d in dom.items() for e, v in d.items()}
    return t


def dynkin_domain(table: EventTable, cond: "int | Antecedent") -> SetFamily:
    """Targets defined under a condition, re-indexed onto the condition's atoms.

    The returned family lives on ``Ω = cond`` (outcome ``j`` is the ``j``-th
    atom of the condition), so it can be checked directly as a Dynkin system.
    """
    if isinstance(cond, Antecedent):
        cond = cond.event(table.space).bits
    if not table.domain(cond):
        raise ValueError("the antecedent is not a condition of the table")
    pos = {a: j for j, a in enumerate(members(cond))}
    fam = set()
    for e in table.domain(cond):
        m = 0
        for a in members(e):
            m |= 1 << pos[a]
        fam.add(m)
    return SetFamily(len(pos), frozenset(fam))


# ---------------------------------------------------------------------------
# Models


def satisfies(model: FiniteProbSpace | DynkinSpace, stmt: InductiveStatement, space: AtomSpace) -> bool:
    """Whether a model over the atom space makes ``stmt`` true.

    The antecedent is read as root ∪ {⋀ extras}: each root axiom must have
    probability one in the completion, the extras' event must be measurable
    with positive mass, and the ratio must equal the stated probability.
    For a :class:`DynkinSpace`, measurability means membership in Δ.
    """
    if isinstance(model, DynkinSpace):
        def mu(e):
            return model.rho.get(e)
    else:
        full = completion(model)

        def mu(e):
            return full.mu(e) if full.measurable(e) else None
    for theta in stmt.antecedent.root:
        if mu(event_of(theta, space).bits) != 1:
            return False
    psi = event_of(AndAll(stmt.antecedent.extras), space).bits
    both = psi & event_of(stmt.consequent, space).bits
    mp, mb = mu(psi), mu(both)
    if mp is None or mb is None or mp == 0:
        return False
    return mb / mp == stmt.prob


def conditional(model: FiniteProbSpace, cond: int, target: int) -> Fraction | None:
    full = completion(model)
    if not (full.measurable(cond) and full.measurable(cond & target)) or full.mu(cond) == 0:
        return None
    return full.mu(cond & target) / full.mu(cond)


def independent_in(model: FiniteProbSpace, antecedent: Antecedent, phis: Sequence[Formula],
                   space: AtomSpace) -> bool:
    """Product identity ``P(⋀_J φ | X) = ∏_J P(φ | X)`` for every subset ``J``."""
    cond = antecedent.event(space).bits
    evs = [event_of(f, space).bits for f in phis]
    probs = []
    for f, e in zip(phis, evs):
        p = conditional(model, cond, e)
        if p is None:
            raise UndefinedProbability(f"P({to_text(f)} | {antecedent.text()}) is undefined")
        probs.append(p)
    for k in range(2, len(evs) + 1):
        for J in itertools.combinations(range(len(evs)), k):
            inter = cond
            prod = ONE
            for j in J:
                inter &= evs[j]
                prod *= probs[j]
            p = conditional(model, cond, inter)
            if p is None:
                raise UndefinedProbability("a joint conditional probability is undefined")
            if p != prod:
                return False
    return True


# ---------------------------------------------------------------------------
# Consistency and derivation


@dataclass(frozen=True)
class Inconsistent:
    status: str = "inconsistent"


@dataclass(frozen=True)
class Forced:
    value: Fraction
    witness: FiniteProbSpace | None = None
    measurability_forced: bool = True
    status: str = "forced"


@dataclass(frozen=True)
class Interval:
    lower: Fraction
    upper: Fraction
    lower_attained: bool
    upper_attained: bool
    witnesses: tuple = ()
    witness_values: tuple = ()
    status: str = "interval"


DeriveResult = Inconsistent | Forced | Interval


@dataclass(frozen=True)
class ConstraintModel:
    """The linear system a set of statements imposes on atom probabilities."""

    space: AtomSpace
    system: LinearConstraintSystem
    antecedents: tuple      # condition masks that must have positive mass
    events: tuple           # every event mentioned by a constraint (for measurability checks)


def constraint_model(statements: Sequence[InductiveStatement], root: Sequence[Formula],
                     space: AtomSpace) -> ConstraintModel:
    n = space.size
    root_ev = event_of(AndAll(tuple(root)), space).bits
    eqs = [(indicator(n, root_ev), ONE)]
    conds, evs = [], [root_ev]
    for st in statements:
        d = st.antecedent.event(space).bits
        num = d & event_of(st.consequent, space).bits
        eqs.append((tuple((ONE if num >> i & 1 else ZERO) - (st.prob if d >> i & 1 else ZERO)
                          for i in range(n)), ZERO))
        if d not in conds:
            conds.append(d)
        evs += [d, num]
    return ConstraintModel(space, LinearConstraintSystem(n, tuple(eqs)), tuple(conds), tuple(evs))


def _as_space(x: Sequence[Fraction], space: AtomSpace) -> FiniteProbSpace:
    return FiniteProbSpace.from_masses(list(x), [space.label(i) for i in range(space.size)])


def consistency(statements: Sequence[InductiveStatement], root: Sequence[Formula],
                space: AtomSpace) -> FiniteProbSpace | None:
    """A model of all statements with every antecedent positive, or ``None``."""
    cm = constraint_model(statements, root, space)
    x = positive_point(cm.system, [indicator(space.size, c) for c in cm.antecedents])
    return None if x is None else _as_space(x, space)


def _ratio(x, num: int, den: int) -> Fraction:
    n = len(x)
    return dot(indicator(n, num & den), x) / dot(indicator(n, den), x)


def measurability_forced(events: Iterable[int], target: int, witnesses: Iterable[Sequence[Fraction]]) -> bool:
    """Whether ``target`` is, up to null sets, a union of atoms of σ(constraint events)
    at every witness."""
    events = list(events)
    size = max((len(w) for w in witnesses), default=0)
    atoms = atoms_of(size, events)
    for w in witnesses:
        for a in atoms:
            mass = sum((w[i] for i in members(a)), ZERO)
            if mass > 0 and a & target not in (0, a):
                return False
    return True


def derive(statements: Sequence[InductiveStatement], root: Sequence[Formula], query_antecedent: Antecedent,
           query: Formula, space: AtomSpace) -> DeriveResult:
    """Forced value or interval for ``P(query | query_antecedent)``."""
    cm = constraint_model(statements, root, space)
    n = space.size
    strict = [indicator(n, c) for c in cm.antecedents]
    base = positive_point(cm.system, strict)
    if base is None:
        return Inconsistent()
    den = query_antecedent.event(space).bits
    num = den & event_of(query, space).bits
    try:
        b = ratio_bounds(num, den, cm.system, strict)
    except DenominatorZero:
        raise UndefinedProbability("the query antecedent has probability zero in every model") from None
    if b.forced:
        flag = measurability_forced(cm.events, num, [b.witness_low, b.witness_high])
        return Forced(b.lower, _as_space(b.witness_low, space), flag)
    # witnesses: attained optimizers, or points pulled toward the bound from a
    # strictly positive model; the pair must realize distinct values
    if dot(indicator(n, den), base) == 0:
        base = positive_point(cm.system, strict + [indicator(n, den)])

    def toward(x, attained):
        if attained:
            return [list(x)]
        return [[(1 - lam) * xi + lam * bi for xi, bi in zip(x, base)]
                for lam in (Fraction(1, 2 ** k) for k in range(1, 12))]

    lows, highs = toward(b.witness_low, b.lower_attained), toward(b.witness_high, b.upper_attained)
    for xl, xh in itertools.product(lows, highs):
        vl, vh = _ratio(xl, num, den), _ratio(xh, num, den)
        if vl != vh:
            break
    return Interval(b.lower, b.upper, b.lower_attained, b.upper_attained,
                    (_as_space(xl, space), _as_space(xh, space)), (vl, vh))


# ---------------------------------------------------------------------------
# Independence


def _connected_blocks(groups: Iterable[Iterable[str]], pv: Sequence[str]) -> list[tuple]:
    parent = {v: v for v in pv}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for g in groups:
        g = list(g)
        for a, b in zip(g, g[1:]):
            parent[find(a)] = find(b)
    blocks: dict = {}
    for v in pv:
        blocks.setdefault(find(v), []).append(v)
    return [tuple(b) for b in blocks.values()]


def _conjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, AndAll):
        out = []
        for a in f.args:
            out += _conjuncts(a)
        return out
    return [f]


def derive_under_independence(marginals: Sequence[tuple], root: Sequence[Formula], query: Formula,
                              pv: Sequence[str] | None = None, blocks: Sequence[Sequence[str]] | None = None,
                              max_support: int = 1 << 20) -> DeriveResult:
    """Probability of ``query`` given the root when variable blocks are independent.

    Blocks default to the connected components of variables linked by a
    marginal formula or a root conjunct.  Inside a block the marginals and the
    root determine a polytope of block distributions; the joint law is the
    product of block laws.  When every block law is unique the query value is
    forced; otherwise the extremes are taken over products of block vertices
    (the query probability is multilinear in the block laws).
    """
    if pv is None:
        names = set(variables(query))
        for f, _ in marginals:
            names |= variables(f)
        for r in root:
            names |= variables(r)
        pv = sorted(names)
    pv = tuple(pv)
    constraints = [(f, Fraction(p)) for f, p in marginals]
    root_parts = [c for r in root for c in _conjuncts(r)]
    groups = [variables(f) for f, _ in constraints] + [variables(r) for r in root_parts]
    if blocks is None:
        blocks = _connected_blocks([sorted(g) for g in groups], pv)
    else:
        blocks = [tuple(b) for b in blocks]
        covered = [v for b in blocks for v in b]
        if sorted(covered) != sorted(pv):
            raise ValueError("blocks must partition the declared variables")
    where = {v: i for i, b in enumerate(blocks) for v in b}
    per_block: dict = {i: ([], []) for i in range(len(blocks))}
    for g, item, kind in ([(variables(f), (f, p), 0) for f, p in constraints]
                          + [(variables(r), r, 1) for r in root_parts]):
        ids = {where[v] for v in g}
        if len(ids) > 1:
            text = to_text(item[0] if kind == 0 else item)
            raise OverlapError(f"{text} mentions variables from several independence blocks")
        if ids:
            per_block[ids.pop()][kind].append(item)
    block_verts = []
    for i, block in enumerate(blocks):
        margs, roots = per_block[i]
        verts = _block_vertices(block, tuple(margs), tuple(roots))
        if not verts:
            return Inconsistent()
        block_verts.append(verts)
    ctx = (blocks, block_verts, where, max_support)
    lo, hi = _range(query, ctx)
    if lo == hi:
        return Forced(lo)
    return Interval(lo, hi, True, True, (), (lo, hi))


@functools.lru_cache(maxsize=4096)
def _block_vertices(block: tuple, margs: tuple, roots: tuple) -> tuple:
    """Vertices of the polytope of laws on one block satisfying its marginals and root parts."""
    stmts = [statement(roots, f, p) for f, p in margs]
    cm = constraint_model(stmts, roots, AtomSpace(block))
    try:
        return tuple(vertices(cm.system))
    except Infeasible:
        return ()


def _range(query: Formula, ctx) -> tuple[Fraction, Fraction]:
    """Least and greatest probability of ``query`` over products of block vertex laws.

    Negations flip the range; a conjunction whose conjuncts fall into groups
    touching disjoint blocks factors into a product of independent ranges.
    Everything else is enumerated over the blocks it mentions.
    """
    if isinstance(query, Not):
        lo, hi = _range(query.arg, ctx)
        return ONE - hi, ONE - lo
    if isinstance(query, AndAll):
        parts = _independent_parts(query.args, ctx[2])
        if len(parts) > 1:
            lo = hi = ONE
            for part in parts:
                a, b = _range(part, ctx)
                lo, hi = lo * a, hi * b
            return lo, hi
    return _enumerate(query, ctx)


def _independent_parts(conjuncts: Sequence[Formula], where: dict) -> list[Formula]:
    groups: list[tuple[set, list]] = []
    for f in conjuncts:
        ids = {where[v] for v in variables(f)}
        merged = (set(ids), [f])
        rest = []
        for g in groups:
            if g[0] & ids:
                merged[0].update(g[0])
                merged[1][:0] = g[1]
            else:
                rest.append(g)
        groups = rest + [merged]
    return [fs[0] if len(fs) == 1 else AndAll(tuple(fs)) for _, fs in groups]


def _enumerate(query: Formula, ctx) -> tuple[Fraction, Fraction]:
    blocks, block_verts, _, max_support = ctx
    relevant = variables(query)
    laws = []        # per relevant block: candidate marginal laws on its relevant variables
    for block, verts in zip(blocks, block_verts):
        rel = [v for v in block if v in relevant]
        if not rel:
            continue
        cands = []
        for x in verts:
            law: dict = {}
            for idx, m in enumerate(x):
                if m:
                    key = tuple(bool(idx >> block.index(v) & 1) for v in rel)
                    law[key] = law.get(key, ZERO) + m
            if law not in cands:
                cands.append(law)
        laws.append((rel, cands))
    support = 1
    for rel, cands in laws:
        support *= max(len(c) for c in cands) * len(cands)
    if support > max_support:
        raise ValueError("product support too large to enumerate")
    values = set()
    for choice in itertools.product(*(cands for _, cands in laws)):
        total = ZERO
        for combo in itertools.product(*(law.items() for law in choice)):
            mass = ONE
            assignment = {}
            for (rel, _), (key, m) in zip(laws, combo):
                mass *= m
                assignment.update(zip(rel, key))
            if mass and eval_formula(assignment, query):
                total += mass
        values.add(total)
    return min(values), max(values)
