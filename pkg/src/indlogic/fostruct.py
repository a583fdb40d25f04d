"""Finite first-order structures and models built from them.

A :class:`FinStructure` has domain ``{0, …, n−1}`` and interprets every
symbol of a :class:`~indlogic.formula.FinSignature`: constants as elements,
``k``-ary relations as sets of ``k``-tuples, and ``k``-ary functions as total
tables (stored as a tuple of values in lexicographic order of arguments).

Signature permutations act on structures by moving interpretations along
with symbols: in ``ω^π`` the symbol ``π(σ)`` means what ``σ`` meant in ``ω``.
This is the action under which ``ω ⊨ φ`` iff ``ω^π ⊨ φ^π``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .formula import (AndAll, Bottom, Const, Eq, Exists, ExistsExactly, FinSignature, Forall, Formula, Func,
                      Iff, Implies, Not, NotEq, Or, Rel, SignaturePermutation, Top, TVar, Var)
from .measure import FiniteProbSpace, SetFamily, atoms_of, completion

MAX_ISO_DOMAIN = 8


def _args(n: int, k: int) -> list[tuple]:
    return list(itertools.product(range(n), repeat=k))


@dataclass(frozen=True)
class FinStructure:
    """An interpretation of a finite signature over the domain ``range(n)``."""

    signature: FinSignature
    n: int
    interp: tuple          # one value per signature symbol, in declaration order

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("structures have nonempty domains")
        if len(self.interp) != len(self.signature.symbols):
            raise ValueError("one interpretation per symbol required")
        for sym, val in zip(self.signature.symbols, self.interp):
            if sym.kind == "constant":
                if not 0 <= val < self.n:
                    raise ValueError(f"constant {sym.name} out of range")
            elif sym.kind == "relation":
                if any(len(t) != sym.arity or not all(0 <= a < self.n for a in t) for t in val):
                    raise ValueError(f"relation {sym.name} has malformed tuples")
            elif sym.kind == "function":
                if len(val) != self.n ** sym.arity or not all(0 <= v < self.n for v in val):
                    raise ValueError(f"function {sym.name} must be total on the domain")
            else:
                raise ValueError(f"{sym.kind} symbols are not interpreted by structures")

    @classmethod
    def build(cls, signature: FinSignature, n: int, interp: Mapping[str, object]) -> "FinStructure":
        """Build from ``{name: value}``; functions may be given as ``{args: value}`` dicts."""
        vals = []
        for sym in signature.symbols:
            if sym.name not in interp:
                raise ValueError(f"symbol {sym.name} is uninterpreted")
            v = interp[sym.name]
            if sym.kind == "constant":
                vals.append(int(v))
            elif sym.kind == "relation":
                vals.append(frozenset(tuple(t) if isinstance(t, (tuple, list)) else (t,) for t in v))
            else:
                if isinstance(v, Mapping):
                    table = {tuple(k) if isinstance(k, (tuple, list)) else (k,): x for k, x in v.items()}
                    missing = [a for a in _args(n, sym.arity) if a not in table]
                    if missing:
                        raise ValueError(f"function {sym.name} undefined at {missing[0]}")
                    v = tuple(table[a] for a in _args(n, sym.arity))
                vals.append(tuple(v))
        return cls(signature, n, tuple(vals))

    def value(self, name: str):
        for sym, val in zip(self.signature.symbols, self.interp):
            if sym.name == name:
                return val
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {s.name: v for s, v in zip(self.signature.symbols, self.interp)}

    def text(self) -> str:
        """Structure literal in the problem-file syntax."""
        parts = [f"domain {self.n}"]
        for sym, val in zip(self.signature.symbols, self.interp):
            if sym.kind == "constant":
                parts.append(f"{sym.name} = {val}")
            elif sym.kind == "relation":
                items = sorted(val)
                if sym.arity == 1:
                    body = ", ".join(str(t[0]) for t in items)
                else:
                    body = ", ".join("(" + ", ".join(map(str, t)) + ")" for t in items)
                parts.append(f"{sym.name} = {{{body}}}")
            else:
                rows = [f"({', '.join(map(str, a))}) -> {v}" for a, v in zip(_args(self.n, sym.arity), val)]
                parts.append(f"{sym.name} = {{{', '.join(rows)}}}")
        return "structure { " + "; ".join(parts) + "; }"


# ---------------------------------------------------------------------------
# Evaluation


def _term(omega: FinStructure, t, env: dict) -> int:
    if isinstance(t, TVar):
        try:
            return env[t.name]
        except KeyError:
            raise ValueError(f"free variable {t.name!r} in a sentence") from None
    if isinstance(t, Const):
        return omega.value(t.name)
    if isinstance(t, Func):
        table = omega.value(t.name)
        idx = 0
        for a in t.args:
            idx = idx * omega.n + _term(omega, a, env)
        return table[idx]
    raise TypeError(f"not a term: {t!r}")


def eval_formula_fo(omega: FinStructure, phi: Formula, env: dict) -> bool:
    """Satisfaction of a first-order formula under a variable assignment."""
    if isinstance(phi, Eq):
        return _term(omega, phi.left, env) == _term(omega, phi.right, env)
    if isinstance(phi, NotEq):
        return _term(omega, phi.left, env) != _term(omega, phi.right, env)
    if isinstance(phi, Rel):
        return tuple(_term(omega, a, env) for a in phi.args) in omega.value(phi.name)
    if isinstance(phi, Not):
        return not eval_formula_fo(omega, phi.arg, env)
    if isinstance(phi, AndAll):
        return all(eval_formula_fo(omega, a, env) for a in phi.args)
    if isinstance(phi, Or):
        return any(eval_formula_fo(omega, a, env) for a in phi.args)
    if isinstance(phi, Implies):
        return (not eval_formula_fo(omega, phi.left, env)) or eval_formula_fo(omega, phi.right, env)
    if isinstance(phi, Iff):
        return eval_formula_fo(omega, phi.left, env) == eval_formula_fo(omega, phi.right, env)
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bottom):
        return False
    if isinstance(phi, (Forall, Exists, ExistsExactly)):
        saved = env.get(phi.var, _MISSING)
        hits = 0
        try:
            for a in range(omega.n):
                env[phi.var] = a
                ok = eval_formula_fo(omega, phi.body, env)
                if isinstance(phi, Forall) and not ok:
                    return False
                if isinstance(phi, Exists) and ok:
                    return True
                hits += ok
        finally:
            if saved is _MISSING:
                env.pop(phi.var, None)
            else:
                env[phi.var] = saved
        if isinstance(phi, Forall):
            return True
        if isinstance(phi, Exists):
            return False
        return hits == phi.count
    if isinstance(phi, Var):
        raise TypeError("propositional variables are not interpreted by first-order structures")
    raise TypeError(f"not a formula: {phi!r}")


_MISSING = object()


def eval_sentence(omega: FinStructure, phi: Formula) -> bool:
    """Whether the structure satisfies the sentence (quantifiers range over the domain)."""
    return eval_formula_fo(omega, phi, {})


def eval_all(omega: FinStructure, phis: Iterable[Formula]) -> bool:
    return all(eval_sentence(omega, p) for p in phis)


# ---------------------------------------------------------------------------
# Domain relabeling, canonical forms and isomorphism


def relabel(omega: FinStructure, g: Sequence[int]) -> FinStructure:
    """The image ``g ∘ ω`` of a structure under a domain bijection ``g``."""
    n = omega.n
    vals = []
    for sym, val in zip(omega.signature.symbols, omega.interp):
        if sym.kind == "constant":
            vals.append(g[val])
        elif sym.kind == "relation":
            vals.append(frozenset(tuple(g[a] for a in t) for t in val))
        else:
            table = [0] * len(val)
            for args, v in zip(_args(n, sym.arity), val):
                idx = 0
                for a in args:
                    idx = idx * n + g[a]
                table[idx] = g[v]
            vals.append(tuple(table))
    return FinStructure(omega.signature, n, tuple(vals))


def _key(omega: FinStructure, g: Sequence[int]) -> tuple:
    n = omega.n
    out = [n]
    for sym, val in zip(omega.signature.symbols, omega.interp):
        if sym.kind == "constant":
            out.append(g[val])
        elif sym.kind == "relation":
            out.append(tuple(sorted(tuple(g[a] for a in t) for t in val)))
        else:
            table = [0] * len(val)
            for args, v in zip(_args(n, sym.arity), val):
                idx = 0
                for a in args:
                    idx = idx * n + g[a]
                table[idx] = g[v]
            out.append(tuple(table))
    return tuple(out)


def canonical_key(omega: FinStructure) -> tuple:
    """A complete isomorphism invariant: the least encoding over all domain relabelings.

    Elements named by constants are placed first (in order of the first
    constant naming them), which only restricts the search to relabelings
    consistent with that order and keeps the result canonical.
    """
    n = omega.n
    named: list[int] = []
    for sym, val in zip(omega.signature.symbols, omega.interp):
        if sym.kind == "constant" and val not in named:
            named.append(val)
    rest = [a for a in range(n) if a not in named]
    best = None
    for perm in itertools.permutations(rest):
        order = named + list(perm)
        g = [0] * n
        for new, old in enumerate(order):
            g[old] = new
        k = _key(omega, g)
        if best is None or k < best:
            best = k
    return best


def _profiles(omega: FinStructure) -> list[tuple]:
    """Per-element invariants: which constants name it and per-position relation/graph counts."""
    n = omega.n
    prof = [[] for _ in range(n)]
    for sym, val in zip(omega.signature.symbols, omega.interp):
        if sym.kind == "constant":
            for a in range(n):
                prof[a].append(a == val)
        elif sym.kind == "relation":
            for pos in range(sym.arity):
                counts = [0] * n
                for t in val:
                    counts[t[pos]] += 1
                for a in range(n):
                    prof[a].append(counts[a])
        else:
            counts = [0] * n
            for v in val:
                counts[v] += 1
            for a in range(n):
                prof[a].append(counts[a])
    return [tuple(p) for p in prof]


def _graphs(omega: FinStructure) -> list[frozenset]:
    out = []
    for sym, val in zip(omega.signature.symbols, omega.interp):
        if sym.kind == "relation":
            out.append(val)
        elif sym.kind == "function":
            out.append(frozenset(args + (v,) for args, v in zip(_args(omega.n, sym.arity), val)))
    return out


def structure_iso(omega: FinStructure, nu: FinStructure, max_domain: int = MAX_ISO_DOMAIN) -> tuple | None:
    """A domain bijection ``f`` with ``f ∘ ω = ν``, or ``None`` when none exists.

    Plain backtracking; candidates are pruned by element profiles and every
    fully assigned relation tuple is checked as soon as it is complete.
    """
    if omega.signature != nu.signature or omega.n != nu.n:
        return None
    n = omega.n
    if n > max_domain:
        raise ValueError(f"domain size {n} exceeds the isomorphism cap {max_domain}")
    pw, pv = _profiles(omega), _profiles(nu)
    if sorted(pw) != sorted(pv):
        return None
    gw, gv = _graphs(omega), _graphs(nu)
    if [len(r) for r in gw] != [len(r) for r in gv]:
        return None
    f = [-1] * n
    used = [False] * n
    by_elem = [[(k, t) for k, r in enumerate(gw) for t in r if a in t] for a in range(n)]

    def ok(a) -> bool:
        for k, t in by_elem[a]:
            if all(f[x] >= 0 for x in t) and tuple(f[x] for x in t) not in gv[k]:
                return False
        return True

    def go(a) -> bool:
        if a == n:
            return True
        for b in range(n):
            if not used[b] and pw[a] == pv[b]:
                f[a], used[b] = b, True
                if ok(a) and go(a + 1):
                    return True
                f[a], used[b] = -1, False
        return False

    if go(0):
        assert relabel(omega, f) == nu
        return tuple(f)
    return None


# ---------------------------------------------------------------------------
# Signature permutations acting on structures


def pi_image_structure(omega: FinStructure, pi: SignaturePermutation) -> FinStructure:
    """``ω^π``: the symbol ``π(σ)`` receives the interpretation that ``σ`` had."""
    old = omega.as_dict()
    inv = pi.inverse()
    return FinStructure(omega.signature, omega.n, tuple(old[inv(s.name)] for s in omega.signature.symbols))


# ---------------------------------------------------------------------------
# Models


@dataclass(frozen=True)
class FinModel:
    """A probability measure on finitely many structures.

    ``sigma`` is a family of outcome-index bit masks forming a σ-algebra; the
    default ``None`` means the full power set.
    """

    outcomes: tuple            # of (FinStructure, Fraction)
    sigma: SetFamily | None = None

    def __post_init__(self):
        outs = tuple((w, Fraction(m)) for w, m in self.outcomes)
        object.__setattr__(self, "outcomes", outs)
        if not outs:
            raise ValueError("a model needs at least one outcome")
        if any(m < 0 for _, m in outs) or sum(m for _, m in outs) != 1:
            raise ValueError("masses must be nonnegative and sum to one")
        sigs = {w.signature for w, _ in outs}
        if len(sigs) != 1:
            raise ValueError("all structures must share one signature")
        if self.sigma is not None and not self.sigma.is_sigma_algebra():
            raise ValueError("sigma must be a σ-algebra on the outcomes")

    @property
    def signature(self) -> FinSignature:
        return self.outcomes[0][0].signature

    @property
    def structures(self) -> list[FinStructure]:
        return [w for w, _ in self.outcomes]

    @property
    def masses(self) -> list[Fraction]:
        return [m for _, m in self.outcomes]

    def space(self) -> FiniteProbSpace:
        labels = [f"s{i}" for i in range(len(self.outcomes))]
        if self.sigma is None:
            return FiniteProbSpace.from_masses(self.masses, labels)
        atoms = atoms_of(len(self.outcomes), self.sigma.members)
        ms = [sum((m for i, m in enumerate(self.masses) if a >> i & 1), Fraction(0)) for a in atoms]
        return FiniteProbSpace(tuple(labels), tuple(atoms), tuple(ms))

    def event(self, phis: Formula | Iterable[Formula]) -> int:
        """Bit mask of the outcomes satisfying a sentence (or every sentence of a list)."""
        phis = [phis] if not isinstance(phis, (list, tuple)) else list(phis)
        return sum(1 << i for i, w in enumerate(self.structures) if eval_all(w, phis))

    def text(self) -> str:
        return "model {\n" + "".join(f"  {m} : {w.text()}\n" for w, m in self.outcomes) + "}"


def pi_image_model(model: FinModel, pi: SignaturePermutation) -> FinModel:
    return FinModel(tuple((pi_image_structure(w, pi), m) for w, m in model.outcomes), model.sigma)


def class_masses(model: FinModel, positive_only: bool = True) -> dict:
    """Total mass per isomorphism class of outcome structures."""
    out: dict = {}
    for w, m in model.outcomes:
        if positive_only and m == 0:
            continue
        k = canonical_key(w)
        out[k] = out.get(k, Fraction(0)) + m
    return out


def model_iso(p: FinModel, q: FinModel) -> bool:
    """Mass-preserving matching of positive-mass isomorphism classes.

    Only full-power-set models are compared; zero-mass outcomes are ignored.
    """
    if p.sigma is not None or q.sigma is not None:
        raise ValueError("isomorphism is only decided for full-power-set models")
    if p.signature != q.signature:
        return False
    return class_masses(p) == class_masses(q)


def conditional_prob(model: FinModel, X: Sequence[Formula], phi: Formula) -> Fraction | None:
    """``P(φ | X)`` over the model's completion; ``None`` if undefined."""
    full = completion(model.space())
    d = model.event(list(X))
    num = d & model.event(phi)
    if not (full.measurable(d) and full.measurable(num)):
        return None
    md = full.mu(d)
    if md == 0:
        return None
    return full.mu(num) / md


# ---------------------------------------------------------------------------
# Enumeration


def enumerate_structures(signature: FinSignature, n: int):
    """Every structure on ``range(n)`` (exponential; meant for tiny signatures)."""
    choices = []
    for sym in signature.symbols:
        if sym.kind == "constant":
            choices.append(range(n))
        elif sym.kind == "relation":
            tuples = _args(n, sym.arity)
            choices.append([frozenset(t for t, b in zip(tuples, bits) if b)
                            for bits in itertools.product((0, 1), repeat=len(tuples))])
        elif sym.kind == "function":
            choices.append(list(itertools.product(range(n), repeat=n ** sym.arity)))
        else:
            raise ValueError("propositional symbols are not supported in structures")
    for combo in itertools.product(*choices):
        yield FinStructure(signature, n, tuple(combo))


def count_structures(signature: FinSignature, n: int) -> int:
    total = 1
    for sym in signature.symbols:
        if sym.kind == "constant":
            total *= n
        elif sym.kind == "relation":
            total *= 2 ** (n ** sym.arity)
        else:
            total *= n ** (n ** sym.arity)
    return total
