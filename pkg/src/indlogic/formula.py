"""Abstract syntax for propositional formulas and finite first-order sentences.

Both languages share the Boolean connectives.  The primitive connectives are
:class:`Not` and :class:`AndAll` (a finite, ordered conjunction); the sugar
nodes :class:`Or`, :class:`Implies`, :class:`Iff`, :class:`Top` and
:class:`Bottom` rewrite to the primitives via :func:`desugar`::

    Or(a, b)        ->  ~(~a & ~b)
    Implies(a, b)   ->  ~a | b
    Iff(a, b)       ->  (a -> b) & (b -> a)
    Bottom          ->  r0 & ~r0          (r0 = first declared variable)
    Top             ->  ~Bottom

First-order sentences add equality, relation atoms and quantifiers.  Terms are
bound variables, constants, or function applications.

All nodes are frozen dataclasses, so formulas are hashable and can be used as
dictionary keys or set members.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Union


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class TVar:
    """A bound (individual) variable."""

    name: str


@dataclass(frozen=True)
class Const:
    """A constant symbol (a 0-ary function symbol)."""

    name: str


@dataclass(frozen=True)
class Func:
    """A function symbol applied to argument terms."""

    name: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


Term = Union[TVar, Const, Func]


# ---------------------------------------------------------------------------
# Connectives (shared by both languages)


@dataclass(frozen=True)
class Var:
    """A propositional variable."""

    name: str


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class AndAll:
    """Conjunction of a finite ordered list of formulas (empty = true)."""

    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Or:
    """Disjunction of a finite ordered list (also serves as big-or)."""

    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bottom:
    pass


# ---------------------------------------------------------------------------
# First-order atoms and quantifiers


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class NotEq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ExistsExactly:
    """``exactly count`` elements ``x`` satisfy ``body``."""

    count: int
    var: str
    body: "Formula"

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("count must be nonnegative")


Formula = Union[Var, Not, AndAll, Or, Implies, Iff, Top, Bottom,
                Eq, NotEq, Rel, Forall, Exists, ExistsExactly]

PRIMITIVE_PROP = (Var, Not, AndAll)


def conj(*args: Formula) -> AndAll:
    return AndAll(args)


def disj(*args: Formula) -> Or:
    return Or(args)


# ---------------------------------------------------------------------------
# Signatures and permutations

KINDS = ("proposition", "constant", "relation", "function")


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: str
    arity: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown symbol kind {self.kind!r}")
        if self.kind in ("proposition", "constant") and self.arity != 0:
            raise ValueError(f"{self.kind} {self.name!r} must have arity 0")
        if self.kind == "relation" and self.arity < 1:
            raise ValueError(f"relation {self.name!r} needs arity >= 1")
        if self.kind == "function" and self.arity < 1:
            raise ValueError(f"function {self.name!r} needs arity >= 1 (use a constant)")


@dataclass(frozen=True)
class FinSignature:
    """A finite extralogical signature (or a declared set of propositional variables)."""

    symbols: tuple

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        names = [s.name for s in self.symbols]
        if len(set(names)) != len(names):
            raise ValueError("symbol names must be unique")

    @classmethod
    def propositional(cls, names: Iterable[str]) -> "FinSignature":
        return cls(tuple(Symbol(n, "proposition") for n in names))

    @classmethod
    def build(cls, constants: Iterable[str] = (), relations: Mapping[str, int] | None = None,
              functions: Mapping[str, int] | None = None) -> "FinSignature":
        syms = [Symbol(c, "constant") for c in constants]
        syms += [Symbol(r, "relation", a) for r, a in (relations or {}).items()]
        syms += [Symbol(f, "function", a) for f, a in (functions or {}).items()]
        return cls(tuple(syms))

    @property
    def names(self) -> tuple:
        return tuple(s.name for s in self.symbols)

    def get(self, name: str) -> Symbol | None:
        for s in self.symbols:
            if s.name == name:
                return s
        return None

    def __contains__(self, name: str) -> bool:
        return self.get(name) is not None

    def of_kind(self, kind: str) -> tuple:
        return tuple(s for s in self.symbols if s.kind == kind)

    def classes(self) -> list[tuple]:
        """Symbols grouped by (kind, arity), in declaration order of first appearance."""
        groups: dict[tuple, list] = {}
        for s in self.symbols:
            groups.setdefault((s.kind, s.arity), []).append(s.name)
        return [tuple(v) for v in groups.values()]

    @property
    def is_monadic(self) -> bool:
        """True when there are no function symbols and no relations of arity > 1."""
        return all(s.kind in ("proposition", "constant") or (s.kind == "relation" and s.arity == 1)
                   for s in self.symbols)


@dataclass(frozen=True)
class SignaturePermutation:
    """A kind- and arity-preserving bijection of a signature's symbols.

    ``mapping`` lists ``(symbol, image)`` pairs for every symbol of the
    signature; :meth:`__call__` applies the permutation to a symbol name.
    """

    signature: FinSignature
    mapping: tuple

    def __post_init__(self):
        table = dict(self.mapping)
        names = set(self.signature.names)
        if set(table) != names or set(table.values()) != names:
            raise ValueError("a signature permutation must be a bijection on the signature")
        for src, dst in table.items():
            a, b = self.signature.get(src), self.signature.get(dst)
            if (a.kind, a.arity) != (b.kind, b.arity):
                raise ValueError(f"{src} and {dst} differ in kind or arity")
        object.__setattr__(self, "mapping", tuple((n, table[n]) for n in self.signature.names))

    @classmethod
    def identity(cls, sig: FinSignature) -> "SignaturePermutation":
        return cls(sig, tuple((n, n) for n in sig.names))

    @classmethod
    def from_dict(cls, sig: FinSignature, table: Mapping[str, str]) -> "SignaturePermutation":
        full = {n: n for n in sig.names}
        full.update(table)
        return cls(sig, tuple(full.items()))

    @classmethod
    def from_cycles(cls, sig: FinSignature, text: str) -> "SignaturePermutation":
        """Parse cycle notation such as ``"(s0 s1)(c d)"``; ``"()"`` is the identity."""
        table: dict[str, str] = {}
        for cycle in re.findall(r"\(([^()]*)\)", text):
            elems = cycle.replace(",", " ").split()
            for a, b in zip(elems, elems[1:] + elems[:1]):
                if a in table:
                    raise ValueError(f"symbol {a} appears in two cycles")
                table[a] = b
        for a in table:
            if a not in sig:
                raise KeyError(f"symbol {a!r} not in signature")
        return cls.from_dict(sig, table)

    def __call__(self, name: str) -> str:
        for src, dst in self.mapping:
            if src == name:
                return dst
        raise KeyError(f"symbol {name!r} is not in the permutation's domain")

    def as_dict(self) -> dict:
        return dict(self.mapping)

    def compose(self, other: "SignaturePermutation") -> "SignaturePermutation":
        """``self ∘ other``: apply ``other`` first, then ``self``."""
        if other.signature != self.signature:
            raise ValueError("cannot compose permutations of different signatures")
        mine = self.as_dict()
        return SignaturePermutation(self.signature, tuple((n, mine[d]) for n, d in other.mapping))

    def inverse(self) -> "SignaturePermutation":
        return SignaturePermutation(self.signature, tuple((d, n) for n, d in self.mapping))

    @property
    def is_identity(self) -> bool:
        return all(n == d for n, d in self.mapping)

    def cycles(self) -> str:
        table, seen, parts = self.as_dict(), set(), []
        for start in self.signature.names:
            if start in seen or table[start] == start:
                seen.add(start)
                continue
            cyc, cur = [], start
            while cur not in seen:
                seen.add(cur)
                cyc.append(cur)
                cur = table[cur]
            parts.append("(" + " ".join(cyc) + ")")
        return "".join(parts) or "()"

    def __str__(self) -> str:
        return self.cycles()


# ---------------------------------------------------------------------------
# Structural operations


def desugar(phi: Formula, r0: str | None = None) -> Formula:
    """Rewrite sugar into primitive connectives.

    Propositional output uses only ``Var``/``Not``/``AndAll``.  First-order
    output additionally keeps ``Eq``, ``Rel``, ``Forall`` and
    ``ExistsExactly``.  ``r0`` is the designated variable for ``Top``/``Bottom``
    in propositional formulas; without it, ``Top`` becomes ``forall x. x = x``
    (valid because structures have nonempty domains).
    """
    def bottom() -> Formula:
        if r0 is None:
            return Not(Forall("x", Eq(TVar("x"), TVar("x"))))
        return AndAll((Var(r0), Not(Var(r0))))

    def go(f: Formula) -> Formula:
        if isinstance(f, (Var, Eq, Rel)):
            return f
        if isinstance(f, Not):
            return Not(go(f.arg))
        if isinstance(f, AndAll):
            return AndAll(tuple(go(a) for a in f.args))
        if isinstance(f, Or):
            return Not(AndAll(tuple(Not(go(a)) for a in f.args)))
        if isinstance(f, Implies):
            return go(Or((Not(f.left), f.right)))
        if isinstance(f, Iff):
            return AndAll((go(Implies(f.left, f.right)), go(Implies(f.right, f.left))))
        if isinstance(f, Bottom):
            return bottom()
        if isinstance(f, Top):
            return Not(bottom())
        if isinstance(f, NotEq):
            return Not(Eq(f.left, f.right))
        if isinstance(f, Forall):
            return Forall(f.var, go(f.body))
        if isinstance(f, Exists):
            return Not(Forall(f.var, Not(go(f.body))))
        if isinstance(f, ExistsExactly):
            return ExistsExactly(f.count, f.var, go(f.body))
        raise TypeError(f"not a formula: {f!r}")

    return go(phi)


def children(f: Formula) -> tuple:
    """Immediate subformulas of a node."""
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, (AndAll, Or)):
        return f.args
    if isinstance(f, (Implies, Iff)):
        return (f.left, f.right)
    if isinstance(f, (Forall, Exists, ExistsExactly)):
        return (f.body,)
    return ()


def subformulas(phi: Formula) -> frozenset:
    """The set of subformulas: the node itself together with those of its children."""
    out: set = set()
    stack = [phi]
    while stack:
        f = stack.pop()
        if f in out:
            continue
        out.add(f)
        stack.extend(children(f))
    return frozenset(out)


def node_count(phi: Formula) -> int:
    return 1 + sum(node_count(c) for c in children(phi))


def variables(phi: Formula) -> frozenset:
    """Names of the propositional variables occurring in ``phi``."""
    out: set = set()
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, Var):
            out.add(f.name)
        else:
            stack.extend(children(f))
    return frozenset(out)


def _term_symbols(t: Term) -> set:
    if isinstance(t, Const):
        return {t.name}
    if isinstance(t, Func):
        out = {t.name}
        for a in t.args:
            out |= _term_symbols(a)
        return out
    return set()


def symbols(phi: Formula) -> frozenset:
    """All extralogical symbols (and propositional variables) occurring in ``phi``."""
    out: set = set()
    for f in subformulas(phi):
        if isinstance(f, Var):
            out.add(f.name)
        elif isinstance(f, Rel):
            out.add(f.name)
            for a in f.args:
                out |= _term_symbols(a)
        elif isinstance(f, (Eq, NotEq)):
            out |= _term_symbols(f.left) | _term_symbols(f.right)
    return frozenset(out)


def _term_vars(t: Term) -> set:
    if isinstance(t, TVar):
        return {t.name}
    if isinstance(t, Func):
        out: set = set()
        for a in t.args:
            out |= _term_vars(a)
        return out
    return set()


def free_variables(phi: Formula) -> frozenset:
    """Free individual variables; a sentence has none."""
    if isinstance(phi, (Eq, NotEq)):
        return frozenset(_term_vars(phi.left) | _term_vars(phi.right))
    if isinstance(phi, Rel):
        out: set = set()
        for a in phi.args:
            out |= _term_vars(a)
        return frozenset(out)
    if isinstance(phi, (Forall, Exists, ExistsExactly)):
        return free_variables(phi.body) - {phi.var}
    result: frozenset = frozenset()
    for c in children(phi):
        result |= free_variables(c)
    return result


def is_sentence(phi: Formula) -> bool:
    return not free_variables(phi)


def _permute_term(t: Term, pi: SignaturePermutation) -> Term:
    if isinstance(t, Const):
        return Const(pi(t.name))
    if isinstance(t, Func):
        return Func(pi(t.name), tuple(_permute_term(a, pi) for a in t.args))
    return t


def permute(phi: Formula, pi: SignaturePermutation) -> Formula:
    """The image of ``phi`` under a symbol permutation (bound variables are untouched)."""
    if isinstance(phi, Var):
        return Var(pi(phi.name))
    if isinstance(phi, Rel):
        return Rel(pi(phi.name), tuple(_permute_term(a, pi) for a in phi.args))
    if isinstance(phi, Eq):
        return Eq(_permute_term(phi.left, pi), _permute_term(phi.right, pi))
    if isinstance(phi, NotEq):
        return NotEq(_permute_term(phi.left, pi), _permute_term(phi.right, pi))
    if isinstance(phi, Not):
        return Not(permute(phi.arg, pi))
    if isinstance(phi, AndAll):
        return AndAll(tuple(permute(a, pi) for a in phi.args))
    if isinstance(phi, Or):
        return Or(tuple(permute(a, pi) for a in phi.args))
    if isinstance(phi, Implies):
        return Implies(permute(phi.left, pi), permute(phi.right, pi))
    if isinstance(phi, Iff):
        return Iff(permute(phi.left, pi), permute(phi.right, pi))
    if isinstance(phi, (Top, Bottom)):
        return phi
    if isinstance(phi, Forall):
        return Forall(phi.var, permute(phi.body, pi))
    if isinstance(phi, Exists):
        return Exists(phi.var, permute(phi.body, pi))
    if isinstance(phi, ExistsExactly):
        return ExistsExactly(phi.count, phi.var, permute(phi.body, pi))
    raise TypeError(f"not a formula: {phi!r}")


def check_signature(phi: Formula, sig: FinSignature) -> None:
    """Raise ``ValueError`` unless every symbol of ``phi`` is declared with matching kind/arity."""
    def want(name, kind, arity):
        s = sig.get(name)
        if s is None:
            raise ValueError(f"undeclared symbol {name!r}")
        if (s.kind, s.arity) != (kind, arity):
            raise ValueError(f"{name!r} is a {s.kind}/{s.arity}, used as {kind}/{arity}")

    def term(t):
        if isinstance(t, Const):
            want(t.name, "constant", 0)
        elif isinstance(t, Func):
            want(t.name, "function", len(t.args))
            for a in t.args:
                term(a)

    for f in subformulas(phi):
        if isinstance(f, Var):
            want(f.name, "proposition", 0)
        elif isinstance(f, Rel):
            want(f.name, "relation", len(f.args))
            for a in f.args:
                term(a)
        elif isinstance(f, (Eq, NotEq)):
            term(f.left)
            term(f.right)


# ---------------------------------------------------------------------------
# Printing (the inverse of the parser in :mod:`indlogic.parser`)


def term_text(t: Term) -> str:
    if isinstance(t, (TVar, Const)):
        return t.name
    return f"{t.name}({', '.join(term_text(a) for a in t.args)})"


def to_text(phi: Formula) -> str:
    """Render a formula in the problem-file syntax; the parser reads it back unchanged."""
    if isinstance(phi, Var):
        return phi.name
    if isinstance(phi, Top):
        return "TRUE"
    if isinstance(phi, Bottom):
        return "FALSE"
    if isinstance(phi, Eq):
        return f"{term_text(phi.left)} = {term_text(phi.right)}"
    if isinstance(phi, NotEq):
        return f"{term_text(phi.left)} != {term_text(phi.right)}"
    if isinstance(phi, Rel):
        return f"{phi.name}({', '.join(term_text(a) for a in phi.args)})"
    if isinstance(phi, Not):
        inner = to_text(phi.arg)
        if isinstance(phi.arg, (Eq, NotEq)):
            inner = f"({inner})"
        return "~" + inner
    if isinstance(phi, (AndAll, Or)):
        op, word, unit = ("&", "AND", "TRUE") if isinstance(phi, AndAll) else ("|", "OR", "FALSE")
        if len(phi.args) == 0:
            return f"({word} i in 1..0 : {unit})"
        if len(phi.args) == 1:
            return f"({word} i in 1..1 : {to_text(phi.args[0])})"
        return "(" + f" {op} ".join(_operand(a) for a in phi.args) + ")"
    if isinstance(phi, Implies):
        return f"({_operand(phi.left)} -> {_operand(phi.right)})"
    if isinstance(phi, Iff):
        return f"({_operand(phi.left)} <-> {_operand(phi.right)})"
    if isinstance(phi, Forall):
        return f"(forall {phi.var}. {to_text(phi.body)})"
    if isinstance(phi, Exists):
        return f"(exists {phi.var}. {to_text(phi.body)})"
    if isinstance(phi, ExistsExactly):
        return f"(exists ={phi.count} {phi.var}. {to_text(phi.body)})"
    raise TypeError(f"not a formula: {phi!r}")


def _operand(phi: Formula) -> str:
    text = to_text(phi)
    if isinstance(phi, (Eq, NotEq)):
        return f"({text})"
    return text


def all_permutations(sig: FinSignature, cap: int = 3628800) -> list[SignaturePermutation]:
    """Every kind- and arity-preserving bijection of ``sig`` (identity first)."""
    classes = sig.classes()
    total = 1
    for c in classes:
        for k in range(2, len(c) + 1):
            total *= k
    if total > cap:
        raise ValueError(f"{total} signature permutations exceed the cap of {cap}")
    out = []
    for images in itertools.product(*(itertools.permutations(c) for c in classes)):
        table = {}
        for c, img in zip(classes, images):
            table.update(zip(c, img))
        out.append(SignaturePermutation.from_dict(sig, table))
    return out
