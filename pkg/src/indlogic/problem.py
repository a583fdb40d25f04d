"""Problem files: one root, its assumptions, conditions and queries.

A problem file is a sequence of ``;``-terminated items (see the README for
the full EBNF)::

    name "mathse-half";
    vars r1, r2;                          # propositional problem, or
    signature { const c, s0, s1; rel S/1; func f/1; }
    axiom c = s0 | c = s1;                # conjuncts of the root T0
    assume P(r1) = 1/2;
    assume P(h{i} | g) = 1/2 for i in 1..3;
    condition independence [r1, r2] [r3];
    condition indifference { bound 4; }
    query P(r1 & r2);
    model { 1/4 : {r1, r2}; 3/4 : {}; }

Inside ``P(...)`` the first ``|`` outside parentheses separates the
consequent from the extra antecedent formulas (comma separated); write
disjunctive consequents in parentheses.  A trailing ``for i in a..b``
repeats an item for each index value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .formula import FinSignature, Formula, Symbol, free_variables, to_text
from .fostruct import FinModel
from .indifference import DEFAULT_BOUND, PoIAssumption, PoIIndependence, PoIProblem, PoIQuery
from .inductive import Antecedent, InductiveStatement
from .measure import FiniteProbSpace
from .parser import ParseError, Parser, Token, UndeclaredError, expand_identifier, structure_from_parser, tokenize
from .semantics import AtomSpace


@dataclass(frozen=True)
class Assumption:
    consequent: Formula
    extras: tuple
    prob: Fraction

    def text(self) -> str:
        return f"{Query(self.consequent, self.extras).text()} = {self.prob}"


@dataclass(frozen=True)
class Query:
    consequent: Formula
    extras: tuple = ()

    def text(self) -> str:
        cond = ", ".join(["T0"] + [to_text(e) for e in self.extras])
        return f"P({to_text(self.consequent)} | {cond})"


@dataclass(frozen=True)
class Independence:
    """Propositional: variable blocks (empty means connected components).
    First-order: mutually independent sentences given ``T0`` plus ``extras``."""

    groups: tuple
    extras: tuple = ()


@dataclass
class Problem:
    name: str
    pv: tuple | None = None
    signature: FinSignature | None = None
    root: list = field(default_factory=list)
    assumptions: list = field(default_factory=list)
    queries: list = field(default_factory=list)
    independence: list = field(default_factory=list)
    bound: int | None = None                 # set by ``condition indifference``
    model: list | None = None                # [(mass, outcome)]

    @property
    def first_order(self) -> bool:
        return self.signature is not None

    # -- propositional views --------------------------------------------------
    def atom_space(self, max_pv: int | None = None) -> AtomSpace:
        return AtomSpace(self.pv) if max_pv is None else AtomSpace(self.pv, max_pv)

    def statements(self) -> list[InductiveStatement]:
        root = tuple(self.root)
        return [InductiveStatement(Antecedent(root, a.extras), a.consequent, a.prob) for a in self.assumptions]

    def antecedent(self, q: Query) -> Antecedent:
        return Antecedent(tuple(self.root), q.extras)

    def blocks(self) -> list[tuple] | None:
        """Explicit independence blocks, or ``None`` for connected components."""
        groups = [g for ind in self.independence for g in ind.groups]
        if not groups:
            return None
        covered = sorted(v for g in groups for v in g)
        if covered != sorted(self.pv):
            raise ValueError("independence blocks must partition the declared variables")
        return groups

    def prob_space(self) -> FiniteProbSpace:
        """The ``model`` block as a probability space on the strict models."""
        space = self.atom_space()
        masses = [Fraction(0)] * space.size
        for m, true_vars in self.model:
            idx = sum(1 << space.pv.index(v) for v in true_vars)
            masses[idx] += m
        return FiniteProbSpace.from_masses(masses, [space.label(i) for i in range(space.size)])

    # -- first-order views ------------------------------------------------------
    def poi_problem(self, bound: int | None = None) -> PoIProblem:
        return PoIProblem(
            self.signature, tuple(self.root),
            tuple(PoIAssumption(a.consequent, a.prob, a.extras) for a in self.assumptions),
            tuple(PoIQuery(q.consequent, q.extras) for q in self.queries),
            tuple(PoIIndependence(tuple(ind.groups), ind.extras) for ind in self.independence),
            bound or self.bound or DEFAULT_BOUND, self.name)

    def fin_model(self) -> FinModel:
        return FinModel(tuple((w, m) for m, w in self.model))


# ---------------------------------------------------------------------------
# Parsing


class _Reader:
    def __init__(self, text: str, name: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.problem = Problem(name)
        self.env: dict = {}

    # token helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, msg: str, tok: Token | None = None, cls=ParseError) -> ParseError:
        t = tok or self.tok
        return cls(msg, t.line, t.col)

    def at(self, *texts: str) -> bool:
        return self.tok.kind in ("op", "id") and self.tok.text in texts

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def ident(self) -> str:
        t = self.tok
        if t.kind != "id":
            raise self.error(f"expected an identifier, found {t.text or 'end of input'!r}")
        self.advance()
        return expand_identifier(t.text, self.env, t)

    def integer(self) -> int:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return int(t.text)
        if t.kind == "id" and t.text in self.env:
            self.advance()
            return self.env[t.text]
        if self.at("-") and self.tokens[self.pos + 1].kind == "num":
            self.advance()
            return -int(self.advance().text)
        raise self.error("expected an integer")

    def number(self) -> Fraction:
        t = self.tok
        if t.kind != "num":
            raise self.error("expected a number")
        self.advance()
        if self.at("/"):
            self.advance()
            d = self.tok
            if d.kind != "num":
                raise self.error("expected a denominator")
            self.advance()
            if int(d.text) == 0:
                raise self.error("zero denominator", d)
            return Fraction(int(t.text), int(d.text))
        if self.at(".") and self.tokens[self.pos + 1].kind == "num":
            self.advance()
            frac = self.advance().text
            return Fraction(f"{t.text}.{frac}")
        return Fraction(int(t.text))

    def _parser(self, tokens: list[Token]) -> Parser:
        if self.problem.signature is not None:
            return Parser(tokens, signature=self.problem.signature, env=self.env)
        if self.problem.pv is not None:
            return Parser(tokens, pv=self.problem.pv, env=self.env)
        raise self.error("declare 'vars' or 'signature' before using formulas")

    # -- items ------------------------------------------------------------------
    def _statement_end(self) -> int:
        depth, i = 0, self.pos
        while True:
            t = self.tokens[i]
            if t.kind == "eof":
                raise self.error("missing ';'", t)
            if t.kind == "op":
                if t.text in "({[":
                    depth += 1
                elif t.text in ")}]":
                    depth -= 1
                elif t.text == ";" and depth == 0:
                    return i
            i += 1

    def _loops(self, start: int, end: int):
        """Find trailing ``for i in a..b`` clauses; returns (body end, [(name, lo tokens)])."""
        for i in range(start, end):
            t = self.tokens[i]
            if not (t.kind == "id" and t.text == "for" and i + 2 < end and self.tokens[i + 2].text == "in"):
                continue
            save, self.pos = self.pos, i
            loops = []
            try:
                while self.pos < end and self.tok.text == "for":
                    self.advance()
                    name = self.tok.text
                    self.ident()
                    self.expect("in")
                    lo_at = self.pos
                    self._skip_int()
                    self.expect("..")
                    self._skip_int()
                    loops.append((name, lo_at))
                ok = self.pos == end
            except ParseError:
                ok = False
            self.pos = save
            if ok:
                return i, loops
        return end, []

    def _skip_int(self) -> None:
        if self.at("-"):
            self.advance()
        if self.tok.kind not in ("num", "id"):
            raise self.error("expected an integer")
        self.advance()

    def _repeat(self, word: str, body_end: int, loops: list, start: int) -> None:
        if not loops:
            self.pos = start
            self._one(word, body_end)
            return
        (name, lo_at), rest = loops[0], loops[1:]
        if name in self.env:
            raise self.error(f"index {name!r} is already bound", self.tokens[lo_at - 2])
        self.pos = lo_at
        lo = self.integer()
        self.expect("..")
        hi = self.integer()
        for v in range(lo, hi + 1):
            self.env[name] = v
            self._repeat(word, body_end, rest, start)
        self.env.pop(name, None)

    def formula(self, end: int) -> Formula:
        """Parse a formula from the current position up to token index ``end``."""
        sub = self.tokens[self.pos:end] + [Token("eof", "", self.tokens[end].line, self.tokens[end].col)]
        p = self._parser(sub)
        f = p.formula()
        p.finish()
        self.pos = end
        if self.problem.first_order:
            free = free_variables(f)
            if free:
                raise self.error(f"not a sentence: free variables {sorted(free)}", sub[0])
        return f

    def _split(self, start: int, end: int, sep: str) -> list[tuple]:
        """Index ranges between top-level separators in ``[start, end)``."""
        parts, depth, s = [], 0, start
        for i in range(start, end):
            t = self.tokens[i]
            if t.kind == "op" and t.text in "([{":
                depth += 1
            elif t.kind == "op" and t.text in ")]}":
                depth -= 1
            elif depth == 0 and t.kind == "op" and t.text == sep:
                parts.append((s, i))
                s = i + 1
        parts.append((s, end))
        return parts

    def prob_expr(self) -> tuple[Formula, tuple]:
        """``P(φ | ψ1, ..., ψk)``."""
        t = self.tok
        if not (t.kind == "id" and t.text == "P"):
            raise self.error("expected 'P('")
        self.advance()
        self.expect("(")
        depth, i = 1, self.pos
        bar = None
        while depth:
            u = self.tokens[i]
            if u.kind == "eof":
                raise self.error("unclosed 'P('", t)
            if u.kind == "op":
                if u.text in "([{":
                    depth += 1
                elif u.text in ")]}":
                    depth -= 1
                elif u.text == "|" and depth == 1 and bar is None:
                    bar = i
            i += 1
        close = i - 1
        phi = self.formula(bar if bar is not None else close)
        extras = []
        if bar is not None:
            for s, e in self._split(bar + 1, close, ","):
                if s == e:
                    raise self.error("empty antecedent formula", self.tokens[s])
                self.pos = s
                extras.append(self.formula(e))
        self.pos = close + 1
        return phi, tuple(extras)

    def run(self) -> Problem:
        while self.tok.kind != "eof":
            self.item()
        pr = self.problem
        if pr.pv is None and pr.signature is None:
            raise ParseError("the problem declares neither 'vars' nor 'signature'")
        return pr

    def item(self) -> None:
        t = self.tok
        word = t.text
        if word == "name":
            self.advance()
            s = self.tok
            if s.kind != "str":
                raise self.error("expected a quoted name")
            self.problem.name = s.text[1:-1]
            self.advance()
            self.expect(";")
            return
        if word == "signature":
            self.signature()
            return
        if word == "condition" and self.tokens[self.pos + 1].text == "indifference":
            self.indifference()
            return
        if word == "model":
            self.model()
            return
        if word not in ("vars", "axiom", "assume", "query", "condition"):
            raise self.error(f"unknown item {word!r}")
        end = self._statement_end()
        body_end, loops = self._loops(self.pos, end)
        self._repeat(word, body_end, loops, self.pos)
        self.pos = end + 1

    def _one(self, word: str, end: int) -> None:
        self.advance()
        pr = self.problem
        if word == "vars":
            if pr.signature is not None:
                raise self.error("a problem is either propositional ('vars') or first-order ('signature')")
            names = list(pr.pv or ())
            while self.pos < end:
                name = self.ident()
                if name in names:
                    raise self.error(f"variable {name!r} declared twice")
                names.append(name)
                if self.at(","):
                    self.advance()
            pr.pv = tuple(names)
        elif word == "axiom":
            pr.root.append(self.formula(end))
        elif word == "assume":
            phi, extras = self.prob_expr()
            self.expect("=")
            p = self.number()
            if not 0 <= p <= 1:
                raise self.error(f"probability {p} outside [0, 1]")
            if self.pos != end:
                raise self.error("unexpected tokens after the probability")
            pr.assumptions.append(Assumption(phi, extras, p))
        elif word == "query":
            phi, extras = self.prob_expr()
            if self.pos != end:
                raise self.error("unexpected tokens after the query")
            pr.queries.append(Query(phi, extras))
        elif word == "condition":
            if not (self.tok.kind == "id" and self.tok.text == "independence"):
                raise self.error("expected 'independence' or 'indifference'")
            self.advance()
            pr.independence.append(self.independence(end))

    def independence(self, end: int) -> Independence:
        groups = []
        while self.at("["):
            self.advance()
            close = self._matching(self.pos - 1)
            members = []
            for s, e in self._split(self.pos, close, ","):
                self.pos = s
                if self.problem.first_order:
                    members.append(self.formula(e))
                else:
                    name = self.ident()
                    if name not in self.problem.pv:
                        raise self.error(f"undeclared variable {name!r}", cls=UndeclaredError)
                    members.append(name)
            self.pos = close + 1
            groups.append(tuple(members))
        extras = []
        if self.tok.kind == "id" and self.tok.text == "given":
            self.advance()
            for s, e in self._split(self.pos, end, ","):
                self.pos = s
                extras.append(self.formula(e))
        if self.pos != end:
            raise self.error("unexpected tokens in the independence condition")
        if self.problem.first_order and len(groups) != 1:
            raise self.error("first-order independence takes one bracketed list of sentences")
        if not self.problem.first_order and extras:
            raise self.error("'given' is only supported in first-order problems")
        return Independence(tuple(groups[0]) if self.problem.first_order else tuple(groups), tuple(extras))

    def _matching(self, open_pos: int) -> int:
        depth = 0
        for i in range(open_pos, len(self.tokens)):
            t = self.tokens[i]
            if t.kind == "op" and t.text in "([{":
                depth += 1
            elif t.kind == "op" and t.text in ")]}":
                depth -= 1
                if depth == 0:
                    return i
        raise self.error("unbalanced brackets", self.tokens[open_pos])

    def signature(self) -> None:
        pr = self.problem
        if pr.pv is not None or pr.signature is not None:
            raise self.error("only one 'vars'/'signature' declaration is allowed")
        self.advance()
        self.expect("{")
        syms = []
        while not self.at("}"):
            kind = self.ident()
            kinds = {"const": "constant", "rel": "relation", "func": "function"}
            if kind not in kinds:
                raise self.error(f"expected 'const', 'rel' or 'func', found {kind!r}")
            while True:
                name = self.ident()
                arity = 0
                if kind != "const":
                    self.expect("/")
                    arity = self.integer()
                try:
                    syms.append(Symbol(name, kinds[kind], arity))
                except ValueError as exc:
                    raise self.error(str(exc)) from None
                if not self.at(","):
                    break
                self.advance()
            self.expect(";")
        self.expect("}")
        try:
            pr.signature = FinSignature(tuple(syms))
        except ValueError as exc:
            raise self.error(str(exc)) from None
        if self.at(";"):
            self.advance()

    def indifference(self) -> None:
        self.advance()
        self.advance()
        self.expect("{")
        bound = DEFAULT_BOUND
        while not self.at("}"):
            key = self.ident()
            if key != "bound":
                raise self.error(f"unknown indifference option {key!r}")
            bound = self.integer()
            if bound < 1:
                raise self.error("bound must be positive")
            self.expect(";")
        self.expect("}")
        if self.at(";"):
            self.advance()
        if not self.problem.first_order:
            raise self.error("indifference needs a first-order signature")
        self.problem.bound = bound

    def model(self) -> None:
        pr = self.problem
        self.advance()
        self.expect("{")
        out = []
        while not self.at("}"):
            m = self.number()
            self.expect(":")
            if pr.first_order:
                p = Parser(self.tokens, signature=pr.signature)
                p.pos = self.pos
                out.append((m, structure_from_parser(p)))
                self.pos = p.pos
            else:
                self.expect("{")
                true_vars = []
                while not self.at("}"):
                    name = self.ident()
                    if name not in pr.pv:
                        raise self.error(f"undeclared variable {name!r}", cls=UndeclaredError)
                    true_vars.append(name)
                    if self.at(","):
                        self.advance()
                self.expect("}")
                out.append((m, tuple(true_vars)))
            self.expect(";")
        self.expect("}")
        if self.at(";"):
            self.advance()
        if sum(m for m, _ in out) != 1:
            raise ParseError("model masses must sum to 1")
        pr.model = out


def parse_problem(text: str, name: str = "problem") -> Problem:
    """Parse problem-file text; errors carry line and column."""
    return _Reader(text, name).run()


def load_problem(path: str | Path) -> Problem:
    path = Path(path)
    return parse_problem(path.read_text(), path.stem)
