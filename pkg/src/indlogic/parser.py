"""Recursive-descent parser for the formula language of problem files.

Precedence, loosest first::

    <->   (left associative)
    ->    (right associative)
    |
    &
    ~  forall x.  exists x.  exists =n x.  AND i in a..b :  OR i in a..b :

Quantifier and indexed-family bodies extend as far right as possible.
Identifiers may contain index templates such as ``r{i}`` or ``h{i+1}_b``,
which are expanded using the enclosing ``AND``/``OR`` index (or a line-level
``for`` loop in problem files).  In first-order mode, ``=``/``!=`` bind tighter
than every connective, bound variable names shadow constants, and relation
atoms are written ``R(t1, ..., tk)``.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .formula import (AndAll, Bottom, Const, Eq, Exists, ExistsExactly, FinSignature, Forall,
                      Func, Iff, Implies, Not, NotEq, Or, Rel, Top, TVar, Var, free_variables)


class ParseError(ValueError):
    """Syntax error carrying a 1-based line and column."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        where = f" at line {line}, column {col}" if line else ""
        super().__init__(f"{message}{where}")


class UndeclaredError(ParseError):
    """A formula mentions a variable or symbol that was not declared."""


@dataclass(frozen=True)
class Token:
    kind: str      # 'id', 'num', 'op', 'eof'
    text: str
    line: int
    col: int


_IDENT = r"[A-Za-z_][A-Za-z0-9_']*(?:\{[^{}]*\}[A-Za-z0-9_']*)*"
_TOKEN_RE = re.compile(
    rf"(?P<ws>[ \t\r\n]+)|(?P<comment>#[^\n]*)|(?P<id>{_IDENT})|(?P<num>\d+)"
    r"|(?P<str>\"[^\"\n]*\")"
    r"|(?P<op><->|->|!=|\.\.|[~&|().,=:{}\[\];/<>*+\-])"
)


def tokenize(text: str) -> list[Token]:
    tokens, pos, line, line_start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        if "\n" in chunk:
            line += chunk.count("\n")
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


def eval_index(expr: str, env: Mapping[str, int], tok: Token | None = None) -> int:
    """Evaluate an integer index expression (``+ - *`` over ints and index names)."""
    def go(node):
        if isinstance(node, ast.Expression):
            return go(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if isinstance(node, ast.Name):
            if node.id not in env:
                raise KeyError(node.id)
            return env[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -go(node.operand)
        if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult)):
            a, b = go(node.left), go(node.right)
            return a + b if isinstance(node.op, ast.Add) else a - b if isinstance(node.op, ast.Sub) else a * b
        raise ValueError("unsupported index expression")
    try:
        return go(ast.parse(expr.strip(), mode="eval"))
    except (SyntaxError, ValueError, KeyError) as exc:
        line, col = (tok.line, tok.col) if tok else (0, 0)
        raise ParseError(f"bad index expression {expr!r} ({exc})", line, col) from None


def expand_identifier(text: str, env: Mapping[str, int], tok: Token | None = None) -> str:
    return re.sub(r"\{([^{}]*)\}", lambda m: str(eval_index(m.group(1), env, tok)), text)


class Parser:
    """Parses formulas from a token stream.

    ``pv`` selects propositional mode (the declared variables); ``signature``
    selects first-order mode.  ``env`` binds index names used in templates.
    """

    KEYWORDS = {"TRUE", "FALSE", "AND", "OR", "forall", "exists", "in"}

    def __init__(self, tokens: list[Token], *, pv: Iterable[str] | None = None,
                 signature: FinSignature | None = None, env: Mapping[str, int] | None = None):
        if (pv is None) == (signature is None):
            raise ValueError("exactly one of pv / signature must be given")
        self.tokens = tokens
        self.pos = 0
        self.pv = None if pv is None else frozenset(pv)
        self.sig = signature
        self.env = dict(env or {})
        self.bound: list[str] = []

    # -- token helpers -----------------------------------------------------
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
            shown = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {shown!r}")
        return self.advance()

    def ident(self) -> tuple[str, Token]:
        t = self.tok
        if t.kind != "id" or t.text in self.KEYWORDS:
            raise self.error(f"expected an identifier, found {t.text or 'end of input'!r}")
        self.advance()
        return expand_identifier(t.text, self.env, t), t

    def integer(self) -> int:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return int(t.text)
        if t.kind == "id" and t.text in self.env:
            self.advance()
            return self.env[t.text]
        if t.kind == "op" and t.text == "-" and self.tokens[self.pos + 1].kind == "num":
            self.advance()
            return -int(self.advance().text)
        raise self.error("expected an integer")

    # -- grammar ------------------------------------------------------------
    def formula(self):
        left = self.implication()
        while self.at("<->"):
            self.advance()
            left = Iff(left, self.implication())
        return left

    def implication(self):
        left = self.disjunction()
        if self.at("->"):
            self.advance()
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        args = [self.conjunction()]
        while self.at("|"):
            self.advance()
            args.append(self.conjunction())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conjunction(self):
        args = [self.unary()]
        while self.at("&"):
            self.advance()
            args.append(self.unary())
        return args[0] if len(args) == 1 else AndAll(tuple(args))

    def unary(self):
        if self.at("~"):
            self.advance()
            return Not(self.unary())
        if self.at("AND", "OR"):
            return self.indexed()
        if self.at("forall", "exists"):
            return self.quantified()
        return self.atom()

    def indexed(self):
        word = self.advance().text
        name, tok = self.ident()
        if name in self.env:
            raise self.error(f"index {name!r} shadows an enclosing index", tok)
        self.expect("in")
        lo = self.integer()
        self.expect("..")
        hi = self.integer()
        self.expect(":")
        start = self.pos
        parts = []
        end = None
        for value in range(lo, hi + 1):
            self.pos = start
            self.env[name] = value
            parts.append(self.formula())
            end = self.pos
        self.env.pop(name, None)
        if end is None:  # empty range: parse the body once to skip it, without binding
            self.pos = start
            self.env[name] = lo
            try:
                self.formula()
            except UndeclaredError:
                pass
            self.env.pop(name, None)
        else:
            self.pos = end
        return AndAll(tuple(parts)) if word == "AND" else Or(tuple(parts))

    def quantified(self):
        word = self.advance().text
        if self.sig is None:
            raise self.error(f"'{word}' is only allowed in first-order problems")
        count = None
        if word == "exists" and self.at("="):
            self.advance()
            count = self.integer()
        names = []
        while not self.at("."):
            names.append(self.ident()[0])
        if not names:
            raise self.error("quantifier needs a variable")
        self.expect(".")
        self.bound.extend(names)
        body = self.formula()
        del self.bound[len(self.bound) - len(names):]
        for v in reversed(names):
            if count is not None:
                body = ExistsExactly(count, v, body)
                count = None
            elif word == "forall":
                body = Forall(v, body)
            else:
                body = Exists(v, body)
        return body

    def atom(self):
        t = self.tok
        if self.at("TRUE"):
            self.advance()
            return Top()
        if self.at("FALSE"):
            self.advance()
            return Bottom()
        if self.at("("):
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        if t.kind != "id":
            raise self.error(f"unexpected {t.text or 'end of input'!r}")
        if self.pv is not None:
            name, tok = self.ident()
            if name not in self.pv:
                raise self.error(f"undeclared variable {name!r}", tok, UndeclaredError)
            return Var(name)
        name = expand_identifier(t.text, self.env, t)
        sym = self.sig.get(name)
        if name not in self.bound and sym is not None and sym.kind == "relation":
            self.advance()
            self.expect("(")
            args = [self.term()]
            while self.at(","):
                self.advance()
                args.append(self.term())
            self.expect(")")
            if len(args) != sym.arity:
                raise self.error(f"relation {name} expects {sym.arity} arguments", t)
            return Rel(name, tuple(args))
        left = self.term()
        if self.at("="):
            self.advance()
            return Eq(left, self.term())
        if self.at("!="):
            self.advance()
            return NotEq(left, self.term())
        raise self.error("expected '=' or '!=' after a term")

    def term(self):
        name, tok = self.ident()
        if name in self.bound:
            return TVar(name)
        sym = self.sig.get(name)
        if sym is None:
            raise self.error(f"undeclared symbol {name!r}", tok, UndeclaredError)
        if sym.kind == "constant":
            return Const(name)
        if sym.kind == "function":
            self.expect("(")
            args = [self.term()]
            while self.at(","):
                self.advance()
                args.append(self.term())
            self.expect(")")
            if len(args) != sym.arity:
                raise self.error(f"function {name} expects {sym.arity} arguments", tok)
            return Func(name, tuple(args))
        raise self.error(f"{name!r} is a {sym.kind}, not a term", tok)

    def finish(self):
        if self.tok.kind != "eof":
            raise self.error(f"unexpected trailing {self.tok.text!r}")


def parse_formula(text: str, pv: Iterable[str], env: Mapping[str, int] | None = None):
    """Parse a propositional formula over the declared variables ``pv``."""
    p = Parser(tokenize(text), pv=pv, env=env)
    f = p.formula()
    p.finish()
    return f


def parse_sentence(text: str, signature: FinSignature, env: Mapping[str, int] | None = None):
    """Parse a first-order sentence over ``signature``; free variables are rejected."""
    p = Parser(tokenize(text), signature=signature, env=env)
    f = p.formula()
    p.finish()
    free = free_variables(f)
    if free:
        raise ParseError(f"not a sentence: free variables {sorted(free)}")
    return f


def parse_structure(text: str, signature: FinSignature):
    """Parse ``structure { domain n; c = 0; S = {1}; R = {(0,1)}; f = {0->1, 1->0}; }``."""
    p = Parser(tokenize(text), signature=signature)
    s = structure_from_parser(p)
    p.finish()
    return s


def structure_from_parser(p: Parser):
    from .fostruct import FinStructure

    p.expect("structure")
    p.expect("{")
    if not p.at("domain"):
        raise p.error("a structure literal starts with 'domain n'")
    p.advance()
    n = p.integer()
    interp: dict[str, object] = {}
    while p.at(";"):
        p.advance()
        if p.at("}"):
            break
        name, tok = p.ident()
        sym = p.sig.get(name)
        if sym is None:
            raise p.error(f"undeclared symbol {name!r}", tok, UndeclaredError)
        p.expect("=")
        if sym.kind == "constant":
            interp[name] = p.integer()
        elif sym.kind == "relation":
            interp[name] = _tuple_set(p, sym.arity)
        else:
            interp[name] = _function_table(p, sym.arity)
    p.expect("}")
    missing = [s.name for s in p.sig.symbols if s.name not in interp]
    if missing:
        raise p.error(f"structure leaves {missing} uninterpreted")
    return FinStructure.build(p.sig, n, interp)


def _tuple(p: Parser, arity: int) -> tuple:
    if arity == 1 and not p.at("("):
        return (p.integer(),)
    p.expect("(")
    vals = [p.integer()]
    while p.at(","):
        p.advance()
        vals.append(p.integer())
    p.expect(")")
    if len(vals) != arity:
        raise p.error(f"expected a {arity}-tuple")
    return tuple(vals)


def _tuple_set(p: Parser, arity: int) -> frozenset:
    p.expect("{")
    out = set()
    if not p.at("}"):
        out.add(_tuple(p, arity))
        while p.at(","):
            p.advance()
            out.add(_tuple(p, arity))
    p.expect("}")
    return frozenset(out)


def _function_table(p: Parser, arity: int) -> dict:
    p.expect("{")
    out = {}
    while not p.at("}"):
        args = _tuple(p, arity)
        p.expect("->")
        out[args] = p.integer()
        if p.at(","):
            p.advance()
    p.expect("}")
    return out
