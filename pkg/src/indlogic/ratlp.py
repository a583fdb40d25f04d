"""Exact rational linear programming over the probability simplex.

The solver is a dense two-phase tableau simplex on :class:`fractions.Fraction`
entries with Bland's rule, which guarantees termination without any
floating-point tolerance.  Problems are small (at most a few hundred atoms),
so a dense tableau is adequate.

Conditional probabilities ``μ(N)/μ(D)`` are optimized with the
Charnes–Cooper substitution ``y = x/μ(D)``, ``t = 1/μ(D)``, which turns the
ratio into a linear objective under the extra constraint ``D·y = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


class Infeasible(ValueError):
    """The constraint system has no solution."""


class Unbounded(ValueError):
    pass


class DenominatorZero(ValueError):
    """The denominator event has mass zero at every feasible point."""


def _vec(v, n: int) -> tuple:
    v = tuple(x if isinstance(x, Fraction) else Fraction(x) for x in v)
    if len(v) != n:
        raise ValueError(f"expected {n} coefficients, got {len(v)}")
    return v


@dataclass(frozen=True)
class LinearConstraintSystem:
    """Constraints on a vector ``x`` of ``n`` nonnegative rationals.

    ``eqs`` holds ``(a, b)`` pairs meaning ``a·x = b`` and ``les`` pairs meaning
    ``a·x ≤ b``.  When ``simplex`` is true (the default) the coordinates also
    sum to one, i.e. ``x`` is a probability vector.
    """

    n: int
    eqs: tuple = ()
    les: tuple = ()
    simplex: bool = True

    def __post_init__(self):
        object.__setattr__(self, "eqs", tuple((_vec(a, self.n), Fraction(b)) for a, b in self.eqs))
        object.__setattr__(self, "les", tuple((_vec(a, self.n), Fraction(b)) for a, b in self.les))

    def with_eq(self, a, b) -> "LinearConstraintSystem":
        return LinearConstraintSystem(self.n, self.eqs + ((a, b),), self.les, self.simplex)

    def with_le(self, a, b) -> "LinearConstraintSystem":
        return LinearConstraintSystem(self.n, self.eqs, self.les + ((a, b),), self.simplex)

    def all_eqs(self) -> list:
        rows = list(self.eqs)
        if self.simplex:
            rows.append(((ONE,) * self.n, ONE))
        return rows

    def satisfied(self, x: Sequence) -> bool:
        """Exact check of every constraint, including nonnegativity."""
        if len(x) != self.n or any(v < 0 for v in x):
            return False
        if any(dot(a, x) != b for a, b in self.all_eqs()):
            return False
        return all(dot(a, x) <= b for a, b in self.les)

    def dump(self) -> str:
        """Plain-text listing, one constraint per line (for debugging)."""
        def row(a):
            terms = [f"{c}*x{i}" for i, c in enumerate(a) if c]
            return " + ".join(terms) or "0"
        lines = [f"{row(a)} = {b}" for a, b in self.all_eqs()]
        lines += [f"{row(a)} <= {b}" for a, b in self.les]
        lines.append(f"x0..x{self.n - 1} >= 0")
        return "\n".join(lines)


def dot(a: Sequence, x: Sequence) -> Fraction:
    return sum((ai * xi for ai, xi in zip(a, x) if ai), ZERO)


def indicator(n: int, mask: int) -> tuple:
    """0/1 coefficient vector of the atoms in a bit mask."""
    return tuple(ONE if mask >> i & 1 else ZERO for i in range(n))


class _Tableau:
    """Simplex tableau for ``min c·x  s.t.  A x = b, x ≥ 0`` with ``b ≥ 0``."""

    def __init__(self, rows: list[list[Fraction]], rhs: list[Fraction], nvars: int):
        m = len(rows)
        self.nvars = nvars
        self.ncols = nvars + m                 # structural columns + one artificial per row
        self.rows = []
        for i, (r, b) in enumerate(zip(rows, rhs)):
            full = list(r) + [ZERO] * m + [b]
            full[nvars + i] = ONE
            self.rows.append(full)
        self.basis = [nvars + i for i in range(m)]
        self.allowed = [True] * self.ncols

    def pivot(self, r: int, c: int) -> None:
        prow = self.rows[r]
        p = prow[c]
        if p != 1:
            prow = [v / p for v in prow]
            self.rows[r] = prow
        nz = [j for j, v in enumerate(prow) if v]
        for i, row in enumerate(self.rows):
            if i != r:
                f = row[c]
                if f:
                    for j in nz:
                        row[j] -= f * prow[j]
        self.basis[r] = c

    def run(self, cost: list[Fraction]) -> None:
        """Minimize ``cost`` (indexed by column) from the current basic feasible solution."""
        z = list(cost) + [ZERO]                # reduced costs; basic columns stay at zero
        for b, row in zip(self.basis, self.rows):
            cb = cost[b]
            if cb:
                for j, v in enumerate(row):
                    if v:
                        z[j] -= cb * v
        while True:
            entering = next((j for j in range(self.ncols) if self.allowed[j] and z[j] < 0), None)
            if entering is None:           # Bland: lowest-index improving column
                return
            leave, best = None, None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    ratio = row[-1] / a
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leave]):
                        leave, best = i, ratio
            if leave is None:
                raise Unbounded("objective is unbounded below")
            self.pivot(leave, entering)
            prow = self.rows[leave]
            f = z[entering]
            for j, v in enumerate(prow):
                if v:
                    z[j] -= f * v

    def value(self, cost: list[Fraction]) -> Fraction:
        return sum((cost[b] * row[-1] for b, row in zip(self.basis, self.rows)), ZERO)

    def solution(self) -> list[Fraction]:
        x = [ZERO] * self.nvars
        for b, row in zip(self.basis, self.rows):
            if b < self.nvars:
                x[b] = row[-1]
        return x


class Solver:
    """Phase-one-feasible tableau for a system; reusable for several objectives."""

    def __init__(self, eqs: list, les: list, nvars: int):
        rows, rhs = [], []
        nslack = len(les)
        total = nvars + nslack
        for a, b in eqs:
            r = list(a) + [ZERO] * nslack
            if b < 0:
                r, b = [-v for v in r], -b
            rows.append(r)
            rhs.append(b)
        for k, (a, b) in enumerate(les):
            r = list(a) + [ZERO] * nslack
            r[nvars + k] = ONE
            if b < 0:
                r, b = [-v for v in r], -b
            rows.append(r)
            rhs.append(b)
        self.nvars = nvars
        self.total = total
        tab = _Tableau(rows, rhs, total)
        phase1 = [ZERO] * total + [ONE] * len(rows)
        tab.run(phase1)
        if tab.value(phase1) != 0:
            raise Infeasible("constraint system is infeasible")
        # drive zero-level artificials out of the basis; drop redundant rows
        i = 0
        while i < len(tab.rows):
            if tab.basis[i] >= total:
                row = tab.rows[i]
                col = next((j for j in range(total) if row[j]), None)
                if col is None:
                    del tab.rows[i]
                    del tab.basis[i]
                    continue
                tab.pivot(i, col)
            i += 1
        for j in range(total, tab.ncols):
            tab.allowed[j] = False
        self.tab = tab

    def point(self) -> list[Fraction]:
        return self.tab.solution()[: self.nvars]

    def minimize(self, c: Sequence) -> tuple[Fraction, list[Fraction]]:
        tab = _Tableau.__new__(_Tableau)
        tab.nvars, tab.ncols = self.tab.nvars, self.tab.ncols
        tab.rows = [list(r) for r in self.tab.rows]
        tab.basis = list(self.tab.basis)
        tab.allowed = list(self.tab.allowed)
        cost = list(c) + [ZERO] * (tab.ncols - len(c))
        tab.run(cost)
        x = tab.solution()[: self.nvars]
        return dot(c, x), x


def _solver(sys: LinearConstraintSystem) -> Solver:
    return Solver(sys.all_eqs(), list(sys.les), sys.n)


def feasible(sys: LinearConstraintSystem) -> list[Fraction] | None:
    """A feasible point (a basic solution), or ``None``."""
    try:
        x = _solver(sys).point()
    except Infeasible:
        return None
    assert sys.satisfied(x)
    return x


@dataclass(frozen=True)
class OptResult:
    min: Fraction
    max: Fraction
    argmin: tuple
    argmax: tuple


def optimize(objective: Sequence, sys: LinearConstraintSystem) -> OptResult:
    """Exact minimum and maximum of ``objective·x`` over the feasible polytope."""
    c = _vec(objective, sys.n)
    s = _solver(sys)
    lo, xlo = s.minimize(c)
    neg_hi, xhi = s.minimize([-v for v in c])
    assert sys.satisfied(xlo) and sys.satisfied(xhi)
    return OptResult(lo, -neg_hi, tuple(xlo), tuple(xhi))


@dataclass(frozen=True)
class BoundsResult:
    """Infimum/supremum of a ratio with attainment flags and (approaching) witnesses."""

    lower: Fraction
    upper: Fraction
    lower_attained: bool
    upper_attained: bool
    witness_low: tuple
    witness_high: tuple

    @property
    def forced(self) -> bool:
        return self.lower == self.upper and self.lower_attained and self.upper_attained


def positive_point(sys: LinearConstraintSystem, strict: Sequence) -> list[Fraction] | None:
    """A feasible point giving every vector in ``strict`` a positive value, or ``None``.

    Uses convexity: if each ``s`` can be made positive separately, the average of
    the maximizers makes all of them positive at once.
    """
    try:
        s = _solver(sys)
    except Infeasible:
        return None
    pts = [s.point()]
    for v in strict:
        v = _vec(v, sys.n)
        val, x = s.minimize([-c for c in v])
        if -val <= 0:
            return None
        pts.append(x)
    k = len(pts)
    x = [sum(col, ZERO) / k for col in zip(*pts)]
    assert sys.satisfied(x) and all(dot(_vec(v, sys.n), x) > 0 for v in strict)
    return x


def ratio_bounds(numerator, denominator, sys: LinearConstraintSystem, strict: Sequence = ()) -> BoundsResult:
    """Bounds of ``μ(N∩D)/μ(D)`` over feasible ``x`` with ``μ(D) > 0`` and every
    ``strict`` vector positive.

    ``numerator``/``denominator`` are 0/1 vectors (or bit masks) over the atoms.
    The optimum over the closure is computed with the Charnes–Cooper program;
    a bound counts as attained when some feasible point realizes it with the
    denominator and all ``strict`` vectors positive.
    """
    n = sys.n
    num = indicator(n, numerator) if isinstance(numerator, int) else _vec(numerator, n)
    den = indicator(n, denominator) if isinstance(denominator, int) else _vec(denominator, n)
    strict = [indicator(n, s) if isinstance(s, int) else _vec(s, n) for s in strict]
    num = tuple(a if d else ZERO for a, d in zip(num, den))
    if positive_point(sys, strict) is None:
        raise Infeasible("no feasible point makes the required antecedents positive")
    # variables y_0..y_{n-1}, t
    eqs, les = [], []
    for a, b in sys.eqs:
        eqs.append((list(a) + [-b], ZERO))
    for a, b in sys.les:
        les.append((list(a) + [-b], ZERO))
    if sys.simplex:
        eqs.append(([ONE] * n + [-ONE], ZERO))
    eqs.append((list(den) + [ZERO], ONE))
    try:
        solver = Solver(eqs, les, n + 1)
    except Infeasible:
        raise DenominatorZero("the conditioning event has mass zero at every feasible point") from None
    obj = list(num) + [ZERO]
    lo, ylo = solver.minimize(obj)
    neg_hi, yhi = solver.minimize([-v for v in obj])
    hi = -neg_hi

    def attain(value, y):
        # the optimal face, in the original coordinates: μ(N∩D) = value·μ(D)
        face = sys.with_eq(tuple(a - value * d for a, d in zip(num, den)), ZERO)
        x = positive_point(face, strict + [den])
        if x is not None:
            return True, tuple(x)
        t = y[-1]
        return False, tuple(v / t for v in y[:-1])

    lo_ok, wlo = attain(lo, ylo)
    hi_ok, whi = attain(hi, yhi)
    return BoundsResult(lo, hi, lo_ok, hi_ok, wlo, whi)


def _solve_square(rows: list, rhs: list) -> list[Fraction] | None:
    """Exact Gauss–Jordan solve of a square system; ``None`` when singular."""
    k = len(rows)
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(k):
        piv = next((i for i in range(col, k) if m[i][col]), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [v / p for v in m[col]]
        for i in range(k):
            if i != col and m[i][col]:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[col])]
    return [m[i][k] for i in range(k)]


def _independent_rows(eqs: list) -> list:
    """A maximal linearly independent subset of equality rows (consistent systems only)."""
    basis: list = []   # reduced rows with their pivot columns
    kept = []
    for a, b in eqs:
        r = list(a) + [b]
        for piv, br in basis:
            if r[piv]:
                f = r[piv]
                r = [x - f * y for x, y in zip(r, br)]
        piv = next((j for j in range(len(a)) if r[j]), None)
        if piv is None:
            if r[-1]:
                raise Infeasible("inconsistent equality constraints")
            continue
        r = [v / r[piv] for v in r]
        basis = [(p, [x - br[piv] * y for x, y in zip(br, r)]) for p, br in basis]
        basis.append((piv, r))
        kept.append((a, b))
    return kept


def vertices(sys: LinearConstraintSystem, max_bases: int = 2_000_000) -> list[tuple]:
    """Every vertex of the feasible polytope, by exhaustive basis enumeration.

    Inequalities get slack columns; each choice of as many columns as there
    are independent equality rows is solved exactly and kept when
    nonnegative.  Exponential, so only meant for small systems.
    """
    from itertools import combinations
    from math import comb

    n, k = sys.n, len(sys.les)
    total = n + k
    eqs = [(list(a) + [ZERO] * k, b) for a, b in sys.all_eqs()]
    for j, (a, b) in enumerate(sys.les):
        row = list(a) + [ZERO] * k
        row[n + j] = ONE
        eqs.append((row, b))
    rows = _independent_rows(eqs)
    r = len(rows)
    if comb(total, r) > max_bases:
        raise ValueError("too many candidate bases for vertex enumeration")
    found = []
    seen = set()
    for cols in combinations(range(total), r):
        sol = _solve_square([[row[c] for c in cols] for row, _ in rows], [b for _, b in rows])
        if sol is None or any(v < 0 for v in sol):
            continue
        x = [ZERO] * total
        for c, v in zip(cols, sol):
            x[c] = v
        key = tuple(x[:n])
        if key not in seen:
            seen.add(key)
            found.append(key)
    if not found:
        raise Infeasible("constraint system is infeasible")
    return found
