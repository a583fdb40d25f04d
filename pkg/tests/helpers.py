"""Random generators and independent oracles shared by the test modules.

The oracles here deliberately avoid the package's own evaluators: formulas are
evaluated by a separate recursive walk, entailment by a plain loop over
``itertools.product`` assignments, and polytope vertices by a separate
Gaussian elimination.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from indlogic.formula import AndAll, Bottom, Iff, Implies, Not, Or, Top, Var
from indlogic.measure import FiniteProbSpace

# ---------------------------------------------------------------------------
# Random formulas and spaces


def rand_formula(rng: random.Random, pv, depth: int = 3):
    if depth == 0 or rng.random() < 0.3:
        r = rng.random()
        if r < 0.05:
            return Top()
        if r < 0.08:
            return Bottom()
        return Var(rng.choice(pv))
    k = rng.randrange(6)
    if k == 0:
        return Not(rand_formula(rng, pv, depth - 1))
    if k in (1, 2):
        n = rng.randint(2, 3)
        args = tuple(rand_formula(rng, pv, depth - 1) for _ in range(n))
        return AndAll(args) if k == 1 else Or(args)
    if k == 3:
        return Implies(rand_formula(rng, pv, depth - 1), rand_formula(rng, pv, depth - 1))
    if k == 4:
        return Iff(rand_formula(rng, pv, depth - 1), rand_formula(rng, pv, depth - 1))
    return Not(Var(rng.choice(pv)))


def rand_masses(rng: random.Random, n: int, den: int = 12, zero_prob: float = 0.25) -> list[Fraction]:
    """Random point masses on ``n`` outcomes with a common denominator (some zeros)."""
    while True:
        w = [0 if rng.random() < zero_prob else rng.randint(1, den) for _ in range(n)]
        if sum(w):
            total = sum(w)
            return [Fraction(x, total) for x in w]


def rand_partition(rng: random.Random, n: int, max_blocks: int) -> list[int]:
    k = rng.randint(1, min(n, max_blocks))
    labels = [rng.randrange(k) for _ in range(n)]
    blocks: dict = {}
    for i, lab in enumerate(labels):
        blocks[lab] = blocks.get(lab, 0) | 1 << i
    return sorted(blocks.values())


def rand_space(rng: random.Random, n: int, max_blocks: int = 5, zero_prob: float = 0.2) -> FiniteProbSpace:
    """A random probability space on ``n`` outcomes whose σ-algebra has few atoms.

    Only atoms of at most two outcomes may be null, so the completion (which
    splits null atoms into singletons) stays small.
    """
    atoms = rand_partition(rng, n, max_blocks)
    while True:
        w = [0 if bin(a).count("1") <= 2 and rng.random() < zero_prob else rng.randint(1, 12) for a in atoms]
        if sum(w):
            break
    masses = [Fraction(x, sum(w)) for x in w]
    return FiniteProbSpace(tuple(f"w{i}" for i in range(n)), tuple(atoms), tuple(masses))


# ---------------------------------------------------------------------------
# Independent truth-table oracle


def tt_eval(phi, env: dict) -> bool:
    name = type(phi).__name__
    if name == "Var":
        return env[phi.name]
    if name == "Not":
        return not tt_eval(phi.arg, env)
    if name == "AndAll":
        return all(tt_eval(a, env) for a in phi.args)
    if name == "Or":
        return any(tt_eval(a, env) for a in phi.args)
    if name == "Implies":
        return not tt_eval(phi.left, env) or tt_eval(phi.right, env)
    if name == "Iff":
        return tt_eval(phi.left, env) == tt_eval(phi.right, env)
    if name == "Top":
        return True
    if name == "Bottom":
        return False
    raise TypeError(name)


def tt_entails(X, phi, pv) -> bool:
    for values in itertools.product((False, True), repeat=len(pv)):
        env = dict(zip(pv, values))
        if all(tt_eval(x, env) for x in X) and not tt_eval(phi, env):
            return False
    return True


def tt_mask(phi, pv) -> int:
    """Bit ``i`` set when atom ``i`` satisfies ``phi``; variable ``k`` is bit ``k`` of ``i``."""
    m = 0
    for i in range(1 << len(pv)):
        env = {v: bool(i >> k & 1) for k, v in enumerate(pv)}
        if tt_eval(phi, env):
            m |= 1 << i
    return m


# ---------------------------------------------------------------------------
# Independent vertex enumeration


def _row_reduce(rows):
    """Reduced row echelon form of augmented rows; returns independent rows or None if inconsistent."""
    rows = [list(r) for r in rows]
    n = len(rows[0]) - 1 if rows else 0
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
    for row in rows[r:]:
        if row[-1] != 0:
            return None
    return rows[:r]


def oracle_vertices(n: int, eqs) -> list[tuple]:
    """All vertices of ``{x ≥ 0 : a·x = b for (a, b) in eqs}`` by brute force over bases."""
    rows = _row_reduce([[Fraction(v) for v in a] + [Fraction(b)] for a, b in eqs])
    if rows is None:
        return []
    m = len(rows)
    found = set()
    for cols in itertools.combinations(range(n), m):
        sub = [[row[c] for c in cols] + [row[-1]] for row in rows]
        red = _row_reduce(sub)
        if red is None or len(red) < m:
            continue
        x = [Fraction(0)] * n
        # red is the identity on the chosen columns after reduction
        for row in red:
            lead = next(j for j in range(m) if row[j] != 0)
            x[cols[lead]] = row[-1]
        if all(v >= 0 for v in x):
            found.add(tuple(x))
    return sorted(found)
