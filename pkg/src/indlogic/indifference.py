"""The principle of indifference over finite first-order signatures.

A signature permutation ``π`` leaves the root ``T0`` invariant when ``T0^π``
and ``T0`` have the same models.  Indifference then demands
``P(φ^π | X^π) = P(φ | X)`` whenever both sides are defined.

Everything here is decided over the *bounded universe*: the isomorphism
classes of models of ``T0`` with domain size at most ``bound``.  For
signatures with only constants and unary relations this is complete (the
monadic finite-model property); otherwise results carry a ``bounded-check``
caveat.

Forcing is decided by linear programming.  The unknowns are the masses of the
classes (aggregated into the atoms generated by the relevant sentence events).
The constraints are the assumed statements plus the orbit equalities
``μ(E_φ) = μ(π E_φ)`` for each invariant ``π`` and each sentence whose
probability must exist.  A value is *forced* when the lower and upper bounds
coincide and are attained.  Forced values come with a deletion-minimal
certificate of orbit equalities.  Unforced ones come with two explicit models
that pass the full bounded indifference check and give different values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .fostruct import (FinModel, FinStructure, canonical_key, conditional_prob, count_structures,
                       enumerate_structures, eval_all, eval_sentence, model_iso, pi_image_model,
                       pi_image_structure)
from .formula import (AndAll, FinSignature, Formula, SignaturePermutation, all_permutations, permute,
                      to_text)
from .measure import atoms_of
from .events import members
from .ratlp import (DenominatorZero, Infeasible, LinearConstraintSystem, optimize, positive_point,
                    ratio_bounds)

ZERO, ONE = Fraction(0), Fraction(1)
DEFAULT_BOUND = 4
MAX_RAW_STRUCTURES = 2_000_000


class UniverseTooLarge(ValueError):
    pass


def enumerate_permutations(sig: FinSignature, cap: int = 3628800) -> list[SignaturePermutation]:
    """All kind- and arity-preserving symbol bijections, identity first."""
    return all_permutations(sig, cap)


# ---------------------------------------------------------------------------
# Bounded universe


@dataclass(frozen=True)
class Universe:
    """Isomorphism classes of the root's models with domain size at most ``bound``."""

    signature: FinSignature
    axioms: tuple
    bound: int
    reps: tuple            # one representative structure per class
    keys: tuple            # canonical key per class

    @property
    def size(self) -> int:
        return len(self.reps)

    @property
    def full(self) -> int:
        return (1 << len(self.reps)) - 1

    def index(self, omega: FinStructure) -> int | None:
        return self._index.get(canonical_key(omega))

    @property
    def _index(self) -> dict:
        cache = self.__dict__.get("_idx")
        if cache is None:
            cache = {k: i for i, k in enumerate(self.keys)}
            object.__setattr__(self, "_idx", cache)
        return cache

    def event(self, phis: Formula | Sequence[Formula]) -> int:
        phis = list(phis) if isinstance(phis, (list, tuple)) else [phis]
        return sum(1 << i for i, w in enumerate(self.reps) if eval_all(w, phis))

    def class_map(self, pi: SignaturePermutation) -> list:
        """``i ↦ j`` with ``π(class i) = class j``, or ``None`` when the image leaves the universe."""
        cache = self.__dict__.setdefault("_maps", {})
        hit = cache.get(pi.mapping)
        if hit is None:
            hit = [self.index(pi_image_structure(w, pi)) for w in self.reps]
            cache[pi.mapping] = hit
        return hit

    def image(self, pi: SignaturePermutation, mask: int) -> int:
        m = self.class_map(pi)
        out = 0
        for i in members(mask):
            if m[i] is None:
                raise ValueError("the event is not mapped into the universe")
            out |= 1 << m[i]
        return out

    def is_invariant(self, pi: SignaturePermutation) -> bool:
        return all(j is not None for j in self.class_map(pi))

    def model(self, masses: Sequence[Fraction]) -> FinModel:
        return FinModel(tuple((w, m) for w, m in zip(self.reps, masses)))


@lru_cache(maxsize=64)
def build_universe(signature: FinSignature, axioms: tuple, bound: int) -> Universe:
    """Enumerate every structure up to the bound, keep the root's models, deduplicate by isomorphism."""
    total = sum(count_structures(signature, n) for n in range(1, bound + 1))
    if total > MAX_RAW_STRUCTURES:
        raise UniverseTooLarge(f"{total} raw structures up to size {bound}; lower the bound")
    seen: dict = {}
    for n in range(1, bound + 1):
        for w in enumerate_structures(signature, n):
            if eval_all(w, axioms):
                k = canonical_key(w)
                if k not in seen:
                    seen[k] = w
    keys = sorted(seen)
    return Universe(signature, tuple(axioms), bound, tuple(seen[k] for k in keys), tuple(keys))


def invariant(axioms: Sequence[Formula], pi: SignaturePermutation, bound: int = DEFAULT_BOUND,
              signature: FinSignature | None = None) -> bool:
    """Whether ``T0`` and ``T0^π`` have the same models of size at most ``bound``.

    The models of ``T0^π`` are the ``π``-images of models of ``T0`` and ``π`` is
    a bijection on structures of each size, so it suffices that every model of
    ``T0`` satisfies the permuted axioms.
    """
    sig = signature or pi.signature
    u = build_universe(sig, tuple(axioms), bound)
    permuted = [permute(a, pi) for a in axioms]
    return all(eval_all(w, permuted) for w in u.reps)


def bounded_entails(axioms: Sequence[Formula], phi: Formula, signature: FinSignature,
                    bound: int = DEFAULT_BOUND) -> bool:
    """``axioms ⊢ φ`` checked on every model of size at most ``bound``."""
    u = build_universe(signature, tuple(axioms), bound)
    return all(eval_sentence(w, phi) for w in u.reps)


# ---------------------------------------------------------------------------
# Verification of a model


@dataclass(frozen=True)
class R10Violation:
    permutation: str
    antecedent: str
    consequent: str
    value: Fraction | None
    image_value: Fraction | None


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    violations: tuple = ()
    full_check: bool | None = None        # exhaustive bounded check (needs the universe)
    iso_sufficient: bool | None = None    # sP ≃ sP^π for every π
    failing_permutations: tuple = ()


def _parallel(a: Sequence[Fraction], b: Sequence[Fraction]) -> bool:
    """Whether two nonnegative vectors are proportional (one may be zero)."""
    r = next((i for i, x in enumerate(a) if x), None)
    if r is None or not any(b):
        return True
    lam = b[r] / a[r]
    return all(y == lam * x for x, y in zip(a, b))


def full_r10_check(universe: Universe, masses: Sequence[Fraction], perms: Iterable[SignaturePermutation]) -> list:
    """Permutations under which indifference fails for a measure on the universe's classes.

    For antecedents ``X ⊇ T0`` the permuted antecedent ``X^π`` contains ``T0``
    exactly when ``X``'s event lies in ``K = {c : π c ∈ universe}``.  Every
    class set is definable by a sentence, so indifference for all
    ``(X, φ)`` amounts to ``μ(π·)`` being proportional to ``μ`` on ``K``.
    """
    bad = []
    for pi in perms:
        if pi.is_identity:
            continue
        m = universe.class_map(pi)
        K = [i for i, j in enumerate(m) if j is not None]
        a = [masses[i] for i in K]
        b = [masses[m[i]] for i in K]
        if not _parallel(a, b):
            bad.append(pi)
    return bad


def poi_verify(model: FinModel, perms: Sequence[SignaturePermutation], statements: Sequence[tuple],
               axioms: Sequence[Formula] = (), bound: int | None = None) -> VerifyReport:
    """Check indifference in a finite model.

    ``statements`` are ``(antecedent sentences, consequent)`` pairs; each
    antecedent should include the root axioms.  For every ``π`` and every
    pair whose original and permuted conditional probabilities are both
    defined, the two must agree.  The permuted antecedent counts as an
    antecedent only if it still entails the root at the bound.  When
    ``bound`` is given, the exhaustive check over all antecedents is run too.
    The sufficient test ``sP ≃ sP^π`` is reported alongside.
    """
    sig = model.signature
    universe = build_universe(sig, tuple(axioms), bound) if bound is not None else None
    violations = []
    for pi in perms:
        if pi.is_identity:
            continue
        for X, phi in statements:
            X = list(X)
            p = conditional_prob(model, X, phi)
            if p is None:
                continue
            Xp = [permute(x, pi) for x in X]
            if universe is not None and not _entails_root(universe, Xp, pi, X):
                continue
            q = conditional_prob(model, Xp, permute(phi, pi))
            if q is not None and q != p:
                violations.append(R10Violation(pi.cycles(), ", ".join(to_text(x) for x in X), to_text(phi), p, q))
    full = None
    failing: tuple = ()
    if universe is not None:
        masses = [ZERO] * universe.size
        outside = ZERO
        for w, m in model.outcomes:
            i = universe.index(w)
            if i is None:
                outside += m
            else:
                masses[i] += m
        if outside:
            full = False
        else:
            failing = tuple(p.cycles() for p in full_r10_check(universe, masses, perms))
            full = not failing
    try:
        iso = all(model_iso(model, pi_image_model(model, pi)) for pi in perms)
    except ValueError:
        iso = None
    ok = not violations and full is not False
    return VerifyReport(ok, tuple(violations), full, iso, failing)


def _entails_root(universe: Universe, Xp: list, pi: SignaturePermutation, X: list) -> bool:
    """``X^π ⊢ T0`` at the bound: every class of ``X`` is mapped into the universe."""
    m = universe.class_map(pi)
    ev = universe.event(X)
    return all(m[i] is not None for i in members(ev))


# ---------------------------------------------------------------------------
# Problems and verdicts


@dataclass(frozen=True)
class PoIQuery:
    """``P(sentence | T0, extras)``."""

    sentence: Formula
    extras: tuple = ()

    def text(self) -> str:
        cond = ", ".join(["T0"] + [to_text(e) for e in self.extras])
        return f"P({to_text(self.sentence)} | {cond})"


@dataclass(frozen=True)
class PoIAssumption:
    sentence: Formula
    prob: Fraction
    extras: tuple = ()

    def text(self) -> str:
        return PoIQuery(self.sentence, self.extras).text() + f" = {self.prob}"


@dataclass(frozen=True)
class PoIIndependence:
    """The members are independent given ``T0`` plus ``extras``."""

    members: tuple
    extras: tuple = ()


@dataclass(frozen=True)
class PoIProblem:
    signature: FinSignature
    axioms: tuple
    assumed: tuple = ()
    queries: tuple = ()
    independence: tuple = ()
    bound: int = DEFAULT_BOUND
    name: str = ""

    def __post_init__(self):
        if self.bound < 1:
            raise ValueError("the domain bound must be at least 1")
        qs = tuple(q if isinstance(q, PoIQuery) else PoIQuery(q) for q in self.queries)
        object.__setattr__(self, "queries", qs)
        object.__setattr__(self, "axioms", tuple(self.axioms))
        object.__setattr__(self, "assumed", tuple(self.assumed))
        object.__setattr__(self, "independence", tuple(self.independence))


@dataclass(frozen=True)
class OrbitEquality:
    """``P(φ | X) = P(φ^π | X^π)`` with ``X^π ≡ X`` at the bound."""

    permutation: str
    sentence: str
    image: str
    condition: str = "T0"

    def text(self) -> str:
        return f"{self.permutation}: P({self.sentence} | {self.condition}) = P({self.image} | {self.condition})"


@dataclass(frozen=True)
class Fact:
    text_: str

    def text(self) -> str:
        return self.text_


@dataclass(frozen=True)
class PoIForced:
    value: Fraction
    certificate: tuple = ()
    witness: FinModel | None = None
    status: str = "forced"


@dataclass(frozen=True)
class PoINotForced:
    lower: Fraction
    upper: Fraction
    lower_attained: bool
    upper_attained: bool
    witnesses: tuple = ()
    witness_values: tuple = ()
    equalities: tuple = ()
    status: str = "not-forced"


@dataclass(frozen=True)
class PoIInconsistent:
    reason: str = ""
    status: str = "inconsistent"


@dataclass(frozen=True)
class PoIVerdict:
    problem: PoIProblem
    results: tuple                 # (PoIQuery, result) pairs
    invariant_permutations: tuple  # cycle strings
    universe_size: int
    caveats: tuple = ()
    consistent: bool | None = None

    def result(self, i: int = 0):
        return self.results[i][1]


# ---------------------------------------------------------------------------
# Constraint system


@dataclass
class _Row:
    vec: tuple          # coefficients over classes
    kind: str           # "orbit" | "assumed" | "independence"
    label: object
    sentences: tuple = ()   # formulas whose events the row relates
    deps: tuple = ()        # orbit rows that justified an independence row


class _System:
    """Linear constraints over class masses, solved on the atoms they generate."""

    def __init__(self, universe: Universe):
        self.u = universe
        self.rows: list[_Row] = []
        self.strict: list[int] = []      # masks that must get positive mass

    def add(self, coeffs: dict, kind: str, label, sentences: tuple = (), deps: tuple = ()) -> None:
        vec = [ZERO] * self.u.size
        for mask, c in coeffs.items():
            for i in members(mask):
                vec[i] += c
        if any(vec):
            self.rows.append(_Row(tuple(vec), kind, label, sentences, deps))

    def compile(self, rows: Sequence[_Row], extra_masks: Sequence[int] = ()):
        """Aggregate classes into atoms; returns (atoms, LinearConstraintSystem, to_atoms)."""
        masks = list(extra_masks) + self.strict
        for r in rows:
            by_coef: dict = {}
            for i, c in enumerate(r.vec):
                if c:
                    by_coef[c] = by_coef.get(c, 0) | 1 << i
            masks += list(by_coef.values())
        atoms = atoms_of(self.u.size, masks)
        rep = [next(iter(members(a))) for a in atoms]
        eqs = [(tuple(r.vec[i] for i in rep), ZERO) for r in rows]
        sys = LinearConstraintSystem(len(atoms), tuple(eqs))

        def to_atoms(mask: int) -> tuple:
            return tuple(ONE if a & mask == a else ZERO if a & mask == 0 else _split(a, mask) for a in atoms)

        return atoms, sys, to_atoms


def _split(atom: int, mask: int):
    raise AssertionError("event is not a union of atoms")


def _orbits(universe: Universe, group: Sequence[SignaturePermutation]) -> list[int]:
    seen = 0
    out = []
    for i in range(universe.size):
        if seen >> i & 1:
            continue
        orb = 0
        for pi in group:
            orb |= 1 << universe.class_map(pi)[i]
        seen |= orb
        out.append(orb)
    return out


class _Engine:
    def __init__(self, problem: PoIProblem):
        self.p = problem
        self.u = build_universe(problem.signature, problem.axioms, problem.bound)
        self.perms = enumerate_permutations(problem.signature)
        self.group = [pi for pi in self.perms if self.u.is_invariant(pi)]
        self.others = [pi for pi in self.perms if not self.u.is_invariant(pi)]
        self.sys = _System(self.u)
        self.caveats = []
        if not problem.signature.is_monadic:
            self.caveats.append("bounded-check: the signature has binary relations or functions, so "
                                f"invariance and entailment were checked only up to domain size {problem.bound}")

    # -- events -------------------------------------------------------------
    def ev(self, phis) -> int:
        return self.u.event(phis)

    def base_pairs(self) -> list[tuple]:
        """(condition sentences, target sentence) pairs whose probabilities must exist."""
        out = []
        for q in self.p.queries:
            out.append(((), _conj((q.sentence,) + q.extras)))
            for e in q.extras:
                out.append(((), e))
            out.append((q.extras, q.sentence))
        for a in self.p.assumed:
            out.append(((), _conj((a.sentence,) + a.extras)))
            if a.extras:
                out.append(((), _conj(a.extras)))
            out.append((a.extras, a.sentence))
        for ind in self.p.independence:
            for k in range(1, len(ind.members) + 1):
                for J in itertools.combinations(ind.members, k):
                    out.append((ind.extras, _conj(J)))
        uniq = []
        for item in out:
            if item not in uniq:
                uniq.append(item)
        return uniq

    def build(self) -> None:
        sys = self.sys
        for a in self.p.assumed:
            d = self.ev(list(a.extras))
            n = d & self.ev(a.sentence)
            sys.add({n: ONE, d: -a.prob} if n != d else {d: ONE - a.prob}, "assumed", a)
            sys.strict.append(d)
        for q in self.p.queries:
            sys.strict.append(self.ev(list(q.extras)))
        for ind in self.p.independence:
            sys.strict.append(self.ev(list(ind.extras)))
        seen = set()
        for cond, phi in self.base_pairs():
            d = self.ev(list(cond))
            a = d & self.ev(phi)
            for pi in self.group:
                if pi.is_identity or self.u.image(pi, d) != d:
                    continue
                img = self.u.image(pi, a)
                if img == a or (img, a) in seen or (a, img) in seen:
                    continue
                seen.add((a, img))
                label = OrbitEquality(pi.cycles(), to_text(phi), to_text(permute(phi, pi)),
                                      ", ".join(["T0"] + [to_text(c) for c in cond]))
                self.sys.add(_diff(a, img), "orbit", label, (phi, permute(phi, pi)))

    # -- solving ------------------------------------------------------------
    def bounds(self, rows, num: int, den: int):
        atoms, sys, to_atoms = self.sys.compile(rows, [num, den])
        strict = [to_atoms(m) for m in self.sys.strict]
        b = ratio_bounds(to_atoms(num & den), to_atoms(den), sys, strict)
        return b, atoms

    def feasible(self, rows) -> bool:
        atoms, sys, to_atoms = self.sys.compile(rows)
        return positive_point(sys, [to_atoms(m) for m in self.sys.strict]) is not None

    def linearize_independence(self) -> None:
        """Add product identities that become linear once all but one factor is forced."""
        forced: dict = {}
        why: dict = {}
        for _ in range(len(self.p.independence) * 4 + 1):
            added = False
            for ind in self.p.independence:
                d = self.ev(list(ind.extras))
                for phi in ind.members:
                    key = (ind.extras, phi)
                    if key in forced:
                        continue
                    try:
                        b, _ = self.bounds(self.sys.rows, self.ev(phi), d)
                    except (Infeasible, DenominatorZero):
                        return
                    if b.forced:
                        forced[key] = b.lower
                        why[key] = tuple(r for r in self.certificate(self.ev(phi) & d, d, b.lower)
                                         if r.kind == "orbit")
                for k in range(2, len(ind.members) + 1):
                    for J in itertools.combinations(ind.members, k):
                        known = [forced.get((ind.extras, f)) for f in J]
                        free = [f for f, v in zip(J, known) if v is None]
                        if len(free) > 1:
                            continue
                        coef = ONE
                        for v in known:
                            if v is not None:
                                coef *= v
                        joint = d & self.ev(list(J))
                        rest = d & (self.ev(free[0]) if free else self.u.full)
                        label = Fact(f"independence: P({' & '.join(to_text(f) for f in J)} | "
                                     f"{', '.join(['T0'] + [to_text(e) for e in ind.extras])}) = product")
                        if any(r.label == label for r in self.sys.rows):
                            continue
                        deps = tuple(r for f in J if f not in free for r in why[(ind.extras, f)])
                        target = rest if free else d
                        self.sys.add(_lin({joint: ONE}, {target: -coef}), "independence", label, J, deps)
                        added = True
            if not added:
                return

    def certificate(self, q_num: int, q_den: int, value: Fraction) -> list[_Row]:
        keep = list(self.sys.rows)
        i = 0
        while i < len(keep):
            if keep[i].kind != "orbit":
                i += 1
                continue
            trial = keep[:i] + keep[i + 1:]
            try:
                b, _ = self.bounds(trial, q_num, q_den)
                ok = b.forced and b.lower == value
            except (Infeasible, DenominatorZero):
                ok = False
            if ok:
                keep = trial
            else:
                i += 1
        return keep

    # -- witnesses ----------------------------------------------------------
    def _support_system(self, S: int):
        """Constraints for measures supported on the class set ``S``.

        Returns the base rows (assumptions, orbit and independence rows), the
        partition forced by pointwise invariance under the invariant group,
        and, per non-invariant permutation, the three ways the proportionality
        requirement on ``K = {c : π c ∈ universe}`` can be met: ``μ∘π = μ`` on
        ``K``, ``μ`` vanishes on ``K``, or ``μ∘π`` vanishes on ``K``.  Each
        option is a list of class identifications ``(c, j)`` and zeroings
        ``(c, None)``; classes outside ``S`` count as zero.
        """
        inside = set(members(S))
        part = _Partition(self.u.size, inside)
        for pi in self.group:
            for c, j in enumerate(self.u.class_map(pi)):
                if c in inside:
                    part.join(c, j)
        choices = []
        for pi in self.others:
            m = self.u.class_map(pi)
            pairs = [(c, j) for c, j in enumerate(m) if j is not None and (c in inside or j in inside)]
            if not pairs or all(c == j for c, j in pairs):
                continue
            opt_c = [(c, j) for c, j in pairs if c != j]
            opt_a = [(c, None) for c, _ in pairs if c in inside]
            opt_b = [(j, None) for _, j in pairs if j in inside]
            choices.append((opt_c, opt_a, opt_b))
        return part, choices

    def _reduced(self, part: "_Partition", num: int, den: int):
        """The LP over the blocks of ``part``; ``None`` when a strict event is forced to zero.

        Block variables are block totals, spread evenly over the block's
        classes, so each class coefficient is weighted by ``1/|block|``.
        """
        blocks = part.blocks()
        where = {c: k for k, b in enumerate(blocks) for c in b}

        def vec(coeffs) -> tuple:
            v = [ZERO] * len(blocks)
            for c, x in coeffs:
                k = where.get(c)
                if k is not None:
                    v[k] += x / len(blocks[k])
            return tuple(v)

        eqs = []
        for r in self.sys.rows:
            v = vec((c, x) for c, x in enumerate(r.vec) if x)
            if any(v):
                eqs.append((v, ZERO))
        strict = [vec((c, ONE) for c in members(m)) for m in self.sys.strict]
        denv = vec((c, ONE) for c in members(den))
        if not any(denv) or any(not any(v) for v in strict):
            return None
        numv = vec((c, ONE) for c in members(num & den))
        return blocks, LinearConstraintSystem(len(blocks), tuple(eqs)), numv, denv, strict

    def witness_candidates(self, num: int, den: int, want: int = 2, max_domain_steps: int = 2) -> list:
        """Models passing the exact indifference check, found on small-domain supports.

        Stops once ``want`` distinct query values have been found.
        """
        sizes = sorted({w.n for w in self.u.reps})
        found = []
        for d in sizes[:max_domain_steps]:
            S = sum(1 << i for i, w in enumerate(self.u.reps) if w.n <= d)
            found += self._search_support(S, num, den)
            if len({v for v, _ in found}) >= want:
                break
        return found

    def _search_support(self, S: int, num: int, den: int) -> list:
        base, choices = self._support_system(S)
        out = []
        for sense in (1, -1):
            part = base
            ok = True
            for opts in choices:
                best = None
                for opt in opts:
                    trial = part.copy()
                    trial.apply(opt)
                    lp = self._reduced(trial, num, den)
                    if lp is None:
                        continue
                    _, sys, numv, denv, strict = lp
                    try:
                        b = ratio_bounds(numv, denv, sys, strict)
                    except (Infeasible, DenominatorZero):
                        continue
                    score = b.upper if sense == 1 else -b.lower
                    if best is None or score > best[0]:
                        best = (score, trial)
                if best is None:
                    ok = False
                    break
                part = best[1]
            if not ok:
                continue
            lp = self._reduced(part, num, den)
            if lp is None:
                continue
            blocks, sys, numv, denv, strict = lp
            try:
                b = ratio_bounds(numv, denv, sys, strict)
            except (Infeasible, DenominatorZero):
                continue
            w, att = (b.witness_high, b.upper_attained) if sense == 1 else (b.witness_low, b.lower_attained)
            if not att:
                base_pt = positive_point(sys, strict + [denv])
                w = [(x + y) / 2 for x, y in zip(w, base_pt)]
            masses = [ZERO] * self.u.size
            for blk, x in zip(blocks, w):
                for c in blk:
                    masses[c] = x / len(blk)
            if self.check_model(masses):
                out.append((_mass(masses, num & den) / _mass(masses, den), masses))
        return out

    def check_model(self, masses) -> bool:
        if full_r10_check(self.u, masses, self.perms):
            return False
        for a in self.p.assumed:
            d = self.ev(list(a.extras))
            md = _mass(masses, d)
            if md == 0 or _mass(masses, d & self.ev(a.sentence)) != a.prob * md:
                return False
        for q in self.p.queries:
            if _mass(masses, self.ev(list(q.extras))) == 0:
                return False
        for ind in self.p.independence:
            d = self.ev(list(ind.extras))
            md = _mass(masses, d)
            if md == 0:
                return False
            probs = {f: _mass(masses, d & self.ev(f)) / md for f in ind.members}
            for k in range(2, len(ind.members) + 1):
                for J in itertools.combinations(ind.members, k):
                    prod = ONE
                    for f in J:
                        prod *= probs[f]
                    if _mass(masses, d & self.ev(list(J))) / md != prod:
                        return False
        return True


class _Partition:
    """Classes glued into blocks of equal mass, plus a set of classes forced to zero."""

    def __init__(self, n: int, inside: set):
        self.parent = list(range(n))
        self.zero = [c not in inside for c in range(n)]

    def copy(self) -> "_Partition":
        out = _Partition.__new__(_Partition)
        out.parent, out.zero = list(self.parent), list(self.zero)
        return out

    def find(self, c: int) -> int:
        while self.parent[c] != c:
            self.parent[c] = self.parent[self.parent[c]]
            c = self.parent[c]
        return c

    def join(self, a: int, b: int | None) -> None:
        ra = self.find(a)
        if b is None:
            self.zero[ra] = True
            return
        rb = self.find(b)
        if ra != rb:
            self.parent[rb] = ra
            self.zero[ra] = self.zero[ra] or self.zero[rb]

    def apply(self, ops) -> None:
        for a, b in ops:
            self.join(a, b)

    def blocks(self) -> list[tuple]:
        groups: dict = {}
        for c in range(len(self.parent)):
            r = self.find(c)
            if not self.zero[r]:
                groups.setdefault(r, []).append(c)
        return [tuple(g) for g in groups.values()]


def _conj(items: Sequence[Formula]) -> Formula:
    return items[0] if len(items) == 1 else AndAll(tuple(items))


def _mass(masses, mask: int) -> Fraction:
    return sum((masses[i] for i in members(mask)), ZERO)


def _diff(a: int, b: int) -> dict:
    return _lin({a: ONE}, {b: -ONE})


def _lin(*parts: dict) -> dict:
    out: dict = {}
    for p in parts:
        for k, v in p.items():
            out[k] = out.get(k, ZERO) + v
    return out


def _additivity_facts(engine: _Engine, rows: Sequence[_Row], query: PoIQuery) -> list[Fact]:
    """Root-level disjointness and exhaustiveness among the sentences a certificate mentions."""
    events = {to_text(query.sentence): engine.ev(query.sentence)}
    for r in rows:
        for f in r.sentences:
            events.setdefault(to_text(f), engine.ev(f))
    names = sorted(events)
    ante = ", ".join(["T0"] + [to_text(e) for e in query.extras])
    den = engine.ev(list(query.extras))
    mine = den & events[to_text(query.sentence)]
    if mine == 0:
        return [Fact(f"{ante} ⊢ ¬({to_text(query.sentence)})")]
    if mine == den:
        return [Fact(f"{ante} ⊢ {to_text(query.sentence)}")]
    facts = [Fact(f"T0 ⊢ ¬(({x}) ∧ ({y}))") for x, y in itertools.combinations(names, 2)
             if events[x] & events[y] == 0]
    union = 0
    for v in events.values():
        union |= v
    if union == engine.u.full and len(names) > 1:
        facts.append(Fact("T0 ⊢ " + " ∨ ".join(f"({x})" for x in names)))
    return facts


def poi_forced(problem: PoIProblem) -> PoIVerdict:
    """Derive every query's value under the root, the assumptions and indifference."""
    eng = _Engine(problem)
    inv = tuple(pi.cycles() for pi in eng.group)
    if eng.u.size == 0:
        res = tuple((q, PoIInconsistent("the root has no models up to the bound")) for q in problem.queries)
        return PoIVerdict(problem, res, inv, 0, tuple(eng.caveats), False)
    eng.build()
    eng.linearize_independence()
    if not eng.feasible(eng.sys.rows):
        res = tuple((q, PoIInconsistent("no measure satisfies the assumptions and orbit equalities"))
                    for q in problem.queries)
        return PoIVerdict(problem, res, inv, eng.u.size, tuple(eng.caveats), False)
    results = []
    consistent = None
    for q in problem.queries:
        den = eng.ev(list(q.extras))
        num = den & eng.ev(q.sentence)
        b, _ = eng.bounds(eng.sys.rows, num, den)
        found = eng.witness_candidates(num, den, want=1 if b.forced else 2)
        if found:
            consistent = True
        if b.forced:
            rows = eng.certificate(num, den, b.lower)
            for r in [r for r in rows if r.kind == "independence"]:
                rows += [d for d in r.deps if d not in rows]
            cert = [r.label for r in rows if r.kind == "orbit"]
            cert += [r.label for r in rows if r.kind == "independence"]
            cert += _additivity_facts(eng, rows, q)
            witness = eng.u.model(found[0][1]) if found else None
            results.append((q, PoIForced(b.lower, tuple(cert), witness)))
        else:
            lo = min(found, key=lambda t: t[0], default=None)
            hi = max(found, key=lambda t: t[0], default=None)
            if lo is not None and lo[0] != hi[0]:
                wit = (eng.u.model(lo[1]), eng.u.model(hi[1]))
                vals = (lo[0], hi[0])
            else:
                wit, vals = (), ()
            eqs = _query_equalities(eng, q)
            results.append((q, PoINotForced(b.lower, b.upper, b.lower_attained, b.upper_attained,
                                            wit, vals, tuple(eqs))))
    if consistent is None:
        eng.caveats.append("no model passing the full indifference check was found; consistency unverified")
    return PoIVerdict(problem, tuple(results), inv, eng.u.size, tuple(eng.caveats), consistent)


def _query_equalities(eng: _Engine, q: PoIQuery) -> list[str]:
    """Equalities between this query and the other queries that hold in every admissible measure."""
    out = []
    den = eng.ev(list(q.extras))
    mine = den & eng.ev(q.sentence)
    atoms, sys, to_atoms = eng.sys.compile(eng.sys.rows, [mine] + [eng.ev(o.sentence) for o in eng.p.queries])
    if positive_point(sys, [to_atoms(m) for m in eng.sys.strict]) is None:
        return out
    for other in eng.p.queries:
        if other == q or other.extras != q.extras:
            continue
        theirs = den & eng.ev(other.sentence)
        diff = tuple(x - y for x, y in zip(to_atoms(mine), to_atoms(theirs)))
        r = optimize(diff, sys)
        if r.min == 0 and r.max == 0:
            out.append(f"{q.text()} = {other.text()}")
    return out


def replay_certificate(problem: PoIProblem, query: PoIQuery, certificate: Sequence) -> Fraction | None:
    """The value pinned by the certificate's orbit equalities alone, or ``None`` if not pinned."""
    eng = _Engine(problem)
    eng.build()
    eng.linearize_independence()
    wanted = {c for c in certificate if isinstance(c, (OrbitEquality, Fact))}
    rows = [r for r in eng.sys.rows if r.kind != "orbit" or r.label in wanted]
    den = eng.ev(list(query.extras))
    num = den & eng.ev(query.sentence)
    b, _ = eng.bounds(rows, num, den)
    return b.lower if b.forced else None


def verify_certificate(problem: PoIProblem, certificate: Sequence) -> bool:
    """Re-check each orbit equality semantically: ``π`` is invariant and maps the sentence to its image."""
    sig = problem.signature
    for c in certificate:
        if not isinstance(c, OrbitEquality):
            continue
        pi = SignaturePermutation.from_cycles(sig, c.permutation)
        if not invariant(problem.axioms, pi, problem.bound, sig):
            return False
    return True
