"""Directed systems over the divisibility order and their windowed colimits.

A directed system assigns a finitely generated abelian group to every
positive integer level (optionally only to levels coprime to a fixed
integer) and a homomorphism to every divisibility step n | m.  Colimits of
such systems need not be finitely generated, so values live in a normal
form with three components,

    Q^a  (+)  divisible torsion  (+)  finite part,

where the divisible torsion assigns to every prime l a count of Q_l/Z_l
summands, described by one generic count and finitely many deviations.

Colimits are computed over a finite window, never symbolically.  The
system is evaluated at every level inside the window, transitions are
checked for compatibility on all divisibility triples there, and for each
prime the tower of primary parts along prime-power levels is classified by
an explicit grammar:

  iso_stable        every transition injective, the final one bijective;
  settled           the image in the top level stopped shrinking and the
                    kernels stopped growing one step before the edge;
  divisible_growth  injective transitions multiplying every invariant
                    factor by the prime, witnessed at least twice: the
                    shape of Q_l/Z_l seen through a finite window;
  consistent_growth the same pattern with at most one growth step, which
                    the window cannot yet separate from stabilization;
  window_limited    anything else, reported with the evidence.

A value is graded "certified" only when every prime is resolved and the
behaviour beyond the window follows from a declared uniform rule whose
pattern is shared by all primes in the top half of the window; otherwise
the grade is "window_limited" and the certificate says what is missing.
The certificate also records the fate of every generator at every level,
with "unstable" reported honestly whenever the window cannot confirm it.
"""

from dataclasses import dataclass
from math import gcd

from ._solve import SpanSolver
from .cochain import Rat, RatModInt
from .fgab import FgAbGroup, GroupHom, IntegerMatrix
from .fgab import n_torsion as _finite_n_torsion

__all__ = [
    "DirectedSystem",
    "DivisibleTorsion",
    "IndGroup",
    "colimit",
    "constant_system",
    "cyclic_multiplication_system",
    "direct_sum_systems",
    "is_zero_colimit",
    "tensor_divisible",
]


# -- arithmetic helpers

def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _primes_upto(n):
    return [p for p in range(2, n + 1) if _is_prime(p)]


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _valuation(n, l):
    v = 0
    while n % l == 0:
        n //= l
        v += 1
    return v


def _is_power_of(n, l):
    while n % l == 0:
        n //= l
    return n == 1


# -- value types

@dataclass(frozen=True)
class DivisibleTorsion:
    """Count of Q_l/Z_l summands per prime l: a generic count plus deviations.

    deviations is a sorted tuple of (prime, count) pairs with count
    different from generic_rank; every prime not listed carries
    generic_rank summands.  The representation is normalized on
    construction, so instance equality is equality of the prime -> count
    assignment.
    """

    generic_rank: int = 0
    deviations: tuple = ()

    def __post_init__(self):
        if self.generic_rank < 0:
            raise ValueError("summand counts must be nonnegative")
        pairs = self.deviations
        if isinstance(pairs, dict):
            pairs = pairs.items()
        seen = {}
        for l, c in pairs:
            l, c = int(l), int(c)
            if not _is_prime(l):
                raise ValueError(f"deviation index {l} is not prime")
            if c < 0:
                raise ValueError("summand counts must be nonnegative")
            if l in seen and seen[l] != c:
                raise ValueError(f"conflicting counts for prime {l}")
            seen[l] = c
        norm = tuple(sorted((l, c) for l, c in seen.items()
                            if c != self.generic_rank))
        object.__setattr__(self, "deviations", norm)

    @classmethod
    def zero(cls):
        return cls(0, ())

    @classmethod
    def full(cls, rank=1):
        return cls(rank, ())

    @classmethod
    def excluding(cls, rank, primes):
        return cls(rank, tuple((int(l), 0) for l in primes))

    def count_at(self, l):
        for p, c in self.deviations:
            if p == l:
                return c
        return self.generic_rank

    def is_zero(self):
        return self.generic_rank == 0 and not self.deviations

    def __add__(self, other):
        generic = self.generic_rank + other.generic_rank
        primes = {l for l, _ in self.deviations} | {l for l, _ in other.deviations}
        devs = {l: self.count_at(l) + other.count_at(l) for l in primes}
        return DivisibleTorsion(generic, tuple(sorted(devs.items())))

    def render(self):
        if self.is_zero():
            return "0"
        tokens = []
        if self.generic_rank:
            away = ",".join(str(l) for l, _ in self.deviations)
            if away:
                sup = (f"(l≠{away})" if self.generic_rank == 1
                       else f"{self.generic_rank},(l≠{away})")
                tokens.append("(Q/Z)^{%s}" % sup)
            elif self.generic_rank == 1:
                tokens.append("Q/Z")
            else:
                tokens.append(f"(Q/Z)^{self.generic_rank}")
        for l, c in self.deviations:
            if c:
                piece = f"Q_{l}/Z_{l}"
                tokens.append(piece if c == 1 else f"({piece})^{c}")
        return " (+) ".join(tokens)

    def to_json(self):
        return {"generic_rank": self.generic_rank,
                "deviations": [[l, c] for l, c in self.deviations]}

    def __str__(self):
        return self.render()


class IndGroup:
    """Normal form for colimit values: Q^a (+) divisible torsion (+) finite.

    certificate carries the evidence behind the value (window, tower
    grades, generator fates) and is deliberately excluded from comparison:
    two values are equal exactly when their three components agree.
    """

    __slots__ = ("q_rank", "divisible_torsion", "finite_part", "certificate")

    def __init__(self, q_rank=0, divisible_torsion=None, finite_part=None,
                 certificate=None):
        q_rank = int(q_rank)
        if q_rank < 0:
            raise ValueError("q_rank must be nonnegative")
        if divisible_torsion is None:
            divisible_torsion = DivisibleTorsion.zero()
        if finite_part is None:
            finite_part = FgAbGroup.trivial()
        self.q_rank = q_rank
        self.divisible_torsion = divisible_torsion
        self.finite_part = finite_part
        self.certificate = dict(certificate) if certificate else {}

    def _key(self):
        return (self.q_rank, self.divisible_torsion,
                self.finite_part.normal_form())

    def __eq__(self, other):
        return isinstance(other, IndGroup) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def is_zero(self):
        return (self.q_rank == 0 and self.divisible_torsion.is_zero()
                and self.finite_part.is_trivial())

    def __add__(self, other):
        return IndGroup(self.q_rank + other.q_rank,
                        self.divisible_torsion + other.divisible_torsion,
                        self.finite_part.direct_sum(other.finite_part),
                        {"sum_of": [self.render(), other.render()]})

    def n_torsion(self, n):
        """The n-torsion subgroup, always a finite group.

        Rational summands are torsion free and contribute nothing; each
        l-divisible summand contributes one Z/l^{v_l(n)} and the finite
        part contributes its own n-torsion.
        """
        n = int(n)
        if n < 1:
            raise ValueError("torsion level must be a positive integer")
        factors = []
        for l in _prime_factors(n):
            count = self.divisible_torsion.count_at(l)
            if count:
                factors.extend([l ** _valuation(n, l)] * count)
        divisible_part = FgAbGroup.from_invariants(0, sorted(factors))
        return divisible_part.direct_sum(_finite_n_torsion(self.finite_part, n))

    def render(self):
        if self.is_zero():
            return "0"
        tokens = []
        if self.q_rank == 1:
            tokens.append("Q")
        elif self.q_rank:
            tokens.append(f"Q^{self.q_rank}")
        if not self.divisible_torsion.is_zero():
            tokens.append(self.divisible_torsion.render())
        if not self.finite_part.is_trivial():
            tokens.append(self.finite_part.render())
        return " (+) ".join(tokens)

    def to_json(self, include_certificate=False):
        out = {"q_rank": self.q_rank,
               "divisible_torsion": self.divisible_torsion.to_json(),
               "finite_part": self.finite_part.to_json(),
               "render": self.render()}
        if include_certificate:
            out["certificate"] = self.certificate
        return out

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"IndGroup<{self.render()}>"


# -- directed systems

class DirectedSystem:
    """Groups indexed by divisibility, with transition maps along n | m.

    group_fn(n) -> FgAbGroup and transition_fn(n, m) -> GroupHom define the
    system as rules, so levels beyond any particular window stay
    computable.  coprime_to restricts the index set to levels n with
    gcd(n, coprime_to) = 1.  uniform_rule, when given, is a short statement
    that a single rule defines every level uniformly in the prime; the
    colimit records it as the license to extrapolate a pattern seen at
    every visible prime to the primes beyond the window.
    """

    def __init__(self, group_fn, transition_fn, coprime_to=None,
                 uniform_rule=None):
        if coprime_to is not None:
            coprime_to = int(coprime_to)
            if coprime_to < 2:
                raise ValueError("coprime restriction must be an integer >= 2")
        self._group_fn = group_fn
        self._transition_fn = transition_fn
        self.coprime_to = coprime_to
        self.uniform_rule = uniform_rule
        self._groups = {}
        self._transitions = {}

    def admits(self, n):
        n = int(n)
        if n < 1:
            return False
        return self.coprime_to is None or gcd(n, self.coprime_to) == 1

    def levels(self, window):
        window = int(window)
        if window < 1:
            raise ValueError("window must be a positive integer")
        return [n for n in range(1, window + 1) if self.admits(n)]

    def group(self, n):
        n = int(n)
        if not self.admits(n):
            raise ValueError(f"level {n} is not in the index set")
        if n not in self._groups:
            G = self._group_fn(n)
            if not isinstance(G, FgAbGroup):
                raise TypeError("group_fn must return an FgAbGroup")
            self._groups[n] = G
        return self._groups[n]

    def transition(self, n, m):
        n, m = int(n), int(m)
        if m % n:
            raise ValueError(f"transition needs divisibility: {n} does not divide {m}")
        src, tgt = self.group(n), self.group(m)
        if n == m:
            return GroupHom.identity(src)
        key = (n, m)
        if key not in self._transitions:
            h = self._transition_fn(n, m)
            # rebuild on the cached endpoint groups; this revalidates that
            # the matrix carries relations into relations
            self._transitions[key] = GroupHom(src, tgt, h.matrix)
        return self._transitions[key]


def constant_system(G, coprime_to=None):
    """System with the same group at every level and identity transitions."""
    return DirectedSystem(
        lambda n: G,
        lambda n, m: GroupHom.identity(G),
        coprime_to=coprime_to,
        uniform_rule="constant: every level carries the same group and every "
                     "transition is the identity")


def cyclic_multiplication_system(coprime_to=None):
    """Z/n at level n, with multiplication by m/n along each step n | m."""
    def grp(n):
        return FgAbGroup.cyclic(n)

    def tr(n, m):
        return GroupHom(grp(n), grp(m), [[m // n]])

    return DirectedSystem(
        grp, tr, coprime_to=coprime_to,
        uniform_rule="level n carries Z/n and the step n | m multiplies by m/n")


def direct_sum_systems(first, second):
    """Levelwise direct sum of two systems over the same index set."""
    if first.coprime_to != second.coprime_to:
        raise ValueError("systems must share the same index set")

    def grp(n):
        return first.group(n).direct_sum(second.group(n))

    def tr(n, m):
        f = first.transition(n, m)
        g = second.transition(n, m)
        rows = []
        for i in range(f.matrix.rows):
            rows.append(list(f.matrix.row(i)) + [0] * g.matrix.cols)
        for i in range(g.matrix.rows):
            rows.append([0] * f.matrix.cols + list(g.matrix.row(i)))
        return GroupHom(grp(n), grp(m), rows)

    rule = None
    if first.uniform_rule is not None and second.uniform_rule is not None:
        rule = "direct sum of uniform systems: %s; %s" % (
            first.uniform_rule, second.uniform_rule)
    return DirectedSystem(grp, tr, coprime_to=first.coprime_to,
                          uniform_rule=rule)


# -- hom comparison and compatibility

def _same_hom(f, g):
    if f.matrix.rows != g.matrix.rows or f.matrix.cols != g.matrix.cols:
        return False
    for j in range(f.matrix.cols):
        a = f.matrix.column(j)
        b = g.matrix.column(j)
        if not f.target.lattice_contains([x - y for x, y in zip(a, b)]):
            return False
    return True


def _check_compatibility(system, levels):
    for c in levels:
        divs = [b for b in levels if b != c and c % b == 0]
        for b in divs:
            below = [a for a in divs if a != b and b % a == 0]
            for a in below:
                two_step = system.transition(b, c).compose(system.transition(a, b))
                if not _same_hom(two_step, system.transition(a, c)):
                    raise ValueError(
                        f"incompatible transitions along {a} | {b} | {c}")


# -- primary parts and induced maps

def _l_primary(G, l):
    """(l-primary torsion subgroup, inclusion basis in generator coordinates)."""
    e = G.invariant_factors[-1] if G.invariant_factors else 1
    a = _valuation(e, l)
    if a == 0:
        return FgAbGroup.trivial(), []
    return GroupHom.scalar(G, l ** a).kernel_with_inclusion()


def _induced_l_hom(h, src_part, src_basis, tgt_part, tgt_basis):
    """Restriction of h to l-primary parts, in the given subgroup bases."""
    if src_part.is_trivial() or tgt_part.is_trivial():
        return GroupHom.zero(src_part, tgt_part)
    tgt = h.target
    span = [list(b) for b in tgt_basis]
    span += [list(tgt.relations.column(j)) for j in range(tgt.relations.cols)]
    solver = SpanSolver(span, tgt.generators)
    cols = []
    for v in src_basis:
        sol = solver.solve(list(h.apply(v)))
        assert sol is not None, "torsion image escaped the primary component"
        cols.append([int(x) for x in sol[:len(tgt_basis)]])
    mat = IntegerMatrix.from_columns(cols, tgt_part.generators)
    return GroupHom(src_part, tgt_part, mat)


def _crt_failure(system, levels, l, lpart):
    """First valuation-preserving step that is not an iso on l-parts, if any.

    The prime towers carry the whole system only when every transition that
    keeps the l-adic valuation fixed restricts to an isomorphism of
    l-primary parts; this is what lets the divisibility poset retract onto
    the chain of l-power levels.
    """
    for m in levels:
        vm = _valuation(m, l)
        for n in levels:
            if n >= m or m % n or _valuation(n, l) != vm:
                continue
            src, sbase = lpart(n, l)
            tgt, tbase = lpart(m, l)
            if src.is_trivial() and tgt.is_trivial():
                continue
            ind = _induced_l_hom(system.transition(n, m), src, sbase, tgt, tbase)
            if not (ind.kernel().is_trivial() and ind.cokernel().is_trivial()):
                return (n, m)
    return None


# -- tower classification

def _growth_profile(l, parts, injective):
    """(constant rank, growth step count) for a pure divisible ladder, else None."""
    if not all(injective):
        return None
    if any(g.free_rank for g in parts):
        return None
    if parts[-1].is_trivial() or not parts[0].is_trivial():
        return None
    shapes = [list(g.invariant_factors) for g in parts]
    start = next(j for j, s in enumerate(shapes) if s)
    count = len(shapes[start])
    growth = 0
    for j in range(start, len(shapes) - 1):
        if shapes[j + 1] != [l * d for d in shapes[j]]:
            return None
        growth += 1
    return count, growth


def _tower_grade(l, parts, steps):
    """Classify one prime tower: (grade, value group or None, count, note)."""
    k = len(parts)
    if k == 1:
        return ("iso_stable", parts[0], None,
                "single admissible tower level; value pinned by the "
                "coprime-step isomorphisms")
    injective = [s.kernel().is_trivial() for s in steps]
    if all(injective) and steps[-1].cokernel().is_trivial():
        return "iso_stable", parts[-1], None, None
    if k >= 3:
        last, prev = steps[-1], steps[-2]
        into_top = last.compose(prev)
        top = parts[-1]
        candidate = top.subgroup_key(last.matrix.columns())
        mature = top.subgroup_key(into_top.matrix.columns())
        if candidate == mature:
            base = parts[-3]
            ker_one = base.subgroup_key(prev.kernel_with_inclusion()[1])
            ker_two = base.subgroup_key(into_top.kernel_with_inclusion()[1])
            if ker_one == ker_two:
                return "settled", last.image(), None, None
    profile = _growth_profile(l, parts, injective)
    if profile is not None:
        count, growth = profile
        if growth >= 2:
            return ("divisible_growth", None, count,
                    f"{growth} growth steps witnessed")
        return ("consistent_growth", None, count,
                f"pattern consistent with divisible growth but only {growth} "
                "growth step(s) visible")
    return ("window_limited", None, None,
            "no stabilization pattern established inside the window")


def _examine_prime(system, levels, l, lpart):
    tower = [n for n in levels if _is_power_of(n, l)]
    pieces = [lpart(n, l) for n in tower]
    parts = [p for p, _ in pieces]
    rec = {"prime": l, "tower": tower,
           "parts": [g.render() for g in parts],
           "grade": None, "value_group": None, "count": None, "note": None}
    bad = _crt_failure(system, levels, l, lpart)
    if bad is not None:
        rec["grade"] = "window_limited"
        rec["note"] = ("the step %d | %d preserves the %d-adic valuation but "
                       "is not an isomorphism on %d-primary parts, so the "
                       "prime tower does not carry the whole system"
                       % (bad[0], bad[1], l, l))
        return rec
    steps = [_induced_l_hom(system.transition(tower[j], tower[j + 1]),
                            parts[j], pieces[j][1],
                            parts[j + 1], pieces[j + 1][1])
             for j in range(len(tower) - 1)]
    grade, value, count, note = _tower_grade(l, parts, steps)
    rec["grade"] = grade
    rec["value_group"] = value
    rec["count"] = count
    if note:
        rec["note"] = note
    return rec


# -- free part

def _free_slots(G):
    return [i for i, d in enumerate(G.smith_orders()) if d == 0]


def _free_quotient_iso(h):
    src_slots = _free_slots(h.source)
    tgt_slots = _free_slots(h.target)
    if len(src_slots) != len(tgt_slots):
        return False
    if not src_slots:
        return True
    basis = h.source.smith_basis()
    cols = []
    for j in src_slots:
        coords = h.target.canonical_coords(h.apply(basis[j]))
        cols.append([coords[i] for i in tgt_slots])
    induced = GroupHom(FgAbGroup.free(len(src_slots)),
                       FgAbGroup.free(len(tgt_slots)),
                       IntegerMatrix.from_columns(cols, len(tgt_slots)))
    return induced.kernel().is_trivial() and induced.cokernel().is_trivial()


def _free_part(system, levels):
    ranks = {n: system.group(n).free_rank for n in levels}
    if all(r == 0 for r in ranks.values()):
        return "stable", 0, None
    if len(set(ranks.values())) > 1:
        return ("window_limited", ranks[max(levels)],
                "free ranks vary across levels: %s" % sorted(set(ranks.values())))
    rank = ranks[levels[0]]
    for m in levels:
        for q in _prime_factors(m):
            n = m // q
            if n in ranks and not _free_quotient_iso(system.transition(n, m)):
                return ("window_limited", rank,
                        "the step %d | %d is not an isomorphism on free "
                        "quotients, so the free part does not stabilize "
                        "inside the window" % (n, m))
    return "stable", rank, None


# -- generator fates

def _generator_fates(system, levels):
    rows = []
    for n in levels:
        G = system.group(n)
        multiples = [m for m in levels if m != n and m % n == 0]
        for i, (d, vec) in enumerate(zip(G.smith_orders(), G.smith_basis())):
            row = {"level": n, "generator": i,
                   "order": int(d) if d else "infinite"}
            died = None
            for m in multiples:
                image = system.transition(n, m).apply(vec)
                if system.group(m).lattice_contains(image):
                    died = m
                    break
            if died is not None:
                row["fate"] = "dies"
                row["at"] = died
            else:
                stable_at = None
                for m0 in [n] + multiples:
                    later = [m for m in multiples if m != m0 and m % m0 == 0]
                    if not later:
                        continue  # nothing in the window can confirm m0
                    if m0 == n:
                        o0 = G.element_order(vec)
                    else:
                        o0 = system.group(m0).element_order(
                            system.transition(n, m0).apply(vec))
                    if all(system.group(m).element_order(
                            system.transition(n, m).apply(vec)) == o0
                           for m in later):
                        stable_at = m0
                        break
                if stable_at is None:
                    row["fate"] = "unstable"
                    row["checked_to"] = multiples[-1] if multiples else n
                else:
                    row["fate"] = "stabilizes"
                    row["at"] = stable_at
            rows.append(row)
    return rows


# -- the colimit

def colimit(system, window):
    """Colimit of the system over the given window, as a certified IndGroup.

    The certificate's "grade" is "certified" when every prime tower is
    resolved, the free part is stable, and the tail beyond the window is
    covered by the system's uniform rule; otherwise "window_limited", with
    notes explaining what the window could not establish.  The value always
    reflects only what was actually witnessed or soundly extrapolated.
    """
    window = int(window)
    if window < 1:
        raise ValueError("window must be a positive integer")
    levels = system.levels(window)
    _check_compatibility(system, levels)

    cache = {}

    def lpart(n, l):
        key = (n, l)
        if key not in cache:
            cache[key] = _l_primary(system.group(n), l)
        return cache[key]

    excluded = _prime_factors(system.coprime_to) if system.coprime_to else []
    examined = sorted(set(_primes_upto(window)) | set(excluded))
    records = {l: _examine_prime(system, levels, l, lpart) for l in examined}

    free_grade, free_rank, free_note = _free_part(system, levels)

    stable_vals, div_counts, consistent, limited = {}, {}, {}, []
    for l in examined:
        grade = records[l]["grade"]
        if grade in ("iso_stable", "settled"):
            stable_vals[l] = records[l]["value_group"]
        elif grade == "divisible_growth":
            div_counts[l] = records[l]["count"]
        elif grade == "consistent_growth":
            consistent[l] = records[l]["count"]
        else:
            limited.append(l)

    notes = []
    if free_note:
        notes.append(free_note)
    resolved = not limited and free_grade == "stable"
    generic = 0
    extrapolated = []
    tail = None

    if system.uniform_rule is None:
        resolved = False
        notes.append("no uniform rule declared, so primes beyond the window "
                     "carry no claim")
    else:
        top = [l for l in examined
               if 2 * l > window and l <= window and system.admits(l)]
        if len(top) < 2:
            resolved = False
            notes.append("fewer than two admissible primes in the top half "
                         "of the window, so no tail extrapolation")
        else:
            top_grades = {records[l]["grade"] for l in top}
            if top_grades == {"consistent_growth"}:
                counts = {records[l]["count"] for l in top}
                witnesses = sorted(l for l, c in div_counts.items()
                                   if c in counts)
                if len(counts) == 1 and witnesses:
                    generic = counts.pop()
                    tail = ("every prime beyond %d contributes %d divisible "
                            "summand(s)" % (window, generic))
                    for l in sorted(consistent):
                        if consistent[l] == generic:
                            div_counts[l] = generic
                            extrapolated.append(l)
                            del consistent[l]
                    notes.append("divisible tail: growth witnessed at "
                                 "prime(s) %s, appearance shared by top-half "
                                 "primes %s" % (witnesses, top))
                else:
                    resolved = False
                    notes.append("top-half appearance pattern lacks a growth "
                                 "witness or a common count")
            elif top_grades <= {"iso_stable", "settled"}:
                if all(records[l]["value_group"].is_trivial() for l in top):
                    tail = "every prime beyond %d contributes nothing" % window
                    notes.append("trivial tail: all top-half primes carry "
                                 "stable trivial values")
                else:
                    resolved = False
                    notes.append("a top-half prime carries a nontrivial "
                                 "stable value, so the window cannot separate "
                                 "a sporadic prime from a tail pattern")
            else:
                resolved = False
                notes.append("top-half primes show mixed grades: %s"
                             % sorted(top_grades))

    if consistent:
        resolved = False
        notes.append("primes %s remain consistent with divisible growth but "
                     "unresolved inside the window" % sorted(consistent))

    if not resolved:
        generic = 0  # no tail claim; keep only what was witnessed
    deviations = dict(div_counts)
    if resolved and generic:
        for l in stable_vals:
            deviations[l] = 0
    divisible = DivisibleTorsion(generic, tuple(sorted(deviations.items())))

    finite = FgAbGroup.free(free_rank if free_grade == "stable" else 0)
    for l in sorted(stable_vals):
        if not stable_vals[l].is_trivial():
            finite = finite.direct_sum(stable_vals[l])

    certificate = {
        "window": window,
        "levels": levels,
        "grade": "certified" if resolved else "window_limited",
        "uniform_rule": system.uniform_rule,
        "free_part": {"grade": free_grade, "rank": free_rank},
        "primes": [{
            "prime": l,
            "tower": records[l]["tower"],
            "parts": records[l]["parts"],
            "grade": records[l]["grade"],
            "value": (records[l]["value_group"].render()
                      if records[l]["value_group"] is not None else None),
            "count": records[l]["count"],
            "note": records[l]["note"],
        } for l in examined],
        "extrapolated_primes": sorted(extrapolated),
        "tail": tail,
        "generators": _generator_fates(system, levels),
        "notes": notes,
    }
    return IndGroup(0, divisible, finite, certificate)


# -- vanishing of a colimit

def is_zero_colimit(system, window):
    """(verdict, witness table): does every generator die at a later level?

    Levels inside the window contribute their generators; the search for a
    killing level follows each torsion generator of order d through the
    multiples n*k for k up to d, which may run past the window, because
    that is where torsion deaths provably land when they happen at all.
    Free generators are followed through the window only.  The verdict is
    true exactly when every row of the table records a killing level; a
    system with no generators is vacuously zero.
    """
    window = int(window)
    if window < 1:
        raise ValueError("window must be a positive integer")
    rows = []
    verdict = True
    for n in system.levels(window):
        G = system.group(n)
        in_window = [m for m in system.levels(window) if m != n and m % n == 0]
        for i, (d, vec) in enumerate(zip(G.smith_orders(), G.smith_basis())):
            row = {"level": n, "generator": i,
                   "order": int(d) if d else "infinite"}
            death = None
            checked = n
            if d:
                for k in range(2, d + 1):
                    m = n * k
                    if not system.admits(m):
                        continue
                    checked = m
                    image = system.transition(n, m).apply(vec)
                    if system.group(m).lattice_contains(image):
                        death = m
                        break
            else:
                for m in in_window:
                    checked = m
                    image = system.transition(n, m).apply(vec)
                    if system.group(m).lattice_contains(image):
                        death = m
                        break
            if death is None:
                verdict = False
                row["killed_at"] = None
                row["checked_to"] = checked
            else:
                row["killed_at"] = death
            rows.append(row)
    return verdict, rows


# -- tensoring with divisible coefficients

def _divisible_tag(tag):
    if isinstance(tag, Rat) or tag == "Q":
        return "Q"
    if isinstance(tag, RatModInt) or tag == "Q/Z":
        return "Q/Z"
    raise ValueError("tag must be Rat()/RatModInt() or one of 'Q', 'Q/Z'")


def tensor_divisible(G, tag):
    """Tensor a finitely generated group with Q or with Q/Z, as an IndGroup.

    Tensoring is right exact, so the torsion of G contributes nothing to
    G (x) Q/Z; the invariant factors reappear as the Tor term, which the
    certificate records under "tor_term" without entering the value.
    """
    kind = _divisible_tag(tag)
    tor = list(G.invariant_factors)
    if kind == "Q":
        return IndGroup(q_rank=G.free_rank,
                        certificate={"construction": "tensor with Q",
                                     "tor_term": []})
    certificate = {
        "construction": "tensor with Q/Z",
        "tor_term": tor,
        "note": "torsion of the left factor tensors to zero against a "
                "divisible group and reappears as the Tor term listed here",
    }
    return IndGroup(divisible_torsion=DivisibleTorsion.full(G.free_rank)
                    if G.free_rank else DivisibleTorsion.zero(),
                    certificate=certificate)
