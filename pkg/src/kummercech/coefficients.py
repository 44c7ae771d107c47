"""Coefficient descriptors and the closed-form values they take at a log point.

A descriptor names a coefficient sheaf through the only data the engine
ever touches: its torsion values at the stalk of a log point.  Split tori,
finite multiplicative groups, finite constant groups, the log multiplicative
group modulo its classical part, smooth solvable unipotent groups, and an
escape hatch for hand-built modules.  No scheme machinery lives here; every
formula reduces to gcd arithmetic on torsion orders, binomial counts from
exterior powers of the chart envelope, and twist bookkeeping.

The degree-zero duals (hom_zn1) follow Cartier duality together with the
connected/etale dichotomy at a strictly Henselian stalk: maps out of the
degree-n multiplicative dual land in the n-torsion of a multiplicative
target, see only the prime-to-p torsion of an etale target, and vanish into
a solvable unipotent target.  The higher closed forms stack those duals
against exterior powers of the chart envelope:

  * r1_formula       degree-1 direct image, as a colimit over Kummer levels
  * kn_stalk_formula degree-q stalk value at an invertible level
  * h2_torsion_formula / h2_full
                     degree-2 torsion at every level (no invertibility
                     assumption) and its colimit over invertible levels

Twists are carried on TwistedGroup values where a single level is in play
and dropped into the certificate once a colimit over levels is taken, since
the ind-group normal form has no slot for them.
"""

from dataclasses import dataclass
from math import comb, gcd

from .fgab import FgAbGroup, GroupHom, IntegerMatrix, TwistedGroup, tensor_groups
from .limits import DirectedSystem, IndGroup, colimit
from .monoid import group_envelope

__all__ = [
    "ConstFinite",
    "GmLogModGm",
    "MuM",
    "SplitTorus",
    "UnipotentSolvable",
    "UserModule",
    "descriptor_from_json",
    "descriptor_to_json",
    "h2_full",
    "h2_torsion_formula",
    "hom_zn1",
    "kn_stalk_formula",
    "r1_formula",
    "torsion_decomposition_check",
    "torus_h1_system",
]


# -- descriptors


@dataclass(frozen=True)
class SplitTorus:
    """Split torus of the given rank; rank 1 is the multiplicative group."""

    rank: int = 1

    def __post_init__(self):
        if not isinstance(self.rank, int) or self.rank < 1:
            raise ValueError("torus rank must be a positive integer")


@dataclass(frozen=True)
class MuM:
    """Finite multiplicative group: roots of unity of the given order."""

    order: int

    def __post_init__(self):
        if not isinstance(self.order, int) or self.order < 2:
            raise ValueError("multiplicative order must be an integer >= 2")


@dataclass(frozen=True)
class ConstFinite:
    """Finite constant (etale) cyclic group of the given order."""

    order: int

    def __post_init__(self):
        if not isinstance(self.order, int) or self.order < 2:
            raise ValueError("constant order must be an integer >= 2")


@dataclass(frozen=True)
class GmLogModGm:
    """The log multiplicative group modulo its classical part."""


@dataclass(frozen=True)
class UnipotentSolvable:
    """Smooth unipotent group, solvable over the residue field."""


@dataclass(frozen=True)
class UserModule:
    """Escape hatch for hand-built coefficients on the covering site.

    ``build(point, level, acting_group)`` must return a FiniteAction of the
    given acting group on the module the user has in mind at that level.
    Only the covering-complex evaluator consumes this variant; the closed
    forms in this module reject it.
    """

    build: object

    def __post_init__(self):
        if not callable(self.build):
            raise ValueError("a UserModule needs a callable recipe")


_JSON_VARIANTS = {
    "SplitTorus": (SplitTorus, ("rank",)),
    "MuM": (MuM, ("order",)),
    "ConstFinite": (ConstFinite, ("order",)),
    "GmLogModGm": (GmLogModGm, ()),
    "UnipotentSolvable": (UnipotentSolvable, ()),
}


def descriptor_to_json(descriptor):
    """{"variant": ..., "params": ...} for every variant except UserModule."""
    for name, (cls, fields) in _JSON_VARIANTS.items():
        if isinstance(descriptor, cls):
            return {"variant": name,
                    "params": {f: getattr(descriptor, f) for f in fields}}
    raise ValueError(f"descriptor is not serializable: {descriptor!r}")


def descriptor_from_json(data):
    name = data.get("variant")
    if name not in _JSON_VARIANTS:
        raise ValueError(f"unknown descriptor variant: {name!r}")
    cls, fields = _JSON_VARIANTS[name]
    params = data.get("params", {})
    return cls(**{f: params[f] for f in fields})


# -- shared arithmetic helpers


def _prime_to_part(n, p):
    """Largest divisor of n coprime to p; p = 0 keeps all of n."""
    if p:
        while n % p == 0:
            n //= p
    return n


def _check_level(n):
    n = int(n)
    if n < 1:
        raise ValueError("level must be a positive integer")
    return n


def _check_mode(mode):
    if mode not in ("kfl", "ket"):
        raise ValueError(f"mode must be 'kfl' or 'ket', got {mode!r}")


def _cyclic_power(order, copies):
    """(Z/order)^copies in normal form; order 1 or zero copies is trivial."""
    if order > 1 and copies > 0:
        return FgAbGroup.from_invariants(0, [order] * copies)
    return FgAbGroup.trivial()


# -- degree-zero duals


def hom_zn1(descriptor, n, p=0):
    """Maps from the degree-n multiplicative dual into the descriptor.

    Cartier duality at the stalk: a split torus of rank d receives
    (Z/n)^d at every level, even when p divides n; a finite multiplicative
    group of order m receives Z/gcd(n, m); a finite constant group only
    sees the prime-to-p part of the level; a solvable unipotent group
    receives nothing.  The value is untwisted.
    """
    n = _check_level(n)
    if isinstance(descriptor, SplitTorus):
        group = _cyclic_power(n, descriptor.rank)
    elif isinstance(descriptor, MuM):
        group = _cyclic_power(gcd(n, descriptor.order), 1)
    elif isinstance(descriptor, ConstFinite):
        group = _cyclic_power(gcd(_prime_to_part(n, p), descriptor.order), 1)
    elif isinstance(descriptor, UnipotentSolvable):
        group = FgAbGroup.trivial()
    else:
        raise ValueError(
            f"no degree-zero dual for this descriptor: {descriptor!r}")
    return TwistedGroup(group, 0)


# -- diagonal systems over Kummer levels


def _diagonal_inclusion_system(copies, modulus, scale, coprime_to, rule):
    """System with (Z/modulus(n))^copies at level n and diagonal steps.

    The step n | m multiplies every coordinate by scale(n, m).  Presenting
    each level with a fixed generator count keeps the transition matrices
    square even through levels where some moduli collapse to 1.
    """
    def grp(n):
        d = modulus(n)
        if copies == 0:
            return FgAbGroup(0)
        rel = [[d if i == j else 0 for j in range(copies)]
               for i in range(copies)]
        return FgAbGroup(copies, IntegerMatrix(rel))

    def tr(n, m):
        s = scale(n, m)
        mat = (IntegerMatrix([[s if i == j else 0 for j in range(copies)]
                              for i in range(copies)])
               if copies else IntegerMatrix.zeros(0, 0))
        return GroupHom(grp(n), grp(m), mat)

    return DirectedSystem(grp, tr, coprime_to=coprime_to, uniform_rule=rule)


def _dual_modulus(descriptor, p):
    """Per-coordinate modulus of hom_zn1 as a function of the level."""
    if isinstance(descriptor, SplitTorus):
        return lambda n: n
    if isinstance(descriptor, MuM):
        return lambda n: gcd(n, descriptor.order)
    if isinstance(descriptor, ConstFinite):
        return lambda n: gcd(_prime_to_part(n, p), descriptor.order)
    if isinstance(descriptor, UnipotentSolvable):
        return lambda n: 1
    raise ValueError(
        f"no degree-zero dual for this descriptor: {descriptor!r}")


def r1_formula(descriptor, point, mode="kfl", window=24):
    """Degree-1 direct image at the point, as an ind-group.

    Colimit over Kummer levels of the degree-n dual tensored with the
    chart envelope; the flat mode ranges over every level, the etale mode
    only over levels invertible at the residue characteristic.  Steps are
    the natural inclusions (multiplication by the modulus ratio), so a
    rank-d split torus on a rank-r chart accumulates to the (prime-to-p
    in etale mode) full divisible torsion group in d*r copies, while the
    finite descriptors stabilize at finite values.
    """
    _check_mode(mode)
    p = point.residue_char
    coprime = p if (mode == "ket" and p) else None
    rho = group_envelope(point.chart).free_rank
    modulus = _dual_modulus(descriptor, p)
    width = descriptor.rank if isinstance(descriptor, SplitTorus) else 1
    copies = width * rho
    rule = ("level n carries the degree-n dual of the coefficient in "
            f"{copies} copies from the rank-{rho} chart envelope; "
            "each step n | m is the inclusion scaling by the modulus ratio")
    system = _diagonal_inclusion_system(
        copies, modulus,
        lambda n, m: modulus(m) // modulus(n),
        coprime, rule)
    return colimit(system, window)


def torus_h1_system(descriptor, point, mode="kfl"):
    """Degree-1 values along the tower itself, before any colimit.

    Level n carries the degree-n dual of the torus tensored with the
    level-n root envelope.  Both tensor factors grow with the level, so
    the step n | m multiplies coordinates by (m/n)^2.  Every generator is
    torsion and its class dies once the envelope side absorbs its order:
    an order-r generator entering at level n is killed at level n*r, which
    is why the colimit of this system vanishes.
    """
    if not isinstance(descriptor, SplitTorus):
        raise ValueError("the tower system is only built for split tori")
    _check_mode(mode)
    p = point.residue_char
    coprime = p if (mode == "ket" and p) else None
    copies = descriptor.rank * group_envelope(point.chart).free_rank
    rule = (f"level n carries (Z/n)^{copies} from the degree-n torus dual "
            "tensored with the level-n root envelope; the step n | m "
            "multiplies by (m/n)^2")
    return _diagonal_inclusion_system(
        copies, lambda n: n,
        lambda n, m: (m // n) ** 2,
        coprime, rule)


# -- stalk values at a single invertible level


def kn_stalk_formula(descriptor, n, q, point):
    """Degree-q stalk value at an invertible level.

    The n-torsion of the coefficient, twisted by -q, tensored with the
    q-th exterior power of the chart envelope.  Levels sharing a factor
    with the residue characteristic are rejected.
    """
    n = _check_level(n)
    q = int(q)
    if q < 0:
        raise ValueError("cohomological degree must be >= 0")
    p = point.residue_char
    if p and n % p == 0:
        raise ValueError(
            f"level {n} is not invertible at residue characteristic {p}")
    torsion = hom_zn1(descriptor, n, p).group
    rho = group_envelope(point.chart).free_rank
    group = tensor_groups(torsion, FgAbGroup.free(comb(rho, q)))
    return TwistedGroup(group, -q)


def h2_torsion_formula(descriptor, n, point):
    """Degree-2 torsion value at an arbitrary level, twist -2.

    No invertibility assumption: writing n = m * p^r with m prime to the
    residue characteristic, only the prime-to-p factor survives, in
    d copies per generator of the second exterior power of the chart
    envelope.  Rank-one charts therefore give zero at every level.
    """
    if not isinstance(descriptor, SplitTorus):
        raise ValueError("the degree-2 torsion formula needs a split torus")
    n = _check_level(n)
    m = _prime_to_part(n, point.residue_char)
    wedge = comb(group_envelope(point.chart).free_rank, 2)
    return TwistedGroup(_cyclic_power(m, descriptor.rank * wedge), -2)


def h2_full(descriptor, point, window=24):
    """Degree-2 value as an ind-group: colimit of the torsion levels.

    Colimit over invertible levels of h2_torsion_formula under the
    inclusion steps.  The ind-group normal form has no twist slot, so the
    dropped twist (-2) is recorded in the certificate instead.
    """
    if not isinstance(descriptor, SplitTorus):
        raise ValueError("the degree-2 formula needs a split torus")
    p = point.residue_char
    wedge = comb(group_envelope(point.chart).free_rank, 2)
    copies = descriptor.rank * wedge
    rule = (f"level n carries (Z/n)^{copies} from the degree-2 torsion "
            "formula; each step n | m is the inclusion scaling by m/n")
    system = _diagonal_inclusion_system(
        copies, lambda n: n,
        lambda n, m: m // n,
        p if p else None, rule)
    value = colimit(system, window)
    certificate = dict(value.certificate)
    certificate["twist"] = -2
    return IndGroup(value.q_rank, value.divisible_torsion,
                    value.finite_part, certificate)


# -- structural report on ind-group values


def _primary_piece(divisible_count, finite_factors, l):
    tokens = []
    if divisible_count == 1:
        tokens.append(f"Q_{l}/Z_{l}")
    elif divisible_count:
        tokens.append(f"(Q_{l}/Z_{l})^{divisible_count}")
    if finite_factors:
        tokens.append(FgAbGroup.from_invariants(0, finite_factors).render())
    return " (+) ".join(tokens) if tokens else "0"


def torsion_decomposition_check(value):
    """Report whether an ind-group is torsion and how it splits by prime.

    Returns a report dictionary rather than raising: a rational summand
    or a free summand in the finite part makes the value non-torsion and
    the report says so.  For torsion values the report lists the primary
    decomposition (an explicit piece for every exceptional prime, one
    generic rule for all the others) and confirms that the n-torsion
    subgroups exhaust the value, which holds structurally because
    divisible summands are unions of their prime-power torsion and the
    finite part is killed by its exponent.
    """
    rational_rank = value.q_rank + value.finite_part.free_rank
    report = {
        "torsion": rational_rank == 0,
        "rational_rank": rational_rank,
        "failure": None,
    }
    if rational_rank:
        report["failure"] = (
            f"not torsion: rational rank after the colimit is {rational_rank}")
        report["exhausted_by_torsion_levels"] = False
        return report

    torsion = value.divisible_torsion
    finite_by_prime = {}
    for d in value.finite_part.invariant_factors:
        rest = d
        l = 2
        while rest > 1:
            if rest % l == 0:
                power = 1
                while rest % l == 0:
                    rest //= l
                    power *= l
                finite_by_prime.setdefault(l, []).append(power)
            l += 1 if l == 2 else 2

    exceptional = sorted(set(l for l, _ in torsion.deviations)
                         | set(finite_by_prime))
    parts = {}
    for l in exceptional:
        parts[str(l)] = _primary_piece(
            torsion.count_at(l), sorted(finite_by_prime.get(l, [])), l)

    generic = torsion.generic_rank
    if generic == 0:
        report["generic_primary"] = "0"
    elif generic == 1:
        report["generic_primary"] = "Q_l/Z_l"
    else:
        report["generic_primary"] = f"(Q_l/Z_l)^{generic}"
    report["primary_parts"] = parts
    report["exhausted_by_torsion_levels"] = True
    report["note"] = (
        "every element lies in some n-torsion subgroup: divisible summands "
        "are unions of their prime-power torsion and the finite part is "
        "killed by its exponent")
    return report
