"""Fs monoids at desk scale: envelopes, Kummer roots, cover groups.

A monoid lives inside a fixed ambient lattice as a finite list of integer
generator columns, plus a denominator so that n-th roots keep integer data
(the roots reuse the same columns and multiply the denominator).  Saturation
is decided exactly over the rationals: facet normals of the generated cone by
subset enumeration, a generating set for cone-cap-lattice from half-open
parallelepipeds of maximal independent generator subsets, and bounded-degree
search for membership in the monoid itself.  Everything is exact; inputs
above desk scale are rejected with a size error rather than approximated.

The running cost is driven by the determinants of generator subsets, so keep
entries modest.  Rank is capped at 4 and generator count at 12.
"""

from collections import namedtuple
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import gcd

from ._solve import (SpanSolver, int_inverse, kernel_columns, lattice_hnf,
                     snf_with_transforms)
from .fgab import FgAbGroup, GroupHom, IntegerMatrix

MAX_AMBIENT_RANK = 4
MAX_GENERATORS = 12

FsCertificate = namedtuple("FsCertificate", "fine saturated sharp")
HnPoints = namedtuple("HnPoints", "group n_prime p_power")


@dataclass(frozen=True)
class FsMonoid:
    """Submonoid of (1/denominator) * Z^ambient_rank, given by generators.

    Generators are stored as integer vectors; the monoid element they denote
    is the vector divided by the denominator.  Scaling by the denominator is
    an isomorphism, so every structural question (fineness, saturation,
    sharpness, envelope rank) is answered on the integer data.
    """

    ambient_rank: int
    generators: tuple
    denominator: int = 1

    def __post_init__(self):
        gens = tuple(tuple(int(v) for v in g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        if self.ambient_rank < 0:
            raise ValueError("ambient_rank must be nonnegative")
        if self.denominator < 1:
            raise ValueError("denominator must be a positive integer")
        for g in gens:
            if len(g) != self.ambient_rank:
                raise ValueError("generator length must equal ambient_rank")

    @classmethod
    def natural(cls, rank):
        """The free monoid N^rank with unit coordinate generators."""
        gens = tuple(tuple(1 if i == j else 0 for j in range(rank))
                     for i in range(rank))
        return cls(rank, gens)

    def to_json(self):
        return {"ambient_rank": self.ambient_rank,
                "generators": [list(g) for g in self.generators],
                "denominator": self.denominator}

    @classmethod
    def from_json(cls, data):
        return cls(int(data["ambient_rank"]),
                   tuple(tuple(g) for g in data["generators"]),
                   int(data.get("denominator", 1)))


@dataclass(frozen=True)
class LogPoint:
    """A point with a sharp fs chart and a residue characteristic.

    residue_char is a prime, or 0 for "no p-part anywhere".
    """

    residue_char: int
    chart: FsMonoid

    def __post_init__(self):
        if self.residue_char != 0 and not _is_prime(self.residue_char):
            raise ValueError("residue_char must be a prime or 0")
        cert = is_fs(self.chart)
        if not (cert.fine and cert.saturated and cert.sharp):
            raise ValueError("chart must be fine, saturated, and sharp; got %s"
                             % (cert,))


def _is_prime(p):
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


# -- exact rational cone helpers (envelope coordinates) ----------------------

def _primitive(vec):
    g = 0
    for v in vec:
        g = gcd(g, v)
    if g == 0:
        return None
    return tuple(v // g for v in vec)


def _facet_normals(gens, m):
    """Facet normals of cone(gens) in Q^m, gens spanning Q^m.

    Every facet of a full-dimensional polyhedral cone is spanned by the
    generators lying on it, so each facet normal shows up as the integer
    kernel of some (m-1)-subset of generators.  Candidates whose kernel is
    not a line, or which do not keep all generators on one side, are noise
    and get discarded.  Returns primitive normals f with <f, g> >= 0 for all
    generators g; empty when the cone is the whole space.
    """
    if m == 0:
        return []
    normals = set()
    nonzero = [g for g in gens if any(g)]
    for subset in combinations(range(len(nonzero)), m - 1):
        rows = [list(nonzero[i]) for i in subset]
        ker = kernel_columns(rows, ncols=m)
        if len(ker) != 1:
            continue
        n = _primitive(ker[0])
        vals = [sum(a * b for a, b in zip(n, g)) for g in nonzero]
        if all(v >= 0 for v in vals):
            normals.add(n)
        elif all(v <= 0 for v in vals):
            normals.add(tuple(-x for x in n))
    return sorted(normals)


def _parallelepiped_points(cols, m):
    """Integer points of {W @ t : 0 <= t_i < 1} for an invertible m x m W.

    One point per class of Z^m modulo the column lattice: take class
    representatives from the Smith form and normalize them into the box by
    subtracting the floor of their W-coordinates.
    """
    W = [[cols[j][i] for j in range(m)] for i in range(m)]
    U, D, _ = snf_with_transforms(W)
    Uinv = int_inverse(U)
    Winv = _fraction_inverse(W)
    diag = [D[i][i] for i in range(m)]
    points = []
    for cls_tuple in product(*(range(d) for d in diag)):
        x = [sum(Uinv[i][j] * cls_tuple[j] for j in range(m)) for i in range(m)]
        t = [sum(Winv[i][j] * x[j] for j in range(m)) for i in range(m)]
        shift = [ti - (ti.numerator // ti.denominator) for ti in t]
        pt = tuple(int(sum(Fraction(W[i][j]) * shift[j] for j in range(m)))
                   for i in range(m))
        points.append(pt)
    return points


def _fraction_inverse(rows):
    n = len(rows)
    a = [[Fraction(v) for v in r] + [Fraction(int(i == j)) for j in range(n)]
         for i, r in enumerate(rows)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [r[n:] for r in a]


def _saturation_candidates(gens, m, facets):
    """Generators of cone(gens) cap Z^m, for a pointed full-dim cone.

    Any cone element decomposes over a linearly independent generator subset
    (extendable to size m since the generators span), and splitting off
    integer parts leaves a point of that subset's half-open parallelepiped.
    So the generators together with all such parallelepiped points generate.
    A cheap reduction pass drops candidates that differ from a kept one by a
    cone element; degree induction keeps the generated monoid intact.
    """
    nonzero = [g for g in gens if any(g)]
    cand = set(nonzero)
    for subset in combinations(nonzero, m):
        if _det([list(c) for c in zip(*subset)]) == 0:
            continue
        for pt in _parallelepiped_points(list(subset), m):
            if any(pt):
                cand.add(pt)

    def deg(x):
        return sum(sum(a * b for a, b in zip(f, x)) for f in facets)

    def in_cone(x):
        return all(sum(a * b for a, b in zip(f, x)) >= 0 for f in facets)

    kept = []
    for x in sorted(cand, key=deg):
        if not any(in_cone([a - b for a, b in zip(x, y)]) for y in kept):
            kept.append(x)
    return kept


def _det(rows):
    n = len(rows)
    a = [[Fraction(v) for v in r] for r in rows]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] * inv
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return int(det) if det.denominator == 1 else det


def _monoid_member(target, gens, facets):
    """Decide target in <gens> by bounded search.

    The facet-sum functional is strictly positive on nonzero cone elements
    (the cone is pointed here), so coefficients are bounded by degree and the
    search tree is finite.  Residuals outside the cone are pruned.
    """
    nonzero = [g for g in gens if any(g)]

    def deg(x):
        return sum(sum(a * b for a, b in zip(f, x)) for f in facets)

    def in_cone(x):
        return all(sum(a * b for a, b in zip(f, x)) >= 0 for f in facets)

    degs = [deg(g) for g in nonzero]
    memo = {}

    def search(idx, residual):
        if not any(residual):
            return True
        if idx == len(nonzero):
            return False
        key = (idx, residual)
        if key in memo:
            return memo[key]
        ok = False
        if in_cone(residual):
            step = nonzero[idx]
            top = deg(residual) // degs[idx]
            for c in range(top + 1):
                nxt = tuple(r - c * s for r, s in zip(residual, step))
                if search(idx + 1, nxt):
                    ok = True
                    break
        memo[key] = ok
        return ok

    return search(0, tuple(target))


def _envelope_data(P):
    """Basis columns of the envelope lattice, and generators in that basis."""
    d = P.ambient_rank
    basis = lattice_hnf([list(g) for g in P.generators], d)
    if not basis:
        return [], []
    solver = SpanSolver([list(b) for b in basis], d)
    coords = []
    for g in P.generators:
        c = solver.solve(list(g))
        assert c is not None, "generator escaped its own span"
        coords.append(tuple(c))
    return list(basis), coords


def _desk_gate(P):
    if P.ambient_rank > MAX_AMBIENT_RANK or len(P.generators) > MAX_GENERATORS:
        raise ValueError(
            "desk-scale bound exceeded: need ambient_rank <= %d and at most "
            "%d generators, got rank %d with %d generators"
            % (MAX_AMBIENT_RANK, MAX_GENERATORS,
               P.ambient_rank, len(P.generators)))


def is_fs(P):
    """Certificate (fine, saturated, sharp) for a desk-scale monoid.

    Fine is structural: a finite list of lattice generators is finitely
    generated and cancellative.  Sharp fails exactly when some nonzero
    generator lies in the lineality space of the cone (units form the face
    cut out by the lineality, and a monoid whose cone is a line through the
    origin is a group).  Saturation compares the monoid with cone cap
    envelope-lattice: first the lineality lattice must already consist of
    units, then the sharp quotient must contain every candidate generator of
    its cone's lattice points.
    """
    _desk_gate(P)
    basis, coords = _envelope_data(P)
    r = len(basis)
    if r == 0:
        return FsCertificate(fine=True, saturated=True, sharp=True)

    facets = _facet_normals(coords, r)
    lineality = kernel_columns([list(f) for f in facets], ncols=r)
    on_line = SpanSolver([list(v) for v in lineality], r) if lineality else None
    unit_gens = []
    for c in coords:
        if not any(c):
            continue
        if on_line is not None and on_line.contains(list(c)):
            unit_gens.append(c)
    sharp = not unit_gens

    # lattice points of the lineality must all be units already
    if lattice_hnf([list(u) for u in unit_gens], r) != \
            lattice_hnf([list(v) for v in lineality], r):
        return FsCertificate(fine=True, saturated=False, sharp=sharp)

    s = len(lineality)
    if s:
        # project along the unit lattice; it is saturated, so the Smith
        # transform has unit diagonal and the last coordinates give Z^(r-s)
        U, D, _ = snf_with_transforms([[v[i] for v in lineality]
                                       for i in range(r)])
        assert all(D[i][i] == 1 for i in range(s)), "lineality not saturated"
        imgs = [tuple(sum(U[i][j] * c[j] for j in range(r))
                      for i in range(s, r)) for c in coords]
        m = r - s
        facets = _facet_normals(imgs, m)
    else:
        imgs, m = coords, r

    for h in _saturation_candidates(imgs, m, facets):
        if not _monoid_member(h, imgs, facets):
            return FsCertificate(fine=True, saturated=False, sharp=sharp)
    return FsCertificate(fine=True, saturated=True, sharp=sharp)


def group_envelope(P):
    """The envelope P^gp as a free group; basis columns via envelope_basis."""
    basis, _ = _envelope_data(P)
    return FgAbGroup.free(len(basis))


def envelope_basis(P):
    """Basis of the envelope lattice inside the ambient lattice.

    Columns are integer vectors in Z^ambient_rank (to be read over the
    denominator); they are the explicit embedding of group_envelope(P).
    """
    basis, _ = _envelope_data(P)
    return [tuple(b) for b in basis]


def kummer_root(P, n):
    """The n-th root monoid and the envelope inclusion.

    The root reuses the generator columns with the denominator multiplied by
    n, so roots compose on the nose.  Identifying both envelopes with the
    integer column lattice, the inclusion of the original monoid into its
    root is multiplication by n.
    """
    n = int(n)
    if n < 1:
        raise ValueError("root degree must be a positive integer")
    root = FsMonoid(P.ambient_rank, P.generators, P.denominator * n)
    env = group_envelope(P)
    return root, GroupHom.scalar(env, n)


def gamma(P, n):
    """Quotient of the root envelope by the original envelope, (Z/n)^rank."""
    _, inclusion = kummer_root(P, n)
    return inclusion.cokernel()


def hn_points(P, n, p):
    """Points of the cover-automorphism group over a point of residue char p.

    Splits n = p_power * n_prime with n_prime prime to p; only the prime-to-p
    quotient contributes points (the p-part is connected), so the group is
    (Z/n_prime)^rank.  p = 0 keeps all of gamma(P, n).
    """
    n = int(n)
    if n < 1:
        raise ValueError("level must be a positive integer")
    if p != 0 and not _is_prime(p):
        raise ValueError("residue characteristic must be a prime or 0")
    p_power = 1
    n_prime = n
    if p:
        while n_prime % p == 0:
            n_prime //= p
            p_power *= p
    return HnPoints(group=gamma(P, n_prime), n_prime=n_prime, p_power=p_power)
