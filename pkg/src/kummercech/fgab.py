"""Finitely generated abelian groups via integer presentations.

A group is Z^g modulo the column lattice of its relation matrix.  The Smith
normal form of the relations is computed once at construction and cached;
it yields the normal form (free rank plus invariant-factor chain), canonical
coordinates, membership tests, and the derived constructions: hom groups,
tensor products, torsion and quotients, exterior powers.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, gcd, lcm, prod

from . import _solve


class IntegerMatrix:
    """Immutable exact integer matrix (tuple of row tuples)."""

    __slots__ = ("data", "rows", "cols")

    def __init__(self, data, cols=None):
        self.data = tuple(tuple(int(v) for v in row) for row in data)
        self.rows = len(self.data)
        # a rowless matrix still remembers its width
        self.cols = len(self.data[0]) if self.rows else int(cols or 0)
        if any(len(row) != self.cols for row in self.data):
            raise ValueError("ragged matrix")

    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def zeros(cls, rows, cols):
        return cls([[0] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def from_columns(cls, columns, rows=None):
        columns = [tuple(int(v) for v in c) for c in columns]
        if rows is None:
            if not columns:
                raise ValueError("row count needed for an empty column list")
            rows = len(columns[0])
        if any(len(c) != rows for c in columns):
            raise ValueError("ragged columns")
        return cls([[c[i] for c in columns] for i in range(rows)], cols=len(columns))

    def entry(self, i, j):
        return self.data[i][j]

    def row(self, i):
        return self.data[i]

    def column(self, j):
        return tuple(row[j] for row in self.data)

    def columns(self):
        return [self.column(j) for j in range(self.cols)]

    def transpose(self):
        return IntegerMatrix(zip(*self.data), cols=self.rows)

    def hstack(self, other):
        if self.rows != other.rows:
            raise ValueError("row mismatch")
        return IntegerMatrix([a + b for a, b in zip(self.data, other.data)],
                             cols=self.cols + other.cols)

    def __matmul__(self, other):
        if isinstance(other, IntegerMatrix):
            if self.cols != other.rows:
                raise ValueError("shape mismatch")
            cols = other.cols
            return IntegerMatrix(
                [[sum(a[k] * other.data[k][j] for k in range(self.cols))
                  for j in range(cols)] for a in self.data], cols=cols)
        # vector
        vec = [int(v) for v in other]
        if len(vec) != self.cols:
            raise ValueError("shape mismatch")
        return tuple(sum(row[k] * vec[k] for k in range(self.cols)) for row in self.data)

    def __add__(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("shape mismatch")
        return IntegerMatrix([[a + b for a, b in zip(ra, rb)]
                              for ra, rb in zip(self.data, other.data)],
                             cols=self.cols)

    def __sub__(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("shape mismatch")
        return IntegerMatrix([[a - b for a, b in zip(ra, rb)]
                              for ra, rb in zip(self.data, other.data)],
                             cols=self.cols)

    def is_zero(self):
        return all(v == 0 for row in self.data for v in row)

    def to_lists(self):
        return [list(row) for row in self.data]

    def __eq__(self, other):
        return isinstance(other, IntegerMatrix) and self.data == other.data

    def __hash__(self):
        return hash(self.data)

    def __repr__(self):
        return f"IntegerMatrix({self.rows}x{self.cols})"


def smith_normal_form(M):
    """U, D, V with U @ M @ V = D, U and V unimodular, D a divisibility chain."""
    U, D, V = _solve.snf_with_transforms(M.to_lists())
    return IntegerMatrix(U), IntegerMatrix(D), IntegerMatrix(V)


class FgAbGroup:
    """Z^generators modulo the column lattice of `relations`."""

    __slots__ = ("generators", "relations", "_U", "_diag",
                 "_free_rank", "_invariant_factors")

    def __init__(self, generators, relations=None):
        generators = int(generators)
        if generators < 0:
            raise ValueError("negative generator count")
        if relations is None:
            relations = IntegerMatrix.zeros(generators, 0)
        if not isinstance(relations, IntegerMatrix):
            relations = IntegerMatrix(relations)
        if relations.rows != generators:
            raise ValueError("relation matrix must have one row per generator")
        self.generators = generators
        self.relations = relations
        U, D, _ = _solve.snf_with_transforms(relations.to_lists())
        diag = [D[i][i] for i in range(min(len(D), relations.cols))]
        diag += [0] * (generators - len(diag))
        self._U = U
        self._diag = tuple(diag)
        self._free_rank = sum(1 for d in diag if d == 0)
        self._invariant_factors = tuple(d for d in diag if d > 1)

    # -- constructors

    @classmethod
    def free(cls, rank):
        return cls(rank)

    @classmethod
    def trivial(cls):
        return cls(0)

    @classmethod
    def cyclic(cls, d):
        if d < 1:
            raise ValueError("cyclic order must be >= 1")
        return cls(1, IntegerMatrix([[d]]))

    @classmethod
    def from_invariants(cls, free_rank, invariant_factors=()):
        factors = [int(d) for d in invariant_factors]
        if any(d < 2 for d in factors):
            raise ValueError("invariant factors must be >= 2")
        g = free_rank + len(factors)
        rel = [[factors[j] if i == j else 0 for j in range(len(factors))]
               for i in range(g)]
        return cls(g, IntegerMatrix(rel))

    def direct_sum(self, other):
        g = self.generators + other.generators
        rel = []
        for i in range(self.generators):
            rel.append(list(self.relations.row(i)) + [0] * other.relations.cols)
        for i in range(other.generators):
            rel.append([0] * self.relations.cols + list(other.relations.row(i)))
        return FgAbGroup(g, IntegerMatrix(rel) if g else None)

    # -- normal form and identity

    def normal_form(self):
        return self._free_rank, self._invariant_factors

    @property
    def free_rank(self):
        return self._free_rank

    @property
    def invariant_factors(self):
        return self._invariant_factors

    def is_trivial(self):
        return self._free_rank == 0 and not self._invariant_factors

    def order(self):
        """Group order, or None for infinite."""
        if self._free_rank:
            return None
        return prod(self._invariant_factors, start=1)

    def exponent(self):
        if self._free_rank:
            return None
        return self._invariant_factors[-1] if self._invariant_factors else 1

    def is_isomorphic(self, other):
        return self.normal_form() == other.normal_form()

    def render(self):
        parts = []
        if self._free_rank == 1:
            parts.append("Z")
        elif self._free_rank > 1:
            parts.append(f"Z^{self._free_rank}")
        parts.extend(f"Z/{d}" for d in self._invariant_factors)
        return " (+) ".join(parts) if parts else "0"

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"FgAbGroup<{self.render()}>"

    def to_json(self):
        return {"free_rank": self._free_rank,
                "invariant_factors": list(self._invariant_factors)}

    # -- coordinates in the Smith basis

    def smith_orders(self):
        """Orders of the canonical coordinate positions: d > 1 first, 0 = free."""
        return tuple(d for d in self._diag if d != 1)

    def canonical_coords(self, vec):
        """Canonical coordinates of a generator-space vector.

        One slot per smith_orders() position: residues mod d on torsion
        slots, plain integers on free slots.  Equal classes give equal
        tuples.
        """
        vec = [int(v) for v in vec]
        if len(vec) != self.generators:
            raise ValueError("vector length mismatch")
        out = []
        for i, d in enumerate(self._diag):
            y = sum(self._U[i][j] * vec[j] for j in range(self.generators))
            if d == 1:
                continue
            out.append(y % d if d else y)
        return tuple(out)

    def lattice_contains(self, vec):
        """Whether vec is 0 in the group (lies in the relation lattice)."""
        vec = [int(v) for v in vec]
        for i, d in enumerate(self._diag):
            y = sum(self._U[i][j] * vec[j] for j in range(self.generators))
            if d == 0:
                if y:
                    return False
            elif y % d:
                return False
        return True

    def element_order(self, vec):
        """Order of the class of vec, or None for infinite order."""
        coords = self.canonical_coords(vec)
        orders = self.smith_orders()
        n = 1
        for c, d in zip(coords, orders):
            if d == 0:
                if c:
                    return None
            elif c:
                n = lcm(n, d // gcd(c, d))
        return n

    def subgroup_key(self, vectors):
        """Canonical key of the subgroup generated by the given classes.

        Works in the Smith coordinate space; two generating sets give equal
        keys iff they generate the same subgroup.
        """
        orders = self.smith_orders()
        s = len(orders)
        cols = [list(self.canonical_coords(v)) for v in vectors]
        cols += [[d if i == j else 0 for i in range(s)]
                 for j, d in enumerate(orders) if d]
        return _solve.lattice_hnf(cols, s)

    def smith_basis(self):
        """Generator-space vectors realizing the smith_orders() slots.

        The k-th returned vector has canonical_coords equal to the k-th unit
        tuple, so integer combinations of these vectors walk every class.
        """
        inv = _solve.int_inverse(self._U)
        cols = []
        for pos, d in enumerate(self._diag):
            if d == 1:
                continue
            cols.append(tuple(inv[i][pos] for i in range(self.generators)))
        return cols


class GroupHom:
    """Homomorphism between presented groups, as a matrix on generators."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source, target, matrix):
        if not isinstance(matrix, IntegerMatrix):
            matrix = IntegerMatrix(matrix)
        if matrix.rows != target.generators or matrix.cols != source.generators:
            raise ValueError("matrix shape must be target generators x source generators")
        for j in range(source.relations.cols):
            col = source.relations.column(j)
            if not target.lattice_contains(matrix @ col):
                raise ValueError("matrix does not carry source relations into target relations")
        self.source = source
        self.target = target
        self.matrix = matrix

    @classmethod
    def identity(cls, G):
        return cls(G, G, IntegerMatrix.identity(G.generators))

    @classmethod
    def zero(cls, source, target):
        return cls(source, target, IntegerMatrix.zeros(target.generators, source.generators))

    @classmethod
    def scalar(cls, G, n):
        n = int(n)
        m = [[n if i == j else 0 for j in range(G.generators)] for i in range(G.generators)]
        return cls(G, G, IntegerMatrix(m))

    def apply(self, vec):
        return self.matrix @ vec

    def compose(self, other):
        """self after other."""
        if other.target is not self.source and not (
                other.target.generators == self.source.generators
                and other.target.relations == self.source.relations):
            raise ValueError("composition mismatch")
        return GroupHom(other.source, self.target, self.matrix @ other.matrix)

    def is_zero_map(self):
        return all(self.target.lattice_contains(self.matrix.column(j))
                   for j in range(self.matrix.cols))

    def _preimage_lattice(self):
        """Basis columns of {x in Z^source : matrix @ x in target lattice}."""
        stacked = self.matrix.hstack(self.target.relations)
        kern = _solve.kernel_columns(stacked.to_lists(), ncols=stacked.cols)
        a = self.source.generators
        proj = [col[:a] for col in kern]
        basis = _solve.lattice_hnf(proj, a) if proj else ()
        return [list(c) for c in basis]

    def kernel_with_inclusion(self):
        """(kernel group, generator vectors in source coordinates)."""
        basis = self._preimage_lattice()
        if not basis:
            return FgAbGroup.trivial(), []
        a = self.source.generators
        solver = _solve.SpanSolver(basis, a)
        rel_cols = []
        for j in range(self.source.relations.cols):
            c = solver.solve(self.source.relations.column(j))
            if c is None:
                raise AssertionError("source relations must lie in the preimage lattice")
            rel_cols.append(c)
        rel = IntegerMatrix.from_columns(rel_cols, len(basis)) if rel_cols \
            else IntegerMatrix.zeros(len(basis), 0)
        return FgAbGroup(len(basis), rel), [tuple(c) for c in basis]

    def kernel(self):
        return self.kernel_with_inclusion()[0]

    def image(self):
        basis = self._preimage_lattice()
        a = self.source.generators
        rel = IntegerMatrix.from_columns(basis, a) if basis else IntegerMatrix.zeros(a, 0)
        return FgAbGroup(a, rel)

    def cokernel(self):
        gens_im = IntegerMatrix([list(self.matrix.row(i)) for i in range(self.matrix.rows)])
        rel = gens_im.hstack(self.target.relations)
        return FgAbGroup(self.target.generators, rel)


def subquotients(h):
    """(kernel, image, cokernel) of a homomorphism."""
    return h.kernel(), h.image(), h.cokernel()


def hom_group(A, B):
    """Hom(A, B) as an abstract group, from the normal forms."""
    fa, da = A.normal_form()
    fb, db = B.normal_form()
    out = FgAbGroup.free(fa * fb)
    for e in db:
        out = out.direct_sum(FgAbGroup.from_invariants(0, [e] * fa if fa else []))
    for d in da:
        for e in db:
            g = gcd(d, e)
            if g > 1:
                out = out.direct_sum(FgAbGroup.cyclic(g))
    return out


def tensor_groups(A, B):
    """A (x) B as an abstract group, from the normal forms."""
    fa, da = A.normal_form()
    fb, db = B.normal_form()
    pieces = [FgAbGroup.free(fa * fb)]
    for d in da:
        if fb:
            pieces.append(FgAbGroup.from_invariants(0, [d] * fb))
    for e in db:
        if fa:
            pieces.append(FgAbGroup.from_invariants(0, [e] * fa))
    for d in da:
        for e in db:
            g = gcd(d, e)
            if g > 1:
                pieces.append(FgAbGroup.cyclic(g))
    out = pieces[0]
    for p in pieces[1:]:
        out = out.direct_sum(p)
    return out


def n_torsion(G, n):
    """G[n]: kernel of multiplication by n."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    factors = [gcd(d, n) for d in G.invariant_factors]
    return FgAbGroup.from_invariants(0, sorted(d for d in factors if d > 1))


def quotient_by_n(G, n):
    """G/nG: cokernel of multiplication by n."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    factors = [n] * G.free_rank + [gcd(d, n) for d in G.invariant_factors]
    return FgAbGroup.from_invariants(0, sorted(d for d in factors if d > 1))


def exterior_power(G, q):
    """Wedge^q of a torsion-free group: free of rank C(rank, q)."""
    if q < 0:
        raise ValueError("negative exterior power")
    if G.invariant_factors:
        raise ValueError("exterior powers only supported for torsion-free groups")
    return FgAbGroup.free(comb(G.free_rank, q))


def is_isomorphic(A, B):
    return A.is_isomorphic(B)


@dataclass(frozen=True)
class TwistedGroup:
    """A group with a bookkeeping twist exponent; arithmetic ignores the twist."""

    group: FgAbGroup
    twist: int = 0

    def is_isomorphic(self, other):
        return self.twist == other.twist and self.group.is_isomorphic(other.group)

    def render(self):
        if self.twist:
            return f"{self.group.render()} (twist {self.twist})"
        return self.group.render()

    def __str__(self):
        return self.render()

    def to_json(self):
        d = self.group.to_json()
        d["twist"] = self.twist
        return d


def tensor(A, B):
    """Tensor product of twisted groups; twists add."""
    return TwistedGroup(tensor_groups(A.group, B.group), A.twist + B.twist)
