"""Cochain complexes over Z, Z/m, Q, with exact cohomology.

A module is a finitely generated lattice read through a scalar tag: Int
means the group itself, ModM(m) folds in m-fold relations so one integer
engine serves both, Rat keeps only rational dimensions, and RatModInt is a
placeholder that must be resolved through a colimit before any computation.
Complexes carry explicit truncation: the top degree has no outgoing
differential, so cohomology there is refused rather than reported wrong.
"""

from dataclasses import dataclass

from ._solve import SpanSolver, column_echelon
from .fgab import FgAbGroup, GroupHom, IntegerMatrix


# -- scalar tags --------------------------------------------------------------

@dataclass(frozen=True)
class Int:
    def render(self):
        return "Z"


@dataclass(frozen=True)
class ModM:
    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("ModM needs m >= 2")

    def render(self):
        return "Z/%d" % self.m


@dataclass(frozen=True)
class Rat:
    def render(self):
        return "Q"


@dataclass(frozen=True)
class RatModInt:
    def render(self):
        return "Q/Z"


def tag_to_json(tag):
    if isinstance(tag, ModM):
        return {"tag": "mod", "m": tag.m}
    return {"tag": {Int: "int", Rat: "rat", RatModInt: "ratmodint"}[type(tag)]}


def tag_from_json(data):
    if data["tag"] == "mod":
        return ModM(int(data["m"]))
    return {"int": Int, "rat": Rat, "ratmodint": RatModInt}[data["tag"]]()


@dataclass(frozen=True)
class RationalRank:
    """Cohomology of a Rat-tag complex: a Q-vector space dimension."""

    dim: int

    def render(self):
        if self.dim == 0:
            return "0"
        if self.dim == 1:
            return "Q"
        return "Q^%d" % self.dim

    def is_trivial(self):
        return self.dim == 0

    def is_isomorphic(self, other):
        return isinstance(other, RationalRank) and self.dim == other.dim

    def to_json(self):
        return {"rational_rank": self.dim}

    def __str__(self):
        return self.render()


# -- modules ------------------------------------------------------------------

@dataclass(frozen=True)
class Module:
    """A lattice read through a scalar tag, with an integer twist."""

    lattice: FgAbGroup
    tag: object
    twist: int = 0

    def __post_init__(self):
        if not isinstance(self.tag, (Int, ModM, Rat, RatModInt)):
            raise ValueError("unknown scalar tag")

    @property
    def generators(self):
        return self.lattice.generators

    def folded(self):
        """The semantics as a plain group, for Int and ModM tags."""
        if isinstance(self.tag, Int):
            return self.lattice
        if isinstance(self.tag, ModM):
            m = self.tag.m
            g = self.lattice.generators
            extra = IntegerMatrix([[m if i == j else 0 for j in range(g)]
                                   for i in range(g)])
            return FgAbGroup(g, self.lattice.relations.hstack(extra))
        raise ValueError("tag %s has no finitely presented fold" %
                         self.tag.render())

    def rational_dim(self):
        return self.lattice.free_rank

    def to_json(self):
        data = tag_to_json(self.tag)
        data.update(lattice=self.lattice.to_json(), twist=self.twist)
        return data


def module_int(group, twist=0):
    return Module(group, Int(), twist)


def module_mod(group, m, twist=0):
    return Module(group, ModM(m), twist)


def module_rat(group, twist=0):
    return Module(group, Rat(), twist)


# -- complexes ----------------------------------------------------------------

def _rank(cols, nrows):
    work = [list(c) for c in cols]
    return len(column_echelon(work, nrows))


def _column_in_rational_span(span_cols, col, nrows):
    base = _rank(span_cols, nrows)
    return _rank(list(span_cols) + [list(col)], nrows) == base


class CochainComplex:
    """Modules in degrees 0..D with differentials d^i: C^i -> C^(i+1).

    All modules share one tag.  d o d = 0 is checked on construction against
    the module semantics (columns must die in the target); pass check=False
    only to build counterexamples for verify_complex.
    """

    __slots__ = ("modules", "differentials")

    def __init__(self, modules, differentials, check=True):
        modules = tuple(modules)
        differentials = tuple(differentials)
        if not modules:
            raise ValueError("need at least one degree")
        if len(differentials) != len(modules) - 1:
            raise ValueError("need exactly one differential per adjacent pair")
        tag = modules[0].tag
        if any(m.tag != tag for m in modules):
            raise ValueError("all modules must share one scalar tag")
        if isinstance(tag, RatModInt):
            raise ValueError("divisible-torsion tags must be resolved "
                             "through a colimit before building complexes")
        for i, d in enumerate(differentials):
            if d.rows != modules[i + 1].generators or d.cols != modules[i].generators:
                raise ValueError("differential %d has shape %dx%d, expected %dx%d"
                                 % (i, d.rows, d.cols,
                                    modules[i + 1].generators, modules[i].generators))
        self.modules = modules
        self.differentials = differentials
        if check and not verify_complex(self):
            raise ValueError("differentials do not compose to zero")

    @property
    def top_degree(self):
        return len(self.modules) - 1

    def to_json(self):
        return {"modules": [m.to_json() for m in self.modules],
                "differentials": [d.to_lists() for d in self.differentials]}


def _is_zero_into(module, matrix):
    """Does the matrix vanish into the module's semantics, column by column?"""
    if isinstance(module.tag, (Int, ModM)):
        target = module.folded()
        return all(target.lattice_contains(matrix.column(j))
                   for j in range(matrix.cols))
    # rational: zero iff each column lies in the Q-span of the relations
    rel = module.lattice.relations
    span = [rel.column(j) for j in range(rel.cols)]
    return all(_column_in_rational_span(span, matrix.column(j), matrix.rows)
               for j in range(matrix.cols))


def verify_complex(C):
    """True iff every consecutive composition is zero on the semantics."""
    for i in range(len(C.differentials) - 1):
        comp = C.differentials[i + 1] @ C.differentials[i]
        if not _is_zero_into(C.modules[i + 2], comp):
            return False
    return True


def cohomology(C, i):
    """ker d^i / im d^(i-1), exactly; the truncation degree is refused.

    Int and ModM complexes give an FgAbGroup; Rat complexes give a
    RationalRank.  Degree D needs the differential out of C^D, which a
    truncated complex does not carry, so only 0 <= i < D is served.
    """
    D = C.top_degree
    if i < 0 or i >= D:
        raise ValueError(
            "degree %d outside the reliable range 0..%d of this truncation"
            % (i, D - 1))
    tag = C.modules[0].tag
    if isinstance(tag, Rat):
        return _rational_cohomology(C, i)

    source = C.modules[i].folded()
    target = C.modules[i + 1].folded()
    outgoing = GroupHom(source, target, C.differentials[i])
    kernel, basis = outgoing.kernel_with_inclusion()
    if i == 0:
        return kernel
    if not basis:
        return FgAbGroup.trivial()
    solver = SpanSolver([list(b) for b in basis], source.generators)
    incoming = C.differentials[i - 1]
    image_coords = []
    for j in range(incoming.cols):
        c = solver.solve(incoming.column(j))
        assert c is not None, "chain condition violated by incoming image"
        image_coords.append(list(c))
    extra = IntegerMatrix.from_columns(image_coords, len(basis))
    return FgAbGroup(kernel.generators, kernel.relations.hstack(extra))


def _rational_cohomology(C, i):
    def induced_rank(idx):
        # rank of d^idx on the rational quotients by the relation spans
        d = C.differentials[idx]
        rel_target = C.modules[idx + 1].lattice.relations
        cols = [d.column(j) for j in range(d.cols)]
        rcols = [rel_target.column(j) for j in range(rel_target.cols)]
        return _rank(cols + rcols, d.rows) - _rank(rcols, d.rows)

    def dim(idx):
        return C.modules[idx].rational_dim()

    rank_out = induced_rank(i)
    kernel_dim = dim(i) - rank_out
    rank_in = induced_rank(i - 1) if i > 0 else 0
    return RationalRank(kernel_dim - rank_in)
