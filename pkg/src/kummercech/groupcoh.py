"""Cohomology of finite abelian groups acting on modules.

The computation runs over the truncated inhomogeneous standard complex with
C^r = Map(A^r, M), one module generator per (tuple, generator) pair, so the
top module has |A|^D * generators(M) entries; a configurable budget refuses
anything larger (environment variable KUMMERCECH_BAR_BUDGET overrides the
default of two million).  Differentials are assembled as sparse matrices in
one vectorized pass per face.

For a trivial action the module splits into its free and cyclic pieces and
each piece streams through the integer or mod-N elimination engine; the
differential pattern is shared by all pieces.  Nontrivial actions go through
dense matrices and the generic presented-module path, which limits them to
small instances.  Rational coefficients use the closed form (invariants in
degree zero, nothing above), cross-checked against a dense rational bar
complex when the instance is small enough to afford one.

There is no product-group shortcut: products cost exactly their order and go
through the same complex as everything else.
"""

import os
from functools import lru_cache
from math import prod

import numpy as np
from scipy import sparse

from . import _solve
from .cochain import (CochainComplex, Int, ModM, Module, Rat, RationalRank,
                      _is_zero_into)
from .cochain import cohomology as complex_cohomology
from .fgab import FgAbGroup, GroupHom, IntegerMatrix, n_torsion, quotient_by_n

BUDGET_ENV = "KUMMERCECH_BAR_BUDGET"
DEFAULT_BUDGET = 2 * 10 ** 6
DENSE_LIMIT = 4 * 10 ** 6
RAT_CROSS_LIMIT = 20 * 10 ** 3


def _budget():
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else DEFAULT_BUDGET


class FiniteAction:
    """A finite abelian group acting on a module by one matrix per generator.

    The identity encoding is the trivial action.  Matrices are checked to be
    well defined on the module, to commute pairwise, and to have the right
    order, all modulo the module semantics.
    """

    __slots__ = ("acting_group", "module", "action", "_trivial")

    def __init__(self, acting_group, module, action=None):
        if acting_group.order() is None:
            raise ValueError("acting group must be finite")
        g = module.generators
        if action is None:
            action = tuple(IntegerMatrix.identity(g)
                           for _ in range(acting_group.generators))
        action = tuple(m if isinstance(m, IntegerMatrix) else IntegerMatrix(m)
                       for m in action)
        if len(action) != acting_group.generators:
            raise ValueError("need one action matrix per acting-group generator")
        ident = IntegerMatrix.identity(g)
        for k, mat in enumerate(action):
            if mat.rows != g or mat.cols != g:
                raise ValueError("action matrix %d has wrong shape" % k)
            if not _is_zero_into(module, mat @ module.lattice.relations):
                raise ValueError("action matrix %d not well defined" % k)
            unit = [1 if j == k else 0 for j in range(acting_group.generators)]
            order = acting_group.element_order(unit)
            power = ident
            for _ in range(order):
                power = mat @ power
            if not _is_zero_into(module, power - ident):
                raise ValueError("action matrix %d does not have order "
                                 "dividing %d" % (k, order))
        for i in range(len(action)):
            for j in range(i):
                comm = action[i] @ action[j] - action[j] @ action[i]
                if not _is_zero_into(module, comm):
                    raise ValueError("action matrices %d and %d do not commute"
                                     % (j, i))
        self.acting_group = acting_group
        self.module = module
        self.action = action
        self._trivial = all(_is_zero_into(module, mat - ident)
                            for mat in action)

    @classmethod
    def trivial(cls, acting_group, module):
        return cls(acting_group, module)

    @property
    def is_trivial_action(self):
        return self._trivial

    @property
    def order(self):
        return self.acting_group.order()


# -- group element bookkeeping ------------------------------------------------

def _digit_weights(orders):
    """Mixed-radix weights for canonical coordinates, first digit heaviest."""
    p = prod(orders) if orders else 1
    weights = []
    w = p
    for d in orders:
        w //= d
        weights.append(w)
    return p, weights


def _digit_data(group):
    orders = group.smith_orders()
    p, weights = _digit_weights(orders)
    return p, list(orders), weights


@lru_cache(maxsize=16)
def _addition_table(orders):
    p, weights = _digit_weights(orders)
    idx = np.arange(p, dtype=np.int64)
    table = np.zeros((p, p), dtype=np.int64)
    for d, w in zip(orders, weights):
        dig = (idx // w) % d
        table += ((dig[:, None] + dig[None, :]) % d) * w
    return table


def _element_blocks(A, p, orders, weights):
    """Action matrix of every group element, indexed like the tuples.

    Element idx has canonical digits c_k; its matrix is the product of the
    smith-basis matrices to the powers c_k.  Entries are reduced mod m for
    ModM modules to keep products small; for other tags the finite order
    keeps them bounded.
    """
    group = A.acting_group
    g = A.module.generators
    reduce_mod = A.module.tag.m if isinstance(A.module.tag, ModM) else None

    def reduced(mat):
        if reduce_mod is None:
            return mat
        return IntegerMatrix([[v % reduce_mod for v in row]
                              for row in mat.data], cols=mat.cols)

    ident = IntegerMatrix.identity(g)
    gen_orders = [group.element_order([1 if j == k else 0
                                       for j in range(group.generators)])
                  for k in range(group.generators)]
    slot_mats = []
    for rep in group.smith_basis():
        mat = ident
        for j, v in enumerate(rep):
            e = v % gen_orders[j]
            for _ in range(e):
                mat = reduced(A.action[j] @ mat)
        slot_mats.append(mat)
    powers = []
    for d, mat in zip(orders, slot_mats):
        row = [ident]
        for _ in range(d - 1):
            row.append(reduced(mat @ row[-1]))
        powers.append(row)
    blocks = []
    for idx in range(p):
        mat = ident
        for k, (d, w) in enumerate(zip(orders, weights)):
            c = (idx // w) % d
            if c:
                mat = reduced(powers[k][c] @ mat)
        blocks.append(mat)
    return blocks


# -- differential assembly ----------------------------------------------------

def _bar_pattern(p, r, table):
    """Sparse differential C^r -> C^(r+1) for one trivial-action generator.

    Rows are (r+1)-tuples, columns r-tuples, most significant digit first.
    Face 0 drops the first entry, face i in 1..r adds neighbours i, i+1,
    face r+1 drops the last entry; signs alternate starting at +1.
    """
    n = r + 1
    total = p ** n
    idx = np.arange(total, dtype=np.int64)
    rows, cols, data = [], [], []

    def face(col_idx, sign):
        rows.append(idx)
        cols.append(col_idx)
        data.append(np.full(total, sign, dtype=np.int64))

    face(idx % (p ** r), 1)
    for i in range(1, r + 1):
        hi = idx // (p ** (n - i + 1))
        a = (idx // (p ** (n - i))) % p
        b = (idx // (p ** (n - i - 1))) % p
        lo = idx % (p ** (n - i - 1))
        merged = table[a, b]
        face((hi * p + merged) * (p ** (n - i - 1)) + lo, -1 if i % 2 else 1)
    face(idx // p, -1 if (r + 1) % 2 else 1)
    mat = sparse.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(total, p ** r)).tocsr()
    mat.eliminate_zeros()
    return mat


@lru_cache(maxsize=16)
def _cached_pattern(orders, r):
    """Shared CSR differential; consumers must treat it as read-only."""
    p, _ = _digit_weights(orders)
    table = _addition_table(orders) if r >= 1 else None
    return _bar_pattern(p, r, table)


@lru_cache(maxsize=4096)
def _factor_h(orders, N, degree):
    """Cohomology of one coefficient factor, Z for N = None else Z/N.

    Depends on the acting group only through its canonical orders, so the
    cache carries across modules and calls.
    """
    d_out = _cached_pattern(orders, degree)
    d_in = _cached_pattern(orders, degree - 1) if degree > 0 else None
    if N is None:
        return _h_int_stream(d_out, d_in)
    return _h_modn_stream(d_out, d_in, N)


def _bar_dense(p, r, table, blocks):
    """Dense differential with module blocks; face 0 acts by the element."""
    n = r + 1
    g = blocks[0].rows
    R, C = p ** n, p ** r
    out = [[0] * (C * g) for _ in range(R * g)]

    def add_block(row_t, col_t, mat):
        base_r, base_c = row_t * g, col_t * g
        for u in range(g):
            row = out[base_r + u]
            mrow = mat.data[u]
            for v in range(g):
                row[base_c + v] += mrow[v]

    def add_scalar(row_t, col_t, s):
        base_r, base_c = row_t * g, col_t * g
        for u in range(g):
            out[base_r + u][base_c + u] += s

    for idx in range(R):
        first = idx // (p ** r)
        add_block(idx, idx % (p ** r), blocks[first])
        for i in range(1, r + 1):
            hi = idx // (p ** (n - i + 1))
            a = (idx // (p ** (n - i))) % p
            b = (idx // (p ** (n - i - 1))) % p
            lo = idx % (p ** (n - i - 1))
            col = (hi * p + int(table[a, b])) * (p ** (n - i - 1)) + lo
            add_scalar(idx, col, -1 if i % 2 else 1)
        add_scalar(idx, idx // p, -1 if (r + 1) % 2 else 1)
    return IntegerMatrix(out, cols=C * g)


def _check_budget(A, D, budget):
    p = A.acting_group.order()
    g = A.module.generators
    if p ** D * g > budget:
        raise ValueError(
            "bar complex budget exceeded: |A|^D = %d^%d = %d, times %d module "
            "generators = %d > %d" % (p, D, p ** D, g, p ** D * g, budget))


def bar_complex(A, D):
    """The truncated standard complex in degrees 0..D as a dense complex.

    Gated twice: the |A|^D * generators budget, and a dense-entry limit on
    the largest materialized matrix (group_cohomology streams past the
    latter; this constructor exists for inspection and cross-checks).
    """
    if D < 0:
        raise ValueError("negative truncation degree")
    _check_budget(A, D, _budget())
    p, orders, weights = _digit_data(A.acting_group)
    g = A.module.generators
    if D >= 1:
        worst = (p ** D * g) * (p ** (D - 1) * g)
        if worst > DENSE_LIMIT:
            raise ValueError(
                "dense bar matrices need %d entries (limit %d); instances "
                "this large run only through the streaming trivial-action "
                "path of group_cohomology" % (worst, DENSE_LIMIT))
    table = _addition_table(tuple(orders))
    blocks = _element_blocks(A, p, orders, weights)
    lattice = A.module.lattice
    modules = []
    for r in range(D + 1):
        copies = p ** r
        rel = lattice.relations
        big = IntegerMatrix(
            [[rel.entry(u, c) if t == s else 0
              for s in range(copies) for c in range(rel.cols)]
             for t in range(copies) for u in range(lattice.generators)],
            cols=copies * rel.cols)
        modules.append(Module(FgAbGroup(copies * lattice.generators, big),
                              A.module.tag, A.module.twist))
    diffs = [_bar_dense(p, r, table, blocks) for r in range(D)]
    return CochainComplex(modules, diffs)


# -- streaming cohomology for trivial actions ---------------------------------

def _h_int_stream(d_out, d_in):
    """ker/im for one free generator: integer streaming kernel, then spans."""
    kernel = _solve.kernel_int_stream(d_out)
    if not kernel:
        return FgAbGroup.trivial()
    if d_in is None:
        return FgAbGroup.free(len(kernel))
    ncols = d_out.shape[1]
    solver = _solve.SpanSolver([list(c) for c in kernel], ncols)
    dense_in = d_in.toarray()
    coords = []
    for j in range(dense_in.shape[1]):
        c = solver.solve([int(v) for v in dense_in[:, j]])
        assert c is not None, "image escaped the kernel lattice"
        coords.append(list(c))
    rel = IntegerMatrix.from_columns(coords, len(kernel))
    return FgAbGroup(len(kernel), rel)


def _h_modn_stream(d_out, d_in, N):
    """ker/im for one Z/N generator, natively mod N."""
    B = _solve.kernel_modn_stream(d_out, N)
    hcols, pivots = _solve.modn_howell(B, N)
    k = len(hcols)
    if k == 0:
        return FgAbGroup.trivial()
    rel_cols = [list(c) for c in _solve.modn_relations(hcols, pivots, N)]
    if d_in is not None:
        dense_in = d_in.toarray().astype(np.int64) % N
        for j in range(dense_in.shape[1]):
            c = _solve.modn_solve(hcols, pivots, N, dense_in[:, j])
            assert c is not None, "image escaped the mod-N kernel"
            rel_cols.append([int(v) for v in c])
    rel = IntegerMatrix.from_columns(rel_cols, k)
    return FgAbGroup(k, rel)


def invariants(A):
    """Kernel of all action(g) - identity, as a subgroup of the module.

    For a Rat module the returned group is the invariant sublattice; its
    free rank is the dimension of the rational invariants.
    """
    module = A.module
    sem = module.folded() if isinstance(module.tag, (Int, ModM)) \
        else module.lattice
    if not A.action or A.is_trivial_action:
        return sem
    g = module.generators
    ident = IntegerMatrix.identity(g)
    stacked_rows = []
    target = sem
    for k, mat in enumerate(A.action):
        stacked_rows.extend((mat - ident).to_lists())
        if k:
            target = target.direct_sum(sem)
    hom = GroupHom(sem, target, IntegerMatrix(stacked_rows, cols=g))
    return hom.kernel()


def cyclic_closed_form(m, M, degrees):
    """Trivial-action cohomology of a cyclic group of order m.

    Degree 0 gives the module, odd degrees its m-torsion, positive even
    degrees its mod-m quotient.  Accepts a Module, or a FiniteAction whose
    action is trivial and whose group is cyclic of order m.
    """
    if isinstance(M, FiniteAction):
        if not M.is_trivial_action:
            raise ValueError("closed form requires the trivial action")
        if M.order != m:
            raise ValueError("acting group order %s is not %d" % (M.order, m))
        M = M.module
    if m < 1:
        raise ValueError("order must be positive")
    if isinstance(M.tag, Rat):
        out = []
        for i in degrees:
            out.append(RationalRank(M.rational_dim() if i == 0 else 0))
        return out
    F = M.folded()
    out = []
    for i in degrees:
        if i == 0:
            out.append(F)
        elif i % 2:
            out.append(n_torsion(F, m))
        else:
            out.append(quotient_by_n(F, m))
    return out


def group_cohomology(A, degrees):
    """H^i of the standard complex for each requested degree.

    Rational modules take the closed form (invariants, then zero), verified
    against a dense rational complex when small.  Trivial actions split the
    module into free and cyclic pieces and stream each one.  Nontrivial
    actions run the dense generic path.
    """
    degrees = [int(i) for i in degrees]
    if any(i < 0 for i in degrees):
        raise ValueError("negative degree")
    if not degrees:
        return []
    D = max(degrees) + 1
    tag = A.module.tag

    # the closed form materializes nothing, so the complex budget does not
    # apply to it; its optional cross-check sizes itself separately
    if isinstance(tag, Rat):
        return _rat_closed_form(A, degrees)
    _check_budget(A, D, _budget())

    if not isinstance(tag, (Int, ModM)):
        raise ValueError("divisible-torsion coefficients must be resolved "
                         "through a colimit first")

    if A.is_trivial_action:
        return _trivial_action_cohomology(A, degrees, D)

    C = bar_complex(A, D)
    results = {i: complex_cohomology(C, i) for i in sorted(set(degrees))}
    return [results[i] for i in degrees]


def _rat_closed_form(A, degrees):
    inv_rank = invariants(A).free_rank
    out = [RationalRank(inv_rank if i == 0 else 0) for i in degrees]
    p = A.acting_group.order()
    g = A.module.generators
    D = max(degrees) + 1
    small = p ** D * g <= RAT_CROSS_LIMIT
    if small and D >= 1:
        small = (p ** D * g) * (p ** (D - 1) * g) <= DENSE_LIMIT
    if small and A.module.lattice.relations.cols == 0:
        C = bar_complex(A, D)
        for pos, i in enumerate(degrees):
            got = complex_cohomology(C, i)
            assert got == out[pos], "closed form disagrees with the complex"
    return out


def _trivial_action_cohomology(A, degrees, D):
    folded = A.module.folded()
    free_rank = folded.free_rank
    factors = folded.invariant_factors
    orders = A.acting_group.smith_orders()
    results = {}
    for i in sorted(set(degrees)):
        parts = [_factor_h(orders, None, i)] * free_rank
        parts += [_factor_h(orders, int(d), i) for d in factors]
        if not parts:
            h = FgAbGroup.trivial()
        else:
            h = parts[0]
            for extra in parts[1:]:
                h = h.direct_sum(extra)
        results[i] = h
    return [results[i] for i in degrees]
