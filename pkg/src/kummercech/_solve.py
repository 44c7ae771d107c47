"""Exact integer linear algebra underneath all cohomology computations.

Dense routines operate on python ints, so nothing rounds or overflows.
The streaming kernels consume big sparse differentials chunk by chunk with
numpy, watch their own magnitude headroom, and redo the work with exact
python ints in the rare case int64 gets tight.  Mod-N work keeps every
entry in [0, N) and cannot overflow for the moduli used here.

Conventions: dense matrices are lists of rows; lattice routines take lists
of columns.  A lattice is a subgroup of Z^n given by spanning columns;
canonical bases are column-style Hermite forms.
"""

from __future__ import annotations

from math import gcd

import numpy as np
from scipy import sparse as _sp


class NeedsExactArithmetic(Exception):
    """Internal signal: int64 headroom ran out, redo exactly."""


# guard well below 2**63 so a single axpy cannot wrap
_GUARD = 1 << 61


def gcdex(a, b):
    """Extended gcd: (g, x, y) with a*x + b*y = g >= 0."""
    old_r, r = int(a), int(b)
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _ident(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def int_inverse(rows):
    """Exact inverse of a unimodular integer matrix, as integer rows."""
    from fractions import Fraction
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
    out = []
    for r in range(n):
        row = a[r][n:]
        assert all(v.denominator == 1 for v in row), "matrix was not unimodular"
        out.append([int(v) for v in row])
    return out


def _row_axpy(m, i, j, q):
    # row_i -= q * row_j
    ri, rj = m[i], m[j]
    for c in range(len(ri)):
        ri[c] -= q * rj[c]


def _col_axpy(m, j, t, q):
    # col_j -= q * col_t
    for r in range(len(m)):
        m[r][j] -= q * m[r][t]


def snf_with_transforms(mat):
    """Smith normal form with transforms: (U, D, V), U*mat*V = D.

    U, V unimodular; D diagonal, nonnegative, with d1 | d2 | ... .
    All three returned as lists of rows of python ints.
    """
    nr = len(mat)
    nc = len(mat[0]) if nr else 0
    a = [[int(v) for v in row] for row in mat]
    if nr and any(len(row) != nc for row in a):
        raise ValueError("ragged matrix")
    U = _ident(nr)
    V = _ident(nc)
    t = 0
    while t < min(nr, nc):
        # clear row t and column t, re-picking the smallest pivot as
        # remainders appear; each re-pick shrinks |pivot|, so this stops
        while True:
            best = None
            for i in range(t, nr):
                row = a[i]
                for j in range(t, nc):
                    v = row[j]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, j)
            if best is None:
                break
            _, bi, bj = best
            if bi != t:
                a[t], a[bi] = a[bi], a[t]
                U[t], U[bi] = U[bi], U[t]
            if bj != t:
                for row in a:
                    row[t], row[bj] = row[bj], row[t]
                for row in V:
                    row[t], row[bj] = row[bj], row[t]
            p = a[t][t]
            clean = True
            for i in range(t + 1, nr):
                if a[i][t]:
                    q = a[i][t] // p
                    if q:
                        _row_axpy(a, i, t, q)
                        _row_axpy(U, i, t, q)
                    if a[i][t]:
                        clean = False
            for j in range(t + 1, nc):
                if a[t][j]:
                    q = a[t][j] // p
                    if q:
                        _col_axpy(a, j, t, q)
                        _col_axpy(V, j, t, q)
                    if a[t][j]:
                        clean = False
            if clean:
                break
        if a[t][t] == 0:
            break
        # divisibility: pivot must divide the remaining block
        p = a[t][t]
        offender = None
        for i in range(t + 1, nr):
            row = a[i]
            for j in range(t + 1, nc):
                if row[j] % p:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            _row_axpy(a, t, offender, -1)
            _row_axpy(U, t, offender, -1)
            continue
        if p < 0:
            for j in range(nc):
                a[t][j] = -a[t][j]
            for j in range(nr):
                U[t][j] = -U[t][j]
        t += 1
    return U, a, V


def _axpy(x, y, q):
    # x -= q * y  (python-int column vectors)
    for i in range(len(x)):
        x[i] -= q * y[i]


def column_echelon(cols, nrows):
    """Unimodular column reduction, in place.

    `cols` is a list of python-int columns; only entries in rows < nrows act
    as constraints, anything stacked below rides along as bookkeeping.
    Afterwards every non-pivot column is zero in all constraint rows and
    every column is zero in all constraint rows above its own pivot row.
    Returns [(pivot_row, col_index), ...] with pivot_row increasing.
    """
    pivots = []
    live = set(range(len(cols)))
    for i in range(nrows):
        work = sorted(j for j in live if cols[j][i])
        while len(work) > 1:
            work.sort(key=lambda j: (abs(cols[j][i]), j))
            t = work[0]
            keep = [t]
            for s in work[1:]:
                q = cols[s][i] // cols[t][i]
                if q:
                    _axpy(cols[s], cols[t], q)
                if cols[s][i]:
                    keep.append(s)
            work = keep
        if work:
            t = work[0]
            pivots.append((i, t))
            live.discard(t)
    return pivots


def kernel_columns(mat, ncols=None):
    """Basis of the right kernel {x : mat @ x = 0} over Z, as columns.

    The basis spans the full kernel lattice, which is saturated in Z^ncols.
    Pass ncols explicitly when mat can have zero rows.
    """
    nr = len(mat)
    nc = len(mat[0]) if nr else int(ncols or 0)
    cols = []
    for j in range(nc):
        col = [int(mat[i][j]) for i in range(nr)]
        col.extend(1 if r == j else 0 for r in range(nc))
        cols.append(col)
    column_echelon(cols, nr)
    out = []
    for col in cols:
        if all(v == 0 for v in col[:nr]):
            out.append(tuple(col[nr:]))
    return out


def lattice_hnf(cols, nrows):
    """Canonical (column Hermite) basis of the lattice spanned by cols.

    Returns a tuple of columns, pivot rows increasing, pivots positive,
    entries above-left reduced into [0, pivot).  Equal lattices give equal
    outputs, so this doubles as a comparison key.
    """
    work = [[int(v) for v in c] for c in cols]
    pivots = column_echelon(work, nrows)
    basis = []
    for i, t in pivots:
        col = work[t]
        if col[i] < 0:
            col = [-v for v in col]
        basis.append((i, col))
    for idx, (i, col) in enumerate(basis):
        p = col[i]
        for jdx in range(idx):
            other = basis[jdx][1]
            q = other[i] // p
            if q:
                for r in range(nrows):
                    other[r] -= q * col[r]
    return tuple(tuple(col[:nrows]) for _, col in basis)


class SpanSolver:
    """Express target vectors as integer combinations of fixed columns."""

    def __init__(self, span_cols, nrows):
        self.nrows = nrows
        self.ncols = len(span_cols)
        cols = []
        for j, c in enumerate(span_cols):
            col = [int(v) for v in c]
            if len(col) != nrows:
                raise ValueError("span column of wrong length")
            col.extend(1 if r == j else 0 for r in range(self.ncols))
            cols.append(col)
        self._cols = cols
        self._pivots = column_echelon(cols, nrows)

    def solve(self, target):
        """Coefficients c with span @ c == target, or None."""
        r = [int(v) for v in target]
        coeff = [0] * self.ncols
        n = self.nrows
        for i, t in self._pivots:
            if r[i]:
                col = self._cols[t]
                q, rem = divmod(r[i], col[i])
                if rem:
                    return None
                for row in range(i, n):
                    r[row] -= q * col[row]
                for j in range(self.ncols):
                    coeff[j] += q * col[n + j]
        if any(r):
            return None
        return coeff

    def contains(self, target):
        return self.solve(target) is not None


# ---------------------------------------------------------------------------
# streaming kernel over Z: candidate basis cut down row by row


def kernel_int_stream(mat, chunk=2048):
    """Right-kernel basis over Z of a scipy sparse int matrix.

    Exact: a candidate column is altered or dropped only when a constraint
    row forces it, so the surviving span equals the kernel of all rows seen.
    Falls back to python-int arithmetic if int64 headroom runs out.
    """
    mat = mat.tocsr()
    if mat.nnz == 0:
        return [tuple(1 if i == j else 0 for i in range(mat.shape[1]))
                for j in range(mat.shape[1])]
    try:
        return _kernel_int_np(mat, chunk)
    except NeedsExactArithmetic:
        return _kernel_int_exact(mat)


def _kernel_int_np(mat, chunk):
    nrows, ncols = mat.shape
    B = np.eye(ncols, dtype=np.int64)
    vmax = int(np.abs(mat.data).max()) if mat.nnz else 0
    nnz_row = int(np.diff(mat.indptr).max()) if mat.nnz else 0
    for a in range(0, nrows, chunk):
        if B.shape[1] == 0:
            break
        b = min(a + chunk, nrows)
        if mat.indptr[a] == mat.indptr[b]:
            continue
        bmax = int(np.abs(B).max()) if B.size else 0
        if (bmax + 1) * (vmax + 1) * max(nnz_row, 1) >= _GUARD:
            raise NeedsExactArithmetic
        W = np.asarray(mat[a:b] @ B)
        keep = np.ones(B.shape[1], dtype=bool)
        for r in range(W.shape[0]):
            _euclid_row_int(B, W, r, keep)
        if not keep.all():
            B = B[:, keep]
    return [tuple(int(v) for v in B[:, j]) for j in range(B.shape[1])]


def _euclid_row_int(B, W, r, keep):
    w = W[r]
    while True:
        nz = np.flatnonzero(w)
        if nz.size == 0:
            return
        if nz.size == 1:
            t = int(nz[0])
            keep[t] = False
            B[:, t] = 0
            W[r:, t] = 0
            return
        t = int(nz[np.argmin(np.abs(w[nz]))])
        piv = int(w[t])
        qs = w[nz] // piv
        qs[nz == t] = 0
        sel = qs != 0
        qnz = nz[sel]
        qv = qs[sel]
        # the pivot has minimal |value|, so every other nonzero gives q != 0
        hi = int(np.abs(qv).max())
        if (hi + 1) * (int(np.abs(B[:, t]).max()) + 1) + int(np.abs(B[:, qnz]).max()) >= _GUARD:
            raise NeedsExactArithmetic
        if (hi + 1) * (int(np.abs(W[r:, t]).max()) + 1) + int(np.abs(W[r:, qnz]).max()) >= _GUARD:
            raise NeedsExactArithmetic
        B[:, qnz] -= B[:, t : t + 1] * qv
        W[r:, qnz] -= W[r:, t : t + 1] * qv


def _kernel_int_exact(mat):
    nrows, ncols = mat.shape
    cols = [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    live = list(range(ncols))
    indptr, indices, data = mat.indptr, mat.indices, mat.data
    for r in range(nrows):
        lo, hi = indptr[r], indptr[r + 1]
        if lo == hi:
            continue
        ent = [(int(indices[k]), int(data[k])) for k in range(lo, hi)]
        w = {}
        for j in live:
            col = cols[j]
            s = 0
            for idx, v in ent:
                s += v * col[idx]
            if s:
                w[j] = s
        while len(w) > 1:
            t = min(w, key=lambda j: (abs(w[j]), j))
            piv = w[t]
            for s_ in [j for j in w if j != t]:
                q = w[s_] // piv
                if q:
                    _axpy(cols[s_], cols[t], q)
                    w[s_] -= q * piv
                if not w[s_]:
                    del w[s_]
        if w:
            (t, _), = w.items()
            live.remove(t)
    return [tuple(cols[j]) for j in live]


# ---------------------------------------------------------------------------
# mod-N kernel and Howell-form utilities

def _mod_dtype(N):
    # intermediate values in the euclid update stay below N*N
    return np.int16 if N * N < 30000 else np.int64


def kernel_modn_stream(mat, N, chunk=2048):
    """Spanning columns of {x in (Z/N)^ncols : mat @ x = 0 mod N}.

    Returns an (ncols x k) int64 array with entries in [0, N).  Exact for
    the same reason as the integer stream; the zero-divisor case keeps the
    annihilator multiple of a pivot column, so the span never loses a mod-N
    kernel element.
    """
    mat = mat.tocsr()
    nrows, ncols = mat.shape
    N = int(N)
    if N < 2:
        raise ValueError("modulus must be >= 2")
    dt = _mod_dtype(N)
    B = np.eye(ncols, dtype=dt)
    for a in range(0, nrows, chunk):
        if B.shape[1] == 0:
            break
        b = min(a + chunk, nrows)
        if mat.indptr[a] == mat.indptr[b]:
            continue
        W = np.asarray(mat[a:b] @ B.astype(np.int64)) % N
        W = W.astype(dt)
        keep = np.ones(B.shape[1], dtype=bool)
        for r in range(W.shape[0]):
            _euclid_row_modn(B, W, r, keep, N)
        if not keep.all():
            B = B[:, keep]
    B = B.astype(np.int64) % N
    return B[:, np.any(B, axis=0)] if B.size else B


def _euclid_row_modn(B, W, r, keep, N):
    w = W[r]
    while True:
        nz = np.flatnonzero(w)
        if nz.size == 0:
            return
        if nz.size == 1:
            t = int(nz[0])
            g = gcd(int(w[t]), N)
            ann = N // g
            # replace the pivot column by its annihilator multiple: that is
            # exactly the part of its span that this row still allows
            newb = (B[:, t].astype(np.int64) * ann) % N
            B[:, t] = newb.astype(B.dtype)
            if r + 1 < W.shape[0]:
                W[r + 1 :, t] = ((W[r + 1 :, t].astype(np.int64) * ann) % N).astype(W.dtype)
            w[t] = 0
            if not newb.any():
                keep[t] = False
            return
        t = int(nz[np.argmin(w[nz])])
        piv = int(w[t])
        qs = w[nz] // piv
        qs[nz == t] = 0
        sel = qs != 0
        qnz = nz[sel]
        qv = qs[sel]
        B[:, qnz] = (B[:, qnz] - B[:, t : t + 1] * qv) % N
        W[r:, qnz] = (W[r:, qnz] - W[r:, t : t + 1] * qv) % N


def modn_echelon(cols, N):
    """Column echelon over Z/N on a list of 1-d int64 arrays, in place.

    Entries stay in [0, N).  Returns [(pivot_row, col_index), ...]; every
    column ends up zero in all rows above its pivot row, and non-pivot
    columns end up zero everywhere.
    """
    if not cols:
        return []
    n = cols[0].shape[0]
    pivots = []
    live = set(range(len(cols)))
    for i in range(n):
        work = sorted(j for j in live if cols[j][i])
        while len(work) > 1:
            work.sort(key=lambda j: (int(cols[j][i]), j))
            t = work[0]
            piv = int(cols[t][i])
            keep = [t]
            for s in work[1:]:
                q = int(cols[s][i]) // piv
                if q:
                    cols[s] = (cols[s] - q * cols[t]) % N
                if cols[s][i]:
                    keep.append(s)
            work = keep
        if work:
            t = work[0]
            pivots.append((i, t))
            live.discard(t)
    return pivots


def modn_howell(K, N):
    """Howell-form spanning set of the column span of K over Z/N.

    K: (n x k) array-like with entries in [0, N).  Returns (cols, pivots)
    where cols is a list of 1-d int64 arrays, one pivot per column, pivot
    rows strictly increasing, and the span closed under leading-zero
    truncation: the annihilator multiple of any column lies in the span of
    the later columns.  That closure is what makes forward substitution
    complete over Z/N.
    """
    K = np.asarray(K, dtype=np.int64) % N
    cols = [K[:, j].copy() for j in range(K.shape[1]) if K[:, j].any()]
    while True:
        pivots = modn_echelon(cols, N)
        cols = [cols[t] for _, t in pivots]
        pivots = [(i, idx) for idx, (i, _) in enumerate(pivots)]
        fresh = []
        for i, t in pivots:
            g = gcd(int(cols[t][i]), N)
            if g == 1:
                continue
            extra = (cols[t] * (N // g)) % N
            if extra.any() and not _modn_in_span(cols, pivots, N, extra):
                fresh.append(extra)
        if not fresh:
            return cols, pivots
        cols.extend(fresh)


def _modn_in_span(cols, pivots, N, target):
    return modn_solve(cols, pivots, N, target) is not None


def modn_solve(cols, pivots, N, target):
    """Coefficients c (int64 array) with sum c_j cols_j = target mod N, or None.

    Complete when (cols, pivots) came from modn_howell.
    """
    r = np.asarray(target, dtype=np.int64) % N
    coeff = np.zeros(len(cols), dtype=np.int64)
    for i, t in pivots:
        v = int(r[i])
        if v:
            g0 = int(cols[t][i])
            d = gcd(g0, N)
            if v % d:
                return None
            nd = N // d  # >= 2: a pivot entry is nonzero mod N
            c = ((v // d) * pow((g0 // d) % nd, -1, nd)) % nd
            coeff[t] = c
            r = (r - c * cols[t]) % N
    if r.any():
        return None
    return coeff


def modn_relations(cols, pivots, N):
    """Complete relation columns for the module presented on Howell columns.

    The presented module is Z^k -> (Z/N)^n, e_t -> cols[t]; the returned
    columns generate {c : sum c_j cols_j = 0 mod N}.
    """
    k = len(cols)
    out = []
    for i, t in pivots:
        g = gcd(int(cols[t][i]), N)
        ann = N // g
        target = (cols[t] * ann) % N
        if target.any():
            coeff = modn_solve(cols, pivots, N, target)
            if coeff is None:
                raise AssertionError("howell closure violated")
        else:
            coeff = np.zeros(k, dtype=np.int64)
        rel = -coeff
        rel[t] += ann
        out.append([int(v) for v in rel])
    return out
