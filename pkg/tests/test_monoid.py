"""Monoid layer tests.

Frozen oracles, computed by hand or brute force before the implementation:

* <2, 3> inside N: envelope is all of Z (gcd 1), the element 1 satisfies
  2*1 in the monoid but 1 itself is not (1 = 2a + 3b has no nonnegative
  solution), so saturated must be False; sharp and fine are True.
* <(1,0),(1,1),(1,2)>: the cone is {(x,y): y >= 0, 2x >= y}; at x = k the
  integer points are y = 0..2k, and (k, y) = (k - ceil(y/2))*(1,0) + ... is
  always a sum of the three generators (checked by brute force below), so
  the monoid equals cone cap lattice: fully fs, envelope Z^2.
* gamma(N^2, 4) has presentation Z^2 / 4I, order 16, exponent 4: (Z/4)^2.
* hn_points(N, 6, p=3): 6 = 3 * 2, prime-to-3 part Z/2.
"""

import pytest
from hypothesis import given, settings, strategies as st

from kummercech._solve import SpanSolver
from kummercech.fgab import FgAbGroup
from kummercech.monoid import (FsMonoid, LogPoint, envelope_basis, gamma,
                               group_envelope, hn_points, is_fs, kummer_root)

N1 = FsMonoid.natural(1)
N2 = FsMonoid.natural(2)
N3 = FsMonoid.natural(3)
NUMERICAL_23 = FsMonoid(1, ((2,), (3,)))
WEDGE = FsMonoid(2, ((1, 0), (1, 1), (1, 2)))


def reachable_in_box(gens, bound, dim):
    """All sums of nonnegative generators with coordinates <= bound."""
    start = (0,) * dim
    seen = {start}
    frontier = [start]
    while frontier:
        base = frontier.pop()
        for g in gens:
            nxt = tuple(a + b for a, b in zip(base, g))
            if all(v <= bound for v in nxt) and nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


class TestIsFs:
    def test_natural_monoids(self):
        for P in (N1, N2, N3):
            assert is_fs(P) == (True, True, True)

    def test_numerical_23_not_saturated(self):
        # direct check: 1 is in the envelope, 2*1 is in the monoid, 1 is not
        cert = is_fs(NUMERICAL_23)
        assert cert.fine and cert.sharp
        assert not cert.saturated
        assert envelope_basis(NUMERICAL_23) == [(1,)]
        members = reachable_in_box([(2,), (3,)], 10, 1)
        assert (2,) in members and (1,) not in members

    def test_wedge_fully_fs(self):
        assert is_fs(WEDGE) == (True, True, True)
        # corroborate: inside a box, membership is exactly cone membership
        members = reachable_in_box(WEDGE.generators, 12, 2)
        for x in range(13):
            for y in range(13):
                assert ((x, y) in members) == (y <= 2 * x)

    def test_group_like_monoids(self):
        # Z as a monoid: fs but not sharp
        assert is_fs(FsMonoid(1, ((1,), (-1,)))) == (True, True, False)
        # 2Z: saturated relative to its own envelope
        assert is_fs(FsMonoid(1, ((2,), (-2,)))) == (True, True, False)
        # <2, -2, 5> generates all of Z
        assert is_fs(FsMonoid(1, ((2,), (-2,), (5,)))) == (True, True, False)
        # Z x N: fs, not sharp
        P = FsMonoid(2, ((1, 0), (-1, 0), (0, 1)))
        assert is_fs(P) == (True, True, False)

    def test_nonsharp_nonsaturated(self):
        # units along (1,1); (1,0) is in cone cap lattice but 2c + 3d = 1
        # has no nonnegative solution
        P = FsMonoid(2, ((1, 1), (-1, -1), (2, 0), (3, 0)))
        cert = is_fs(P)
        assert cert.fine and not cert.sharp
        assert not cert.saturated

    def test_zero_monoid(self):
        assert is_fs(FsMonoid(2, ((0, 0),))) == (True, True, True)
        assert is_fs(FsMonoid(3, ())) == (True, True, True)

    def test_denominator_does_not_matter(self):
        scaled = FsMonoid(1, ((2,), (3,)), denominator=7)
        assert is_fs(scaled) == is_fs(NUMERICAL_23)

    def test_desk_gate(self):
        big_rank = FsMonoid(5, ((1, 0, 0, 0, 0),))
        with pytest.raises(ValueError, match="desk-scale"):
            is_fs(big_rank)
        many = FsMonoid(1, tuple((k,) for k in range(1, 14)))
        with pytest.raises(ValueError, match="desk-scale"):
            is_fs(many)

    def test_validation(self):
        with pytest.raises(ValueError):
            FsMonoid(2, ((1,),))
        with pytest.raises(ValueError):
            FsMonoid(1, ((1,),), denominator=0)


class TestEnvelope:
    def test_ranks(self):
        assert group_envelope(N1).is_isomorphic(FgAbGroup.free(1))
        assert group_envelope(N3).is_isomorphic(FgAbGroup.free(3))
        assert group_envelope(WEDGE).is_isomorphic(FgAbGroup.free(2))

    def test_wedge_basis_is_standard_lattice(self):
        # (0,1) = (1,1) - (1,0), so the envelope is all of Z^2
        assert envelope_basis(WEDGE) == [(1, 0), (0, 1)]

    def test_sublattice_envelope(self):
        P = FsMonoid(2, ((2, 0), (0, 3)))
        assert envelope_basis(P) == [(2, 0), (0, 3)]
        assert group_envelope(P).is_isomorphic(FgAbGroup.free(2))


class TestKummerRoot:
    def test_degree_one_is_identity(self):
        root, inc = kummer_root(N1, 1)
        assert root == N1
        assert inc.matrix.to_lists() == [[1]]

    def test_degree_six_on_line(self):
        root, inc = kummer_root(N1, 6)
        assert root.denominator == 6
        assert root.generators == N1.generators
        assert inc.matrix.to_lists() == [[6]]

    def test_plane_degree_two(self):
        _, inc = kummer_root(N2, 2)
        assert inc.matrix.to_lists() == [[2, 0], [0, 2]]

    def test_composition(self):
        root_a, inc_a = kummer_root(N2, 3)
        root_ab, inc_b = kummer_root(root_a, 4)
        direct, inc_direct = kummer_root(N2, 12)
        assert root_ab == direct
        assert inc_b.compose(inc_a).matrix == inc_direct.matrix

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            kummer_root(N1, 0)


class TestGamma:
    def test_line(self):
        assert gamma(N1, 6).is_isomorphic(FgAbGroup.cyclic(6))

    def test_plane_level_four(self):
        G = gamma(N2, 4)
        assert G.order() == 16
        assert G.exponent() == 4
        assert G.is_isomorphic(FgAbGroup.from_invariants(0, (4, 4)))

    def test_wedge_level_three(self):
        assert gamma(WEDGE, 3).is_isomorphic(FgAbGroup.from_invariants(0, (3, 3)))

    def test_level_one_trivial(self):
        assert gamma(N3, 1).is_trivial()


class TestHnPoints:
    def test_line_level_six_char_three(self):
        res = hn_points(N1, 6, 3)
        assert res.group.is_isomorphic(FgAbGroup.cyclic(2))
        assert res.n_prime == 2
        assert res.p_power == 3

    def test_line_level_eight_char_two(self):
        res = hn_points(N1, 8, 2)
        assert res.group.is_trivial()
        assert res.n_prime == 1
        assert res.p_power == 8

    def test_plane_char_zero(self):
        res = hn_points(N2, 6, 0)
        assert res.group.is_isomorphic(FgAbGroup.from_invariants(0, (6, 6)))
        assert res.n_prime == 6
        assert res.p_power == 1

    def test_rejects_composite_char(self):
        with pytest.raises(ValueError):
            hn_points(N1, 6, 4)


class TestLogPoint:
    def test_valid(self):
        LogPoint(3, N2)
        LogPoint(0, WEDGE)

    def test_rejects_bad_char(self):
        with pytest.raises(ValueError):
            LogPoint(6, N1)

    def test_rejects_nonsharp_chart(self):
        with pytest.raises(ValueError, match="sharp"):
            LogPoint(2, FsMonoid(1, ((1,), (-1,))))

    def test_rejects_nonsaturated_chart(self):
        with pytest.raises(ValueError, match="sharp"):
            LogPoint(2, NUMERICAL_23)


class TestJson:
    def test_round_trip(self):
        for P in (N1, WEDGE, FsMonoid(1, ((2,), (3,)), denominator=5)):
            assert FsMonoid.from_json(P.to_json()) == P

    def test_shape(self):
        data = WEDGE.to_json()
        assert data == {"ambient_rank": 2,
                        "generators": [[1, 0], [1, 1], [1, 2]],
                        "denominator": 1}


# -- properties ---------------------------------------------------------------

dims = st.integers(1, 3)


@st.composite
def nonneg_monoids(draw):
    d = draw(dims)
    count = draw(st.integers(1, 4))
    gens = tuple(tuple(draw(st.integers(0, 3)) for _ in range(d))
                 for _ in range(count))
    return FsMonoid(d, gens)


@settings(max_examples=40, deadline=None)
@given(nonneg_monoids())
def test_saturation_agrees_with_brute_force(P):
    """If the checker says saturated, bounded-height brute force concurs.

    For generators in the nonnegative orthant every partial sum stays below
    the target, so BFS inside a box decides membership exactly.  Saturation
    demands: x in envelope lattice with k*x in the monoid forces x in the
    monoid.  Witnesses against this inside the box would contradict the
    certificate.
    """
    d = P.ambient_rank
    bound = 4 if d == 3 else 8
    cert = is_fs(P)
    assert cert.fine and cert.sharp
    members = reachable_in_box(P.generators, 4 * bound, d)
    lattice = SpanSolver([list(g) for g in P.generators], d)
    if not cert.saturated:
        return
    from itertools import product as iproduct
    for x in iproduct(range(bound + 1), repeat=d):
        if not any(x):
            continue
        if not lattice.contains(list(x)):
            continue
        multiple_in = any(tuple(k * v for v in x) in members for k in (1, 2, 3, 4))
        if multiple_in:
            assert x in members, (P, x)


@settings(max_examples=30, deadline=None)
@given(nonneg_monoids(), st.integers(1, 12))
def test_gamma_shape(P, n):
    G = gamma(P, n)
    r = len(envelope_basis(P))
    if n == 1 or r == 0:
        assert G.is_trivial()
    else:
        assert G.is_isomorphic(FgAbGroup.from_invariants(0, (n,) * r))


@settings(max_examples=30, deadline=None)
@given(nonneg_monoids(), st.integers(1, 6), st.integers(1, 6))
def test_kummer_composition(P, a, b):
    root_a, inc_a = kummer_root(P, a)
    root_ab, inc_b = kummer_root(root_a, b)
    direct, inc_direct = kummer_root(P, a * b)
    assert root_ab == direct
    assert inc_b.compose(inc_a).matrix == inc_direct.matrix


@settings(max_examples=30, deadline=None)
@given(nonneg_monoids(), st.integers(1, 24), st.sampled_from([0, 2, 3, 5]))
def test_hn_plus_p_part_recovers_gamma(P, n, p):
    res = hn_points(P, n, p)
    assert res.n_prime * res.p_power == n
    if p:
        assert res.n_prime % p != 0
    p_part = gamma(P, res.p_power)
    assert res.group.direct_sum(p_part).is_isomorphic(gamma(P, n))
