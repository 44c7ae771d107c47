"""Tests for sequence assembly, the forcing solver, and the worked examples.

Oracles, fixed by hand before implementation:

  * Subgroups vs classes.  Multiplication by 2 into the integers followed
    by reduction mod 4 has image 2Z and kernel 4Z: abstractly isomorphic,
    not equal as subgroups, so the middle node must fail.  With
    multiplication by 4 the node passes.
  * Embedding criterion.  Z/2 sits inside Z/4, but Z/4 does not sit
    inside Z/2 (+) Z/2 and (Z/2)^2 does not sit inside Z/4: the
    factor-count criterion per prime power decides all three.
  * Henselian discrete valuation base.  With all classical unit
    cohomology zero, the chain forces degree 1 to the sections of the
    degree-1 direct image (one divisible line) and degree 2 to its
    degree-1 cohomology: Q/Z for a finite residue field, 0 for a
    separably closed one.  A trivial chart kills both.
  * Global Dedekind base.  With trivial class group and two finite
    boundary points the degree-1 chain closes as
    0 -> 0 -> (Q/Z)^2 -> (Q/Z)^2 -> 0; one real place makes the
    classical degree-2 constant (Z/2)^0 = 0, and the right end of the
    degree-2 chain admits exactly the two completions with candidate
    values (Q/Z)^2 and Q/Z.  A nontrivial class group leaves the refined
    degree-1 group as pure extension data.
  * Degree square.  The lift of the class 1/m at any boundary place has
    degree 1/m, so both routes around the square give 1/m mod 1; lifts
    differ by integer-degree classical classes, so the check is
    lift-independent.
"""

import pytest
from hypothesis import given, settings, strategies as st

from kummercech.exactseq import (
    ExactSequence,
    Finite,
    IndMap,
    SeparablyClosed,
    Term,
    Unknown,
    check_exact,
    dedekind_example,
    dvr_example,
    leray_low_degree,
    node_report,
    _embeds,
    _qz,
    _values_equal,
)
from kummercech.fgab import FgAbGroup, GroupHom
from kummercech.limits import DivisibleTorsion, IndGroup

Z = FgAbGroup.free(1)
TRIVIAL = FgAbGroup.trivial()


def hom_chain(*steps):
    """Sequence 0 -> A -> B -> ... -> 0 from explicit homomorphisms."""
    terms = [Term("0", TRIVIAL)]
    maps = [GroupHom.zero(TRIVIAL, steps[0].source)]
    for h in steps:
        terms.append(Term(h.source.render(), h.source))
        maps.append(h)
    terms.append(Term(steps[-1].target.render(), steps[-1].target))
    maps.append(GroupHom.zero(steps[-1].target, TRIVIAL))
    terms.append(Term("0", TRIVIAL))
    return ExactSequence(tuple(terms), tuple(maps))


class TestValueComparison:
    def test_fg_isomorphism_classes(self):
        assert _values_equal(FgAbGroup.from_invariants(0, [2, 4]),
                             FgAbGroup.from_invariants(0, [4, 2]))
        assert not _values_equal(FgAbGroup.cyclic(4),
                                 FgAbGroup.from_invariants(0, [2, 2]))

    def test_ind_normal_forms(self):
        assert _values_equal(_qz(2), _qz(2))
        assert not _values_equal(_qz(2), _qz(1))

    def test_mixed_finite(self):
        assert _values_equal(FgAbGroup.cyclic(6),
                             IndGroup(finite_part=FgAbGroup.cyclic(6)))

    def test_mixed_infinite_never_matches(self):
        assert not _values_equal(Z, IndGroup(q_rank=1))


class TestEmbeds:
    def test_prime_power_counts(self):
        assert _embeds(FgAbGroup.cyclic(2), FgAbGroup.cyclic(4))
        assert not _embeds(FgAbGroup.cyclic(4),
                           FgAbGroup.from_invariants(0, [2, 2]))
        assert not _embeds(FgAbGroup.from_invariants(0, [2, 2]),
                           FgAbGroup.cyclic(4))

    def test_divisible_absorbs_finite(self):
        assert _embeds(FgAbGroup.from_invariants(0, [8, 9]), _qz(1))
        assert not _embeds(FgAbGroup.from_invariants(0, [2, 2]), _qz(1))
        assert _embeds(FgAbGroup.from_invariants(0, [2, 2]), _qz(2))

    def test_free_needs_rational_rank(self):
        assert _embeds(Z, IndGroup(q_rank=1))
        assert not _embeds(Z, _qz(5))
        assert not _embeds(IndGroup(q_rank=1), Z)

    def test_divisible_counts_per_prime(self):
        away2 = IndGroup(
            divisible_torsion=DivisibleTorsion.excluding(1, [2]))
        assert _embeds(away2, _qz(1))
        assert not _embeds(_qz(1), away2)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.sampled_from([2, 3, 4, 8, 9]), max_size=3),
           st.lists(st.sampled_from([2, 3, 4, 8, 9]), max_size=3))
    def test_summand_always_embeds(self, left, right):
        A = FgAbGroup.from_invariants(0, sorted(left))
        B = FgAbGroup.from_invariants(0, sorted(left + right))
        assert _embeds(A, B)


class TestIndMap:
    def test_zero(self):
        m = IndMap.zero(_qz(2), _qz(1))
        assert m.kernel == _qz(2) and m.image.is_zero()

    def test_isomorphism_needs_equal_classes(self):
        IndMap.isomorphism(_qz(1), _qz(1))
        with pytest.raises(ValueError, match="equal"):
            IndMap.isomorphism(_qz(1), _qz(2))

    def test_declared_kernel_validated(self):
        with pytest.raises(ValueError, match="kernel"):
            IndMap(_qz(1), _qz(1), kernel=_qz(2), image=_qz(1))
        with pytest.raises(ValueError, match="image"):
            IndMap(_qz(2), _qz(1), kernel=_qz(1), image=_qz(2))


class TestSequencePlumbing:
    def test_term_type_validation(self):
        with pytest.raises(TypeError, match="group"):
            Term("bad", 7)

    def test_map_slot_count(self):
        with pytest.raises(ValueError, match="map slot"):
            ExactSequence((Term("0", TRIVIAL), Term("Z", Z)), (None, None))

    def test_unknown_lifecycle(self):
        u = Unknown("mystery")
        assert not u.is_resolved and u.render() == "?mystery"
        u.constrain("embeds somewhere")
        u.constrain("embeds somewhere")
        assert u.constraints == ["embeds somewhere"]
        u.value = _qz(1)
        assert Term("t", u).is_representable
        assert Term("t", u).render() == "Q/Z"

    def test_json_shape(self):
        seq = hom_chain(GroupHom.scalar(Z, 3), GroupHom(Z, FgAbGroup.cyclic(3),
                                                        [[1]]))
        blob = seq.to_json()
        assert [t["name"] for t in blob["terms"]][0] == "0"
        assert all(m["kernel"] is not None for m in blob["maps"])
        assert "->" in blob["render"]


class TestCheckExact:
    def test_multiplication_then_reduction(self):
        seq = hom_chain(GroupHom.scalar(Z, 4), GroupHom(Z, FgAbGroup.cyclic(4),
                                                        [[1]]))
        assert all(row["exact"] for row in check_exact(seq))

    def test_subgroup_comparison_catches_index_two(self):
        seq = hom_chain(GroupHom.scalar(Z, 2), GroupHom(Z, FgAbGroup.cyclic(4),
                                                        [[1]]))
        rows = check_exact(seq)
        assert [row["exact"] for row in rows] == [True, False, True]

    def test_zero_middle_map_fails_at_node_one(self):
        z2 = FgAbGroup.cyclic(2)
        seq = ExactSequence(
            (Term("0", TRIVIAL), Term("a", z2), Term("b", z2),
             Term("0", TRIVIAL)),
            (GroupHom.zero(TRIVIAL, z2), GroupHom.zero(z2, z2),
             GroupHom.zero(z2, TRIVIAL)))
        rows = check_exact(seq)
        assert rows[0]["node"] == 1 and not rows[0]["exact"]

    def test_divisible_instance_with_identity_middle(self):
        seq = ExactSequence(
            (Term("0", TRIVIAL), Term("pic", TRIVIAL), Term("loc", _qz(1)),
             Term("sections", _qz(1)), Term("0", TRIVIAL)),
            (IndMap.zero(TRIVIAL, TRIVIAL), IndMap.zero(TRIVIAL, _qz(1)),
             IndMap.isomorphism(_qz(1), _qz(1)), IndMap.zero(_qz(1), TRIVIAL)))
        assert all(row["exact"] for row in check_exact(seq))

    def test_missing_map_rejected(self):
        seq = ExactSequence((Term("0", TRIVIAL), Term("Z", Z),
                             Term("0", TRIVIAL)))
        with pytest.raises(ValueError, match="map"):
            check_exact(seq)

    def test_unrepresentable_rejected(self):
        seq = ExactSequence((Term("0", TRIVIAL), Term("u", Unknown("u")),
                             Term("0", TRIVIAL)))
        with pytest.raises(ValueError, match="representable"):
            check_exact(seq)

    def test_middle_presentation_mismatch(self):
        f = GroupHom(Z, FgAbGroup.cyclic(4), [[1]])
        g = GroupHom.zero(FgAbGroup.cyclic(2), TRIVIAL)
        seq = ExactSequence(
            (Term("Z", Z), Term("mid", FgAbGroup.cyclic(4)),
             Term("0", TRIVIAL)), (f, g))
        with pytest.raises(ValueError, match="middle"):
            check_exact(seq)


class TestLerayLowDegree:
    def zero_inputs(self):
        return {k: TRIVIAL for k in ("h1_fl", "h2_fl", "h3_fl", "h0_r1",
                                     "h1_r1", "h0_r2")}

    def test_all_zero_forces_everything(self):
        seq = leray_low_degree(self.zero_inputs())
        assert seq.term("H1_kfl").resolved_value().is_trivial()
        assert seq.term("H2_kfl").resolved_value().is_trivial()
        assert all(row["exact"] for row in check_exact(seq))

    def test_missing_input_named(self):
        bad = self.zero_inputs()
        del bad["h1_r1"]
        with pytest.raises(ValueError, match="h1_r1"):
            leray_low_degree(bad)

    def test_nonzero_degree_two_blocks_split(self):
        inputs = self.zero_inputs()
        inputs["h0_r2"] = _qz(1)
        seq = leray_low_degree(inputs)
        assert seq.pieces == ()
        u2 = seq.term("H2_kfl").value
        assert any("degree-2" in c for c in u2.constraints)

    def test_split_piece_shapes(self):
        inputs = self.zero_inputs()
        inputs["h0_r1"] = _qz(1)
        inputs["h1_r1"] = _qz(1)
        seq = leray_low_degree(inputs)
        first, second = seq.pieces
        assert first.render() == "0 -> 0 -> Q/Z -> Q/Z -> 0"
        assert second.render() == "0 -> 0 -> Q/Z -> Q/Z -> 0"
        assert all(row["exact"] for row in check_exact(first))
        assert all(row["exact"] for row in check_exact(second))

    def test_input_type_validation(self):
        bad = self.zero_inputs()
        bad["h1_fl"] = 5
        with pytest.raises(TypeError, match="h1_fl"):
            leray_low_degree(bad)


class TestDvrExample:
    def test_finite_residue(self):
        r = dvr_example(Finite())
        assert r["h1_kfl"] == _qz(1)
        assert r["h2_kfl"] == _qz(1)

    def test_separably_closed_residue(self):
        r = dvr_example(SeparablyClosed())
        assert r["h1_kfl"] == _qz(1)
        assert r["h2_kfl"].is_zero()

    def test_marker_strings_accepted(self):
        assert dvr_example("finite")["h2_kfl"] == _qz(1)
        assert dvr_example("separably-closed")["h2_kfl"].is_zero()

    def test_degree_two_input_is_computed_zero(self):
        r = dvr_example(Finite())
        assert r["r2_check"]["value"] == "0"
        assert "formula" in r["r2_check"]["how"]

    def test_trivial_chart_degenerates(self):
        r = dvr_example(SeparablyClosed(), chart_rank=0)
        assert r["h1_kfl"].is_zero() and r["h2_kfl"].is_zero()

    def test_full_chain_checks(self):
        r = dvr_example(Finite())
        assert all(row["exact"] for row in check_exact(r["sequence"]))
        for rows in r["piece_reports"]:
            assert all(row["exact"] for row in rows if row["checked"])

    def test_citations_present(self):
        r = dvr_example(Finite())
        assert "Milne" in r["citations"]["unit_cohomology"][1]

    def test_bad_marker(self):
        with pytest.raises(ValueError, match="marker"):
            dvr_example("imaginary")


class TestDedekindExample:
    def spec_z(self, places=2):
        return {"pic": TRIVIAL, "real_places": 1,
                "S": [{"residue": "finite"}] * places}

    def test_two_finite_places_sequence(self):
        rep = dedekind_example(self.spec_z())
        assert rep["picard_sequence"].render() == \
            "0 -> 0 -> (Q/Z)^2 -> (Q/Z)^2 -> 0"
        assert rep["pic_log"] == _qz(2)
        assert all(row["exact"]
                   for row in check_exact(rep["picard_sequence"]))

    def test_one_place_values(self):
        rep = dedekind_example(self.spec_z(places=1))
        assert rep["pic_log"] == _qz(1)
        assert rep["h2_fl"].is_trivial()

    def test_right_end_completions(self):
        rep = dedekind_example(self.spec_z())
        by_kind = {c["behavior"]: c for c in rep["right_end"]}
        assert by_kind["zero"]["permitted"]
        assert by_kind["zero"]["h2_kfl"] == "(Q/Z)^2"
        assert by_kind["surjective"]["permitted"]
        assert by_kind["surjective"]["h2_kfl"] == "Q/Z"

    def test_degree_diagram(self):
        rep = dedekind_example(self.spec_z())
        dd = rep["degree_diagram_report"]
        assert all(row["exact"] for row in dd["bottom_row"])
        assert dd["squares"] and all(row["commutes"] for row in dd["squares"])

    def test_real_places_constant(self):
        rep = dedekind_example({"pic": TRIVIAL, "real_places": 3,
                                "S": [Finite()]})
        assert rep["h2_fl"].is_isomorphic(FgAbGroup.from_invariants(0, [2, 2]))
        u2 = rep["h2_kfl"]
        assert isinstance(u2, Unknown) and not u2.is_resolved

    def test_nontrivial_class_group_stays_extension(self):
        rep = dedekind_example({"pic": FgAbGroup.cyclic(5), "real_places": 0,
                                "S": [Finite()]})
        pic_log = rep["pic_log"]
        assert isinstance(pic_log, Unknown) and not pic_log.is_resolved
        assert any("extension" in c for c in rep["pic_log_constraints"])

    def test_function_field_algebraically_closed_constants(self):
        rep = dedekind_example({"pic": FgAbGroup.free(1), "real_places": 0,
                                "S": [SeparablyClosed(), SeparablyClosed()],
                                "pic_degrees": [1]})
        assert rep["h2_kfl"].is_zero()
        permitted = [c["behavior"] for c in rep["right_end"]
                     if c["permitted"]]
        assert permitted == ["zero"]

    def test_torsion_degree_rejected(self):
        with pytest.raises(ValueError, match="torsion"):
            dedekind_example({"pic": FgAbGroup.cyclic(3), "real_places": 0,
                              "S": [Finite()], "pic_degrees": [1]})

    def test_degree_count_validated(self):
        with pytest.raises(ValueError, match="degree"):
            dedekind_example({"pic": FgAbGroup.free(2), "real_places": 0,
                              "S": [Finite()], "pic_degrees": [1]})

    @settings(max_examples=15, deadline=None)
    @given(places=st.integers(0, 4), real=st.integers(0, 3))
    def test_solved_nodes_always_exact(self, places, real):
        rep = dedekind_example({"pic": TRIVIAL, "real_places": real,
                                "S": [Finite()] * places})
        for seq in (rep["picard_sequence"], rep["degree_two_sequence"]):
            for row in node_report(seq):
                assert row["exact"] or not row["checked"]
