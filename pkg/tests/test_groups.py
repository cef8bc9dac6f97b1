"""Tests for the order-512 group construction and its subgroup census."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coho import groups
from coho.groups import (
    GroupConstructionError,
    alpha_automorphism,
    build_named_subgroup,
    build_sylow_hs,
    census_report,
    centralizer,
    conjugacy_classes_of_subgroups,
    cyclic_group,
    dihedral_group,
    element_orders,
    elementary_abelian_subgroups,
    evaluate_word,
    find_isomorphism,
    is_normal,
    iterated_wreath_z2,
    make_subgroup,
    maximal_elementary_abelians,
    quotient_group,
    subgroup_as_group,
    verify_quotient_wreath,
)


@pytest.fixture(scope="module")
def S():
    return build_sylow_hs()


class TestSylowConstruction:
    def test_order(self, S):
        assert S.order == 512

    def test_central_element(self, S):
        z = evaluate_word(S, [("v1", 2), ("v3", 2)])
        assert all(S.commutes(z, x) for x in range(S.order))

    def test_v3_conjugated_by_t(self, S):
        # Applying t to v1^t = v3^-1 and using t^2 = 1 forces v3^t = v1^-1.
        got = S.conjugate(S.generators["v3"], S.generators["t"])
        assert got == S.power(S.generators["v1"], -1)

    def test_defining_action(self, S):
        v1, v2, v3 = (S.generators[k] for k in ("v1", "v2", "v3"))
        t, s = S.generators["t"], S.generators["s"]
        assert S.conjugate(v1, t) == S.power(v3, -1)
        assert S.conjugate(v2, t) == S.power(v2, -1)
        assert S.conjugate(v1, s) == v2
        assert S.conjugate(v2, s) == v3
        assert S.conjugate(v3, s) == evaluate_word(S, [("v2", -1), ("v1", 1), ("v3", 1)])

    def test_element_words_roundtrip(self, S):
        # The stored word of an element evaluates back to that element.
        rng = np.random.default_rng(7)
        for x in rng.integers(0, 512, size=25):
            word = []
            for part in S.word(int(x)).split("*"):
                if part == "1":
                    continue
                name, _, exp = part.partition("^")
                word.append((name, int(exp) if exp else 1))
            assert evaluate_word(S, word) == int(x)

    def test_power_negative_exponent(self, S):
        s = S.generators["s"]
        assert S.mult[S.power(s, -1), s] == S.identity
        assert S.power(s, -3) == S.power(s, 1)

    def test_bad_table_rejected(self):
        mult = np.zeros((3, 3), dtype=np.int64)
        with pytest.raises(GroupConstructionError):
            groups.FiniteGroup(order=3, mult=mult, identity=0)


class TestNamedSubgroups:
    def test_ci_is_the_full_vector_part(self, S):
        ci = build_named_subgroup(S, "CI")
        assert ci.order == 64
        assert ci.abelian_type() == (4, 4, 4)

    def test_large_subgroup_orders(self, S):
        assert build_named_subgroup(S, "Kbeta").order == 256
        assert build_named_subgroup(S, "M").order == 256
        assert build_named_subgroup(S, "D1").order == 64
        assert build_named_subgroup(S, "D2").order == 64

    def test_ciii_is_2_2_4(self, S):
        ciii = build_named_subgroup(S, "CIII")
        assert ciii.order == 16
        assert ciii.abelian_type() == (2, 2, 4)

    def test_all_small_centralizers_are_2_2_4(self, S):
        for name in ("CII", "CIII", "CIV", "CV", "CVI"):
            assert build_named_subgroup(S, name).abelian_type() == (2, 2, 4)

    def test_rank3_subgroups_are_elementary_abelian(self, S):
        for name in ("I", "II", "III", "IV", "V", "VI"):
            sub = build_named_subgroup(S, name)
            assert sub.order == 8
            assert sub.is_elementary_abelian_2()

    def test_centralizers_match_their_names(self, S):
        pairs = {"I": "CI", "II": "CII", "III": "CIII", "IV": "CIV", "V": "CV", "VI": "CVI"}
        for sub_name, cent_name in pairs.items():
            sub = build_named_subgroup(S, sub_name)
            assert centralizer(S, sub.elements).same_elements(build_named_subgroup(S, cent_name))

    def test_m_is_a_centralizer(self, S):
        z = evaluate_word(S, [("v1", 2), ("v2", 2)])
        assert centralizer(S, [z]).same_elements(build_named_subgroup(S, "M"))

    def test_z4wr_is_the_normal_z4(self, S):
        sub = build_named_subgroup(S, "Z4wr")
        assert sub.order == 4
        assert is_normal(S, sub.elements)

    def test_unknown_name_raises(self, S):
        with pytest.raises(KeyError):
            build_named_subgroup(S, "nonesuch")

    def test_centralizer_of_identity_is_everything(self, S):
        assert centralizer(S, [S.identity]).order == 512


class TestCensus:
    def test_exactly_eight_rank4(self, S):
        assert len(elementary_abelian_subgroups(S, 4)) == 8

    def test_no_rank5(self, S):
        assert elementary_abelian_subgroups(S, 5) == []

    def test_rank4_set_matches_named_list(self, S):
        found = {s.elements for s in elementary_abelian_subgroups(S, 4)}
        named = {build_named_subgroup(S, n).elements
                 for n in ("2A", "2A_v1", "2B", "2B_v1", "2B_t", "2B_v1t", "2C", "2C_v1")}
        assert found == named

    def test_rank4_class_sizes(self, S):
        rank4 = elementary_abelian_subgroups(S, 4)
        classes = conjugacy_classes_of_subgroups(S, rank4)
        assert sorted(len(c) for c in classes) == [2, 2, 4]

    def test_rank4_all_contain_central_element(self, S):
        z = evaluate_word(S, [("v1", 2), ("v3", 2)])
        assert all(z in sub for sub in elementary_abelian_subgroups(S, 4))

    def test_conjugation_permutes_rank4(self, S):
        rank4 = {s.elements for s in elementary_abelian_subgroups(S, 4)}
        sub = next(iter(rank4))
        some = make_subgroup(S, sub)
        rng = np.random.default_rng(3)
        for y in rng.integers(0, 512, size=20):
            assert some.conjugate_by(int(y)).elements in rank4

    def test_six_classes_of_maximal_rank3(self, S):
        max3 = [s for s in maximal_elementary_abelians(S) if s.order == 8]
        assert len(conjugacy_classes_of_subgroups(S, max3)) == 6

    def test_named_rank3_pairwise_nonconjugate(self, S):
        named = [build_named_subgroup(S, n) for n in ("I", "II", "III", "IV", "V", "VI")]
        assert len(conjugacy_classes_of_subgroups(S, named)) == 6

    def test_maximal_rank3_all_in_kbeta(self, S):
        kbeta = set(build_named_subgroup(S, "Kbeta").elements)
        for sub in maximal_elementary_abelians(S):
            if sub.order == 8:
                assert set(sub.elements) <= kbeta

    def test_normal_subgroup_is_singleton_class(self, S):
        z4 = build_named_subgroup(S, "Z4wr")
        assert conjugacy_classes_of_subgroups(S, [z4]) == [[0]]

    def test_rank1_in_z2(self):
        z2 = cyclic_group(2)
        assert len(elementary_abelian_subgroups(z2, 1)) == 1

    def test_census_report_is_clean(self, S):
        rep = census_report(S)
        assert rep["rank4_count"] == 8
        assert rep["rank5_count"] == 0
        assert rep["rank4_class_sizes"] == [2, 2, 4]
        assert rep["maximal_rank3_class_count"] == 6
        assert rep["rank3_centralizer_orders"] == {
            "I": 64, "II": 16, "III": 16, "IV": 16, "V": 16, "VI": 16}
        assert rep["wreath_quotient_ok"]
        assert rep["alpha_swaps_A_and_C"]


class TestQuotientWreath:
    def test_report_passes(self, S):
        rep = verify_quotient_wreath(S)
        assert rep.normal_order == 4
        assert rep.normal_is_normal
        assert rep.quotient_order == 128
        assert rep.failed_invariants == ()
        assert rep.isomorphism_found
        assert rep.ok

    def test_v1_not_normal(self, S):
        # Negative control: v1^t = v3^-1 leaves the cyclic group <v1>.
        v1 = S.generators["v1"]
        sub = groups._closure(S.mult, S.identity, [v1])
        assert not is_normal(S, sub)

    def test_wreath_tower_orders(self):
        assert iterated_wreath_z2(1).order == 2
        assert iterated_wreath_z2(2).order == 8
        assert iterated_wreath_z2(3).order == 128

    def test_depth_two_wreath_is_dihedral(self):
        assert find_isomorphism(iterated_wreath_z2(2), dihedral_group(8)) is not None

    def test_quotient_projection_is_homomorphism(self, S):
        sub = build_named_subgroup(S, "Z4wr")
        quo, proj = quotient_group(S, sub.elements)
        rng = np.random.default_rng(11)
        a = rng.integers(0, 512, size=200)
        b = rng.integers(0, 512, size=200)
        assert np.array_equal(proj[S.mult[a, b]], quo.mult[proj[a], proj[b]])


class TestAlpha:
    def test_is_automorphism(self, S):
        fmap = alpha_automorphism(S)
        assert np.unique(fmap).size == 512
        assert np.array_equal(fmap[S.mult], S.mult[fmap[:, None], fmap[None, :]])

    def test_fixes_vector_part_and_t(self, S):
        fmap = alpha_automorphism(S)
        for name in ("v1", "v2", "v3", "t"):
            assert fmap[S.generators[name]] == S.generators[name]

    def test_swaps_a_and_c_classes(self, S):
        fmap = alpha_automorphism(S)
        a = build_named_subgroup(S, "2A")
        c = build_named_subgroup(S, "2C")
        image_of_a = tuple(int(x) for x in np.sort(fmap[np.asarray(a.elements)]))
        rank4 = elementary_abelian_subgroups(S, 4)
        classes = conjugacy_classes_of_subgroups(S, rank4)
        def class_index(elems):
            for i, cls in enumerate(classes):
                if any(rank4[j].elements == elems for j in cls):
                    return i
            raise AssertionError("subgroup not in the census")
        assert class_index(image_of_a) == class_index(c.elements)
        assert class_index(image_of_a) != class_index(a.elements)

    def test_preserves_element_orders(self, S):
        fmap = alpha_automorphism(S)
        orders = element_orders(S)
        assert np.array_equal(orders[fmap], orders)


class TestSmallGroups:
    def test_cyclic_orders(self):
        z8 = cyclic_group(8)
        assert element_orders(z8).max() == 8
        assert z8.element_order(1) == 8

    def test_dihedral_invariants(self):
        d8 = dihedral_group(8)
        inv = groups.group_invariants(d8)
        assert inv["center_order"] == 2
        assert inv["derived_order"] == 2
        assert inv["exponent"] == 4

    def test_abelian_type_of_direct_factors(self):
        z4 = cyclic_group(4)
        assert make_subgroup(z4, range(4)).abelian_type() == (4,)

    def test_subgroup_as_group_reindexes(self, S):
        ciii = build_named_subgroup(S, "CIII")
        local, elems = subgroup_as_group(ciii)
        assert local.order == 16
        for i in range(16):
            for j in range(16):
                parent = S.mult[elems[i], elems[j]]
                assert elems[local.mult[i, j]] == parent

    def test_klein_four_not_cyclic(self):
        klein = elementary_abelian_subgroups(dihedral_group(8), 2)
        assert len(klein) == 2
        assert find_isomorphism(subgroup_as_group(klein[0])[0], cyclic_group(4)) is None


class TestIsomorphism:
    def test_relabelled_group_found(self):
        d8 = dihedral_group(8)
        perm = np.array([0, 3, 1, 2, 5, 7, 4, 6])
        inv_perm = np.argsort(perm)
        mult = perm[d8.mult[np.ix_(inv_perm, inv_perm)]]
        shuffled = groups.FiniteGroup(order=8, mult=mult, identity=int(perm[0]))
        fmap = find_isomorphism(d8, shuffled)
        assert fmap is not None
        assert np.array_equal(fmap[d8.mult], shuffled.mult[fmap[:, None], fmap[None, :]])

    def test_distinguishes_z4_from_klein(self):
        klein = iterated_wreath_z2(2)
        sub = elementary_abelian_subgroups(klein, 2)[0]
        assert find_isomorphism(subgroup_as_group(sub)[0], cyclic_group(4)) is None

    def test_distinguishes_d8_from_q8(self):
        # Quaternion table over indices 1, i, j, k and negatives.
        q8 = np.array([
            [0, 1, 2, 3, 4, 5, 6, 7],
            [1, 4, 3, 6, 5, 0, 7, 2],
            [2, 7, 4, 1, 6, 3, 0, 5],
            [3, 2, 5, 4, 7, 6, 1, 0],
            [4, 5, 6, 7, 0, 1, 2, 3],
            [5, 0, 7, 2, 1, 4, 3, 6],
            [6, 3, 0, 5, 2, 7, 4, 1],
            [7, 6, 1, 0, 3, 2, 5, 4],
        ])
        quat = groups.FiniteGroup(order=8, mult=q8, identity=0)
        assert find_isomorphism(dihedral_group(8), quat) is None


@st.composite
def s_words(draw):
    names = st.sampled_from(["v1", "v2", "v3", "t", "s"])
    exps = st.integers(min_value=-3, max_value=3)
    return draw(st.lists(st.tuples(names, exps), max_size=6))


class TestWordEvaluation:
    @given(s_words())
    @settings(max_examples=60, deadline=None)
    def test_reversed_word_inverts(self, word):
        S = build_sylow_hs()
        x = evaluate_word(S, word)
        rev = [(n, -e) for n, e in reversed(word)]
        assert S.mult[x, evaluate_word(S, rev)] == S.identity

    @given(s_words(), s_words())
    @settings(max_examples=60, deadline=None)
    def test_concatenation_multiplies(self, w1, w2):
        S = build_sylow_hs()
        assert evaluate_word(S, w1 + w2) == S.mult[evaluate_word(S, w1), evaluate_word(S, w2)]
