"""Tests for minimal resolutions, cohomology, cup products, restriction."""

import json

import numpy as np
import pytest

from coho.f2linalg import BitMatrix
from coho.groups import (
    _closure,
    cyclic_group,
    dihedral_group,
    make_subgroup,
    subgroup_as_group,
)
from coho.modrep import named_module, u3_group
from coho.resolution import (
    BudgetExceededError,
    ChainMap,
    Cocycle,
    FreeResolution,
    ResolutionError,
    cocycle_from_bits,
    cohomology_dims,
    cup_product,
    generator_cocycles,
    generator_degrees,
    group_data_hash,
    lift_cocycle,
    load_resolution,
    minimal_resolution,
    resolution_for,
    restrict_class,
    save_resolution,
    verify_resolution,
)
from coho.series import RationalSeries


def series_coeffs(num, den, n):
    return RationalSeries(num, den).expand(n)


class TestSmallResolutions:
    def test_z2_betti_constant(self):
        res = minimal_resolution(cyclic_group(2), 8)
        assert res.betti == [1] * 9

    def test_z4_betti_constant(self):
        res = minimal_resolution(cyclic_group(4), 8)
        assert res.betti == [1] * 9

    def test_u3_betti_linear(self):
        res = resolution_for(u3_group(), 8)
        assert res.betti[:6] == [1, 2, 3, 4, 5, 6]

    def test_degree_zero(self):
        res = minimal_resolution(cyclic_group(2), 0)
        assert res.betti == [1]
        assert res.top_degree == 0

    def test_full_verification_small(self):
        for group in (cyclic_group(4), dihedral_group(8), u3_group()):
            res = minimal_resolution(group, 5)
            report = verify_resolution(res, products=True, ranks=True)
            assert report["ok"], report

    def test_boundary_shapes(self):
        res = minimal_resolution(dihedral_group(8), 4)
        for n in range(1, 5):
            mat = res.boundary(n)
            assert mat.rows == res.betti[n - 1] * 8
            assert mat.cols == res.betti[n] * 8

    def test_trivial_group(self):
        triv = make_subgroup(dihedral_group(8), [dihedral_group(8).identity])
        tgrp, _ = subgroup_as_group(triv)
        res = minimal_resolution(tgrp, 3)
        assert res.betti == [1, 0, 0, 0]

    def test_negative_degree_rejected(self):
        with pytest.raises(ValueError):
            minimal_resolution(cyclic_group(2), -1)


class TestPersistence:
    def test_roundtrip_and_resume(self, tmp_path):
        group = dihedral_group(8)
        out = tmp_path / "d8"
        res = minimal_resolution(group, 3, out=out)
        loaded = load_resolution(out, group)
        assert loaded.betti == res.betti
        for n in range(1, 4):
            assert loaded.boundary(n) == res.boundary(n)
        extended = minimal_resolution(group, 6, out=out)
        fresh = minimal_resolution(group, 6)
        assert extended.betti == fresh.betti
        for n in range(1, 7):
            assert extended.boundary(n) == fresh.boundary(n)

    def test_resume_refuses_other_group(self, tmp_path):
        out = tmp_path / "store"
        minimal_resolution(dihedral_group(8), 2, out=out)
        with pytest.raises(ResolutionError):
            load_resolution(out, cyclic_group(8))

    def test_group_hash_distinguishes(self):
        assert group_data_hash(dihedral_group(8)) != group_data_hash(cyclic_group(8))

    def test_budget_refusal(self):
        with pytest.raises(BudgetExceededError):
            minimal_resolution(dihedral_group(8), 4, budget_mb=0)

    def test_manifest_contents(self, tmp_path):
        out = tmp_path / "z4"
        minimal_resolution(cyclic_group(4), 3, out=out)
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["betti"] == [1, 1, 1, 1]
        assert manifest["order"] == 4
        assert len(manifest["boundary_files"]) == 3


class TestModuleCohomology:
    @pytest.fixture(scope="class")
    @staticmethod
    def series_table():
        from coho.datafiles import load_json
        return load_json("module_series.json")["series"]

    @pytest.mark.parametrize("name", ["k", "M", "Mstar", "N", "K", "W",
                                      "Wstar", "F", "X10", "Y9"])
    def test_dims_match_series(self, series_table, name):
        entry = series_table[name]
        want = series_coeffs(entry["num"], entry["den"], 12)
        got = cohomology_dims(u3_group(), named_module(name), 12)
        assert got == want, name

    def test_trivial_module_reproduces_betti(self):
        u3 = u3_group()
        res = resolution_for(u3, 9)
        assert cohomology_dims(u3, named_module("k"), 8) == res.betti[:9]

    def test_y9_sign_decision(self):
        # Of the two circulating numerators 2-2x+x^2 and 2-2x-x^2, only the
        # plus variant matches the computed dimensions (the minus variant
        # even goes negative in degree 4).
        got = cohomology_dims(u3_group(), named_module("Y9"), 6)
        plus = series_coeffs([2, -2, 1], [1, -2, 1], 6)
        minus = series_coeffs([2, -2, -1], [1, -2, 1], 6)
        assert got == plus
        assert got != minus
        assert min(minus) < 0

    def test_wrong_group_rejected(self):
        with pytest.raises(ValueError):
            cohomology_dims(cyclic_group(2), named_module("M"), 2)


class TestLiftsAndProducts:
    def test_degree_zero_identity_lift(self):
        res = resolution_for(cyclic_group(4), 4)
        one = res.dual_cocycle(0, 0)
        lift = lift_cocycle(res, one)
        for m, comp in enumerate(lift.components):
            eye = BitMatrix.identity(res.dim(m))
            assert comp == eye

    def test_lift_squares_commute(self):
        res = resolution_for(dihedral_group(8), 6)
        c = res.dual_cocycle(1, 0)
        lift = lift_cocycle(res, c)
        for m in range(1, len(lift.components)):
            lhs = lift.components[m - 1].multiply(res.boundary(m + 1))
            rhs = res.boundary(m).multiply(lift.components[m])
            assert lhs == rhs

    def test_cup_with_identity(self):
        res = resolution_for(cyclic_group(4), 4)
        one = res.dual_cocycle(0, 0)
        c = res.dual_cocycle(2, 0)
        for prod in (cup_product(res, c, one), cup_product(res, one, c)):
            assert np.array_equal(prod.coeffs, c.coeffs)

    def test_z2_polynomial_ring(self):
        res = resolution_for(cyclic_group(2), 8)
        l = res.dual_cocycle(1, 0)
        power = l
        for _ in range(7):
            power = cup_product(res, power, l)
            assert not power.is_zero()

    def test_z4_exterior_times_polynomial(self):
        res = resolution_for(cyclic_group(4), 6)
        e = res.dual_cocycle(1, 0)
        b = res.dual_cocycle(2, 0)
        assert cup_product(res, e, e).is_zero()
        assert not cup_product(res, e, b).is_zero()
        assert not cup_product(res, b, b).is_zero()
        assert not cup_product(res, cup_product(res, b, b), e).is_zero()

    def test_d8_one_vanishing_degree_one_pair(self):
        # In F2[x,y,w]/(xy) exactly one pair of distinct nonzero degree-1
        # classes multiplies to zero, whatever basis the resolution picked.
        res = resolution_for(dihedral_group(8), 4)
        classes = [cocycle_from_bits(1, bits, 2) for bits in ([0], [1], [0, 1])]
        vanishing = [
            (i, j)
            for i in range(3) for j in range(i + 1, 3)
            if cup_product(res, classes[i], classes[j]).is_zero()
        ]
        assert len(vanishing) == 1
        i, j = vanishing[0]
        assert not cup_product(res, classes[i], classes[i]).is_zero()

    def test_cup_commutative(self):
        res = resolution_for(dihedral_group(8), 5)
        a = res.dual_cocycle(1, 0)
        b = res.dual_cocycle(2, 1)
        lhs = cup_product(res, a, b)
        rhs = cup_product(res, b, a)
        assert np.array_equal(lhs.coeffs, rhs.coeffs)

    def test_generator_degrees_small(self):
        assert generator_degrees(cyclic_group(2), 6) == [1]
        assert generator_degrees(cyclic_group(4), 6) == [1, 2]
        assert generator_degrees(dihedral_group(8), 6) == [1, 1, 2]
        assert generator_degrees(u3_group(), 6) == [1, 1, 2]


class TestRestriction:
    @pytest.fixture(scope="class")
    @staticmethod
    def d8_setup():
        d8 = dihedral_group(8)
        res = resolution_for(d8, 5)
        rot = make_subgroup(d8, _closure(d8.mult, d8.identity, [d8.generators["r"]]))
        hgrp, _ = subgroup_as_group(rot)
        res_h = minimal_resolution(hgrp, 5)
        return d8, res, rot, res_h

    def test_degree_two_restricts_nontrivially(self, d8_setup):
        d8, res, rot, res_h = d8_setup
        hits = 0
        for bits in range(1, 8):
            c = cocycle_from_bits(2, [i for i in range(3) if (bits >> i) & 1], 3)
            if not restrict_class(d8, rot, res, res_h, c).is_zero():
                hits += 1
        # Restriction to the order-4 rotation subgroup has a 1-dimensional
        # image in degree 2 (the polynomial class), so exactly the 4
        # classes containing it survive.
        assert hits == 4

    def test_restriction_is_ring_map(self, d8_setup):
        d8, res, rot, res_h = d8_setup
        ones = [cocycle_from_bits(1, b, 2) for b in ([0], [1], [0, 1])]
        for c1 in ones:
            for c2 in ones:
                lhs = restrict_class(d8, rot, res, res_h,
                                     cup_product(res, c1, c2))
                rhs = cup_product(res_h,
                                  restrict_class(d8, rot, res, res_h, c1),
                                  restrict_class(d8, rot, res, res_h, c2))
                assert np.array_equal(lhs.coeffs, rhs.coeffs)

    def test_restrict_to_trivial_vanishes(self, d8_setup):
        d8, res, _, _ = d8_setup
        triv = make_subgroup(d8, [d8.identity])
        tgrp, _ = subgroup_as_group(triv)
        res_t = minimal_resolution(tgrp, 4)
        c = res.dual_cocycle(1, 0)
        assert restrict_class(d8, triv, res, res_t, c).is_zero()

    def test_degree_zero_restricts_to_itself(self, d8_setup):
        d8, res, rot, res_h = d8_setup
        one = res.dual_cocycle(0, 0)
        assert not restrict_class(d8, rot, res, res_h, one).is_zero()

    def test_mismatched_subgroup_resolution_rejected(self, d8_setup):
        d8, res, rot, _ = d8_setup
        wrong = minimal_resolution(cyclic_group(2), 3)
        with pytest.raises(ValueError):
            restrict_class(d8, rot, res, wrong, res.dual_cocycle(1, 0))


@pytest.mark.slow
class TestSylowResolution:
    def test_betti_through_degree_six(self, res_s):
        assert res_s.betti == [1, 3, 7, 14, 23, 34, 48]

    def test_minimality_and_cycles(self, res_s):
        report = verify_resolution(res_s)
        assert report["ok"], report

    def test_rank_ladder(self, res_s):
        # Alternating-sum bookkeeping: rank of each boundary is forced by
        # exactness, so spot-check the first three cheaply.
        assert res_s.boundary(1).rank() == 511
        assert res_s.boundary(2).rank() == 1025
        assert res_s.boundary(3).rank() == 2559

    def test_generator_degrees_through_six(self, res_s):
        from coho.resolution import _RES_MEMO
        _RES_MEMO[id(res_s.group)] = res_s
        degs = generator_degrees(res_s.group, 6)
        assert degs == [1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 4, 4, 5, 6]
