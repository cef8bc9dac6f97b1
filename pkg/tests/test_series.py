"""Rational series arithmetic and the E2 assembly identity."""

import pytest
from hypothesis import given, settings, strategies as st

from coho import datafiles, series
from coho.series import (
    RationalSeries,
    monomial,
    poly_add,
    poly_from_factors,
    poly_mul,
    poly_neg,
)


def geometric(w):
    """1/(1-x^w)."""
    return RationalSeries((1,), poly_add((1,), poly_neg(monomial(w))))


small_polys = st.lists(st.integers(-9, 9), min_size=1, max_size=8)
units = st.lists(st.integers(-9, 9), min_size=1, max_size=8).filter(lambda p: p[0] != 0)


class TestExpand:
    def test_geometric_square(self):
        s = RationalSeries((1,), (1, -2, 1))
        assert s.expand(4) == [1, 2, 3, 4, 5]

    def test_polynomial_product(self):
        assert poly_from_factors([[1, 2, 1], [1, -1, 1]]) == (1, 1, 0, 1, 1)

    def test_total_series_to_18(self):
        assert series.p_series().expand(18) == [
            1, 3, 7, 14, 23, 34, 48, 65, 84, 105,
            131, 163, 198, 236, 280, 330, 383, 439, 503,
        ]

    def test_non_integer_coefficient_rejected(self):
        with pytest.raises(ValueError):
            RationalSeries((1,), (2, 1)).expand(3)

    def test_zero_constant_denominator_rejected(self):
        with pytest.raises(ValueError):
            RationalSeries((1,), (0, 1))

    @given(small_polys, units, st.integers(0, 30))
    @settings(max_examples=60, deadline=None)
    def test_expand_times_denominator_recovers_numerator(self, num, den, D):
        try:
            c = RationalSeries(num, den).expand(D)
        except ValueError:
            return  # non-integer series; nothing to check
        prod = list(poly_mul(tuple(c) if any(c) else (0,), tuple(den)))
        prod += [0] * (D + 1 - len(prod))
        want = list(num) + [0] * (D + 1)
        assert prod[: D + 1] == want[: D + 1]


class TestArithmetic:
    @given(small_polys, units, small_polys, units)
    @settings(max_examples=60, deadline=None)
    def test_add_matches_coefficientwise(self, n1, d1, n2, d2):
        a, b = RationalSeries(n1, d1), RationalSeries(n2, d2)
        try:
            ea, eb, es = a.expand(50), b.expand(50), (a + b).expand(50)
        except ValueError:
            return
        assert es == [x + y for x, y in zip(ea, eb)]

    @given(small_polys, units, small_polys, units)
    @settings(max_examples=60, deadline=None)
    def test_mul_matches_convolution(self, n1, d1, n2, d2):
        a, b = RationalSeries(n1, d1), RationalSeries(n2, d2)
        try:
            ea, eb, es = a.expand(50), b.expand(50), (a * b).expand(50)
        except ValueError:
            return
        conv = [sum(ea[i] * eb[n - i] for i in range(n + 1)) for n in range(51)]
        assert es == conv

    def test_equality_cross_multiplies(self):
        assert RationalSeries((1, 1), (1,)) == RationalSeries((1, 0, -1), (1, -1))
        assert RationalSeries((1,), (1, -1)) != RationalSeries((1,), (1, 1))


class TestE2Assembly:
    def test_trivial_part_row_k(self):
        row = series.e2_rows("trivial")[0]
        assert row.module == "k" and row.degree == 0
        assert row.series() == geometric(8) * RationalSeries((1,), (1, -2, 1))

    def test_m_part_row_f(self):
        row = next(r for r in series.e2_rows("M") if r.module == "F")
        assert row.degree == 9
        want = RationalSeries(monomial(9, 3)) * geometric(8) * geometric(4) * geometric(2)
        assert row.series() == want

    def test_mstar_part_starts_at_two(self):
        assert series.e2_rows("Mstar")[0].degree == 2

    def test_part_count(self):
        assert sum(len(series.e2_rows(p)) for p in ("trivial", "M", "Mstar")) == 18

    def test_total_is_closed_form(self):
        assert series.e2_total() == series.p_series()
        assert series.e2_mismatch_report()["equal"]

    def test_total_order_independent(self):
        fwd = series.e2_total()
        rev = RationalSeries.zero()
        for part in ("Mstar", "M", "trivial"):
            mult = series.part_multiplier(part)
            for row in reversed(series.e2_rows(part)):
                rev = rev + mult * row.series()
        assert fwd == rev

    def test_degree_zero_coefficient(self):
        assert series.e2_total().expand(0) == [1]

    def test_rejected_numerator_variant(self):
        # Swapping the x^2 term of the last numerator factor down to x
        # gives a superficially similar closed form whose expansion is
        # wrong already at degree 1 (5 instead of 3): a transcription
        # guard for the recorded numerator.
        data = series._e2_data()["total_series"]
        variant = RationalSeries(
            poly_from_factors([[1, 2, 1], [1, -1, 1], [1, 2, 0, 0, 0, -1]]),
            poly_from_factors(data["den_factors"]),
        )
        assert variant.expand(1) == [1, 5]
        assert variant != series.p_series()

    def test_generator_bounds(self):
        rep = series.generator_bound_report()
        assert rep["max_cdeg_per_part"]["trivial"] == 8
        assert rep["max_cdeg_per_part"]["M"] == 10
        assert rep["stated_generator_bound"] == 8


class TestModuleSeries:
    def test_w_series(self):
        # 1 + x/(1-x)^2: dims 1,1,2,3,4,...
        assert series.module_series("W").expand(5) == [1, 1, 2, 3, 4, 5]

    def test_n_constant(self):
        assert series.module_series("N").expand(6) == [1] * 7

    def test_free_module(self):
        assert series.module_series("F").expand(4) == [1, 0, 0, 0, 0]

    def test_invariants_series_low_degrees(self):
        assert series.invariants_series().expand(6) == [1, 1, 2, 2, 4, 4, 6]

    def test_tensor_resolution_w_times_m(self):
        # the tensor table turns W (x) M into F + X10, and the row series
        # must agree with the sum of the summand series
        got = series.module_cohomology_series("W", tensor_with="M")
        want = series.module_series("F") + series.module_series("X10")
        assert got == want


class TestDataIntegrity:
    def test_all_pinned_files_verify(self):
        hashes = datafiles.verify_all()
        assert set(hashes) >= {
            "relations.txt",
            "restrictions.json",
            "steenrod_identities.txt",
            "e2_rows.json",
            "module_series.json",
        }

    def test_unknown_name_rejected(self):
        with pytest.raises(datafiles.DataIntegrityError):
            datafiles.verify("no_such_file.json")

    def test_tamper_detected(self, monkeypatch):
        real = datafiles.read_bytes

        def tampered(name):
            blob = real(name)
            return blob + b" " if name == "relations.txt" else blob

        monkeypatch.setattr(datafiles, "read_bytes", tampered)
        with pytest.raises(datafiles.DataIntegrityError):
            datafiles.verify("relations.txt")
