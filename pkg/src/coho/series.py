"""Integer-coefficient rational power series and the E2-term assembly.

The spectral-sequence bookkeeping is pure series arithmetic: each row of
the E2 tables contributes a shifted cohomology series divided by its
propagator factors, and the three parts must sum to the closed form

    p(x) = (1+x)^2 (1-x+x^2) (1+2x^2-x^5) / ((1-x)^2 (1-x^4) (1-x^8)).

Coefficients are dimensions, so everything here is exact integer
arithmetic; equality of series is decided by cross-multiplication.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import datafiles

Poly = tuple[int, ...]


def poly_trim(p: Sequence[int]) -> Poly:
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return tuple(p)


def poly_add(a: Sequence[int], b: Sequence[int]) -> Poly:
    n = max(len(a), len(b))
    return poly_trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def poly_neg(a: Sequence[int]) -> Poly:
    return tuple(-c for c in a)


def poly_mul(a: Sequence[int], b: Sequence[int]) -> Poly:
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
    return poly_trim(out)


def poly_from_factors(factors: Sequence[Sequence[int]]) -> Poly:
    out: Poly = (1,)
    for f in factors:
        out = poly_mul(out, f)
    return out


def monomial(degree: int, coeff: int = 1) -> Poly:
    return poly_trim([0] * degree + [coeff])


class RationalSeries:
    """A power series given as numerator/denominator integer polynomials.

    The denominator must have nonzero constant term.  Instances are
    immutable; arithmetic returns new objects and never reduces the
    fraction (equality cross-multiplies, so normal form is unnecessary).
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Sequence[int], den: Sequence[int] = (1,)):
        self.num = poly_trim(num)
        self.den = poly_trim(den)
        if self.den[0] == 0:
            raise ValueError("denominator must have nonzero constant term")

    @classmethod
    def zero(cls) -> "RationalSeries":
        return cls((0,))

    @classmethod
    def one(cls) -> "RationalSeries":
        return cls((1,))

    @classmethod
    def from_factors(cls, num_factors, den_factors) -> "RationalSeries":
        return cls(poly_from_factors(num_factors), poly_from_factors(den_factors))

    def __add__(self, other: "RationalSeries") -> "RationalSeries":
        return RationalSeries(
            poly_add(poly_mul(self.num, other.den), poly_mul(other.num, self.den)),
            poly_mul(self.den, other.den),
        )

    def __sub__(self, other: "RationalSeries") -> "RationalSeries":
        return RationalSeries(
            poly_add(poly_mul(self.num, other.den), poly_neg(poly_mul(other.num, self.den))),
            poly_mul(self.den, other.den),
        )

    def __mul__(self, other: "RationalSeries") -> "RationalSeries":
        return RationalSeries(poly_mul(self.num, other.num), poly_mul(self.den, other.den))

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalSeries):
            return NotImplemented
        return poly_mul(self.num, other.den) == poly_mul(other.num, self.den)

    def __hash__(self):
        raise TypeError("unhashable: compare with == (cross-multiplication)")

    def __repr__(self) -> str:
        return f"RationalSeries(num={list(self.num)}, den={list(self.den)})"

    def expand(self, D: int) -> list[int]:
        """First D+1 Taylor coefficients, exact.

        Long division with rational partial quotients; every returned
        coefficient is checked to be an integer so a transcription error
        in a denominator cannot round silently.
        """
        num, den = self.num, self.den
        coeffs: list[Fraction] = []
        d0 = Fraction(den[0])
        for n in range(D + 1):
            acc = Fraction(num[n] if n < len(num) else 0)
            for k in range(1, min(n, len(den) - 1) + 1):
                acc -= den[k] * coeffs[n - k]
            coeffs.append(acc / d0)
        out = []
        for n, c in enumerate(coeffs):
            if c.denominator != 1:
                raise ValueError(f"non-integer coefficient {c} at degree {n}")
            out.append(int(c))
        return out


# -- E2 assembly --------------------------------------------------------


@dataclass(frozen=True)
class E2Row:
    """One row of the E2 tables: a coefficient module propagated along
    polynomial generators of the base."""

    part: str
    module: str
    propagators: tuple[str, ...]
    degree: int
    cdeg: int

    def series(self) -> RationalSeries:
        data = _e2_data()
        out = RationalSeries(monomial(self.degree)) * module_cohomology_series(
            self.module, tensor_with=data["tensor_factor"][self.part]
        )
        for p in self.propagators:
            w = data["propagator_degrees"][p]
            out = out * RationalSeries((1,), poly_add((1,), poly_neg(monomial(w))))
        return out


@lru_cache(maxsize=1)
def _e2_data():
    return datafiles.load_json("e2_rows.json")


@lru_cache(maxsize=1)
def _module_series_data():
    return datafiles.load_json("module_series.json")


def module_series(name: str) -> RationalSeries:
    """Poincare series of H*(U3, X) for a named module X."""
    entry = _module_series_data()["series"][name]
    return RationalSeries(entry["num"], entry["den"])


def module_genbound(name: str) -> int:
    return _module_series_data()["series"][name]["genbound"]


def tensor_summands(name: str, factor: str) -> list[str]:
    """Decomposition of name (x) factor per the tensor table."""
    if factor == "k":
        return [name]
    return list(_module_series_data()["tensor_table"][factor][name])


def module_cohomology_series(name: str, tensor_with: str = "k") -> RationalSeries:
    out = RationalSeries.zero()
    for summand in tensor_summands(name, tensor_with):
        out = out + module_series(summand)
    return out


def invariants_series() -> RationalSeries:
    entry = _module_series_data()["invariants_series"]
    return RationalSeries(entry["num"], poly_from_factors(entry["den_factors"]))


def e2_rows(part: str) -> list[E2Row]:
    data = _e2_data()
    return [
        E2Row(part, r["module"], tuple(r["propagators"]), r["degree"], r["cdeg"])
        for r in data["parts"][part]["rows"]
    ]


def part_multiplier(part: str) -> RationalSeries:
    return RationalSeries(_e2_data()["parts"][part]["multiplier_num"])


def assemble_e2_part(part: str) -> RationalSeries:
    """Sum of one part's row series, times its exterior-factor multiplier."""
    total = RationalSeries.zero()
    for row in e2_rows(part):
        total = total + row.series()
    return part_multiplier(part) * total


def e2_total() -> RationalSeries:
    total = RationalSeries.zero()
    for part in ("trivial", "M", "Mstar"):
        total = total + assemble_e2_part(part)
    return total


def p_series() -> RationalSeries:
    """The closed-form total: numerator over the three cyclotomic-style
    denominator factors."""
    data = _e2_data()["total_series"]
    return RationalSeries(data["num"], poly_from_factors(data["den_factors"]))


def expected_expansion() -> list[int]:
    return list(_e2_data()["total_series"]["expansion_to_18"])


def e2_mismatch_report(D: int = 20) -> dict:
    """Difference between the assembled total and the closed form.

    Empty difference means the assembly identity holds; otherwise the
    expanded difference pinpoints the first bad degree.
    """
    diff = (e2_total() - p_series()).expand(D)
    return {
        "equal": not any(diff),
        "difference_to_degree": D,
        "difference": diff,
    }


def generator_bound_report() -> dict:
    data = _e2_data()
    per_part = {
        part: max(r["cdeg"] for r in data["parts"][part]["rows"])
        for part in data["parts"]
    }
    return {
        "max_cdeg_per_part": per_part,
        "max_cdeg_overall": max(per_part.values()),
        "stated_generator_bound": data["stated_generator_bound"],
    }
