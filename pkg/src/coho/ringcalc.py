"""Weighted-graded polynomial algebra over F2 and per-degree ideal sizes.

The cohomology ring of the order-512 group lives in seventeen generators
named z, y, x, w, v, u, t, s, r, q, p, n, m, k, j, i, h with weights
1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 4, 4, 5, 6, 7, 8.  This module handles
the free algebra R on those generators: parsing and printing homogeneous
polynomials, enumerating the monomial basis of each weighted degree, and
measuring a homogeneous ideal degree by degree with exact linear algebra.

Everything is computed over F2 with no tolerance anywhere.  The span of
an ideal in degree d is assembled from the rows m*r, with r a relator
and m a monomial of complementary degree, and its rank is found by
elimination on a packed bit matrix.  The graded Nakayama count in degree
d, the number of relators a minimal generating set needs there, is the
rank gap between that span and the span that omits degree-0 multipliers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Sequence

import numpy as np

from . import datafiles
from .f2linalg import BitMatrix, EchelonAccumulator, pack_rows, words_for
from .series import RationalSeries, p_series, poly_from_factors

VARIABLES = ("z", "y", "x", "w", "v", "u", "t", "s", "r",
             "q", "p", "n", "m", "k", "j", "i", "h")
WEIGHTS = (1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 4, 4, 5, 6, 7, 8)
NVARS = len(VARIABLES)
RELATIONS_FILE = "relations.txt"

# Exponent tuples are encoded as single int64 keys for vectorized column
# lookup.  The radix per variable bounds its exponent at MAX_DEGREE, and
# the radix product stays below 2**63, so the encoding is injective for
# every monomial of weighted degree at most MAX_DEGREE.
MAX_DEGREE = 24

_VAR_INDEX = {v: i for i, v in enumerate(VARIABLES)}
_WEIGHTS_ARR = np.array(WEIGHTS, dtype=np.int64)
_RADIX = np.array([MAX_DEGREE // w + 1 for w in WEIGHTS], dtype=np.int64)
_PLACE = np.ones(NVARS, dtype=np.int64)
for _i in range(NVARS - 2, -1, -1):
    _PLACE[_i] = _PLACE[_i + 1] * _RADIX[_i + 1]
assert float(_PLACE[0]) * _RADIX[0] < 2.0 ** 63


class RingSyntaxError(ValueError):
    """Raised when a polynomial string does not parse."""


def monomial_degree(exponents: Sequence[int]) -> int:
    """Weighted degree of an exponent tuple."""
    return int(sum(e * w for e, w in zip(exponents, WEIGHTS)))


def parse_monomial(text: str) -> tuple:
    """Exponent tuple for a product like ``z^2*w*u`` (or ``1``)."""
    text = text.strip()
    exps = [0] * NVARS
    if text == "1":
        return tuple(exps)
    for factor in text.split("*"):
        factor = factor.strip()
        name, _, power = factor.partition("^")
        if name not in _VAR_INDEX:
            raise RingSyntaxError(f"unknown variable {name!r} in {text!r}")
        if power:
            try:
                e = int(power)
            except ValueError:
                raise RingSyntaxError(f"bad exponent in {factor!r}") from None
            if e <= 0:
                raise RingSyntaxError(f"nonpositive exponent in {factor!r}")
        else:
            e = 1
        exps[_VAR_INDEX[name]] += e
    return tuple(exps)


def format_monomial(exponents: Sequence[int]) -> str:
    """Canonical text for an exponent tuple, variables in ring order."""
    parts = []
    for name, e in zip(VARIABLES, exponents):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts) if parts else "1"


@dataclass(frozen=True)
class GradedPolynomial:
    """Homogeneous F2 polynomial, stored as its sorted term tuple.

    Terms are exponent tuples over the seventeen ring variables, kept in
    descending lexicographic order so equal polynomials compare equal
    and printing is canonical.  A term is present exactly when its
    coefficient is 1; the empty tuple of terms is the zero polynomial.
    """

    terms: tuple

    def __post_init__(self):
        terms = tuple(sorted(set(map(tuple, self.terms)), reverse=True))
        object.__setattr__(self, "terms", terms)
        degrees = {monomial_degree(t) for t in terms}
        if len(degrees) > 1:
            raise RingSyntaxError(
                f"inhomogeneous terms with degrees {sorted(degrees)}")

    @classmethod
    def parse(cls, text: str) -> "GradedPolynomial":
        text = text.strip()
        if not text or text == "0":
            return cls(())
        return cls(tuple(parse_monomial(t) for t in text.split("+")))

    @property
    def degree(self) -> Optional[int]:
        """Weighted degree, or None for the zero polynomial."""
        if not self.terms:
            return None
        return monomial_degree(self.terms[0])

    def is_zero(self) -> bool:
        return not self.terms

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(format_monomial(t) for t in self.terms)

    def __add__(self, other: "GradedPolynomial") -> "GradedPolynomial":
        if self.terms and other.terms and self.degree != other.degree:
            raise RingSyntaxError("cannot add terms of different degrees")
        mine, theirs = set(self.terms), set(other.terms)
        return GradedPolynomial(tuple(mine.symmetric_difference(theirs)))

    def multiply_monomial(self, exponents: Sequence[int]) -> "GradedPolynomial":
        shift = tuple(exponents)
        return GradedPolynomial(
            tuple(tuple(a + b for a, b in zip(t, shift)) for t in self.terms))


@dataclass(frozen=True)
class RelationSet:
    """An ordered tuple of homogeneous relators."""

    relations: tuple

    def __len__(self) -> int:
        return len(self.relations)

    def __iter__(self) -> Iterator[GradedPolynomial]:
        return iter(self.relations)

    @classmethod
    def from_lines(cls, lines: Sequence[str]) -> "RelationSet":
        rels = []
        for line in lines:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            poly = GradedPolynomial.parse(line)
            if poly.is_zero():
                raise RingSyntaxError("zero polynomial in relation list")
            rels.append(poly)
        return cls(tuple(rels))

    @classmethod
    def load(cls) -> "RelationSet":
        return _load_relations()

    def max_degree(self) -> int:
        return max(r.degree for r in self.relations)

    def by_degree(self, degree: int) -> tuple:
        return tuple(r for r in self.relations if r.degree == degree)

    def degree_histogram(self) -> dict:
        hist: dict = {}
        for r in self.relations:
            hist[r.degree] = hist.get(r.degree, 0) + 1
        return dict(sorted(hist.items()))


@lru_cache(maxsize=1)
def _load_relations() -> RelationSet:
    text = datafiles.load_text(RELATIONS_FILE)
    return RelationSet.from_lines(text.splitlines())


@lru_cache(maxsize=None)
def monomial_basis(degree: int) -> tuple:
    """All weighted-degree-d exponent tuples, descending lexicographic."""
    if degree < 0:
        return ()
    if degree > MAX_DEGREE:
        raise ValueError(f"degree {degree} exceeds supported {MAX_DEGREE}")
    out = []

    def rec(i: int, rem: int, prefix: list) -> None:
        if rem == 0:
            out.append(tuple(prefix) + (0,) * (NVARS - len(prefix)))
            return
        if i == NVARS:
            return
        for e in range(rem // WEIGHTS[i], -1, -1):
            prefix.append(e)
            rec(i + 1, rem - WEIGHTS[i] * e, prefix)
            prefix.pop()

    rec(0, degree, [])
    out.sort(reverse=True)
    return tuple(out)


def monomial_count(degree: int) -> int:
    return len(monomial_basis(degree))


def free_hilbert_series() -> RationalSeries:
    """Hilbert series of the free weighted algebra on the 17 generators."""
    factors = []
    for w in WEIGHTS:
        factors.append((1,) + (0,) * (w - 1) + (-1,))
    return RationalSeries((1,), poly_from_factors(factors))


@lru_cache(maxsize=None)
def _basis_lookup(degree: int):
    """Sorted int64 codes of the degree-d basis plus the matching columns."""
    arr = np.array(monomial_basis(degree), dtype=np.int64).reshape(-1, NVARS)
    codes = arr @ _PLACE
    order = np.argsort(codes)
    return codes[order], order.astype(np.int64)


def _monomials_to_columns(exponents: np.ndarray, degree: int) -> np.ndarray:
    """Column indices in the degree-d basis for rows of an exponent array."""
    sorted_codes, order = _basis_lookup(degree)
    codes = exponents.reshape(-1, NVARS) @ _PLACE
    pos = np.searchsorted(sorted_codes, codes)
    if np.any(pos >= len(sorted_codes)) or np.any(sorted_codes[pos] != codes):
        raise ValueError("exponent outside the degree basis")
    return order[pos]


_DENSE_CHUNK = 2048


def _product_rows(terms: np.ndarray, multipliers: np.ndarray,
                  degree: int) -> np.ndarray:
    """Packed rows for m*r over all multiplier monomials m, one r."""
    ncols = monomial_count(degree)
    nt = terms.shape[0]
    blocks = []
    for lo in range(0, multipliers.shape[0], _DENSE_CHUNK):
        chunk = multipliers[lo:lo + _DENSE_CHUNK]
        prod = terms[None, :, :] + chunk[:, None, :]
        cols = _monomials_to_columns(prod.reshape(-1, NVARS), degree)
        nm = chunk.shape[0]
        dense = np.zeros((nm, ncols), dtype=bool)
        # distinct terms stay distinct after a fixed shift, so plain
        # assignment is an exact F2 write with no parity to track
        dense[np.repeat(np.arange(nm), nt), cols] = True
        blocks.append(pack_rows(dense))
    return np.vstack(blocks)


def _terms_array(poly: GradedPolynomial) -> np.ndarray:
    return np.array(poly.terms, dtype=np.int64).reshape(-1, NVARS)


def _span_blocks(rels: RelationSet, degree: int):
    """Packed spans of (R+ . I)_d and of the degree-d relators.

    Returns (low, exact) where low holds the deduplicated rows m*r with
    deg m >= 1 and exact holds one row per relator of degree exactly d.
    Either may be empty with shape (0, words).
    """
    words = words_for(monomial_count(degree))
    low_blocks, exact_rows = [], []
    for rel in rels:
        if rel.degree > degree:
            continue
        terms = _terms_array(rel)
        mults = np.array(monomial_basis(degree - rel.degree),
                         dtype=np.int64).reshape(-1, NVARS)
        packed = _product_rows(terms, mults, degree)
        if rel.degree == degree:
            exact_rows.append(packed)
        else:
            low_blocks.append(packed)
    low = (np.unique(np.vstack(low_blocks), axis=0) if low_blocks
           else np.zeros((0, words), dtype=np.uint64))
    exact = (np.vstack(exact_rows) if exact_rows
             else np.zeros((0, words), dtype=np.uint64))
    return low, exact


def _echelon(data: np.ndarray, ncols: int,
             budget_mb: Optional[float] = None):
    """Staircase form of the packed rows: (pivot columns, echelon rows).

    Row i of the result leads at pivot column i.  Under a memory budget
    the rows are eliminated in streamed chunks, carrying at most the
    running echelon plus one chunk at a time.
    """
    words = words_for(ncols)
    if data.shape[0] == 0:
        return [], data
    bytes_needed = 2 * data.shape[0] * words * 8
    if budget_mb is None or bytes_needed <= budget_mb * 1e6:
        m = BitMatrix(data.shape[0], ncols, data=data.copy())
        pivots = m.pivot_columns()
        return pivots, m.data[:len(pivots)]
    chunk = max(256, int(budget_mb * 1e6 / (4 * words * 8)))
    kept = np.zeros((0, words), dtype=np.uint64)
    pivots: list = []
    for lo in range(0, data.shape[0], chunk):
        stacked = np.vstack([kept, data[lo:lo + chunk]])
        m = BitMatrix(stacked.shape[0], ncols, data=stacked)
        pivots = m.pivot_columns()
        kept = m.data[:len(pivots)].copy()
    return pivots, kept


def _reduce_row(row: np.ndarray, pivots: Sequence[int],
                echelon: np.ndarray) -> np.ndarray:
    """Forward reduction of one packed row against a staircase basis."""
    out = row.copy()
    for i, c in enumerate(pivots):
        w, sh = divmod(c, 64)
        if (int(out[w]) >> sh) & 1:
            out ^= echelon[i]
    return out


@lru_cache(maxsize=None)
def _degree_scan(rels: RelationSet, degree: int,
                 budget_mb: Optional[float] = None):
    """(dim (R+ . I)_d, dim I_d) by one elimination plus relator sweeps.

    Degree-d relators are forward-reduced against the staircase of the
    multiplied span; the survivors land in a small accumulator, so the
    ideal rank costs a single large elimination per degree.
    """
    low, exact = _span_blocks(rels, degree)
    ncols = monomial_count(degree)
    pivots, echelon = _echelon(low, ncols, budget_mb)
    low_rank = len(pivots)
    acc = EchelonAccumulator(ncols)
    extra = 0
    for row in exact:
        reduced = _reduce_row(row, pivots, echelon)
        if acc.insert(reduced):
            extra += 1
    return low_rank, low_rank + extra


def ideal_dims_by_degree(rels: RelationSet, max_degree: int,
                         budget_mb: Optional[float] = None) -> list:
    """dim I_d for d = 0..max_degree."""
    return [_degree_scan(rels, d, budget_mb)[1]
            for d in range(max_degree + 1)]


def quotient_dims_by_degree(rels: RelationSet, max_degree: int,
                            budget_mb: Optional[float] = None) -> list:
    """dim (R/I)_d for d = 0..max_degree."""
    return [monomial_count(d) - _degree_scan(rels, d, budget_mb)[1]
            for d in range(max_degree + 1)]


def minimal_generator_count(rels: RelationSet, max_degree: int,
                            budget_mb: Optional[float] = None) -> list:
    """Graded Nakayama counts dim I_d - dim (R+ . I)_d for d = 0..max.

    A degree with no relator of that exact degree contributes 0 with no
    elimination: the two spans are then assembled from identical rows.
    """
    out = []
    for d in range(max_degree + 1):
        if not rels.by_degree(d):
            out.append(0)
            continue
        low_rank, ideal_rank = _degree_scan(rels, d, budget_mb)
        out.append(ideal_rank - low_rank)
    return out


def ring_report(max_degree: int = 14,
                budget_mb: Optional[float] = None,
                rels: Optional[RelationSet] = None) -> dict:
    """Full presentation audit through the requested degree.

    Compares the quotient Hilbert function against the closed-form
    series expansion and totals the per-degree minimal relator counts.
    """
    if rels is None:
        rels = RelationSet.load()
    quotient = quotient_dims_by_degree(rels, max_degree, budget_mb)
    ideal = ideal_dims_by_degree(rels, max_degree, budget_mb)
    nakayama = minimal_generator_count(rels, max_degree, budget_mb)
    expected = p_series().expand(max_degree)
    return {
        "max_degree": max_degree,
        "relation_count": len(rels),
        "relation_max_degree": rels.max_degree(),
        "relation_degrees": rels.degree_histogram(),
        "monomial_counts": [monomial_count(d) for d in range(max_degree + 1)],
        "ideal_dims": ideal,
        "quotient_dims": quotient,
        "expected_quotient_dims": expected,
        "hilbert_match": quotient == expected,
        "minimal_generators_by_degree": nakayama,
        "minimal_generator_total": sum(nakayama),
        "nakayama_matches_file": nakayama
        == [rels.degree_histogram().get(d, 0) for d in range(max_degree + 1)],
    }
