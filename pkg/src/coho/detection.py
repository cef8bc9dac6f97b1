"""Cohomology of the nine detecting subgroups and the generator dictionary.

Restriction to nine centralizer subgroups detects the cohomology of the
order-512 group: one subgroup of shape 4^3 whose cohomology is
Lambda(e1,e2,e3) tensor F2[b1,b2,b3], five of shape 4x2x2 with cohomology
Lambda(e1) tensor F2[l2,l3,b], and three elementary abelian of rank four
with cohomology F2[l1,l2,l3,l4].  This module implements those rings
exactly (exterior squares vanish, everything else is polynomial over F2),
loads the published restriction images, and evaluates restrictions of
polynomials in the seventeen ring generators.

The published tables fix the images of s, r, q, p, n and i outright and
give Stiefel-Whitney classes spanning the candidate images of the
degree-1 and degree-2 generators, but never say which combination each
of z, y, x, w, v, u, t actually is.  solve_generator_dictionary searches
for that assignment exhaustively, propagating the relation ideal as
constraints level by level.  When no assignment exists the failure is
reported with explicit per-branch obstructions and factorization
certificates rather than papered over; every consumer that needs a
resolved dictionary raises DictionaryUnsolvedError in that case.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from . import datafiles
from .f2linalg import (BitMatrix, EchelonAccumulator, pack_rows, pack_vector,
                       unpack_vector, words_for)
from .ringcalc import (VARIABLES, WEIGHTS, GradedPolynomial, RelationSet,
                       monomial_basis)
from .series import p_series

RESTRICTIONS_FILE = "restrictions.json"
GENERATOR_DEGREE = dict(zip(VARIABLES, WEIGHTS))


class DetectionError(Exception):
    """Raised for malformed table data or unusable ring input."""


class DictionaryUnsolvedError(DetectionError):
    """No assignment of z..t to the published classes satisfies the ideal.

    Carries the full solver report so callers can surface the blocking
    certificates instead of a bare failure.
    """

    def __init__(self, report):
        self.report = report
        blocked = report.get("obstructions", [])
        detail = f" ({len(blocked)} branch obstructions)" if blocked else ""
        super().__init__(
            "generator dictionary unsolved: no assignment of the degree-1 "
            "and degree-2 generators to the published classes satisfies "
            f"the relation ideal{detail}")


@dataclass(frozen=True)
class DetectingRing:
    """One detecting-subgroup cohomology ring.

    variables lists the generators, degrees their weights, and exterior
    flags the generators whose square is zero.  Monomials are exponent
    tuples; exterior exponents never exceed 1.
    """

    name: str
    variables: tuple
    degrees: tuple
    exterior: tuple

    def monomials(self, degree: int) -> tuple:
        return _ring_monomials(self, degree)

    def dim(self, degree: int) -> int:
        return len(_ring_monomials(self, degree))

    def zero(self) -> "RingElement":
        return RingElement(self, ())

    def one(self) -> "RingElement":
        return RingElement(self, ((0,) * len(self.variables),))

    def variable(self, name: str) -> "RingElement":
        i = self.variables.index(name)
        exps = [0] * len(self.variables)
        exps[i] = 1
        return RingElement(self, (tuple(exps),))

    def parse(self, text: str) -> "RingElement":
        return parse_element(self, text)


_RING_CI = DetectingRing(
    "CI",
    ("e1", "e2", "e3", "b1", "b2", "b3"),
    (1, 1, 1, 2, 2, 2),
    (True, True, True, False, False, False),
)
_SHAPE_422 = dict(
    variables=("e1", "l2", "l3", "b"),
    degrees=(1, 1, 1, 2),
    exterior=(True, False, False, False),
)
_SHAPE_2E4 = dict(
    variables=("l1", "l2", "l3", "l4"),
    degrees=(1, 1, 1, 1),
    exterior=(False, False, False, False),
)

DETECTING_RINGS = (
    _RING_CI,
    DetectingRing("CII", **_SHAPE_422),
    DetectingRing("CIII", **_SHAPE_422),
    DetectingRing("CIV", **_SHAPE_422),
    DetectingRing("CV", **_SHAPE_422),
    DetectingRing("CVI", **_SHAPE_422),
    DetectingRing("2A", **_SHAPE_2E4),
    DetectingRing("2B", **_SHAPE_2E4),
    DetectingRing("2C", **_SHAPE_2E4),
)
RING_NAMES = tuple(r.name for r in DETECTING_RINGS)


def ring_by_name(name: str) -> DetectingRing:
    for ring in DETECTING_RINGS:
        if ring.name == name:
            return ring
    raise DetectionError(f"unknown detecting ring {name!r}")


@lru_cache(maxsize=None)
def _ring_monomials(ring: DetectingRing, degree: int) -> tuple:
    if degree < 0:
        return ()
    nv = len(ring.variables)
    out: list = []

    def rec(i: int, rem: int, prefix: list) -> None:
        if rem == 0:
            out.append(tuple(prefix) + (0,) * (nv - len(prefix)))
            return
        if i == nv:
            return
        top = rem // ring.degrees[i]
        if ring.exterior[i]:
            top = min(top, 1)
        for e in range(top, -1, -1):
            prefix.append(e)
            rec(i + 1, rem - ring.degrees[i] * e, prefix)
            prefix.pop()

    rec(0, degree, [])
    out.sort(reverse=True)
    return tuple(out)


@lru_cache(maxsize=None)
def _ring_index(ring: DetectingRing, degree: int) -> dict:
    return {m: i for i, m in enumerate(_ring_monomials(ring, degree))}


@dataclass(frozen=True)
class RingElement:
    """Homogeneous element of a detecting ring, as a sorted term tuple."""

    ring: DetectingRing
    terms: tuple

    def __post_init__(self):
        terms = tuple(sorted(set(map(tuple, self.terms)), reverse=True))
        object.__setattr__(self, "terms", terms)
        degrees = set()
        for t in terms:
            for e, ext in zip(t, self.ring.exterior):
                if ext and e > 1:
                    raise DetectionError(
                        f"exterior generator power {e} in ring {self.ring.name}")
            degrees.add(sum(e * d for e, d in zip(t, self.ring.degrees)))
        if len(degrees) > 1:
            raise DetectionError(
                f"inhomogeneous element in ring {self.ring.name}")

    @property
    def degree(self) -> Optional[int]:
        if not self.terms:
            return None
        return sum(e * d for e, d in zip(self.terms[0], self.ring.degrees))

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "RingElement") -> "RingElement":
        if other.ring is not self.ring:
            raise DetectionError("cannot add across rings")
        if self.terms and other.terms and self.degree != other.degree:
            raise DetectionError("cannot add different degrees")
        sym = set(self.terms).symmetric_difference(other.terms)
        return RingElement(self.ring, tuple(sym))

    def __mul__(self, other: "RingElement") -> "RingElement":
        if other.ring is not self.ring:
            raise DetectionError("cannot multiply across rings")
        exterior = self.ring.exterior
        acc: set = set()
        for a in self.terms:
            for b in other.terms:
                prod = tuple(x + y for x, y in zip(a, b))
                if any(e > 1 for e, ext in zip(prod, exterior) if ext):
                    continue
                if prod in acc:
                    acc.discard(prod)
                else:
                    acc.add(prod)
        return RingElement(self.ring, tuple(acc))

    def power(self, k: int) -> "RingElement":
        out = self.ring.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for t in self.terms:
            factors = []
            for name, e in zip(self.ring.variables, t):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            parts.append("*".join(factors) if factors else "1")
        return " + ".join(parts)


def parse_element(ring: DetectingRing, text: str) -> RingElement:
    text = text.strip()
    if not text or text == "0":
        return ring.zero()
    nv = len(ring.variables)
    index = {v: i for i, v in enumerate(ring.variables)}
    terms = []
    for chunk in text.split("+"):
        exps = [0] * nv
        chunk = chunk.strip()
        if chunk == "1":
            terms.append(tuple(exps))
            continue
        for factor in chunk.split("*"):
            name, _, power = factor.strip().partition("^")
            if name not in index:
                raise DetectionError(
                    f"unknown variable {name!r} for ring {ring.name}")
            exps[index[name]] += int(power) if power else 1
        terms.append(tuple(exps))
    return RingElement(ring, tuple(terms))


def element_vector(elem: RingElement, degree: int) -> np.ndarray:
    """Packed coefficient vector over the ring's degree-d monomials."""
    index = _ring_index(elem.ring, degree)
    dense = np.zeros(max(len(index), 1), dtype=bool)
    for t in elem.terms:
        dense[index[t]] = True
    return pack_vector(dense)


def vector_element(ring: DetectingRing, degree: int,
                   packed: np.ndarray) -> RingElement:
    monos = _ring_monomials(ring, degree)
    dense = unpack_vector(packed, max(len(monos), 1))
    terms = tuple(m for m, bit in zip(monos, dense) if bit)
    return RingElement(ring, terms)


# A restriction row assigns one ring element per detecting ring, in the
# fixed RING_NAMES order.
Row = Tuple[RingElement, ...]


def row_add(a: Row, b: Row) -> Row:
    return tuple(x + y for x, y in zip(a, b))


def row_mul(a: Row, b: Row) -> Row:
    return tuple(x * y for x, y in zip(a, b))


def row_power(a: Row, k: int) -> Row:
    return tuple(x.power(k) for x in a)


def zero_row() -> Row:
    return tuple(r.zero() for r in DETECTING_RINGS)


def one_row() -> Row:
    return tuple(r.one() for r in DETECTING_RINGS)


def row_is_zero(row: Row) -> bool:
    return all(x.is_zero() for x in row)


def row_degree(row: Row) -> Optional[int]:
    degs = {x.degree for x in row if not x.is_zero()}
    if len(degs) > 1:
        raise DetectionError(f"row mixes degrees {sorted(degs)}")
    return degs.pop() if degs else None


def codomain_dim(degree: int) -> int:
    return sum(max(r.dim(degree), 1) for r in DETECTING_RINGS)


def row_vector(row: Row, degree: int) -> np.ndarray:
    """One packed vector over the concatenated degree-d ring bases."""
    return np.concatenate([element_vector(x, degree) for x in row])


def row_text(row: Row) -> dict:
    return {name: str(x) for name, x in zip(RING_NAMES, row)}


def _parse_row(cells: dict, degree: int, label: str) -> Row:
    row = []
    for ring in DETECTING_RINGS:
        if ring.name not in cells:
            raise DetectionError(f"row {label!r} missing ring {ring.name}")
        elem = parse_element(ring, cells[ring.name])
        if not elem.is_zero() and elem.degree != degree:
            raise DetectionError(
                f"row {label!r} cell {ring.name} has degree {elem.degree}, "
                f"expected {degree}")
        row.append(elem)
    return tuple(row)


@lru_cache(maxsize=1)
def published_rows() -> dict:
    """The shipped restriction rows, parsed and degree-checked.

    Keys: lin_v, lin_s, lin_t (degree 1); r21, r22, r23, r4 (degree 2);
    w4_r8 (degree 4); w8_r8 (degree 8); s, r, q, p (3), n (4), i (7).
    """
    data = datafiles.load_json(RESTRICTIONS_FILE)
    if tuple(data["ring_order"]) != RING_NAMES:
        raise DetectionError("ring order in data file does not match")
    rows: dict = {}
    for label, cells in data["w1"].items():
        rows[label] = _parse_row(cells, 1, label)
    for label, cells in data["w2"].items():
        rows[label] = _parse_row(cells, 2, label)
    rows["w4_r8"] = _parse_row(data["w48"]["w4_r8"], 4, "w4_r8")
    rows["w8_r8"] = _parse_row(data["w48"]["w8_r8"], 8, "w8_r8")
    fixed_degrees = {"s": 3, "r": 3, "q": 3, "p": 3, "n": 4, "i": 7}
    for label, cells in data["generator_rows"].items():
        rows[label] = _parse_row(cells, fixed_degrees[label], label)
    return rows


def restrict_with(rows: Dict[str, Row], poly: GradedPolynomial) -> Row:
    """Evaluate a polynomial in the 17 generators through partial rows.

    rows maps generator names to their images; a generator appearing in
    the polynomial with no row raises DictionaryUnsolvedError.
    """
    if poly.is_zero():
        return zero_row()
    total = zero_row()
    for term in poly.terms:
        value = one_row()
        for var, exp in zip(VARIABLES, term):
            if exp == 0:
                continue
            if var not in rows:
                raise DictionaryUnsolvedError(
                    {"missing": var, "obstructions": []})
            value = row_mul(value, row_power(rows[var], exp))
        total = row_add(total, value)
    return total


class RestrictionTable:
    """Resolved generator-to-image table over the nine detecting rings."""

    def __init__(self, rows: Dict[str, Row]):
        for var in VARIABLES:
            if var not in rows:
                raise DetectionError(f"table missing generator {var!r}")
            deg = row_degree(rows[var])
            if deg is not None and deg != GENERATOR_DEGREE[var]:
                raise DetectionError(
                    f"generator {var!r} image has degree {deg}, "
                    f"expected {GENERATOR_DEGREE[var]}")
        self.rows = dict(rows)
        self._power_cache: dict = {}
        self._image_cache: dict = {}

    def row(self, var: str) -> Row:
        return self.rows[var]

    def _power(self, var: str, exp: int) -> Row:
        key = (var, exp)
        if key not in self._power_cache:
            self._power_cache[key] = row_power(self.rows[var], exp)
        return self._power_cache[key]

    def restrict(self, poly: GradedPolynomial) -> Row:
        if poly.is_zero():
            return zero_row()
        total = zero_row()
        for term in poly.terms:
            value = one_row()
            for var, exp in zip(VARIABLES, term):
                if exp:
                    value = row_mul(value, self._power(var, exp))
            total = row_add(total, value)
        return total

    def verify_relations(self, rels: Optional[RelationSet] = None,
                         max_degree: Optional[int] = None) -> dict:
        """Restrict every relation everywhere; collect nonzero residues."""
        if rels is None:
            rels = RelationSet.load()
        failures = []
        checked = 0
        for index, rel in enumerate(rels):
            if max_degree is not None and rel.degree > max_degree:
                continue
            checked += 1
            image = self.restrict(rel)
            for name, elem in zip(RING_NAMES, image):
                if not elem.is_zero():
                    failures.append({
                        "relation_index": index,
                        "relation": str(rel),
                        "ring": name,
                        "residue": str(elem),
                    })
        return {"checked": checked, "failures": failures,
                "all_vanish": not failures}

    def _images(self, ring_pos: int, degree: int) -> np.ndarray:
        """Packed image vectors of every degree-d domain monomial.

        Row order matches monomial_basis(degree).  Built degree by
        degree: the image of a monomial is the image of its parent (the
        monomial with its first variable stripped) pushed through
        multiplication by that variable's image, carried out as an exact
        mod-2 matrix product per variable group.
        """
        key = (ring_pos, degree)
        if key in self._image_cache:
            return self._image_cache[key]
        ring = DETECTING_RINGS[ring_pos]
        rdim = max(ring.dim(degree), 1)
        words = words_for(rdim)
        domain = monomial_basis(degree)
        if degree == 0:
            out = np.zeros((1, words), dtype=np.uint64)
            out[0] = element_vector(ring.one(), 0)
            self._image_cache[key] = out
            return out
        out = np.zeros((len(domain), words), dtype=np.uint64)
        by_var: dict = {}
        for pos, mono in enumerate(domain):
            j = next(i for i, e in enumerate(mono) if e)
            parent = list(mono)
            parent[j] -= 1
            by_var.setdefault(j, []).append((pos, tuple(parent)))
        for j, entries in by_var.items():
            pdeg = degree - WEIGHTS[j]
            parents = self._images(ring_pos, pdeg)
            pdim = max(ring.dim(pdeg), 1)
            mult = self._mult_matrix(ring_pos, j, pdeg)
            pindex = {m: i for i, m in enumerate(monomial_basis(pdeg))}
            rows = np.array([pindex[parent] for _, parent in entries])
            dense = np.unpackbits(
                parents[rows].view(np.uint8), axis=1,
                bitorder="little")[:, :pdim]
            # float32 accumulators stay exact: column sums are bounded
            # by the source dimension, far below 2**24.
            prod = (dense.astype(np.float32) @ mult) % 2
            packed = pack_rows(prod.astype(bool))
            positions = np.array([pos for pos, _ in entries])
            out[positions, :packed.shape[1]] = packed
        self._image_cache[key] = out
        return out

    def _mult_matrix(self, ring_pos: int, var_index: int,
                     source_degree: int) -> np.ndarray:
        """Dense 0/1 matrix of multiplication by one generator image."""
        key = ("mult", ring_pos, var_index, source_degree)
        if key in self._image_cache:
            return self._image_cache[key]
        ring = DETECTING_RINGS[ring_pos]
        target_degree = source_degree + WEIGHTS[var_index]
        image = self.rows[VARIABLES[var_index]][ring_pos]
        tdim = max(ring.dim(target_degree), 1)
        tindex = _ring_index(ring, target_degree)
        monos = _ring_monomials(ring, source_degree)
        mat = np.zeros((max(len(monos), 1), tdim), dtype=np.float32)
        for i, mono in enumerate(monos):
            prod = RingElement(ring, (mono,)) * image
            for t in prod.terms:
                mat[i, tindex[t]] = 1.0
        self._image_cache[key] = mat
        return mat

    def image_matrix(self, degree: int) -> BitMatrix:
        """Domain monomials by concatenated ring bases, as a bit matrix."""
        domain = monomial_basis(degree)
        widths = [max(r.dim(degree), 1) for r in DETECTING_RINGS]
        dense = np.zeros((len(domain), sum(widths)), dtype=bool)
        offset = 0
        for pos, width in enumerate(widths):
            packed = self._images(pos, degree)
            dense[:, offset:offset + width] = np.unpackbits(
                packed.view(np.uint8), axis=1, bitorder="little")[:, :width]
            offset += width
        return BitMatrix.from_dense(dense)

    def image_hilbert(self, max_degree: int) -> list:
        """Rank of restriction on each degree's span of monomials."""
        return [self.image_matrix(d).rank()
                for d in range(max_degree + 1)]


def _span_elements(named_rows: Sequence[tuple], degree: int):
    """Independent subfamily and its labeled F2 span.

    named_rows is a sequence of (label, row); returns (basis, combos)
    where basis keeps the labels of an independent subfamily and combos
    lists every element of the span as (label, row), labels joined with
    " + " ("0" for the zero combination).
    """
    acc = EchelonAccumulator(codomain_dim(degree))
    basis = []
    for label, row in named_rows:
        if row_is_zero(row):
            continue
        if acc.insert(row_vector(row, degree)):
            basis.append((label, row))
    combos = [("0", zero_row())]
    for label, row in basis:
        combos += [(f"{c_label} + {label}" if c_label != "0" else label,
                    row_add(c_row, row)) for c_label, c_row in combos]
    return basis, combos


def _relation_support(rel: GradedPolynomial) -> frozenset:
    used = set()
    for term in rel.terms:
        for var, exp in zip(VARIABLES, term):
            if exp:
                used.add(var)
    return frozenset(used)


def _first_failure(rows: Dict[str, Row], entries) -> Optional[dict]:
    """First relation in entries that does not restrict to zero."""
    for index, rel in entries:
        image = restrict_with(rows, rel)
        if not row_is_zero(image):
            pos = next(i for i, elem in enumerate(image)
                       if not elem.is_zero())
            return {
                "relation_index": index,
                "relation": str(rel),
                "ring": RING_NAMES[pos],
                "residue": str(image[pos]),
            }
    return None


def degree_one_candidates() -> list:
    """All 7 nonzero combinations of the three published w1 rows."""
    rows = published_rows()
    named = [(n, rows[n]) for n in ("lin_v", "lin_s", "lin_t")]
    _, combos = _span_elements(named, 1)
    return [c for c in combos if c[0] != "0"]


@lru_cache(maxsize=1)
def _fixed_rows_cached() -> tuple:
    published = published_rows()
    rows = {g: published[g] for g in ("s", "r", "q", "p", "n", "i")}
    rows["m"] = published["w4_r8"]
    rows["h"] = published["w8_r8"]
    # Local import: the Steenrod module builds on these rings.
    from .steenrod import sq_row
    rows["j"] = sq_row(2, published["n"])
    return tuple(rows.items())


def fixed_generator_rows() -> Dict[str, Row]:
    """Dictionary-independent images: published rows plus m, h, j.

    m and h are the restrictions of the degree-4 and degree-8
    Stiefel-Whitney classes of the 8-dimensional representation; j is
    Sq2 of the n row.
    """
    return dict(_fixed_rows_cached())


def degree_two_space(stage_one_rows: Dict[str, Row]):
    """Span of the published w2 rows and the degree-2 decomposables."""
    published = published_rows()
    named = [(n, published[n]) for n in ("r21", "r22", "r23", "r4")]
    for a, b in itertools.combinations_with_replacement("zyx", 2):
        label = f"{a}^2" if a == b else f"{a}*{b}"
        named.append((label, row_mul(stage_one_rows[a],
                                     stage_one_rows[b])))
    return _span_elements(named, 2)


def _relation_entries(check_degree: int) -> list:
    rels = RelationSet.load()
    return [(i, r, _relation_support(r)) for i, r in enumerate(rels)
            if r.degree <= check_degree]


def _stage_one(entries: list) -> list:
    """Ordered (z, y, x) assignments passing every checkable relation."""
    fixed = fixed_generator_rows()
    available = set(fixed) | {"z", "y", "x"}
    checkable = [(i, r) for i, r, support in entries
                 if support <= available]
    candidates = degree_one_candidates()
    vecs = {label: row_vector(row, 1) for label, row in candidates}
    survivors = []
    for triple in itertools.permutations(candidates, 3):
        labels = tuple(t[0] for t in triple)
        acc = EchelonAccumulator(codomain_dim(1))
        if not all(acc.insert(vecs[l]) for l in labels):
            continue
        rows = dict(fixed)
        rows.update({"z": triple[0][1], "y": triple[1][1],
                     "x": triple[2][1]})
        failure = _first_failure(rows, checkable)
        if failure is None:
            survivors.append({"labels": {"z": labels[0], "y": labels[1],
                                         "x": labels[2]},
                              "rows": rows})
    return survivors


_STAGE_TWO_ORDER = ("w", "v", "u", "t")


def _schedule_relations(entries: list, base: set) -> tuple:
    """Assign each relation to the earliest solver level that can see it.

    Levels 0..3 correspond to assigning w, v, u, t; level 4 runs after
    the k row is derived.  Relations fully supported by the base rows
    are stage-one business and are excluded.
    """
    levels: tuple = tuple([] for _ in range(5))
    for index, rel, support in entries:
        missing = support - base
        if not missing:
            continue
        if not missing <= set(_STAGE_TWO_ORDER) | {"k"}:
            continue
        if "k" in missing:
            levels[4].append((index, rel))
        else:
            last = max(_STAGE_TWO_ORDER.index(v) for v in missing)
            levels[last].append((index, rel))
    return levels


def _stage_two(branch: dict, entries: list) -> dict:
    """Exhaustive degree-2 assignment under one degree-1 ordering.

    Unknowns are assigned in the order w, v, u, t from the span of the
    published degree-2 classes and decomposables; every relation is
    enforced at the earliest level where its support is complete.  After
    a full assignment the k row is derived and the remaining relations
    plus the rank of restriction through degree 6 are checked.  Branches
    that die record, per level, how many candidates were tried, how many
    survived, and a sample failing relation.
    """
    base_rows = branch["rows"]
    basis, combos = degree_two_space(base_rows)
    levels = _schedule_relations(entries, set(base_rows))
    expected_ranks = p_series().expand(6)
    solutions = []
    progress = [{"var": var, "attempts": 0, "survivors": 0,
                 "sample_failure": None} for var in _STAGE_TWO_ORDER]
    leaf = {"attempts": 0, "survivors": 0, "sample_failure": None}

    def advance(level: int, rows: Dict[str, Row], labels: dict) -> None:
        if level == len(_STAGE_TWO_ORDER):
            leaf["attempts"] += 1
            full = dict(rows)
            from .steenrod import derive_k_row
            full["k"] = derive_k_row(full)
            failure = _first_failure(full, levels[4])
            if failure is None:
                table = RestrictionTable(full)
                ranks = table.image_hilbert(6)
                if ranks != expected_ranks:
                    failure = {"relation": "image rank through degree 6",
                               "ring": "all",
                               "residue": f"{ranks} != {expected_ranks}"}
            if failure is None:
                leaf["survivors"] += 1
                solutions.append({"degree_two": dict(labels),
                                  "rows": full})
            elif leaf["sample_failure"] is None:
                leaf["sample_failure"] = failure
            return
        step = progress[level]
        var = _STAGE_TWO_ORDER[level]
        for cand_label, cand in combos:
            step["attempts"] += 1
            rows[var] = cand
            labels[var] = cand_label
            failure = _first_failure(rows, levels[level])
            if failure is None:
                step["survivors"] += 1
                advance(level + 1, rows, labels)
            elif step["sample_failure"] is None:
                step["sample_failure"] = dict(failure)
        del rows[var], labels[var]

    advance(0, dict(base_rows), {})
    record = {
        "degree_one": branch["labels"],
        "space_dimension": len(basis),
        "space_basis": [label for label, _ in basis],
        "levels": progress,
        "leaf": leaf,
        "solutions": solutions,
    }
    if not solutions:
        dead = next((p for p in progress if p["survivors"] == 0), leaf)
        record["obstruction"] = dead.get("sample_failure")
    return record


def ci_product_obstruction(target: RingElement) -> dict:
    """Whether a degree-4 class of the 4^3 ring is a product of two H2s.

    Enumerates every ordered pair from the full 64-element degree-2
    component and counts products equal to the target; also reports the
    rank of the target's exterior-pair-by-polynomial coefficient matrix.
    A target without purely polynomial terms forces one factor's
    polynomial part to vanish (the b-subring has no zero divisors), so
    its exterior-pair matrix is a single outer product of rank at most
    1; rank 2 then certifies the count is zero.
    """
    ring = _RING_CI
    basis = _ring_monomials(ring, 2)
    h2 = []
    for bits in range(1 << len(basis)):
        terms = tuple(m for i, m in enumerate(basis) if (bits >> i) & 1)
        h2.append(RingElement(ring, terms))
    hits = sum(1 for a in h2 for b in h2 if (a * b + target).is_zero())
    pair_cols = {(1, 1, 0): 0, (1, 0, 1): 1, (0, 1, 1): 2}
    matrix = np.zeros((3, 3), dtype=bool)
    pure_polynomial = 0
    for t in target.terms:
        epart, bpart = t[:3], t[3:]
        if sum(epart) == 2 and sum(bpart) == 1:
            matrix[pair_cols[epart], bpart.index(1)] = True
        elif sum(epart) == 0:
            pure_polynomial += 1
    return {
        "target": str(target),
        "products_matching": hits,
        "pairs_tried": len(h2) ** 2,
        "exterior_pair_rank": int(BitMatrix.from_dense(matrix).rank()),
        "pure_polynomial_terms": pure_polynomial,
        "max_rank_of_product": 1,
    }


def _branch_certificate(branch: dict) -> dict:
    """The factorization obstruction pinned to one degree-1 ordering.

    The relations y*q + w*v and y*q + x*q + w^2 + w*u force a product of
    degree-2 classes to hit y*q (respectively (y+x)*q) in the 4^3 ring;
    whichever of those targets is nonzero there gets the product scan.
    """
    rows = branch["rows"]
    target = row_mul(rows["y"], rows["q"])[0]
    relation = "y*q + w*v"
    if target.is_zero():
        yx = row_add(rows["y"], rows["x"])
        target = row_mul(yx, rows["q"])[0]
        relation = "y*q + x*q + w^2 + w*u"
    return {
        "degree_one": branch["labels"],
        "forcing_relation": relation,
        "analysis": ci_product_obstruction(target),
    }


def solve_generator_dictionary(check_degree: int = 6) -> dict:
    """Search every assignment of z, y, x, w, v, u, t to published classes.

    Degree-1 images range over the span of the three w1 rows, degree-2
    images over the span of the four w2 rows plus decomposables.  All
    relations of degree at most check_degree are enforced, and full
    assignments must restrict with the expected rank through degree 6.
    Returns the report when at least one assignment works; otherwise
    raises DictionaryUnsolvedError carrying the report, including
    per-branch obstructions and factorization certificates.
    """
    entries = _relation_entries(check_degree)
    stage_one = _stage_one(entries)
    branches = [_stage_two(b, entries) for b in stage_one]
    solutions = []
    for b in branches:
        for s in b["solutions"]:
            solutions.append({"degree_one": b["degree_one"],
                              "degree_two": s["degree_two"],
                              "rows": s["rows"]})
    report = {
        "check_degree": check_degree,
        "stage_one_count": len(stage_one),
        "stage_one": [b["labels"] for b in stage_one],
        "branches": [{k: v for k, v in b.items() if k != "solutions"}
                     for b in branches],
        "obstructions": [b["obstruction"] for b in branches
                         if not b["solutions"]],
        "certificates": [_branch_certificate(b) for b in stage_one],
        "solutions": [{"degree_one": s["degree_one"],
                       "degree_two": s["degree_two"]} for s in solutions],
    }
    if not solutions:
        raise DictionaryUnsolvedError(report)
    report["tables"] = [RestrictionTable(s["rows"]) for s in solutions]
    return report


@lru_cache(maxsize=1)
def resolved_table() -> RestrictionTable:
    """The restriction table from the first dictionary solution.

    Raises DictionaryUnsolvedError when the solver finds no assignment.
    """
    report = solve_generator_dictionary()
    return report["tables"][0]
