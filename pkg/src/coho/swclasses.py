"""Stiefel-Whitney classes of the real representations behind the ring generators.

The degree-1 and degree-2 ring generators, together with the degree-4 and
degree-8 classes of the eight-dimensional representation, arise as
Stiefel-Whitney classes of explicit real representations of the order-512
group.  This module constructs those representations as signed permutation
matrices, restricts them to the nine detecting subgroups, and computes total
Stiefel-Whitney classes there without ever leaving exact arithmetic.

The computation runs in three stages.  A representation is first extended
from generator images to all 512 group elements by breadth-first closure,
which simultaneously proves the images satisfy every defining relation.
Restricted to an abelian detecting subgroup it splits as a sum of complex
characters; the multiplicity of each character is an exact trace inner
product, a Gaussian-integer computation since every character value is a
fourth root of unity.  Finally the total class is the product of one factor
per real character (1 + its first Stiefel-Whitney class) and one factor per
conjugate pair (1 + the first Chern class reduced mod 2), evaluated inside
the detecting ring.

verify_sw_tables compares the computed classes cell by cell against the
published restriction table.  Discrepancies are reported with both values
and never patched over: the published table is the comparison target even
where it disagrees with what the printed matrices force.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .detection import (
    DetectingRing,
    RING_NAMES,
    RingElement,
    published_rows,
    ring_by_name,
)
from .groups import FiniteGroup, Subgroup, build_named_subgroup, build_sylow_hs
from .steenrod import sq


class RepresentationError(Exception):
    """Raised when matrix data fails to define or restrict a representation."""


REP_NAMES = ("lin_v", "lin_s", "lin_t", "r21", "r22", "r23", "r4", "r8")

GENERATOR_ORDER = ("v1", "v2", "v3", "t", "s")

_J = np.array([[0, -1], [1, 0]], dtype=np.int64)
_K = np.array([[0, 1], [1, 0]], dtype=np.int64)
_I2 = np.eye(2, dtype=np.int64)
_Z2 = np.zeros((2, 2), dtype=np.int64)


def _block_diagonal(*blocks):
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=np.int64)
    offset = 0
    for b in blocks:
        k = b.shape[0]
        out[offset:offset + k, offset:offset + k] = b
        offset += k
    return out


def _block_matrix(rows):
    return np.block([[np.asarray(c, dtype=np.int64) for c in row] for row in rows])


# Coordinate 4-cycles for the s image.  The group presentation conjugates by
# s on the left (x^s = s x s^-1), which runs the coordinate cycle in the
# opposite sense from the matrices as classically displayed; the transposed
# cycle is the one that satisfies the relations here.  Representations whose
# s image is an involution or a scalar multiple of a v image are unaffected.
_S4 = np.array(
    [[0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]], dtype=np.int64
).T
_S8 = _block_matrix(
    [[_Z2, _Z2, _Z2, _I2], [_I2, _Z2, _Z2, _Z2], [_Z2, _I2, _Z2, _Z2], [_Z2, _Z2, _I2, _Z2]]
).T


def _generator_images(name: str) -> dict:
    if name == "r4":
        return {
            "v1": np.diag([-1, 1, 1, -1]).astype(np.int64),
            "v2": np.diag([1, 1, -1, -1]).astype(np.int64),
            "v3": np.diag([1, -1, -1, 1]).astype(np.int64),
            "t": _block_diagonal(_K, _K),
            "s": _S4,
        }
    if name == "r8":
        return {
            "v1": _block_diagonal(_J, _I2, _I2, _J),
            "v2": _block_diagonal(_I2, _I2, _J, _J),
            "v3": _block_diagonal(_I2, _J, _J, _I2),
            "t": _block_matrix(
                [[_Z2, _K, _Z2, _Z2], [_K, _Z2, _Z2, _Z2], [_Z2, _Z2, _Z2, _K], [_Z2, _Z2, _K, _Z2]]
            ),
            "s": _S8,
        }
    if name == "r21":
        return {"v1": _J, "v2": _J, "v3": _J, "t": _K, "s": _J}
    if name == "r22":
        return {"v1": _J, "v2": _J, "v3": _J, "t": _K, "s": _I2}
    if name == "r23":
        return {"v1": _J, "v2": -_J, "v3": _J, "t": _K, "s": _K}
    if name in ("lin_v", "lin_s", "lin_t"):
        flip = {"lin_v": ("v1", "v2", "v3"), "lin_s": ("s",), "lin_t": ("t",)}[name]
        return {
            g: np.array([[-1 if g in flip else 1]], dtype=np.int64)
            for g in GENERATOR_ORDER
        }
    raise RepresentationError(f"unknown representation {name!r}")


def signed_permutation_determinant(matrix) -> int:
    """Exact determinant of a matrix with one nonzero entry of +-1 per row."""
    m = np.asarray(matrix, dtype=np.int64)
    n = m.shape[0]
    perm = np.full(n, -1, dtype=np.int64)
    sign = 1
    for i in range(n):
        cols = np.nonzero(m[i])[0]
        if len(cols) != 1 or m[i, cols[0]] not in (-1, 1):
            raise RepresentationError("matrix is not a signed permutation")
        perm[i] = cols[0]
        sign *= int(m[i, cols[0]])
    if len(set(perm.tolist())) != n:
        raise RepresentationError("matrix is not a signed permutation")
    seen = np.zeros(n, dtype=bool)
    for i in range(n):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = int(perm[j])
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


class RealRepresentation:
    """A real representation given by signed permutation generator images.

    Extending the images over the whole group by breadth-first products both
    caches every element's matrix and verifies the homomorphism property: if
    any relation failed, some element would be reached along two words with
    different matrices.
    """

    def __init__(self, name: str, group: FiniteGroup, images: dict):
        self.name = name
        self.group = group
        self.images = {g: np.asarray(m, dtype=np.int64) for g, m in images.items()}
        if set(self.images) != set(group.generators):
            raise RepresentationError("images must cover exactly the group generators")
        dims = {m.shape for m in self.images.values()}
        if len(dims) != 1 or any(a != b for a, b in dims):
            raise RepresentationError("generator images must be square of equal size")
        self.dim = next(iter(dims))[0]
        for g, m in self.images.items():
            signed_permutation_determinant(m)
            if not np.array_equal(m @ m.T, np.eye(self.dim, dtype=np.int64)):
                raise RepresentationError(f"image of {g} is not orthogonal")
        self.matrices = self._close()

    def _close(self) -> np.ndarray:
        group = self.group
        mats = np.zeros((group.order, self.dim, self.dim), dtype=np.int64)
        known = np.zeros(group.order, dtype=bool)
        mats[group.identity] = np.eye(self.dim, dtype=np.int64)
        known[group.identity] = True
        frontier = [group.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for gname, gi in group.generators.items():
                    y = int(group.mult[x, gi])
                    m = mats[x] @ self.images[gname]
                    if known[y]:
                        if not np.array_equal(mats[y], m):
                            raise RepresentationError(
                                f"{self.name}: images violate a relation at {gname}"
                            )
                    else:
                        mats[y] = m
                        known[y] = True
                        nxt.append(y)
            frontier = nxt
        if not known.all():
            raise RepresentationError("generator images do not generate the group")
        return mats

    def matrix(self, element: int) -> np.ndarray:
        return self.matrices[element]

    def trace(self, element: int) -> int:
        return int(np.trace(self.matrices[element]))

    def __repr__(self):
        return f"RealRepresentation({self.name!r}, dim={self.dim})"


@lru_cache(maxsize=None)
def _sylow():
    return build_sylow_hs()


@lru_cache(maxsize=None)
def build_representation(name: str) -> RealRepresentation:
    return RealRepresentation(name, _sylow(), _generator_images(name))


def direct_sum(a: RealRepresentation, b: RealRepresentation) -> RealRepresentation:
    if a.group is not b.group:
        raise RepresentationError("summands live over different groups")
    images = {
        g: _block_diagonal(a.images[g], b.images[g]) for g in a.images
    }
    return RealRepresentation(f"{a.name}+{b.name}", a.group, images)


def _as_representation(rep) -> RealRepresentation:
    if isinstance(rep, RealRepresentation):
        return rep
    return build_representation(rep)


def _as_subgroup(sub) -> Subgroup:
    if isinstance(sub, Subgroup):
        return sub
    return build_named_subgroup(_sylow(), sub)


def restrict_representation(rep, sub) -> list:
    """Images of a subgroup's canonical generators, checked to commute."""
    rep = _as_representation(rep)
    sub = _as_subgroup(sub)
    mats = [rep.matrix(x) for x in sub.generator_indices]
    for i, a in enumerate(mats):
        for b in mats[i + 1:]:
            if not np.array_equal(a @ b, b @ a):
                raise RepresentationError(
                    "restricted generator images do not commute"
                )
    return mats


@dataclass(frozen=True)
class RingCoordinates:
    """Cyclic coordinates of a detecting subgroup in ring terms.

    orders lists the canonical generators' orders; degree_one names the
    degree-1 class dual to each coordinate; bockstein names the polynomial
    degree-2 class of an order-4 coordinate, None on order-2 coordinates
    where the square of the degree-1 class plays that role.
    """

    orders: tuple
    degree_one: tuple
    bockstein: tuple


def ring_coordinates(ring: DetectingRing) -> RingCoordinates:
    if ring.variables[0] == "l1":
        return RingCoordinates((2, 2, 2, 2), ("l1", "l2", "l3", "l4"), (None,) * 4)
    if ring.variables == ("e1", "e2", "e3", "b1", "b2", "b3"):
        return RingCoordinates((4, 4, 4), ("e1", "e2", "e3"), ("b1", "b2", "b3"))
    return RingCoordinates((4, 2, 2), ("e1", "l2", "l3"), ("b", None, None))


@lru_cache(maxsize=None)
def _coordinate_elements(sub_name: str) -> tuple:
    """Bijection between exponent tuples and subgroup elements.

    Exhausting the subgroup proves the canonical generators are independent
    cyclic coordinates of the stated orders.
    """
    group = _sylow()
    sub = build_named_subgroup(group, sub_name)
    coords = ring_coordinates(ring_by_name(sub_name))
    gens = sub.generator_indices
    if len(gens) != len(coords.orders):
        raise RepresentationError(f"{sub_name}: generator count does not match ring rank")
    for gi, o in zip(gens, coords.orders):
        if group.element_order(gi) != o:
            raise RepresentationError(f"{sub_name}: generator order mismatch")
    pairs = []
    seen = set()
    for exps in product(*[range(o) for o in coords.orders]):
        x = group.identity
        for gi, e in zip(gens, exps):
            x = int(group.mult[x, group.power(gi, e)])
        if x in seen:
            raise RepresentationError(f"{sub_name}: generators are not independent")
        seen.add(x)
        pairs.append((exps, x))
    if len(pairs) != sub.order:
        raise RepresentationError(f"{sub_name}: coordinates do not exhaust the subgroup")
    return tuple(pairs)


@dataclass(frozen=True)
class CharacterDecomposition:
    """Multiset of complex characters of a restricted representation.

    Characters are exponent tuples k; the value on the element with
    coordinates a is i^(sum_j k_j a_j (4/o_j)).  The multiset is certified
    by reconstructing every trace as the multiplicity-weighted character sum,
    which pins it uniquely since characters are linearly independent.
    """

    subgroup: str
    representation: str
    orders: tuple
    multiplicities: tuple

    def as_dict(self) -> dict:
        return dict(self.multiplicities)

    @property
    def dim(self) -> int:
        return sum(m for _, m in self.multiplicities)

    def is_real(self, char: tuple) -> bool:
        return all((k * (4 // o)) % 4 in (0, 2) for k, o in zip(char, self.orders))

    def conjugate(self, char: tuple) -> tuple:
        return tuple((-k) % o for k, o in zip(char, self.orders))

    def real_characters(self):
        return [(k, m) for k, m in self.multiplicities if self.is_real(k)]

    def conjugate_pairs(self):
        pairs = []
        seen = set()
        for k, m in self.multiplicities:
            if self.is_real(k) or k in seen:
                continue
            kc = self.conjugate(k)
            seen.add(k)
            seen.add(kc)
            pairs.append((k, kc, m))
        return pairs


def _character_exponent(char: tuple, exps: tuple, orders: tuple) -> int:
    return sum(k * a * (4 // o) for k, a, o in zip(char, exps, orders)) % 4


@lru_cache(maxsize=None)
def _decompose_cached(rep_name: str, sub_name: str) -> CharacterDecomposition:
    return _decompose(build_representation(rep_name), sub_name)


def _decompose(rep: RealRepresentation, sub_name: str) -> CharacterDecomposition:
    restrict_representation(rep, sub_name)
    coords = ring_coordinates(ring_by_name(sub_name))
    pairs = _coordinate_elements(sub_name)
    traces = [(exps, rep.trace(x)) for exps, x in pairs]
    n = len(pairs)
    mults = []
    total = 0
    for char in product(*[range(o) for o in coords.orders]):
        re = im = 0
        for exps, tr in traces:
            # accumulate conj(i^e) * tr with conj(i^e) = i^(4-e)
            e = (4 - _character_exponent(char, exps, coords.orders)) % 4
            if e == 0:
                re += tr
            elif e == 1:
                im += tr
            elif e == 2:
                re -= tr
            else:
                im -= tr
        if im != 0 or re % n != 0 or re < 0:
            raise RepresentationError(
                f"{rep.name} at {sub_name}: non-integral character multiplicity"
            )
        m = re // n
        if m:
            mults.append((char, m))
        total += m
    if total != rep.dim:
        raise RepresentationError(
            f"{rep.name} at {sub_name}: multiplicities sum to {total}, not {rep.dim}"
        )
    dec = CharacterDecomposition(sub_name, rep.name, coords.orders, tuple(mults))
    _verify_reconstruction(dec, traces)
    return dec


def _verify_reconstruction(dec: CharacterDecomposition, traces) -> None:
    for k, m in dec.multiplicities:
        if dec.as_dict().get(dec.conjugate(k)) != m:
            raise RepresentationError(
                f"{dec.representation} at {dec.subgroup}: conjugate multiplicities differ"
            )
    for exps, tr in traces:
        re = im = 0
        for char, m in dec.multiplicities:
            e = _character_exponent(char, exps, dec.orders)
            if e == 0:
                re += m
            elif e == 1:
                im += m
            elif e == 2:
                re -= m
            else:
                im -= m
        if re != tr or im != 0:
            raise RepresentationError(
                f"{dec.representation} at {dec.subgroup}: trace reconstruction failed"
            )


def character_decompose(rep, sub) -> CharacterDecomposition:
    """Split a restricted representation into characters with multiplicity."""
    rep = _as_representation(rep)
    sub_name = sub.name if isinstance(sub, DetectingRing) else sub
    if isinstance(sub_name, Subgroup):
        raise RepresentationError("pass the detecting subgroup by name")
    if rep.name in REP_NAMES:
        return _decompose_cached(rep.name, sub_name)
    return _decompose(rep, sub_name)


@dataclass(frozen=True)
class TotalSWClass:
    """Inhomogeneous total Stiefel-Whitney class in a detecting ring.

    components holds (degree, element) pairs for the nonzero graded pieces;
    the degree-0 piece is always 1.
    """

    ring: DetectingRing
    components: tuple

    @staticmethod
    def one(ring: DetectingRing) -> "TotalSWClass":
        return TotalSWClass(ring, ((0, ring.one()),))

    @staticmethod
    def from_parts(ring: DetectingRing, parts: dict) -> "TotalSWClass":
        items = tuple(sorted((d, e) for d, e in parts.items() if not e.is_zero()))
        if not items or items[0][0] != 0 or items[0][1] != ring.one():
            raise RepresentationError("total class must have constant term 1")
        return TotalSWClass(ring, items)

    def as_dict(self) -> dict:
        return dict(self.components)

    def component(self, degree: int) -> RingElement:
        for d, e in self.components:
            if d == degree:
                return e
        return self.ring.zero()

    @property
    def top_degree(self) -> int:
        return self.components[-1][0]

    def __mul__(self, other: "TotalSWClass") -> "TotalSWClass":
        if self.ring is not other.ring and self.ring != other.ring:
            raise RepresentationError("total classes live in different rings")
        parts = {}
        for d1, e1 in self.components:
            for d2, e2 in other.components:
                prod = e1 * e2
                if prod.is_zero():
                    continue
                d = d1 + d2
                parts[d] = parts[d] + prod if d in parts else prod
        return TotalSWClass.from_parts(self.ring, parts)

    def times_linear_factor(self, cls: RingElement, degree: int) -> "TotalSWClass":
        if cls.is_zero():
            return self
        factor = TotalSWClass.from_parts(self.ring, {0: self.ring.one(), degree: cls})
        return self * factor

    def __str__(self):
        return " + ".join(str(e) if d else "1" for d, e in self.components)


def _first_sw_class(ring, coords, dec, char) -> RingElement:
    cls = ring.zero()
    for k, o, name in zip(char, dec.orders, coords.degree_one):
        if (k * (4 // o)) % 4 == 2:
            cls = cls + ring.variable(name)
    return cls


def _first_chern_mod2(ring, coords, dec, char) -> RingElement:
    cls = ring.zero()
    for k, o, one_name, bock_name in zip(
        char, dec.orders, coords.degree_one, coords.bockstein
    ):
        value = (k * (4 // o)) % 4
        if o == 4 and value in (1, 3):
            cls = cls + ring.variable(bock_name)
        elif o == 2 and value == 2:
            lin = ring.variable(one_name)
            cls = cls + lin * lin
    return cls


def total_sw_class(sub, rep) -> TotalSWClass:
    """Total Stiefel-Whitney class of a representation at a detecting subgroup.

    One factor (1 + w1) per real character, one factor (1 + c1 mod 2) per
    conjugate pair of order-4 characters, multiplied with multiplicity.
    """
    rep = _as_representation(rep)
    sub_name = sub if isinstance(sub, str) else sub.name
    if rep.name in REP_NAMES:
        return _total_cached(sub_name, rep.name)
    return _total(sub_name, rep)


@lru_cache(maxsize=None)
def _total_cached(sub_name: str, rep_name: str) -> TotalSWClass:
    return _total(sub_name, build_representation(rep_name))


def _total(sub_name: str, rep: RealRepresentation) -> TotalSWClass:
    ring = ring_by_name(sub_name)
    coords = ring_coordinates(ring)
    dec = character_decompose(rep, sub_name)
    total = TotalSWClass.one(ring)
    for char, mult in dec.real_characters():
        cls = _first_sw_class(ring, coords, dec, char)
        for _ in range(mult):
            total = total.times_linear_factor(cls, 1)
    for char, _, mult in dec.conjugate_pairs():
        cls = _first_chern_mod2(ring, coords, dec, char)
        for _ in range(mult):
            total = total.times_linear_factor(cls, 2)
    if total.top_degree > rep.dim:
        raise RepresentationError(
            f"{rep.name} at {sub_name}: class exceeds the representation dimension"
        )
    return total


_TABLE_LAYOUT = (
    ("w1", "lin_v", "lin_v", 1),
    ("w1", "lin_s", "lin_s", 1),
    ("w1", "lin_t", "lin_t", 1),
    ("w2", "r21", "r21", 2),
    ("w2", "r22", "r22", 2),
    ("w2", "r23", "r23", 2),
    ("w2", "r4", "r4", 2),
    ("w48", "w4_r8", "r8", 4),
    ("w48", "w8_r8", "r8", 8),
)


def verify_sw_tables() -> dict:
    """Compare every published restriction cell with the computed class.

    Returns a report with one entry per cell; mismatching cells appear in
    suspected_typos with both the published and the computed polynomial, so
    a disagreement is always surfaced rather than silently normalized.
    """
    rows = published_rows()
    cells = []
    mismatches = []
    for table, row_name, rep_name, degree in _TABLE_LAYOUT:
        for position, sub_name in enumerate(RING_NAMES):
            computed = total_sw_class(sub_name, rep_name).component(degree)
            printed = rows[row_name][position]
            entry = {
                "table": table,
                "row": row_name,
                "subgroup": sub_name,
                "printed": str(printed),
                "computed": str(computed),
                "match": computed == printed,
            }
            cells.append(entry)
            if not entry["match"]:
                mismatches.append(entry)
    return {
        "cells": len(cells),
        "matches": sum(1 for c in cells if c["match"]),
        "all_match": not mismatches,
        "suspected_typos": mismatches,
        "entries": cells,
    }


def dickson_quadratic(x: RingElement, y: RingElement) -> RingElement:
    """Degree-2 invariant of the rank-2 general linear group: x^2 + xy + y^2."""
    return x * x + x * y + y * y


def dickson_cubic(x: RingElement, y: RingElement) -> RingElement:
    """Degree-3 invariant of the rank-2 general linear group: xy(x + y)."""
    return x * y * (x + y)


def _orbit_polynomial(classes) -> dict:
    """Coefficients of prod over the span of (X + v), indexed by X-power.

    The product runs over all 2^r span elements including zero, so the
    result is the classical top orbit polynomial whose coefficients are the
    Dickson invariants of the span.
    """
    ring = classes[0].ring
    span = [ring.zero()]
    for cls in classes:
        span = span + [v + cls for v in span]
    coeffs = {0: ring.one()}
    for v in span:
        nxt = {}
        for power, coeff in coeffs.items():
            nxt[power + 1] = nxt[power + 1] + coeff if power + 1 in nxt else coeff
            shifted = coeff * v
            if not shifted.is_zero():
                nxt[power] = nxt[power] + shifted if power in nxt else shifted
        coeffs = {p: c for p, c in nxt.items() if not c.is_zero()}
    return coeffs


def dickson_quartic(x: RingElement, y: RingElement, z: RingElement) -> RingElement:
    """Degree-4 invariant of the rank-3 general linear group on span{x,y,z}."""
    return _orbit_polynomial([x, y, z])[4]


def w8_rank2_form(ring: DetectingRing) -> RingElement:
    """The top class shape b^4 + b^2 d2(l2,l3)^2 + b d3(l2,l3)^2."""
    b = ring.variable("b")
    l2 = ring.variable("l2")
    l3 = ring.variable("l3")
    d2 = dickson_quadratic(l2, l3)
    d3 = dickson_cubic(l2, l3)
    return b.power(4) + b * b * d2 * d2 + b * d3 * d3


def w8_rank3_form(ring: DetectingRing) -> RingElement:
    """The top class shape l1^8 + l1^4 d4 + l1^2 Sq2(d4) + l1 Sq3(d4)."""
    l1 = ring.variable("l1")
    d4 = dickson_quartic(ring.variable("l2"), ring.variable("l3"), ring.variable("l4"))
    return l1.power(8) + l1.power(4) * d4 + l1 * l1 * sq(2, d4) + l1 * sq(3, d4)
