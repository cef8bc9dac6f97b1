"""Construction of S = 4^3 : D8, its named subgroups, and the subgroup census.

A finite group is carried entirely by its multiplication table over element
indices 0..order-1, which is the form every later stage (regular modules,
resolutions) consumes anyway.  For S the index encodes the normal form
v1^a v2^b v3^c t^e s^k via

    index = ((a*4 + b)*4 + c)*8 + (e*4 + k)

with a, b, c mod 4, e mod 2, k mod 4.  Conjugation is written x^y = y*x*y^-1,
so the defining action reads v1^t = v3^-1, v2^t = v2^-1, v1^s = v2,
v2^s = v3, v3^s = v2^-1*v1*v3.  On the exponent lattice (Z/4)^3 the dihedral
part acts through the matrices _ACTION_T and _ACTION_S, applied on the left
in the semidirect multiplication (u, d)*(u', d') = (u + A_d u', d*d').
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import datafiles


class GroupConstructionError(RuntimeError):
    """A multiplication table failed one of the group axioms or a defining relation."""


# Columns are the images of the basis vectors of (Z/4)^3 under conjugation
# by t and by s.  Entries are read mod 4.
_ACTION_T = np.array([[0, 0, -1], [0, -1, 0], [-1, 0, 0]])
_ACTION_S = np.array([[0, 0, 1], [1, 0, -1], [0, 1, 1]])

_ASSOC_SAMPLE = 20000
_ASSOC_EXHAUSTIVE_LIMIT = 64


@dataclass(eq=False)
class FiniteGroup:
    """A finite group given by its full multiplication table.

    Attributes:
        order: number of elements.
        mult: order x order array, mult[x, y] = index of the product x*y.
        identity: index of the identity element.
        generators: name -> element index for the distinguished generators.
        element_words: optional human-readable word for each element.
        name: optional label used in reports.
        inverse: per-element inverse indices, derived at construction.
    """

    order: int
    mult: np.ndarray
    identity: int
    generators: dict = field(default_factory=dict)
    element_words: list | None = None
    name: str = ""
    inverse: np.ndarray = field(init=False)

    def __post_init__(self):
        self.mult = np.ascontiguousarray(self.mult, dtype=np.int16)
        self._validate_axioms()
        eye_hits = np.argwhere(self.mult == self.identity)
        inv = np.empty(self.order, dtype=np.int64)
        inv[eye_hits[:, 0]] = eye_hits[:, 1]
        self.inverse = inv
        self.mult.setflags(write=False)
        self.inverse.setflags(write=False)

    def _validate_axioms(self):
        n = self.order
        if self.mult.shape != (n, n):
            raise GroupConstructionError("table shape disagrees with the stated order")
        idx = np.arange(n)
        if not np.array_equal(self.mult[self.identity], idx):
            raise GroupConstructionError("left identity law fails")
        if not np.array_equal(self.mult[:, self.identity], idx):
            raise GroupConstructionError("right identity law fails")
        # Rows and columns must each be permutations, which together with
        # associativity gives unique two-sided inverses.
        if not np.array_equal(np.sort(self.mult, axis=1), np.broadcast_to(idx, (n, n))):
            raise GroupConstructionError("some row is not a permutation")
        if not np.array_equal(np.sort(self.mult, axis=0), np.broadcast_to(idx[:, None], (n, n))):
            raise GroupConstructionError("some column is not a permutation")
        if (self.mult == self.identity).sum(axis=1).max() != 1:
            raise GroupConstructionError("an element has more than one right inverse")
        if n <= _ASSOC_EXHAUSTIVE_LIMIT:
            a, b, c = np.meshgrid(idx, idx, idx, indexing="ij")
            a, b, c = a.ravel(), b.ravel(), c.ravel()
        else:
            rng = np.random.default_rng(0)
            a, b, c = rng.integers(0, n, size=(3, _ASSOC_SAMPLE))
        if not np.array_equal(self.mult[self.mult[a, b], c], self.mult[a, self.mult[b, c]]):
            raise GroupConstructionError("associativity fails on a sampled triple")

    def power(self, x: int, n: int) -> int:
        """Return x**n, with negative n through the inverse."""
        if n < 0:
            x, n = int(self.inverse[x]), -n
        acc = self.identity
        for _ in range(n):
            acc = int(self.mult[acc, x])
        return acc

    def element_order(self, x: int) -> int:
        n, acc = 1, x
        while acc != self.identity:
            acc = int(self.mult[acc, x])
            n += 1
        return n

    def conjugate(self, x: int, y: int) -> int:
        """Return x^y = y*x*y^-1."""
        return int(self.mult[self.mult[y, x], self.inverse[y]])

    def commutes(self, x: int, y: int) -> bool:
        return self.mult[x, y] == self.mult[y, x]

    def word(self, x: int) -> str:
        if self.element_words is not None:
            return self.element_words[x]
        return f"e{x}"


@dataclass(frozen=True)
class Subgroup:
    """A subgroup of a FiniteGroup, stored by its sorted element index set."""

    parent: FiniteGroup
    elements: tuple
    generator_indices: tuple
    generator_words: tuple | None = None

    def __post_init__(self):
        mask = np.zeros(self.parent.order, dtype=bool)
        elems = np.asarray(self.elements)
        mask[elems] = True
        if not mask[self.parent.identity]:
            raise GroupConstructionError("subgroup omits the identity")
        if not mask[self.parent.mult[np.ix_(elems, elems)]].all():
            raise GroupConstructionError("subgroup is not closed under multiplication")

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, x: int) -> bool:
        return x in self._element_set()

    def _element_set(self):
        return frozenset(self.elements)

    def same_elements(self, other: "Subgroup") -> bool:
        return self.elements == other.elements

    def is_abelian(self) -> bool:
        e = np.asarray(self.elements)
        block = self.parent.mult[np.ix_(e, e)]
        return np.array_equal(block, block.T)

    def is_elementary_abelian_2(self) -> bool:
        e = np.asarray(self.elements)
        squares = self.parent.mult[e, e]
        return self.is_abelian() and bool((squares == self.parent.identity).all())

    def abelian_type(self) -> tuple:
        """Cyclic factor orders of an abelian 2-group, smallest first.

        Counts elements of order dividing 2^k for increasing k; the jumps in
        log2 of those counts give the number of factors of each exponent.
        """
        if not self.is_abelian():
            raise ValueError("abelian_type needs an abelian subgroup")
        g = self.parent
        elems = np.asarray(self.elements)
        counts = [1]
        cur = elems
        while counts[-1] < len(elems):
            cur = g.mult[cur, cur]
            counts.append(int((cur == g.identity).sum()))
        jumps = [counts[k].bit_length() - counts[k - 1].bit_length() for k in range(1, len(counts))]
        factors = []
        for k, m in enumerate(jumps, start=1):
            drop = m - (jumps[k] if k < len(jumps) else 0)
            factors.extend([2 ** k] * drop)
        return tuple(sorted(factors))

    def conjugate_by(self, y: int) -> "Subgroup":
        g = self.parent
        elems = np.sort(g.mult[g.mult[y, np.asarray(self.elements)], g.inverse[y]])
        gens = tuple(int(g.mult[g.mult[y, x], g.inverse[y]]) for x in self.generator_indices)
        return Subgroup(g, tuple(int(x) for x in elems), gens)


def _closure(mult: np.ndarray, identity: int, gens: Sequence[int]) -> np.ndarray:
    """Indices of the subgroup generated by gens, via right-multiplication BFS."""
    seen = np.zeros(mult.shape[0], dtype=bool)
    seen[identity] = True
    gens = np.unique(np.asarray(gens, dtype=np.int64))
    if gens.size == 0:
        return np.array([identity])
    frontier = gens[~seen[gens]]
    seen[frontier] = True
    while frontier.size:
        prods = np.unique(mult[np.ix_(frontier, gens)])
        frontier = prods[~seen[prods]]
        seen[frontier] = True
    return np.nonzero(seen)[0]


def _generating_set(mult: np.ndarray, identity: int, elements: Sequence[int]) -> tuple:
    """Greedy small generating set for the subgroup with the given elements."""
    chosen: list = []
    span = {identity}
    for x in elements:
        if x in span:
            continue
        chosen.append(int(x))
        span = set(_closure(mult, identity, chosen).tolist())
        if len(span) == len(elements):
            break
    return tuple(chosen)


def make_subgroup(parent: FiniteGroup, elements: Iterable[int],
                  generator_indices: Sequence[int] | None = None,
                  generator_words: Sequence[str] | None = None) -> Subgroup:
    elems = tuple(int(x) for x in sorted(set(elements)))
    if generator_indices is None:
        generator_indices = _generating_set(parent.mult, parent.identity, elems)
    words = tuple(generator_words) if generator_words is not None else None
    return Subgroup(parent, elems, tuple(int(x) for x in generator_indices), words)


def evaluate_word(group: FiniteGroup, word: Sequence) -> int:
    """Evaluate a word given as (generator name, exponent) pairs, left to right."""
    acc = group.identity
    for name, exp in word:
        if name not in group.generators:
            raise KeyError(f"unknown generator {name!r}")
        acc = int(group.mult[acc, group.power(group.generators[name], int(exp))])
    return acc


def word_string(word: Sequence) -> str:
    parts = [name if exp == 1 else f"{name}^{exp}" for name, exp in word]
    return "*".join(parts) if parts else "1"


def _dihedral_part_table() -> np.ndarray:
    # d = e*4 + k encodes t^e s^k with t^2 = s^4 = (ts)^2 = 1, and
    # (t^e s^k)(t^e' s^k') = t^(e+e') s^((-1)^e' k + k').
    table = np.zeros((8, 8), dtype=np.int64)
    for e1, k1, e2, k2 in itertools.product(range(2), range(4), range(2), range(4)):
        e = (e1 + e2) % 2
        k = (k1 * (-1) ** e2 + k2) % 4
        table[e1 * 4 + k1, e2 * 4 + k2] = e * 4 + k
    return table


@lru_cache(maxsize=None)
def build_sylow_hs() -> FiniteGroup:
    """Build S = 4^3 : D8 of order 512 and check its defining relations."""
    dmult = _dihedral_part_table()
    vecs = np.array(list(itertools.product(range(4), repeat=3)))
    # itertools.product varies the last coordinate fastest, so the row index
    # of (a, b, c) is exactly (a*4 + b)*4 + c.
    phi = np.zeros((8, 3, 3), dtype=np.int64)
    for e in range(2):
        for k in range(4):
            m = np.linalg.matrix_power(_ACTION_T, e) @ np.linalg.matrix_power(_ACTION_S, k)
            phi[e * 4 + k] = m % 4
    summed = (vecs[:, None, :] + vecs[None, :, :]) % 4
    addidx = (summed[..., 0] * 4 + summed[..., 1]) * 4 + summed[..., 2]
    vimg = np.zeros((8, 64), dtype=np.int64)
    for d in range(8):
        img = (vecs @ phi[d].T) % 4
        vimg[d] = (img[:, 0] * 4 + img[:, 1]) * 4 + img[:, 2]
    mult = np.zeros((512, 512), dtype=np.int16)
    base = np.arange(64) * 8
    for d1 in range(8):
        for d2 in range(8):
            mult[np.ix_(base + d1, base + d2)] = addidx[:, vimg[d1]] * 8 + dmult[d1, d2]

    words = []
    for a, b, c in vecs:
        for e in range(2):
            for k in range(4):
                parts = [(n, x) for n, x in (("v1", a), ("v2", b), ("v3", c), ("t", e), ("s", k)) if x]
                words.append(word_string(parts))
    gens = {"v1": 128, "v2": 32, "v3": 8, "t": 4, "s": 1}
    group = FiniteGroup(order=512, mult=mult, identity=0, generators=gens,
                        element_words=words, name="S")

    relations = [
        [("t", 2)], [("s", 4)], [("t", 1), ("s", 1), ("t", 1), ("s", 1)],
        [("v1", 4)], [("v2", 4)], [("v3", 4)],
        [("v1", 1), ("v2", 1), ("v1", -1), ("v2", -1)],
        [("v1", 1), ("v3", 1), ("v1", -1), ("v3", -1)],
        [("v2", 1), ("v3", 1), ("v2", -1), ("v3", -1)],
    ]
    for rel in relations:
        if evaluate_word(group, rel) != group.identity:
            raise GroupConstructionError(f"relation {word_string(rel)} does not hold")
    # Conjugation action on the vector part, with x^y = y*x*y^-1.
    action = [
        ("v1", "t", [("v3", -1)]), ("v2", "t", [("v2", -1)]), ("v3", "t", [("v1", -1)]),
        ("v1", "s", [("v2", 1)]), ("v2", "s", [("v3", 1)]),
        ("v3", "s", [("v2", -1), ("v1", 1), ("v3", 1)]),
    ]
    for xname, yname, image in action:
        got = group.conjugate(gens[xname], gens[yname])
        if got != evaluate_word(group, image):
            raise GroupConstructionError(f"{xname}^{yname} is not {word_string(image)}")
    return group


@lru_cache(maxsize=None)
def _subgroup_words() -> dict:
    raw = datafiles.load_json("subgroups.json")
    return {k: v for k, v in raw.items() if not k.startswith("_")}


def build_named_subgroup(group: FiniteGroup, name: str) -> Subgroup:
    """Build one of the named subgroups of S from its stored generator words.

    Names carrying derived definitions (the rank-3 subgroups II..VI) are the
    square-one elements of the named centralizer of type 2^2 x 4.
    """
    table = _subgroup_words()
    if name not in table:
        raise KeyError(f"unknown subgroup name {name!r}")
    entry = table[name]
    if "omega1_of" in entry:
        amb = build_named_subgroup(group, entry["omega1_of"])
        elems = np.asarray(amb.elements)
        keep = elems[group.mult[elems, elems] == group.identity]
        return make_subgroup(group, keep.tolist())
    gens = [evaluate_word(group, w) for w in entry["generators"]]
    words = tuple(word_string(w) for w in entry["generators"])
    elems = _closure(group.mult, group.identity, gens)
    return Subgroup(group, tuple(int(x) for x in elems), tuple(gens), words)


def centralizer(group: FiniteGroup, elements: Iterable[int]) -> Subgroup:
    """Subgroup of everything commuting with every listed element."""
    mask = np.ones(group.order, dtype=bool)
    for x in elements:
        mask &= group.mult[:, x] == group.mult[x, :]
    return make_subgroup(group, np.nonzero(mask)[0].tolist())


def center(group: FiniteGroup) -> Subgroup:
    mask = (group.mult == group.mult.T).all(axis=1)
    return make_subgroup(group, np.nonzero(mask)[0].tolist())


def is_normal(group: FiniteGroup, elements: Iterable[int]) -> bool:
    elems = np.sort(np.asarray(list(elements)))
    for y in range(group.order):
        conj = np.sort(group.mult[group.mult[y, elems], group.inverse[y]])
        if not np.array_equal(conj, elems):
            return False
    return True


def elementary_abelian_subgroups(group: FiniteGroup, rank: int) -> list:
    """All elementary abelian 2-subgroups of exactly the given rank.

    Subgroups are grown one commuting involution at a time; a candidate must
    sit later in the involution ordering than everything already chosen, which
    still reaches every subgroup because a complement of the last basis vector
    uses only earlier involutions.  Masks over the involution list make the
    commuting test one integer AND.
    """
    if rank < 1:
        raise ValueError("rank must be at least 1")
    sq = group.mult[np.arange(group.order), np.arange(group.order)]
    inv_elems = np.nonzero((sq == group.identity) & (np.arange(group.order) != group.identity))[0]
    pos = {int(x): i for i, x in enumerate(inv_elems)}
    comm_mask = []
    for x in inv_elems:
        commuting = group.mult[inv_elems, x] == group.mult[x, inv_elems]
        comm_mask.append(int.from_bytes(np.packbits(commuting, bitorder="little").tobytes(), "little"))

    level = {}
    for i, x in enumerate(inv_elems):
        level[1 << i] = (int(x),)
    for _ in range(rank - 1):
        nxt = {}
        for mask, elems in level.items():
            top = mask.bit_length() - 1
            allowed = comm_mask[top] & ~((1 << (top + 1)) - 1)
            for e in elems:
                allowed &= comm_mask[pos[e]]
            cand = allowed
            while cand:
                low = cand & -cand
                p = low.bit_length() - 1
                cand ^= low
                if comm_mask[p] & mask != mask:
                    continue
                x = int(inv_elems[p])
                new_elems = elems + (x,) + tuple(int(group.mult[e, x]) for e in elems)
                new_mask = mask | low
                for e in new_elems[len(elems) + 1:]:
                    new_mask |= 1 << pos[e]
                nxt.setdefault(new_mask, tuple(sorted(new_elems)))
        level = nxt
        if not level:
            break
    out = []
    for elems in sorted(level.values()):
        out.append(make_subgroup(group, (group.identity,) + elems))
    return out


def maximal_elementary_abelians(group: FiniteGroup, max_rank: int = 8) -> list:
    """Elementary abelian subgroups not contained in any larger one."""
    by_rank = []
    r = 1
    while r <= max_rank:
        subs = elementary_abelian_subgroups(group, r)
        if not subs:
            break
        by_rank.append(subs)
        r += 1
    out = []
    for k, subs in enumerate(by_rank):
        bigger = by_rank[k + 1] if k + 1 < len(by_rank) else []
        bigger_sets = [set(s.elements) for s in bigger]
        for s in subs:
            se = set(s.elements)
            if not any(se <= b for b in bigger_sets):
                out.append(s)
    return out


def conjugacy_classes_of_subgroups(group: FiniteGroup, subs: Sequence[Subgroup]) -> list:
    """Partition the given subgroups into conjugacy classes of the parent.

    Returns a list of lists of indices into subs.  Two inputs land in the same
    class exactly when some parent element conjugates one onto the other.
    """
    keyed = {}
    for i, s in enumerate(subs):
        keyed.setdefault(s.elements, []).append(i)
    unclaimed = set(keyed)
    classes = []
    m, inv = group.mult, group.inverse
    while unclaimed:
        seed = min(unclaimed)
        members = []
        elems = np.asarray(seed)
        seen_orbit = set()
        for y in range(group.order):
            image = tuple(int(v) for v in np.sort(m[m[y, elems], inv[y]]))
            if image in seen_orbit:
                continue
            seen_orbit.add(image)
            if image in unclaimed:
                unclaimed.discard(image)
                members.extend(keyed[image])
        classes.append(sorted(members))
    return sorted(classes)


def subgroup_as_group(sub: Subgroup, name: str = "") -> tuple:
    """Reindex a subgroup as a standalone FiniteGroup.

    Returns (group, elements) where elements[i] is the parent index of local
    element i.
    """
    parent = sub.parent
    elems = np.asarray(sub.elements)
    local = np.full(parent.order, -1, dtype=np.int64)
    local[elems] = np.arange(elems.size)
    mult = local[parent.mult[np.ix_(elems, elems)]].astype(np.int16)
    gens = {f"g{i}": int(local[x]) for i, x in enumerate(sub.generator_indices)}
    words = None
    if parent.element_words is not None:
        words = [parent.element_words[int(x)] for x in elems]
    grp = FiniteGroup(order=int(elems.size), mult=mult, identity=int(local[parent.identity]),
                      generators=gens, element_words=words, name=name)
    return grp, elems


def cyclic_group(n: int) -> FiniteGroup:
    idx = np.arange(n)
    mult = (idx[:, None] + idx[None, :]) % n
    words = ["1"] + [f"g^{k}" if k > 1 else "g" for k in range(1, n)]
    return FiniteGroup(order=n, mult=mult, identity=0, generators={"g": 1 % n},
                       element_words=words, name=f"Z{n}")


def dihedral_group(order: int) -> FiniteGroup:
    """Dihedral group of the given even order, generated by r and f with f^2 = 1."""
    if order % 2 or order < 2:
        raise ValueError("dihedral order must be even and positive")
    m = order // 2
    mult = np.zeros((order, order), dtype=np.int64)
    for e1, k1, e2, k2 in itertools.product(range(2), range(m), range(2), range(m)):
        e = (e1 + e2) % 2
        k = (k1 * (-1) ** e2 + k2) % m
        mult[e1 * m + k1, e2 * m + k2] = e * m + k
    words = []
    for e in range(2):
        for k in range(m):
            parts = [(n, x) for n, x in (("f", e), ("r", k)) if x]
            words.append(word_string(parts))
    return FiniteGroup(order=order, mult=mult, identity=0,
                       generators={"r": 1, "f": m}, element_words=words, name=f"D{order}")


def wreath_with_z2(base: FiniteGroup) -> FiniteGroup:
    """The wreath product base wr Z/2: pairs swapped by the top involution."""
    n = base.order
    order = 2 * n * n
    mult = np.zeros((order, order), dtype=np.int64)
    bm = base.mult
    for a, b, e in itertools.product(range(n), range(n), range(2)):
        row = (a * n + b) * 2 + e
        for c, d, e2 in itertools.product(range(n), range(n), range(2)):
            cc, dd = (c, d) if e == 0 else (d, c)
            mult[row, (c * n + d) * 2 + e2] = (bm[a, cc] * n + bm[b, dd]) * 2 + (e + e2) % 2
    return FiniteGroup(order=order, mult=mult, identity=0, generators={},
                       name=f"({base.name} wr 2)")


@lru_cache(maxsize=None)
def iterated_wreath_z2(depth: int) -> FiniteGroup:
    """Z/2 wr Z/2 wr ... (depth factors), built by iterating the wreath step."""
    grp = cyclic_group(2)
    for _ in range(depth - 1):
        grp = wreath_with_z2(grp)
    return grp


def quotient_group(group: FiniteGroup, normal_elements: Iterable[int]) -> tuple:
    """Quotient by a normal subgroup.  Returns (quotient, coset_id array)."""
    elems = np.sort(np.asarray(list(normal_elements)))
    if not is_normal(group, elems):
        raise GroupConstructionError("quotient by a non-normal subgroup")
    reps = group.mult[:, elems].min(axis=1)
    uniq, coset_id = np.unique(reps, return_inverse=True)
    qmult = coset_id[reps[group.mult[np.ix_(uniq, uniq)]]]
    gens = {k: int(coset_id[reps[v]]) for k, v in group.generators.items()}
    quo = FiniteGroup(order=int(uniq.size), mult=qmult, identity=int(coset_id[reps[group.identity]]),
                      generators=gens, name=f"{group.name}/N")
    return quo, coset_id[reps]


def element_orders(group: FiniteGroup) -> np.ndarray:
    idx = np.arange(group.order)
    out = np.zeros(group.order, dtype=np.int64)
    out[group.identity] = 1
    cur = idx.copy()
    n = 1
    while (out == 0).any():
        n += 1
        cur = group.mult[cur, idx]
        hit = (cur == group.identity) & (out == 0)
        out[hit] = n
    return out


def element_conjugacy_classes(group: FiniteGroup) -> list:
    m, inv = group.mult, group.inverse
    assigned = np.zeros(group.order, dtype=bool)
    classes = []
    for x in range(group.order):
        if assigned[x]:
            continue
        cls = np.unique(m[m[:, x], inv])
        assigned[cls] = True
        classes.append(cls)
    return classes


def derived_subgroup(group: FiniteGroup) -> Subgroup:
    m, inv = group.mult, group.inverse
    idx = np.arange(group.order)
    left = m[np.ix_(inv, inv)]
    left = m[left, idx[:, None]]
    comms = np.unique(m[left, idx[None, :]])
    elems = _closure(m, group.identity, comms.tolist())
    return make_subgroup(group, elems.tolist())


def group_invariants(group: FiniteGroup) -> dict:
    """Cheap isomorphism invariants used to filter before a generator search."""
    orders = element_orders(group)
    classes = element_conjugacy_classes(group)
    der = derived_subgroup(group)
    ab_elems = quotient_group(group, der.elements)[0]
    ab = make_subgroup(ab_elems, range(ab_elems.order)).abelian_type() if ab_elems.order > 1 else ()
    return {
        "order": group.order,
        "element_orders": tuple(sorted(Counter(orders.tolist()).items())),
        "class_sizes": tuple(sorted(len(c) for c in classes)),
        "center_order": center(group).order,
        "derived_order": der.order,
        "exponent": int(orders.max()),
        "abelianization": ab,
    }


def _extend_partial(g: FiniteGroup, h: FiniteGroup, gens: Sequence[int],
                    images: Sequence[int]) -> np.ndarray | None:
    """Close a partial map on generators; None on any inconsistency."""
    fmap = np.full(g.order, -1, dtype=np.int64)
    fmap[g.identity] = h.identity
    queue = [g.identity]
    while queue:
        a = queue.pop()
        fa = fmap[a]
        for x, y in zip(gens, images):
            b = int(g.mult[a, x])
            fb = int(h.mult[fa, y])
            if fmap[b] < 0:
                fmap[b] = fb
                queue.append(b)
            elif fmap[b] != fb:
                return None
    return fmap


def find_isomorphism(g: FiniteGroup, h: FiniteGroup) -> np.ndarray | None:
    """Explicit isomorphism g -> h as an index array, or None.

    Invariant filtering first; then backtracking over images of a small
    generating set, with the first image fixed up to conjugacy in h.
    """
    if group_invariants(g) != group_invariants(h):
        return None
    gens = _generating_set(g.mult, g.identity, list(range(g.order)))
    gorders = [g.element_order(x) for x in gens]
    horders = element_orders(h)
    hclasses = element_conjugacy_classes(h)
    first_candidates = [int(c[0]) for c in hclasses if horders[c[0]] == gorders[0]]
    rest_candidates = [np.nonzero(horders == o)[0] for o in gorders]

    def search(depth: int, images: list) -> np.ndarray | None:
        fmap = _extend_partial(g, h, gens[:depth], images)
        if fmap is None:
            return None
        if depth == len(gens):
            if (fmap < 0).any():
                return None
            vals = fmap
            if np.unique(vals).size != g.order:
                return None
            if not np.array_equal(vals[g.mult], h.mult[vals[:, None], vals[None, :]]):
                return None
            return fmap
        pool = first_candidates if depth == 0 else rest_candidates[depth]
        for y in pool:
            result = search(depth + 1, images + [int(y)])
            if result is not None:
                return result
        return None

    return search(0, [])


@dataclass(frozen=True)
class WreathQuotientReport:
    normal_order: int
    normal_is_normal: bool
    quotient_order: int
    failed_invariants: tuple
    isomorphism_found: bool

    @property
    def ok(self) -> bool:
        return (self.normal_order == 4 and self.normal_is_normal
                and self.quotient_order == 128 and not self.failed_invariants
                and self.isomorphism_found)


def verify_quotient_wreath(group: FiniteGroup) -> WreathQuotientReport:
    """Check that <v1*v3> is a normal Z/4 with quotient the triple wreath of Z/2."""
    v1v3 = evaluate_word(group, [("v1", 1), ("v3", 1)])
    n_elems = _closure(group.mult, group.identity, [v1v3])
    normal = is_normal(group, n_elems)
    quo, _ = quotient_group(group, n_elems)
    wreath = iterated_wreath_z2(3)
    inv_q = group_invariants(quo)
    inv_w = group_invariants(wreath)
    failed = tuple(k for k in inv_q if inv_q[k] != inv_w[k])
    iso = find_isomorphism(quo, wreath) if not failed else None
    return WreathQuotientReport(
        normal_order=int(n_elems.size),
        normal_is_normal=normal,
        quotient_order=quo.order,
        failed_invariants=failed,
        isomorphism_found=iso is not None,
    )


def alpha_automorphism(group: FiniteGroup) -> np.ndarray:
    """The outer automorphism fixing 4^3 and t and sending s to t*v2*v3^-1*t*s.

    The image of s comes from replacing the Klein subgroup <t*s, t*s^-1> of the
    dihedral part with <v2*v3^-1*t*s, v1*v2^-1*t*s^-1> while keeping t, so
    s = t*(t*s) maps to t*(v2*v3^-1*t*s).  Raises if the extension is not an
    automorphism.
    """
    images = {
        "v1": [("v1", 1)], "v2": [("v2", 1)], "v3": [("v3", 1)], "t": [("t", 1)],
        "s": [("t", 1), ("v2", 1), ("v3", -1), ("t", 1), ("s", 1)],
    }
    gen_pairs = [(group.generators[k], evaluate_word(group, w)) for k, w in images.items()]
    fmap = _extend_partial(group, group, [p[0] for p in gen_pairs], [p[1] for p in gen_pairs])
    if fmap is None or (fmap < 0).any():
        raise GroupConstructionError("stated generator images do not extend to a map")
    if np.unique(fmap).size != group.order:
        raise GroupConstructionError("extension of the stated images is not a bijection")
    if not np.array_equal(fmap[group.mult], group.mult[fmap[:, None], fmap[None, :]]):
        raise GroupConstructionError("extension of the stated images is not a homomorphism")
    return fmap


_RANK4_NAMES = ("2A", "2A_v1", "2B", "2B_v1", "2B_t", "2B_v1t", "2C", "2C_v1")
_RANK3_NAMES = ("I", "II", "III", "IV", "V", "VI")
_CENTRALIZER_OF = {"I": "CI", "II": "CII", "III": "CIII", "IV": "CIV", "V": "CV", "VI": "CVI"}


def census_report(group: FiniteGroup) -> dict:
    """Run the full subgroup census of S and return a JSON-friendly report.

    Covers the eight rank-4 elementary abelians and their conjugacy classes,
    the absence of rank 5, the six maximal rank-3 subgroups with their
    centralizers, the orders of the named large subgroups, the wreath
    quotient, and the class swap under the outer automorphism.
    """
    report: dict = {}
    rank4 = elementary_abelian_subgroups(group, 4)
    rank5 = elementary_abelian_subgroups(group, 5)
    named4 = {name: build_named_subgroup(group, name) for name in _RANK4_NAMES}
    matched = {}
    for name, sub in named4.items():
        hits = [i for i, s in enumerate(rank4) if s.same_elements(sub)]
        matched[name] = hits[0] if hits else None
    classes4 = conjugacy_classes_of_subgroups(group, rank4)
    report["rank4_count"] = len(rank4)
    report["rank5_count"] = len(rank5)
    report["rank4_named_all_found"] = all(v is not None for v in matched.values())
    report["rank4_class_sizes"] = sorted(len(c) for c in classes4)

    central = evaluate_word(group, [("v1", 2), ("v3", 2)])
    report["rank4_all_contain_central"] = all(central in s for s in rank4)

    maximal = maximal_elementary_abelians(group)
    max3 = [s for s in maximal if s.order == 8]
    classes3 = conjugacy_classes_of_subgroups(group, max3)
    named3 = {name: build_named_subgroup(group, name) for name in _RANK3_NAMES}
    kbeta = build_named_subgroup(group, "Kbeta")
    kbeta_set = set(kbeta.elements)
    cent_orders = {}
    cent_match = {}
    for name, sub in named3.items():
        cent = centralizer(group, sub.elements)
        cname = _CENTRALIZER_OF[name]
        cent_orders[name] = cent.order
        cent_match[name] = cent.same_elements(build_named_subgroup(group, cname))
    report["maximal_rank3_count"] = len(max3)
    report["maximal_rank3_class_count"] = len(classes3)
    report["maximal_rank3_named_distinct"] = (
        len(conjugacy_classes_of_subgroups(group, list(named3.values()))) == len(_RANK3_NAMES))
    report["maximal_rank3_in_kbeta"] = all(set(s.elements) <= kbeta_set for s in max3)
    report["rank3_centralizer_orders"] = cent_orders
    report["rank3_centralizer_words_match"] = cent_match
    report["CI_type"] = list(build_named_subgroup(group, "CI").abelian_type())
    report["small_centralizer_types"] = {
        n: list(build_named_subgroup(group, _CENTRALIZER_OF[n]).abelian_type())
        for n in _RANK3_NAMES if n != "I"}

    for name in ("Kbeta", "M", "D1", "D2"):
        report[f"{name}_order"] = build_named_subgroup(group, name).order
    m_sub = build_named_subgroup(group, "M")
    v1v2_sq = evaluate_word(group, [("v1", 2), ("v2", 2)])
    report["M_is_centralizer_of_v1v2_sq"] = centralizer(group, [v1v2_sq]).same_elements(m_sub)

    wreath = verify_quotient_wreath(group)
    report["wreath_quotient_ok"] = wreath.ok

    fmap = alpha_automorphism(group)
    def class_of(elem_set):
        key = tuple(sorted(elem_set))
        for ci, cls in enumerate(classes4):
            if any(rank4[i].elements == key for i in cls):
                return ci
        return None
    a_cls = class_of(named4["2A"].elements)
    c_cls = class_of(named4["2C"].elements)
    a_image = class_of(int(x) for x in fmap[np.asarray(named4["2A"].elements)])
    c_image = class_of(int(x) for x in fmap[np.asarray(named4["2C"].elements)])
    report["alpha_swaps_A_and_C"] = (a_image == c_cls and c_image == a_cls and a_cls != c_cls)
    return report
