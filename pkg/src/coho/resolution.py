"""Minimal free resolutions over F2[G] and the cohomology built on them.

A degree-n term of a resolution is the free module F2[G]^(b_n), realized as
a bit space of dimension b_n * |G| with basis indexed by (free generator,
group element); index j * |G| + h.  Boundary matrices map column vectors,
so composition is matrix product and the kernel of a boundary is the right
null space of its matrix.

Extension by one degree computes the kernel K of the top boundary, spans
rad K by (g - 1)v over the group generators and a kernel basis, and picks
the lexicographically first kernel basis vectors that complement rad K
inside K.  That greedy complement is read off as the pivot columns of a
single elimination on the matrix whose columns are the rad K spanning set
followed by the kernel basis, which keeps the whole construction
deterministic.

Cocycles are functionals on the free generators of one term (minimality
makes those the canonical basis of H^n).  Lifting a cocycle to a chain map,
cup products by composing lifts, and restriction to a subgroup by viewing
the big resolution as a free module over the subgroup algebra all reduce to
repeated exact solves against the boundary matrices, which are cached in
factored form.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .f2linalg import (
    BitMatrix,
    EchelonAccumulator,
    RREFSolver,
    pack_rows,
    pack_vector,
    unpack_rows,
    unpack_vector,
    vector_get,
    words_for,
)
from .groups import FiniteGroup, Subgroup, subgroup_as_group

MANIFEST_NAME = "manifest.json"
FORMAT_VERSION = 1


class ResolutionError(RuntimeError):
    """Structural failure: inconsistent persisted data or a failed solve."""


class BudgetExceededError(ResolutionError):
    """The next degree extension would exceed the configured memory budget."""


def group_data_hash(group: FiniteGroup) -> str:
    payload = str(group.order).encode() + np.ascontiguousarray(group.mult).tobytes()
    return hashlib.sha256(payload).hexdigest()


@dataclass(eq=False)
class Cocycle:
    """A functional on the free generators of one resolution term."""

    degree: int
    coeffs: np.ndarray
    blocks: int

    def bit(self, i: int) -> int:
        return vector_get(self.coeffs, i)

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def support(self) -> list:
        return [i for i in range(self.blocks) if self.bit(i)]

    def key(self) -> tuple:
        return (self.degree, self.coeffs.tobytes())


def cocycle_from_bits(degree: int, bits, blocks: int) -> Cocycle:
    dense = np.zeros(blocks, dtype=np.uint8)
    for i in bits:
        dense[i] ^= 1
    return Cocycle(degree, pack_vector(dense), blocks)


@dataclass(eq=False)
class ChainMap:
    """Lift of a degree-n cocycle: components[m] maps term m+n to term m."""

    degree: int
    components: list


@dataclass(eq=False)
class FreeResolution:
    group: FiniteGroup
    name: str
    betti: list
    boundaries: list
    _solvers: dict = field(default_factory=dict, init=False, repr=False)
    _lifts: dict = field(default_factory=dict, init=False, repr=False)

    @property
    def top_degree(self) -> int:
        return len(self.betti) - 1

    def dim(self, n: int) -> int:
        return self.betti[n] * self.group.order

    def boundary(self, n: int) -> BitMatrix:
        if not 1 <= n <= self.top_degree:
            raise IndexError(f"no boundary at degree {n}")
        return self.boundaries[n]

    def solver(self, n: int) -> RREFSolver:
        if n not in self._solvers:
            self._solvers[n] = RREFSolver(self.boundary(n))
        return self._solvers[n]

    def generator_column(self, n: int, j: int) -> np.ndarray:
        """Boundary image of free generator j of term n, as a packed vector."""
        mat = self.boundary(n)
        col = j * self.group.order + self.group.identity
        return pack_vector(mat.column_bits(col))

    def dual_cocycle(self, n: int, i: int) -> Cocycle:
        return cocycle_from_bits(n, [i], self.betti[n])


# -- degree extension --------------------------------------------------------

def _generator_perms(group: FiniteGroup, blocks: int) -> list:
    """Per generator, the column gather that realizes its action on a term."""
    order = group.order
    perms = []
    for name in sorted(group.generators):
        gidx = group.generators[name]
        row = group.mult[group.inverse[gidx]]
        flat = (np.arange(blocks)[:, None] * order + row[None, :]).reshape(-1)
        perms.append(flat.astype(np.int64))
    return perms


def _slab_rows(dim: int) -> int:
    rows = max(64, min(4096, (32 << 20) // max(dim, 1)))
    return (rows // 64) * 64


def _write_columns(target: BitMatrix, col0: int, slab: np.ndarray) -> None:
    """Store the rows of a dense slab as columns col0.. of the target."""
    if col0 % 64:
        raise ValueError("column writes must be word aligned")
    packed = pack_rows(np.ascontiguousarray(slab.T))
    w0 = col0 // 64
    target.data[:, w0:w0 + packed.shape[1]] = packed


def _equivariant_columns(group: FiniteGroup, images, codomain_blocks: int,
                         elements=None) -> BitMatrix:
    """Matrix whose column (j, idx) is elements[idx] acting on images[j].

    The element list defaults to the whole group in index order, which is
    exactly how a boundary map is assembled from its generator images.
    """
    order = group.order
    elems = np.arange(order) if elements is None else np.asarray(elements, dtype=np.int64)
    per = int(elems.size)
    rows_dim = codomain_blocks * order
    if not len(images):
        return BitMatrix.zeros(rows_dim, 0)
    sub = group.mult[group.inverse][elems]
    if per % 64 == 0:
        out = BitMatrix.zeros(rows_dim, len(images) * per)
        wper = per // 64
        for j, w in enumerate(images):
            dense = unpack_vector(w, rows_dim).reshape(codomain_blocks, order)
            gathered = dense[:, sub]
            block = gathered.transpose(0, 2, 1).reshape(rows_dim, per)
            out.data[:, j * wper:(j + 1) * wper] = pack_rows(block)
        return out
    dense_out = np.zeros((rows_dim, len(images) * per), dtype=np.uint8)
    for j, w in enumerate(images):
        dense = unpack_vector(w, rows_dim).reshape(codomain_blocks, order)
        gathered = dense[:, sub]
        dense_out[:, j * per:(j + 1) * per] = gathered.transpose(0, 2, 1).reshape(rows_dim, per)
    return BitMatrix.from_dense(dense_out)


def _top_kernel(res: FreeResolution) -> BitMatrix:
    """Kernel of the top boundary; at degree zero, the augmentation ideal."""
    if res.top_degree == 0:
        aug = BitMatrix.from_dense(np.ones((1, res.group.order), dtype=np.uint8))
        return aug.kernel_basis()
    return res.boundary(res.top_degree).kernel_basis()


def _extend_one_degree(res: FreeResolution, budget_mb=None) -> None:
    group = res.group
    order = group.order
    n = res.top_degree
    blocks = res.betti[n]
    dim_p = blocks * order

    if budget_mb is not None:
        top = res.boundaries[n] if n else None
        kernel_guess = dim_p - (0 if top is None else min(top.rows, top.cols) // 2)
        kpad_guess = ((max(kernel_guess, 1) + 63) // 64) * 64
        ngens = len(group.generators)
        est = (dim_p * words_for((ngens + 1) * kpad_guess) * 8
               + 3 * dim_p * words_for(dim_p) // 4
               + 2 * _slab_rows(dim_p) * dim_p
               + (64 << 20))
        if est > budget_mb * (1 << 20):
            raise BudgetExceededError(
                f"extending past degree {n} needs about {est >> 20} MB, "
                f"budget is {budget_mb} MB; state is checkpointable")

    kernel = _top_kernel(res)
    k = kernel.rows
    kpad = ((k + 63) // 64) * 64 if k else 0
    perms = _generator_perms(group, blocks)
    ngens = len(perms)
    span = BitMatrix.zeros(dim_p, (ngens + 1) * kpad)
    chunk = _slab_rows(dim_p)
    for c0 in range(0, k, chunk):
        c1 = min(c0 + chunk, k)
        slab = unpack_rows(kernel.data[c0:c1], dim_p)
        for b, perm in enumerate(perms):
            _write_columns(span, b * kpad + c0, slab[:, perm] ^ slab)
        _write_columns(span, ngens * kpad + c0, slab)
    pivots = span.pivot_columns()
    lo = ngens * kpad
    selected = [p - lo for p in pivots if p >= lo]
    images = [kernel.row(i) for i in selected]
    res.betti.append(len(selected))
    res.boundaries.append(_equivariant_columns(group, images, blocks))


# -- construction, persistence, memoization ----------------------------------

def _fresh_resolution(group: FiniteGroup, name: str) -> FreeResolution:
    return FreeResolution(group=group, name=name, betti=[1], boundaries=[None])


def save_resolution(res: FreeResolution, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for n in range(1, res.top_degree + 1):
        path = out / f"boundary_{n:02d}.bin"
        if not path.exists():
            res.boundary(n).save(path)
    manifest = {
        "format": FORMAT_VERSION,
        "group": res.name,
        "order": res.group.order,
        "group_hash": group_data_hash(res.group),
        "top_degree": res.top_degree,
        "betti": list(res.betti),
        "boundary_files": [f"boundary_{n:02d}.bin" for n in range(1, res.top_degree + 1)],
    }
    (out / MANIFEST_NAME).write_text(json.dumps(manifest, indent=1) + "\n")


def load_resolution(out_dir, group: FiniteGroup) -> FreeResolution:
    out = Path(out_dir)
    manifest = json.loads((out / MANIFEST_NAME).read_text())
    if manifest.get("format") != FORMAT_VERSION:
        raise ResolutionError(f"unsupported resolution format {manifest.get('format')}")
    if manifest["group_hash"] != group_data_hash(group):
        raise ResolutionError(
            "persisted resolution was built from different group data; refusing to resume")
    res = FreeResolution(group=group, name=manifest["group"],
                         betti=list(manifest["betti"]), boundaries=[None])
    for fname in manifest["boundary_files"]:
        res.boundaries.append(BitMatrix.load(out / fname))
    for n in range(1, res.top_degree + 1):
        mat = res.boundaries[n]
        if mat.rows != res.dim(n - 1) or mat.cols != res.dim(n):
            raise ResolutionError(f"boundary {n} has shape {mat.rows}x{mat.cols}, "
                                  f"manifest promises {res.dim(n - 1)}x{res.dim(n)}")
    return res


def minimal_resolution(group: FiniteGroup, max_degree: int, out=None,
                       budget_mb=None, name: str | None = None) -> FreeResolution:
    """Minimal resolution of the trivial module to the requested degree.

    With ``out`` set, state persists after every degree and an existing
    directory is resumed instead of recomputed (the stored group hash must
    match).  A memory budget makes the extension stop with the current
    state intact rather than start a degree it cannot afford.
    """
    if max_degree < 0:
        raise ValueError("max_degree must be nonnegative")
    name = name or group.name or f"G{group.order}"
    res = None
    if out is not None and (Path(out) / MANIFEST_NAME).exists():
        res = load_resolution(out, group)
    if res is None:
        res = _fresh_resolution(group, name)
    if out is not None:
        save_resolution(res, out)
    while res.top_degree < max_degree:
        _extend_one_degree(res, budget_mb=budget_mb)
        if out is not None:
            save_resolution(res, out)
    return res


_RES_MEMO: dict = {}


def resolution_for(group: FiniteGroup, degree: int) -> FreeResolution:
    """Process-level memo so repeated queries share one resolution."""
    res = _RES_MEMO.get(id(group))
    if res is None or res.group is not group:
        res = _fresh_resolution(group, group.name or f"G{group.order}")
        _RES_MEMO[id(group)] = res
    while res.top_degree < degree:
        _extend_one_degree(res)
    return res


# -- verification ------------------------------------------------------------

def _block_parity_rows(blocks: int, order: int) -> BitMatrix:
    dense = np.zeros((blocks, blocks * order), dtype=np.uint8)
    for i in range(blocks):
        dense[i, i * order:(i + 1) * order] = 1
    return BitMatrix.from_dense(dense)


def verify_resolution(res: FreeResolution, products: bool = False,
                      ranks: bool = False) -> dict:
    """Exactness and minimality evidence for a computed resolution.

    Always checks that every generator image is a cycle (with equivariant
    assembly that forces the full composite to vanish) and that every
    boundary lands in the radical.  ``products`` additionally multiplies
    out the composites; ``ranks`` checks exactness by rank bookkeeping.
    Both extras cost real time at large scale.
    """
    group = res.group
    order = group.order
    report = {"group": res.name, "top_degree": res.top_degree,
              "betti": list(res.betti), "checks": []}
    ok = True
    for n in range(1, res.top_degree + 1):
        mat = res.boundary(n)
        entry = {"degree": n}
        parity = _block_parity_rows(res.betti[n - 1], order).multiply(mat)
        entry["image_in_radical"] = parity.is_zero()
        if n == 1:
            cycles = all(
                int(np.bitwise_count(res.generator_column(1, j)).sum()) % 2 == 0
                for j in range(res.betti[1]))
        else:
            prev = res.boundary(n - 1)
            cycles = all(
                not prev.matvec(res.generator_column(n, j)).any()
                for j in range(res.betti[n]))
        entry["generators_are_cycles"] = cycles
        if products and n >= 2:
            entry["composite_zero"] = res.boundary(n - 1).multiply(mat).is_zero()
        if ranks:
            rank = mat.rank()
            expect = (order - 1 if n == 1
                      else res.dim(n - 1) - res.boundary(n - 1).rank())
            entry["rank"] = rank
            entry["exact"] = rank == expect
        ok = ok and entry["image_in_radical"] and cycles
        ok = ok and entry.get("composite_zero", True) and entry.get("exact", True)
        report["checks"].append(entry)
    report["ok"] = ok
    return report


# -- cohomology with module coefficients -------------------------------------

def _hom_differential(res: FreeResolution, module, n: int) -> BitMatrix:
    """Matrix of composition with the next boundary on Hom(term, module)."""
    group = res.group
    order = group.order
    dx = module.dim
    b_n, b_next = res.betti[n], res.betti[n + 1]
    dense_mats = np.stack([m.to_dense() for m in module.element_matrices])
    out = np.zeros((b_next * dx, b_n * dx), dtype=np.uint8)
    for j in range(b_next):
        u = unpack_vector(res.generator_column(n + 1, j), res.dim(n)).reshape(b_n, order)
        for i in range(b_n):
            hits = np.nonzero(u[i])[0]
            if hits.size:
                block = dense_mats[hits].sum(axis=0) % 2
                out[j * dx:(j + 1) * dx, i * dx:(i + 1) * dx] = block
    return BitMatrix.from_dense(out) if out.size else BitMatrix.zeros(b_next * dx, b_n * dx)


def cohomology_dims(group: FiniteGroup, module, max_degree: int) -> list:
    """Dimensions of H^n(G, X) for n = 0..max_degree.

    The module must be a KGModule over the same group object.  With the
    trivial module this reproduces the Betti numbers.
    """
    if module.group is not group:
        raise ValueError("module is defined over a different group")
    res = resolution_for(group, max_degree + 1)
    deltas = [_hom_differential(res, module, n) for n in range(max_degree + 1)]
    small = all(d.rows * d.cols <= 1 << 22 for d in deltas)
    if small:
        for n in range(max_degree):
            comp = deltas[n + 1].multiply(deltas[n])
            if not comp.is_zero():
                raise ResolutionError(f"cochain differentials fail to compose to zero at {n}")
    ranks = [d.rank() for d in deltas]
    dims = []
    for n in range(max_degree + 1):
        below = ranks[n - 1] if n else 0
        dims.append(res.betti[n] * module.dim - ranks[n] - below)
    return dims


# -- chain maps, cup products, ring generators -------------------------------

def _xor_rows(mat: BitMatrix, selector_dense: np.ndarray) -> np.ndarray:
    """Packed row-vector times matrix: XOR of the selected rows."""
    sel = np.nonzero(selector_dense)[0]
    if sel.size == 0:
        return np.zeros(words_for(mat.cols), dtype="<u8")
    return np.bitwise_xor.reduce(mat.data[sel], axis=0)


def lift_cocycle(res: FreeResolution, c: Cocycle) -> ChainMap:
    """Chain map lifting a cocycle, cached on the resolution.

    Component m is assembled from one exact solve per free generator of
    term m + degree; the solver's fixed pivot rule keeps lifts
    deterministic.
    """
    key = c.key()
    if key in res._lifts:
        return res._lifts[key]
    group = res.group
    order = group.order
    n = c.degree
    if n > res.top_degree:
        raise ValueError("cocycle degree exceeds the resolution")
    identity = group.identity
    images = []
    for j in range(res.betti[n]):
        vec = np.zeros(order, dtype=np.uint8)
        if c.bit(j):
            vec[identity] = 1
        images.append(pack_vector(vec))
    components = [_equivariant_columns(group, images, 1)]
    for m in range(1, res.top_degree - n + 1):
        prev = components[m - 1]
        solver = res.solver(m)
        xs = []
        for j in range(res.betti[m + n]):
            rhs = prev.matvec(res.generator_column(m + n, j))
            x = solver.solve(rhs)
            if x is None:
                raise ResolutionError(
                    f"lift failed at component {m}: boundary image not in the image "
                    f"of the next boundary (resolution inconsistent)")
            xs.append(x)
        components.append(_equivariant_columns(group, xs, res.betti[m]))
    lift = ChainMap(n, components)
    res._lifts[key] = lift
    return lift


def cup_product(res: FreeResolution, c1: Cocycle, c2: Cocycle) -> Cocycle:
    """Class of the composition of the lift of c1 with the functional c2."""
    n1, n2 = c1.degree, c2.degree
    if n1 + n2 > res.top_degree:
        raise ValueError("product degree exceeds the resolution")
    if n2 == 0:
        scale = c2.bit(0)
        coeffs = c1.coeffs.copy() if scale else np.zeros_like(c1.coeffs)
        return Cocycle(n1, coeffs, c1.blocks)
    lift = lift_cocycle(res, c1)
    comp = lift.components[n2]
    order = res.group.order
    selector = np.repeat(unpack_vector(c2.coeffs, c2.blocks), order)
    row = _xor_rows(comp, selector)
    bits_all = unpack_vector(row, comp.cols)
    picks = bits_all[np.arange(res.betti[n1 + n2]) * order + res.group.identity]
    return Cocycle(n1 + n2, pack_vector(picks), res.betti[n1 + n2])


def generator_cocycles(group: FiniteGroup, max_degree: int) -> list:
    """Minimal ring generators of the cohomology, as cocycles, by degree.

    Degree d contributes the dual basis vectors outside the span of all
    products of a lower-degree generator with a positive-degree class.
    """
    res = resolution_for(group, max_degree)
    found: list = []
    for d in range(1, max_degree + 1):
        span = EchelonAccumulator(res.betti[d])
        for gen in found:
            a = gen.degree
            if d - a < 1:
                continue
            for i in range(res.betti[d - a]):
                prod = cup_product(res, gen, res.dual_cocycle(d - a, i))
                span.insert(prod.coeffs)
        for i in range(res.betti[d]):
            cand = res.dual_cocycle(d, i)
            if span.insert(cand.coeffs):
                found.append(cand)
    return found


def generator_degrees(group: FiniteGroup, max_degree: int) -> list:
    """Sorted degrees of the minimal cohomology ring generators."""
    return sorted(c.degree for c in generator_cocycles(group, max_degree))


# -- restriction to subgroups ------------------------------------------------

def restrict_class(group: FiniteGroup, sub: Subgroup, res_g: FreeResolution,
                   res_h: FreeResolution, c: Cocycle) -> Cocycle:
    """Restriction of a cohomology class to a subgroup.

    The big resolution restricts to a free resolution over the subgroup
    algebra (free basis: generators times coset representatives), and the
    identity lifts from the subgroup's own minimal resolution into it; the
    restricted class is the original functional composed with that lift.
    """
    hgrp, elems = subgroup_as_group(sub)
    if res_h.group.order != hgrp.order or not np.array_equal(
            np.asarray(res_h.group.mult), np.asarray(hgrp.mult)):
        raise ValueError("subgroup resolution does not match the subgroup")
    n = c.degree
    if n > res_g.top_degree or n > res_h.top_degree:
        raise ValueError("class degree exceeds a resolution")
    group_identity = group.identity
    base = np.zeros(group.order, dtype=np.uint8)
    base[group_identity] = 1
    images = [pack_vector(base)]
    if n == 0:
        return Cocycle(0, c.coeffs.copy(), res_h.betti[0])
    mu_full = _equivariant_columns(group, images, 1, elements=elems)
    for m in range(1, n + 1):
        solver = res_g.solver(m)
        xs = []
        for j in range(res_h.betti[m]):
            rhs = mu_full.matvec(res_h.generator_column(m, j))
            x = solver.solve(rhs)
            if x is None:
                raise ResolutionError(f"identity lift failed at degree {m}")
            xs.append(x)
        if m < n:
            mu_full = _equivariant_columns(group, xs, res_g.betti[m], elements=elems)
        else:
            blocks = res_g.betti[n]
            selector = np.repeat(unpack_vector(c.coeffs, blocks), group.order)
            packed_sel = pack_vector(selector)
            vals = np.zeros(res_h.betti[n], dtype=np.uint8)
            for j, x in enumerate(xs):
                vals[j] = int(np.bitwise_count(x & packed_sel).sum()) & 1
            return Cocycle(n, pack_vector(vals), res_h.betti[n])
    raise AssertionError("unreachable")
