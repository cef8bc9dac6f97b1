"""Tests for the bit-packed F2 linear algebra substrate.

The reference oracle throughout is unpacked schoolbook arithmetic on
uint8 arrays; the packed implementation must agree bit for bit.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coho.f2linalg import (
    BitMatrix,
    EchelonAccumulator,
    RREFSolver,
    first_set_bit,
    pack_vector,
    unpack_vector,
    vector_weight,
    words_for,
)


def naive_rank(dense):
    """Single-bit-per-entry Gaussian elimination."""
    d = (np.array(dense, dtype=np.uint8) & 1).copy()
    rows, cols = d.shape
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if d[i, c]), None)
        if pivot is None:
            continue
        d[[r, pivot]] = d[[pivot, r]]
        for i in range(rows):
            if i != r and d[i, c]:
                d[i] ^= d[r]
        r += 1
    return r


def naive_product(a, b):
    return (np.array(a, dtype=np.int64) @ np.array(b, dtype=np.int64)) % 2


def random_dense(rng, rows, cols):
    return rng.integers(0, 2, (rows, cols), dtype=np.uint8)


dims = st.integers(min_value=1, max_value=90)


@st.composite
def bit_matrices(draw, rows=None, cols=None):
    r = rows if rows is not None else draw(dims)
    c = cols if cols is not None else draw(dims)
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    rng = np.random.default_rng(seed)
    return BitMatrix.from_dense(random_dense(rng, r, c))


class TestRank:
    def test_identity(self):
        assert BitMatrix.identity(5).rank() == 5

    def test_zero(self):
        assert BitMatrix.zeros(3, 7).rank() == 0

    def test_against_schoolbook_oracle(self):
        rng = np.random.default_rng(40)
        d = random_dense(rng, 40, 60)
        assert BitMatrix.from_dense(d).rank() == naive_rank(d)

    @given(bit_matrices())
    @settings(max_examples=60, deadline=None)
    def test_matches_oracle(self, m):
        assert m.rank() == naive_rank(m.to_dense())

    @given(bit_matrices())
    @settings(max_examples=40, deadline=None)
    def test_transpose_invariant(self, m):
        assert m.rank() == m.transpose().rank()

    def test_input_not_modified(self):
        m = BitMatrix.from_dense([[1, 1], [1, 0], [0, 1]])
        before = m.data.copy()
        m.rank()
        m.rref()
        m.kernel_basis()
        assert np.array_equal(m.data, before)


class TestKernel:
    def test_forced_one_dimensional(self):
        k = BitMatrix.from_dense([[1, 1]]).kernel_basis()
        assert k.rows == 1
        assert k.to_dense().tolist() == [[1, 1]]

    def test_identity_has_trivial_kernel(self):
        assert BitMatrix.identity(4).kernel_basis().rows == 0

    def test_rank_nullity_and_annihilation(self):
        rng = np.random.default_rng(3)
        m = BitMatrix.from_dense(random_dense(rng, 30, 50))
        k = m.kernel_basis()
        assert k.rows + m.rank() == 50
        assert m.multiply(k.transpose()).is_zero()

    @given(bit_matrices())
    @settings(max_examples=50, deadline=None)
    def test_rank_nullity(self, m):
        k = m.kernel_basis()
        assert k.rows + m.rank() == m.cols
        assert m.multiply(k.transpose()).is_zero()
        # kernel rows are independent
        assert k.rows == 0 or k.rank() == k.rows

    def test_deterministic(self):
        rng = np.random.default_rng(9)
        d = random_dense(rng, 25, 40)
        k1 = BitMatrix.from_dense(d).kernel_basis()
        k2 = BitMatrix.from_dense(d).kernel_basis()
        assert k1 == k2


class TestSolve:
    def test_identity_returns_rhs(self):
        m = BitMatrix.identity(6)
        rhs = pack_vector([1, 0, 1, 1, 0, 0])
        assert np.array_equal(m.solve(rhs), rhs)

    def test_underdetermined(self):
        m = BitMatrix.from_dense([[1, 1]])
        x = m.solve(pack_vector([1]))
        assert vector_weight(x) % 2 == 1

    def test_inconsistent_detected(self):
        m = BitMatrix.from_dense([[1, 1], [1, 1]])
        assert m.solve(pack_vector([1, 0])) is None

    @given(bit_matrices(), st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_construct_then_solve(self, m, seed):
        rng = np.random.default_rng(seed)
        x0 = pack_vector(rng.integers(0, 2, m.cols, dtype=np.uint8))
        rhs = m.matvec(x0)
        x = m.solve(rhs)
        assert x is not None
        assert np.array_equal(m.matvec(x), rhs)

    def test_solver_reuse(self):
        rng = np.random.default_rng(11)
        m = BitMatrix.from_dense(random_dense(rng, 20, 35))
        solver = RREFSolver(m)
        for _ in range(5):
            x0 = pack_vector(rng.integers(0, 2, 35, dtype=np.uint8))
            rhs = m.matvec(x0)
            assert np.array_equal(m.matvec(solver.solve(rhs)), rhs)


class TestMultiply:
    def test_identity_right(self):
        rng = np.random.default_rng(1)
        a = BitMatrix.from_dense(random_dense(rng, 7, 9))
        assert a.multiply(BitMatrix.identity(9)) == a

    def test_permutation_composition(self):
        rng = np.random.default_rng(2)
        p = rng.permutation(8)
        q = rng.permutation(8)
        e = np.eye(8, dtype=np.uint8)
        comp = BitMatrix.from_dense(e[p]).multiply(BitMatrix.from_dense(e[q]))
        assert np.array_equal(comp.to_dense(), (e[p] @ e[q]) % 2)

    def test_schoolbook_20x20(self):
        rng = np.random.default_rng(20)
        a = random_dense(rng, 20, 20)
        b = random_dense(rng, 20, 20)
        got = BitMatrix.from_dense(a).multiply(BitMatrix.from_dense(b))
        assert np.array_equal(got.to_dense(), naive_product(a, b))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            BitMatrix.zeros(2, 3).multiply(BitMatrix.zeros(4, 2))

    @given(st.integers(0, 2**32 - 1), dims, dims, dims, dims)
    @settings(max_examples=30, deadline=None)
    def test_associative(self, seed, n1, n2, n3, n4):
        rng = np.random.default_rng(seed)
        a = BitMatrix.from_dense(random_dense(rng, n1, n2))
        b = BitMatrix.from_dense(random_dense(rng, n2, n3))
        c = BitMatrix.from_dense(random_dense(rng, n3, n4))
        assert a.multiply(b).multiply(c) == a.multiply(b.multiply(c))


class TestSerialization:
    @given(bit_matrices())
    @settings(max_examples=40, deadline=None)
    def test_round_trip(self, m):
        assert BitMatrix.from_bytes(m.to_bytes()) == m

    def test_header_layout(self):
        m = BitMatrix.from_dense([[1, 0, 1]])
        blob = m.to_bytes()
        assert blob[:8] == (1).to_bytes(8, "little")
        assert blob[8:16] == (3).to_bytes(8, "little")
        assert len(blob) == 16 + 8 * words_for(3)

    def test_file_round_trip(self, tmp_path):
        rng = np.random.default_rng(7)
        m = BitMatrix.from_dense(random_dense(rng, 13, 70))
        path = tmp_path / "m.bin"
        m.save(path)
        assert BitMatrix.load(path) == m


class TestPackedVectors:
    @given(st.lists(st.integers(0, 1), min_size=1, max_size=200))
    @settings(max_examples=50, deadline=None)
    def test_pack_round_trip(self, bits):
        v = pack_vector(bits)
        assert unpack_vector(v, len(bits)).tolist() == bits

    def test_first_set_bit(self):
        assert first_set_bit(pack_vector([0] * 70 + [1, 0])) == 70
        assert first_set_bit(pack_vector([0, 0, 0])) == -1

    def test_padding_bits_stay_zero(self):
        m = BitMatrix.from_dense(np.ones((4, 3), dtype=np.uint8))
        r, _ = m.rref()
        assert not (r.data >> np.uint64(3)).any()


class TestEchelonAccumulator:
    @given(bit_matrices())
    @settings(max_examples=40, deadline=None)
    def test_counts_rank(self, m):
        acc = EchelonAccumulator(m.cols)
        added = sum(acc.insert(m.row(i)) for i in range(m.rows))
        assert added == acc.rank == m.rank()

    def test_contains(self):
        acc = EchelonAccumulator(3)
        acc.insert(pack_vector([1, 1, 0]))
        acc.insert(pack_vector([0, 1, 1]))
        assert acc.contains(pack_vector([1, 0, 1]))
        assert not acc.contains(pack_vector([1, 0, 0]))
