"""Dense bit-packed linear algebra over F2.

Matrices are stored row-major, 64 columns per uint64 word, bit j of word w
holding column 64*w + j.  All operations are exact; elimination uses a
fixed pivot rule (first nonzero column, lowest row index) so every result
is deterministic and reproducible bit-for-bit.
"""

from __future__ import annotations

import struct
from typing import Iterable, Optional, Sequence

import numpy as np

_ONE = np.uint64(1)


def words_for(cols: int) -> int:
    """Number of uint64 words needed for a row of the given width."""
    return (cols + 63) // 64


def pack_rows(dense) -> np.ndarray:
    """Pack a (rows, cols) 0/1 array into (rows, words_for(cols)) uint64."""
    dense = np.ascontiguousarray(dense, dtype=np.uint8) & 1
    rows, cols = dense.shape
    nwords = words_for(cols)
    pad = nwords * 64 - cols
    if pad:
        dense = np.pad(dense, ((0, 0), (0, pad)))
    packed = np.packbits(dense, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").reshape(rows, nwords)


def unpack_rows(packed: np.ndarray, cols: int) -> np.ndarray:
    """Inverse of pack_rows; returns a (rows, cols) uint8 array."""
    packed = np.ascontiguousarray(packed, dtype="<u8")
    rows = packed.shape[0]
    bits = np.unpackbits(packed.view("u1"), axis=1, bitorder="little")
    return bits[:, :cols].reshape(rows, cols)


def pack_vector(dense) -> np.ndarray:
    """Pack a length-n 0/1 vector into a packed uint64 vector."""
    return pack_rows(np.asarray(dense, dtype=np.uint8)[None, :])[0]


def unpack_vector(packed: np.ndarray, cols: int) -> np.ndarray:
    return unpack_rows(packed[None, :], cols)[0]


def vector_get(packed: np.ndarray, j: int) -> int:
    return int((packed[j >> 6] >> np.uint64(j & 63)) & _ONE)


def vector_set(packed: np.ndarray, j: int, value: int) -> None:
    mask = _ONE << np.uint64(j & 63)
    if value & 1:
        packed[j >> 6] |= mask
    else:
        packed[j >> 6] &= ~mask


def vector_weight(packed: np.ndarray) -> int:
    """Number of set bits."""
    return int(np.bitwise_count(packed).sum())


def vector_is_zero(packed: np.ndarray) -> bool:
    return not packed.any()


def first_set_bit(packed: np.ndarray) -> int:
    """Index of the lowest set bit, or -1 if the vector is zero."""
    nz = np.nonzero(packed)[0]
    if nz.size == 0:
        return -1
    w = int(nz[0])
    word = int(packed[w])
    return 64 * w + (word & -word).bit_length() - 1


class BitMatrix:
    """A rows x cols matrix over F2 with bit-packed rows.

    The packed array is private by convention: mutate only through the
    provided methods so the zero-padding invariant on the trailing bits of
    each row is preserved.
    """

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: Optional[np.ndarray] = None):
        self.rows = int(rows)
        self.cols = int(cols)
        nwords = words_for(self.cols)
        if data is None:
            data = np.zeros((self.rows, nwords), dtype="<u8")
        else:
            data = np.ascontiguousarray(data, dtype="<u8")
            if data.shape != (self.rows, nwords):
                raise ValueError(
                    f"data shape {data.shape} != ({self.rows}, {nwords})"
                )
        self.data = data

    # -- constructors ---------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        m = cls(n, n)
        for i in range(n):
            m.data[i, i >> 6] = _ONE << np.uint64(i & 63)
        return m

    @classmethod
    def from_dense(cls, dense) -> "BitMatrix":
        dense = np.atleast_2d(np.asarray(dense, dtype=np.uint8))
        rows, cols = dense.shape
        return cls(rows, cols, pack_rows(dense))

    @classmethod
    def from_packed_rows(cls, rows: Sequence[np.ndarray], cols: int) -> "BitMatrix":
        if not len(rows):
            return cls(0, cols)
        return cls(len(rows), cols, np.vstack(rows))

    @classmethod
    def vstack(cls, mats: Iterable["BitMatrix"]) -> "BitMatrix":
        mats = list(mats)
        cols = mats[0].cols
        if any(m.cols != cols for m in mats):
            raise ValueError("column mismatch in vstack")
        return cls(sum(m.rows for m in mats), cols, np.vstack([m.data for m in mats]))

    # -- element access -------------------------------------------------

    def get(self, i: int, j: int) -> int:
        return vector_get(self.data[i], j)

    def set(self, i: int, j: int, value: int) -> None:
        vector_set(self.data[i], j, value)

    def row(self, i: int) -> np.ndarray:
        return self.data[i].copy()

    def set_row(self, i: int, packed: np.ndarray) -> None:
        self.data[i] = packed

    def column_bits(self, j: int) -> np.ndarray:
        """The j-th column as a length-rows uint64 0/1 array."""
        w, sh = divmod(j, 64)
        return (self.data[:, w] >> np.uint64(sh)) & _ONE

    def to_dense(self) -> np.ndarray:
        return unpack_rows(self.data, self.cols)

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, self.data.copy())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and bool(np.array_equal(self.data, other.data))
        )

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"

    def is_zero(self) -> bool:
        return not self.data.any()

    # -- arithmetic -----------------------------------------------------

    def add(self, other: "BitMatrix") -> "BitMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return BitMatrix(self.rows, self.cols, self.data ^ other.data)

    def multiply(self, other: "BitMatrix") -> "BitMatrix":
        """Exact product over F2.

        Accumulates row j of ``other`` into every output row whose
        left-factor bit (i, j) is set; one vectorized XOR per inner index.
        """
        if self.cols != other.rows:
            raise ValueError(f"inner dimension mismatch: {self.cols} != {other.rows}")
        out = np.zeros((self.rows, words_for(other.cols)), dtype="<u8")
        for j in range(self.cols):
            sel = np.nonzero(self.column_bits(j))[0]
            if sel.size:
                out[sel] ^= other.data[j]
        return BitMatrix(self.rows, other.cols, out)

    def matvec(self, packed_vec: np.ndarray) -> np.ndarray:
        """Product with a packed column vector; returns a packed vector."""
        if packed_vec.shape != (words_for(self.cols),):
            raise ValueError("vector length mismatch")
        parities = np.bitwise_count(self.data & packed_vec[None, :]).sum(axis=1) & 1
        return pack_vector(parities.astype(np.uint8))

    def matvec_bits(self, packed_vec: np.ndarray) -> np.ndarray:
        """Like matvec but returns the unpacked 0/1 result of length rows."""
        parities = np.bitwise_count(self.data & packed_vec[None, :]).sum(axis=1) & 1
        return parities.astype(np.uint8)

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)

    # -- elimination ----------------------------------------------------

    def _eliminate(self, full: bool, aug: Optional[np.ndarray]) -> list:
        """In-place Gaussian elimination on self.data.

        full=True produces reduced row echelon form (eliminating above and
        below each pivot); full=False only clears below, which is enough
        for rank.  Returns the pivot column list; pivot i sits in row i.
        """
        data = self.data
        rows = self.rows
        pivots = []
        r = 0
        for c in range(self.cols):
            if r == rows:
                break
            w, sh = divmod(c, 64)
            shift = np.uint64(sh)
            colbits = (data[:, w] >> shift) & _ONE
            if full:
                candidates = np.nonzero(colbits[r:])[0]
            else:
                colbits[:r] = 0
                candidates = np.nonzero(colbits)[0]
            if candidates.size == 0:
                continue
            p = r + int(candidates[0]) if full else int(candidates[0])
            if p != r:
                data[[r, p]] = data[[p, r]]
                if aug is not None:
                    aug[[r, p]] = aug[[p, r]]
                colbits[[r, p]] = colbits[[p, r]]
            if full:
                sel = np.nonzero(colbits)[0]
                sel = sel[sel != r]
            else:
                sel = np.nonzero(colbits[r + 1 :])[0] + r + 1
            if sel.size:
                # Rows at or past the pivot boundary are zero before column
                # c, and so is the pivot row, so XOR only from word w on.
                data[sel, w:] ^= data[r, w:]
                if aug is not None:
                    aug[sel] ^= aug[r]
            pivots.append(c)
            r += 1
        return pivots

    def rank(self) -> int:
        work = self.copy()
        return len(work._eliminate(full=False, aug=None))

    def pivot_columns(self) -> list:
        """Pivot column indices from forward elimination, without the RREF.

        A column is a pivot exactly when it is independent of the columns
        to its left, so this doubles as a greedy independent-subset scan
        over an ordered list of vectors stored as columns.  Destroys the
        matrix content; callers keep their own copy if they still need it.
        """
        return self._eliminate(full=False, aug=None)

    def rref(self) -> tuple["BitMatrix", list]:
        """Reduced row echelon form and the pivot column list."""
        work = self.copy()
        pivots = work._eliminate(full=True, aug=None)
        return work, pivots

    def rref_augmented(self) -> tuple["BitMatrix", "BitMatrix", list]:
        """RREF together with the row transform E satisfying E*self = R."""
        work = self.copy()
        eye = BitMatrix.identity(self.rows)
        pivots = work._eliminate(full=True, aug=eye.data)
        return work, eye, pivots

    def kernel_basis(self) -> "BitMatrix":
        """Rows form a deterministic basis of the right null space."""
        R, pivots = self.rref()
        return kernel_from_rref(R, pivots)

    def solve(self, rhs) -> Optional[np.ndarray]:
        """One solution of self * x = rhs (packed), or None if inconsistent.

        For repeated solves against the same matrix build an RREFSolver
        once instead.
        """
        return RREFSolver(self).solve(np.asarray(rhs))

    # -- serialization --------------------------------------------------

    def to_bytes(self) -> bytes:
        return struct.pack("<QQ", self.rows, self.cols) + self.data.tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "BitMatrix":
        rows, cols = struct.unpack_from("<QQ", blob)
        body = np.frombuffer(blob, dtype="<u8", offset=16)
        return cls(rows, cols, body.reshape(rows, words_for(cols)).copy())

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "BitMatrix":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


def kernel_from_rref(R: BitMatrix, pivots: list) -> BitMatrix:
    """Kernel basis given a reduced row echelon form and its pivots.

    One basis vector per free column f: a 1 in position f plus, for each
    pivot column p_i, the entry R[i, f] in position p_i.
    """
    cols = R.cols
    rank = len(pivots)
    free = sorted(set(range(cols)) - set(pivots))
    nfree = len(free)
    if nfree == 0:
        return BitMatrix.zeros(0, cols)
    dense = np.zeros((nfree, cols), dtype=np.uint8)
    dense[np.arange(nfree), free] = 1
    if rank:
        # T[j, i] = R[i, free[j]], extracted in row chunks to bound memory.
        T = np.empty((rank, nfree), dtype=np.uint8)
        free_arr = np.asarray(free)
        chunk = 2048
        for lo in range(0, rank, chunk):
            hi = min(lo + chunk, rank)
            T[lo:hi] = unpack_rows(R.data[lo:hi], cols)[:, free_arr]
        dense[:, np.asarray(pivots)] = T.T
    return BitMatrix(nfree, cols, pack_rows(dense))


class RREFSolver:
    """Factorization of a BitMatrix for repeated exact solves.

    Stores the RREF R, the row transform E (E*m = R) and the pivots; each
    solve is then one bit-sliced matrix-vector product plus a scatter.
    """

    def __init__(self, m: BitMatrix):
        self.rows = m.rows
        self.cols = m.cols
        self.R, self.E, self.pivots = m.rref_augmented()
        self.rank = len(self.pivots)
        self._pivot_arr = np.asarray(self.pivots, dtype=np.int64)

    def solve(self, rhs: np.ndarray) -> Optional[np.ndarray]:
        """Solution with all free variables zero, or None if inconsistent."""
        y = self.E.matvec_bits(rhs)
        if y[self.rank :].any():
            return None
        x = np.zeros(self.cols, dtype=np.uint8)
        if self.rank:
            x[self._pivot_arr] = y[: self.rank]
        return pack_vector(x)

    def solve_many(self, rhs_rows: np.ndarray, n_vectors: int) -> Optional[np.ndarray]:
        """Solve against many packed right-hand sides (given as rows).

        Returns packed solution rows, or None if any system is
        inconsistent.
        """
        out = []
        for i in range(n_vectors):
            x = self.solve(rhs_rows[i])
            if x is None:
                return None
            out.append(x)
        return np.vstack(out) if out else np.zeros((0, words_for(self.cols)), "<u8")


class EchelonAccumulator:
    """Incremental row-echelon span tracker over packed vectors.

    Rows are reduced against the current pivots on insertion; a vector
    that survives is stored with its leading bit as a new pivot.  Used for
    rank-growing scans (minimal generator selection, product spans).
    """

    def __init__(self, cols: int):
        self.cols = cols
        self.pivot_rows: dict[int, np.ndarray] = {}

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    def reduce(self, packed: np.ndarray) -> np.ndarray:
        v = packed.copy()
        while True:
            lead = first_set_bit(v)
            if lead < 0 or lead not in self.pivot_rows:
                return v
            v ^= self.pivot_rows[lead]

    def insert(self, packed: np.ndarray) -> bool:
        """Add a vector to the span; True if it increased the rank."""
        v = self.reduce(packed)
        lead = first_set_bit(v)
        if lead < 0:
            return False
        self.pivot_rows[lead] = v
        return True

    def contains(self, packed: np.ndarray) -> bool:
        return first_set_bit(self.reduce(packed)) < 0
