"""Dense matrices over GF(2) with rows packed into Python integers.

Bit ``j`` of ``rows[i]`` holds entry ``(i, j)``. Python integers give word-level
XOR of arbitrary width, so elimination cost scales with ``rows * cols / 64``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class BitMatrix:
    """Immutable ``nrows x ncols`` binary matrix.

    Parameters
    ----------
    nrows, ncols : int
        Shape of the matrix. Either may be zero.
    rows : tuple of int
        Packed rows; bit ``j`` of ``rows[i]`` is entry ``(i, j)``.
    """

    nrows: int
    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.nrows < 0 or self.ncols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        if len(self.rows) != self.nrows:
            raise ValueError(f"expected {self.nrows} rows, got {len(self.rows)}")
        limit = 1 << self.ncols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError("row has bits outside the column range")

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls(nrows, ncols, (0,) * nrows)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_array(cls, a) -> "BitMatrix":
        arr = np.asarray(a, dtype=np.int64)
        if arr.ndim != 2:
            raise ValueError("expected a 2-D array")
        if np.any((arr != 0) & (arr != 1)):
            raise ValueError("entries must be 0 or 1")
        nrows, ncols = arr.shape
        rows = tuple(
            sum(1 << j for j in np.flatnonzero(arr[i])) for i in range(nrows)
        )
        return cls(nrows, ncols, rows)

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.ncols), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            j = 0
            while r:
                if r & 1:
                    out[i, j] = 1
                r >>= 1
                j += 1
        return out

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(ij)
        return (self.rows[i] >> j) & 1

    def apply(self, x: int) -> int:
        """Multiply by a column vector packed as an integer (bit j = entry j)."""
        y = 0
        for i, r in enumerate(self.rows):
            if bin(r & x).count("1") & 1:
                y |= 1 << i
        return y

    def columns(self) -> list[int]:
        """Packed columns; bit ``i`` of ``columns()[j]`` is entry ``(i, j)``."""
        cols = [0] * self.ncols
        for i, r in enumerate(self.rows):
            j = 0
            while r:
                if r & 1:
                    cols[j] |= 1 << i
                r >>= 1
                j += 1
        return cols

    def transpose(self) -> "BitMatrix":
        return BitMatrix(self.ncols, self.nrows, tuple(self.columns()))

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        return multiply(self, other)

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return BitMatrix(
            self.nrows, self.ncols, tuple(a ^ b for a, b in zip(self.rows, other.rows))
        )


def shift_matrix(q: int, n: int) -> BitMatrix:
    """Down-shift matrix ``S^(q-n)`` of size ``q x q``.

    Applied to a length-``q`` vector it keeps the top ``n`` entries and moves
    them to the bottom ``n`` positions.
    """
    if q < 0 or n < 0:
        raise ValueError("q and n must be non-negative")
    if n > q:
        raise ValueError(f"gain n={n} exceeds dimension q={q}")
    s = q - n
    # row i picks column i - s
    rows = tuple((1 << (i - s)) if i >= s else 0 for i in range(q))
    return BitMatrix(q, q, rows)


def rank(m: BitMatrix) -> int:
    """Rank over GF(2) by Gaussian elimination on packed rows."""
    pivots: dict[int, int] = {}  # lowest set bit -> reduced row
    r = 0
    for row in m.rows:
        while row:
            low = row & -row
            p = pivots.get(low)
            if p is None:
                pivots[low] = row
                r += 1
                break
            row ^= p
    return r


def multiply(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.ncols != b.nrows:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    out = []
    for r in a.rows:
        acc = 0
        j = 0
        while r:
            if r & 1:
                acc ^= b.rows[j]
            r >>= 1
            j += 1
        out.append(acc)
    return BitMatrix(a.nrows, b.ncols, tuple(out))


def block_diag(blocks: Iterable[BitMatrix]) -> BitMatrix:
    rows: list[int] = []
    offset = 0
    for blk in blocks:
        rows.extend(r << offset for r in blk.rows)
        offset += blk.ncols
    return BitMatrix(len(rows), offset, tuple(rows))


def block_matrix(grid: Sequence[Sequence[BitMatrix | None]], row_sizes, col_sizes) -> BitMatrix:
    """Assemble a matrix from a grid of blocks; ``None`` is a zero block."""
    col_offsets = np.concatenate([[0], np.cumsum(col_sizes)]).astype(int)
    rows: list[int] = []
    for bi, block_row in enumerate(grid):
        h = row_sizes[bi]
        acc = [0] * h
        for bj, blk in enumerate(block_row):
            if blk is None:
                continue
            if blk.shape != (h, col_sizes[bj]):
                raise ValueError(f"block ({bi},{bj}) has shape {blk.shape}")
            off = int(col_offsets[bj])
            for i, r in enumerate(blk.rows):
                acc[i] |= r << off
        rows.extend(acc)
    return BitMatrix(len(rows), int(col_offsets[-1]), tuple(rows))


def random_matrix(nrows: int, ncols: int, rng: np.random.Generator) -> BitMatrix:
    """Uniformly random binary matrix."""
    bits = rng.integers(0, 2, size=(nrows, ncols), dtype=np.uint8)
    packed = np.packbits(bits, axis=1, bitorder="little")
    rows = tuple(int.from_bytes(r.tobytes(), "little") for r in packed)
    return BitMatrix(nrows, ncols, rows)
