"""Partitioning and block bookkeeping for matrix chains.

Also hosts the brute-force reference product (left-to-right repeated
multiplication of the unpartitioned matrices), which every coded path in
the package is tested against.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence, TextIO

from mvchain.errors import (
    ChainShapeMismatch,
    IndexOutOfRange,
    IndivisibleDimension,
    MissingBlock,
)
from mvchain.fp_field import FieldMatrix, PrimeField, mat_mul


@dataclass(frozen=True)
class PartitionScheme:
    """Split counts (p_0..p_m) for a chain with dimensions (r_0..r_m).

    Matrix i has shape r_i x r_{i+1} and is split into p_i x p_{i+1}
    blocks; p_i must divide r_i.
    """

    dims: tuple[int, ...]
    parts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "parts", tuple(int(p) for p in self.parts))
        if len(self.dims) != len(self.parts):
            raise ChainShapeMismatch("dims and parts must have equal length")
        if len(self.parts) < 3:
            raise ChainShapeMismatch("a chain needs at least two matrices")
        if any(d <= 0 for d in self.dims) or any(p <= 0 for p in self.parts):
            raise ValueError("dimensions and partition counts must be positive")
        for i, (d, p) in enumerate(zip(self.dims, self.parts)):
            if d % p:
                raise IndivisibleDimension(f"p_{i}={p} does not divide r_{i}={d}")

    @property
    def m(self) -> int:
        """Number of matrices in the chain."""
        return len(self.parts) - 1

    @property
    def partition_level(self) -> int:
        """K = prod(p_i): block chain products composing the result."""
        return math.prod(self.parts)

    def block_shape(self, i: int) -> tuple[int, int]:
        return self.dims[i] // self.parts[i], self.dims[i + 1] // self.parts[i + 1]

    def index_tuples(self) -> Iterator[tuple[int, ...]]:
        """All K index chains (n_0, ..., n_m), last index fastest."""
        return itertools.product(*(range(p) for p in self.parts))


class BlockChain:
    """The m input matrices of a chain, stored as grids of blocks."""

    __slots__ = ("scheme", "field", "blocks")

    def __init__(self, scheme: PartitionScheme, field: PrimeField, blocks):
        if len(blocks) != scheme.m:
            raise ChainShapeMismatch("one block grid per matrix required")
        for i, grid in enumerate(blocks):
            shape = scheme.block_shape(i)
            if len(grid) != scheme.parts[i] or any(
                len(row) != scheme.parts[i + 1] for row in grid
            ):
                raise ChainShapeMismatch(f"block grid {i} has wrong extents")
            for row in grid:
                for blk in row:
                    if blk.shape != shape or blk.field != field:
                        raise ChainShapeMismatch(f"block of matrix {i} has wrong shape")
        self.scheme = scheme
        self.field = field
        self.blocks = [[list(row) for row in grid] for grid in blocks]

    def block(self, i: int, bi: int, bj: int) -> FieldMatrix:
        s = self.scheme
        if not (0 <= i < s.m and 0 <= bi < s.parts[i] and 0 <= bj < s.parts[i + 1]):
            raise IndexOutOfRange((i, bi, bj))
        return self.blocks[i][bi][bj]


class ChainResult:
    """The p_0 x p_m grid of result blocks of a chain product."""

    __slots__ = ("scheme", "field", "blocks")

    def __init__(self, scheme: PartitionScheme, field: PrimeField, blocks):
        p0, pm = scheme.parts[0], scheme.parts[-1]
        if len(blocks) != p0 or any(len(row) != pm for row in blocks):
            raise ChainShapeMismatch(f"result grid must be {p0}x{pm}")
        self.scheme = scheme
        self.field = field
        self.blocks = [list(row) for row in blocks]


def partition(matrices: Sequence[FieldMatrix], parts: Sequence[int]) -> BlockChain:
    """Split each matrix of the chain into its grid of blocks."""
    if len(parts) != len(matrices) + 1:
        raise ChainShapeMismatch("need m+1 partition counts for m matrices")
    dims = [matrices[0].rows]
    for i, mtx in enumerate(matrices):
        if mtx.rows != dims[-1]:
            raise ChainShapeMismatch(
                f"matrix {i} has {mtx.rows} rows, expected {dims[-1]}"
            )
        dims.append(mtx.cols)
    field = matrices[0].field
    if any(mtx.field != field for mtx in matrices):
        raise ValueError("chain matrices must share one field")
    scheme = PartitionScheme(tuple(dims), tuple(parts))
    blocks = []
    for i, mtx in enumerate(matrices):
        br, bc = scheme.block_shape(i)
        grid = []
        for bi in range(scheme.parts[i]):
            row = []
            for bj in range(scheme.parts[i + 1]):
                sub = []
                for r in range(br):
                    base = (bi * br + r) * mtx.cols + bj * bc
                    sub.extend(mtx.data[base:base + bc])
                row.append(FieldMatrix(field, br, bc, sub))
            grid.append(row)
        blocks.append(grid)
    return BlockChain(scheme, field, blocks)


def reassemble(chain: BlockChain) -> list[FieldMatrix]:
    """Tile the block grids back into the original chain matrices."""
    out = []
    s = chain.scheme
    for i in range(s.m):
        br, bc = s.block_shape(i)
        rows, cols = s.dims[i], s.dims[i + 1]
        data = [0] * (rows * cols)
        for bi in range(s.parts[i]):
            for bj in range(s.parts[i + 1]):
                blk = chain.blocks[i][bi][bj]
                for r in range(br):
                    base = (bi * br + r) * cols + bj * bc
                    data[base:base + bc] = blk.data[r * bc:(r + 1) * bc]
        out.append(FieldMatrix(chain.field, rows, cols, data))
    return out


def block_chain_product(chain: BlockChain, indices: Sequence[int]) -> FieldMatrix:
    """Product of the m blocks selected by the index chain (n_0..n_m)."""
    s = chain.scheme
    if len(indices) != s.m + 1:
        raise IndexOutOfRange(f"expected {s.m + 1} indices, got {len(indices)}")
    for i, n in enumerate(indices):
        if not 0 <= n < s.parts[i]:
            raise IndexOutOfRange(f"index n_{i}={n} outside [0, {s.parts[i]})")
    acc = chain.blocks[0][indices[0]][indices[1]]
    for i in range(1, s.m):
        acc = mat_mul(acc, chain.blocks[i][indices[i]][indices[i + 1]])
    return acc


def oracle_chain_multiply(matrices: Sequence[FieldMatrix]) -> FieldMatrix:
    """Reference chain product: plain left-to-right multiplication."""
    if not matrices:
        raise ChainShapeMismatch("empty chain")
    acc = matrices[0]
    for i, mtx in enumerate(matrices[1:], start=1):
        if acc.cols != mtx.rows:
            raise ChainShapeMismatch(f"matrix {i} incompatible with running product")
        acc = mat_mul(acc, mtx)
    return acc


def chain_result_from_blocks(chain: BlockChain) -> ChainResult:
    """Brute-force result grid: sum block chain products over all middles."""
    s = chain.scheme
    p0, pm = s.parts[0], s.parts[-1]
    middles = list(itertools.product(*(range(p) for p in s.parts[1:-1])))
    grid = []
    for n0 in range(p0):
        row = []
        for nm in range(pm):
            acc = None
            for mid in middles:
                term = block_chain_product(chain, (n0, *mid, nm))
                acc = term if acc is None else acc + term
            row.append(acc)
        grid.append(row)
    return ChainResult(s, chain.field, grid)


def assemble_result(result: ChainResult) -> FieldMatrix:
    """Tile the r_0 x r_m product matrix from its result blocks."""
    s = result.scheme
    br = s.dims[0] // s.parts[0]
    bc = s.dims[-1] // s.parts[-1]
    rows, cols = s.dims[0], s.dims[-1]
    data = [0] * (rows * cols)
    for n0 in range(s.parts[0]):
        for nm in range(s.parts[-1]):
            blk = result.blocks[n0][nm]
            if blk is None:
                raise MissingBlock(f"result block ({n0}, {nm}) is missing")
            for r in range(br):
                base = (n0 * br + r) * cols + nm * bc
                data[base:base + bc] = blk.data[r * bc:(r + 1) * bc]
    return FieldMatrix(result.field, rows, cols, data)


def random_chain_matrices(
    field: PrimeField, scheme: PartitionScheme, rng
) -> list[FieldMatrix]:
    """Seeded random chain matrices matching the scheme's dimensions."""
    return [
        field.random_matrix(scheme.dims[i], scheme.dims[i + 1], rng)
        for i in range(scheme.m)
    ]


def write_matrix(f: TextIO, matrix: FieldMatrix) -> None:
    """Plain text format: a "rows cols" header, then row-major integers."""
    f.write(f"{matrix.rows} {matrix.cols}\n")
    c = matrix.cols
    for i in range(matrix.rows):
        f.write(" ".join(str(v) for v in matrix.data[i * c:(i + 1) * c]))
        f.write("\n")


def _tokens(f: TextIO) -> Iterator[str]:
    for line in f:
        yield from line.split()


def read_matrix(f: TextIO, field: PrimeField) -> FieldMatrix:
    """Read one matrix in the write_matrix format; values reduced mod q."""
    return read_matrix_tokens(_tokens(f), field)


def read_matrix_tokens(tokens: Iterator[str], field: PrimeField) -> FieldMatrix:
    try:
        rows = int(next(tokens))
        cols = int(next(tokens))
        data = [int(next(tokens)) for _ in range(rows * cols)]
    except StopIteration:
        raise ValueError("truncated matrix data") from None
    return FieldMatrix(field, rows, cols, data)
