"""Coded-block generation for the two multivariate schemes.

Scheme 1 encodes each input matrix in its own variable with exponent
p_{i+1}*b_i + b'_{i+1}; scheme 2 encodes each matrix bivariately with a
reversed exponent in the shared left variable so that matching block
indices align on a single monomial in the chain product.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence, TextIO

from mvchain import kernels
from mvchain.chain_core import (
    BlockChain,
    PartitionScheme,
    read_matrix_tokens,
    write_matrix,
)
from mvchain.errors import (
    ChainShapeMismatch,
    IndexOutOfRange,
    PointArityMismatch,
)
from mvchain.fp_field import FieldElement, FieldMatrix, PrimeField, mat_mul


class SchemeKind(Enum):
    MV1 = "mv1"
    MV2 = "mv2"

    def num_variables(self, m: int) -> int:
        """MV1 uses one variable per matrix; MV2 shares one per junction."""
        return m if self is SchemeKind.MV1 else m + 1


def product_degree_bounds(kind: SchemeKind, scheme: PartitionScheme) -> tuple[int, ...]:
    """Degree of the product polynomial in each variable."""
    p = scheme.parts
    if kind is SchemeKind.MV1:
        return tuple(p[i] * p[i + 1] - 1 for i in range(scheme.m))
    middle = tuple(2 * p[i] - 2 for i in range(1, scheme.m))
    return (p[0] - 1, *middle, p[-1] - 1)


@dataclass(frozen=True)
class EvalPoint:
    """One evaluation point: a coordinate per scheme variable."""

    coords: tuple[FieldElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))

    def __len__(self):
        return len(self.coords)

    def values(self) -> tuple[int, ...]:
        return tuple(c.value for c in self.coords)


@dataclass(frozen=True)
class CodedTask:
    """One subtask: an evaluation point plus the m coded blocks there."""

    kind: SchemeKind
    point: EvalPoint
    coded_blocks: tuple[FieldMatrix, ...]


def encode_mv1_block(chain: BlockChain, i: int, x: FieldElement) -> FieldMatrix:
    """Scheme-1 coded block of matrix i at x: sum M^(b,b') x^(p_{i+1} b + b')."""
    s = chain.scheme
    if not 0 <= i < s.m:
        raise IndexOutOfRange(f"matrix index {i} outside [0, {s.m})")
    pi, pj = s.parts[i], s.parts[i + 1]
    q = chain.field.modulus
    xv = x.value
    grid = chain.blocks[i]
    # Horner over descending exponent e = pj*b + b'.
    top = pi * pj - 1
    acc = list(grid[top // pj][top % pj].data)
    for e in range(top - 1, -1, -1):
        kernels.horner_step(acc, grid[e // pj][e % pj].data, xv, q)
    br, bc = s.block_shape(i)
    return FieldMatrix(chain.field, br, bc, acc)


def encode_mv2_block(
    chain: BlockChain, i: int, x: FieldElement, x_next: FieldElement
) -> FieldMatrix:
    """Scheme-2 coded block: sum M^(b,b') x^(p_i-1-b) x_next^(b')."""
    s = chain.scheme
    if not 0 <= i < s.m:
        raise IndexOutOfRange(f"matrix index {i} outside [0, {s.m})")
    pi, pj = s.parts[i], s.parts[i + 1]
    q = chain.field.modulus
    grid = chain.blocks[i]
    rows = []
    for b in range(pi):
        acc = list(grid[b][pj - 1].data)
        for bp in range(pj - 2, -1, -1):
            kernels.horner_step(acc, grid[b][bp].data, x_next.value, q)
        rows.append(acc)
    # Exponent of row b in x is p_i-1-b, so b = 0 carries the top power.
    acc = rows[0]
    for b in range(1, pi):
        kernels.horner_step(acc, rows[b], x.value, q)
    br, bc = s.block_shape(i)
    return FieldMatrix(chain.field, br, bc, acc)


def encode_task(chain: BlockChain, kind: SchemeKind, point: EvalPoint) -> CodedTask:
    """Generate the m coded blocks of one subtask at the given point."""
    m = chain.scheme.m
    expected = kind.num_variables(m)
    if len(point) != expected:
        raise PointArityMismatch(
            f"{kind.value} over m={m} needs {expected} coordinates, got {len(point)}"
        )
    if any(c.field != chain.field for c in point.coords):
        raise ValueError("point coordinates belong to a different field")
    if kind is SchemeKind.MV1:
        blocks = tuple(encode_mv1_block(chain, i, point.coords[i]) for i in range(m))
    else:
        blocks = tuple(
            encode_mv2_block(chain, i, point.coords[i], point.coords[i + 1])
            for i in range(m)
        )
    return CodedTask(kind, point, blocks)


def worker_compute(task: CodedTask) -> FieldMatrix:
    """Chain product of a task's coded blocks."""
    blocks = task.coded_blocks
    for a, b in zip(blocks, blocks[1:]):
        if a.cols != b.rows:
            raise ChainShapeMismatch("coded blocks are not chain compatible")
    acc = blocks[0]
    for blk in blocks[1:]:
        acc = mat_mul(acc, blk)
    return acc


def evaluate_on_grid(
    chain: BlockChain,
    kind: SchemeKind,
    axes: Sequence[Sequence[FieldElement]],
) -> dict[EvalPoint, FieldMatrix]:
    """Product-polynomial evaluations at every point of a Cartesian grid.

    Encodes each per-axis (or per-axis-pair) coded block once and reuses
    prefix products across the grid walk, the way a grid worker combines
    its stored coded blocks.  Identical results to running encode_task and
    worker_compute point by point.
    """
    m = chain.scheme.m
    if len(axes) != kind.num_variables(m):
        raise PointArityMismatch(
            f"{kind.value} over m={m} needs {kind.num_variables(m)} axes"
        )
    out: dict[EvalPoint, FieldMatrix] = {}
    if kind is SchemeKind.MV1:
        tables = [
            [encode_mv1_block(chain, i, x) for x in axes[i]] for i in range(m)
        ]

        def walk1(i: int, coords: tuple, acc):
            if i == m:
                out[EvalPoint(coords)] = acc
                return
            for a, x in enumerate(axes[i]):
                blk = tables[i][a]
                walk1(i + 1, coords + (x,), blk if acc is None else mat_mul(acc, blk))

        walk1(0, (), None)
    else:
        tables = [
            {
                (a, b): encode_mv2_block(chain, i, xa, xb)
                for a, xa in enumerate(axes[i])
                for b, xb in enumerate(axes[i + 1])
            }
            for i in range(m)
        ]

        def walk2(j: int, prev: int, coords: tuple, acc):
            if j == m + 1:
                out[EvalPoint(coords)] = acc
                return
            for a, x in enumerate(axes[j]):
                if j == 0:
                    walk2(1, a, (x,), None)
                else:
                    blk = tables[j - 1][(prev, a)]
                    walk2(
                        j + 1,
                        a,
                        coords + (x,),
                        blk if acc is None else mat_mul(acc, blk),
                    )

        walk2(0, -1, (), None)
    return out


def write_task(f: TextIO, task: CodedTask) -> None:
    """Serialize: "kind m" header, coordinate line, then m matrix payloads."""
    f.write(f"{task.kind.value} {len(task.coded_blocks)}\n")
    f.write(" ".join(str(v) for v in task.point.values()))
    f.write("\n")
    for blk in task.coded_blocks:
        write_matrix(f, blk)


def read_task(f: TextIO, field: PrimeField) -> CodedTask:
    """Read one coded task in the write_task format."""
    header = f.readline().split()
    if len(header) != 2:
        raise ValueError("malformed task header")
    kind = SchemeKind(header[0])
    m = int(header[1])
    coords = tuple(field.element(int(v)) for v in f.readline().split())
    if len(coords) != kind.num_variables(m):
        raise PointArityMismatch("coordinate count does not match header")
    tokens: Iterator[str] = iter(
        tok for line in f for tok in line.split()
    )
    blocks = tuple(read_matrix_tokens(tokens, field) for _ in range(m))
    return CodedTask(kind, EvalPoint(coords), blocks)


def grid_points(axes: Sequence[Sequence[FieldElement]]) -> Iterator[EvalPoint]:
    """Lexicographic walk of a Cartesian grid (last axis fastest)."""
    for combo in itertools.product(*axes):
        yield EvalPoint(tuple(combo))
