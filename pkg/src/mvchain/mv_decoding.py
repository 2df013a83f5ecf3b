"""Recovery of the chain product from worker evaluations.

Two decode paths: tensor-grid interpolation (per-axis Vandermonde sweeps
over a full Cartesian grid) followed by per-scheme coefficient
extraction, and a rank-checked generic decoder for arbitrary point sets
that fails loudly when the system is singular.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from mvchain import kernels
from mvchain.chain_core import ChainResult, PartitionScheme
from mvchain.errors import (
    DegreeMismatch,
    DuplicatePoint,
    MissingEvaluation,
    ShapeMismatch,
    SingularSystem,
)
from mvchain.fp_field import FieldElement, FieldMatrix, PrimeField
from mvchain.mv_encoding import EvalPoint, SchemeKind, grid_points, product_degree_bounds


@dataclass(frozen=True)
class EvaluationGrid:
    """Cartesian product of per-variable coordinate sets."""

    axes: tuple[tuple[FieldElement, ...], ...]
    kind: SchemeKind

    def __post_init__(self):
        axes = tuple(tuple(a) for a in self.axes)
        object.__setattr__(self, "axes", axes)
        if not axes:
            raise ValueError("grid needs at least one axis")
        field = axes[0][0].field
        q = field.modulus
        for i, axis in enumerate(axes):
            if not axis:
                raise ValueError(f"axis {i} is empty")
            if any(c.field != field for c in axis):
                raise ValueError("grid axes must share one field")
            if len(axis) > q:
                raise ValueError(f"axis {i} larger than the field")
            if len({c.value for c in axis}) != len(axis):
                raise DuplicatePoint(f"axis {i} repeats a coordinate")

    @property
    def field(self) -> PrimeField:
        return self.axes[0][0].field

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.axes)

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    def points(self):
        return grid_points(self.axes)


class CoefficientTensor:
    """Dense coefficient matrices of the product polynomial.

    One block per exponent tuple; exponent e_i ranges over
    [0, bounds[i]].  Blocks are stored back to back in one flat list in
    lexicographic exponent order (last variable fastest).
    """

    __slots__ = ("field", "bounds", "block_rows", "block_cols", "data")

    def __init__(self, field, bounds, block_rows, block_cols, data):
        self.field = field
        self.bounds = tuple(bounds)
        self.block_rows = block_rows
        self.block_cols = block_cols
        self.data = data
        expected = math.prod(b + 1 for b in self.bounds) * block_rows * block_cols
        if len(data) != expected:
            raise ShapeMismatch(f"expected {expected} entries, got {len(data)}")

    @property
    def block_width(self) -> int:
        return self.block_rows * self.block_cols

    def _offset(self, exponents: Sequence[int]) -> int:
        if len(exponents) != len(self.bounds):
            raise DegreeMismatch("wrong number of exponents")
        idx = 0
        for e, b in zip(exponents, self.bounds):
            if not 0 <= e <= b:
                raise DegreeMismatch(f"exponent {e} outside [0, {b}]")
            idx = idx * (b + 1) + e
        return idx * self.block_width

    def coefficient(self, exponents: Sequence[int]) -> FieldMatrix:
        off = self._offset(exponents)
        return FieldMatrix(
            self.field,
            self.block_rows,
            self.block_cols,
            self.data[off:off + self.block_width],
        )


def interpolate_grid(
    grid: EvaluationGrid, evaluations: Mapping[EvalPoint, FieldMatrix]
) -> CoefficientTensor:
    """Tensor-product interpolation over a full Cartesian grid.

    Runs one 1-D Vandermonde solve sweep per axis; the result is the
    unique coefficient tensor with per-variable degree |axis|-1 matching
    every supplied evaluation.
    """
    field = grid.field
    q = field.modulus
    sizes = grid.shape
    first = None
    data: list[int] = []
    for pt in grid.points():
        try:
            mtx = evaluations[pt]
        except KeyError:
            raise MissingEvaluation(f"no evaluation for point {pt.values()}") from None
        if first is None:
            first = mtx
        elif mtx.shape != first.shape or mtx.field != first.field:
            raise ShapeMismatch("evaluations must share one shape and field")
        data.extend(mtx.data)
    width = first.rows * first.cols
    for a, axis in enumerate(grid.axes):
        n = sizes[a]
        if n == 1:
            continue
        pts = [c.value for c in axis]
        chunk = math.prod(sizes[a + 1:]) * width
        outer = math.prod(sizes[:a])
        for o in range(outer):
            kernels.vandermonde_solve_inplace(pts, data, n, chunk, o * n * chunk, q)
    bounds = tuple(s - 1 for s in sizes)
    return CoefficientTensor(field, bounds, first.rows, first.cols, data)


def extract_mv1(tensor: CoefficientTensor, scheme: PartitionScheme) -> ChainResult:
    """Scheme-1 extraction: sum coefficients over all middle index chains.

    The block chain product for indices (n_0..n_m) sits at the exponent
    tuple (p_{i+1} n_i + n_{i+1})_i; result block (n_0, n_m) is the sum
    over the middle indices.
    """
    expected = product_degree_bounds(SchemeKind.MV1, scheme)
    if tensor.bounds != expected:
        raise DegreeMismatch(f"tensor bounds {tensor.bounds} != MV1 bounds {expected}")
    p = scheme.parts
    m = scheme.m
    w = tensor.block_width
    q = tensor.field.modulus
    grid = []
    for n0 in range(p[0]):
        row = []
        for nm in range(p[-1]):
            acc = [0] * w
            for mid in itertools.product(*(range(p[i]) for i in range(1, m))):
                idx = (n0, *mid, nm)
                exps = tuple(p[i + 1] * idx[i] + idx[i + 1] for i in range(m))
                off = tensor._offset(exps)
                kernels.add_scaled(acc, tensor.data[off:off + w], 1, q)
            row.append(
                FieldMatrix(tensor.field, tensor.block_rows, tensor.block_cols, acc)
            )
        grid.append(row)
    return ChainResult(scheme, tensor.field, grid)


def extract_mv2(tensor: CoefficientTensor, scheme: PartitionScheme) -> ChainResult:
    """Scheme-2 extraction: read each result block off a single monomial.

    Block (n_0, n_m) is the coefficient of
    x_0^(p_0-1-n_0) * prod_i x_i^(p_i-1) * x_m^(n_m); the exponent
    alignment already performs the sum over middle indices.
    """
    expected = product_degree_bounds(SchemeKind.MV2, scheme)
    if tensor.bounds != expected:
        raise DegreeMismatch(f"tensor bounds {tensor.bounds} != MV2 bounds {expected}")
    p = scheme.parts
    m = scheme.m
    middle = tuple(p[i] - 1 for i in range(1, m))
    grid = []
    for n0 in range(p[0]):
        row = []
        for nm in range(p[-1]):
            exps = (p[0] - 1 - n0, *middle, nm)
            row.append(tensor.coefficient(exps))
        grid.append(row)
    return ChainResult(scheme, tensor.field, grid)


def monomial_support(kind: SchemeKind, scheme: PartitionScheme) -> list[tuple[int, ...]]:
    """All exponent tuples of the product polynomial, in tensor order.

    Both schemes fill the full degree box, so the support size equals the
    scheme's recovery threshold.
    """
    bounds = product_degree_bounds(kind, scheme)
    return list(itertools.product(*(range(b + 1) for b in bounds)))


def evaluation_row(point: EvalPoint, bounds: Sequence[int], q: int) -> list[int]:
    """Monomial evaluations at one point, in tensor (support) order."""
    row = [1]
    for coord, b in zip(point.coords, bounds):
        x = coord.value
        powers = [1] * (b + 1)
        for e in range(1, b + 1):
            powers[e] = powers[e - 1] * x % q
        row = [r * pw % q for r in row for pw in powers]
    return row


class IncrementalEliminator:
    """Row-reduced basis over F_q, grown one appended row at a time.

    Tracks which appended rows contributed new pivots, so callers can
    recover the first linearly independent subset in arrival order.
    """

    def __init__(self, width: int, modulus: int):
        self.width = width
        self.modulus = modulus
        self._pivots: dict[int, list[int]] = {}
        self.sources: list = []

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def add_row(self, row: Sequence[int], source=None) -> bool:
        """Reduce a row against the basis; returns True if rank grew."""
        q = self.modulus
        work = [v % q for v in row]
        lead = 0
        while True:
            while lead < self.width and not work[lead]:
                lead += 1
            if lead == self.width:
                return False
            pivot = self._pivots.get(lead)
            if pivot is None:
                inv = pow(work[lead], -1, q)
                normalized = [0] * lead + [v * inv % q for v in work[lead:]]
                self._pivots[lead] = normalized
                self.sources.append(source)
                return True
            kernels.add_scaled(work, pivot, q - work[lead], q)


def _invert_rows(rows: list[list[int]], q: int) -> list[list[int]]:
    # rows form a nonsingular n x n matrix by construction (pre-selected
    # as linearly independent); Gauss-Jordan on [A | I] yields A^-1.
    n = len(rows)
    aug = []
    for i, r in enumerate(rows):
        aug.extend(r)
        aug.extend(1 if j == i else 0 for j in range(n))
    rank_, red = kernels.rref(aug, n, 2 * n, q)
    return [red[i * 2 * n + n:(i + 1) * 2 * n] for i in range(n)]


def decode_general(
    points: Sequence[EvalPoint],
    evaluations: Sequence[FieldMatrix],
    kind: SchemeKind,
    scheme: PartitionScheme,
) -> ChainResult:
    """Decode from an arbitrary point set via a generalized Vandermonde system.

    Selects the first linearly independent rows in supply order, solves
    for the full coefficient tensor, and extracts per the scheme.  Raises
    SingularSystem when the supplied points cannot span the monomial
    support.
    """
    if len(points) != len(evaluations):
        raise ValueError("one evaluation per point required")
    if not evaluations:
        raise SingularSystem("no evaluations supplied")
    first = evaluations[0]
    field = first.field
    if any(v.shape != first.shape or v.field != field for v in evaluations):
        raise ShapeMismatch("evaluations must share one shape and field")
    q = field.modulus
    bounds = product_degree_bounds(kind, scheme)
    n_mono = math.prod(b + 1 for b in bounds)
    elim = IncrementalEliminator(n_mono, q)
    kept_rows: dict[int, list[int]] = {}
    for idx, pt in enumerate(points):
        if len(pt) != len(bounds):
            raise ValueError(f"point {idx} has arity {len(pt)}, expected {len(bounds)}")
        row = evaluation_row(pt, bounds, q)
        if elim.add_row(row, source=idx):
            kept_rows[idx] = row
            if elim.rank == n_mono:
                break
    if elim.rank < n_mono:
        raise SingularSystem(
            f"rank {elim.rank} < {n_mono} monomials with all supplied points"
        )
    chosen = elim.sources
    inverse = _invert_rows([kept_rows[i] for i in chosen], q)
    width = first.rows * first.cols
    data: list[int] = []
    for k in range(n_mono):
        acc = [0] * width
        inv_row = inverse[k]
        for j, src in enumerate(chosen):
            c = inv_row[j]
            if c:
                kernels.add_scaled(acc, evaluations[src].data, c, q)
        data.extend(acc)
    tensor = CoefficientTensor(field, bounds, first.rows, first.cols, data)
    if kind is SchemeKind.MV1:
        return extract_mv1(tensor, scheme)
    return extract_mv2(tensor, scheme)
