"""Storage placement: which evaluation points each worker holds.

Shared memory keeps one global grid sized to the product polynomial's
degrees; dedicated memory carves disjoint per-worker sub-grids out of
seeded per-axis point pools and accounts the aggregate storage.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from mvchain.chain_core import PartitionScheme
from mvchain.errors import InfeasiblePlan, NonIntegralAssignment
from mvchain.fp_field import PrimeField
from mvchain.mv_decoding import EvaluationGrid
from mvchain.mv_encoding import EvalPoint, SchemeKind, product_degree_bounds


class MemoryMode(Enum):
    SHARED = "shared"
    DEDICATED = "dedicated"


def grid_axis_sizes(kind: SchemeKind, scheme: PartitionScheme) -> tuple[int, ...]:
    """Minimal per-axis grid sizes: degree + 1 in each variable."""
    return tuple(b + 1 for b in product_degree_bounds(kind, scheme))


@dataclass(frozen=True)
class StoragePlan:
    """Per-worker evaluation-point grids plus the implied storage accounting.

    worker_axes[w][a] is worker w's coordinate set on axis a (canonical
    residues).  For shared plans every worker aliases the one global
    grid and tasks are dealt out in chunks; for dedicated plans the axis
    sets are disjoint across workers and each worker's task list is the
    Cartesian product of its own sets.
    """

    kind: SchemeKind
    memory: MemoryMode
    scheme: PartitionScheme
    field: PrimeField
    workers: int
    fractions: tuple[Fraction, ...]
    worker_axes: tuple[tuple[tuple[int, ...], ...], ...]
    storage_thresholds: tuple[int, ...]
    tasks_per_worker: tuple[int, ...]

    @property
    def total_tasks(self) -> int:
        return sum(self.tasks_per_worker)


@dataclass(frozen=True)
class WorkerAssignment:
    """One worker's ordered task queue."""

    worker: int
    points: tuple[EvalPoint, ...]


def _axis_pool(field: PrimeField, count: int, seed: int, axis: int) -> tuple[int, ...]:
    # Deterministic distinct coordinates per (seed, axis); the same seed
    # therefore reproduces the same plan exactly.
    q = field.modulus
    if count > q:
        raise ValueError(f"axis needs {count} distinct points but field has {q}")
    rng = random.Random(seed * 1_000_003 + axis)
    seen: set[int] = set()
    pool: list[int] = []
    while len(pool) < count:
        v = rng.randrange(q)
        if v not in seen:
            seen.add(v)
            pool.append(v)
    return tuple(pool)


def _storage_per_matrix(kind: SchemeKind, axis_counts: Sequence[int], m: int) -> list[int]:
    # Coded blocks of matrix i stored for given per-axis set sizes: the
    # size of its axis (MV1) or of its axis pair (MV2).
    if kind is SchemeKind.MV1:
        return [axis_counts[i] for i in range(m)]
    return [axis_counts[i] * axis_counts[i + 1] for i in range(m)]


def _even_chunks(total: int, workers: int) -> tuple[int, ...]:
    base, extra = divmod(total, workers)
    return tuple(base + (1 if w < extra else 0) for w in range(workers))


def mv2_oversized_axis_sizes(scheme: PartitionScheme) -> tuple[int, ...]:
    """Scheme-2 axis sizes with middle axes of 2p_i + 1 points.

    Two more points per middle axis than the product-polynomial degree
    requires; kept available so the alternative sizing convention can be
    reproduced end to end (recovery then needs the generic decoder, and
    more evaluations than the recovery threshold are produced).
    """
    p = scheme.parts
    return (p[0], *(2 * p[i] + 1 for i in range(1, scheme.m)), p[-1])


def plan_shared(
    kind: SchemeKind,
    scheme: PartitionScheme,
    field: PrimeField,
    workers: int = 1,
    seed: int = 0,
    axis_sizes: Sequence[int] | None = None,
) -> StoragePlan:
    """One global grid (minimal by default); its task pool is split across workers."""
    if workers < 1:
        raise ValueError("need at least one worker")
    minimal = grid_axis_sizes(kind, scheme)
    if axis_sizes is None:
        sizes = minimal
    else:
        sizes = tuple(int(s) for s in axis_sizes)
        if len(sizes) != len(minimal) or any(s < n for s, n in zip(sizes, minimal)):
            raise ValueError(f"axis sizes must cover the minimal grid {minimal}")
    axes = tuple(_axis_pool(field, n, seed, a) for a, n in enumerate(sizes))
    storage = _storage_per_matrix(kind, sizes, scheme.m)
    total = math.prod(sizes)
    return StoragePlan(
        kind=kind,
        memory=MemoryMode.SHARED,
        scheme=scheme,
        field=field,
        workers=workers,
        fractions=(Fraction(1),) * len(sizes),
        worker_axes=(axes,) * workers,
        storage_thresholds=tuple(storage),
        tasks_per_worker=_even_chunks(total, workers),
    )


def plan_dedicated(
    kind: SchemeKind,
    scheme: PartitionScheme,
    field: PrimeField,
    workers: int,
    fractions: Sequence[Fraction],
    seed: int = 0,
) -> StoragePlan:
    """Disjoint per-worker sub-grids holding a fraction s_i of each axis."""
    if workers < 1:
        raise ValueError("need at least one worker")
    sizes = grid_axis_sizes(kind, scheme)
    fracs = tuple(Fraction(f) for f in fractions)
    if len(fracs) != len(sizes):
        raise ValueError(f"expected {len(sizes)} fractions, got {len(fracs)}")
    if any(not 0 < s <= 1 for s in fracs):
        raise ValueError("fractions must lie in (0, 1]")
    per_sizes = []
    for a, (s, n) in enumerate(zip(fracs, sizes)):
        cnt = s * n
        if cnt.denominator != 1:
            raise NonIntegralAssignment(
                f"s_{a}={s} gives non-integer per-worker size {cnt} on axis {a}"
            )
        per_sizes.append(int(cnt))
    if workers * math.prod(fracs) < 1:
        raise InfeasiblePlan(
            f"N*prod(s_i) >= 1 required for recovery; "
            f"got {workers} * {math.prod(fracs)} < 1"
        )
    pools = [
        _axis_pool(field, workers * cnt, seed, a) for a, cnt in enumerate(per_sizes)
    ]
    worker_axes = tuple(
        tuple(
            pools[a][w * cnt:(w + 1) * cnt] for a, cnt in enumerate(per_sizes)
        )
        for w in range(workers)
    )
    storage = [workers * v for v in _storage_per_matrix(kind, per_sizes, scheme.m)]
    tasks = math.prod(per_sizes)
    return StoragePlan(
        kind=kind,
        memory=MemoryMode.DEDICATED,
        scheme=scheme,
        field=field,
        workers=workers,
        fractions=fracs,
        worker_axes=worker_axes,
        storage_thresholds=tuple(storage),
        tasks_per_worker=(tasks,) * workers,
    )


def symmetric_fractions(
    kind: SchemeKind, m: int, workers: int
) -> tuple[Fraction, ...] | None:
    """The symmetric choice s_i = N^(-1/v); exact only when N is a v-th power."""
    v = kind.num_variables(m)
    t = round(workers ** (1.0 / v))
    for cand in (t - 1, t, t + 1):
        if cand > 0 and cand**v == workers:
            return (Fraction(1, cand),) * v
    return None


def enumerate_tasks(plan: StoragePlan) -> list[WorkerAssignment]:
    """Each worker's ordered task queue (lexicographic over its grid)."""
    field = plan.field
    if plan.memory is MemoryMode.SHARED:
        axes = plan.worker_axes[0]
        all_points = [
            EvalPoint(tuple(field.element(c) for c in combo))
            for combo in itertools.product(*axes)
        ]
        out = []
        start = 0
        for w, cnt in enumerate(plan.tasks_per_worker):
            out.append(WorkerAssignment(w, tuple(all_points[start:start + cnt])))
            start += cnt
        return out
    out = []
    for w in range(plan.workers):
        pts = tuple(
            EvalPoint(tuple(field.element(c) for c in combo))
            for combo in itertools.product(*plan.worker_axes[w])
        )
        out.append(WorkerAssignment(w, pts))
    return out


def plan_grid(plan: StoragePlan) -> EvaluationGrid:
    """The single Cartesian grid of a shared plan."""
    if plan.memory is not MemoryMode.SHARED:
        raise ValueError("only shared plans have one global grid")
    field = plan.field
    axes = tuple(
        tuple(field.element(c) for c in axis) for axis in plan.worker_axes[0]
    )
    return EvaluationGrid(axes, plan.kind)


def plan_report(plan: StoragePlan) -> str:
    """Human-readable plan summary: axis sets, storage table, task counts."""
    lines = [
        f"scheme={plan.kind.value} memory={plan.memory.value} "
        f"workers={plan.workers} parts={plan.scheme.parts}",
        f"fractions: {', '.join(str(s) for s in plan.fractions)}",
        f"tasks per worker: {plan.tasks_per_worker} (total {plan.total_tasks})",
        "storage thresholds S_th,i (coded blocks of matrix i, system-wide):",
    ]
    for i, s in enumerate(plan.storage_thresholds):
        lines.append(f"  matrix {i}: {s}")
    if plan.memory is MemoryMode.SHARED:
        lines.append("global axis sets:")
        for a, axis in enumerate(plan.worker_axes[0]):
            lines.append(f"  axis {a} ({len(axis)} points): {list(axis)}")
    else:
        for w, axes in enumerate(plan.worker_axes):
            lines.append(f"worker {w} axis sets:")
            for a, axis in enumerate(axes):
                lines.append(f"  axis {a} ({len(axis)} points): {list(axis)}")
    return "\n".join(lines)
