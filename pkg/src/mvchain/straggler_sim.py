"""Event-driven straggler simulation.

Workers drain their assigned task queues under a random per-task latency
model; the master tracks the rank of the interpolation system one
arrival at a time and records the moment the collected results become
decodable.  Every successful run decodes and verifies against the plain
chain product.
"""

from __future__ import annotations

import csv
import heapq
import math
import random
import statistics
from dataclasses import dataclass
from typing import Sequence, TextIO

from mvchain.chain_core import (
    BlockChain,
    PartitionScheme,
    assemble_result,
    oracle_chain_multiply,
    reassemble,
)
from mvchain.errors import NeverDecodable
from mvchain.mv_decoding import (
    IncrementalEliminator,
    decode_general,
    evaluation_row,
    monomial_support,
)
from mvchain.mv_encoding import encode_task, product_degree_bounds, worker_compute
from mvchain.placement import StoragePlan, enumerate_tasks


@dataclass(frozen=True)
class ShiftedExponential:
    """Per-task duration shift + Exp(rate); the usual straggler model."""

    shift: float = 1.0
    rate: float = 1.0

    def __post_init__(self):
        if self.shift < 0 or self.rate <= 0:
            raise ValueError("need shift >= 0 and rate > 0")

    def sample(self, rng: random.Random) -> float:
        return self.shift + rng.expovariate(self.rate)


@dataclass(frozen=True)
class Deterministic:
    """Fixed per-task duration."""

    task_time: float = 1.0

    def __post_init__(self):
        if self.task_time <= 0:
            raise ValueError("task time must be positive")

    def sample(self, rng: random.Random) -> float:
        return self.task_time


LatencyModel = ShiftedExponential | Deterministic


@dataclass(frozen=True)
class SimOutcome:
    recovery_time: float
    tasks_completed_total: int
    tasks_wasted: int
    extra_tasks_for_decodability: int
    per_worker_completed: tuple[int, ...]


def simulate(
    plan: StoragePlan, chain: BlockChain, model: LatencyModel, seed: int
) -> SimOutcome:
    """Replay one run: event queue over task completions, decode at rank R_th.

    The rank of the growing system is updated incrementally per arrival;
    the full solve happens once, when the collected rows first span the
    monomial support.  The decoded matrix is checked against the
    reference chain product and a mismatch raises (it cannot happen in
    exact arithmetic once the system is full rank).
    """
    if chain.scheme != plan.scheme:
        raise ValueError("chain and plan use different partition schemes")
    kind = plan.kind
    scheme = plan.scheme
    q = plan.field.modulus
    bounds = product_degree_bounds(kind, scheme)
    n_mono = len(monomial_support(kind, scheme))
    assignments = enumerate_tasks(plan)
    oracle = oracle_chain_multiply(reassemble(chain))

    # Per-worker completion streams, drawn up front for determinism.
    events: list[tuple[float, int, int]] = []
    for w, assignment in enumerate(assignments):
        rng = random.Random(seed * 1_000_003 + w)
        t = 0.0
        for idx in range(len(assignment.points)):
            t += model.sample(rng)
            events.append((t, w, idx))
    heapq.heapify(events)

    elim = IncrementalEliminator(n_mono, q)
    collected_points = []
    collected_results = []
    completed = [0] * len(assignments)
    while events:
        t, w, idx = heapq.heappop(events)
        point = assignments[w].points[idx]
        result = worker_compute(encode_task(chain, kind, point))
        completed[w] += 1
        collected_points.append(point)
        collected_results.append(result)
        elim.add_row(evaluation_row(point, bounds, q))
        if elim.rank == n_mono:
            decoded = decode_general(collected_points, collected_results, kind, scheme)
            if assemble_result(decoded) != oracle:
                raise AssertionError("decoded result differs from reference product")
            wasted = sum(
                1
                for ww, assignment in enumerate(assignments)
                if completed[ww] < len(assignment.points)
            )
            return SimOutcome(
                recovery_time=t,
                tasks_completed_total=len(collected_results),
                tasks_wasted=wasted,
                extra_tasks_for_decodability=len(collected_results) - n_mono,
                per_worker_completed=tuple(completed),
            )
    raise NeverDecodable(
        f"rank {elim.rank} < {n_mono} after all {len(collected_results)} tasks"
    )


def uv_reference(
    scheme: PartitionScheme, workers: int, model: LatencyModel, seed: int
) -> SimOutcome:
    """Timing-only reference for the univariate scheme.

    No coding is executed: any R_th distinct univariate evaluations
    decode, so recovery is the R_th-th order statistic of the simulated
    completion stream with ceil(R_th / N) tasks queued per worker.
    """
    p = scheme.parts
    r_th = math.prod(p) + math.prod(p[1:-1]) - 1
    per_worker = -(-r_th // workers)
    events: list[tuple[float, int]] = []
    for w in range(workers):
        rng = random.Random(seed * 1_000_003 + w)
        t = 0.0
        for _ in range(per_worker):
            t += model.sample(rng)
            events.append((t, w))
    events.sort()
    completed = [0] * workers
    for t, w in events[:r_th]:
        completed[w] += 1
    recovery = events[r_th - 1][0]
    wasted = sum(1 for w in range(workers) if completed[w] < per_worker)
    return SimOutcome(
        recovery_time=recovery,
        tasks_completed_total=r_th,
        tasks_wasted=wasted,
        extra_tasks_for_decodability=0,
        per_worker_completed=tuple(completed),
    )


CSV_HEADER = (
    "plan_id",
    "scheme",
    "memory",
    "N",
    "seed",
    "recovery_time",
    "tasks_total",
    "tasks_wasted",
    "extra_for_decodability",
)


def sweep(
    plans: Sequence[StoragePlan],
    chain: BlockChain,
    model: LatencyModel,
    seeds: Sequence[int],
    plan_ids: Sequence[str] | None = None,
    uv_reference_rows: bool = False,
) -> tuple[list[tuple], list[dict]]:
    """Run every (plan, seed) pair; returns (csv rows, per-plan summary)."""
    if plan_ids is None:
        plan_ids = [f"plan{i}" for i in range(len(plans))]
    if len(plan_ids) != len(plans):
        raise ValueError("one id per plan required")
    rows = []
    for pid, plan in zip(plan_ids, plans):
        for seed in seeds:
            out = simulate(plan, chain, model, seed)
            rows.append(
                (
                    pid,
                    plan.kind.value,
                    plan.memory.value,
                    plan.workers,
                    seed,
                    out.recovery_time,
                    out.tasks_completed_total,
                    out.tasks_wasted,
                    out.extra_tasks_for_decodability,
                )
            )
    if uv_reference_rows:
        for n in sorted({plan.workers for plan in plans}):
            for seed in seeds:
                out = uv_reference(chain.scheme, n, model, seed)
                rows.append(
                    (
                        f"uv-N{n}",
                        "uv",
                        "",
                        n,
                        seed,
                        out.recovery_time,
                        out.tasks_completed_total,
                        out.tasks_wasted,
                        out.extra_tasks_for_decodability,
                    )
                )
    return rows, summarize(rows)


def summarize(rows: Sequence[tuple]) -> list[dict]:
    """Mean / median / p95 recovery time and mean waste per plan id."""
    by_plan: dict[str, list[tuple]] = {}
    for row in rows:
        by_plan.setdefault(row[0], []).append(row)
    out = []
    for pid, group in by_plan.items():
        times = sorted(r[5] for r in group)
        p95 = times[min(len(times) - 1, math.ceil(0.95 * len(times)) - 1)]
        out.append(
            {
                "plan_id": pid,
                "runs": len(group),
                "mean_recovery": statistics.fmean(times),
                "median_recovery": statistics.median(times),
                "p95_recovery": p95,
                "mean_wasted": statistics.fmean(r[7] for r in group),
                "mean_extra": statistics.fmean(r[8] for r in group),
            }
        )
    return out


def write_rows(rows: Sequence[tuple], f: TextIO) -> None:
    """Write sweep rows as CSV with the fixed header."""
    writer = csv.writer(f, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
