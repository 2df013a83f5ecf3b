"""Closed-form thresholds and overheads for all three coding schemes.

Metrics are exact rationals (``fractions.Fraction``); percent conversion
happens only when CSV rows are written.  The figure-emission path follows
the numerical-evaluation convention of not imposing integrality on the
per-worker fractions, so dedicated storage curves use the symmetric
choice s_i = N^(-1/v) in floating point; the placement module is the
strict, integral counterpart.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, TextIO

from mvchain.chain_core import PartitionScheme
from mvchain.errors import InfeasiblePlan
from mvchain.placement import MemoryMode

CSV_HEADER = ("scheme", "memory", "m", "p", "N", "metric", "value_percent")


@dataclass(frozen=True)
class SchemeMetrics:
    """Recovery/storage thresholds and overheads of one configuration."""

    scheme: str
    memory: str
    recovery_threshold: int
    partition_level: int
    storage_thresholds: tuple[Fraction, ...]
    delta: Fraction
    delta_s: tuple[Fraction, ...]


def _overheads(
    scheme_label: str,
    memory: str,
    scheme: PartitionScheme,
    r_th: int,
    storage: Sequence[Fraction],
) -> SchemeMetrics:
    k = scheme.partition_level
    p = scheme.parts
    delta = Fraction(r_th, k) - 1
    delta_s = tuple(
        s / (p[i] * p[i + 1]) - 1 for i, s in enumerate(storage)
    )
    return SchemeMetrics(
        scheme=scheme_label,
        memory=memory,
        recovery_threshold=r_th,
        partition_level=k,
        storage_thresholds=tuple(Fraction(s) for s in storage),
        delta=delta,
        delta_s=delta_s,
    )


def uv_metrics(scheme: PartitionScheme) -> SchemeMetrics:
    """Univariate baseline: R_th = prod p_j + prod(middle p_j) - 1, S_th = R_th."""
    p = scheme.parts
    r_th = math.prod(p) + math.prod(p[1:-1]) - 1
    storage = [Fraction(r_th)] * scheme.m
    return _overheads("UV", "", scheme, r_th, storage)


def _check_dedicated(workers, fractions, count):
    if workers is None or fractions is None:
        raise ValueError("dedicated memory needs workers and fractions")
    fracs = tuple(Fraction(f) for f in fractions)
    if len(fracs) != count:
        raise ValueError(f"expected {count} fractions, got {len(fracs)}")
    if any(not 0 < s <= 1 for s in fracs):
        raise ValueError("fractions must lie in (0, 1]")
    if workers * math.prod(fracs) < 1:
        raise InfeasiblePlan(
            f"N*prod(s_i) >= 1 required for recovery; "
            f"got {workers} * {math.prod(fracs)} < 1"
        )
    return fracs


def mv1_metrics(
    scheme: PartitionScheme,
    memory: MemoryMode = MemoryMode.SHARED,
    workers: int | None = None,
    fractions: Sequence[Fraction] | None = None,
) -> SchemeMetrics:
    """Scheme 1: R_th = prod p_i p_{i+1}; storage p_i p_{i+1} (N s_i x dedicated)."""
    p = scheme.parts
    m = scheme.m
    r_th = math.prod(p[i] * p[i + 1] for i in range(m))
    if memory is MemoryMode.SHARED:
        storage = [Fraction(p[i] * p[i + 1]) for i in range(m)]
    else:
        fracs = _check_dedicated(workers, fractions, m)
        storage = [workers * fracs[i] * p[i] * p[i + 1] for i in range(m)]
    return _overheads("MV1", memory.value if memory else "", scheme, r_th, storage)


def _mv2_axis_sizes(scheme: PartitionScheme) -> list[int]:
    p = scheme.parts
    return [p[0], *(2 * p[i] - 1 for i in range(1, scheme.m)), p[-1]]


def mv2_metrics(
    scheme: PartitionScheme,
    memory: MemoryMode = MemoryMode.SHARED,
    workers: int | None = None,
    fractions: Sequence[Fraction] | None = None,
) -> SchemeMetrics:
    """Scheme 2: R_th = p_0 p_m prod(2p_i - 1); storage per adjacent axis pair."""
    p = scheme.parts
    m = scheme.m
    sizes = _mv2_axis_sizes(scheme)
    r_th = p[0] * p[-1] * math.prod(2 * p[i] - 1 for i in range(1, m))
    if memory is MemoryMode.SHARED:
        storage = [Fraction(sizes[i] * sizes[i + 1]) for i in range(m)]
    else:
        fracs = _check_dedicated(workers, fractions, m + 1)
        storage = [
            workers * fracs[i] * sizes[i] * fracs[i + 1] * sizes[i + 1]
            for i in range(m)
        ]
    return _overheads("MV2", memory.value if memory else "", scheme, r_th, storage)


# Equal-partition closed forms (p_i = p for all i), used by the figure
# emission and checked against the general formulas in the tests.

def uv_delta_equal(m: int, p: int) -> Fraction:
    return Fraction(1, p**2) - Fraction(1, p ** (m + 1))


def mv1_delta_equal(m: int, p: int) -> Fraction:
    return Fraction(p ** (m - 1) - 1)


def mv2_delta_equal(m: int, p: int) -> Fraction:
    return Fraction(2 * p - 1, p) ** (m - 1) - 1


def uv_delta_s_equal(m: int, p: int) -> Fraction:
    return Fraction(p ** (m + 1) + p ** (m - 1) - 1, p**2) - 1


def mv1_delta_s_dedicated_equal(m: int, workers: float) -> float:
    return workers ** ((m - 1) / m) - 1


def mv2_delta_s_shared_equal(p: int) -> Fraction:
    return Fraction(2 * p - 1, p) ** 2 - 1


def mv2_delta_s_dedicated_equal(m: int, p: int, workers: float) -> float:
    return workers ** ((m - 1) / (m + 1)) * float(Fraction(2 * p - 1, p) ** 2) - 1


_FIGS = ("fig2", "fig3", "fig4", "table1")


def _validated(name: str, values, minimum: int) -> list[int]:
    out = sorted(set(int(v) for v in values))
    if not out:
        raise ValueError(f"empty {name} range")
    if out[0] < minimum:
        raise ValueError(f"{name} values must be >= {minimum}")
    return out


def emit_figure_data(
    which: str,
    m_values: Sequence[int] | None = None,
    p_values: Sequence[int] | None = None,
    n_values: Sequence[int] | None = None,
) -> list[tuple]:
    """Rows (scheme, memory, m, p, N, metric, value_percent) for one figure.

    fig2: computation overhead vs p; fig3: storage overhead vs p at fixed
    N; fig4: storage overhead vs N at fixed p; table1: both metrics at
    sampled (p, N).  MV1 shared storage is omitted from fig3/fig4 (it is
    identically zero, which a log-scale plot cannot display) but appears
    in table1.
    """
    if which not in _FIGS:
        raise ValueError(f"unknown figure {which!r}; expected one of {_FIGS}")
    ms = _validated("m", m_values if m_values is not None else [5, 10], 2)
    if which == "fig2":
        ps = _validated("p", p_values if p_values is not None else range(2, 51), 1)
        return [
            (label, "", m, p, "", "delta", 100 * float(fn(m, p)))
            for m in ms
            for p in ps
            for label, fn in (
                ("UV", uv_delta_equal),
                ("MV1", mv1_delta_equal),
                ("MV2", mv2_delta_equal),
            )
        ]
    if which == "fig3":
        ps = _validated("p", p_values if p_values is not None else range(2, 51), 1)
        ns = _validated("N", n_values if n_values is not None else [5], 1)
    elif which == "fig4":
        ps = _validated("p", p_values if p_values is not None else [5], 1)
        ns = _validated("N", n_values if n_values is not None else range(2, 51), 1)
    else:
        ps = _validated("p", p_values if p_values is not None else [10, 100], 1)
        ns = _validated("N", n_values if n_values is not None else [5, 50], 1)
    rows = []
    for m in ms:
        for p in ps:
            for n in ns:
                storage = [
                    ("UV", "", 100 * float(uv_delta_s_equal(m, p))),
                    ("MV1", "dedicated", 100 * mv1_delta_s_dedicated_equal(m, n)),
                    ("MV2", "shared", 100 * float(mv2_delta_s_shared_equal(p))),
                    ("MV2", "dedicated", 100 * mv2_delta_s_dedicated_equal(m, p, n)),
                ]
                if which == "table1":
                    rows.extend(
                        (label, "", m, p, n, "delta", 100 * float(fn(m, p)))
                        for label, fn in (
                            ("UV", uv_delta_equal),
                            ("MV1", mv1_delta_equal),
                            ("MV2", mv2_delta_equal),
                        )
                    )
                    storage.insert(1, ("MV1", "shared", 0.0))
                rows.extend(
                    (label, mem, m, p, n, "delta_s", v) for label, mem, v in storage
                )
    return rows


def write_rows(rows: Sequence[tuple], f: TextIO) -> None:
    """Write figure rows as CSV with the mandatory header."""
    writer = csv.writer(f, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        *head, value = row
        writer.writerow([*head, format(float(value), ".12g")])
