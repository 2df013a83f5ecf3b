"""Command-line entry point.

Three subcommands: ``analyze`` writes the overhead CSVs, ``roundtrip``
runs a seeded encode/compute/decode cycle against the reference product,
and ``simulate`` sweeps the straggler simulator.  Every tunable can come
from a flag or a key=value config file (flag wins); exit codes are 0 on
success, 1 for a correctness/decodability failure, 2 for bad input.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from mvchain import analysis, straggler_sim
from mvchain.chain_core import (
    PartitionScheme,
    assemble_result,
    oracle_chain_multiply,
    partition,
    random_chain_matrices,
    read_matrix,
    write_matrix,
)
from mvchain.errors import (
    ChainShapeMismatch,
    Error,
    IndivisibleDimension,
    InfeasiblePlan,
    NeverDecodable,
    NonIntegralAssignment,
    PointArityMismatch,
)
from mvchain.fp_field import DEFAULT_MODULUS, PrimeField
from mvchain.kernels import BACKEND
from mvchain.mv_decoding import decode_general, extract_mv1, extract_mv2, interpolate_grid
from mvchain.mv_encoding import SchemeKind, evaluate_on_grid
from mvchain.placement import (
    MemoryMode,
    mv2_oversized_axis_sizes,
    plan_dedicated,
    plan_grid,
    plan_report,
    plan_shared,
    symmetric_fractions,
)

OUTPUT_DIR_ENV = "MVCHAIN_OUTPUT_DIR"


def parse_int_list(text: str) -> list[int]:
    """Comma list or inclusive range: "5,10" or "2..50" or "7"."""
    text = text.strip()
    if not text:
        raise ValueError("empty range")
    if ".." in text:
        lo, hi = text.split("..", 1)
        values = list(range(int(lo), int(hi) + 1))
        if not values:
            raise ValueError(f"empty range {text!r}")
        return values
    return [int(tok) for tok in text.split(",") if tok.strip()]


def parse_fraction_list(text: str) -> list[Fraction]:
    return [Fraction(tok) for tok in text.split(",") if tok.strip()]


def load_config(path: str) -> dict[str, str]:
    """Simple key=value file; '#' starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


class _Options:
    """Flag > config file > built-in default."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.cfg = load_config(args.config) if getattr(args, "config", None) else {}

    def get(self, key: str, default=None, parse=str):
        flag = getattr(self.args, key.replace("-", "_"), None)
        if flag is not None:
            return flag
        if key in self.cfg:
            return parse(self.cfg[key])
        return default


def _output_dir(opts: _Options) -> Path:
    out = opts.get("out", os.environ.get(OUTPUT_DIR_ENV, "."))
    return Path(out)


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters.

    Construction runs the module constructors (scheme, field, plan
    fractions), so invalid input fails here, before any work starts.
    """

    kind: SchemeKind
    scheme: PartitionScheme
    field: PrimeField
    seed: int
    memory: MemoryMode = MemoryMode.SHARED
    workers: int = 1
    fractions: tuple[Fraction, ...] | None = None


def _build_config(opts: _Options) -> RunConfig:
    kind_name = opts.get("scheme")
    if kind_name is None:
        raise ValueError("--scheme is required (mv1 or mv2)")
    kind = SchemeKind(str(kind_name))
    parts = opts.get("parts", parse=parse_int_list)
    if parts is None:
        raise ValueError("--parts is required")
    dims = opts.get("dims", parse=parse_int_list)
    if dims is None:
        dims = [2 * p for p in parts]
    modulus = opts.get("modulus", DEFAULT_MODULUS, parse=int)
    seed = opts.get("seed", 0, parse=int)
    memory = MemoryMode(opts.get("memory", "shared"))
    workers = opts.get("workers", 1, parse=int)
    fractions = opts.get("fractions", parse=parse_fraction_list)
    if memory is MemoryMode.DEDICATED and fractions is None:
        fractions = symmetric_fractions(kind, len(parts) - 1, workers)
        if fractions is None:
            raise ValueError(
                f"N={workers} has no exact symmetric fractions for "
                f"{kind.value}; pass --fractions"
            )
    return RunConfig(
        kind=kind,
        scheme=PartitionScheme(tuple(dims), tuple(parts)),
        field=PrimeField(modulus),
        seed=seed,
        memory=memory,
        workers=workers,
        fractions=tuple(fractions) if fractions is not None else None,
    )


def cmd_roundtrip(args: argparse.Namespace) -> int:
    opts = _Options(args)
    cfg = _build_config(opts)
    kind, scheme, field, seed = cfg.kind, cfg.scheme, cfg.field, cfg.seed
    mv2_axes = opts.get("mv2-axes", "minimal")
    if mv2_axes not in ("minimal", "oversized"):
        raise ValueError("--mv2-axes must be 'minimal' or 'oversized'")
    chain_file = opts.get("chain-file")
    if chain_file:
        with open(chain_file) as f:
            matrices = [read_matrix(f, field) for _ in range(scheme.m)]
        if tuple(m.rows for m in matrices) + (matrices[-1].cols,) != scheme.dims:
            raise ValueError(f"chain file dimensions do not match {scheme.dims}")
    else:
        rng = random.Random(seed)
        matrices = random_chain_matrices(field, scheme, rng)
    chain = partition(matrices, scheme.parts)
    oracle = oracle_chain_multiply(matrices)

    if kind is SchemeKind.MV1:
        metrics = analysis.mv1_metrics(scheme)
    else:
        metrics = analysis.mv2_metrics(scheme)
    oversized = kind is SchemeKind.MV2 and mv2_axes == "oversized"
    axis_sizes = mv2_oversized_axis_sizes(scheme) if oversized else None
    plan = plan_shared(kind, scheme, field, seed=seed, axis_sizes=axis_sizes)
    grid = plan_grid(plan)
    evaluations = evaluate_on_grid(chain, kind, grid.axes)
    if oversized:
        points = list(evaluations)
        decoded = decode_general(points, [evaluations[p] for p in points], kind, scheme)
    else:
        tensor = interpolate_grid(grid, evaluations)
        decoded = (
            extract_mv1(tensor, scheme)
            if kind is SchemeKind.MV1
            else extract_mv2(tensor, scheme)
        )
    ok_decode = assemble_result(decoded) == oracle
    ok_thresholds = oversized or (
        plan.total_tasks == metrics.recovery_threshold
        and list(plan.storage_thresholds)
        == [int(s) for s in metrics.storage_thresholds]
    )

    print(
        f"roundtrip scheme={kind.value} parts={','.join(map(str, scheme.parts))} "
        f"dims={','.join(map(str, scheme.dims))} modulus={field.modulus} "
        f"seed={seed} backend={BACKEND}"
    )
    print(
        f"recovery threshold: formula {metrics.recovery_threshold}, "
        f"grid tasks {plan.total_tasks}"
        + (" (oversized axes)" if oversized else "")
    )
    print(
        f"storage thresholds: plan {list(plan.storage_thresholds)}, "
        f"formula {[int(s) for s in metrics.storage_thresholds]}"
    )
    dump = opts.get("dump-chain")
    if dump:
        path = Path(dump)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            for mtx in matrices:
                write_matrix(f, mtx)
            write_matrix(f, oracle)
        print(f"wrote chain fixture (m matrices + product) to {path}")

    ok = ok_decode and ok_thresholds
    print(f"result: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_analyze(args: argparse.Namespace) -> int:
    opts = _Options(args)
    figure = opts.get("figure", parse=int)
    table = opts.get("table", parse=int)
    if (figure is None) == (table is None):
        raise ValueError("pass exactly one of --figure {2,3,4} or --table 1")
    if figure is not None:
        if figure not in (2, 3, 4):
            raise ValueError("--figure must be 2, 3 or 4")
        which = f"fig{figure}"
    else:
        if table != 1:
            raise ValueError("--table must be 1")
        which = "table1"
    rows = analysis.emit_figure_data(
        which,
        m_values=opts.get("m", parse=parse_int_list),
        p_values=opts.get("p", parse=parse_int_list),
        n_values=opts.get("N", parse=parse_int_list),
    )
    outdir = _output_dir(opts)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / f"{which}.csv"
    with open(path, "w") as f:
        analysis.write_rows(rows, f)
    print(f"wrote {len(rows)} rows to {path}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    opts = _Options(args)
    cfg = _build_config(opts)
    kind, scheme, field, seed = cfg.kind, cfg.scheme, cfg.field, cfg.seed
    if cfg.memory is MemoryMode.SHARED:
        plan = plan_shared(kind, scheme, field, workers=cfg.workers, seed=seed)
    else:
        plan = plan_dedicated(
            kind, scheme, field, cfg.workers, cfg.fractions, seed=seed
        )

    model_name = opts.get("model", "shifted-exp")
    if model_name == "shifted-exp":
        model = straggler_sim.ShiftedExponential(
            shift=opts.get("shift", 1.0, parse=float),
            rate=opts.get("rate", 1.0, parse=float),
        )
    elif model_name == "deterministic":
        model = straggler_sim.Deterministic(
            task_time=opts.get("task-time", 1.0, parse=float)
        )
    else:
        raise ValueError("--model must be 'shifted-exp' or 'deterministic'")
    seeds = opts.get("seeds", list(range(10)), parse=parse_int_list)
    if not seeds:
        raise ValueError("empty --seeds range")

    rng = random.Random(seed)
    matrices = random_chain_matrices(field, scheme, rng)
    chain = partition(matrices, scheme.parts)

    if opts.get("report"):
        print(plan_report(plan))
    rows, summary = straggler_sim.sweep(
        [plan],
        chain,
        model,
        seeds,
        plan_ids=[f"{kind.value}-{cfg.memory.value}"],
        uv_reference_rows=bool(opts.get("uv-reference")),
    )
    out = opts.get("out")
    path = Path(out) if out else _output_dir(opts) / "sim.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        straggler_sim.write_rows(rows, f)
    print(f"wrote {len(rows)} rows to {path}")
    for s in summary:
        print(
            f"{s['plan_id']}: runs={s['runs']} mean={s['mean_recovery']:.4f} "
            f"median={s['median_recovery']:.4f} p95={s['p95_recovery']:.4f} "
            f"wasted={s['mean_wasted']:.2f} extra={s['mean_extra']:.2f}"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvchain",
        description="Multivariate polynomial coding for matrix chain multiplication",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value config file (flags win)")
        p.add_argument("--scheme", choices=["mv1", "mv2"])
        p.add_argument("--parts", type=parse_int_list, help="p_0,...,p_m")
        p.add_argument("--dims", type=parse_int_list, help="r_0,...,r_m (default 2*parts)")
        p.add_argument("--modulus", type=int, help=f"prime field modulus (default {DEFAULT_MODULUS})")
        p.add_argument("--seed", type=int, help="seed for chain and point pools (default 0)")

    rt = sub.add_parser("roundtrip", help="encode/compute/decode against the reference product")
    common(rt)
    rt.add_argument(
        "--mv2-axes",
        choices=["minimal", "oversized"],
        help="middle-axis sizing for mv2 grids: 2p-1 (minimal, default) or 2p+1",
    )
    rt.add_argument("--chain-file", help="read the m input matrices from a fixture file")
    rt.add_argument("--dump-chain", help="write the chain and its product as a fixture")
    rt.set_defaults(func=cmd_roundtrip)

    an = sub.add_parser("analyze", help="emit overhead CSVs for the figures/table")
    an.add_argument("--config", help="key=value config file (flags win)")
    an.add_argument("--figure", type=int, help="2, 3 or 4")
    an.add_argument("--table", type=int, help="1")
    an.add_argument("--m", type=parse_int_list, help="chain lengths, e.g. 5,10")
    an.add_argument("--p", type=parse_int_list, help="partition counts, e.g. 2..50")
    an.add_argument("--N", type=parse_int_list, help="worker counts, e.g. 2..50")
    an.add_argument("--out", help=f"output directory (default ${OUTPUT_DIR_ENV} or .)")
    an.set_defaults(func=cmd_analyze)

    sim = sub.add_parser("simulate", help="straggler simulation sweep")
    common(sim)
    sim.add_argument("--memory", choices=["shared", "dedicated"])
    sim.add_argument("--workers", type=int)
    sim.add_argument("--fractions", type=parse_fraction_list, help="e.g. 1/2,1/2,1")
    sim.add_argument("--seeds", type=parse_int_list, help="e.g. 0..19 (default 0..9)")
    sim.add_argument("--model", choices=["shifted-exp", "deterministic"])
    sim.add_argument("--shift", type=float, help="shifted-exp shift (default 1.0)")
    sim.add_argument("--rate", type=float, help="shifted-exp rate (default 1.0)")
    sim.add_argument("--task-time", type=float, help="deterministic per-task time")
    sim.add_argument("--uv-reference", action="store_true", default=None,
                     help="append univariate timing reference rows")
    sim.add_argument("--report", action="store_true", default=None,
                     help="print the storage plan before simulating")
    sim.add_argument("--out", help="output CSV path (default sim.csv in output dir)")
    sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NeverDecodable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (
        InfeasiblePlan,
        NonIntegralAssignment,
        IndivisibleDimension,
        ChainShapeMismatch,
        PointArityMismatch,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Error as exc:
        # Remaining package errors signal broken math, not bad input.
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
