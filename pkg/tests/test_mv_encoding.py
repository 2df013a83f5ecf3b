import io
import itertools
import random

import pytest

from mvchain.chain_core import partition
from mvchain.errors import ChainShapeMismatch, IndexOutOfRange, PointArityMismatch
from mvchain.fp_field import FieldMatrix, PrimeField
from mvchain.mv_decoding import EvaluationGrid, interpolate_grid
from mvchain.mv_encoding import (
    CodedTask,
    EvalPoint,
    SchemeKind,
    encode_mv1_block,
    encode_mv2_block,
    encode_task,
    evaluate_on_grid,
    product_degree_bounds,
    read_task,
    worker_compute,
    write_task,
)
from helpers import build_chain, product_poly_expansion

F = PrimeField()
F101 = PrimeField(101)


def test_exponent_map_is_bijection():
    # (b, b') -> p_next*b + b' must cover [0, p*p_next) exactly once.
    for p, p_next in itertools.product(range(1, 5), range(1, 5)):
        exps = {p_next * b + bp for b in range(p) for bp in range(p_next)}
        assert exps == set(range(p * p_next))


def test_mv1_single_block_passthrough():
    _, mats, chain = build_chain(F, (1, 1, 1), seed=0)
    for x in (F(0), F(17), F(123456)):
        assert encode_mv1_block(chain, 0, x) == mats[0]


def test_mv1_at_zero_keeps_first_block():
    _, _, chain = build_chain(F, (2, 2, 2), seed=1)
    assert encode_mv1_block(chain, 0, F(0)) == chain.blocks[0][0][0]
    assert encode_mv1_block(chain, 1, F(0)) == chain.blocks[1][0][0]


def test_mv1_2x2_powers_of_x():
    _, _, chain = build_chain(F101, (2, 2, 2), seed=2)
    g = chain.blocks[0]
    expected = (
        g[0][0]
        + g[0][1].scaled(3)
        + g[1][0].scaled(9)
        + g[1][1].scaled(27)
    )
    assert encode_mv1_block(chain, 0, F101(3)) == expected


def test_mv2_single_block_passthrough():
    _, mats, chain = build_chain(F, (1, 1, 1), seed=3)
    assert encode_mv2_block(chain, 1, F(5), F(9)) == mats[1]


def test_mv2_zero_left_keeps_last_row():
    # x^(p-1-b) vanishes at x=0 except for b = p-1.
    _, _, chain = build_chain(F, (2, 2, 2), seed=4)
    g = chain.blocks[0]
    x_next = F(13)
    expected = g[1][0] + g[1][1].scaled(13)
    assert encode_mv2_block(chain, 0, F(0), x_next) == expected


def test_mv2_2x2_direct():
    _, _, chain = build_chain(F101, (2, 2, 2), seed=5)
    g = chain.blocks[0]
    expected = (
        g[0][0].scaled(2)
        + g[0][1].scaled(10)
        + g[1][0]
        + g[1][1].scaled(5)
    )
    assert encode_mv2_block(chain, 0, F101(2), F101(5)) == expected


def test_encode_block_index_out_of_range():
    _, _, chain = build_chain(F, (2, 2, 2), seed=6)
    with pytest.raises(IndexOutOfRange):
        encode_mv1_block(chain, 2, F(1))
    with pytest.raises(IndexOutOfRange):
        encode_mv2_block(chain, -1, F(1), F(2))


def test_encode_task_arity_checked():
    _, _, chain = build_chain(F, (2, 2, 2), seed=7)
    with pytest.raises(PointArityMismatch):
        encode_task(chain, SchemeKind.MV1, EvalPoint((F(1), F(2), F(3))))
    with pytest.raises(PointArityMismatch):
        encode_task(chain, SchemeKind.MV2, EvalPoint((F(1), F(2))))


def test_encode_task_all_ones_passthrough():
    _, mats, chain = build_chain(F, (1, 1, 1, 1), seed=8)
    point = EvalPoint(tuple(F(v) for v in (3, 1, 4)))
    task = encode_task(chain, SchemeKind.MV1, point)
    assert list(task.coded_blocks) == mats
    point2 = EvalPoint(tuple(F(v) for v in (3, 1, 4, 1)))
    task2 = encode_task(chain, SchemeKind.MV2, point2)
    assert list(task2.coded_blocks) == mats


@pytest.mark.parametrize("kind", [SchemeKind.MV1, SchemeKind.MV2])
@pytest.mark.parametrize("parts", [(2, 2, 2), (1, 3, 2), (2, 2, 1, 2)])
def test_worker_product_matches_expansion(kind, parts):
    # Core encode-correctness oracle: the worker's product of coded
    # blocks equals the brute-force multi-sum expansion of the product
    # polynomial at the same point.
    _, _, chain = build_chain(F, parts, seed=9, edge=2)
    m = len(parts) - 1
    rng = random.Random(10)
    for _ in range(3):
        point = EvalPoint(
            tuple(F.random_element(rng) for _ in range(kind.num_variables(m)))
        )
        task = encode_task(chain, kind, point)
        assert worker_compute(task) == product_poly_expansion(chain, kind, point)


def test_worker_compute_linearity():
    parts = (2, 2, 2)
    _, mats, chain = build_chain(F, parts, seed=11)
    scaled_chain = partition([mats[0].scaled(7), mats[1]], parts)
    point = EvalPoint((F(3), F(8)))
    base = worker_compute(encode_task(chain, SchemeKind.MV1, point))
    scaled = worker_compute(encode_task(scaled_chain, SchemeKind.MV1, point))
    assert scaled == base.scaled(7)


def test_worker_compute_rejects_incompatible_blocks():
    task = CodedTask(
        SchemeKind.MV1,
        EvalPoint((F(1), F(2))),
        (FieldMatrix.zeros(F, 2, 2), FieldMatrix.zeros(F, 3, 2)),
    )
    with pytest.raises(ChainShapeMismatch):
        worker_compute(task)


@pytest.mark.parametrize("kind", [SchemeKind.MV1, SchemeKind.MV2])
def test_degree_bounds_are_tight(kind):
    # Interpolate on an oversized grid: coefficients beyond the stated
    # per-variable degree must vanish and the top-degree slot must not.
    scheme, _, chain = build_chain(F, (2, 2, 2), seed=12)
    bounds = product_degree_bounds(kind, scheme)
    axes = tuple(
        tuple(F(v) for v in range(b + 3)) for b in bounds
    )
    grid = EvaluationGrid(axes, kind)
    tensor = interpolate_grid(grid, evaluate_on_grid(chain, kind, grid.axes))
    zero = [0] * tensor.block_width
    for exps in itertools.product(*(range(b + 3) for b in bounds)):
        if any(e > b for e, b in zip(exps, bounds)):
            assert tensor.coefficient(exps).data == zero
    for axis, bound in enumerate(bounds):
        top = [
            tensor.coefficient(exps).data
            for exps in itertools.product(*(range(b + 1) for b in bounds))
            if exps[axis] == bound
        ]
        assert any(data != zero for data in top)


@pytest.mark.parametrize("kind", [SchemeKind.MV1, SchemeKind.MV2])
def test_evaluate_on_grid_matches_per_task_path(kind):
    scheme, _, chain = build_chain(F, (2, 1, 2), seed=13)
    sizes = [b + 1 for b in product_degree_bounds(kind, scheme)]
    axes = tuple(tuple(F(3 * i + a) for i in range(n)) for a, n in enumerate(sizes))
    table = evaluate_on_grid(chain, kind, axes)
    assert len(table) == len(list(itertools.product(*axes)))
    rng = random.Random(14)
    points = random.Random(14).sample(sorted(table, key=lambda p: p.values()), 4)
    for point in points:
        assert table[point] == worker_compute(encode_task(chain, kind, point))


def test_task_serialization_roundtrip():
    _, _, chain = build_chain(F, (2, 2, 2), seed=15)
    point = EvalPoint((F(12), F(99), F(7)))
    task = encode_task(chain, SchemeKind.MV2, point)
    buf = io.StringIO()
    write_task(buf, task)
    buf.seek(0)
    back = read_task(buf, F)
    assert back.kind is task.kind
    assert back.point == task.point
    assert list(back.coded_blocks) == list(task.coded_blocks)
