import io
import itertools
import random

import pytest

from mvchain.chain_core import (
    PartitionScheme,
    assemble_result,
    block_chain_product,
    chain_result_from_blocks,
    ChainResult,
    oracle_chain_multiply,
    partition,
    random_chain_matrices,
    read_matrix,
    reassemble,
    write_matrix,
)
from mvchain.errors import (
    ChainShapeMismatch,
    IndexOutOfRange,
    IndivisibleDimension,
    MissingBlock,
)
from mvchain.fp_field import FieldMatrix, PrimeField, mat_mul
from helpers import build_chain

F = PrimeField()


def test_scheme_validation():
    with pytest.raises(ChainShapeMismatch):
        PartitionScheme((4, 4), (2, 2))  # single matrix is not a chain
    with pytest.raises(ChainShapeMismatch):
        PartitionScheme((4, 4, 4), (2, 2))
    with pytest.raises(IndivisibleDimension):
        PartitionScheme((4, 6, 4), (3, 2, 2))


def test_partition_level():
    s = PartitionScheme((4, 4, 6, 4), (2, 1, 3, 2))
    assert s.partition_level == 12
    assert s.m == 3
    assert len(list(s.index_tuples())) == 12


def test_partition_trivial_parts_keep_whole_matrices():
    _, mats, chain = build_chain(F, (1, 1, 1), seed=0, edge=3)
    assert chain.blocks[0][0][0] == mats[0]
    assert chain.blocks[1][0][0] == mats[1]


def test_partition_tiles_4x4():
    m0 = FieldMatrix.from_rows(F, [[0, 1, 2, 3], [4, 5, 6, 7], [8, 9, 10, 11], [12, 13, 14, 15]])
    chain = partition([m0, FieldMatrix.identity(F, 4)], (2, 2, 1))
    assert chain.blocks[0][0][0] == FieldMatrix.from_rows(F, [[0, 1], [4, 5]])
    assert chain.blocks[0][0][1] == FieldMatrix.from_rows(F, [[2, 3], [6, 7]])
    assert chain.blocks[0][1][0] == FieldMatrix.from_rows(F, [[8, 9], [12, 13]])
    assert chain.blocks[0][1][1] == FieldMatrix.from_rows(F, [[10, 11], [14, 15]])


def test_partition_reassemble_roundtrip():
    _, mats, chain = build_chain(F, (2, 3, 1, 2), seed=1, edge=2)
    assert reassemble(chain) == mats


def test_partition_rejects_bad_chains():
    a = FieldMatrix.zeros(F, 4, 4)
    b = FieldMatrix.zeros(F, 3, 4)
    with pytest.raises(ChainShapeMismatch):
        partition([a, b], (2, 2, 2))
    with pytest.raises(IndivisibleDimension):
        partition([a, FieldMatrix.zeros(F, 4, 4)], (2, 3, 2))
    with pytest.raises(ChainShapeMismatch):
        partition([a], (2, 2, 2))


def test_block_chain_product_unpartitioned():
    _, mats, chain = build_chain(F, (1, 1, 1), seed=2)
    assert block_chain_product(chain, (0, 0, 0)) == mat_mul(mats[0], mats[1])


def test_block_chain_product_identity_chain():
    eye = FieldMatrix.identity(F, 4)
    chain = partition([eye, eye], (2, 2, 2))
    # Diagonal index chains give identity tiles, off-diagonal give zeros.
    assert block_chain_product(chain, (0, 0, 0)) == FieldMatrix.identity(F, 2)
    assert block_chain_product(chain, (0, 1, 0)) == FieldMatrix.zeros(F, 2, 2)


def test_block_chain_product_index_out_of_range():
    _, _, chain = build_chain(F, (2, 2, 2), seed=3)
    with pytest.raises(IndexOutOfRange):
        block_chain_product(chain, (0, 2, 0))
    with pytest.raises(IndexOutOfRange):
        block_chain_product(chain, (0, 0))


def test_oracle_identity_chain():
    eye = FieldMatrix.identity(F, 3)
    assert oracle_chain_multiply([eye, eye, eye]) == eye


def test_oracle_1x1():
    a = FieldMatrix(F, 1, 1, [7])
    b = FieldMatrix(F, 1, 1, [11])
    assert oracle_chain_multiply([a, b]) == FieldMatrix(F, 1, 1, [77])


def test_oracle_association_order_irrelevant():
    rng = random.Random(4)
    dims = (6, 4, 4, 2, 6)
    mats = [F.random_matrix(dims[i], dims[i + 1], rng) for i in range(4)]
    left = oracle_chain_multiply(mats)
    right = mats[0]
    acc = mats[-1]
    for mtx in reversed(mats[1:-1]):
        acc = mat_mul(mtx, acc)
    assert left == mat_mul(right, acc)


def test_oracle_rejects_mismatched_chain():
    with pytest.raises(ChainShapeMismatch):
        oracle_chain_multiply([FieldMatrix.zeros(F, 2, 3), FieldMatrix.zeros(F, 2, 3)])


def test_assemble_single_block_passthrough():
    scheme, mats, chain = build_chain(F, (1, 2, 1), seed=5)
    result = chain_result_from_blocks(chain)
    assert assemble_result(result) == result.blocks[0][0]


def test_assemble_hand_tiling():
    scheme = PartitionScheme((2, 2, 2), (2, 1, 2))
    blocks = [
        [FieldMatrix(F, 1, 1, [1]), FieldMatrix(F, 1, 1, [2])],
        [FieldMatrix(F, 1, 1, [3]), FieldMatrix(F, 1, 1, [4])],
    ]
    tiled = assemble_result(ChainResult(scheme, F, blocks))
    assert tiled == FieldMatrix.from_rows(F, [[1, 2], [3, 4]])


def test_assemble_missing_block():
    scheme = PartitionScheme((2, 2, 2), (2, 1, 2))
    grid = [[FieldMatrix(F, 1, 1, [1]), None], [None, None]]
    with pytest.raises(MissingBlock):
        assemble_result(ChainResult(scheme, F, grid))


@pytest.mark.parametrize(
    "parts",
    [(2, 2, 2), (1, 3, 2), (3, 1, 3, 2), (2, 2, 2, 2), (1, 2, 3, 2, 1)],
)
def test_block_decomposition_identity(parts):
    # Summing block chain products over all middle indices and tiling
    # reproduces the plain product of the unpartitioned matrices.
    _, mats, chain = build_chain(F, parts, seed=sum(parts), edge=2)
    assert assemble_result(chain_result_from_blocks(chain)) == oracle_chain_multiply(mats)


def test_block_decomposition_identity_exhaustive():
    # Every partition scheme with m in 2..4 and p_i in 1..3.
    for m in (2, 3, 4):
        for parts in itertools.product((1, 2, 3), repeat=m + 1):
            _, mats, chain = build_chain(F, parts, seed=m, edge=2)
            assert assemble_result(chain_result_from_blocks(chain)) == (
                oracle_chain_multiply(mats)
            )


def test_matrix_io_roundtrip():
    rng = random.Random(6)
    m = F.random_matrix(3, 4, rng)
    buf = io.StringIO()
    write_matrix(buf, m)
    buf.seek(0)
    assert read_matrix(buf, F) == m


def test_matrix_io_header_format():
    buf = io.StringIO()
    write_matrix(buf, FieldMatrix.from_rows(F, [[1, 2], [3, 4]]))
    assert buf.getvalue() == "2 2\n1 2\n3 4\n"


def test_matrix_io_truncated():
    with pytest.raises(ValueError):
        read_matrix(io.StringIO("2 2\n1 2 3"), F)
