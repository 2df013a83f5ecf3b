"""Shared test utilities: chain builders and independent oracles.

The oracles here deliberately avoid the library's encode/decode paths:
the product-polynomial expansion iterates every block index combination
and multiplies out monomials directly, and the schoolbook product is a
plain triple loop.
"""

import itertools
import random

from mvchain.chain_core import PartitionScheme, partition, random_chain_matrices
from mvchain.fp_field import FieldMatrix
from mvchain.mv_encoding import SchemeKind


def build_chain(field, parts, seed=0, edge=2, dims=None):
    """Random chain for the given partition counts; returns (scheme, matrices, chain)."""
    parts = tuple(parts)
    if dims is None:
        dims = tuple(edge * p for p in parts)
    scheme = PartitionScheme(tuple(dims), parts)
    rng = random.Random(seed)
    matrices = random_chain_matrices(field, scheme, rng)
    return scheme, matrices, partition(matrices, parts)


def schoolbook_mat_mul(a, b):
    """Triple-loop reference product, independent of the kernel path."""
    assert a.cols == b.rows
    q = a.field.modulus
    rows = []
    for i in range(a.rows):
        row = []
        for j in range(b.cols):
            acc = 0
            for k in range(a.cols):
                acc += a.data[i * a.cols + k] * b.data[k * b.cols + j]
            row.append(acc % q)
        rows.append(row)
    return FieldMatrix.from_rows(a.field, rows)


def product_poly_expansion(chain, kind, point):
    """Brute-force value of the coded chain product polynomial at a point.

    Sums, over every combination of per-matrix block indices
    (b_i, b'_{i+1}), the plain block product scaled by the monomial value
    implied by the scheme's exponent assignment.
    """
    s = chain.scheme
    field = chain.field
    q = field.modulus
    m = s.m
    p = s.parts
    coords = [c.value for c in point.coords]
    br = s.dims[0] // p[0]
    bc = s.dims[-1] // p[-1]
    total = FieldMatrix.zeros(field, br, bc)
    per_matrix = [
        list(itertools.product(range(p[i]), range(p[i + 1]))) for i in range(m)
    ]
    for combo in itertools.product(*per_matrix):
        prod = chain.blocks[0][combo[0][0]][combo[0][1]]
        for i in range(1, m):
            from mvchain.fp_field import mat_mul

            prod = mat_mul(prod, chain.blocks[i][combo[i][0]][combo[i][1]])
        if kind is SchemeKind.MV1:
            coeff = 1
            for i, (b, bp) in enumerate(combo):
                coeff = coeff * pow(coords[i], p[i + 1] * b + bp, q) % q
        else:
            exps = [0] * (m + 1)
            for i, (b, bp) in enumerate(combo):
                exps[i] += p[i] - 1 - b
                exps[i + 1] += bp
            coeff = 1
            for j, e in enumerate(exps):
                coeff = coeff * pow(coords[j], e, q) % q
        total = total + prod.scaled(coeff)
    return total
