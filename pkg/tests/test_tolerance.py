import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import maximal_pre_blocks
from roughgran.chains import enumerate_chain_tolerances
from roughgran.cliques import maximal_cliques
from roughgran.errors import BoundsError, DimensionError, NumericError, ParameterError
from roughgran.table import load_table
from roughgran.tolerance import (
    BlockSystem,
    DistanceSpec,
    Tolerance,
    blocks,
    combine_tolerances,
    is_block,
    is_pre_block,
    product_tolerance,
    similarity_matrix,
    tolerance_from_distance,
)

# a, b, c with rho(a,b)=0.3, rho(b,c)=0.4, rho(a,c)=0.9
TABLE = {("a", "b"): 0.3, ("b", "a"): 0.3, ("b", "c"): 0.4, ("c", "b"): 0.4,
         ("a", "c"): 0.9, ("c", "a"): 0.9}
PATH = Tolerance.from_pairs(3, [(0, 1), (1, 2)])


def test_tolerance_from_distance_table():
    spec = DistanceSpec("v", "table", 1.0, "sum", TABLE)
    t = tolerance_from_distance(["a", "b", "c"], spec)
    assert t(0, 1) and t(1, 2) and not t(0, 2)
    assert t == PATH


def test_large_epsilon_gives_total_tolerance():
    t = tolerance_from_distance([0, 3, 10], DistanceSpec("v", epsilon=100))
    assert t == Tolerance.total(3)


def test_zero_epsilon_distinct_values_gives_identity():
    t = tolerance_from_distance([0, 3, 10, 11], DistanceSpec("v", epsilon=0))
    assert t == Tolerance.identity(4)


def test_ratio_variant():
    # |a-b| = 1 -> symmetrised sum 2 -> ratio 2/3
    spec_in = DistanceSpec("v", epsilon=0.7, variant="ratio")
    spec_out = DistanceSpec("v", epsilon=0.6, variant="ratio")
    assert tolerance_from_distance([0, 1], spec_in)(0, 1)
    assert not tolerance_from_distance([0, 1], spec_out)(0, 1)


def test_asymmetric_distance_uses_both_directions():
    table = {("p", "q"): 0.9, ("q", "p"): 0.0}
    assert not tolerance_from_distance(["p", "q"], DistanceSpec("v", "table", 0.5, "sum", table))(0, 1)
    assert tolerance_from_distance(["p", "q"], DistanceSpec("v", "table", 0.9, "sum", table))(0, 1)


def test_discrete_and_normalized():
    t = tolerance_from_distance(["x", "y", "x"], DistanceSpec("v", "discrete", 0.5))
    assert t.pairs() == [[0, 2]]
    t = tolerance_from_distance([0, 5, 10], DistanceSpec("v", "normalized", 1.0))
    assert t.pairs() == [[0, 1], [1, 2]]


def test_non_finite_distance():
    with pytest.raises(NumericError):
        tolerance_from_distance([0.0, float("inf")], DistanceSpec("v", epsilon=1))


@pytest.mark.parametrize("kwargs", [
    {"epsilon": -1}, {"epsilon": 1.0, "variant": "ratio"}, {"kind": "cosine"}, {"kind": "table"},
])
def test_bad_distance_specs(kwargs):
    with pytest.raises(ParameterError):
        DistanceSpec("v", **kwargs)


def test_combine_identity_elements():
    assert combine_tolerances([PATH, Tolerance.total(3)], "and") == PATH
    assert combine_tolerances([Tolerance.identity(3)] * 2, "or") == Tolerance.identity(3)


def test_combine_majority():
    t1 = Tolerance.from_pairs(4, [(0, 1), (1, 2), (2, 3)])
    t2 = Tolerance.from_pairs(4, [(0, 1), (0, 3)])
    t3 = Tolerance.from_pairs(4, [(1, 2), (0, 3), (0, 2)])
    # votes: 01:2, 12:2, 23:1, 03:2, 02:1
    assert combine_tolerances([t1, t2, t3], "at-least", 2).pairs() == [[0, 1], [0, 3], [1, 2]]


def test_combine_errors():
    with pytest.raises(DimensionError):
        combine_tolerances([Tolerance.identity(2), Tolerance.identity(3)])
    with pytest.raises(ParameterError):
        combine_tolerances([PATH], "at-least", 2)


def test_similarity_matrix():
    t = load_table("id,p,q\nx,0,0\ny,0.4,0.3\nz,0.9,0.2\n")
    one = similarity_matrix(t, [DistanceSpec("p", epsilon=1.0)])
    assert one == tolerance_from_distance(t.column("p"), DistanceSpec("p", epsilon=1.0))
    both = similarity_matrix(t, [DistanceSpec("p", epsilon=1.0), DistanceSpec("q", epsilon=1.0)])
    # p: sums 0.8, 1.8, 1.0 -> xy, yz ; q: sums 0.6, 0.4, 0.2 -> all
    assert both.pairs() == [[0, 1], [1, 2]]
    either = similarity_matrix(t, [DistanceSpec("p", epsilon=1.0), DistanceSpec("q", epsilon=0.5)], "and")
    assert either.pairs() == [[1, 2]]


def test_tolerance_invariants_enforced():
    with pytest.raises(ParameterError):
        Tolerance([[True, True], [False, True]])
    with pytest.raises(ParameterError):
        Tolerance([[False]])
    assert Tolerance.from_json(PATH.to_json()) == PATH


def test_blocks_examples():
    assert [sorted(b) for b in blocks(PATH)] == [[0, 1], [1, 2]]
    assert [sorted(b) for b in blocks(Tolerance.identity(4))] == [[0], [1], [2], [3]]
    assert [sorted(b) for b in blocks(Tolerance.total(5))] == [[0, 1, 2, 3, 4]]


def test_pre_block_and_block():
    assert is_pre_block(PATH, []) and not is_block(PATH, [])
    assert is_pre_block(PATH, [1]) and not is_block(PATH, [1])
    assert is_block(PATH, [0, 1])
    assert not is_pre_block(PATH, [0, 2])
    with pytest.raises(BoundsError):
        is_pre_block(PATH, [3])


def random_tolerance(rng, n, p):
    m = np.eye(n, dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                m[i, j] = m[j, i] = True
    return Tolerance(m)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 10), st.floats(0, 1), st.integers(0, 2**31))
def test_blocks_match_subset_enumeration(n, p, seed):
    t = random_tolerance(random.Random(seed), n, p)
    bs = blocks(t)
    assert set(bs.blocks) == maximal_pre_blocks(t.matrix)
    for b in bs:
        assert is_pre_block(t, b) and is_block(t, b)


def test_block_order_is_canonical():
    t = Tolerance.from_pairs(5, [(3, 4), (0, 1), (1, 2), (0, 2), (2, 3)])
    assert [sorted(b) for b in blocks(t)] == [[0, 1, 2], [2, 3], [3, 4]]


def test_degeneracy_branch_matches_plain_search():
    rng = random.Random(7)
    n = 300
    adj = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.03:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    from roughgran import cliques

    big = set(maximal_cliques(adj))
    old = cliques.DEGENERACY_THRESHOLD
    cliques.DEGENERACY_THRESHOLD = 10**6
    try:
        plain = set(maximal_cliques(adj))
    finally:
        cliques.DEGENERACY_THRESHOLD = old
    assert big == plain


def test_deep_clique_needs_no_recursion():
    assert len(blocks(Tolerance.total(1500))) == 1


def test_block_system_invariants():
    with pytest.raises(ParameterError):
        BlockSystem(3, (frozenset({0, 1}),))
    with pytest.raises(ParameterError):
        BlockSystem(3, (frozenset({0, 1, 2}), frozenset({0})))
    bs = BlockSystem(3, (frozenset({1, 2}), frozenset({0, 1})))
    assert bs.blocks[0] == {0, 1}
    assert BlockSystem.from_json(bs.to_json()) == bs
    assert bs.relation() == PATH


def test_product_tolerance_examples():
    total = product_tolerance([Tolerance.total(2), Tolerance.total(2)])
    assert [sorted(b) for b in blocks(total)] == [[0, 1, 2, 3]]
    ident = product_tolerance([Tolerance.identity(2), Tolerance.identity(2)])
    assert len(blocks(ident)) == 4
    from roughgran.chains import ChainBlockSystem

    t = product_tolerance([
        ChainBlockSystem(3, ((0, 1), (1, 2))).relation(),
        ChainBlockSystem(2, ((0, 0), (1, 1))).relation(),
    ])
    # row-major: index = 2 * i + j
    assert [sorted(b) for b in blocks(t)] == [[0, 2], [1, 3], [2, 4], [3, 5]]
    with pytest.raises(ParameterError):
        product_tolerance([])


def chain_relations(n):
    return [s.relation() for s in enumerate_chain_tolerances(n)]


@pytest.mark.parametrize("sizes", [(2, 3), (3, 3), (4, 2), (2, 2, 2)])
def test_product_blocks_are_products_of_factor_blocks(sizes):
    for factors in itertools.product(*(chain_relations(n) for n in sizes)):
        got = set(blocks(product_tolerance(factors)).blocks)
        want = set()
        for combo in itertools.product(*(blocks(f).blocks for f in factors)):
            idx = [np.ravel_multi_index(c, sizes) for c in itertools.product(*(sorted(b) for b in combo))]
            want.add(frozenset(int(i) for i in idx))
        assert got == want
