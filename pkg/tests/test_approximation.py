import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from roughgran.approximation import (
    GranularApproximation,
    RRFDescriptor,
    accuracy,
    accuracy_descriptor,
    approximate,
    approximation_sets,
    evaluate_rrf,
    lower,
    minimal_cover_descriptor,
    minimal_cover_rrf1,
    non_approximations,
    operator_descriptor,
    rough_pairs,
    upper,
    upper_definite_sets,
    xi5,
    xi5_descriptor,
)
from roughgran.errors import BoundsError, CapacityError, ContractError, DomainError, ParameterError
from roughgran.tolerance import BlockSystem, Tolerance, blocks

A, B, C = 0, 1, 2
PATH = BlockSystem(3, (frozenset({A, B}), frozenset({B, C})))
U = frozenset(range(3))


def identity(n):
    return blocks(Tolerance.identity(n))


def single(n):
    return blocks(Tolerance.total(n))


def test_lower_examples():
    assert lower(PATH, {A, B}) == {A, B}
    assert lower(PATH, set()) == frozenset()
    assert lower(PATH, U) == U


def test_upper_examples():
    assert upper(PATH, {A}) == {A, B}
    assert upper(PATH, {B}) == U
    assert upper(PATH, U) == U


def test_contributing_blocks_and_json():
    g = approximate(PATH, {A, B})
    assert g.lower_blocks == (0,) and g.upper_blocks == (0, 1)
    assert g.boundary == {C}
    assert GranularApproximation.from_json(g.to_json()) == g


def test_stray_indices():
    with pytest.raises(BoundsError):
        lower(PATH, {3})
    with pytest.raises(BoundsError):
        upper(PATH, {-1})


def test_rough_pairs_examples():
    e = rough_pairs(identity(2))
    assert set(e.members) == {
        (frozenset(), frozenset()),
        (frozenset({0}), frozenset({0})),
        (frozenset({1}), frozenset({1})),
        (frozenset({0, 1}), frozenset({0, 1})),
    }
    s = rough_pairs(single(3))
    assert set(s.members) == {(frozenset(), frozenset()), (frozenset(), U), (U, U)}
    for bs in (PATH, identity(4), single(5)):
        assert (frozenset(), frozenset()) in rough_pairs(bs)


def test_rough_pairs_capacity_and_sampling():
    big = identity(20)
    with pytest.raises(CapacityError):
        rough_pairs(big)
    sampled = rough_pairs(big, samples=200, seed=3)
    assert not sampled.exhaustive
    assert sampled.members == rough_pairs(big, samples=200, seed=3).members
    for lo, up in sampled.members:
        assert lo == up


def test_xi5_examples():
    assert xi5(set(), {1, 2}) == 1
    assert xi5({1, 2}, {1, 2}) == 0
    assert xi5({1}, {1, 2, 3, 4}) == 0.75
    with pytest.raises(DomainError):
        xi5({1}, set())


def test_accuracy_examples():
    assert accuracy(PATH, {A, B}) == pytest.approx(2 / 3)
    assert accuracy(PATH, U) == 1
    assert accuracy(PATH, set()) == 1
    assert accuracy(identity(3), {1}) == 1


def test_minimal_cover_examples():
    # {a,b} is lower({a,b}); its cheapest covering pair is ({a,b}, U)
    assert minimal_cover_rrf1(PATH, {A, B}) == (frozenset({A, B}), U)
    assert minimal_cover_rrf1(PATH, U) == (U, U)
    with pytest.raises(DomainError):
        minimal_cover_rrf1(PATH, {A})


def test_minimal_cover_is_minimal():
    rng = random.Random(11)
    for _ in range(30):
        bs = blocks(random_tolerance(rng, rng.randint(1, 7)))
        space = rough_pairs(bs)
        for a in approximation_sets(bs):
            lo, up = minimal_cover_rrf1(bs, a)
            assert a <= lo and a <= up
            covers = [(e, f) for e, f in space.members if a <= e]
            assert not any((e, f) != (lo, up) and e <= lo and f <= up for e, f in covers)


def test_upper_definite_sets_match_oracle():
    rng = random.Random(5)
    for _ in range(20):
        n = rng.randint(1, 10)
        bs = blocks(random_tolerance(rng, n))
        e2 = set(upper_definite_sets(bs).members)
        # independent check: b is upper-definite iff every block meeting b lies inside b
        want = set()
        for mask in range(1 << n):
            b = frozenset(i for i in range(n) if mask >> i & 1)
            if all(blk <= b for blk in bs.blocks if blk & b):
                want.add(b)
        assert e2 == want


def test_non_approximations_match_oracle():
    rng = random.Random(9)
    for _ in range(15):
        n = rng.randint(1, 8)
        bs = blocks(random_tolerance(rng, n))
        subsets = [frozenset(c) for r in range(n + 1) for c in itertools.combinations(range(n), r)]
        hit = {lower(bs, x) for x in subsets} | {upper(bs, x) for x in subsets}
        assert set(non_approximations(bs).members) == set(subsets) - hit


def test_non_approximation_example():
    # {a} is neither lower nor upper of anything in the path system
    assert frozenset({A}) in non_approximations(PATH)


def test_evaluate_rrf_examples():
    assert evaluate_rrf(xi5_descriptor(), (set(), {1, 2})) == 1.0
    with pytest.raises(DomainError):
        evaluate_rrf(xi5_descriptor(), ({1}, set()))
    t1 = minimal_cover_descriptor(PATH)
    assert t1.rrf_type == "type-1" and t1.partial
    with pytest.raises(DomainError):
        evaluate_rrf(t1, frozenset({A}))
    assert evaluate_rrf(t1, U) == (U, U)
    t3 = minimal_cover_descriptor(PATH, total=True)
    assert t3.rrf_type == "type-3" and not t3.partial
    assert evaluate_rrf(accuracy_descriptor(PATH), {A, B}) == pytest.approx(2 / 3)


def test_type_h_operator_matches_direct_call():
    h = operator_descriptor(PATH)
    got = evaluate_rrf(h, ("u", {A}))
    assert frozenset().union(*got) == upper(PATH, {A})
    got = evaluate_rrf(h, ("l", {A, B}))
    assert frozenset().union(*got) == lower(PATH, {A, B})
    with pytest.raises(DomainError):
        evaluate_rrf(h, ("x", {A}))


def test_codomain_violation_is_contract_error():
    bad = RRFDescriptor("type-2", lambda x: 2.0, lambda x: True, lambda v: 0 <= v <= 1)
    with pytest.raises(ContractError):
        evaluate_rrf(bad, None)
    with pytest.raises(ParameterError):
        RRFDescriptor("type-2", len, bool, bool, partial=True)
    with pytest.raises(ParameterError):
        RRFDescriptor("type-9", len, bool, bool)


def random_tolerance(rng, n, p=None):
    p = rng.random() if p is None else p
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return Tolerance.from_pairs(n, pairs)


@st.composite
def instances(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2**31))
    bs = blocks(random_tolerance(random.Random(seed), n))
    subset = st.sets(st.integers(0, n - 1))
    a = draw(subset)
    b = draw(subset) | a
    return bs, frozenset(a), frozenset(b)


@settings(max_examples=150, deadline=None)
@given(instances())
def test_axioms(inst):
    bs, a, b = inst
    universe = frozenset(range(bs.universe_size))
    assert lower(bs, a) <= a <= upper(bs, a)
    assert lower(bs, lower(bs, a)) == lower(bs, a)
    assert lower(bs, a) <= lower(bs, b)
    assert upper(bs, a) <= upper(bs, b)
    assert lower(bs, frozenset()) == frozenset()
    assert upper(bs, universe) == universe
    assert not lower(bs, a) & (a - upper(bs, a))


def test_complement_duality_not_assumed():
    # with overlapping blocks the dual of lower differs from upper
    x = {A}
    dual = U - lower(PATH, U - x)
    assert dual != upper(PATH, x)


@settings(max_examples=100, deadline=None)
@given(st.sets(st.integers(0, 9)), st.sets(st.integers(0, 9)), st.sets(st.integers(0, 9), min_size=1))
def test_xi5_properties(a, extra, b):
    assert (xi5(a, b) == 0) == (b <= a)
    assert xi5(a | extra, b) <= xi5(a, b)
    assert 0 <= xi5(a, b) <= 1


@settings(max_examples=100, deadline=None)
@given(instances(max_n=8))
def test_rough_pairs_nested(inst):
    bs, _, _ = inst
    for lo, up in rough_pairs(bs).members:
        assert lo <= up
