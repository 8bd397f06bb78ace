import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from selectop.builders import (BlockTournament, LazyBlockTournament, PartitionSizeError, block_contract,
                               build_cor26, build_lemma23, build_lemma25,
                               certify_partition_open, component_parts, isolated_segments,
                               triple_grouping)
from selectop.selections import Tournament, is_circular
from selectop.space import load_model, parse_model
from selectop.topology import Subbase, is_open

F = Fraction


def test_triple_grouping_leftover():
    g = triple_grouping(7)
    assert g.triples == ((0, 1, 2), (3, 4, 5)) and g.leftover == (6,)
    with pytest.raises(PartitionSizeError):
        triple_grouping(2)


@pytest.mark.parametrize("n, blocks", [
    (1, ((0,),)),
    (3, ((0, 1, 2),)),
    (4, ((3,), (0, 1, 2))),
    (5, ((3,), (0, 1, 2), (4,))),
    (6, ((0, 1, 2), (3, 4, 5))),
])
def test_lemma23_block_layout(n, blocks):
    assert build_lemma23(n).blocks == blocks


def test_lemma23_rejects_two_parts():
    with pytest.raises(PartitionSizeError):
        build_lemma23(2)


@given(st.integers(0, 40), st.integers(0, 40))
def test_lazy_tournament_agrees_with_truncation(x, y):
    lazy = LazyBlockTournament()
    finite = lazy.truncate(14)
    assert lazy.select(x, y) == finite.select(x, y)


def test_lazy_tournament_triples_are_circular():
    lazy = LazyBlockTournament()
    assert all(is_circular(lazy, 3 * k, 3 * k + 1, 3 * k + 2) for k in range(10))


@pytest.mark.parametrize("n", range(7, 13))
def test_lemma25_top_part_is_maximal(n):
    for S in range(n):
        sigma = build_lemma25(n, S)
        assert all(sigma.less(x, S) for x in range(n) if x != S)
        assert block_contract(sigma)


def test_lemma25_needs_seven_parts():
    with pytest.raises(PartitionSizeError):
        build_lemma25(6, 0)
    with pytest.raises(ValueError):
        build_lemma25(7, 9)


@pytest.mark.parametrize("q, r", [(6, 6), (6, 8), (8, 7)])
def test_cor26_sides_around_middle(q, r):
    Q, S, R = tuple(range(q)), "S", tuple(range(100, 100 + r))
    sigma = build_cor26(Q, S, R)
    for a, b in itertools.product(Q + (S,), (S,) + R):
        if a != b:
            assert sigma.less(a, b)
    assert block_contract(sigma)


def test_cor26_validation():
    with pytest.raises(PartitionSizeError):
        build_cor26(range(5), "S", range(10, 16))
    with pytest.raises(ValueError):
        build_cor26(range(6), 0, range(10, 16))


def test_block_contract_with_and_without_triples():
    """Single-part blocks are decisive and carry no triple to check."""
    good = BlockTournament([(0, 1, 2)])
    assert block_contract(good)
    sigma = BlockTournament([(0,), (1,), (2,)])
    assert block_contract(sigma)
    assert sigma.triples == []


@pytest.mark.parametrize("n", [3, 4, 5])
def test_certified_parts_also_open_by_search(n):
    """Witness certificates agree with the general openness search."""
    space = parse_model(isolated_segments(n, closed=False), f"{n} open segments")
    parts = component_parts(space)
    v = certify_partition_open(build_lemma23(n), parts)
    assert v, v.message
    assert all(w.replay(g, parts) for g in v.details["selections"][:1]
               for w in v.certificates[:n])
    sub = Subbase([v.details["selections"][0]])
    for p in parts:
        assert is_open(space, sub, p).status == "open"


def test_two_parts_can_fail():
    """On (0,1) ∪ {2} neither order of the two parts isolates the point."""
    space = load_model("M1")
    parts = component_parts(space)
    for order in ([0, 1], [1, 0]):
        v = certify_partition_open(Tournament.linear(order), parts)
        assert not v.ok
        assert v.details["part"] == 1


def test_leftover_between_triples_needs_four_intervals():
    """With two leftover parts, the one placed between two circular triples
    is cut out by two rays on each side, so three intervals are not enough."""
    n, S = 9, 0
    sigma = build_lemma25(n, S)
    assert sigma.blocks[2] == (8,)
    space = parse_model(isolated_segments(n), "9 segments")
    parts = component_parts(space)
    narrow = certify_partition_open(sigma, parts, bound=3)
    assert not narrow.ok and narrow.details["part"] == 8
    wide = certify_partition_open(sigma, parts, bound=4)
    assert wide and wide.details["max_terms"] == 4
