from fractions import Fraction

import pytest

from selectop.geometry import PreconditionError, purisch_witnesses
from selectop.selections import Swapped, Undetermined
from selectop.sets import SymbolicSet
from selectop.space import load_model, parse_model
from selectop.synth import (check_box, check_node_table, continuity_box, cut_box,
                            sample_pairs, synthesize, verify_continuity, verify_cut_boxes,
                            verify_invariance)
from selectop.topology import trace_intervals_match

F = Fraction


@pytest.fixture(scope="module")
def g4():
    return synthesize(load_model("M4"), 8)


@pytest.fixture(scope="module")
def g6():
    return synthesize(load_model("M6"), 6)


def test_finite_models_are_refused():
    with pytest.raises(PreconditionError):
        synthesize(load_model("M2"))


def test_every_node_case_occurs(g6):
    """Segments approached from the left (M5), both sides (M6) and the right."""
    right = parse_model("segment -1 0\nfamily limit=0 side=right ratio=1/2 seg=3/16..1/4", "R")
    cases = {}
    for g in (synthesize(load_model("M5"), 5), g6, synthesize(right, 5)):
        for ns in g.table(5).values():
            cases.setdefault(ns.case, ns)
    assert set(cases) == {"no-big-C", "lr=00", "lr=01", "lr=10", "lr=11"}
    top = cases["lr=10"]
    assert all(top.sigma.less(i, top.pi) for i in top.below)
    bottom = cases["lr=01"]
    assert all(bottom.sigma.less(bottom.pi, j) for j in bottom.above)


def test_node_table_contracts(g4, g6):
    assert check_node_table(g4)
    assert check_node_table(g6, 5)


def test_two_sided_node_orders_sides(g6):
    """Children below the big component precede it, children above follow."""
    for ns in g6.table(5).values():
        if ns.case != "lr=11":
            continue
        for i in ns.below:
            assert ns.sigma.less(i, ns.pi)
            assert all(ns.sigma.less(i, j) for j in ns.above)
        for j in ns.above:
            assert ns.sigma.less(ns.pi, j)


def test_same_component_uses_natural_order(g4):
    a, b = F(5, 8), F(3, 4)
    assert g4.select(a, b) == a and g4.select(b, a) == a


def test_selection_is_antisymmetric(g4):
    pts = purisch_witnesses(g4.space, 5)
    for x in pts:
        for y in pts:
            if x != y:
                assert g4.less(x, y) != g4.less(y, x)


def test_intervals_agree_with_pointwise_tournament(g4, g6):
    assert trace_intervals_match(g4, purisch_witnesses(g4.space, 6))
    assert trace_intervals_match(g6, purisch_witnesses(g6.space, 4))


def test_interval_at_accumulation_point_is_bounded(g4):
    """Rays at 0 are infinite unions of pieces: known between bounds whose
    gap lies in a clopen remainder."""
    b = g4.interval_bounds(0, "above")
    assert not b.exact
    assert b.remainder.is_clopen() and (b.upper - b.lower) <= b.remainder
    with pytest.raises(Undetermined):
        g4.interval(0, "above")
    assert g4.interval(F(5, 8), "below") == g4.interval_bounds(F(5, 8), "below").lower


def test_pairs_beyond_the_cap_are_undetermined(g4):
    tiny = g4.space.member(0, 40)
    with pytest.raises(Undetermined):
        g4.select(0, tiny.lo)


def test_invariance_holds(g4, g6):
    assert verify_invariance(g4)
    assert verify_invariance(g6, 4)


def test_invariance_catches_a_swapped_pair(g4):
    """Flipping one cross-piece pair must break uniform ordering."""
    x, y = F(5, 8), F(5, 16)
    bad = Swapped(g4, x, y)
    v = verify_invariance(g4, selection=bad)
    assert v.status == "fail"
    cert = v.certificates[0]
    assert cert.replay(bad)


def test_continuity_boxes(g4):
    assert verify_cut_boxes(g4)
    v = verify_continuity(g4, pairs=150, seed=3)
    assert v, v.message


def test_box_for_same_component_pair(g4):
    x, y = F(5, 8), F(11, 16)
    box = continuity_box(g4, x, y)
    assert box.kind == "cut"
    U, V = box.U, box.V
    assert x in U and y in V and U.is_open() and V.is_open()
    assert check_box(g4, box, purisch_witnesses(g4.space, 6)) is None
    U2, V2 = cut_box(g4, g4.space.component_of(x), (x + y) / 2)
    assert (U2, V2) == (U, V)


def test_sample_pairs_are_reproducible(g4):
    a = sample_pairs(g4.space, 20, seed=7)
    assert a == sample_pairs(g4.space, 20, seed=7)
    assert all(x in g4.space and y in g4.space and x != y for x, y in a)


def test_box_sets_are_model_sets(g4):
    x, y = sorted((F(0), F(5, 8)), key=lambda p: g4.less(F(5, 8), p))
    box = continuity_box(g4, x, y)
    assert isinstance(box.U, SymbolicSet) and box.kind == "pieces"
    assert x in box.U and y in box.V
    assert check_box(g4, box, purisch_witnesses(g4.space, 6)) is None
