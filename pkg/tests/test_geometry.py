from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selectop.geometry import (PreconditionError, big_components, clopen_separation,
                               convexity_violations, delta, in_D, in_D_eps, lr_flags,
                               purisch_witnesses, shrink_epsilon, split_clopen)
from selectop.sets import SymbolicSet
from selectop.space import load_model

F = Fraction
M1, M2, M4, M5, M6 = (load_model(n) for n in ("M1", "M2", "M4", "M5", "M6"))


def comp(space, x):
    return space.component_of(F(x))


def test_flags_follow_approaching_families():
    assert lr_flags(M4, comp(M4, 0)) == (0, 1)
    assert lr_flags(M5, comp(M5, 2)) == (1, 0)
    assert lr_flags(M6, comp(M6, 2)) == (1, 1)
    assert lr_flags(M4, M4.member(0, 2)) == (0, 0)
    assert lr_flags(M1, comp(M1, F(1, 2))) == (0, 0)


def test_delta_cases():
    """Δ is C itself for clopen C, else the half-ball on approached sides."""
    assert delta(M4, comp(M4, 0), F(1, 4)) == SymbolicSet.interval(M4, 0, F(1, 8), True, False)
    assert delta(M5, comp(M5, 2), F(1, 2)) == SymbolicSet.interval(M5, F(7, 4), 3, False, True)
    assert delta(M6, comp(M6, 2), F(1, 2)) == SymbolicSet.interval(M6, F(7, 4), F(13, 4))
    S2 = M4.member(0, 2)
    assert delta(M4, S2, 1) == SymbolicSet.component(M4, S2)
    with pytest.raises(PreconditionError):
        delta(M4, S2, 0)


def test_big_components_counts_members():
    """Member n of M4 has diameter 2^-(n+3)."""
    X = SymbolicSet.whole(M4)
    assert big_components(M4, X, F(1, 16)) == [M4.member(0, 1), M4.member(0, 0)]
    assert big_components(M4, X, F(1, 8)) == [M4.member(0, 0)]
    assert big_components(M4, X, F(1, 4)) == []
    assert big_components(M5, SymbolicSet.whole(M5), F(1, 2)) == [comp(M5, 2)]


def test_big_components_needs_clopen():
    with pytest.raises(ValueError):
        big_components(M4, SymbolicSet.points(M4, [0]), F(1, 2))


def test_membership_in_D():
    assert in_D(M4, SymbolicSet.whole(M4))
    assert not in_D(M2, SymbolicSet.whole(M2))
    assert in_D(M2, SymbolicSet.component(M2, comp(M2, 0)))
    assert in_D_eps(M4, SymbolicSet.whole(M4), 1)
    assert not in_D_eps(M4, SymbolicSet.whole(M4), F(1, 2))
    assert in_D_eps(M4, SymbolicSet.below(M4, F(1, 8)), F(1, 4))


def test_split_clopen_takes_an_end_component():
    X = SymbolicSet.whole(M4)
    rest, piece = split_clopen(M4, X)
    assert piece == SymbolicSet.component(M4, M4.member(0, 0))
    assert (rest | piece) == X and (rest & piece).is_empty()
    with pytest.raises(PreconditionError):
        split_clopen(M2, SymbolicSet.whole(M2))


def test_clopen_separation_and_shrink():
    C = comp(M4, 0)
    U = SymbolicSet.below(M4, F(1, 10))
    assert clopen_separation(M4, C, U) == SymbolicSet.hull_of(M4, 0, F(3, 32))
    assert shrink_epsilon(M4, C, U) == F(1, 4)


@settings(max_examples=60, deadline=None)
@given(st.fractions(min_value=F(1, 1000), max_value=F(5, 2), max_denominator=1000))
def test_clopen_separation_is_clopen_between(q):
    """For every open U = [2-q..] around [2,3] in M6 the separation is a
    clopen convex set between the component and U."""
    C = comp(M6, 2)
    U = SymbolicSet.interval(M6, 2 - q, 3 + q)
    V = clopen_separation(M6, C, U)
    assert V.is_clopen()
    assert SymbolicSet.component(M6, C) <= V <= U
    assert len(V.canonical()) == 1


def test_witnesses_cover_each_component():
    assert purisch_witnesses(M1) == [F(1, 4), F(1, 2), F(3, 4), F(2)]
    W = purisch_witnesses(M4, 3)
    for n in range(4):
        assert sum(w in M4.member(0, n) for w in W) == 3
    assert F(0) in W
    assert convexity_violations(M4, W) == []
