from fractions import Fraction

import pytest

from selectop.cws import (Candidate, canonical_pair, check_theorem21, component_sets, cws,
                          enumerate_candidates, lemma23_cws_one, orderability,
                          representatives, sum_model, sweep_models)
from selectop.geometry import PreconditionError
from selectop.selections import FORWARD
from selectop.sets import SymbolicSet
from selectop.space import load_model
from selectop.topology import Subbase, topology_equals_model

F = Fraction
M1, M2, M3 = (load_model(n) for n in ("M1", "M2", "M3"))


def test_candidate_counts():
    """Two components, one orientable: 2 tournaments times 2 orientations."""
    assert len(list(enumerate_candidates(M1))) == 4
    assert len(representatives(M1)) == 2
    assert len(list(enumerate_candidates(M3))) == 8 * 2
    assert len(list(enumerate_candidates(M3, transitive_only=True))) == 6 * 2


def test_reversal_is_an_involution():
    for c in enumerate_candidates(M3):
        assert c.reversed().reversed() == c
        assert c.representative() == c.reversed().representative()


def test_reversed_candidate_reverses_every_pair():
    c = Candidate((FORWARD, None), 0, 2)
    g, h = c.realize(M1), c.reversed().realize(M1)
    pts = [F(1, 4), F(1, 2), F(2)]
    for x in pts:
        for y in pts:
            if x != y:
                assert g.less(x, y) == h.less(y, x)
    assert str(c) == "tournament#0/+."


@pytest.mark.parametrize("kinds", [("open", "point"), ("closed", "open"), ("point", "point", "open")])
def test_reversal_keeps_the_topology_verdict(kinds):
    """The pruning is sound: a candidate and its reversal get the same verdict."""
    space = sum_model(kinds)
    for c in enumerate_candidates(space):
        a = topology_equals_model(space, Subbase([c.realize(space)]))
        b = topology_equals_model(space, Subbase([c.reversed().realize(space)]))
        assert a.status == b.status


@pytest.mark.parametrize("name, value", [("M1", 2), ("M2", 1), ("M3", 1)])
def test_cws_of_builtin_models(name, value):
    rep = cws(load_model(name))
    assert rep.value == value
    assert rep.verdict.ok
    assert f"= {value}" in rep.summary()


def test_cws_of_m1_rejects_singletons_at_the_point():
    rep = cws(M1)
    assert len(rep.rejected) == 2
    for _, v in rep.rejected:
        assert v.status == "fail"
        assert F(2) in v.details["target"]


def test_cws_search_limit():
    rep = cws(M1, max_k=1)
    assert not rep.found and "undetermined" in rep.summary()
    with pytest.raises(ValueError):
        cws(M1, max_k=0)
    with pytest.raises(PreconditionError):
        cws(load_model("M4"))


def test_canonical_pair_on_m1():
    parts = component_sets(M1)
    g, h, v = canonical_pair(M1, parts[0], parts[1])
    assert v, v.message
    assert g.less(F(1, 2), F(2)) and h.less(F(2), F(1, 2))


def test_canonical_pair_needs_a_clopen_partition():
    half = SymbolicSet.interval(M1, 0, F(1, 2))
    with pytest.raises(PreconditionError):
        canonical_pair(M1, half, SymbolicSet.whole(M1) - half)
    parts = component_sets(M1)
    with pytest.raises(PreconditionError):
        canonical_pair(M1, parts[0], parts[0])


def test_lemma23_selection_on_three_components():
    g, v = lemma23_cws_one(M3)
    assert v, v.message
    with pytest.raises(PreconditionError):
        lemma23_cws_one(M2)


def test_orderability():
    ok, witness, _ = orderability(M2)
    assert ok and witness is not None
    ok, witness, checked = orderability(M1)
    assert not ok and witness is None and checked == 2


def test_sweep_corpus():
    models = sweep_models(4)
    assert len(models) == 3 + 6 + 10 + 15
    assert sum_model(["point", "open"]).name == "point+open"
    with pytest.raises(ValueError):
        sum_model(["blob"])


@pytest.mark.parametrize("kinds, value, orderable", [
    (("open", "point"), 2, False),
    (("closed", "closed"), 1, True),
    (("open",), 1, True),
    (("point", "point", "point"), 1, None),
])
def test_dichotomy_on_small_models(kinds, value, orderable):
    d = check_theorem21(sum_model(kinds))
    assert d.verdict, d.verdict.message
    assert d.cws.value == value and d.orderable is orderable


def test_candidate_count_closed_form():
    """2^C(m,2) tournaments times 2 orientations per segment, halved by reversal
    when some component is orientable or some pair exists."""
    for space in sweep_models(4):
        m = len(space.basics)
        d = sum(not c.degenerate for c in space.basics)
        total = 2 ** (m * (m - 1) // 2) * 2 ** d
        assert len(list(enumerate_candidates(space))) == total
        assert len(representatives(space)) == (total + 1) // 2
