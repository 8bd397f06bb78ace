from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from selectop.sets import Bounds, SymbolicSet, as_bounds
from selectop.space import load_model, parse_model

F = Fraction
M3 = load_model("M3")
M4 = load_model("M4")
FINITE = parse_model("point 0\nsegment 1 2\nsegment 3 4 open open\npoint 5", "finite")

ends = st.fractions(min_value=-1, max_value=6, max_denominator=8)


@st.composite
def atoms(draw):
    a, b = sorted((draw(ends), draw(ends)))
    return a, b, draw(st.booleans()), draw(st.booleans())


def build(space, spec):
    S = SymbolicSet.empty(space)
    for a, b, lc, rc in spec:
        S = S | SymbolicSet.interval(space, a, b, lc, rc)
    return S


def holds(spec, x):
    return any((a < x < b) or (x == a and lc and a <= b and (x < b or rc))
               or (x == b and rc and a <= b and (x > a or lc)) for a, b, lc, rc in spec)


probe = [F(k, 16) for k in range(-16, 97)]


@settings(max_examples=150, deadline=None)
@given(st.lists(atoms(), max_size=3), st.lists(atoms(), max_size=3))
def test_boolean_algebra_matches_pointwise(p, q):
    """&, |, - and complement agree with membership at every probe."""
    A, B = build(FINITE, p), build(FINITE, q)
    for x in probe:
        inside = x in FINITE
        a, b = holds(p, x) and inside, holds(q, x) and inside
        assert (x in A & B) == (a and b)
        assert (x in A | B) == (a or b)
        assert (x in A - B) == (a and not b)
        assert (x in A.complement()) == (inside and not a)


@settings(max_examples=150, deadline=None)
@given(st.lists(atoms(), max_size=3))
def test_normal_form_preserves_membership(p):
    A = build(FINITE, p)
    N = A.normalized()
    assert N == A
    assert all((x in A) == (x in N) for x in probe)
    assert A.issubset(N) and N.issubset(A)


def locally_open(space, S, points):
    """Oracle: near each listed point of S, the space stays inside S."""
    d = F(1, 10**6)
    for e in points:
        if e in S:
            for y in (e - d, e + d):
                if y in space and y not in S:
                    return False
    return True


@settings(max_examples=150, deadline=None)
@given(st.lists(atoms(), max_size=3))
def test_openness_matches_local_oracle(p):
    """Membership only changes at atom ends and component ends, so
    checking those points decides openness in a finite-component model."""
    S = build(FINITE, p)
    pts = {x for a, b, _, _ in p for x in (a, b)}
    pts |= {x for c in FINITE.basics for x in (c.lo, c.hi)}
    assert S.is_open() == locally_open(FINITE, S, pts)
    assert S.is_closed() == locally_open(FINITE, S.complement(), pts)


def test_components_are_clopen_in_finite_models():
    for c in M3.basics:
        assert SymbolicSet.component(M3, c).is_clopen()


def test_limit_point_blocks_openness():
    """{0} in M4 is closed but not open; each member is clopen."""
    zero = SymbolicSet.points(M4, [0])
    assert zero.is_closed() and not zero.is_open()
    assert zero.open_violation() == 0
    assert SymbolicSet.component(M4, M4.member(0, 5)).is_clopen()
    tail = SymbolicSet.below(M4, F(1, 2))
    assert tail.is_clopen()


def test_gaps_merge_in_normal_form():
    """Intervals separated only by gaps of the model are the same set."""
    a = SymbolicSet.interval(M3, F(-1, 2), F(3, 2))
    b = SymbolicSet.points(M3, [0, 1])
    assert a == b
    assert repr(b.normalized()) == "M3∩[0, 1]"


def test_extent_and_diam():
    S = SymbolicSet.interval(M4, F(1, 80), F(1))
    lo, lo_in, hi, hi_in = S.extent()
    assert (hi, hi_in) == (F(3, 4), True)
    assert (lo, lo_in) == (F(5, 256), True)
    assert S.diam() == F(3, 4) - F(5, 256)
    cut = SymbolicSet.interval(M4, F(1, 100), F(1))
    assert cut.extent()[:2] == (F(1, 100), False)


def test_finite_components_and_tails():
    S = SymbolicSet.below(M4, F(1, 10))
    assert S.finite_components() is None
    comps, tails = S.component_summary()
    assert comps == [M4.component_of(F(0))]
    assert tails == [(0, 3)]


def test_sample_point_lies_in_set():
    for S in (SymbolicSet.above(M3, F(2)), SymbolicSet.below(M4, F(1, 10)),
              SymbolicSet.points(M3, [1])):
        assert S.sample_point() in S
    assert SymbolicSet.empty(M3).sample_point() is None


def test_bounds_exactness():
    S = SymbolicSet.points(M3, [0])
    assert as_bounds(S).exact
    wide = Bounds(S, S | SymbolicSet.points(M3, [1]))
    assert not wide.exact
    assert as_bounds(wide) is wide
