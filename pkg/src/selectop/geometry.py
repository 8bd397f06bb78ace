"""Component neighbourhoods of a model under the standard (convex) metric."""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterator, Optional

import portion as P

from .sets import SymbolicSet
from .space import LEFT, RIGHT, ComponentRef, SymbolicSpace

DEFAULT_DEPTH = 8


class NotClopenError(ValueError):
    """A set required to be clopen is not; ``point`` lies on its boundary."""

    def __init__(self, point, what="set"):
        super().__init__(f"{what} is not clopen: boundary point {point}")
        self.point = point


class PreconditionError(ValueError):
    pass


def require_clopen(U: SymbolicSet, what="set"):
    b = U.boundary_point()
    if b is not None:
        raise NotClopenError(b, what)


def components(space: SymbolicSpace, restrict_to: Optional[SymbolicSet] = None) -> Iterator[ComponentRef]:
    """Components of a clopen set in positional order (family tails expanded
    lazily); the stream terminates iff there are finitely many."""
    U = SymbolicSet.whole(space) if restrict_to is None else restrict_to
    require_clopen(U)
    return U.components()


def component_set(space, C: ComponentRef) -> SymbolicSet:
    return SymbolicSet.component(space, C)


def lr_flags(space: SymbolicSpace, C: ComponentRef) -> tuple[int, int]:
    """``(l, r)``: whether points below (above) C accumulate at C's end."""
    ell = int(not C.lo_open and any(
        f.side == LEFT and f.limit == C.lo for f in space.families))
    r = int(not C.hi_open and any(
        f.side == RIGHT and f.limit == C.hi for f in space.families))
    return ell, r


def ball(space, C: ComponentRef, radius: Fraction) -> SymbolicSet:
    """Open ``radius``-ball around C."""
    return SymbolicSet.interval(space, C.lo - radius, C.hi + radius)


def delta(space: SymbolicSpace, C: ComponentRef, eps) -> SymbolicSet:
    """Δ(C, ε): C itself when both order-intervals of C are clopen, otherwise
    the ε/2-ball cut down to the side(s) where C is approached."""
    eps = Fraction(eps)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    ell, r = lr_flags(space, C)
    half = eps / 2
    if not ell and not r:
        return component_set(space, C)
    lo, lo_closed = (C.lo - half, False) if ell else (C.lo, True)
    hi, hi_closed = (C.hi + half, False) if r else (C.hi, True)
    return SymbolicSet.interval(space, lo, hi, lo_closed, hi_closed)


def big_components(space, U: SymbolicSet, eps) -> list[ComponentRef]:
    """Components of the clopen set U with diameter at least eps."""
    eps = Fraction(eps)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    require_clopen(U)
    comps, tails = U.component_summary()
    out = [C for C in comps if C.diam >= eps]
    for j, n0 in tails:
        f = space.families[j]
        n = n0
        while f.member_diam(n) >= eps:
            out.append(space.member(j, n))
            n += 1
    return sorted(out)


def is_single_component(U: SymbolicSet) -> bool:
    comps = U.finite_components()
    return comps is not None and len(comps) == 1 and \
        SymbolicSet.component(U.space, comps[0]) == U


def in_D(space, U: SymbolicSet) -> bool:
    """U is clopen and either one component or infinitely many."""
    require_clopen(U)
    if U.is_empty():
        raise PreconditionError("U must be nonempty")
    comps = U.finite_components()
    return comps is None or len(comps) == 1


def in_D_eps(space, U: SymbolicSet, eps) -> bool:
    eps = Fraction(eps)
    if not in_D(space, U):
        return False
    if U.diam() < eps:
        return True
    return any(U <= delta(space, C, eps) for C in big_components(space, U, eps))


def _extreme_clopen_component(space, U):
    ext = U.extent()
    for x, attained in ((ext[0], ext[1]), (ext[2], ext[3])):
        if not attained:
            continue
        C = space.component_of(x)
        if lr_flags(space, C) == (0, 0):
            return C
    for C in U.components():
        if lr_flags(space, C) == (0, 0):
            return C
    return None


def split_clopen(space, U: SymbolicSet) -> tuple[SymbolicSet, SymbolicSet]:
    """Partition U (in 𝒟 with infinitely many components) into two 𝒟-sets.

    Splits off a clopen component at an end of U when there is one (left end
    first), otherwise the first clopen component in stream order.
    """
    require_clopen(U)
    if U.finite_components() is not None:
        raise PreconditionError("split_clopen needs infinitely many components")
    C = _extreme_clopen_component(space, U)
    if C is None:  # pragma: no cover - family members are always clopen
        raise PreconditionError("no clopen component to split off")
    piece = component_set(space, C)
    return (U - piece).normalized(), piece.normalized()


def _side_cut(space, C: ComponentRef, U: SymbolicSet, side: str, fits) -> Fraction:
    """Outer end of the part of U hugging C on ``side``.

    Walks family members approaching C's end from ``side`` and returns the
    far end of the first member ``k`` for which ``fits(k_end)`` holds and
    every later member lies in U.
    """
    end = C.lo if side == LEFT else C.hi
    fams = [j for j, f in enumerate(space.families) if f.limit == end and f.side == side]
    if not fams:
        return end
    j = fams[0]
    f = space.families[j]
    k = 0
    while True:
        lo, hi = f.member(k)
        far = lo if side == LEFT else hi
        hull = P.closed(far, end) if side == LEFT else P.closed(end, far)
        if fits(far) and SymbolicSet(space, hull) <= U:
            return far
        k += 1


def clopen_separation(space, C: ComponentRef, U: SymbolicSet) -> SymbolicSet:
    """Smallest-index convex clopen V with C ⊆ V ⊆ U (U open)."""
    if not component_set(space, C) <= U:
        raise PreconditionError("C is not contained in U")
    if not U.is_open():
        raise PreconditionError(f"U is not open at {U.open_violation()}")
    lo = _side_cut(space, C, U, LEFT, lambda far: True)
    hi = _side_cut(space, C, U, RIGHT, lambda far: True)
    return SymbolicSet.hull_of(space, lo, hi).normalized()


def shrink_epsilon(space, C: ComponentRef, U: SymbolicSet) -> Fraction:
    """Some rational ε > 0 (a power of 1/2) with Δ(C, ε) ⊆ U."""
    if not component_set(space, C) <= U or not U.is_open():
        raise PreconditionError("U must be an open set containing C")
    eps = Fraction(1)
    while not delta(space, C, eps) <= U:
        eps /= 2
    return eps


def purisch_witnesses(space, depth: int = DEFAULT_DEPTH) -> list[Fraction]:
    """Finite transversal of the components materialized to ``depth``:
    endpoints of closed ends (quarter points for open ends), each segment's
    midpoint, and every singleton."""
    if depth < 0:
        raise PreconditionError("depth must be non-negative")
    pts = set()
    for C in space.materialized_components(depth):
        pts.update(component_witnesses(C))
    return sorted(pts)


def component_witnesses(C: ComponentRef) -> list[Fraction]:
    if C.degenerate:
        return [C.lo]
    quarter = (C.hi - C.lo) / 4
    return [C.lo + quarter if C.lo_open else C.lo, (C.lo + C.hi) / 2,
            C.hi - quarter if C.hi_open else C.hi]


def convexity_violations(space, points) -> list[tuple]:
    """Triples x <= y <= z breaking max(|x-y|, |y-z|) <= |x-z| (never any for
    the standard metric; kept as a guard)."""
    pts = sorted(points)
    bad = []
    for x, y, z in itertools.combinations(pts, 3):
        if max(y - x, z - y) > z - x:
            bad.append((x, y, z))
    return bad
