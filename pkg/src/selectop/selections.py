"""Weak selections: finite tournaments and structured selections on models.

A weak selection picks one element of every pair.  ``x <_s y`` means the
selection picks ``x`` from ``{x, y}``.  On finite carriers selections are
plain tournaments; on models (infinite carriers) they are small ASTs whose
order intervals can be computed exactly as :class:`SymbolicSet` values.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Optional, Sequence

from .sets import Bounds, SymbolicSet
from .space import SymbolicSpace

FORWARD, REVERSE = "forward", "reverse"


class Undetermined(RuntimeError):
    """Raised when an exact answer needs more work than the configured bound."""


class NotInCarrier(ValueError):
    pass


# ---------------------------------------------------------------------------
# finite tournaments
# ---------------------------------------------------------------------------


class Tournament:
    """A weak selection on a finite carrier.

    ``winner`` maps ``frozenset({x, y})`` to the chosen element for every
    unordered pair of distinct carrier elements.
    """

    def __init__(self, carrier: Sequence[Hashable], winner: dict):
        self.carrier = tuple(carrier)
        if len(set(self.carrier)) != len(self.carrier):
            raise ValueError("carrier elements must be distinct")
        self._index = {x: i for i, x in enumerate(self.carrier)}
        self._winner = dict(winner)
        for x, y in itertools.combinations(self.carrier, 2):
            w = self._winner.get(frozenset((x, y)))
            if w not in (x, y):
                raise ValueError(f"pair {{{x!r}, {y!r}}} is not decided")

    @classmethod
    def linear(cls, order: Sequence[Hashable]):
        """The tournament of a linear order, smallest element first."""
        return cls.from_relation(order, lambda x, y: True)

    @classmethod
    def from_relation(cls, carrier: Sequence[Hashable], first_wins: Callable):
        """``first_wins(x, y)`` (called with x before y in ``carrier``) says
        whether x is selected from ``{x, y}``."""
        carrier = tuple(carrier)
        winner = {}
        for x, y in itertools.combinations(carrier, 2):
            winner[frozenset((x, y))] = x if first_wins(x, y) else y
        return cls(carrier, winner)

    @classmethod
    def from_code(cls, carrier: Sequence[Hashable], code: int):
        """The tournament whose pair ``k`` (lexicographic) is reversed iff bit
        ``k`` of ``code`` is set; code 0 is the listed linear order."""
        carrier = tuple(carrier)
        winner = {}
        for k, (x, y) in enumerate(itertools.combinations(carrier, 2)):
            winner[frozenset((x, y))] = y if code >> k & 1 else x
        return cls(carrier, winner)

    def __contains__(self, x):
        return x in self._index

    def _check(self, *xs):
        for x in xs:
            if x not in self._index:
                raise NotInCarrier(f"{x!r} is not in the carrier")

    def select(self, x, y):
        self._check(x, y)
        if x == y:
            return x
        return self._winner[frozenset((x, y))]

    def less(self, x, y) -> bool:
        return x != y and self.select(x, y) == x

    def below(self, x) -> frozenset:
        self._check(x)
        return frozenset(y for y in self.carrier if self.less(y, x))

    def above(self, x) -> frozenset:
        self._check(x)
        return frozenset(y for y in self.carrier if self.less(x, y))

    def is_transitive(self) -> bool:
        return not any(is_circular(self, *t) for t in itertools.combinations(self.carrier, 3))

    def reversed(self):
        return Tournament(self.carrier, {k: next(iter(k - {w})) if len(k) == 2 else w
                                         for k, w in self._winner.items()})

    def code(self) -> int:
        return sum(1 << k for k, (x, y) in enumerate(itertools.combinations(self.carrier, 2))
                   if self._winner[frozenset((x, y))] == y)

    def __eq__(self, other):
        return isinstance(other, Tournament) and self.carrier == other.carrier \
            and self._winner == other._winner

    def __hash__(self):
        return hash((self.carrier, self.code()))

    def __repr__(self):
        pairs = ", ".join(f"{x}<{y}" if self.less(x, y) else f"{y}<{x}"
                          for x, y in itertools.combinations(self.carrier, 2))
        return f"Tournament({pairs})"


# ---------------------------------------------------------------------------
# structured selections over a model
# ---------------------------------------------------------------------------


class Structured:
    """Common protocol of selections over a symbolic model."""

    space: SymbolicSpace
    carrier: SymbolicSet

    def _check(self, *xs):
        for x in xs:
            if x not in self.carrier:
                raise NotInCarrier(f"{x} is not in the carrier {self.carrier!r}")

    def select(self, x, y):
        raise NotImplementedError

    def less(self, x, y) -> bool:
        x, y = Fraction(x), Fraction(y)
        return x != y and self.select(x, y) == x

    def interval_bounds(self, x, side: str) -> Bounds:
        """``Bounds`` for ``(←,x)`` (side "below") or ``(x,→)`` (side "above")."""
        return Bounds(self.interval(x, side))

    def interval(self, x, side: str) -> SymbolicSet:
        raise NotImplementedError

    def set_below(self, A: SymbolicSet) -> SymbolicSet:
        """``{x : x <_s a for every a in A}``."""
        raise Undetermined(f"set intervals are not supported for {type(self).__name__}")

    def set_above(self, A: SymbolicSet) -> SymbolicSet:
        raise Undetermined(f"set intervals are not supported for {type(self).__name__}")

    def describe(self) -> str:
        return repr(self)


@dataclass(frozen=True, eq=False)
class Canonical(Structured):
    """The natural order of the model (``forward``) or its reverse."""

    space: SymbolicSpace
    direction: str = FORWARD
    carrier: Optional[SymbolicSet] = None

    def __post_init__(self):
        if self.direction not in (FORWARD, REVERSE):
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.carrier is None:
            object.__setattr__(self, "carrier", SymbolicSet.whole(self.space))

    def select(self, x, y):
        x, y = Fraction(x), Fraction(y)
        self._check(x, y)
        return min(x, y) if self.direction == FORWARD else max(x, y)

    def interval(self, x, side):
        x = Fraction(x)
        self._check(x)
        natural_below = (side == "below") == (self.direction == FORWARD)
        cut = SymbolicSet.below(self.space, x) if natural_below else SymbolicSet.above(self.space, x)
        return (self.carrier & cut).normalized()

    def _set_side(self, A, below):
        ext = A.extent()
        if ext is None:
            return self.carrier
        natural_below = below == (self.direction == FORWARD)
        if natural_below:
            cut = SymbolicSet.below(self.space, ext[0], closed=not ext[1])
        else:
            cut = SymbolicSet.above(self.space, ext[2], closed=not ext[3])
        return (self.carrier & cut).normalized()

    def set_below(self, A):
        return self._set_side(A, True)

    def set_above(self, A):
        return self._set_side(A, False)

    def reversed(self):
        return Canonical(self.space, REVERSE if self.direction == FORWARD else FORWARD, self.carrier)

    def describe(self):
        return "canonical(fwd)" if self.direction == FORWARD else "canonical(rev)"

    def __repr__(self):
        return f"Canonical({self.direction}, {self.carrier!r})"


@dataclass(frozen=True, eq=False)
class Invariant(Structured):
    """``top * children``: the top tournament between parts, each child inside
    its part.  ``top`` is a tournament on part indices ``0..len(parts)-1``."""

    parts: tuple
    top: Tournament
    children: tuple
    carrier: SymbolicSet = field(default=None)

    def __post_init__(self):
        parts = tuple(p.normalized() for p in self.parts)
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "children", tuple(self.children))
        if not parts:
            raise ValueError("an invariant combination needs at least one part")
        if len(self.children) != len(parts):
            raise ValueError("one child selection per part is required")
        if set(self.top.carrier) != set(range(len(parts))):
            raise ValueError("top must be a tournament on part indices")
        for i, j in itertools.combinations(range(len(parts)), 2):
            if not (parts[i] & parts[j]).is_empty():
                raise ValueError(f"parts {i} and {j} overlap")
        for i, (p, c) in enumerate(zip(parts, self.children)):
            if not p <= c.carrier:
                raise ValueError(f"child {i} does not cover its part")
        union = parts[0]
        for p in parts[1:]:
            union = union | p
        object.__setattr__(self, "carrier", union.normalized())

    @property
    def space(self):
        return self.parts[0].space

    def part_of(self, x) -> int:
        for i, p in enumerate(self.parts):
            if x in p:
                return i
        raise NotInCarrier(f"{x} lies in no part")

    def select(self, x, y):
        x, y = Fraction(x), Fraction(y)
        i, j = self.part_of(x), self.part_of(y)
        if i == j:
            return self.children[i].select(x, y)
        return x if self.top.select(i, j) == i else y

    def _blocks(self, i, side) -> SymbolicSet:
        """Union of the parts on ``side`` of part ``i`` (cached)."""
        cache = self.__dict__.setdefault("_block_cache", {})
        got = cache.get((i, side))
        if got is None:
            got = SymbolicSet.empty(self.space)
            for k in (self.top.below(i) if side == "below" else self.top.above(i)):
                got = got | self.parts[k]
            got = cache[(i, side)] = got.normalized()
        return got

    def interval(self, x, side):
        x = Fraction(x)
        i = self.part_of(x)
        return (self.children[i].interval(x, side) & self.parts[i]) | self._blocks(i, side)

    def interval_bounds(self, x, side):
        x = Fraction(x)
        i = self.part_of(x)
        inner = self.children[i].interval_bounds(x, side)
        blocks = self._blocks(i, side)
        return Bounds((inner.lower & self.parts[i]) | blocks, (inner.upper & self.parts[i]) | blocks)

    def _set_side(self, A, below):
        meets = [i for i, p in enumerate(self.parts) if not (p & A).is_empty()]
        rel = self.top.less if below else (lambda a, b: self.top.less(b, a))
        out = SymbolicSet.empty(self.space)
        for k, p in enumerate(self.parts):
            others = [i for i in meets if i != k]
            if not all(rel(k, i) for i in others):
                continue
            if k in meets:
                child = self.children[k]
                inner = child.set_below(A & p) if below else child.set_above(A & p)
                out = out | (inner & p)
            else:
                out = out | p
        return out.normalized()

    def set_below(self, A):
        return self._set_side(A, True)

    def set_above(self, A):
        return self._set_side(A, False)

    def describe(self):
        kids = ", ".join(c.describe() for c in self.children)
        return f"invariant(top={self.top!r}; parts={list(self.parts)!r}; children=[{kids}])"

    def __repr__(self):
        return f"Invariant({len(self.parts)} parts, {self.top!r})"


@dataclass(frozen=True, eq=False)
class Swapped(Structured):
    """``base`` with the choice on the single pair ``{a, b}`` flipped (used to
    build deliberately broken selections in tests)."""

    base: Structured
    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.a == self.b:
            raise ValueError("swapped points must differ")
        self.base._check(self.a, self.b)

    @property
    def space(self):
        return self.base.space

    @property
    def carrier(self):
        return self.base.carrier

    def select(self, x, y):
        x, y = Fraction(x), Fraction(y)
        chosen = self.base.select(x, y)
        if {x, y} == {self.a, self.b}:
            return y if chosen == x else x
        return chosen

    def interval(self, x, side):
        x = Fraction(x)
        out = self.base.interval(x, side)
        if x not in (self.a, self.b):
            return out
        other = self.b if x == self.a else self.a
        return out.without(other) if other in out else out.adding(other)

    def _set_side(self, A, below):
        base_side = self.base.set_below if below else self.base.set_above
        out = base_side(A).without(self.a).without(self.b)
        for p, other in ((self.a, self.b), (self.b, self.a)):
            if p in A or p not in base_side(A.without(other)):
                continue
            if other in A and not (self.less(p, other) if below else self.less(other, p)):
                continue
            out = out.adding(p)
        return out.normalized()

    def set_below(self, A):
        return self._set_side(A, True)

    def set_above(self, A):
        return self._set_side(A, False)

    def __repr__(self):
        return f"Swapped({self.base!r}, {self.a}, {self.b})"


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------


def select(s, x, y):
    return s.select(x, y)


def interval_below(s, x):
    if isinstance(s, Tournament):
        return s.below(x)
    return s.interval(x, "below")


def interval_above(s, x):
    if isinstance(s, Tournament):
        return s.above(x)
    return s.interval(x, "above")


def set_intervals(s, A):
    """``(below, above)``: elements selected against every element of A, and
    elements every element of A is selected against."""
    if isinstance(s, Tournament):
        A = frozenset(A)
        below = frozenset(x for x in s.carrier if all(s.less(x, a) for a in A))
        above = frozenset(x for x in s.carrier if all(s.less(a, x) for a in A))
        return below, above
    return s.set_below(A), s.set_above(A)


@dataclass(frozen=True)
class DecisiveCertificate:
    """``decisive`` or a violating pair of parts with replayable witnesses:
    ``x <_s y`` and ``y2 <_s x2`` with ``x, x2`` in ``parts[i]`` and
    ``y, y2`` in ``parts[j]``."""

    decisive: bool
    i: Optional[int] = None
    j: Optional[int] = None
    x: object = None
    y: object = None
    x2: object = None
    y2: object = None

    def __bool__(self):
        return self.decisive

    def replay(self, s) -> bool:
        if self.decisive:
            return True
        return s.less(self.x, self.y) and s.less(self.y2, self.x2)


def _finite_violation(s, parts):
    for i, j in itertools.combinations(range(len(parts)), 2):
        up = down = None
        for x in parts[i]:
            for y in parts[j]:
                if s.less(x, y):
                    up = up or (x, y)
                else:
                    down = down or (x, y)
                if up and down:
                    return DecisiveCertificate(False, i, j, up[0], up[1], down[0], down[1])
    return DecisiveCertificate(True)


def _witness_in(S: SymbolicSet):
    p = S.sample_point()
    if p is None:  # pragma: no cover - callers check non-emptiness
        raise Undetermined("no sample point")
    return p


def is_decisive(s, parts) -> DecisiveCertificate:
    """Whether every two parts are uniformly ordered by ``s``."""
    if isinstance(s, Tournament):
        parts = [frozenset(p) for p in parts]
        for a, b in itertools.combinations(parts, 2):
            if a & b:
                raise ValueError("parts overlap")
        return _finite_violation(s, parts)
    parts = list(parts)
    for i, j in itertools.combinations(range(len(parts)), 2):
        if not (parts[i] & parts[j]).is_empty():
            raise ValueError(f"parts {i} and {j} overlap")
    for i, j in itertools.combinations(range(len(parts)), 2):
        P, Q = parts[i], parts[j]
        if P <= s.set_below(Q) or P <= s.set_above(Q):
            continue
        # x is not below all of Q and x2 is not above all of Q
        x = _witness_in(P - s.set_below(Q))
        x2 = _witness_in(P - s.set_above(Q))
        y_low = _witness_in(s.interval(x, "below") & Q)
        y_high = _witness_in(s.interval(x2, "above") & Q)
        return DecisiveCertificate(False, i, j, x2, y_high, x, y_low)
    return DecisiveCertificate(True)


def is_circular(s, x, y, z) -> bool:
    if len({x, y, z}) != 3:
        raise ValueError("a circular triple needs three distinct elements")
    return (s.less(x, y) and s.less(y, z) and s.less(z, x)) or \
        (s.less(y, x) and s.less(z, y) and s.less(x, z))


def combine_invariant(top: Tournament, children: Sequence, parts: Sequence[SymbolicSet]):
    """The invariant combination of ``top`` with ``children``; a single part
    returns its child unchanged."""
    if len(parts) == 1:
        child = children[0]
        if not parts[0] <= child.carrier:
            raise ValueError("child does not cover the part")
        return child
    return Invariant(tuple(parts), top, tuple(children))


def restrict(s, points: Iterable) -> Tournament:
    """The tournament induced by ``s`` on a finite subset of its carrier."""
    pts = sorted(set(Fraction(p) for p in points))
    return Tournament.from_relation(pts, lambda a, b: s.select(a, b) == a)


def uniformly_below(s, U: SymbolicSet, V: SymbolicSet) -> bool:
    """Every element of U is selected against every element of V."""
    return U <= s.set_below(V)


def continuity_box(s, space, x, y, budget: int = 16):
    """Open ``U ∋ x`` and ``V ∋ y`` with ``U <_s V``, or None when no box is
    found among ``budget`` candidates.

    Candidates are the invariant parts containing x and y (when open), then
    midpoint cuts, then shrinking symmetric balls.
    """
    x, y = Fraction(x), Fraction(y)
    if not s.less(x, y):
        raise ValueError(f"{x} is not selected against {y}")
    tried = 0
    for U, V in _box_candidates(s, space, x, y):
        if tried >= budget:
            return None
        tried += 1
        if x in U and y in V and U.is_open() and V.is_open() and uniformly_below(s, U, V):
            return U.normalized(), V.normalized()
    return None


def _box_candidates(s, space, x, y):
    if isinstance(s, Invariant):
        i, j = s.part_of(x), s.part_of(y)
        if i != j:
            yield s.parts[i], s.parts[j]
        else:
            sub = continuity_box(s.children[i], space, x, y)
            if sub is not None:
                yield sub[0] & s.parts[i], sub[1] & s.parts[i]
    lo, hi = min(x, y), max(x, y)
    m = (lo + hi) / 2
    gap = hi - lo
    below_m = SymbolicSet.interval(space, lo - gap, m)
    above_m = SymbolicSet.interval(space, m, hi + gap)
    yield (below_m, above_m) if x < y else (above_m, below_m)
    r = gap / 4
    while True:
        yield (SymbolicSet.interval(space, x - r, x + r),
               SymbolicSet.interval(space, y - r, y + r))
        r /= 2
