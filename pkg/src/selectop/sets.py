"""Exact subsets of a model: ``X ∩ I`` for a finite union of intervals ``I``.

Every set the library manipulates (component neighbourhoods, selection
intervals, sieve pieces, family tails) has this form.  The canonical form
replaces ``I`` by the union of the closed/open hulls of the maximal
X-convex pieces of the set, so structural equality of canonical forms is set
equality.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional

import portion as P

from .space import ComponentRef, SymbolicSpace


def _atom(lo, lo_closed, hi, hi_closed):
    return P.Interval.from_atomic(P.CLOSED if lo_closed else P.OPEN, lo, hi,
                                  P.CLOSED if hi_closed else P.OPEN)


class SymbolicSet:
    """An exact subset of ``space``; immutable."""

    __slots__ = ("space", "_iv", "_canon")

    def __init__(self, space: SymbolicSpace, iv: P.Interval = P.empty(), *, _canonical=False):
        self.space = space
        self._iv = iv
        self._canon = iv if _canonical else None

    # ---- constructors -------------------------------------------------------

    @classmethod
    def whole(cls, space):
        return cls(space, P.open(-P.inf, P.inf))

    @classmethod
    def empty(cls, space):
        return cls(space, P.empty(), _canonical=True)

    @classmethod
    def interval(cls, space, lo=-P.inf, hi=P.inf, lo_closed=False, hi_closed=False):
        if lo is not -P.inf:
            lo = Fraction(lo)
        if hi is not P.inf:
            hi = Fraction(hi)
        return cls(space, _atom(lo, lo_closed, hi, hi_closed))

    @classmethod
    def below(cls, space, x, closed=False):
        return cls.interval(space, hi=x, hi_closed=closed)

    @classmethod
    def above(cls, space, x, closed=False):
        return cls.interval(space, lo=x, lo_closed=closed)

    @classmethod
    def points(cls, space, pts: Iterable):
        iv = P.empty()
        for p in pts:
            iv |= P.singleton(Fraction(p))
        return cls(space, iv)

    @classmethod
    def component(cls, space, comp: ComponentRef):
        return cls(space, comp.hull())

    @classmethod
    def hull_of(cls, space, lo, hi):
        """``X ∩ [lo, hi]``."""
        return cls(space, P.closed(Fraction(lo), Fraction(hi)))

    # ---- algebra ------------------------------------------------------------

    @property
    def raw(self) -> P.Interval:
        return self._iv

    def _check(self, other):
        if other.space is not self.space:
            raise ValueError("sets belong to different models")

    def __and__(self, other):
        self._check(other)
        return SymbolicSet(self.space, self._iv & other._iv)

    def __or__(self, other):
        self._check(other)
        return SymbolicSet(self.space, self._iv | other._iv)

    def __sub__(self, other):
        self._check(other)
        return SymbolicSet(self.space, self._iv - other._iv)

    def complement(self):
        return SymbolicSet(self.space, ~self._iv)

    def without(self, x):
        return SymbolicSet(self.space, self._iv - P.singleton(Fraction(x)))

    def adding(self, x):
        return SymbolicSet(self.space, self._iv | P.singleton(Fraction(x)))

    def __contains__(self, x) -> bool:
        x = Fraction(x)
        return x in self._iv and x in self.space

    def is_empty(self) -> bool:
        return not self.space.meets(self._iv)

    def __bool__(self):
        return not self.is_empty()

    def issubset(self, other) -> bool:
        self._check(other)
        return not self.space.meets(self._iv - other._iv)

    __le__ = issubset

    def __eq__(self, other):
        if not isinstance(other, SymbolicSet):
            return NotImplemented
        return other.space is self.space and self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    # ---- normal form --------------------------------------------------------

    def canonical(self) -> P.Interval:
        if self._canon is None:
            self._canon = self._normalize()
        return self._canon

    def normalized(self):
        return SymbolicSet(self.space, self.canonical(), _canonical=True)

    def _normalize(self):
        hulls = []
        for atom in self._iv:
            ext = self.space.extent(atom)
            if ext is not None:
                hulls.append(_atom(*ext))
        hulls.sort(key=lambda h: (h.lower, h.left == P.OPEN))
        merged = []
        for h in hulls:
            if merged:
                prev = merged[-1]
                gap = P.closed(prev.upper, h.lower) - prev - h
                if prev.overlaps(h) or gap.empty or not self.space.meets(gap):
                    merged[-1] = prev | h | gap
                    if not merged[-1].atomic:
                        merged[-1] = merged[-1].enclosure
                    continue
            merged.append(h)
        out = P.empty()
        for h in merged:
            out |= h
        return out

    # ---- order data -----------------------------------------------------------

    def extent(self):
        """(inf, inf_attained, sup, sup_attained) or None when empty."""
        best = None
        for atom in self._iv:
            ext = self.space.extent(atom)
            if ext is None:
                continue
            if best is None:
                best = list(ext)
                continue
            if ext[0] < best[0]:
                best[0], best[1] = ext[0], ext[1]
            elif ext[0] == best[0]:
                best[1] = best[1] or ext[1]
            if ext[2] > best[2]:
                best[2], best[3] = ext[2], ext[3]
            elif ext[2] == best[2]:
                best[3] = best[3] or ext[3]
        return tuple(best) if best else None

    def diam(self) -> Fraction:
        ext = self.extent()
        if ext is None:
            return Fraction(0)
        return ext[2] - ext[0]

    def components(self) -> Iterable[ComponentRef]:
        return self.space.components_in(self._iv)

    def finite_components(self) -> Optional[list]:
        """All components meeting the set, or None when there are infinitely many."""
        comps = []
        for item in self.space.pieces(self._iv):
            if item[0] == "tail":
                return None
            if item[1] not in comps:
                comps.append(item[1])
        return sorted(comps)

    def component_summary(self):
        """``(finite components, tails)``; tails are ``(family, start)`` pairs."""
        comps, tails = [], []
        for item in self.space.pieces(self._iv):
            if item[0] == "tail":
                tails.append((item[1], item[2]))
            elif item[1] not in comps:
                comps.append(item[1])
        return sorted(comps), tails

    def sample_point(self) -> Optional[Fraction]:
        """Some rational point of the set (deterministic)."""
        for atom in self._iv:
            for item in self.space.pieces(atom):
                if item[0] == "comp":
                    inter = item[2]
                    if inter.left == P.CLOSED:
                        return inter.lower
                    if inter.right == P.CLOSED:
                        return inter.upper
                    return (inter.lower + inter.upper) / 2
                _, j, n0 = item
                return self.space.member(j, n0).lo
        return None

    # ---- topology in the model ------------------------------------------------

    def open_violation(self) -> Optional[Fraction]:
        """A point of the set that is a limit of the complement, or None."""
        for h in self.canonical():
            if h.left == P.CLOSED and h.lower in self.space:
                if self.space.left_accumulates(h.lower):
                    return h.lower
            if h.right == P.CLOSED and h.upper in self.space:
                if self.space.right_accumulates(h.upper):
                    return h.upper
        return None

    def is_open(self) -> bool:
        return self.open_violation() is None

    def closed_violation(self) -> Optional[Fraction]:
        return self.complement().open_violation()

    def is_closed(self) -> bool:
        return self.closed_violation() is None

    def is_clopen(self) -> bool:
        return self.is_open() and self.is_closed()

    def boundary_point(self) -> Optional[Fraction]:
        v = self.open_violation()
        return v if v is not None else self.closed_violation()

    # ---- display ----------------------------------------------------------------

    def __repr__(self):
        parts = []
        for h in self.canonical():
            if h.lower == h.upper:
                parts.append(f"{{{h.lower}}}")
            else:
                parts.append(("[" if h.left == P.CLOSED else "(") + f"{h.lower}, {h.upper}"
                             + ("]" if h.right == P.CLOSED else ")"))
        body = " ∪ ".join(parts) if parts else "∅"
        return f"{self.space.name}∩{body}"


class Bounds:
    """A set known only between two exact sets: ``lower ⊆ S ⊆ upper``.

    ``remainder``, when given, is a clopen set such that ``S`` is ``lower``
    together with a union of clopen subsets of ``remainder``; ``S`` is then
    open whenever ``lower`` is.
    """

    __slots__ = ("lower", "upper", "remainder")

    def __init__(self, lower: SymbolicSet, upper: Optional[SymbolicSet] = None,
                 remainder: Optional[SymbolicSet] = None):
        self.lower = lower
        self.upper = lower if upper is None else upper
        self.remainder = remainder

    @property
    def exact(self):
        return self.lower is self.upper or self.lower == self.upper

    def __repr__(self):
        if self.lower is self.upper:
            return f"Bounds({self.lower!r})"
        return f"Bounds({self.lower!r} ⊆ · ⊆ {self.upper!r})"


def as_bounds(s) -> Bounds:
    return s if isinstance(s, Bounds) else Bounds(s)
