"""Symbolic suborderable models on the rational line.

A model is a finite list of regions: isolated points, segments, and
geometric families.  A geometric family with limit ``c``, side ``right``,
ratio ``r`` and base segment ``[a, b]`` has members

    S_n = [c + r**n * a, c + r**n * b],   n >= 0,

accumulating at ``c`` from the right (side ``left`` mirrors this through
``c``).  The limit point itself is always a point of the model; it is either
listed explicitly, an endpoint of a closed segment, or added as its own
singleton component.
"""
from __future__ import annotations

import re
from importlib.resources import files
from pathlib import Path
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Optional, Union

import portion as P

LEFT = "left"
RIGHT = "right"


class ModelError(ValueError):
    """Raised for malformed or inconsistent model descriptions."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"line {line}, column {column or 1}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


def rational(text) -> Fraction:
    """Parse ``p/q`` or an integer into a Fraction.  Decimals are rejected."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    s = str(text).strip()
    if not re.fullmatch(r"[+-]?\d+(/\d+)?", s):
        raise ValueError(f"not a rational literal: {text!r}")
    try:
        return Fraction(s)
    except ZeroDivisionError:
        raise ValueError(f"zero denominator in {text!r}") from None


# --------------------------------------------------------------------------
# Regions


@dataclass(frozen=True)
class Point:
    p: Fraction

    @property
    def lo(self):
        return self.p

    @property
    def hi(self):
        return self.p

    def hull(self):
        return P.singleton(self.p)


@dataclass(frozen=True)
class Segment:
    lo: Fraction
    hi: Fraction
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ModelError(f"segment needs lo < hi, got {self.lo} .. {self.hi}")

    def hull(self):
        return P.Interval.from_atomic(
            P.OPEN if self.lo_open else P.CLOSED, self.lo, self.hi,
            P.OPEN if self.hi_open else P.CLOSED)


@dataclass(frozen=True)
class GeomFamily:
    limit: Fraction
    side: str
    ratio: Fraction
    seg_lo: Fraction
    seg_hi: Fraction

    def __post_init__(self):
        if self.side not in (LEFT, RIGHT):
            raise ModelError(f"family side must be left or right, got {self.side!r}")
        if not 0 < self.ratio < 1:
            raise ModelError("family ratio must lie in (0, 1)")
        if not 0 < self.seg_lo < self.seg_hi:
            raise ModelError("family needs 0 < seg_lo < seg_hi")
        # S_{n+1} sits strictly between the limit and S_n iff r*b < a
        if not self.ratio * self.seg_hi < self.seg_lo:
            raise ModelError(
                "family members intersect: need ratio*seg_hi < seg_lo "
                f"({self.ratio}*{self.seg_hi} >= {self.seg_lo})")

    @property
    def sign(self):
        return 1 if self.side == RIGHT else -1

    def member(self, n: int) -> tuple[Fraction, Fraction]:
        scale = self.ratio ** n
        a = self.limit + self.sign * scale * self.seg_lo
        b = self.limit + self.sign * scale * self.seg_hi
        return (a, b) if a < b else (b, a)

    def member_hull(self, n):
        lo, hi = self.member(n)
        return P.closed(lo, hi)

    def member_diam(self, n) -> Fraction:
        return self.ratio ** n * (self.seg_hi - self.seg_lo)

    def outer(self) -> Fraction:
        """Far end of member 0 (the member farthest from the limit)."""
        return self.limit + self.sign * self.seg_hi

    def hull(self):
        # every member, but not the limit
        if self.side == RIGHT:
            return P.openclosed(self.limit, self.outer())
        return P.closedopen(self.outer(), self.limit)

    def index_of(self, x: Fraction) -> Optional[int]:
        d = (x - self.limit) * self.sign
        if d <= 0 or d > self.seg_hi:
            return None
        n, scale = 0, Fraction(1)
        while scale * self.seg_lo > d:
            n += 1
            scale *= self.ratio
        return n if scale * self.seg_lo <= d <= scale * self.seg_hi else None

    def members_meeting(self, iv: P.Interval) -> tuple[list[int], Optional[int]]:
        """Members meeting the atomic interval ``iv``.

        Returns ``(finite, tail)``: an explicit list of indices and, when
        infinitely many members meet ``iv``, the index from which on every
        member lies inside ``iv``.
        """
        c = self.limit
        iv = iv & P.closed(min(c, self.outer()), max(c, self.outer()))
        if iv.empty:
            return [], None
        # distance window of iv measured away from the limit
        if self.sign > 0:
            near, near_closed = iv.lower - c, iv.left == P.CLOSED
            far, far_closed = iv.upper - c, iv.right == P.CLOSED
        else:
            near, near_closed = c - iv.upper, iv.right == P.CLOSED
            far, far_closed = c - iv.lower, iv.left == P.CLOSED
        if far <= 0:
            return [], None
        finite, tail = [], None
        n, scale = 0, Fraction(1)
        reaches_limit = near < 0 or (near == 0)
        while True:
            lo_d, hi_d = scale * self.seg_lo, scale * self.seg_hi
            if reaches_limit and hi_d < far:
                tail = n
                break
            if not reaches_limit and hi_d < near:
                break
            below_far = lo_d < far or (lo_d == far and far_closed)
            above_near = hi_d > near or (hi_d == near and near_closed)
            if below_far and above_near:
                finite.append(n)
            n += 1
            scale *= self.ratio
        return finite, tail


Region = Union[Point, Segment, GeomFamily]


# --------------------------------------------------------------------------
# Components


@dataclass(frozen=True, order=True)
class ComponentRef:
    """A component of a model.

    ``kind`` is ``basic`` for points/segments (``index`` into the space's
    basic list) and ``member`` for family members (``index`` of the family,
    ``n`` the member number).
    """
    lo: Fraction
    hi: Fraction
    kind: str = field(compare=False)
    index: int = field(compare=False)
    n: Optional[int] = field(default=None, compare=False)
    lo_open: bool = field(default=False, compare=False)
    hi_open: bool = field(default=False, compare=False)
    limit_of: tuple = field(default=(), compare=False)

    @property
    def diam(self) -> Fraction:
        return self.hi - self.lo

    @property
    def degenerate(self):
        return self.lo == self.hi

    @property
    def tag(self):
        if self.kind == "member":
            return self.n
        return "limit" if self.limit_of else None

    def hull(self):
        cached = self.__dict__.get("_hull")
        if cached is None:
            if self.degenerate:
                cached = P.singleton(self.lo)
            else:
                cached = P.Interval.from_atomic(
                    P.OPEN if self.lo_open else P.CLOSED, self.lo, self.hi,
                    P.OPEN if self.hi_open else P.CLOSED)
            self.__dict__["_hull"] = cached
        return cached

    def holds(self, x) -> bool:
        """Membership by plain comparisons."""
        if self.lo < x < self.hi:
            return True
        return (x == self.lo and not self.lo_open) or (x == self.hi and not self.hi_open)

    def may_meet(self, atom) -> bool:
        """Cheap necessary condition for meeting an atomic interval."""
        return atom.lower <= self.hi and self.lo <= atom.upper

    def closed_hull(self):
        return P.closed(self.lo, self.hi)

    def __contains__(self, x):
        return self.holds(x)

    def label(self):
        if self.degenerate:
            return f"{{{self.lo}}}"
        return (("(" if self.lo_open else "[") + f"{self.lo},{self.hi}"
                + (")" if self.hi_open else "]"))

    def __repr__(self):
        extra = f" S_{self.n}" if self.kind == "member" else ""
        return f"<component {self.label()}{extra}>"


# --------------------------------------------------------------------------
# Space


class SymbolicSpace:
    """A validated model: basic components plus geometric families."""

    def __init__(self, regions, name="X"):
        regions = list(regions)
        if not regions:
            raise ModelError("a model needs at least one region")
        self.name = name
        self.regions = tuple(regions)
        families = [r for r in regions if isinstance(r, GeomFamily)]
        basics = [r for r in regions if not isinstance(r, GeomFamily)]
        # limit points that are not already covered by a basic region
        for fam in families:
            if not any(fam.limit in b.hull() for b in basics):
                basics.append(Point(fam.limit))
        basics = _dedupe_points(basics)
        basics.sort(key=lambda r: (r.lo, r.hi))
        families.sort(key=lambda f: (f.hull().lower, f.hull().upper))
        self.families = tuple(families)
        self._validate(basics, families)
        comps = []
        for i, b in enumerate(basics):
            limit_of = tuple(j for j, f in enumerate(self.families) if f.limit in b.hull())
            if isinstance(b, Point):
                comps.append(ComponentRef(b.p, b.p, "basic", i, limit_of=limit_of))
            else:
                comps.append(ComponentRef(b.lo, b.hi, "basic", i, None, b.lo_open,
                                          b.hi_open, limit_of))
        self.basics = tuple(comps)
        self._hull = P.empty()
        for c in self.basics:
            self._hull |= c.hull()
        for f in self.families:
            self._hull |= f.hull()

    def _validate(self, basics, families):
        for b in basics:
            if isinstance(b, Segment):
                for f in families:
                    if f.limit in (b.lo, b.hi) and f.limit not in b.hull():
                        raise ModelError(
                            f"segment {b.lo}..{b.hi} has an open end at the limit "
                            f"{f.limit} of a family")
        blocks = [(b.hull(), f"region at {b.lo}") for b in basics]
        blocks += [(f.hull(), f"family at {f.limit} ({f.side})") for f in families]
        limits = {f.limit for f in families}
        for i in range(len(blocks)):
            for j in range(i + 1, len(blocks)):
                (h1, n1), (h2, n2) = blocks[i], blocks[j]
                if h1.overlaps(h2):
                    raise ModelError(f"regions overlap: {n1} and {n2}")
                c1 = P.closed(h1.lower, h1.upper)
                c2 = P.closed(h2.lower, h2.upper)
                touch = c1 & c2
                if touch.empty:
                    continue
                # closures may only meet at a shared family limit
                if not (touch.lower == touch.upper and touch.lower in limits):
                    raise ModelError(f"regions {n1} and {n2} touch without a gap")

    # ---- basic queries ----------------------------------------------------

    @cached_property
    def limits(self) -> tuple[Fraction, ...]:
        return tuple(sorted({f.limit for f in self.families}))

    @property
    def finite(self) -> bool:
        """True when the model has finitely many components."""
        return not self.families

    def __contains__(self, x) -> bool:
        return self.component_of(x) is not None

    def component_of(self, x) -> Optional[ComponentRef]:
        x = Fraction(x)
        cache = self.__dict__.setdefault("_component_cache", {})
        try:
            return cache[x]
        except KeyError:
            pass
        if len(cache) > 100_000:
            cache.clear()
        cache[x] = found = self._find_component(x)
        return found

    def _find_component(self, x: Fraction) -> Optional[ComponentRef]:
        if x not in self._hull:
            return None
        for c in self.basics:
            if c.holds(x):
                return c
        for j, f in enumerate(self.families):
            n = f.index_of(x)
            if n is not None:
                return self.member(j, n)
        return None

    def member(self, j: int, n: int) -> ComponentRef:
        lo, hi = self.families[j].member(n)
        return ComponentRef(lo, hi, "member", j, n)

    def family_limit_component(self, j) -> ComponentRef:
        return self.component_of(self.families[j].limit)

    def left_accumulates(self, q) -> bool:
        """True when points of the model lie in (q - d, q) for every d > 0."""
        for c in self.basics:
            if c.lo < q <= c.hi:
                return True
        return any(f.side == LEFT and f.limit == q for f in self.families)

    def right_accumulates(self, q) -> bool:
        for c in self.basics:
            if c.lo <= q < c.hi:
                return True
        return any(f.side == RIGHT and f.limit == q for f in self.families)

    def meets(self, iv: P.Interval) -> bool:
        """Does the model meet the (possibly non-atomic) interval ``iv``?"""
        for atom in iv:
            if (atom & self._hull).empty:
                continue
            for c in self.basics:
                if c.may_meet(atom) and not (c.hull() & atom).empty:
                    return True
            for f in self.families:
                finite, tail = f.members_meeting(atom)
                if finite or tail is not None:
                    return True
        return False

    def pieces(self, iv: P.Interval) -> Iterator[tuple]:
        """Finite description of the model inside ``iv``.

        Yields ``("comp", ComponentRef, P.Interval)`` for each basic component
        or explicitly listed family member meeting ``iv`` (with the
        intersection), and ``("tail", j, n0)`` when every member ``n >= n0`` of
        family ``j`` lies in ``iv``.
        """
        for atom in iv:
            if (atom & self._hull).empty:
                continue
            for c in self.basics:
                if not c.may_meet(atom):
                    continue
                inter = c.hull() & atom
                if not inter.empty:
                    yield ("comp", c, inter)
            for j, f in enumerate(self.families):
                finite, tail = f.members_meeting(atom)
                for n in finite:
                    c = self.member(j, n)
                    yield ("comp", c, c.hull() & atom)
                if tail is not None:
                    yield ("tail", j, tail)

    def extent(self, iv: P.Interval):
        """(inf, inf_attained, sup, sup_attained) of the model inside ``iv``,
        or None when empty."""
        best_lo = best_hi = None
        for item in self.pieces(iv):
            if item[0] == "comp":
                inter = item[2]
                cand_lo = (inter.lower, inter.left == P.CLOSED)
                cand_hi = (inter.upper, inter.right == P.CLOSED)
            else:
                _, j, n0 = item
                f = self.families[j]
                lo, hi = f.member(n0)
                if f.side == RIGHT:
                    cand_lo, cand_hi = (f.limit, False), (hi, True)
                else:
                    cand_lo, cand_hi = (lo, True), (f.limit, False)
            if best_lo is None or cand_lo[0] < best_lo[0] or (
                    cand_lo[0] == best_lo[0] and cand_lo[1]):
                best_lo = cand_lo
            if best_hi is None or cand_hi[0] > best_hi[0] or (
                    cand_hi[0] == best_hi[0] and cand_hi[1]):
                best_hi = cand_hi
        if best_lo is None:
            return None
        return best_lo[0], best_lo[1], best_hi[0], best_hi[1]

    def components_in(self, iv: P.Interval) -> Iterator[ComponentRef]:
        """Components meeting ``iv``: finite ones first in positional order,
        then infinite family tails interleaved by index."""
        finite, tails, seen = [], [], set()
        for item in self.pieces(iv):
            if item[0] == "comp":
                if item[1] not in seen:
                    seen.add(item[1])
                    finite.append(item[1])
            else:
                tails.append((item[1], item[2]))
        finite.sort()
        yield from finite
        if not tails:
            return
        k = 0
        while True:
            for j, n0 in tails:
                yield self.member(j, n0 + k)
            k += 1

    def materialized_components(self, depth: int) -> list[ComponentRef]:
        comps = list(self.basics)
        for j, f in enumerate(self.families):
            comps.extend(self.member(j, n) for n in range(depth + 1))
        return sorted(comps)

    def __repr__(self):
        return f"SymbolicSpace({self.name!r}, {len(self.basics)} basic, {len(self.families)} families)"


def _dedupe_points(basics):
    out = []
    for b in basics:
        if isinstance(b, Point) and any(b.p in o.hull() for o in out):
            continue
        out = [o for o in out if not (isinstance(o, Point) and o.p in b.hull())] + [b]
    return out


# --------------------------------------------------------------------------
# Model files

_KV = re.compile(r"(\w+)=(\S+)")


def parse_model(text: str, name: Optional[str] = None) -> SymbolicSpace:
    """Parse the line-oriented model format.

    Statements are separated by newlines or ``;``; ``#`` starts a comment.

        space <name>
        point <p>
        segment <lo> <hi> [open-left] [open-right]
        family limit=<c> side=<left|right> ratio=<r> seg=<a>..<b>

    ``segment`` also accepts the bare words ``open``/``closed`` for its two
    ends (``segment 0 1 open open``).
    """
    regions = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        offset = 0
        for stmt in line.split(";"):
            col = offset + (len(stmt) - len(stmt.lstrip())) + 1
            offset += len(stmt) + 1
            words = stmt.split()
            if not words:
                continue
            try:
                kind = words[0]
                if kind == "space":
                    if len(words) != 2:
                        raise ModelError("space takes exactly one name")
                    name = words[1]
                elif kind == "point":
                    if len(words) != 2:
                        raise ModelError("point takes exactly one coordinate")
                    regions.append(Point(rational(words[1])))
                elif kind == "segment":
                    regions.append(_parse_segment(words[1:]))
                elif kind == "family":
                    regions.append(_parse_family(words[1:]))
                else:
                    raise ModelError(f"unknown statement {kind!r}")
            except ModelError as exc:
                if exc.line is None:
                    raise ModelError(str(exc), lineno, col) from None
                raise
            except ValueError as exc:
                raise ModelError(str(exc), lineno, col) from None
    return SymbolicSpace(regions, name or "X")


def _parse_segment(words):
    if len(words) < 2:
        raise ModelError("segment needs lo and hi")
    lo, hi = rational(words[0]), rational(words[1])
    flags = words[2:]
    lo_open = hi_open = False
    if flags and all(w in ("open", "closed") for w in flags):
        if len(flags) != 2:
            raise ModelError("give both ends as open/closed")
        lo_open, hi_open = flags[0] == "open", flags[1] == "open"
    else:
        for w in flags:
            if w == "open-left":
                lo_open = True
            elif w == "open-right":
                hi_open = True
            else:
                raise ModelError(f"unknown segment flag {w!r}")
    return Segment(lo, hi, lo_open, hi_open)


def _parse_family(words):
    kv = {}
    for w in words:
        m = _KV.fullmatch(w)
        if not m:
            raise ModelError(f"expected key=value, got {w!r}")
        kv[m.group(1)] = m.group(2)
    missing = {"limit", "side", "ratio", "seg"} - set(kv)
    if missing:
        raise ModelError(f"family is missing {sorted(missing)}")
    if ".." not in kv["seg"]:
        raise ModelError("seg must look like a..b")
    a, b = kv["seg"].split("..", 1)
    return GeomFamily(rational(kv["limit"]), kv["side"], rational(kv["ratio"]),
                      rational(a), rational(b))


def builtin_models() -> list[str]:
    return sorted(p.name[:-4] for p in files("selectop").joinpath("models").iterdir()
                  if p.name.endswith(".txt"))


def load_model(spec: str) -> SymbolicSpace:
    """A model from a file path, or a built-in model by name (``M1`` ...)."""
    path = Path(spec)
    if path.is_file():
        return parse_model(path.read_text(), path.stem)
    res = files("selectop").joinpath("models", f"{spec}.txt")
    if res.is_file():
        return parse_model(res.read_text(), spec)
    raise ModelError(f"no model file or built-in model named {spec!r}")
