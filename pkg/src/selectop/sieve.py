"""Clopen partitions by small pieces and the lazy anti-binary discrete sieve.

Level ``n`` of the sieve is a finite clopen partition of the model whose
pieces are each a single component or contain infinitely many components,
and are either of diameter below ``2^-n`` or trapped in the Δ-neighbourhood
of their unique big component.  Nodes are addressed by paths of child
indices; children are computed on first access and memoized.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .geometry import (NotClopenError, PreconditionError, big_components,
                       in_D, in_D_eps, lr_flags, require_clopen, split_clopen)
from .sets import SymbolicSet
from .space import LEFT, RIGHT, ComponentRef, SymbolicSpace
from .verdict import Verdict, combine

MIN_SIDE_PIECES = 6
DEFAULT_SIEVE_DEPTH = 8


def _position(S: SymbolicSet):
    ext = S.extent()
    return (ext[0], not ext[1])


def _component_count(S: SymbolicSet) -> float:
    comps = S.finite_components()
    return float("inf") if comps is None else len(comps)


def _family_at(space, end, side) -> Optional[int]:
    for j, f in enumerate(space.families):
        if f.limit == end and f.side == side:
            return j
    return None


def _first_member_inside(space, j, end, Z, side) -> int:
    """Least n such that member n and everything between it and the limit
    lie in Z."""
    f = space.families[j]
    n = 0
    while True:
        lo, hi = f.member(n)
        hull = SymbolicSet.hull_of(space, lo, end) if side == LEFT else SymbolicSet.hull_of(space, end, hi)
        if hull <= Z:
            return n
        n += 1


def _side_end(space, C: ComponentRef, Z, side, reach, skip) -> tuple[Fraction, bool]:
    """Outer end of a clopen neighbourhood of C inside Z on ``side``.

    Without a family accumulating at that end of C this is C's own end.
    Otherwise it is the far end of the first family member that lies within
    ``reach`` of C and at least ``skip`` members past the first one in Z.
    """
    end = C.lo if side == LEFT else C.hi
    j = _family_at(space, end, side)
    if j is None or (side == LEFT and C.lo_open) or (side == RIGHT and C.hi_open):
        return end, not (C.lo_open if side == LEFT else C.hi_open)
    f = space.families[j]
    n = _first_member_inside(space, j, end, Z, side) + skip
    while True:
        lo, hi = f.member(n)
        far = lo if side == LEFT else hi
        if abs(end - far) < reach:
            return far, True
        n += 1


def neighbourhood(space, C: ComponentRef, Z: SymbolicSet, reach: Fraction,
                  skip_left=0, skip_right=0) -> SymbolicSet:
    """Convex clopen ``U`` with ``C ⊆ U ⊆ Z``, reaching less than ``reach``
    beyond C on each side approached by a family."""
    lo, lo_closed = _side_end(space, C, Z, LEFT, reach, skip_left)
    hi, hi_closed = _side_end(space, C, Z, RIGHT, reach, skip_right)
    if lo == hi:
        return SymbolicSet.points(space, [lo]) & Z
    return (SymbolicSet.interval(space, lo, hi, lo_closed, hi_closed) & Z).normalized()


def _accumulation_components(space, V: SymbolicSet) -> list[ComponentRef]:
    out = []
    for f in space.families:
        if f.limit in V:
            K = space.component_of(f.limit)
            if K not in out:
                out.append(K)
    return sorted(out)


def _small_cover(space, V: SymbolicSet, eps) -> list[SymbolicSet]:
    """Pieces of diameter below eps covering V (all of whose components are
    small): a cluster around each accumulation component, then single
    components."""
    pieces = []
    rest = V
    for K in _accumulation_components(space, V):
        if K.diam >= eps:  # pragma: no cover - excluded by the callers
            raise PreconditionError("a big component was left in the remainder")
        reach = (eps - K.diam) / 2
        cluster = neighbourhood(space, K, V, reach)
        pieces.append(cluster)
        rest = rest - cluster
    comps = rest.finite_components()
    if comps is None:  # pragma: no cover - every accumulation point is clustered
        raise PreconditionError("remainder still has infinitely many components")
    for c in comps:
        pieces.append((SymbolicSet.component(space, c) & rest).normalized())
    return [p for p in pieces if not p.is_empty()]


def _avoid_two(pieces: list[SymbolicSet]) -> list[SymbolicSet]:
    """Split the piece with the most components when there are exactly two."""
    if len(pieces) != 2:
        return pieces
    counts = [_component_count(p) for p in pieces]
    k = 0 if counts[0] >= counts[1] else 1
    a, b = split_clopen(pieces[k].space, pieces[k])
    pieces = pieces[:k] + [a, b] + pieces[k + 1:]
    return sorted(pieces, key=_position)


def _split_until(pieces, at_least):
    pieces = list(pieces)
    while len(pieces) < at_least:
        counts = [_component_count(p) for p in pieces]
        k = max(range(len(pieces)), key=lambda i: (counts[i], -i))
        if counts[k] != float("inf"):
            break
        a, b = split_clopen(pieces[k].space, pieces[k])
        pieces = sorted(pieces[:k] + [a, b] + pieces[k + 1:], key=_position)
    return pieces


def partition_D_eps(space: SymbolicSpace, Z: SymbolicSet, eps) -> list[SymbolicSet]:
    """Clopen partition of ``Z`` into small or Δ-trapped pieces, never of
    size two."""
    eps = Fraction(eps)
    if not in_D(space, Z):
        raise PreconditionError("Z must be a component or have infinitely many components")
    Z = Z.normalized()
    if in_D_eps(space, Z, eps):
        return [Z]
    pieces = []
    rest = Z
    for C in big_components(space, Z, eps):
        U = neighbourhood(space, C, Z, eps / 2)
        pieces.append(U)
        rest = rest - U
    for h in rest.canonical():
        V = SymbolicSet(space, h).normalized()
        pieces.extend(_small_cover(space, V, eps))
    return _avoid_two(sorted(pieces, key=_position))


def _side_cover(space, Y: SymbolicSet, eps, at_least) -> list[SymbolicSet]:
    if Y.is_empty():
        return []
    comps = Y.finite_components()
    if comps is not None:
        return [(SymbolicSet.component(space, c) & Y).normalized() for c in comps]
    return _split_until(partition_D_eps(space, Y, eps), at_least)


def partition_around(space, Z: SymbolicSet, eps, C: ComponentRef) -> list[SymbolicSet]:
    """Partition of ``Z`` with one piece ``U_C ⊇ C`` inside Δ(C, eps), every
    other piece wholly below or above C, and at least six pieces on each
    side from which C is approached."""
    eps = Fraction(eps)
    Z = Z.normalized()
    if C not in big_components(space, Z, 2 * eps):
        raise PreconditionError("C must be a component of Z of diameter at least 2·eps")
    ell, r = lr_flags(space, C)
    U = neighbourhood(space, C, Z, eps / 2, MIN_SIDE_PIECES * ell, MIN_SIDE_PIECES * r)
    below = (Z & SymbolicSet.below(space, C.lo)) - U
    above = (Z & SymbolicSet.above(space, C.hi)) - U
    pieces = (_side_cover(space, below.normalized(), eps, MIN_SIDE_PIECES)
              + [U] + _side_cover(space, above.normalized(), eps, MIN_SIDE_PIECES))
    return _avoid_two(sorted(pieces, key=_position))


def kappa(C: ComponentRef) -> int:
    """Least n with ``diam(C) >= 2^-n``."""
    if C.diam <= 0:
        raise PreconditionError("kappa is defined for non-degenerate components only")
    n = 0
    while Fraction(1, 2 ** n) > C.diam:
        n += 1
    return n


@dataclass(frozen=True)
class NodeInfo:
    """How a node was expanded: its big component (if any), that
    component's ℓ/r flags and the index ``pi`` of the child containing it."""

    big: Optional[ComponentRef]
    flags: Optional[tuple]
    pi: Optional[int]

    @property
    def case(self) -> str:
        if self.big is None:
            return "no-big-C"
        return f"lr={self.flags[0]}{self.flags[1]}"


class Sieve:
    """Lazy sieve; ``()`` is the root whose children form level 0."""

    def __init__(self, space: SymbolicSpace, depth: int = DEFAULT_SIEVE_DEPTH):
        if space.finite:
            raise PreconditionError("the sieve needs infinitely many components; use the cws search")
        if depth < 1:
            raise PreconditionError("depth must be at least 1")
        self.space = space
        self.depth = depth
        self._children: dict = {}
        self._info: dict = {}
        self._values = {(): SymbolicSet.whole(space).normalized()}
        self._lock = threading.RLock()

    def value(self, path: tuple) -> SymbolicSet:
        path = tuple(path)
        got = self._values.get(path)
        if got is None:
            self.children(path[:-1])
            got = self._values[path]
        return got

    def level_of(self, path) -> int:
        return len(path) - 1

    def info(self, path) -> NodeInfo:
        path = tuple(path)
        self.children(path)
        return self._info[path]

    def children(self, path=()) -> list[tuple]:
        path = tuple(path)
        got = self._children.get(path)
        if got is not None:
            return got
        with self._lock:
            got = self._children.get(path)
            if got is not None:
                return got
            Z = self.value(path)
            if path == ():
                parts, info = partition_D_eps(self.space, Z, 1), NodeInfo(None, None, None)
            else:
                n = len(path) - 1
                eps = Fraction(1, 2 ** (n + 1))
                big = big_components(self.space, Z, 2 * eps)
                if big:
                    C = big[0]
                    parts = partition_around(self.space, Z, eps, C)
                    pi = next(i for i, p in enumerate(parts) if C.lo in p or C.hi in p
                              or (C.lo + C.hi) / 2 in p)
                    info = NodeInfo(C, lr_flags(self.space, C), pi)
                else:
                    parts = partition_D_eps(self.space, Z, eps)
                    info = NodeInfo(None, None, None)
            kids = [path + (i,) for i in range(len(parts))]
            for k, p in zip(kids, parts):
                self._values[k] = p
            self._info[path] = info
            self._children[path] = kids
            return kids

    def level(self, n: int) -> list[tuple]:
        """All nodes of level n, in positional order."""
        nodes = self.children(())
        for _ in range(n):
            nodes = [k for t in nodes for k in self.children(t)]
        return nodes

    def node_of(self, x, level: int) -> tuple:
        """The level-``level`` node whose value contains x."""
        x = Fraction(x)
        if x not in self.space:
            raise ValueError(f"{x} is not a point of the model")
        path = ()
        for _ in range(level + 1):
            path = next(k for k in self.children(path) if x in self.value(k))
        return path

    def branch(self, x, to_level: int) -> list[tuple]:
        t = self.node_of(x, to_level)
        return [t[:k] for k in range(1, len(t) + 1)]

    def locate_clopen(self, x, U: SymbolicSet, max_level: int) -> Optional[tuple]:
        """A node of x's branch whose value lies in the clopen set U."""
        x = Fraction(x)
        if x not in U:
            raise ValueError(f"{x} is not in U")
        require_clopen(U)
        path = ()
        for _ in range(max_level + 1):
            path = next(k for k in self.children(path) if x in self.value(k))
            if self.value(path) <= U:
                return path
        return None

    def meet(self, x, y, max_level: int) -> Optional[tuple]:
        """The last common node of the branches of x and y (``()`` for the
        root), or None when they still agree at ``max_level``."""
        x, y = Fraction(x), Fraction(y)
        path = ()
        for _ in range(max_level + 1):
            kids = self.children(path)
            kx = next(k for k in kids if x in self.value(k))
            if y not in self.value(kx):
                return path
            path = kx
        return None


def build_sieve(space, depth: int = DEFAULT_SIEVE_DEPTH) -> Sieve:
    sv = Sieve(space, depth)
    sv.level(depth)
    return sv


def check_levels(sv: Sieve, depth: int) -> Verdict:
    """Level membership in 𝒟[X, 2^-n], exact refinement, and anti-binarity
    for every materialized node up to ``depth``."""
    bad = []
    whole = sv.value(())
    roots = sv.children(())
    if len(roots) == 2:
        bad.append("level 0 has exactly two pieces")
    for n in range(depth + 1):
        for t in sv.level(n):
            S = sv.value(t)
            try:
                if not in_D_eps(sv.space, S, Fraction(1, 2 ** n)):
                    bad.append(f"{t}: {S!r} is not in D[X, 2^-{n}]")
            except NotClopenError as exc:
                bad.append(f"{t}: {S!r} is not clopen at {exc.point}")
    for n in range(-1, depth):
        for t in (sv.level(n) if n >= 0 else [()]):
            kids = [sv.value(k) for k in sv.children(t)]
            if len(kids) == 2:
                bad.append(f"{t} has exactly two children")
            union = SymbolicSet.empty(sv.space)
            for i, a in enumerate(kids):
                for b in kids[i + 1:]:
                    if not (a & b).is_empty():
                        bad.append(f"children of {t} overlap: {a!r}, {b!r}")
                union = union | a
            if union != (sv.value(t) if t else whole):
                bad.append(f"children of {t} do not cover it")
    if bad:
        return Verdict.failed(f"sieve level invariants fail ({len(bad)} problems)", bad)
    return Verdict.passed(f"levels 0..{depth}: partitions, D[X,2^-n] membership, anti-binary")


def check_big_component(sv: Sieve, C: ComponentRef, depth: int) -> Verdict:
    """Sibling diameter bound, sidedness, and side counts along the branch
    of a non-degenerate component C, for levels kappa(C)..depth-1."""
    ell, r = lr_flags(sv.space, C)
    inside = C.lo if not C.lo_open else (C.lo + C.hi) / 2
    bad = []
    for n in range(kappa(C), depth):
        t = sv.node_of(inside, n)
        kids = sv.children(t)
        below = above = 0
        for s in kids:
            S = sv.value(s)
            if inside in S:
                continue
            if S.diam() > Fraction(2, 2 ** n):
                bad.append(f"{s}: diam {S.diam()} > 2^-{n - 1}")
            if S <= SymbolicSet.below(sv.space, C.lo):
                below += 1
            elif S <= SymbolicSet.above(sv.space, C.hi):
                above += 1
            else:
                bad.append(f"{s}: {S!r} is neither below nor above {C}")
        if below < MIN_SIDE_PIECES * ell or above < MIN_SIDE_PIECES * r:
            bad.append(f"{t}: {below} pieces below and {above} above, need "
                       f"{MIN_SIDE_PIECES * ell} and {MIN_SIDE_PIECES * r}")
    if bad:
        return Verdict.failed(f"branch of {C} violates the sibling properties", bad)
    return Verdict.passed(f"branch of {C} (flags {ell}{r}) from level {kappa(C)}")


def check_sieve(sv: Sieve, depth: Optional[int] = None) -> Verdict:
    depth = sv.depth if depth is None else depth
    checks = [check_levels(sv, depth)]
    for C in sv.space.materialized_components(depth):
        if C.diam > 0 and kappa(C) < depth:
            checks.append(check_big_component(sv, C, depth))
    return combine(checks, f"sieve invariants to depth {depth}")
