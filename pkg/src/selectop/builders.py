"""Weak selections on partitions built from circular triples.

Every builder returns a :class:`BlockTournament` on part handles: the parts
are arranged into a linear sequence of blocks, each block either a single
part or a circular triple, and earlier blocks are selected against later
ones.  Realized over a model (each handle a clopen :class:`SymbolicSet`),
the invariant combination with any children makes every part open in the
generated selection topology; :func:`certify_partition_open` produces the
explicit finite intersections showing this.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Optional, Sequence

from .geometry import purisch_witnesses
from .selections import (FORWARD, REVERSE, Canonical, Tournament,
                         combine_invariant, is_circular, is_decisive)
from .sets import SymbolicSet
from .verdict import Verdict


class PartitionSizeError(ValueError):
    pass


@dataclass(frozen=True)
class AbstractPartition:
    """Part handles, finite, or countably infinite with handles ``0, 1, 2, ...``."""

    handles: tuple = ()
    infinite: bool = False

    @classmethod
    def of(cls, parts):
        if isinstance(parts, AbstractPartition):
            return parts
        if isinstance(parts, int):
            return cls(tuple(range(parts)))
        return cls(tuple(parts))

    @classmethod
    def countable(cls):
        return cls((), True)

    def __len__(self):
        if self.infinite:
            raise TypeError("an infinite partition has no length")
        return len(self.handles)

    def prefix(self, n: int) -> tuple:
        return tuple(range(n)) if self.infinite else self.handles[:n]


@dataclass(frozen=True)
class TripleGrouping:
    """Consecutive triples of the listed parts and the (finite) leftover."""

    triples: tuple
    leftover: tuple = ()
    infinite: bool = False

    def triple(self, k: int) -> tuple:
        if self.infinite:
            return (3 * k, 3 * k + 1, 3 * k + 2)
        return self.triples[k]


def triple_grouping(parts) -> TripleGrouping:
    parts = AbstractPartition.of(parts)
    if parts.infinite:
        return TripleGrouping((), (), True)
    n = len(parts)
    if n == 2:
        raise PartitionSizeError("a partition with exactly two parts has no such grouping")
    h = parts.handles
    k = n - n % 3
    return TripleGrouping(tuple(h[i:i + 3] for i in range(0, k, 3)), h[k:])


class BlockTournament(Tournament):
    """A tournament given by a linear sequence of blocks; each block is a
    single handle or a circular triple (``(a, b, c)`` means a<b<c<a)."""

    def __init__(self, blocks: Sequence[tuple]):
        self.blocks = tuple(tuple(b) for b in blocks)
        for b in self.blocks:
            if len(b) not in (1, 3):
                raise ValueError("blocks are single parts or triples")
        where = {}
        for bi, b in enumerate(self.blocks):
            for pos, x in enumerate(b):
                where[x] = (bi, pos)
        carrier = [x for b in self.blocks for x in b]

        def first_wins(x, y):
            (bx, px), (by, py) = where[x], where[y]
            if bx != by:
                return bx < by
            return (py - px) % 3 == 1

        winner = {}
        for x, y in itertools.combinations(carrier, 2):
            winner[frozenset((x, y))] = x if first_wins(x, y) else y
        super().__init__(carrier, winner)

    @property
    def triples(self):
        return [b for b in self.blocks if len(b) == 3]

    def block_parts(self):
        return [frozenset(b) for b in self.blocks]

    def __repr__(self):
        body = " < ".join("(" + " ".join(map(str, b)) + ")°" if len(b) == 3 else str(b[0])
                          for b in self.blocks)
        return f"BlockTournament({body})"


def _reverse_blocks(blocks):
    return [tuple(reversed(b)) for b in reversed(blocks)]


class LazyBlockTournament:
    """The countable case: handles ``0, 1, 2, ...``, triple ``k`` is
    ``(3k, 3k+1, 3k+2)`` and triples are ordered by ``k``."""

    def select(self, x: int, y: int) -> int:
        if x < 0 or y < 0:
            raise ValueError("handles are non-negative integers")
        if x == y:
            return x
        if x // 3 != y // 3:
            return min(x, y)
        return x if (y - x) % 3 == 1 else y

    def less(self, x, y):
        return x != y and self.select(x, y) == x

    def truncate(self, n_triples: int) -> BlockTournament:
        return BlockTournament([(3 * k, 3 * k + 1, 3 * k + 2) for k in range(n_triples)])


def build_lemma23(parts):
    """Selection on a partition with ``|parts| != 2`` making every part open
    under every invariant combination."""
    parts = AbstractPartition.of(parts)
    if parts.infinite:
        return LazyBlockTournament()
    g = triple_grouping(parts)
    blocks = list(g.triples)
    if len(g.leftover) == 1:
        blocks = [g.leftover] + blocks
    elif len(g.leftover) == 2:
        a, b = g.leftover
        blocks = [(a,)] + blocks + [(b,)]
    return BlockTournament(blocks)


def _lemma25_blocks(handles, S):
    rest = [h for h in handles if h != S]
    g = triple_grouping(rest)
    triples = list(g.triples)
    if len(g.leftover) == 2:
        a, b = g.leftover
        blocks = [(a,), triples[0], (b,)] + triples[1:]
    else:
        blocks = [tuple([x]) for x in g.leftover] + triples
    return blocks + [(S,)]


def build_lemma25(parts, S: Hashable):
    """Selection with ``S`` maximal that keeps every part open (needs at least
    seven parts)."""
    parts = AbstractPartition.of(parts)
    if parts.infinite:
        raise PartitionSizeError("only finite partitions are supported here")
    if len(parts) < 7:
        raise PartitionSizeError("at least 7 parts are required")
    if S not in parts.handles:
        raise ValueError(f"{S!r} is not a part")
    return BlockTournament(_lemma25_blocks(parts.handles, S))


def build_cor26(Q: Sequence, S: Hashable, R: Sequence):
    """Selection with ``Q ∪ {S} ≤ {S} ∪ R`` keeping every part open."""
    Q, R = tuple(Q), tuple(R)
    if len(Q) < 6 or len(R) < 6:
        raise PartitionSizeError("both sides need at least 6 parts")
    if len({*Q, *R, S}) != len(Q) + len(R) + 1:
        raise ValueError("Q, R and S must be disjoint")
    lower = _lemma25_blocks(Q + (S,), S)
    upper = _reverse_blocks(_lemma25_blocks(R + (S,), S))
    # both sides end at S; keep one copy
    return BlockTournament(lower + upper[1:])


def block_contract(sigma: BlockTournament) -> Verdict:
    """Blocks decisive and every triple circular."""
    cert = is_decisive(sigma, sigma.block_parts())
    if not cert:
        return Verdict.failed("blocks are not decisive", [cert])
    for t in sigma.triples:
        if not is_circular(sigma, *t):
            return Verdict.failed(f"triple {t} is not circular", [t])
    return Verdict.passed(f"{len(sigma.blocks)} decisive blocks, {len(sigma.triples)} circular triples")


# ---------------------------------------------------------------------------
# openness certificates over a model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OpenWitness:
    """``part == ⋂ interval(point, side)``; no terms means the whole carrier."""

    part: int
    terms: tuple  # of (point, side)

    def replay(self, g, parts) -> bool:
        acc = g.carrier
        for x, side in self.terms:
            acc = acc & g.interval(x, side)
        return acc == parts[self.part]

    def __str__(self):
        if not self.terms:
            return f"part {self.part} = whole carrier"
        body = " ∩ ".join(f"(←,{x})" if side == "below" else f"({x},→)" for x, side in self.terms)
        return f"part {self.part} = {body}"


def realize(sigma: Tournament, parts: Sequence[SymbolicSet], children, handles=None):
    """``sigma * children`` with ``parts[i]`` realizing ``handles[i]``
    (default: handle ``i``)."""
    handles = tuple(range(len(parts))) if handles is None else tuple(handles)
    if set(handles) != set(sigma.carrier) or len(handles) != len(parts):
        raise ValueError("one realized part per handle is required")
    top = Tournament.from_relation(range(len(parts)),
                                   lambda i, j: sigma.select(handles[i], handles[j]) == handles[i])
    return combine_invariant(top, list(children), list(parts))


def part_witnesses(space, part: SymbolicSet, depth: int = 8) -> list[Fraction]:
    """Witness points lying in ``part`` (never empty)."""
    pts = [w for w in purisch_witnesses(space, depth) if w in part]
    return pts or [part.sample_point()]


def part_witness(space, part: SymbolicSet, depth: int = 8) -> Fraction:
    """The first witness point lying in ``part``."""
    return part_witnesses(space, part, depth)[0]


def probe_points(space, points) -> list[Fraction]:
    """``points`` plus the midpoint of every consecutive pair lying in the
    model; intervals cut at ``points`` are constant between probes."""
    pts = sorted(set(points))
    mids = [(a + b) / 2 for a, b in zip(pts, pts[1:])]
    return sorted(set(pts) | {m for m in mids if m in space})


class WitnessSearch:
    """Intervals of ``g`` at given points of each part, with probe bitsets
    used to prefilter intersections before the exact check."""

    def __init__(self, g, parts, witnesses):
        self.g, self.parts = g, parts
        space = parts[0].space
        pts = [w if isinstance(w, (list, tuple)) else [w] for w in witnesses]
        self.probes = probe_points(space, [x for ps in pts for x in ps])
        self.cands = []
        for j, ps in enumerate(pts):
            for x, side in itertools.product(ps, ("below", "above")):
                iv = g.interval(x, side)
                self.cands.append((j, (x, side), self._bits(iv), iv))
        self.targets = [self._bits(p) for p in parts]

    def _bits(self, S):
        return sum(1 << k for k, x in enumerate(self.probes) if x in S)

    def find(self, i, bound) -> Optional[OpenWitness]:
        if len(self.parts) == 1:
            return OpenWitness(i, ())
        target = self.targets[i]
        cands = [c for c in self.cands if c[0] != i and c[2] & target == target]
        everything = (1 << len(self.probes)) - 1
        hit = self._dfs(cands, 0, everything, [], target, bound, i)
        return hit

    def _dfs(self, cands, start, acc, chosen, target, bound, i):
        if acc == target and chosen:
            inter = self.g.carrier
            for c in chosen:
                inter = inter & c[3]
            if inter == self.parts[i]:
                return OpenWitness(i, tuple(c[1] for c in chosen))
        if len(chosen) == bound:
            return None
        for k in range(start, len(cands)):
            nxt = acc & cands[k][2]
            if nxt == acc:
                continue
            chosen.append(cands[k])
            hit = self._dfs(cands, k + 1, nxt, chosen, target, bound, i)
            chosen.pop()
            if hit is not None:
                return hit
        return None


def find_open_witness(g, parts, i, witnesses, bound) -> Optional[OpenWitness]:
    """Search ``≤ bound`` intervals at other parts' witnesses whose
    intersection is exactly ``parts[i]``; ``witnesses[j]`` is a point or a
    list of points of ``parts[j]``."""
    return WitnessSearch(g, parts, witnesses).find(i, bound)


def certify_partition_open(sigma: Tournament, parts: Sequence[SymbolicSet], children=None,
                           bound: int = 4, depth: int = 8, handles=None) -> Verdict:
    """Exhibit, for each part, an intersection of at most ``bound`` intervals
    of ``sigma * children`` equal to that part; each witness is replayed.

    Intervals are taken at the first witness point of every other part, and
    at all of its witness points when that is not enough.  ``children=None``
    runs the certificate twice, with all children the natural order and with
    all children its reverse.
    """
    parts = [p.normalized() for p in parts]
    space = parts[0].space
    runs = [children] if children is not None else [
        [Canonical(space, d, p) for p in parts] for d in (FORWARD, REVERSE)]
    every = [part_witnesses(space, p, depth) for p in parts]
    first = [pts[0] for pts in every]
    certs, realized = [], []
    for kids in runs:
        g = realize(sigma, parts, kids, handles)
        realized.append(g)
        narrow = WitnessSearch(g, parts, first)
        wide = None
        for i in range(len(parts)):
            w = narrow.find(i, bound)
            if w is None:
                wide = wide or WitnessSearch(g, parts, every)
                w = wide.find(i, bound)
            if w is None:
                return Verdict.failed(f"no intersection of ≤{bound} intervals equals part {i}",
                                      [f"part {i}: {parts[i]!r}"], part=i)
            if not w.replay(g, parts):  # pragma: no cover - guards the search
                return Verdict.failed(f"witness for part {i} does not replay", [w])
            certs.append(w)
    return Verdict.passed(f"all {len(parts)} parts open", certs,
                          max_terms=max((len(c.terms) for c in certs), default=0),
                          selections=realized)


def isolated_segments(n: int, closed: bool = True, gap: int = 2):
    """Model text for ``n`` isolated unit segments ``[gap·k, gap·k + 1]``."""
    ends = "" if closed else " open open"
    return "; ".join(f"segment {gap * k} {gap * k + 1}{ends}" for k in range(n))


def component_parts(space) -> list[SymbolicSet]:
    """The components of a model with finitely many components, as sets."""
    comps = SymbolicSet.whole(space).finite_components()
    if comps is None:
        raise ValueError("the model has infinitely many components")
    return [SymbolicSet.component(space, c).normalized() for c in comps]

