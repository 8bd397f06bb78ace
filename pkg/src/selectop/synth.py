"""The sieve-invariant weak selection and its verification suites.

Every node of the sieve gets a selection on its children built from circular
triples: the plain construction when the node has no big component, the
"one side below a maximal part" construction (or its reverse) when the big
component is approached from one side, and the two-sided construction when
it is approached from both.  The global selection orders two points of one
component naturally and otherwise by the selection at the last node whose
piece contains both.
"""
from __future__ import annotations

import random
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .builders import (BlockTournament, _reverse_blocks, build_cor26,
                       build_lemma23, build_lemma25)
from .geometry import PreconditionError, is_single_component, purisch_witnesses
from .selections import DecisiveCertificate, Structured, Undetermined
from .sets import Bounds, SymbolicSet
from .sieve import Sieve
from .space import SymbolicSpace
from .topology import (Subbase, is_open, replay_open, topology_equals_model,
                       trace_guard)
from .verdict import Verdict, combine

EXPANSION_SLACK = 8


@dataclass(frozen=True)
class NodeSelection:
    """Selection on the children (by index) of one node."""

    node: tuple
    case: str
    sigma: BlockTournament
    pi: Optional[int] = None
    below: tuple = ()
    above: tuple = ()


def node_selection(sv: Sieve, t: tuple) -> NodeSelection:
    t = tuple(t)
    kids = sv.children(t)
    m = len(kids)
    if m == 2:  # pragma: no cover - the sieve is anti-binary
        raise PreconditionError(f"node {t} has exactly two children")
    info = sv.info(t)
    if info.big is None:
        return NodeSelection(t, info.case, build_lemma23(m))
    C, pi = info.big, info.pi
    lower = SymbolicSet.below(sv.space, C.lo)
    upper = SymbolicSet.above(sv.space, C.hi)
    below = tuple(i for i, k in enumerate(kids) if i != pi and sv.value(k) <= lower)
    above = tuple(i for i, k in enumerate(kids) if i != pi and sv.value(k) <= upper)
    if len(below) + len(above) != m - 1:
        raise PreconditionError(f"a child of {t} straddles its big component {C}")
    ell, r = info.flags
    if (ell, r) == (0, 0):
        if m != 1:
            raise PreconditionError(f"node {t} around an isolated component has {m} children")
        sigma = BlockTournament([(0,)])
    elif (ell, r) == (1, 0):
        if above:
            raise PreconditionError(f"node {t} has children above {C} but C is approached only from below")
        sigma = build_lemma25(range(m), pi)
    elif (ell, r) == (0, 1):
        if below:
            raise PreconditionError(f"node {t} has children below {C} but C is approached only from above")
        sigma = BlockTournament(_reverse_blocks(build_lemma25(range(m), pi).blocks))
    else:
        sigma = build_cor26(below, pi, above)
    return NodeSelection(t, info.case, sigma, pi, below, above)


class SynthesizedSelection(Structured):
    """The global sieve-invariant selection; structured over the whole model."""

    def __init__(self, sieve: Sieve, cap: Optional[int] = None):
        self.sieve = sieve
        self.space = sieve.space
        self.carrier = SymbolicSet.whole(self.space)
        self.cap = sieve.depth + EXPANSION_SLACK if cap is None else cap
        self._table: dict = {}
        self._choices: dict = {}
        self._lock = threading.Lock()

    def node_selection(self, t) -> NodeSelection:
        t = tuple(t)
        got = self._table.get(t)
        if got is None:
            got = node_selection(self.sieve, t)
            with self._lock:
                self._table.setdefault(t, got)
        return got

    def table(self, depth: Optional[int] = None) -> dict:
        """Node selections of the root and every node above level ``depth``."""
        depth = self.sieve.depth if depth is None else depth
        nodes = [()] + [t for n in range(depth) for t in self.sieve.level(n)]
        return {t: self.node_selection(t) for t in nodes}

    def _child_index(self, t, x) -> int:
        for i, k in enumerate(self.sieve.children(t)):
            if x in self.sieve.value(k):
                return i
        raise AssertionError(f"{x} lies in no child of {t}")  # pragma: no cover

    def split_node(self, x, y):
        """``(t, i, j)``: the last node containing x and y and the indices of
        their children there."""
        t = self.sieve.meet(x, y, self.cap)
        if t is None:
            raise Undetermined(f"{x} and {y} are not separated by level {self.cap}")
        return t, self._child_index(t, x), self._child_index(t, y)

    def select(self, x, y):
        x, y = Fraction(x), Fraction(y)
        self._check(x, y)
        if x == y:
            return x
        key = (x, y) if x < y else (y, x)
        got = self._choices.get(key)
        if got is None:
            got = self._choose(*key)
            self._choices[key] = got
        return got

    def _choose(self, x, y):
        if self.space.component_of(x) == self.space.component_of(y):
            return min(x, y)
        t, i, j = self.split_node(x, y)
        return x if self.node_selection(t).sigma.select(i, j) == i else y

    def interval_bounds(self, x, side: str) -> Bounds:
        """Walk x's branch collecting the sibling pieces on ``side``; exact
        once x's component is isolated or has become the node's big
        component, bounds at the expansion cap otherwise."""
        x = Fraction(x)
        self._check(x)
        below = side == "below"
        sp = self.space
        C = sp.component_of(x)
        cut = SymbolicSet.component(sp, C) & (SymbolicSet.below(sp, x) if below else SymbolicSet.above(sp, x))
        acc = SymbolicSet.empty(sp)
        path = ()
        while True:
            info = self.sieve.info(path)
            if info.big == C:
                side_of_C = SymbolicSet.below(sp, C.lo) if below else SymbolicSet.above(sp, C.hi)
                return Bounds((acc | (self.sieve.value(path) & side_of_C) | cut).normalized())
            sigma = self.node_selection(path).sigma
            kids = self.sieve.children(path)
            ix = self._child_index(path, x)
            for i, k in enumerate(kids):
                if i != ix and (sigma.less(i, ix) if below else sigma.less(ix, i)):
                    acc = acc | self.sieve.value(k)
            path = kids[ix]
            S = self.sieve.value(path)
            if is_single_component(S):
                return Bounds((acc | cut).normalized())
            if len(path) - 1 >= self.cap:
                lower = (acc | cut).normalized()
                return Bounds(lower, (lower | S.without(x)).normalized(), remainder=S)

    def interval(self, x, side: str) -> SymbolicSet:
        b = self.interval_bounds(x, side)
        if not b.exact:
            raise Undetermined(f"the {side} interval at {x} is only known within bounds {b!r}")
        return b.lower

    def describe(self) -> str:
        return f"sieve-invariant selection on {self.space.name} (depth {self.sieve.depth}, cap {self.cap})"

    def __repr__(self):
        return f"SynthesizedSelection({self.space.name}, depth={self.sieve.depth})"


def synthesize(space: SymbolicSpace, depth: int = 8) -> SynthesizedSelection:
    if space.finite:
        raise PreconditionError("finitely many components: use the cws search instead")
    return SynthesizedSelection(Sieve(space, depth))


def interval_of(g: SynthesizedSelection, x) -> tuple[Bounds, Bounds]:
    return g.interval_bounds(x, "below"), g.interval_bounds(x, "above")


# ---------------------------------------------------------------------------
# node table contracts
# ---------------------------------------------------------------------------


def check_node_table(g: SynthesizedSelection, depth: Optional[int] = None) -> Verdict:
    """Side-ordering contracts at every node with a big component: children
    below it precede the piece containing it, which precedes children above
    it, and every child below precedes every child above."""
    bad = []
    checked = 0
    for t, ns in g.table(depth).items():
        if ns.pi is None:
            continue
        checked += 1
        less = ns.sigma.less
        for s in ns.below:
            if not less(s, ns.pi):
                bad.append(f"{t}: child {s} below the big component is not before {ns.pi}")
            for s2 in ns.above:
                if not less(s, s2):
                    bad.append(f"{t}: child {s} is not before child {s2}")
        for s2 in ns.above:
            if not less(ns.pi, s2):
                bad.append(f"{t}: child {s2} above the big component is not after {ns.pi}")
    if bad:
        return Verdict.failed("node selection contracts fail", bad)
    return Verdict.passed(f"side contracts hold at {checked} nodes with a big component")


# ---------------------------------------------------------------------------
# invariance
# ---------------------------------------------------------------------------


def _samples(space, S: SymbolicSet, pts, k=4) -> list[Fraction]:
    inside = [p for p in pts if p in S][:k]
    extra = S.sample_point()
    if extra is not None and extra not in inside:
        inside.append(extra)
    return inside


def verify_invariance(g: SynthesizedSelection, levels: Optional[int] = None,
                      selection=None, per_piece: int = 4) -> Verdict:
    """Every level family is decisive.

    By construction two pieces of a level are ordered by the node selection
    where their branches split; this is replayed on sample points of every
    piece against ``selection`` (default ``g`` itself).
    """
    sel = g if selection is None else selection
    sv = g.sieve
    levels = sv.depth if levels is None else levels
    pts = purisch_witnesses(sv.space, levels + 2)
    pairs = 0
    for n in range(levels + 1):
        nodes = sv.level(n)
        samples = [_samples(sv.space, sv.value(t), pts, per_piece) for t in nodes]
        for a in range(len(nodes)):
            for b in range(a + 1, len(nodes)):
                ta, tb = nodes[a], nodes[b]
                k = next(i for i in range(len(ta)) if ta[i] != tb[i])
                first = g.node_selection(ta[:k]).sigma.less(ta[k], tb[k])
                for x in samples[a]:
                    for y in samples[b]:
                        pairs += 1
                        if sel.less(x, y) != first:
                            lo, hi = (x, y) if first else (y, x)
                            cert = DecisiveCertificate(False, a, b, *_violation(sel, samples, a, b, lo, hi, first))
                            return Verdict.failed(
                                f"level {n}: pieces {ta} and {tb} are not uniformly ordered at ({x}, {y})",
                                [cert], level=n)
    return Verdict.passed(f"levels 0..{levels} decisive ({pairs} sampled pairs replayed)")


def _violation(sel, samples, a, b, lo, hi, first):
    """Witnesses ``x <_s y`` and ``y2 <_s x2`` with x, x2 in piece a."""
    for x in samples[a]:
        for y in samples[b]:
            if sel.less(x, y):
                up = (x, y)
                break
        else:
            continue
        break
    else:
        up = None
    for x in samples[a]:
        for y in samples[b]:
            if sel.less(y, x):
                down = (x, y)
                break
        else:
            continue
        break
    else:
        down = None
    if up is None or down is None:
        # the piece order differs from the construction but is still uniform
        x, y = (lo, hi) if first else (hi, lo)
        return x, y, x, y
    return up[0], up[1], down[0], down[1]


# ---------------------------------------------------------------------------
# continuity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContinuityBox:
    """Open ``U ∋ x`` and ``V ∋ y`` with ``U <_g V``."""

    x: Fraction
    y: Fraction
    U: SymbolicSet
    V: SymbolicSet
    kind: str
    checked_pairs: int = 0

    def __str__(self):
        return f"{self.kind}: {self.x} ∈ {self.U!r} <_g {self.V!r} ∋ {self.y}"


def big_node(g: SynthesizedSelection, C) -> tuple:
    """The first node of C's branch whose big component is C."""
    sv = g.sieve
    inside = C.lo if not C.lo_open else (C.lo + C.hi) / 2
    path = ()
    while True:
        if sv.info(path).big == C:
            return path
        if len(path) - 1 >= g.cap:
            raise Undetermined(f"{C} is not big by level {g.cap}")
        path = next(k for k in sv.children(path) if inside in sv.value(k))


def cut_box(g: SynthesizedSelection, C, p) -> tuple[SymbolicSet, SymbolicSet]:
    """The two halves of the piece around C cut at ``p ∈ C``."""
    sp = g.space
    S = g.sieve.value(big_node(g, C))
    return ((S & SymbolicSet.below(sp, p)).normalized(), (S & SymbolicSet.above(sp, p)).normalized())


def continuity_box(g: SynthesizedSelection, x, y) -> ContinuityBox:
    x, y = Fraction(x), Fraction(y)
    if not g.less(x, y):
        raise ValueError(f"{x} is not selected against {y}")
    sp = g.space
    C = sp.component_of(x)
    if C == sp.component_of(y):
        p = (x + y) / 2
        U, V = cut_box(g, C, p)
        return ContinuityBox(x, y, U, V, "cut")
    t, i, j = g.split_node(x, y)
    kids = g.sieve.children(t)
    return ContinuityBox(x, y, g.sieve.value(kids[i]), g.sieve.value(kids[j]), "pieces")


def check_box(g, box: ContinuityBox, pts) -> Optional[str]:
    """Problems with a box: membership, model-openness and uniform order on
    sample points (plus the pair itself)."""
    if box.x not in box.U or box.y not in box.V:
        return f"{box}: the pair is not inside the box"
    for S in (box.U, box.V):
        bad = S.open_violation()
        if bad is not None:
            return f"{box}: {S!r} is not open at {bad}"
    us = [box.x] + _samples(g.space, box.U, pts, 5)
    vs = [box.y] + _samples(g.space, box.V, pts, 5)
    for u in us:
        for v in vs:
            if not g.less(u, v):
                return f"{box}: {v} <_g {u}"
    return None


def sample_pairs(space: SymbolicSpace, n: int, seed: int = 0, depth: int = 8):
    """``n`` random pairs of distinct points; a third share of them within
    one non-degenerate component."""
    rng = random.Random(seed)
    comps = space.materialized_components(depth)
    segs = [c for c in comps if c.diam > 0]

    def point_in(c):
        if c.diam == 0:
            return c.lo
        lo, hi = c.lo, c.hi
        while True:
            q = lo + (hi - lo) * Fraction(rng.randint(0, 64), 64)
            if c.holds(q):
                return q

    out = []
    while len(out) < n:
        if segs and rng.random() < 1 / 3:
            c = rng.choice(segs)
            x, y = point_in(c), point_in(c)
        else:
            x, y = point_in(rng.choice(comps)), point_in(rng.choice(comps))
        if x != y:
            out.append((x, y))
    return out


def verify_continuity(g: SynthesizedSelection, pairs: int = 1000, seed: int = 0) -> Verdict:
    pts = purisch_witnesses(g.space, g.sieve.depth)
    kinds = {"pieces": 0, "cut": 0}
    for x, y in sample_pairs(g.space, pairs, seed, g.sieve.depth):
        if not g.less(x, y):
            x, y = y, x
        try:
            box = continuity_box(g, x, y)
        except Undetermined as exc:
            return Verdict.undetermined(f"pair ({x}, {y}): {exc}")
        problem = check_box(g, box, pts)
        if problem:
            return Verdict.failed(f"continuity fails at ({x}, {y})", [problem], pair=(x, y))
        kinds[box.kind] += 1
    return Verdict.passed(f"{pairs} pairs: {kinds['pieces']} piece boxes, {kinds['cut']} cut boxes")


def verify_cut_boxes(g: SynthesizedSelection, depth: Optional[int] = None) -> Verdict:
    """For every non-degenerate component to ``depth`` and its midpoint ``p``:
    the halves of its big node's piece at ``p`` are open and ordered."""
    depth = g.sieve.depth if depth is None else depth
    pts = purisch_witnesses(g.space, depth)
    certs = []
    for C in g.space.materialized_components(depth):
        if C.diam == 0:
            continue
        p = (C.lo + C.hi) / 2
        U, V = cut_box(g, C, p)
        lo = next(q for q in (C.lo, (C.lo + p) / 2) if C.holds(q))
        hi = next(q for q in (C.hi, (p + C.hi) / 2) if C.holds(q))
        box = ContinuityBox(lo, hi, U, V, "cut")
        problem = check_box(g, box, pts)
        if problem:
            return Verdict.failed(f"cut box of {C} at {p} fails", [problem])
        certs.append(box)
    return Verdict.passed(f"{len(certs)} component cut boxes open and ordered", certs)


# ---------------------------------------------------------------------------
# topology
# ---------------------------------------------------------------------------


def sieve_targets(g: SynthesizedSelection, levels: int) -> list[SymbolicSet]:
    out = []
    for n in range(levels + 1):
        for t in g.sieve.level(n):
            S = g.sieve.value(t)
            if S not in out:
                out.append(S)
    return out


def verify_topology_equality(g: SynthesizedSelection, depth: Optional[int] = None,
                             B: int = 4, piece_levels: int = 4) -> Verdict:
    """The selection topology equals the model topology on the standard
    targets, and sieve pieces to ``piece_levels`` are open; every open
    verdict is replayed and passes the finite-trace guard."""
    depth = g.sieve.depth if depth is None else depth
    sub = Subbase([g], depth)
    main = topology_equals_model(g.space, sub, depth, B)
    if not main.ok:
        return main
    verdicts = list(main.details["verdicts"])
    for S in sieve_targets(g, piece_levels):
        v = is_open(g.space, sub, S, B, depth)
        verdicts.append(v)
        if not v.is_open:
            status = Verdict.failed if v.status == "not-open" else Verdict.undetermined
            return status(f"sieve piece {S!r} is {v.status} in the selection topology", verdict=v)
    for v in verdicts:
        if not all(replay_open(sub, v.target, w) for w in v.witnesses):
            return Verdict.failed(f"open certificate for {v.target!r} does not replay")
        if not trace_guard(sub, v, depth):
            return Verdict.failed(f"open verdict for {v.target!r} fails the finite-trace guard")
    return Verdict.passed(f"{len(verdicts)} targets open with replayed certificates; {main.message}",
                          [v.certificate() for v in verdicts], verdicts=verdicts)


def verify_all(g: SynthesizedSelection, pairs: int = 1000, seed: int = 0, B: int = 4) -> Verdict:
    return combine([check_node_table(g), verify_invariance(g), verify_cut_boxes(g),
                    verify_continuity(g, pairs, seed), verify_topology_equality(g, B=B)],
                   f"sieve-invariant selection on {g.space.name}")
