"""Openness in selection topologies over symbolic models.

The subbase of a selection topology consists of the order intervals
``(←,x)`` and ``(x,→)``.  A target set is open when every point has a
finite intersection of subbasic sets around it inside the target.  The
engine decides this at finitely many probe points:

* ``Open``: for each probe, at most ``B`` subbasic sets whose intersection
  contains the probe and lies in the target (checked exactly).
* ``NotOpen``: a probe ``p`` and a one-sided germ ``(q, side)`` (all model
  points just left/right of ``q``) lying outside the target, such that every
  subbasic set containing ``p`` contains the germ.  Finite intersections of
  such sets then all meet the complement.
* ``Undetermined`` otherwise.

Subbasic sets are generated at finitely many parameter points (witness
points of the model to a depth, plus the target's own boundary).  Both
verdicts assume interval behaviour is homogeneous between these points.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .geometry import DEFAULT_DEPTH, component_witnesses, purisch_witnesses
from .selections import Undetermined, restrict
from .sets import Bounds, SymbolicSet, as_bounds
from .space import SymbolicSpace
from .verdict import Verdict

SIDES = ("below", "above")
DEFAULT_BOUND = 4


@dataclass(frozen=True)
class SubbasicTerm:
    selection: int
    point: Fraction
    side: str

    def __str__(self):
        body = f"(←,{self.point})" if self.side == "below" else f"({self.point},→)"
        return f"{body}[σ{self.selection}]"


class Subbase:
    """The order intervals of one or more selections on a common model."""

    def __init__(self, selections: Sequence, depth: int = DEFAULT_DEPTH):
        selections = list(selections)
        if not selections:
            raise ValueError("a subbase needs at least one selection")
        space = selections[0].space
        for s in selections:
            if s.space is not space:
                raise ValueError("selections live on different models")
        self.selections = selections
        self.space = space
        self.depth = depth
        self._sets: dict = {}

    def bounds(self, term: SubbasicTerm) -> Bounds:
        got = self._sets.get(term)
        if got is None:
            got = self.selections[term.selection].interval_bounds(term.point, term.side)
            self._sets[term] = got
        return got

    def terms_at(self, points) -> list[SubbasicTerm]:
        return [SubbasicTerm(i, Fraction(x), side)
                for x in points for i in range(len(self.selections)) for side in SIDES]

    def parameters(self, extra=()) -> list[Fraction]:
        pts = set(purisch_witnesses(self.space, self.depth + 2))
        pts.update(x for x in extra if x in self.space)
        return sorted(pts)


def supremum_subbase(subs: Sequence[Subbase]) -> Subbase:
    """Subbase of the supremum of the topologies."""
    subs = list(subs)
    if not subs:
        raise ValueError("nothing to combine")
    space = subs[0].space
    if any(s.space is not space for s in subs):
        raise ValueError("subbases live on different models")
    return Subbase([sel for s in subs for sel in s.selections], max(s.depth for s in subs))


# ---------------------------------------------------------------------------
# germs
# ---------------------------------------------------------------------------


def accumulates(space: SymbolicSpace, q, side) -> bool:
    return space.left_accumulates(q) if side == "left" else space.right_accumulates(q)


def germ_in(S: SymbolicSet, q, side) -> bool:
    """Whether ``S`` contains every model point in ``(q-d, q)`` (side "left")
    or ``(q, q+d)`` (side "right") for some ``d > 0``; the model must
    accumulate at ``q`` from that side."""
    for h in S.canonical():
        if side == "left" and h.lower < q <= h.upper:
            return True
        if side == "right" and h.lower <= q < h.upper:
            return True
    return False


@dataclass(frozen=True)
class Germ:
    q: Fraction
    side: str

    def __str__(self):
        return f"({self.q}-δ, {self.q})" if self.side == "left" else f"({self.q}, {self.q}+δ)"


def germ_sites(space: SymbolicSpace, target: SymbolicSet, depth: int) -> list[Germ]:
    pts = set(space.limits)
    for c in space.materialized_components(depth):
        pts.update((c.lo, c.hi))
    for h in target.canonical():
        for x in (h.lower, h.upper):
            if isinstance(x, Fraction):
                pts.add(x)
    return [Germ(q, side) for q in sorted(pts) for side in ("left", "right")
            if accumulates(space, q, side)]


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------


@dataclass
class OpenWitnessSet:
    point: Fraction
    terms: tuple

    def __str__(self):
        body = " ∩ ".join(map(str, self.terms)) if self.terms else "X"
        return f"{self.point} ∈ {body}"


@dataclass
class OpennessVerdict:
    status: str  # "open" | "not-open" | "undetermined"
    target: SymbolicSet
    witnesses: list = field(default_factory=list)
    point: Optional[Fraction] = None
    germ: Optional[Germ] = None
    containing: int = 0
    reason: str = ""

    @property
    def is_open(self):
        return self.status == "open"

    def __bool__(self):
        return self.is_open

    def certificate(self) -> str:
        if self.status == "open":
            return f"{self.target!r} open: " + "; ".join(map(str, self.witnesses))
        if self.status == "not-open":
            return (f"{self.target!r} not open at {self.point}: all {self.containing} subbasic "
                    f"sets containing it contain the germ {self.germ} outside the target")
        return f"{self.target!r} undetermined: {self.reason}"

    def __str__(self):
        return self.certificate()


def replay_open(sub: Subbase, target: SymbolicSet, w: OpenWitnessSet) -> bool:
    """Recompute a witness intersection by set algebra."""
    lower = upper = SymbolicSet.whole(sub.space)
    for t in w.terms:
        b = sub.bounds(t)
        lower, upper = lower & b.lower, upper & b.upper
    return w.point in lower and upper <= target


def probe_points(space, target: SymbolicSet, depth: int) -> list[Fraction]:
    """Points of the target at which openness is checked."""
    pts = {w for w in purisch_witnesses(space, depth) if w in target}
    ends = set()
    for h in target.canonical():
        for x in (h.lower, h.upper):
            if isinstance(x, Fraction):
                ends.add(x)
                if x in target:
                    pts.add(x)
    grid = sorted(pts | ends | set(purisch_witnesses(space, depth)))
    for a, b in zip(grid, grid[1:]):
        m = (a + b) / 2
        if m in target:
            pts.add(m)
    return sorted(pts)


def neighbour_points(space, target: SymbolicSet, reach: int = 2) -> list[Fraction]:
    """Witness points of the family members within ``reach`` indices of a
    member meeting the target; intervals at these points are the ones that
    cut the target's members off from their neighbours."""
    pts = set()
    for h in target.canonical():
        for j, f in enumerate(space.families):
            finite, tail = f.members_meeting(h)
            for n in finite + ([] if tail is None else [tail]):
                for k in range(max(0, n - reach), n + reach + 1):
                    pts.update(component_witnesses(space.member(j, k)))
    return sorted(pts)


def approach_points(space, target: SymbolicSet, probes) -> list[Fraction]:
    """At each end of the target that it accumulates to without containing,
    a point between the nearest probe and that end (so the probe has
    parameters on both sides inside the target)."""
    out = []
    for h in target.canonical():
        for e, side in ((h.lower, "right"), (h.upper, "left")):
            if not isinstance(e, Fraction) or e in target or not germ_in(target, e, side):
                continue
            inside = [q for q in probes if (q < e if side == "left" else q > e) and q in h]
            if not inside:
                continue
            q = max(inside) if side == "left" else min(inside)
            m = (q + e) / 2
            if m in space:
                out.append(m)
    return out


class _Grid:
    """Membership bitsets of subbasic bounds over a finite point grid."""

    def __init__(self, sub: Subbase, points):
        self.sub = sub
        self.points = sorted(set(points))
        self._cache = {}

    def bits(self, S) -> int:
        return sum(1 << k for k, x in enumerate(self.points) if x in S)

    def term_bits(self, t: SubbasicTerm) -> int:
        got = self._cache.get(t)
        if got is None:
            got = self.bits(self.sub.bounds(t).upper)
            self._cache[t] = got
        return got


def _search_open(sub, grid, p, target, cands, bound) -> Optional[OpenWitnessSet]:
    tbits = grid.bits(target)
    scored = []
    seen = set()
    for t in cands:
        # equal bitsets need not mean equal sets, so dedupe on the exact set
        key = sub.bounds(t).upper.normalized()
        if key in seen:
            continue
        seen.add(key)
        b = grid.term_bits(t)
        scored.append((bin(b).count("1"), b, t))
    scored.sort(key=lambda e: e[0])
    # drop candidates whose trace contains another candidate's trace
    minimal = [e for e in scored if not any(o[1] != e[1] and o[1] & e[1] == o[1] for o in scored)]
    rest = [e for e in scored if e not in minimal]
    pool = minimal + rest

    def exact(chosen):
        upper = SymbolicSet.whole(sub.space)
        for t in chosen:
            upper = upper & sub.bounds(t).upper
        return upper <= target

    def dfs(start, acc, chosen):
        if acc & ~tbits == 0 and exact(chosen):
            return tuple(chosen)
        if len(chosen) == bound:
            return None
        for k in range(start, len(pool)):
            nxt = acc & pool[k][1]
            if nxt == acc:
                continue
            chosen.append(pool[k][2])
            hit = dfs(k + 1, nxt, chosen)
            chosen.pop()
            if hit is not None:
                return hit
        return None

    everything = (1 << len(grid.points)) - 1
    hit = dfs(0, everything, [])
    return None if hit is None else OpenWitnessSet(p, hit)


def is_open(space: SymbolicSpace, sub: Subbase, target: SymbolicSet,
            B: int = DEFAULT_BOUND, depth: Optional[int] = None) -> OpennessVerdict:
    if B < 1:
        raise ValueError("the intersection bound must be at least 1")
    if target.space is not space or sub.space is not space:
        raise ValueError("target and subbase must live on the given model")
    depth = sub.depth if depth is None else depth
    target = target.normalized()
    if target.is_empty():
        return OpennessVerdict("open", target, [])
    if SymbolicSet.whole(space) <= target:
        return OpennessVerdict("open", target, [OpenWitnessSet(target.sample_point(), ())])
    probes = probe_points(space, target, depth)
    ends = [x for h in target.canonical() for x in (h.lower, h.upper) if isinstance(x, Fraction)]
    params = sub.parameters(list(probes) + ends + neighbour_points(space, target)
                            + approach_points(space, target, probes))
    terms = sub.terms_at(params)
    grid = _Grid(sub, set(probes) | set(params) | {
        (a + b) / 2 for a, b in zip(params, params[1:]) if (a + b) / 2 in space})
    germs = None
    witnesses = []
    for p in probes:
        try:
            containing = [t for t in terms if p in sub.bounds(t).lower]
            maybe = [t for t in terms if p in sub.bounds(t).upper]
        except Undetermined as exc:
            return OpennessVerdict("undetermined", target, reason=str(exc))
        w = _search_open(sub, grid, p, target, containing, B)
        if w is not None:
            witnesses.append(w)
            continue
        if germs is None:
            germs = [g for g in germ_sites(space, target, depth)
                     if not germ_in(target, g.q, g.side)]
        for g in germs:
            if all(germ_in(sub.bounds(t).lower, g.q, g.side) for t in maybe):
                return OpennessVerdict("not-open", target, point=p, germ=g,
                                       containing=len(maybe))
        return OpennessVerdict("undetermined", target, point=p,
                               reason=f"no ≤{B}-fold witness and no germ obstruction at {p}")
    return OpennessVerdict("open", target, witnesses)


# ---------------------------------------------------------------------------
# finite-trace guard
# ---------------------------------------------------------------------------


def finite_trace_open(traces, points: Sequence, inside: set) -> bool:
    """Whether ``inside`` is open in the topology on ``points`` generated by
    the subsets ``traces``."""
    for p in inside:
        nbhd = set(points)
        for s in traces:
            if p in s:
                nbhd &= s
        if not nbhd <= inside:
            return False
    return True


def trace_guard(sub: Subbase, verdict: OpennessVerdict, depth: Optional[int] = None) -> bool:
    """Necessary condition for an ``open`` verdict, computed pointwise.

    The subbasic sets the verdict used are recomputed by pairwise selection
    on the witness points ``W`` plus the verdict's probes; the target must then be
    open, on those points, in the topology these finite traces generate.
    """
    if not verdict.is_open:
        return True
    depth = sub.depth if depth is None else depth
    pts = sorted(set(purisch_witnesses(sub.space, depth)) | {w.point for w in verdict.witnesses})
    terms = {t for w in verdict.witnesses for t in w.terms}
    traces = []
    for t in terms:
        s = sub.selections[t.selection]
        if t.side == "below":
            traces.append({y for y in pts if y != t.point and s.select(y, t.point) == y})
        else:
            traces.append({y for y in pts if y != t.point and s.select(t.point, y) == t.point})
    inside = {p for p in pts if p in verdict.target}
    return finite_trace_open(traces, pts, inside)


# ---------------------------------------------------------------------------
# comparison with the model topology
# ---------------------------------------------------------------------------


def model_targets(space: SymbolicSpace, depth: int) -> list[SymbolicSet]:
    """Natural intervals at witness points, clopen components and family tails."""
    out = []
    for x in purisch_witnesses(space, depth):
        out.append(SymbolicSet.below(space, x))
        out.append(SymbolicSet.above(space, x))
    for c in space.materialized_components(depth):
        S = SymbolicSet.component(space, c)
        if S.is_clopen():
            out.append(S)
    for j, f in enumerate(space.families):
        K = space.family_limit_component(j)
        for k in (1, 3):
            m = space.member(j, k)
            if f.side == "right":
                out.append(SymbolicSet.interval(space, K.lo, m.hi, True, True))
            else:
                out.append(SymbolicSet.interval(space, m.lo, K.hi, True, True))
    uniq = []
    for S in out:
        S = S.normalized()
        if S not in uniq and S.is_open():
            uniq.append(S)
    return uniq


def _open_by_remainder(b: Bounds) -> bool:
    """The undecided part of ``b`` is made of clopen pieces of a clopen
    remainder, so the set is open as soon as its lower bound is."""
    R = b.remainder
    return R is not None and R.is_clopen() and (b.upper - b.lower) <= R


def subbase_model_open(sub: Subbase, depth: int) -> Verdict:
    """Every subbasic set at the parameter points is open in the model."""
    certs = []
    for t in sub.terms_at(sub.parameters()):
        try:
            b = sub.bounds(t)
        except Undetermined as exc:
            return Verdict.undetermined(f"subbasic set {t} not computed: {exc}")
        if not b.exact and not _open_by_remainder(b):
            return Verdict.undetermined(f"subbasic set {t} only known within bounds")
        bad = b.lower.open_violation()
        if bad is not None:
            return Verdict.failed(f"subbasic set {t} = {b.lower!r} is not open in the model at {bad}",
                                  [t], point=bad)
        certs.append(t)
    return Verdict.passed(f"{len(certs)} subbasic sets open in the model")


def topology_equals_model(space: SymbolicSpace, sub: Subbase, depth: int = DEFAULT_DEPTH,
                          B: int = DEFAULT_BOUND, targets=None) -> Verdict:
    """Both inclusions between the selection topology and the model topology."""
    inner = subbase_model_open(sub, depth)
    if not inner.ok:
        return inner
    certs = []
    verdicts = []
    for T in (model_targets(space, depth) if targets is None else targets):
        v = is_open(space, sub, T, B, depth)
        verdicts.append(v)
        if v.status == "not-open":
            return Verdict.failed(f"model-open set {T!r} is not open in the selection topology",
                                  [v.certificate()], target=T, verdict=v, verdicts=verdicts)
        if v.status == "undetermined":
            return Verdict.undetermined(f"openness of {T!r} undetermined: {v.reason}",
                                        target=T, verdict=v, verdicts=verdicts)
        certs.append(v.certificate())
    return Verdict.passed(f"{len(verdicts)} model-open sets open; {inner.message}", certs,
                          verdicts=verdicts)


def trace_intervals_match(selection, points) -> bool:
    """Symbolic intervals restricted to ``points`` agree with the pointwise
    tournament intervals."""
    pts = sorted(set(Fraction(p) for p in points))
    tour = restrict(selection, pts)
    for x in pts:
        for side in SIDES:
            b = as_bounds(selection.interval_bounds(x, side))
            surely = {y for y in pts if y in b.lower}
            maybe = {y for y in pts if y in b.upper}
            want = set(tour.below(x) if side == "below" else tour.above(x))
            if surely != maybe or surely != want:
                return False
    return True

