"""Brute-force cws numbers of models with finitely many components.

A candidate selection orders the components by a tournament and each
non-degenerate component by its natural order or the reverse.  Reversing a
selection swaps its below/above intervals, so it generates the same
topology; the search therefore keeps one member of each reversal pair.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .builders import build_lemma23, realize
from .geometry import PreconditionError
from .selections import (FORWARD, REVERSE, Canonical, Tournament,
                         combine_invariant)
from .sets import SymbolicSet
from .space import SymbolicSpace, parse_model
from .topology import Subbase, topology_equals_model
from .verdict import Verdict

DEFAULT_MAX_K = 3


def component_sets(space: SymbolicSpace) -> list[SymbolicSet]:
    if not space.finite:
        raise PreconditionError("the brute-force search needs finitely many components")
    return [SymbolicSet.component(space, c).normalized() for c in sorted(space.basics)]


@dataclass(frozen=True, order=True)
class Candidate:
    """A component tournament (by code) and per-component orientations."""

    orientations: tuple
    code: int
    m: int = field(compare=False)

    @property
    def tournament(self) -> Tournament:
        return Tournament.from_code(range(self.m), self.code)

    def reversed(self) -> "Candidate":
        full = (1 << (self.m * (self.m - 1) // 2)) - 1
        flip = {FORWARD: REVERSE, REVERSE: FORWARD, None: None}
        return Candidate(tuple(flip[o] for o in self.orientations), full ^ self.code, self.m)

    def representative(self) -> "Candidate":
        return min(self, self.reversed())

    def realize(self, space: SymbolicSpace):
        parts = component_sets(space)
        children = [Canonical(space, o or FORWARD, p) for o, p in zip(self.orientations, parts)]
        return combine_invariant(self.tournament, children, parts)

    def __str__(self):
        orient = "".join({FORWARD: "+", REVERSE: "-", None: "."}[o] for o in self.orientations)
        return f"tournament#{self.code}/{orient}"


def enumerate_candidates(space: SymbolicSpace, transitive_only: bool = False) -> Iterator[Candidate]:
    """Every tournament on the components times every orientation of the
    non-degenerate ones (degenerate components carry ``None``)."""
    comps = sorted(space.basics) if space.finite else None
    if comps is None:
        raise PreconditionError("the brute-force search needs finitely many components")
    m = len(comps)
    choices = [(None,) if c.degenerate else (FORWARD, REVERSE) for c in comps]
    codes = range(1 << (m * (m - 1) // 2))
    if transitive_only:
        codes = [c for c in codes if Tournament.from_code(range(m), c).is_transitive()]
    for orient in itertools.product(*choices):
        for code in codes:
            yield Candidate(tuple(orient), code, m)


def representatives(space, transitive_only=False) -> list[Candidate]:
    """One candidate per reversal pair, in enumeration order."""
    seen, out = set(), []
    for c in enumerate_candidates(space, transitive_only):
        r = c.representative()
        if r not in seen:
            seen.add(r)
            out.append(r)
    return out


@dataclass
class CwsReport:
    space: str
    value: Optional[int]
    max_k: int
    selections: tuple = ()
    verdict: Optional[Verdict] = None
    rejected: list = field(default_factory=list)
    checked: int = 0

    @property
    def found(self) -> bool:
        return self.value is not None

    def summary(self) -> str:
        if not self.found:
            return f"cws({self.space}) ≥ {self.max_k + 1} undetermined ({self.checked} sets checked)"
        names = ", ".join(map(str, self.selections))
        return f"cws({self.space}) = {self.value} via {{{names}}} ({self.checked} sets checked)"


class _Search:
    def __init__(self, space, B, depth):
        self.space, self.B, self.depth = space, B, depth
        self._realized = {}
        self.checked = 0

    def selection(self, c: Candidate):
        got = self._realized.get(c)
        if got is None:
            got = self._realized[c] = c.realize(self.space)
        return got

    def check(self, combo) -> Verdict:
        self.checked += 1
        sub = Subbase([self.selection(c) for c in combo], self.depth)
        return topology_equals_model(self.space, sub, self.depth, self.B)


def cws(space: SymbolicSpace, max_k: int = DEFAULT_MAX_K, B: int = 4, depth: int = 8,
        keep_rejected: bool = True) -> CwsReport:
    """Least k such that some k candidates generate the model topology."""
    if max_k < 1:
        raise ValueError("max_k must be at least 1")
    reps = representatives(space)
    search = _Search(space, B, depth)
    rejected = []
    for k in range(1, max_k + 1):
        for combo in itertools.combinations(reps, k):
            v = search.check(combo)
            if v.ok:
                return CwsReport(space.name, k, max_k, combo, v, rejected, search.checked)
            if keep_rejected and k == 1:
                rejected.append((combo, v))
    return CwsReport(space.name, None, max_k, rejected=rejected, checked=search.checked)


def orderability(space: SymbolicSpace, B: int = 4, depth: int = 8) -> tuple[bool, Optional[Candidate], int]:
    """Whether some transitive candidate (a compatible linear order) alone
    generates the topology; returns the witness and the number checked."""
    search = _Search(space, B, depth)
    for c in representatives(space, transitive_only=True):
        if search.check((c,)).ok:
            return True, c, search.checked
    return False, None, search.checked


def canonical_pair(space: SymbolicSpace, X0: SymbolicSet, X1: SymbolicSet, children=None):
    """Selections ordering ``X0 < X1`` and ``X1 < X0`` blockwise, with the
    halves ordered by ``children`` (natural order by default), and the
    verdict for the supremum of their topologies."""
    X0, X1 = X0.normalized(), X1.normalized()
    if X0.is_empty() or X1.is_empty():
        raise PreconditionError("both halves must be nonempty")
    for S in (X0, X1):
        if not S.is_clopen():
            raise PreconditionError(f"{S!r} is not clopen")
    if not (X0 & X1).is_empty() or (X0 | X1) != SymbolicSet.whole(space):
        raise PreconditionError("the halves must partition the model")
    kids = children or [Canonical(space, FORWARD, X0), Canonical(space, FORWARD, X1)]
    g = combine_invariant(Tournament.linear([0, 1]), kids, [X0, X1])
    h = combine_invariant(Tournament.linear([1, 0]), kids, [X0, X1])
    sub = Subbase([g, h])
    return g, h, topology_equals_model(space, sub, sub.depth)


def lemma23_cws_one(space: SymbolicSpace, B: int = 4, depth: int = 8):
    """The triple-based selection over at least three clopen components,
    with natural children, and its topology verdict."""
    parts = component_sets(space)
    if len(parts) < 3:
        raise PreconditionError("at least three components are required")
    for p in parts:
        if not p.is_clopen():
            raise PreconditionError(f"component {p!r} is not clopen")
    sigma = build_lemma23(len(parts))
    g = realize(sigma, parts, [Canonical(space, FORWARD, p) for p in parts])
    return g, topology_equals_model(space, Subbase([g], depth), depth, B)


@dataclass
class DichotomyReport:
    space: str
    components: int
    cws: CwsReport
    orderable: Optional[bool]
    order_witness: Optional[Candidate]
    verdict: Verdict


def check_theorem21(space: SymbolicSpace, B: int = 4, depth: int = 8) -> DichotomyReport:
    """cws ≤ 2, and cws = 2 exactly for non-orderable two-component models.

    Orderability is searched only when it decides the claim (two
    components, or cws 1 to confirm the implication); with three or more
    components the claim holds iff cws = 1.
    """
    m = len(space.basics)
    rep = cws(space, 2, B, depth, keep_rejected=False)
    if not rep.found:
        v = Verdict.failed(f"{space.name}: no pair of selections generates the topology")
        return DichotomyReport(space.name, m, rep, None, None, v)
    orderable, witness = None, None
    if m <= 2:
        orderable, witness, _ = orderability(space, B, depth)
    if orderable and rep.value != 1:  # pragma: no cover - a transitive candidate is a candidate
        v = Verdict.failed(f"{space.name}: orderable but cws = {rep.value}")
    else:
        expect_two = m == 2 and orderable is False
        ok = (rep.value == 2) == expect_two
        text = f"{space.name}: {m} components, cws = {rep.value}, orderable = {orderable}"
        v = Verdict.passed(text) if ok else Verdict.failed(text + " contradicts the dichotomy")
    return DichotomyReport(space.name, m, rep, orderable, witness, v)


KINDS = ("point", "closed", "open")


def sum_model(kinds: Sequence[str], name: Optional[str] = None) -> SymbolicSpace:
    """Topological sum of points / closed unit segments / open unit segments
    placed at 0, 2, 4, ..."""
    lines = []
    for k, kind in enumerate(kinds):
        a = 2 * k
        if kind == "point":
            lines.append(f"point {a}")
        elif kind == "closed":
            lines.append(f"segment {a} {a + 1}")
        elif kind == "open":
            lines.append(f"segment {a} {a + 1} open open")
        else:
            raise ValueError(f"unknown component kind {kind!r}")
    return parse_model("\n".join(lines), name or "+".join(kinds))


def sweep_models(max_components: int = 4) -> list[SymbolicSpace]:
    """Every sum of at most ``max_components`` components of the three kinds
    (up to reordering, which does not change the topology)."""
    return [sum_model(ks) for m in range(1, max_components + 1)
            for ks in itertools.combinations_with_replacement(KINDS, m)]
