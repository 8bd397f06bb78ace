"""Acceptance criteria 1-8, each timed and reported on one line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are repeated in
the terminal summary) or ``python3 tests/test_acceptance.py``.
"""
import functools
import gc
import time
from dataclasses import dataclass, field
from fractions import Fraction

from selectop.builders import (block_contract, build_cor26, build_lemma23, build_lemma25,
                               certify_partition_open, component_parts, isolated_segments)
from selectop.cws import check_theorem21, cws, enumerate_candidates, lemma23_cws_one, sum_model, sweep_models
from selectop.geometry import purisch_witnesses
from selectop.sets import SymbolicSet
from selectop.sieve import Sieve, check_sieve
from selectop.space import load_model, parse_model
from selectop.synth import (synthesize, verify_continuity, verify_cut_boxes, verify_invariance,
                            verify_topology_equality)
from selectop.topology import (OpennessVerdict, OpenWitnessSet, SubbasicTerm, Subbase, is_open,
                               trace_guard, trace_intervals_match)

F = Fraction
DEPTH = 8
RESULTS = []


@dataclass
class Run:
    ok: bool
    detail: str
    seconds: float = 0.0
    selections: list = field(default_factory=list)  # (selection, witness depth)
    opens: list = field(default_factory=list)  # (subbase, open verdict)


def timed(fn):
    @functools.cache
    def wrapper():
        # evidence kept from earlier criteria should not slow this one's GC
        gc.collect()
        gc.freeze()
        t0 = time.perf_counter()
        run = fn()
        run.seconds = time.perf_counter() - t0
        return run
    return wrapper


def record(number, limit, run):
    ok = run.ok and (limit is None or run.seconds < limit)
    budget = f" < {limit}s" if limit is not None else ""
    line = (f"criterion {number}: {'PASS' if ok else 'FAIL'} "
            f"({run.seconds:.1f}s{budget}) {run.detail}")
    RESULTS.append(line)
    print(line)
    return ok, line


def opens_of(verdict, sub):
    return [(sub, v) for v in verdict.details.get("verdicts", []) if v.is_open]


# ---------------------------------------------------------------------------


@timed
def run_1():
    """cws of (0,1) ∪ {2} is 2: all four single candidates fail at {2}."""
    space = load_model("M1")
    point = SymbolicSet.points(space, [2])
    run = Run(True, "")
    failures = 0
    for c in enumerate_candidates(space):
        g = c.realize(space)
        v = is_open(space, Subbase([g], DEPTH), point)
        run.selections.append((g, DEPTH))
        failures += v.status == "not-open" and v.germ is not None
    rep = cws(space)
    pair = [c.realize(space) for c in rep.selections]
    run.selections += [(g, DEPTH) for g in pair]
    run.opens += opens_of(rep.verdict, Subbase(pair, DEPTH))
    run.ok = failures == 4 and rep.value == 2 and rep.verdict.ok
    run.detail = f"{failures}/4 candidates NotOpen at {{2}}; {rep.summary()}"
    return run


@timed
def run_2():
    """Dichotomy over every sum of at most four point/closed/open pieces."""
    run = Run(True, "")
    bad = []
    models = sweep_models(4)
    for space in models:
        d = check_theorem21(space)
        expect_two = d.components == 2 and d.orderable is False
        if not (d.verdict.ok and d.cws.value <= 2 and (d.cws.value == 2) == expect_two):
            bad.append(space.name)
        pick = [c.realize(space) for c in d.cws.selections]
        run.selections += [(g, DEPTH) for g in pick]
        run.opens += opens_of(d.cws.verdict, Subbase(pick, DEPTH))
    run.ok = not bad
    run.detail = f"{len(models)} models checked" + (f"; failing: {bad}" if bad else "")
    return run


@timed
def run_3():
    """One triple-based selection suffices on clopen models with ≥3 pieces."""
    spaces = [load_model("M3"),
              sum_model(["point"] * 3),
              sum_model(["closed"] * 3),
              sum_model(["open", "closed", "point"]),
              sum_model(["point", "closed", "open", "point", "closed"]),
              parse_model(isolated_segments(7), "7 segments")]
    run = Run(True, "")
    passed = 0
    for space in spaces:
        g, v = lemma23_cws_one(space, depth=DEPTH)
        passed += v.ok
        run.selections.append((g, DEPTH))
        run.opens += opens_of(v, Subbase([g], DEPTH))
    run.ok = passed == len(spaces)
    run.detail = f"{passed}/{len(spaces)} models generated by one selection"
    return run


def _builder_case(sigma, n, contract_ok, run):
    space = parse_model(isolated_segments(n), f"{n} segments")
    parts = component_parts(space)
    v = certify_partition_open(sigma, parts, depth=DEPTH)
    gs = v.details.get("selections", [])
    replayed = v.ok and all(w.replay(gs[k // n], parts) for k, w in enumerate(v.certificates))
    for k, w in enumerate(v.certificates if v.ok else []):
        g = gs[k // n]
        terms = tuple(SubbasicTerm(0, x, side) for x, side in w.terms)
        probes = [p for p in purisch_witnesses(space, DEPTH) if p in parts[w.part]]
        verdict = OpennessVerdict("open", parts[w.part], [OpenWitnessSet(p, terms) for p in probes])
        run.opens.append((Subbase([g], DEPTH), verdict))
    run.selections += [(g, DEPTH) for g in gs]
    return bool(block_contract(sigma)) and contract_ok and replayed


@timed
def run_4():
    """Builder contracts and replayed openness certificates."""
    run = Run(True, "")
    cases = failed = 0
    for n in [1] + list(range(3, 13)):
        cases += 1
        failed += not _builder_case(build_lemma23(n), n, True, run)
    for n in range(7, 13):
        for S in range(n):
            sigma = build_lemma25(n, S)
            top = all(sigma.less(i, S) for i in range(n) if i != S)
            cases += 1
            failed += not _builder_case(sigma, n, top, run)
    for q in (6, 7, 8):
        for r in (6, 7, 8):
            Q, S, R = tuple(range(q)), q, tuple(range(q + 1, q + 1 + r))
            sigma = build_cor26(Q, S, R)
            sides = all(sigma.less(a, b) for a in Q + (S,) for b in (S,) + R if a != b)
            cases += 1
            failed += not _builder_case(sigma, q + r + 1, sides, run)
    run.ok = failed == 0
    run.detail = f"{cases - failed}/{cases} builder cases pass with witness replay"
    return run


@timed
def run_5():
    """Sieve invariants at depth 8 on one and two accumulation points."""
    verdicts = {name: check_sieve(Sieve(load_model(name), DEPTH), DEPTH) for name in ("M4", "M5")}
    bad = [f"{k}: {v.message}" for k, v in verdicts.items() if not v.ok]
    return Run(not bad, "; ".join(bad) or "M4 and M5 sieves satisfy all level and big-component checks")


@timed
def run_6():
    """The synthesized selection on M4 passes every bounded-depth check."""
    g = synthesize(load_model("M4"), DEPTH)
    checks = {
        "invariance": verify_invariance(g),
        "cut boxes": verify_cut_boxes(g),
        "continuity": verify_continuity(g, pairs=1000, seed=0),
        "topology": verify_topology_equality(g),
    }
    bad = [f"{k}: {v.message}" for k, v in checks.items() if not v.ok]
    sub = Subbase([g], DEPTH)
    run = Run(not bad, "; ".join(bad) or "invariance, continuity (1000 pairs) and topology pass",
              selections=[(g, DEPTH)],
              opens=[(sub, v) for v in checks["topology"].details.get("verdicts", []) if v.is_open])
    return run


PRODUCERS = (run_1, run_2, run_3, run_4, run_5, run_6)


@timed
def run_7():
    """Symbolic intervals agree with pointwise tournaments on witness points."""
    sels = [s for make in PRODUCERS for s in make().selections]
    bad = sum(not trace_intervals_match(g, purisch_witnesses(g.space, d)) for g, d in sels)
    return Run(bad == 0 and bool(sels), f"{len(sels) - bad}/{len(sels)} selections agree")


@timed
def run_8():
    """No Open verdict fails its finite-trace projection."""
    opens = [o for make in PRODUCERS for o in make().opens]
    bad = sum(not trace_guard(sub, v) for sub, v in opens)
    return Run(bad == 0 and bool(opens), f"{bad} guard violations among {len(opens)} Open verdicts")


# ---------------------------------------------------------------------------


def test_criterion_1_cws_of_open_segment_plus_point():
    ok, line = record(1, 5, run_1())
    assert ok, line


def test_criterion_2_dichotomy_sweep():
    ok, line = record(2, 120, run_2())
    assert ok, line


def test_criterion_3_one_selection_on_clopen_models():
    ok, line = record(3, 10, run_3())
    assert ok, line


def test_criterion_4_builder_suites():
    ok, line = record(4, 30, run_4())
    assert ok, line


def test_criterion_5_sieve_invariants():
    ok, line = record(5, 30, run_5())
    assert ok, line


def test_criterion_6_synthesized_selection():
    ok, line = record(6, 120, run_6())
    assert ok, line


def test_criterion_7_oracle_equivalence():
    ok, line = record(7, None, run_7())
    assert ok, line


def test_criterion_8_soundness_guard():
    ok, line = record(8, None, run_8())
    assert ok, line


if __name__ == "__main__":
    for number, (make, limit) in enumerate(
            [(run_1, 5), (run_2, 120), (run_3, 10), (run_4, 30), (run_5, 30),
             (run_6, 120), (run_7, None), (run_8, None)], start=1):
        record(number, limit, make())
