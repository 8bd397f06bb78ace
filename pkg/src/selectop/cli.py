"""Command line entry point; exit codes 0/1/2 mean pass/fail/undetermined."""
from __future__ import annotations

import argparse
import sys
import time

from . import builders, sieve, synth
from .cws import DEFAULT_MAX_K, check_theorem21, cws, sweep_models
from .geometry import PreconditionError, convexity_violations, lr_flags, purisch_witnesses
from .sets import SymbolicSet
from .space import ModelError, builtin_models, load_model, parse_model
from .verdict import Verdict, combine


def _model(args):
    return load_model(args.model)


def cmd_model_check(args) -> Verdict:
    space = _model(args)
    print(space)
    comps, tails = SymbolicSet.whole(space).component_summary()
    print(f"components: {len(comps)} listed" + (f", {len(tails)} infinite families" if tails else ""))
    for c in comps:
        print(f"  {c}  flags(l,r)={lr_flags(space, c)}")
    for j, n0 in tails:
        f = space.families[j]
        print(f"  family at {f.limit} ({f.side}), ratio {f.ratio}, members from #{n0}")
    bad = convexity_violations(space, purisch_witnesses(space, args.depth))
    if bad:
        return Verdict.failed("the metric is not convex on the witness points", bad)
    return Verdict.passed(f"model {space.name} is well formed")


def _certify(sigma, n, args) -> Verdict:
    space = parse_model(builders.isolated_segments(n), f"{n} segments")
    parts = builders.component_parts(space)
    v = builders.certify_partition_open(sigma, parts, bound=args.bound, depth=args.depth)
    return combine([builders.block_contract(sigma), v], f"{sigma!r}: {v.message}")


def cmd_build_l23(args) -> Verdict:
    return _certify(builders.build_lemma23(args.parts), args.parts, args)


def cmd_build_l25(args) -> Verdict:
    top = args.parts - 1 if args.top is None else args.top
    sigma = builders.build_lemma25(args.parts, top)
    contract = Verdict.passed("top part maximal") if all(
        sigma.less(i, top) for i in range(args.parts) if i != top) else Verdict.failed("top part not maximal")
    return combine([contract, _certify(sigma, args.parts, args)], f"{sigma!r}")


def cmd_build_c26(args) -> Verdict:
    Q = tuple(range(args.q))
    S = args.q
    R = tuple(range(args.q + 1, args.q + 1 + args.r))
    sigma = builders.build_cor26(Q, S, R)
    ok = all(sigma.less(a, b) for a in Q + (S,) for b in (S,) + R if a != b)
    contract = Verdict.passed("lower side below upper side") if ok else Verdict.failed("sides not ordered")
    return combine([contract, _certify(sigma, len(Q) + len(R) + 1, args)], f"{sigma!r}")


def cmd_sieve(args) -> Verdict:
    sv = sieve.Sieve(_model(args), args.depth)
    if args.report:
        for n in range(args.depth + 1):
            nodes = sv.level(n)
            print(f"level {n}: {len(nodes)} pieces")
            for t in nodes:
                info = sv.info(t) if n < args.depth else None
                tag = f"  [{info.case}]" if info is not None and info.big is not None else ""
                print(f"  {t}: {sv.value(t)!r}{tag}")
    return sieve.check_sieve(sv, args.depth)


def cmd_synth(args) -> Verdict:
    g = synth.synthesize(_model(args), args.depth)
    suites = {
        "invariance": lambda: combine([synth.check_node_table(g), synth.verify_invariance(g)],
                                      "invariance"),
        "continuity": lambda: combine([synth.verify_cut_boxes(g),
                                       synth.verify_continuity(g, args.pairs, args.seed)], "continuity"),
        "topology": lambda: synth.verify_topology_equality(g, B=args.bound),
    }
    chosen = list(suites) if args.verify == "all" else [args.verify]
    results = []
    for name in chosen:
        t0 = time.time()
        v = suites[name]()
        results.append(v)
        print(f"{name}: {v.status} ({time.time() - t0:.1f}s) {v.message}")
    return combine(results, f"{g.describe()}: {', '.join(chosen)}")


def cmd_cws(args) -> Verdict:
    rep = cws(_model(args), args.max_k, args.bound, args.depth)
    if args.report:
        for combo, v in rep.rejected:
            print(f"  rejected {combo[0]}: {v.message}")
    if rep.found:
        return Verdict.passed(rep.summary(), rep.verdict.certificates if args.report else [])
    return Verdict.undetermined(rep.summary())


def cmd_theorem21(args) -> Verdict:
    spaces = sweep_models(args.max_components) if args.sweep else [_model(args)]
    results = []
    for space in spaces:
        d = check_theorem21(space, args.bound, args.depth)
        print(d.verdict.report())
        results.append(d.verdict)
    return combine(results, f"dichotomy checked on {len(spaces)} models")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="selectop", description="Weak selections and selection topologies on symbolic models.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help, model=True):
        q = sub.add_parser(name, help=help)
        if model:
            q.add_argument("--model", required=name not in ("theorem21",),
                           help=f"model file or built-in name ({', '.join(builtin_models())})")
        q.add_argument("--depth", type=int, default=8)
        q.add_argument("--bound", type=int, default=4, help="max subbasic sets per open witness")
        q.add_argument("--report", action="store_true", help="print details")
        q.set_defaults(func=func)
        return q

    add("model-check", cmd_model_check, "parse a model and list its components")
    q = add("build-l23", cmd_build_l23, "triple-based selection on n parts", model=False)
    q.add_argument("--parts", type=int, required=True)
    q = add("build-l25", cmd_build_l25, "selection with a maximal part", model=False)
    q.add_argument("--parts", type=int, required=True)
    q.add_argument("--top", type=int, help="index of the maximal part (default: last)")
    q = add("build-c26", cmd_build_c26, "two-sided selection around a middle part", model=False)
    q.add_argument("--q", type=int, required=True, help="parts below")
    q.add_argument("--r", type=int, required=True, help="parts above")
    add("sieve", cmd_sieve, "build the sieve and check its invariants")
    q = add("synth", cmd_synth, "synthesize the sieve-invariant selection and verify it")
    q.add_argument("--verify", choices=["invariance", "continuity", "topology", "all"], default="all")
    q.add_argument("--pairs", type=int, default=1000)
    q.add_argument("--seed", type=int, default=0)
    q = add("cws", cmd_cws, "brute-force cws number of a finite-component model")
    q.add_argument("--max-k", type=int, default=DEFAULT_MAX_K)
    q = add("theorem21", cmd_theorem21, "check the cws dichotomy on a model or the sweep corpus")
    q.add_argument("--sweep", action="store_true", help="all sums of ≤ --max-components pieces")
    q.add_argument("--max-components", type=int, default=4)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "theorem21" and not args.sweep and not args.model:
        print("error: give --model or --sweep", file=sys.stderr)
        return 2
    try:
        verdict = args.func(args)
    except (ModelError, PreconditionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(verdict.report())
    return verdict.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
