"""Weak selections, selection topologies and cws numbers on exact symbolic
models of suborderable spaces."""
from .builders import (BlockTournament, build_cor26, build_lemma23,
                       build_lemma25, certify_partition_open)
from .cws import canonical_pair, check_theorem21, cws, enumerate_candidates, lemma23_cws_one
from .selections import (Canonical, Invariant, Swapped, Tournament,
                         Undetermined, combine_invariant, is_circular,
                         is_decisive)
from .sets import Bounds, SymbolicSet
from .sieve import Sieve, build_sieve, kappa, partition_around, partition_D_eps
from .space import ModelError, SymbolicSpace, load_model, parse_model
from .synth import SynthesizedSelection, synthesize
from .topology import Subbase, is_open, supremum_subbase, topology_equals_model
from .verdict import Verdict

__all__ = [
    "BlockTournament", "Bounds", "Canonical", "Invariant", "ModelError", "Sieve",
    "Subbase", "Swapped", "SymbolicSet", "SymbolicSpace", "SynthesizedSelection",
    "Tournament", "Undetermined", "Verdict", "build_cor26", "build_lemma23",
    "build_lemma25", "build_sieve", "canonical_pair", "certify_partition_open",
    "check_theorem21", "combine_invariant", "cws", "enumerate_candidates",
    "is_circular", "is_decisive", "is_open", "kappa", "lemma23_cws_one",
    "load_model", "parse_model", "partition_D_eps", "partition_around",
    "supremum_subbase", "synthesize", "topology_equals_model",
]
