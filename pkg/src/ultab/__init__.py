"""Finite posets, intuitionistic Kripke models, bisimulation games and
uniform local tabularity checks."""
from .bisim import (FULL, distinguishing_formula, full_bisim, k_bisim, leq_k, max_bisim_level,
                    play_game)
from .canon import canonical_form, is_isomorphic
from .formula import AxiomSet, Formula, impl_depth, jankov_syntactic, named_axiom, parse, to_text
from .heyting import generated_subalgebra, generation_depth, heyting_implies
from .morphism import (check_pmorphism, jankov_refutes, pmorphic_images, surjective_pmorphisms,
                       validates_axiomset)
from .poset import Poset, PosetError, Upset, all_upsets
from .semantics import Model, ModelError, eval_formula, frame_validates, is_reduced, reduce
from .uniformity import (certify_n_uniform, degree_of_uniformity, enumerate_models, frame_closure,
                         stack_bound_uniformity_check)

__all__ = [
    "FULL", "AxiomSet", "Formula", "Model", "ModelError", "Poset", "PosetError", "Upset",
    "all_upsets", "canonical_form", "certify_n_uniform", "check_pmorphism", "degree_of_uniformity",
    "distinguishing_formula", "enumerate_models", "eval_formula", "frame_closure", "frame_validates",
    "full_bisim", "generated_subalgebra", "generation_depth", "heyting_implies", "impl_depth",
    "is_isomorphic", "is_reduced", "jankov_refutes", "jankov_syntactic", "k_bisim", "leq_k",
    "max_bisim_level", "named_axiom", "parse", "play_game", "pmorphic_images", "reduce",
    "stack_bound_uniformity_check", "surjective_pmorphisms", "to_text", "validates_axiomset",
]
