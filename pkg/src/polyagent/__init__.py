"""Compositional active inference over finite polynomial interfaces."""

__version__ = "0.1.0"

from .agent import (Agent, HierAgent, compose_hierarchy, build_deep_chain, expected_free_energy,
                    make_agent, plan, select_action, simulate_episode)
from .hom import curry, dual, enumerate_lenses, eval_lens, internal_hom, uncurry
from .poly import (FinCategory, FinSet, Lens, Polynomial, Y, lens_compose, lens_identity,
                   monomial, parse_poly, tensor_lens, tensor_poly)
from .scenario import load, loads
from .stoch import Channel, Dist, bayes_posterior, channel_compose, channel_tensor
from .systems import GenSystem, closed_unroll_exact, closed_unroll_sample, gen_parallel, gen_rewire

__all__ = [
    "Agent", "Channel", "Dist", "FinCategory", "FinSet", "GenSystem", "HierAgent", "Lens",
    "Polynomial", "Y", "bayes_posterior", "build_deep_chain", "channel_compose", "channel_tensor",
    "closed_unroll_exact", "closed_unroll_sample", "compose_hierarchy", "curry", "dual",
    "enumerate_lenses", "eval_lens", "expected_free_energy", "gen_parallel", "gen_rewire",
    "internal_hom", "lens_compose", "lens_identity", "load", "loads", "make_agent", "monomial",
    "parse_poly", "plan", "select_action", "simulate_episode", "tensor_lens", "tensor_poly",
    "uncurry",
]
