"""Stable sets from the Lovasz theta SDP via value function approximations."""

from .bench import RunConfig, solve_instance
from .dimacs import load_bundled, parse_dimacs, read_dimacs
from .graph import StableSet, WeightedGraph
from .rounding import round_benson_ye, round_greedy, round_lookahead, round_lookahead_counipolar
from .sdp import ThetaCertificate, solve_theta, verify_certificate
from .vfa import VfaContext, solve_clique_lp

__version__ = "0.1.0"

__all__ = [
    "RunConfig",
    "StableSet",
    "ThetaCertificate",
    "VfaContext",
    "WeightedGraph",
    "load_bundled",
    "parse_dimacs",
    "read_dimacs",
    "round_benson_ye",
    "round_greedy",
    "round_lookahead",
    "round_lookahead_counipolar",
    "solve_clique_lp",
    "solve_instance",
    "solve_theta",
    "verify_certificate",
]
