"""Reduction workbench for colored cut problems.

Representations and brute-force oracles live in `instances`, text formats in
`formats`, the subgraph-isomorphism gadget reduction in `gadgets`, expander
hosts and randomized embeddings in `embedding`, concurrent flows in `flows`,
and the end-to-end satisfiability chain in `pipeline`.
"""

from .config import RunConfig, load_config
from .embedding import Embedding, build_expander, embed, embed_with_retry
from .gadgets import reduce_psi_to_dcmc
from .graphs import Graph
from .instances import (
    Answer,
    BinaryCsp,
    CnfFormula,
    ColoredMultigraph,
    DualCmcInstance,
    PsiInstance,
    cmc_to_dual,
    dual_to_cmc,
    solve_cmc_bruteforce,
    solve_csp_bruteforce,
    solve_dual_bruteforce,
    solve_psi_bruteforce,
    solve_sat_bruteforce,
)
from .pipeline import sat_to_csp_g, sat_to_dcmc

__version__ = "0.1.0"

__all__ = [
    "Answer",
    "BinaryCsp",
    "CnfFormula",
    "ColoredMultigraph",
    "DualCmcInstance",
    "Embedding",
    "Graph",
    "PsiInstance",
    "RunConfig",
    "__version__",
    "build_expander",
    "cmc_to_dual",
    "dual_to_cmc",
    "embed",
    "embed_with_retry",
    "load_config",
    "reduce_psi_to_dcmc",
    "sat_to_csp_g",
    "sat_to_dcmc",
    "solve_cmc_bruteforce",
    "solve_csp_bruteforce",
    "solve_dual_bruteforce",
    "solve_psi_bruteforce",
    "solve_sat_bruteforce",
]
