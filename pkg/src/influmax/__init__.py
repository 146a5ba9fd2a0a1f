"""Influence maximization under the IC and IC-N diffusion models."""

from .baselines import (
    Exact,
    MonteCarlo,
    PageRankConfig,
    greedy_celf,
    greedy_plain,
    pagerank_scores,
    select_degree,
    select_pagerank,
)
from .cascade import IC, ICN, CascadeOutcome, SpreadEstimate, estimate_spread, simulate_ic, simulate_icn
from .errors import (
    DivergenceError,
    GenerationError,
    GraphFormatError,
    InfluMaxError,
    InstanceTooLarge,
    ProbabilityError,
    SeedError,
)
from .exact import exact_activation_probs, exact_sigma, exact_sigma_icn
from .graph import (
    Graph,
    ProbabilityModel,
    assign_probabilities,
    build_graph,
    generate_power_law,
    load_snap_edgelist,
    read_graph,
    write_edgelist,
)
from .irie import (
    ActivationProb,
    IcnRankTriple,
    MioaTree,
    compute_mioa,
    estimate_ap,
    irie_n_select,
    irie_select,
    iterate_icn,
)
from .rank import (
    DampedSystem,
    EdgeMessages,
    RankVector,
    influence_propagation,
    influence_rank_scores,
    select_top_k_ir,
)
from .rng import RngStream
from .seeds import SeedSet

__version__ = "0.1.0"
