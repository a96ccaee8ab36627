"""Information leakage of the five card trick under biased random cuts."""
from .arrangement import (
    Arrangement,
    Card,
    encode_initial,
    evaluate_and,
    format_arrangement,
    parse_arrangement,
    restricted_final_set,
    restricted_initial_set,
    rotate,
)
from .bounds import BoundQuery, BoundResult, Parity, corollary_bound, minimal_shuffles
from .errors import FiveCardError
from .leakage import (
    Case,
    PosteriorTable,
    PriorSpec,
    adversary_report,
    posterior_closed_repeated,
    posterior_closed_single,
    posterior_exact,
)
from .montecarlo import SimConfig, SimResult, simulate
from .shuffle_model import (
    BiasSpec,
    CutChain,
    ShiftDistribution,
    bias_to_distribution,
    chain_distribution_closed,
    chain_distribution_power,
    compose,
    effective_epsilon,
    transition_matrix,
)

__version__ = "0.1.0"
