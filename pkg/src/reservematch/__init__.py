"""Applicant selection under two-rank diversity reservations.

The package bundles a rank-maximal matching engine over ranked reserved
seats, six selection rules built on it, exhaustive verification oracles,
seeded synthetic pool generators, diversity/merit metrics, and a CLI for
running reproducible experiment sweeps.
"""

__version__ = "0.1.0"

from .algorithms import (
    ALGORITHMS,
    Outcome,
    a_s_select,
    ehyy_select,
    pog_select,
    pos_select,
    run_algorithm,
    sy1_select,
    sy2_select,
)
from .datagen import SatGenConfig, gen_instance, gen_quotas, gen_score, gen_scores, gen_types
from .graph import (
    Matching,
    RankSignature,
    ReservationGraph,
    Seat,
    SeatPool,
    build_graph,
    dump_edges,
    signature,
)
from .metrics import MetricValues, RatioReport, evaluate, percentile, ratios
from .model import (
    Instance,
    QuotaTable,
    Student,
    load_instance,
    parse_instance,
    save_instance,
    serialize_instance,
    total_reserves,
    validate,
)
from .solver import (
    InfeasibleForcedError,
    RankMaximalMatcher,
    is_compatible,
    max_signature,
    rank_maximal_matching,
)

__all__ = [
    "ALGORITHMS",
    "InfeasibleForcedError",
    "Instance",
    "Matching",
    "MetricValues",
    "Outcome",
    "QuotaTable",
    "RankMaximalMatcher",
    "RankSignature",
    "RatioReport",
    "ReservationGraph",
    "SatGenConfig",
    "Seat",
    "SeatPool",
    "Student",
    "__version__",
    "a_s_select",
    "build_graph",
    "dump_edges",
    "ehyy_select",
    "evaluate",
    "gen_instance",
    "gen_quotas",
    "gen_score",
    "gen_scores",
    "gen_types",
    "is_compatible",
    "load_instance",
    "max_signature",
    "parse_instance",
    "percentile",
    "pog_select",
    "pos_select",
    "rank_maximal_matching",
    "ratios",
    "run_algorithm",
    "save_instance",
    "serialize_instance",
    "signature",
    "sy1_select",
    "sy2_select",
    "total_reserves",
    "validate",
]
