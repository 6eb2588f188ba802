"""Online monotone submodular maximization with shortlists under matroid and p-matchoid constraints."""

from .baselines import OptResult, check_submodular, exhaustive_opt, offline_greedy, ratio_report, reference_ratio
from .constraints import (
    GainResult,
    GraphicMatroid,
    Matchoid,
    MatchoidMember,
    PartitionMatroid,
    UniformMatroid,
    brualdi_bijection,
    extend_to_basis,
    gain_matchoid,
    matching_matchoid,
    omega,
    theta_matroid,
)
from .secretary import ReplacementConfig, ReplacementState, secretary_max
from .shortlist import AlgoConfig, RunResult, ShortlistRun, run, shortlist_bound
from .submodular import (
    CountingOracle,
    make_coverage,
    make_facility_location,
    make_hardness_function,
    make_modular,
    marginal,
)
from .windows import ArrivalOrder, WindowPlan, balls_in_bins, build_window_plan, stream

__version__ = "0.1.0"
