"""
Effective capacity of renewal reward processes and truncated HARQ schemes
"""

from .errors import (
    CapacityError,
    CoincidentRoots,
    ConfigError,
    EvaluatorDiverged,
    GridTooLarge,
    InvalidDistribution,
    LatticeError,
    NeedsMonteCarlo,
    NonConvergence,
    TooLarge,
    VarianceWarning,
)
from .renewal_core import (
    EcResult,
    InterarrivalPmf,
    approx_constant,
    bounds_constant,
    effective_capacity_constant,
    pmf_moments,
    solve_zeta_constant,
    solve_zeta_continuous,
)
from .reward_process import (
    RewardEntry,
    RewardTable,
    approx_variable,
    bounds_variable,
    coefficients_a,
    effective_capacity_variable,
    ltat,
    solve_zeta_variable,
    solve_zeta_variable_continuous,
)
from .finite_time import (
    PhiSeries,
    effective_capacity_finite,
    phi_determinant,
    phi_enumeration,
    phi_recursion,
)
from .harq_models import (
    HarqConfig,
    HarqScheme,
    OutageCurve,
    ec_max_arrival,
    ec_outage,
    interarrival_pmf_from_outage,
    ltat_harq,
    outage_closed_form,
    reward_table_outage,
)
from .channel_mc import (
    McEstimate,
    estimate_mgf_finite,
    estimate_reward_table,
    sample_episode,
)
from .rate_opt import RateGrid, optimize_rates

__all__ = [
    "CapacityError", "CoincidentRoots", "ConfigError", "EvaluatorDiverged",
    "GridTooLarge", "InvalidDistribution", "LatticeError", "NeedsMonteCarlo",
    "NonConvergence", "TooLarge", "VarianceWarning",
    "EcResult", "InterarrivalPmf", "approx_constant", "bounds_constant",
    "effective_capacity_constant", "pmf_moments", "solve_zeta_constant",
    "solve_zeta_continuous",
    "RewardEntry", "RewardTable", "approx_variable", "bounds_variable",
    "coefficients_a", "effective_capacity_variable", "ltat",
    "solve_zeta_variable", "solve_zeta_variable_continuous",
    "PhiSeries", "effective_capacity_finite", "phi_determinant",
    "phi_enumeration", "phi_recursion",
    "HarqConfig", "HarqScheme", "OutageCurve", "ec_max_arrival", "ec_outage",
    "interarrival_pmf_from_outage", "ltat_harq", "outage_closed_form",
    "reward_table_outage",
    "McEstimate", "estimate_mgf_finite", "estimate_reward_table", "sample_episode",
    "RateGrid", "optimize_rates",
]
