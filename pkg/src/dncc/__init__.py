"""Network-coded cooperative relaying: coding-matrix design over GF(2^L),
closed-form outage probabilities, DMT curves, and Monte-Carlo simulation."""

__version__ = "0.1.0"

from .analytic import (
    AnalyticCurve,
    DmtCurve,
    analytic_curve,
    dmt,
    dmt_curve,
    dmt_r_intercept,
    p_destination_outage_asymptotic,
    p_destination_outage_exact,
    p_m_relays_fail,
    p_n_of_m_links_out,
    p_relay_all_decode,
    p_system_outage,
)
from .channel import (
    ConfigError,
    LinkStateMatrix,
    ScenarioConfig,
    link_outage_prob,
    link_up_prob,
    load_config,
    outage_threshold_tau,
    parse_config,
    sample_links,
)
from .coding import (
    CodingMatrix,
    InfeasibleError,
    build_mds_matrix,
    default_field,
    kruskal_rank,
    min_extension_degree,
)
from .gf import GF, DEFAULT_POLYS, is_irreducible
from .simulator import (
    ExactOutage,
    OutageEstimate,
    ReceivedSystem,
    SlopeFit,
    build_received_system,
    can_recover,
    estimate_diversity_slope,
    run_baseline,
    run_enumeration,
    run_monte_carlo,
    slope_inputs,
)

__all__ = [
    "GF",
    "DEFAULT_POLYS",
    "is_irreducible",
    "CodingMatrix",
    "InfeasibleError",
    "build_mds_matrix",
    "default_field",
    "kruskal_rank",
    "min_extension_degree",
    "ConfigError",
    "LinkStateMatrix",
    "ScenarioConfig",
    "link_outage_prob",
    "link_up_prob",
    "load_config",
    "outage_threshold_tau",
    "parse_config",
    "sample_links",
    "AnalyticCurve",
    "DmtCurve",
    "analytic_curve",
    "dmt",
    "dmt_curve",
    "dmt_r_intercept",
    "p_destination_outage_asymptotic",
    "p_destination_outage_exact",
    "p_m_relays_fail",
    "p_n_of_m_links_out",
    "p_relay_all_decode",
    "p_system_outage",
    "ExactOutage",
    "OutageEstimate",
    "ReceivedSystem",
    "SlopeFit",
    "build_received_system",
    "can_recover",
    "estimate_diversity_slope",
    "run_baseline",
    "run_enumeration",
    "run_monte_carlo",
    "slope_inputs",
]
