"""Secrecy-capacity bounds for indoor visible-light wiretap channels."""

from .avg_bounds import (
    ASYMPTOTIC_GAP,
    AvgConstraints,
    BoundReport,
    asymptote_avg,
    avg_report,
    default_beta_delta,
    lower_bound_avg_1,
    lower_bound_avg_2,
    upper_bound_avg,
)
from .numerics import q_function, scaled_q, solve_c, solve_mu_tilde
from .oracle import (
    InputDistribution,
    QuadratureError,
    QuadratureSpec,
    input_entropy,
    mutual_information,
    oracle_secrecy_rate,
)
from .peak_bounds import (
    PeakConstraints,
    asymptote_peak,
    default_mu_delta,
    lower_bound_peak_1,
    lower_bound_peak_2,
    peak_report,
    upper_bound_peak,
)
from .region import FloorGrid, RegionMap, export_region_csv, insecure_region
from .scenario import (
    LinkGains,
    PdParams,
    Position,
    Scenario,
    channel_gain,
    is_degraded_secure,
    link_gains,
)

__version__ = "0.1.0"
