"""Explicit bounds and exhaustive checks for the subadditivity of the prime counting function."""

from .errors import CacheError, ConfigurationError, DomainError, HLSubError, RangeError, ResourceError
from .logint import LiValue, delta_li, li
from .pnt_bounds import CATALOG, BoundId, BoundSpec, Hypothesis, empirical_pnt_check, r_eval, sandwich_check
from .prime_engine import PrimeTable, build_prime_table, pi, pi_ap, primes_in
from .thresholds import (
    Regime,
    ThresholdResult,
    best_ymin,
    dusart_ymin,
    partial_rh_condition,
    r1,
    r2,
    rh_epsilon_ymin,
    rh_refined_ymin,
    theorem1_ymin,
    udrescu_condition,
)
from .verifier import ExceptionScan, VerificationReport, delta, mv_check, scan_exceptions, verify_exhaustive, verify_range

__version__ = "0.1.0"
