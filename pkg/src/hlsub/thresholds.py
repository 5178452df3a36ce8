"""Lower bounds y_min(x) above which pi(x + y) <= pi(x) + pi(y) is proven, per regime.

All formulas are evaluated in mpmath and the result is rounded *up* to a float,
so a returned ``y_min`` is never below the exact real-valued threshold.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

import mpmath
from mpmath import mp, mpf

from .errors import ConfigurationError, DomainError
from .pnt_bounds import (
    CATALOG,
    PLATT_TRUDGIAN_T0,
    BoundId,
    BoundSpec,
    Hypothesis,
    check_admissible,
    exact_constant,
    log_shape,
)

PROOF_FLOOR = 400_000  # the proofs assume x >= 4 * 10^5
C2 = "0.08"
JOHNSTON = "9.06"
_DPS = 50


class Regime(enum.Enum):
    THEOREM1 = "theorem1"
    RH_EPSILON = "rh-epsilon"
    RH_REFINED = "rh-refined"
    PARTIAL_RH = "partial-rh"
    DUSART = "dusart"
    UDRESCU = "udrescu"
    MV_WEAK = "mv-weak"


def _finite(v) -> bool:
    return isinstance(v, int) or math.isfinite(v)


@dataclass(frozen=True)
class ThresholdResult:
    """Proven range ``y_min <= y <= x`` for one regime.

    ``y_min`` is ``inf`` when ``x`` is below the regime's validity; ``valid`` is
    also false when the formula gives ``y_min > x`` (empty range).
    """

    x: int
    regime: Regime | None
    y_min: float | int
    valid: bool
    provenance: str
    params: dict[str, Any] = field(default_factory=dict)
    reason: str | None = None

    @property
    def first_y(self) -> int | None:
        """Smallest integer y in the proven range."""
        return math.ceil(self.y_min) if _finite(self.y_min) else None

    def to_dict(self) -> dict[str, Any]:
        return {
            "x": self.x,
            "regime": self.regime.value if self.regime else None,
            "params": dict(self.params),
            "y_min": self.y_min if _finite(self.y_min) else None,
            "valid": self.valid,
            "provenance": self.provenance,
            "reason": self.reason,
        }


def round_up(value: mpf) -> float | int:
    """Smallest float that is >= ``value``; the integer ceiling once floats overflow."""
    f = float(value)
    if math.isinf(f):
        return int(mpmath.ceil(value))
    if mpf(f) < value:
        f = math.nextafter(f, math.inf)
    return f


def _dps_for(x) -> int:
    return _DPS + (len(str(int(x))) if x > 10**30 else 0)


def _invalid(x, regime, provenance, reason, params=None) -> ThresholdResult:
    return ThresholdResult(int(x), regime, math.inf, False, provenance, params or {}, reason)


def _finish(x, regime, y_min: mpf, provenance, params=None) -> ThresholdResult:
    y = round_up(y_min)
    if y > x:
        return ThresholdResult(int(x), regime, y, False, provenance, params or {}, "y_min exceeds x: empty range")
    return ThresholdResult(int(x), regime, y, True, provenance, params or {})


# ---------------------------------------------------------------------------
# Main range from an explicit bound


def theorem1_ymin(spec: BoundSpec, x: int, hypothesis: Hypothesis | None = None) -> ThresholdResult:
    """y_min = 3 C R(2x) log^2 x / log log x for x >= max(x_min, monotone_from, 4e5).

    The bound is applied at 2x, so its validity (including Johnston's height
    condition) is required at 2x.  ``hypothesis``, when given, must admit the bound.
    """
    if hypothesis is not None:
        check_admissible(spec, hypothesis)
    if not spec.configured:
        raise ConfigurationError(f"bound {spec.name} needs a configured constant and x_min")
    params = {"bound": spec.name}
    prov = f"explicit-bound range with {spec.citation}"
    floor = max(spec.x_min, spec.monotone_from or spec.x_min, PROOF_FLOOR)
    if x < floor:
        return _invalid(x, Regime.THEOREM1, prov, f"x below {floor}", params)
    if spec.id is BoundId.JOHNSTON_PARTIAL:
        params["t0"] = spec.t0
        if spec.t0 is None or not partial_rh_condition(x, x, spec.t0):
            return _invalid(x, Regime.THEOREM1, prov, "height condition fails at 2x", params)
    with mp.workdps(_dps_for(x)):
        X = mpf(x)
        L = mpmath.log(X)
        bound = exact_constant(spec, mpmath) * mpmath.exp(log_shape(spec, mpmath.log(2 * X), mpmath))
        y = 3 * bound * L**2 / mpmath.log(L)
        return _finish(x, Regime.THEOREM1, y, prov, params)


# ---------------------------------------------------------------------------
# RH refinements


def _r1_log(L: mpf) -> mpf:
    a = mpmath.log(mpf(C2) * L**3)
    half = L / 2
    return 2 * a / half + 35 * a**2 / half**2


def _r2_log(L: mpf) -> mpf:
    c = mpf(C2) * L**3
    q = c / mpmath.exp(L / 2)
    return (
        -1
        + mpmath.sqrt(1 + q) * (1 + mpmath.log1p(q) / L)
        + mpmath.sqrt(c) / mpmath.exp(L / 4) * (mpf(1) / 2 + mpmath.log(c) / L)
    )


def _log_of(x) -> mpf:
    """log x at the current precision; exact for integers of any size."""
    return mpmath.log(mpf(x))


def _check_floor(x) -> None:
    if not x >= PROOF_FLOOR:
        raise DomainError(f"r1/r2 are defined for x >= {PROOF_FLOOR}, got {x}")


def r1(x) -> float:
    _check_floor(x)
    with mp.workdps(_dps_for(x)):
        return float(_r1_log(_log_of(x)))


def r2(x) -> float:
    _check_floor(x)
    with mp.workdps(_dps_for(x)):
        return float(_r2_log(_log_of(x)))


def refined_factor_mp(x) -> mpf:
    """(1 + r1(x)) (2 + r2(x)) at the caller's precision."""
    _check_floor(x)
    L = _log_of(x)
    return (1 + _r1_log(L)) * (2 + _r2_log(L))


def refined_factor(x) -> float:
    with mp.workdps(_dps_for(x)):
        return float(refined_factor_mp(x))


def rh_refined_ymin(x: int) -> ThresholdResult:
    """y_min = (1 + r1(x))(2 + r2(x)) sqrt(x) log^2 x / (8 pi), for x >= 4e5 under RH."""
    prov = "refined range with the explicit (1+r1)(2+r2) factor, under RH"
    if x < PROOF_FLOOR:
        return _invalid(x, Regime.RH_REFINED, prov, f"x below {PROOF_FLOOR}")
    with mp.workdps(_dps_for(x)):
        X = mpf(x)
        y = refined_factor_mp(x) * mpmath.sqrt(X) * mpmath.log(X) ** 2 / (8 * mp.pi)
        return _finish(x, Regime.RH_REFINED, y, prov)


def x_epsilon(eps: float) -> int:
    """Smallest integer x >= 4e5 with (1 + r1(x))(2 + r2(x)) <= 2 + eps.

    The factor decreases on [4e5, inf); the crossing is bracketed in log x,
    refined with a bracketing root finder, and settled on the integers.
    """
    if not eps > 0:
        raise DomainError(f"epsilon must be positive, got {eps}")
    with mp.workdps(_DPS):
        target = 2 + mpf(repr(float(eps)))
        if refined_factor_mp(PROOF_FLOOR) <= target:
            return PROOF_FLOOR
        lo = mpmath.log(PROOF_FLOOR)
        hi = 2 * lo
        g = lambda L: (1 + _r1_log(L)) * (2 + _r2_log(L)) - target
        while g(hi) > 0:
            lo, hi = hi, 2 * hi
    digits = int(hi / math.log(10)) + 1
    with mp.workdps(digits + _DPS):
        target = 2 + mpf(repr(float(eps)))
        g = lambda L: (1 + _r1_log(L)) * (2 + _r2_log(L)) - target
        root = mpmath.findroot(g, (mpf(lo), mpf(hi)), solver="anderson")
        x = int(mpmath.ceil(mpmath.exp(root)))
        x = max(x, PROOF_FLOOR)
        while x > PROOF_FLOOR and refined_factor_mp(x - 1) <= target:
            x -= 1
        while refined_factor_mp(x) > target:
            x += 1
    return x


def rh_epsilon_ymin(x: int, eps: float) -> ThresholdResult:
    """y_min = (2 + eps) sqrt(x) log^2 x / (8 pi), in force once (1+r1)(2+r2) <= 2 + eps."""
    if not eps > 0:
        raise DomainError(f"epsilon must be positive, got {eps}")
    params = {"epsilon": eps}
    prov = "(2+eps) range past x_eps, under RH"
    if x < PROOF_FLOOR:
        return _invalid(x, Regime.RH_EPSILON, prov, f"x below {PROOF_FLOOR}", params)
    with mp.workdps(_dps_for(x)):
        target = 2 + mpf(repr(float(eps)))
        if refined_factor_mp(x) > target:
            return _invalid(x, Regime.RH_EPSILON, prov, "x below x_eps: (1+r1)(2+r2) > 2+eps", params)
        X = mpf(x)
        y = target * mpmath.sqrt(X) * mpmath.log(X) ** 2 / (8 * mp.pi)
        return _finish(x, Regime.RH_EPSILON, y, prov, params)


def _johnston_lhs(s) -> mpf:
    S = mpf(s)
    Ls = mpmath.log(S)
    return mpf(JOHNSTON) / mpmath.log(Ls) * mpmath.sqrt(S / Ls)


def partial_rh_condition(x: int, y: int, t0: float) -> bool:
    """Johnston's condition 9.06 / log log s * sqrt(s / log s) <= T0 at s = x + y."""
    s = int(x) + int(y)
    if s < 2657:
        raise DomainError(f"needs x + y >= 2657, got {s}")
    with mp.workdps(_DPS + len(str(s))):
        return bool(_johnston_lhs(s) <= mpf(repr(float(t0))))


def partial_rh_boundary(t0: float = PLATT_TRUDGIAN_T0) -> int:
    """Largest s >= 2657 with the height condition true (the left side increases in s)."""
    if not partial_rh_condition(2657, 0, t0):
        raise DomainError(f"T0 = {t0} is too small for any s >= 2657")
    lo, hi = 2657, 5314
    while partial_rh_condition(hi, 0, t0):
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if partial_rh_condition(mid, 0, t0):
            lo = mid
        else:
            hi = mid
    return lo


def partial_rh_ymin(x: int, t0: float = PLATT_TRUDGIAN_T0) -> ThresholdResult:
    """The refined RH range, usable when RH is known up to height T0 at s = 2x."""
    params = {"t0": t0}
    prov = "refined range with RH verified up to height T0 (Johnston's condition)"
    base = rh_refined_ymin(x)
    if not math.isfinite(base.y_min):
        return _invalid(x, Regime.PARTIAL_RH, prov, base.reason, params)
    # the whole range y <= x must satisfy the condition; the left side increases with s
    if not partial_rh_condition(x, x, t0):
        return _invalid(x, Regime.PARTIAL_RH, prov, "height condition fails at s = 2x", params)
    return ThresholdResult(int(x), Regime.PARTIAL_RH, base.y_min, base.valid, prov, params, base.reason)


# ---------------------------------------------------------------------------
# earlier results


def dusart_ymin(x: int) -> ThresholdResult:
    """y_min = 5x / (7 log x log log x) for x >= 5."""
    prov = "Dusart 2002 range, symmetric form"
    if x < 5:
        return _invalid(x, Regime.DUSART, prov, "x below 5")
    with mp.workdps(_dps_for(x)):
        X = mpf(x)
        L = mpmath.log(X)
        return _finish(x, Regime.DUSART, 5 * X / (7 * L * mpmath.log(L)), prov)


def udrescu_threshold(eps: float) -> mpf:
    """1 + exp(4 + 4/eps)."""
    if not eps > 0:
        raise DomainError(f"epsilon must be positive, got {eps}")
    e = mpf(repr(float(eps)))
    return 1 + mpmath.exp(4 + 4 / e)


def udrescu_condition(x: int, y: int, eps: float) -> bool:
    """True when pi(x+y) <= (1+eps)(pi(x) + pi(y)) is covered by Udrescu's theorem."""
    with mp.workdps(_DPS):
        threshold = udrescu_threshold(eps)
        return x >= 17 and y >= 17 and mpf(int(x) + int(y)) >= threshold


def udrescu_ymin(x: int, eps: float) -> ThresholdResult:
    """Smallest y >= 17 meeting Udrescu's conditions (weak (1+eps) inequality only)."""
    params = {"epsilon": eps}
    prov = "Udrescu 1975, proves the weakened (1+eps) inequality only"
    if x < 17:
        return _invalid(x, Regime.UDRESCU, prov, "x below 17", params)
    with mp.workdps(_DPS):
        y = max(mpf(17), udrescu_threshold(eps) - x)
        return _finish(x, Regime.UDRESCU, mpmath.ceil(y), prov, params)


def mv_weak_ymin(x: int) -> ThresholdResult:
    """Montgomery-Vaughan: pi(x+y) <= pi(x) + 2 pi(y) for every x >= 1, y >= 2."""
    prov = "Montgomery-Vaughan 1973, proves the weak inequality with 2 pi(y) only"
    if x < 2:
        return _invalid(x, Regime.MV_WEAK, prov, "x below 2")
    return ThresholdResult(int(x), Regime.MV_WEAK, 2.0, True, prov)


# ---------------------------------------------------------------------------


def _unconditional_specs(mty: BoundSpec | None) -> list[BoundSpec]:
    specs = [CATALOG[BoundId.JY_CLASSICAL], CATALOG[BoundId.JY_VK]]
    if mty is not None:
        if mty.id is not BoundId.MTY or not mty.configured:
            raise ConfigurationError("mty must be a configured MTY bound")
        specs.append(mty)
    return specs


def candidate_ymins(
    x: int, hypothesis: Hypothesis, *, mty: BoundSpec | None = None, t0: float = PLATT_TRUDGIAN_T0
) -> list[ThresholdResult]:
    """Every regime admissible under ``hypothesis`` evaluated at ``x``."""
    if not isinstance(hypothesis, Hypothesis):
        raise ConfigurationError("hypothesis must be given explicitly as a Hypothesis")
    out = [dusart_ymin(x)]
    for spec in _unconditional_specs(mty):
        out.append(theorem1_ymin(spec, x, hypothesis))
    if hypothesis is Hypothesis.RH:
        out.append(rh_refined_ymin(x))
        out.append(theorem1_ymin(CATALOG[BoundId.SCHOENFELD_RH], x, hypothesis))
    if hypothesis in (Hypothesis.RH_TO_HEIGHT, Hypothesis.RH):
        out.append(partial_rh_ymin(x, t0))
        out.append(theorem1_ymin(CATALOG[BoundId.JOHNSTON_PARTIAL].configure(t0=t0), x, hypothesis))
    return out


def best_ymin(
    x: int, hypothesis: Hypothesis, *, mty: BoundSpec | None = None, t0: float = PLATT_TRUDGIAN_T0
) -> ThresholdResult:
    """The smallest valid y_min among admissible regimes (ties go to the earlier regime)."""
    best = None
    for res in candidate_ymins(x, hypothesis, mty=mty, t0=t0):
        if res.valid and (best is None or res.y_min < best.y_min):
            best = res
    if best is None:
        return _invalid(x, None, f"best of {hypothesis.value} regimes", "no regime applies")
    return best
