"""Catalog of explicit error bounds |pi(x) - li(x)| <= C * R(x).

Every bound is evaluated in log-space from ``log x`` so that abscissae such as
exp(2.8e10), which have no floating-point representation, can still be compared.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .errors import ConfigurationError, DomainError
from .logint import li
from .prime_engine import PrimeTable, pi

JOHNSTON_CONSTANT = 9.06
PLATT_TRUDGIAN_T0 = 3e12


class BoundId(enum.Enum):
    JY_CLASSICAL = "jy-classical"
    JY_VK = "jy-vk"
    MTY = "mty"
    SCHOENFELD_RH = "schoenfeld-rh"
    JOHNSTON_PARTIAL = "johnston-partial"


class Hypothesis(enum.Enum):
    UNCONDITIONAL = "unconditional"
    RH = "rh"
    RH_TO_HEIGHT = "rh-to-height"


# which bound hypotheses a pipeline run under a given hypothesis may use
ADMISSIBLE = {
    Hypothesis.UNCONDITIONAL: {Hypothesis.UNCONDITIONAL},
    Hypothesis.RH_TO_HEIGHT: {Hypothesis.UNCONDITIONAL, Hypothesis.RH_TO_HEIGHT},
    Hypothesis.RH: {Hypothesis.UNCONDITIONAL, Hypothesis.RH_TO_HEIGHT, Hypothesis.RH},
}


@dataclass(frozen=True)
class BoundSpec:
    """One explicit bound.  ``C`` is ``None`` only for an unconfigured MTY entry."""

    id: BoundId
    C: float | None
    x_min: int | None
    hypothesis: Hypothesis
    monotone_from: int | None
    t0: float | None = None
    citation: str = ""

    def __post_init__(self):
        if self.C is not None and not self.C > 0:
            raise ConfigurationError(f"{self.id.value}: constant must be positive, got {self.C}")
        if self.x_min is not None and self.x_min < 2:
            raise ConfigurationError(f"{self.id.value}: x_min must be >= 2")

    @property
    def name(self) -> str:
        return self.id.value

    @property
    def configured(self) -> bool:
        return self.C is not None and self.x_min is not None

    def configure(self, *, C: float | None = None, x_min: int | None = None, t0: float | None = None) -> "BoundSpec":
        changes = {k: v for k, v in (("C", C), ("x_min", x_min), ("t0", t0)) if v is not None}
        spec = replace(self, **changes)
        if self.id is BoundId.MTY and "x_min" in changes:
            # the (log log x)^(-1/5) factor needs log log x > 0
            if spec.x_min <= math.e:
                raise ConfigurationError("MTY x_min must exceed e")
            spec = replace(spec, monotone_from=find_monotone_from(spec))
        return spec

    def describe(self) -> str:
        const = "unset" if self.C is None else repr(self.C)
        x_min = "unset" if self.x_min is None else str(self.x_min)
        extra = f" t0={self.t0!r}" if self.t0 is not None else ""
        return (
            f"{self.name:<18} C={const:<22} x_min={x_min:<6} "
            f"hypothesis={self.hypothesis.value:<13} monotone_from={self.monotone_from}{extra}  [{self.citation}]"
        )


def _c(m, text: str):
    # decimal constants stay exact under mpmath
    return float(text) if m is math else m.mpf(text)


# each shape takes L = log x and a math-like module (math or mpmath)
def _shape_classical(L, m=math):
    return L + _c(m, "0.515") * m.log(L) - _c(m, "0.8274") * m.sqrt(L)


def _shape_vk(L, m=math):
    return L + _c(m, "0.801") * m.log(L) - _c(m, "0.1853") * L ** _c(m, "0.6") * m.log(L) ** _c(m, "-0.2")


def _shape_mty(L, m=math):
    return L - _c(m, "0.2123") * L ** _c(m, "0.6") * m.log(L) ** _c(m, "-0.2")


def _shape_sqrt_log(L, m=math):
    return L / 2 + m.log(L)


_SHAPES = {
    BoundId.JY_CLASSICAL: _shape_classical,
    BoundId.JY_VK: _shape_vk,
    BoundId.MTY: _shape_mty,
    BoundId.SCHOENFELD_RH: _shape_sqrt_log,
    BoundId.JOHNSTON_PARTIAL: _shape_sqrt_log,
}

CATALOG: dict[BoundId, BoundSpec] = {
    BoundId.JY_CLASSICAL: BoundSpec(
        BoundId.JY_CLASSICAL, 9.59, 2, Hypothesis.UNCONDITIONAL, 2, citation="Johnston-Yang 2023, classical zero-free region"
    ),
    BoundId.JY_VK: BoundSpec(
        BoundId.JY_VK, 0.028, 23, Hypothesis.UNCONDITIONAL, 23, citation="Johnston-Yang 2023, Vinogradov-Korobov region"
    ),
    BoundId.MTY: BoundSpec(
        BoundId.MTY, None, None, Hypothesis.UNCONDITIONAL, None, citation="Mossinghoff-Trudgian-Yang 2024, implied constant unspecified"
    ),
    BoundId.SCHOENFELD_RH: BoundSpec(
        BoundId.SCHOENFELD_RH, 1 / (8 * math.pi), 2657, Hypothesis.RH, 2657, citation="Schoenfeld 1976, under RH"
    ),
    BoundId.JOHNSTON_PARTIAL: BoundSpec(
        BoundId.JOHNSTON_PARTIAL,
        1 / (8 * math.pi),
        2657,
        Hypothesis.RH_TO_HEIGHT,
        2657,
        t0=PLATT_TRUDGIAN_T0,
        citation="Johnston 2022, RH verified to height T0",
    ),
}


def get_bound(name: str | BoundId) -> BoundSpec:
    key = name if isinstance(name, BoundId) else BoundId(str(name).lower().replace("_", "-"))
    return CATALOG[key]


def catalog_text(specs: Iterable[BoundSpec] | None = None) -> str:
    """Human-readable listing of the catalog, one bound per line."""
    specs = CATALOG.values() if specs is None else specs
    return "\n".join(spec.describe() for spec in specs) + "\n"


def check_admissible(spec: BoundSpec, hypothesis: Hypothesis) -> None:
    """Reject a bound whose hypothesis is stronger than the one the run assumes."""
    if spec.hypothesis not in ADMISSIBLE[hypothesis]:
        raise ConfigurationError(
            f"bound {spec.name} assumes {spec.hypothesis.value}; not admissible in a {hypothesis.value} run"
        )


def johnston_log_lhs(log_x: float) -> float:
    """log of 9.06 / log log x * sqrt(x / log x)."""
    return math.log(JOHNSTON_CONSTANT) - math.log(math.log(log_x)) + 0.5 * (log_x - math.log(log_x))


def johnston_holds(log_x: float, t0: float) -> bool:
    return log_x >= math.log(2657) and johnston_log_lhs(log_x) <= math.log(t0)


def _require_valid(spec: BoundSpec, log_x: float) -> None:
    if not spec.configured:
        raise ConfigurationError(f"bound {spec.name} needs a configured constant and x_min")
    # tolerate the rounding of log(x_min) itself
    if log_x < math.log(spec.x_min) - 1e-12:
        raise DomainError(f"bound {spec.name} is valid for x >= {spec.x_min}, got log x = {log_x!r}")
    if spec.id is BoundId.JOHNSTON_PARTIAL:
        if spec.t0 is None:
            raise ConfigurationError("johnston-partial needs a height T0")
        if not johnston_holds(log_x, spec.t0):
            raise DomainError(f"Johnston's height condition fails at log x = {log_x!r} for T0 = {spec.t0!r}")


def log_shape(spec: BoundSpec, log_x, m=math):
    """log R(x), the bound without its constant.  Pass ``m=mpmath`` for extended precision."""
    return _SHAPES[spec.id](log_x if m is not math else float(log_x), m)


def log_r_eval(spec: BoundSpec, log_x: float) -> float:
    """log(C * R(x)) computed from log x."""
    log_x = float(log_x)
    _require_valid(spec, log_x)
    return math.log(spec.C) + log_shape(spec, log_x)


def r_eval(spec: BoundSpec, x: float) -> float:
    """The full bound C * R(x); overflows to ``inf`` only when the value itself does."""
    if not x >= 2:
        raise DomainError(f"x must be >= 2, got {x}")
    if spec.configured and x < spec.x_min:
        raise DomainError(f"bound {spec.name} is valid for x >= {spec.x_min}, got {x}")
    lv = log_r_eval(spec, math.log(x))
    if spec.id in (BoundId.SCHOENFELD_RH, BoundId.JOHNSTON_PARTIAL):
        return math.sqrt(x) * math.log(x) / (8 * math.pi)
    try:
        return math.exp(lv)
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class SandwichPoint:
    x: float
    log_x: float
    lower_ok: bool
    upper_ok: bool

    @property
    def ok(self) -> bool:
        return self.lower_ok and self.upper_ok


@dataclass(frozen=True)
class SandwichReport:
    bound: str
    points: tuple[SandwichPoint, ...]
    threshold: float | None  # smallest grid x from which every later point passes

    @property
    def all_pass(self) -> bool:
        return all(p.ok for p in self.points)


def sandwich_check(spec: BoundSpec, grid: Sequence[float], *, log_space: bool = False) -> SandwichReport:
    """Check sqrt(x) <= R(x) <= x / log^3 x on ``grid``, with R taken without its constant.

    With ``log_space`` the grid holds values of log x.
    """
    points = []
    for g in sorted(grid):
        L = float(g) if log_space else math.log(g)
        lr = log_shape(spec, L)
        x = math.exp(L) if L < 700 else math.inf
        points.append(SandwichPoint(x if log_space else float(g), L, lr >= 0.5 * L, lr <= L - 3 * math.log(L)))
    threshold = None
    for p in reversed(points):
        if not p.ok:
            break
        threshold = p.x
    if not points:
        threshold = None
    return SandwichReport(spec.name, tuple(points), threshold)


@dataclass(frozen=True)
class EmpiricalReport:
    bound: str
    checked: int
    failures: tuple[int, ...]
    max_ratio: float
    argmax: int | None

    @property
    def all_pass(self) -> bool:
        return not self.failures


def empirical_pnt_check(table: PrimeTable, spec: BoundSpec, xs: Iterable[int]) -> EmpiricalReport:
    """Compare |pi(x) - li(x)| against C * R(x) at every x in ``xs``."""
    failures = []
    max_ratio, argmax, checked = 0.0, None, 0
    for x in xs:
        x = int(x)
        err = abs(pi(table, x) - li(x).value)
        ratio = err / r_eval(spec, x)
        checked += 1
        if ratio > max_ratio:
            max_ratio, argmax = ratio, x
        if ratio > 1:
            failures.append(x)
    return EmpiricalReport(spec.name, checked, tuple(failures), max_ratio, argmax)


def classical_minus_vk(log_x: float) -> float:
    """log(JY classical bound) - log(JY Vinogradov-Korobov bound) at x = exp(log_x)."""
    classical, vk = CATALOG[BoundId.JY_CLASSICAL], CATALOG[BoundId.JY_VK]
    return log_r_eval(classical, log_x) - log_r_eval(vk, log_x)


def crossover_points(lo: float = math.log(23), hi: float = 1e12, samples: int = 4000) -> list[float]:
    """Values of log x where the classical and VK bounds swap order, located by bisection.

    Sign changes are bracketed on a geometric grid of ``samples`` points in [lo, hi].
    """
    ratio = (hi / lo) ** (1 / (samples - 1))
    grid = [lo * ratio**k for k in range(samples)]
    roots = []
    prev_l, prev_d = grid[0], classical_minus_vk(grid[0])
    for L in grid[1:]:
        d = classical_minus_vk(L)
        if (d > 0) != (prev_d > 0):
            a, b, da = prev_l, L, prev_d
            for _ in range(200):
                m = 0.5 * (a + b)
                dm = classical_minus_vk(m)
                if (dm > 0) == (da > 0):
                    a, da = m, dm
                else:
                    b = m
                if b - a <= 1e-12 * b:
                    break
            roots.append(0.5 * (a + b))
        prev_l, prev_d = L, d
    return roots


def find_monotone_from(spec: BoundSpec, hi_log: float = math.log(1e30), samples: int = 2000) -> int:
    """Smallest grid abscissa from which log(C R) is nondecreasing on a geometric grid up to exp(hi_log)."""
    lo_log = math.log(spec.x_min)
    step = (hi_log - lo_log) / (samples - 1)
    logs = [lo_log + k * step for k in range(samples)]
    vals = [log_shape(spec, L) for L in logs]
    start = 0
    for k in range(1, samples):
        if vals[k] < vals[k - 1]:
            start = k
    return max(spec.x_min, math.ceil(math.exp(logs[start]) * (1 - 1e-12)))


def exact_constant(spec: BoundSpec, m=math):
    """The bound's constant, with 1/(8 pi) kept symbolic for the RH bounds."""
    if spec.id in (BoundId.SCHOENFELD_RH, BoundId.JOHNSTON_PARTIAL):
        return 1 / (8 * m.pi)
    if spec.C is None:
        raise ConfigurationError(f"bound {spec.name} needs a configured constant")
    return spec.C if m is math else m.mpf(repr(spec.C))
