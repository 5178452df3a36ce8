"""Exhaustive and targeted checks of Delta(x, y) = pi(x) + pi(y) - pi(x + y) >= 0.

All Delta arithmetic is exact integer arithmetic on the prefix-count table.

Reduced candidate set
---------------------
For a fixed sum s, f(y) = pi(y) + pi(s - y) is nonincreasing in y while pi(y)
stays constant, so over 2 <= y <= s/2 its minimum is reached at some y = p - 1
(p an odd prime) or at y = floor(s/2).  Let m(s) be that minimum minus pi(s).
When s is composite, pi(s) = pi(s - 1) and every candidate for s - 1 is
dominated, so m(s) >= m(s - 1).  Hence the overall minimum is attained at
s = 4 or at a prime s.  :func:`reduction_gate` re-checks both facts against
brute force before the reduction is trusted.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError, HLSubError, RangeError, ResourceError
from .pnt_bounds import Hypothesis
from .prime_engine import PrimeTable, primes_in
from .thresholds import PLATT_TRUDGIAN_T0, best_ymin

GATE_LIMIT = 10**4
BLOCK_SIZE = 1 << 14
MAX_RECORDED_VIOLATIONS = 1000
EXHAUSTIVE_PAIR_CAP = 10**8


class ReductionGateError(HLSubError):
    """The reduced candidate set disagreed with brute force."""


@dataclass(frozen=True)
class DeltaSample:
    x: int
    y: int
    delta: int

    def to_dict(self) -> dict[str, int]:
        return {"x": self.x, "y": self.y, "delta": self.delta}


@dataclass(frozen=True)
class VerificationReport:
    s_min: int
    s_max: int
    pairs_checked: int
    reduction_used: bool
    min_delta: int | None
    argmin: tuple[int, int] | None
    violations: tuple[DeltaSample, ...] = ()
    violation_count: int = 0

    @property
    def ok(self) -> bool:
        return self.violation_count == 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "s_min": self.s_min,
            "s_max": self.s_max,
            "pairs_checked": self.pairs_checked,
            "reduction_used": self.reduction_used,
            "min_delta": self.min_delta,
            "argmin": list(self.argmin) if self.argmin else None,
            "violation_count": self.violation_count,
            "violations": [v.to_dict() for v in self.violations],
        }


@dataclass(frozen=True)
class ExceptionScan:
    X: int
    hypothesis: str
    uncovered_pairs: int
    violating_pairs: int | None  # None when the uncovered set was not checked
    bound_value: float | None
    violations: tuple[DeltaSample, ...] = ()

    @property
    def empirical_ratio(self) -> float | None:
        if not self.bound_value:
            return None
        return self.uncovered_pairs / self.bound_value

    def to_dict(self) -> dict[str, Any]:
        return {
            "X": self.X,
            "hypothesis": self.hypothesis,
            "uncovered_pairs": self.uncovered_pairs,
            "violating_pairs": self.violating_pairs,
            "bound_value": self.bound_value,
            "empirical_ratio": self.empirical_ratio,
            "violations": [v.to_dict() for v in self.violations],
        }


@dataclass(frozen=True)
class MVReport:
    checked: int
    failures: tuple[tuple[int, int], ...]

    @property
    def all_pass(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict[str, Any]:
        return {"checked": self.checked, "all_pass": self.all_pass, "failures": [list(f) for f in self.failures]}


def delta(table: PrimeTable, x: int, y: int) -> int:
    """Exact Delta(x, y) for x, y >= 2."""
    x, y = int(x), int(y)
    if x < 2 or y < 2:
        raise DomainError(f"Delta needs x, y >= 2, got ({x}, {y})")
    if x + y > table.limit:
        raise RangeError(f"x + y = {x + y} exceeds table limit {table.limit}")
    c = table.counts
    return int(c[x]) + int(c[y]) - int(c[x + y])


# ---------------------------------------------------------------------------
# per-block work


@dataclass
class _Partial:
    """Mergeable summary of one block of sums."""

    pairs: int = 0
    best: tuple[int, int, int] | None = None  # (delta, s, y), lexicographic minimum
    violations: list[DeltaSample] = field(default_factory=list)
    violation_count: int = 0

    def add(self, s: int, ys: np.ndarray, deltas: np.ndarray) -> None:
        if ys.size == 0:
            return
        self.pairs += int(ys.size)
        k = int(np.argmin(deltas))  # first occurrence gives the smallest y
        cand = (int(deltas[k]), s, int(ys[k]))
        if self.best is None or cand < self.best:
            self.best = cand
        bad = np.flatnonzero(deltas < 0)
        if bad.size:
            self.violation_count += int(bad.size)
            room = MAX_RECORDED_VIOLATIONS - len(self.violations)
            for i in bad[: max(room, 0)]:
                y = int(ys[i])
                self.violations.append(DeltaSample(s - y, y, int(deltas[i])))

    def merge(self, other: "_Partial") -> "_Partial":
        out = _Partial(self.pairs + other.pairs)
        bests = [b for b in (self.best, other.best) if b is not None]
        out.best = min(bests) if bests else None
        out.violations = (self.violations + other.violations)[:MAX_RECORDED_VIOLATIONS]
        out.violation_count = self.violation_count + other.violation_count
        return out


def _odd_primes_minus_one(table: PrimeTable, s_max: int) -> np.ndarray:
    if s_max < 4:
        return np.empty(0, dtype=np.int64)
    return primes_in(table, 3, s_max // 2 + 2) - 1


def _candidates(s: int, pm1: np.ndarray) -> np.ndarray:
    half = s // 2
    k = int(np.searchsorted(pm1, half, side="right"))
    ys = pm1[:k]
    if k == 0 or ys[-1] != half:
        ys = np.append(ys, half)
    return ys


def _sums_for(table: PrimeTable, lo: int, hi: int, reduced: bool, s_first: int, s_last: int) -> np.ndarray:
    """Sums s in [lo, hi) to visit; the reduced set keeps primes plus the two end points."""
    if not reduced:
        return np.arange(lo, hi, dtype=np.int64)
    ss = primes_in(table, lo, hi)
    extra = [s for s in (s_first, s_last) if lo <= s < hi]
    if extra:
        ss = np.unique(np.concatenate((ss, np.asarray(extra, dtype=np.int64))))
    return ss


def _scan_block(
    table: PrimeTable,
    counts: np.ndarray,
    lo: int,
    hi: int,
    reduced: bool,
    s_first: int,
    s_last: int,
    pm1: np.ndarray,
) -> _Partial:
    part = _Partial()
    for s in _sums_for(table, lo, hi, reduced, s_first, s_last):
        s = int(s)
        ys = _candidates(s, pm1) if reduced else np.arange(2, s // 2 + 1, dtype=np.int64)
        deltas = counts[ys] + counts[s - ys] - int(counts[s])
        part.add(s, ys, deltas)
    return part


def _run_blocks(work: Callable[[int, int], _Partial], lo: int, hi: int, workers: int) -> _Partial:
    """Split [lo, hi) into fixed blocks, process them, merge in block order."""
    bounds = [(a, min(a + BLOCK_SIZE, hi)) for a in range(lo, hi, BLOCK_SIZE)]
    if workers <= 1 or len(bounds) <= 1:
        parts = [work(a, b) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ab: work(*ab), bounds))
    total = _Partial()
    for p in parts:
        total = total.merge(p)
    return total


# ---------------------------------------------------------------------------


def min_delta_per_s(table: PrimeTable, s_max: int, reduced: bool) -> np.ndarray:
    """``out[s]`` = min over 2 <= y <= s/2 of Delta(s - y, y) (entries below 4 are unused).

    With ``reduced`` only the candidate y of the reduced set are examined (every s is visited).
    """
    if s_max > table.limit:
        raise RangeError(f"s_max {s_max} exceeds table limit {table.limit}")
    counts = table.counts[: s_max + 1].astype(np.int64)
    pm1 = _odd_primes_minus_one(table, s_max)
    out = np.zeros(s_max + 1, dtype=np.int64)
    for s in range(4, s_max + 1):
        ys = _candidates(s, pm1) if reduced else np.arange(2, s // 2 + 1, dtype=np.int64)
        out[s] = int((counts[ys] + counts[s - ys]).min()) - int(counts[s])
    return out


@dataclass(frozen=True)
class GateResult:
    s_max: int
    per_s_equal: bool
    composite_monotone: bool
    mismatches: tuple[int, ...]

    @property
    def passed(self) -> bool:
        return self.per_s_equal and self.composite_monotone


def reduction_gate(table: PrimeTable, s_gate: int = GATE_LIMIT) -> GateResult:
    """Compare reduced and brute-force per-s minima for every s <= s_gate."""
    s_gate = min(s_gate, table.limit)
    brute = min_delta_per_s(table, s_gate, reduced=False)
    fast = min_delta_per_s(table, s_gate, reduced=True)
    diff = np.flatnonzero(brute[4:] != fast[4:]) + 4
    composite_ok = True
    for s in range(5, s_gate + 1):
        if not table.is_prime(s) and brute[s] < brute[s - 1]:
            composite_ok = False
            break
    return GateResult(s_gate, diff.size == 0, composite_ok, tuple(int(s) for s in diff[:20]))


def verify_exhaustive(
    table: PrimeTable, s_max: int, use_reduction: bool = False, *, workers: int = 1
) -> VerificationReport:
    """Check Delta(x, y) >= 0 for all 2 <= y <= x with x + y <= s_max.

    With ``use_reduction`` the reduced candidate set is used, after
    :func:`reduction_gate` has confirmed it against brute force.
    """
    s_max = int(s_max)
    if s_max > table.limit:
        raise RangeError(f"s_max {s_max} exceeds table limit {table.limit}")
    if s_max < 4:
        return VerificationReport(4, s_max, 0, use_reduction, None, None)
    if use_reduction:
        gate = reduction_gate(table, min(GATE_LIMIT, s_max))
        if not gate.passed:
            raise ReductionGateError(f"reduced candidate set disagrees with brute force at s in {gate.mismatches}")
    pm1 = _odd_primes_minus_one(table, s_max)
    counts = table.counts[: s_max + 1].astype(np.int64)

    def work(lo: int, hi: int) -> _Partial:
        return _scan_block(table, counts, lo, hi, use_reduction, 4, s_max, pm1)

    total = _run_blocks(work, 4, s_max + 1, workers)
    d, s, y = total.best
    return VerificationReport(
        4, s_max, total.pairs, use_reduction, d, (s - y, y), tuple(total.violations), total.violation_count
    )


def verify_range(table: PrimeTable, x: int, y_lo: int, y_hi: int, stride: int = 1) -> VerificationReport:
    """Check Delta(x, y) >= 0 for y = y_lo, y_lo + stride, ..., and always y_hi."""
    x, y_lo, y_hi = int(x), int(y_lo), int(y_hi)
    if not 2 <= y_lo <= y_hi <= x:
        raise DomainError(f"need 2 <= y_lo <= y_hi <= x, got {y_lo}, {y_hi}, {x}")
    if stride < 1:
        raise DomainError("stride must be >= 1")
    if x + y_hi > table.limit:
        raise RangeError(f"x + y_hi = {x + y_hi} exceeds table limit {table.limit}")
    ys = np.arange(y_lo, y_hi + 1, stride, dtype=np.int64)
    if ys[-1] != y_hi:
        ys = np.append(ys, y_hi)
    counts = table.counts
    deltas = counts[x] + counts[ys].astype(np.int64) - counts[x + ys].astype(np.int64)
    k = int(np.argmin(deltas))
    bad = np.flatnonzero(deltas < 0)
    viol = tuple(DeltaSample(x, int(ys[i]), int(deltas[i])) for i in bad[:MAX_RECORDED_VIOLATIONS])
    return VerificationReport(
        x + y_lo, x + y_hi, int(ys.size), False, int(deltas[k]), (x, int(ys[k])), viol, int(bad.size)
    )


def exceptional_bound(X: int, hypothesis: Hypothesis) -> float | None:
    """Right-hand side of the exceptional-set estimate, without its implied constant."""
    L = math.log(X)
    if hypothesis is Hypothesis.UNCONDITIONAL:
        L2 = math.log(2 * X)
        if X < 3 or math.log(L2) <= 0:
            return None
        return X**2 * math.exp(-0.2123 * L2**0.6 * math.log(L2) ** -0.2) * L**2 / math.log(L)
    return X**1.5 * L**2


def scan_exceptions(
    table: PrimeTable,
    X: int,
    hypothesis: Hypothesis,
    *,
    exhaustive: bool = True,
    workers: int = 1,
    t0: float = PLATT_TRUDGIAN_T0,
) -> ExceptionScan:
    """Count pairs 2 <= y <= x <= X left uncovered by every admissible proven range.

    Uncovered pairs are checked exhaustively when there are at most 10^8 of them;
    beyond that an exhaustive request raises :class:`ResourceError`.
    """
    X = int(X)
    if not isinstance(hypothesis, Hypothesis):
        raise DomainError("hypothesis must be a Hypothesis")
    if 2 * X > table.limit:
        raise RangeError(f"2X = {2 * X} exceeds table limit {table.limit}")

    def cut(x: int) -> int:
        res = best_ymin(x, hypothesis, t0=t0)
        return x if not res.valid else min(x, res.first_y - 1)

    def count_block(lo: int, hi: int) -> tuple[int, list[int]]:
        cuts = [cut(x) for x in range(lo, hi)]
        return sum(max(0, c - 1) for c in cuts), cuts

    bounds = [(a, min(a + BLOCK_SIZE, X + 1)) for a in range(2, X + 1, BLOCK_SIZE)]
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(lambda ab: count_block(*ab), bounds))
    else:
        blocks = [count_block(a, b) for a, b in bounds]
    uncovered = sum(b[0] for b in blocks)
    cuts = [c for b in blocks for c in b[1]]
    bound = exceptional_bound(X, hypothesis)

    if uncovered > EXHAUSTIVE_PAIR_CAP:
        if exhaustive:
            raise ResourceError(f"{uncovered} uncovered pairs exceed the exhaustive cap {EXHAUSTIVE_PAIR_CAP}")
        return ExceptionScan(X, hypothesis.value, uncovered, None, bound)
    if not exhaustive:
        return ExceptionScan(X, hypothesis.value, uncovered, None, bound)

    counts = table.counts[: 2 * X + 1].astype(np.int64)
    violations: list[DeltaSample] = []
    violating = 0
    for x, c in zip(range(2, X + 1), cuts):
        if c < 2:
            continue
        ys = np.arange(2, c + 1, dtype=np.int64)
        deltas = counts[x] + counts[ys] - counts[x + ys]
        bad = np.flatnonzero(deltas < 0)
        violating += int(bad.size)
        for i in bad[: MAX_RECORDED_VIOLATIONS - len(violations)]:
            violations.append(DeltaSample(x, int(ys[i]), int(deltas[i])))
    return ExceptionScan(X, hypothesis.value, uncovered, violating, bound, tuple(violations))


def mv_check(table: PrimeTable, samples: Iterable[Sequence[int]]) -> MVReport:
    """Check pi(x + y) <= pi(x) + 2 pi(y) (Montgomery-Vaughan) on each sample, x >= 1, y >= 2."""
    pairs = np.asarray(list(samples), dtype=np.int64).reshape(-1, 2)
    if pairs.size == 0:
        return MVReport(0, ())
    xs, ys = pairs[:, 0], pairs[:, 1]
    if (xs < 1).any() or (ys < 2).any():
        raise DomainError("Montgomery-Vaughan needs x >= 1 and y >= 2")
    if int((xs + ys).max()) > table.limit:
        raise RangeError("a sample exceeds the table limit")
    c = table.counts.astype(np.int64)
    bad = np.flatnonzero(c[xs + ys] > c[xs] + 2 * c[ys])
    return MVReport(len(pairs), tuple((int(xs[i]), int(ys[i])) for i in bad))
