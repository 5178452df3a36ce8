import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import reference_sieve
from hlsub.errors import DomainError, RangeError, ResourceError
from hlsub.pnt_bounds import Hypothesis
from hlsub.prime_engine import PrimeTable
from hlsub.thresholds import dusart_ymin, rh_refined_ymin
from hlsub.verifier import (
    ReductionGateError,
    delta,
    exceptional_bound,
    min_delta_per_s,
    mv_check,
    reduction_gate,
    scan_exceptions,
    verify_exhaustive,
    verify_range,
)


@pytest.fixture(scope="module")
def ref_counts():
    flags = reference_sieve(2 * 10**5)
    return list(itertools.accumulate(flags))


def brute_min(counts, s_max):
    """Pure-Python double loop: (min delta, violations) over 2 <= y <= x, x + y <= s_max."""
    best, bad = None, 0
    for x in range(2, s_max - 1):
        for y in range(2, min(x, s_max - x) + 1):
            d = counts[x] + counts[y] - counts[x + y]
            best = d if best is None else min(best, d)
            bad += d < 0
    return best, bad


def fake_table(members, limit):
    flags = np.zeros(limit + 1, dtype=np.uint32)
    flags[list(members)] = 1
    return PrimeTable(limit, np.cumsum(flags, dtype=np.uint32))


# -- delta ---------------------------------------------------------------------------


def test_delta_examples(small_table, ref_counts):
    assert delta(small_table, 2, 2) == 0
    c = ref_counts
    assert delta(small_table, 10**5 - 10**3, 10**3) == c[10**5 - 10**3] + c[10**3] - c[10**5]
    assert delta(small_table, 7, 2) == 4 + 1 - 4


def test_delta_1e5_1e3(table, ref_counts):
    c = ref_counts
    assert delta(table, 10**5, 10**3) == c[10**5] + c[10**3] - c[101000]


def test_delta_errors(small_table):
    with pytest.raises(RangeError):
        delta(small_table, 10**5, 2)
    with pytest.raises(DomainError):
        delta(small_table, 1, 5)


@given(st.integers(2, 49_000), st.integers(2, 49_000))
@settings(max_examples=300, deadline=None)
def test_delta_symmetric(small_table, x, y):
    assert delta(small_table, x, y) == delta(small_table, y, x)


@given(st.integers(2, 90_000), st.integers(2, 5_000))
@settings(max_examples=300, deadline=None)
def test_delta_monotone_step(small_table, x, y):
    assert delta(small_table, x + 1, y) - delta(small_table, x, y) in (-1, 0, 1)


# -- exhaustive --------------------------------------------------------------------------


def test_brute_force_matches_python_loop(small_table, ref_counts):
    rep = verify_exhaustive(small_table, 1500)
    best, bad = brute_min(ref_counts, 1500)
    assert rep.min_delta == best and rep.violation_count == bad == 0
    assert rep.pairs_checked == sum(max(0, min(x, 1500 - x) - 1) for x in range(2, 1499))
    assert not rep.reduction_used and rep.ok


def test_brute_force_1e4(table):
    rep = verify_exhaustive(table, 10**4)
    assert rep.ok and rep.violations == ()
    assert rep.min_delta == 0 and rep.pairs_checked == 24_990_001
    assert delta(table, *rep.argmin) == rep.min_delta


def test_reduction_gate_passes(table):
    gate = reduction_gate(table)
    assert gate.passed and gate.mismatches == ()
    brute = min_delta_per_s(table, 10**4, reduced=False)
    fast = min_delta_per_s(table, 10**4, reduced=True)
    assert np.array_equal(brute[4:], fast[4:])


def test_per_s_minimum_against_python(small_table, ref_counts):
    per_s = min_delta_per_s(small_table, 400, reduced=True)
    c = ref_counts
    for s in range(4, 401):
        assert per_s[s] == min(c[s - y] + c[y] - c[s] for y in range(2, s // 2 + 1))


@pytest.mark.parametrize("s_max", [4, 5, 97, 1000, 30_001])
def test_reduced_agrees_with_brute(table, s_max):
    full = verify_exhaustive(table, s_max)
    fast = verify_exhaustive(table, s_max, use_reduction=True)
    assert fast.reduction_used
    assert (fast.min_delta, fast.violation_count) == (full.min_delta, full.violation_count)
    assert fast.pairs_checked <= full.pairs_checked


def test_small_smax():
    t = fake_table([2, 3], 3)
    rep = verify_exhaustive(t, 3)
    assert rep.pairs_checked == 0 and rep.min_delta is None


def test_planted_violation_is_found():
    # a dense cluster of "primes" makes pi(x + y) jump past pi(x) + pi(y)
    members = {2, 3, 5, 7} | set(range(201, 260, 2))
    t = fake_table(members, 600)
    c = t.counts.tolist()
    best, bad = brute_min(c, 600)
    rep = verify_exhaustive(t, 600)
    assert bad > 0 and rep.violation_count == bad and rep.min_delta == best < 0
    assert all(v.delta == c[v.x] + c[v.y] - c[v.x + v.y] < 0 for v in rep.violations)
    try:
        fast = verify_exhaustive(t, 600, use_reduction=True)
    except ReductionGateError:
        return
    assert fast.min_delta == best


def test_exhaustive_range_error(small_table):
    with pytest.raises(RangeError):
        verify_exhaustive(small_table, 10**5 + 1)


@pytest.mark.parametrize("workers", [2, 4, 16])
def test_workers_do_not_change_report(table, workers):
    base = verify_exhaustive(table, 2 * 10**5, use_reduction=True)
    assert verify_exhaustive(table, 2 * 10**5, use_reduction=True, workers=workers) == base
    small = verify_exhaustive(table, 3000)
    assert verify_exhaustive(table, 3000, workers=workers) == small


# -- targeted ranges ------------------------------------------------------------------


def test_verify_range_dusart(table):
    x = 10**6
    lo = math.ceil(dusart_ymin(x).y_min)
    rep = verify_range(table, x, lo, x, stride=97)
    assert rep.ok and rep.pairs_checked == len(range(lo, x + 1, 97)) + ((x - lo) % 97 != 0)
    assert rep.s_max == 2 * x


def test_verify_range_refined(table):
    x = 10**6
    lo = math.ceil(rh_refined_ymin(x).y_min)
    rep = verify_range(table, x, lo, lo + 10**4)
    assert rep.ok and rep.pairs_checked == 10**4 + 1


def test_verify_range_single_point(table):
    rep = verify_range(table, 10**6, 2, 2)
    assert rep.pairs_checked == 1 and rep.min_delta == delta(table, 10**6, 2) >= 0


def test_verify_range_errors(small_table):
    with pytest.raises(DomainError):
        verify_range(small_table, 100, 50, 40)
    with pytest.raises(DomainError):
        verify_range(small_table, 100, 2, 101)
    with pytest.raises(RangeError):
        verify_range(small_table, 90_000, 2, 20_000)


# -- exceptional set --------------------------------------------------------------------


def test_scan_tiny_hand_count(small_table):
    # Dusart covers y >= 5x / (7 log x log log x) from x = 5; everything below is uncovered
    scan = scan_exceptions(small_table, 10, Hypothesis.RH)
    assert scan.uncovered_pairs == 20
    assert scan.violating_pairs == 0
    assert scan_exceptions(small_table, 10, Hypothesis.UNCONDITIONAL).uncovered_pairs == 20


def test_scan_1e3(small_table):
    scan = scan_exceptions(small_table, 1000, Hypothesis.RH)
    assert scan.violating_pairs == 0
    assert 0 < scan.uncovered_pairs <= 1000 * 999 // 2
    assert scan.bound_value == pytest.approx(1000**1.5 * math.log(1000) ** 2)
    assert 0 < scan.empirical_ratio < 1
    assert scan_exceptions(small_table, 1000, Hypothesis.RH, workers=4) == scan


def test_scan_non_exhaustive(small_table):
    scan = scan_exceptions(small_table, 300, Hypothesis.UNCONDITIONAL, exhaustive=False)
    assert scan.violating_pairs is None and scan.uncovered_pairs > 0


def test_scan_resource_cap(monkeypatch, small_table):
    import hlsub.verifier as v

    monkeypatch.setattr(v, "EXHAUSTIVE_PAIR_CAP", 100)
    with pytest.raises(ResourceError):
        scan_exceptions(small_table, 1000, Hypothesis.RH)


def test_scan_errors(small_table):
    with pytest.raises(RangeError):
        scan_exceptions(small_table, 60_000, Hypothesis.RH)
    with pytest.raises(DomainError):
        scan_exceptions(small_table, 100, "rh")


def test_exceptional_bound_shapes():
    X = 10**4
    L, L2 = math.log(X), math.log(2 * X)
    expected = X**2 * math.exp(-0.2123 * L2**0.6 * math.log(L2) ** -0.2) * L**2 / math.log(L)
    assert exceptional_bound(X, Hypothesis.UNCONDITIONAL) == pytest.approx(expected, rel=1e-14)
    assert exceptional_bound(X, Hypothesis.RH) == pytest.approx(X**1.5 * L**2, rel=1e-14)


# -- Montgomery-Vaughan --------------------------------------------------------------


def test_mv_examples(table):
    assert mv_check(table, [(1, 2)]).all_pass
    assert mv_check(table, [(10**6 - 2, 2)]).all_pass
    assert mv_check(table, []).checked == 0


def test_mv_random(table):
    rng = np.random.default_rng(20240611)
    x = rng.integers(1, 10**6 - 1, size=10**5)
    y = rng.integers(2, 10**6 - x + 1)
    rep = mv_check(table, np.column_stack([x, y]))
    assert rep.checked == 10**5 and rep.all_pass


def test_mv_catches_corrupt_table():
    t = fake_table({2, 3} | set(range(31, 60, 2)), 100)
    rep = mv_check(t, [(20, 20), (30, 2)])
    assert not rep.all_pass and (20, 20) in rep.failures


def test_mv_errors(small_table):
    with pytest.raises(DomainError):
        mv_check(small_table, [(0, 2)])
    with pytest.raises(RangeError):
        mv_check(small_table, [(10**5, 2)])
