"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` (the lines are repeated in the
terminal summary) or ``python tests/test_acceptance.py``.
"""

import json
import math
import sys
import time

import mpmath
import numpy as np
import pytest

from hlsub.cli import main
from hlsub.logint import delta_li, li
from hlsub.pnt_bounds import CATALOG, BoundId, Hypothesis, classical_minus_vk, crossover_points
from hlsub.prime_engine import build_prime_table
from hlsub.thresholds import dusart_ymin, r1, refined_factor, rh_refined_ymin
from hlsub.verifier import mv_check, reduction_gate, scan_exceptions, verify_range

RESULTS: dict[int, str] = {}
_CLI_OUTPUT: dict[tuple, str] = {}


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def big_table():
    return build_prime_table(10**7)


def cli_json(capsys, *argv) -> tuple[int, str]:
    key = tuple(argv)
    if key not in _CLI_OUTPUT:
        code = main(list(argv))
        out = capsys.readouterr().out
        _CLI_OUTPUT[key] = (code, out)
    return _CLI_OUTPUT[key]


def test_criterion_01_subadditivity_below_1e6(capsys, big_table):
    t0 = time.perf_counter()
    gate = reduction_gate(big_table, 10**4)
    gate_time = time.perf_counter() - t0
    code, out = cli_json(capsys, "verify", "--smax", "1000000", "--reduction", "--workers", "1")
    doc = json.loads(out)
    ok = gate.passed and gate_time < 10 and code == 0 and doc["violations"] == [] and doc["violation_count"] == 0
    record(
        1,
        ok,
        f"gate s<=1e4 {'matches' if gate.passed else 'MISMATCH'} in {gate_time:.2f}s; "
        f"{doc['pairs_checked']} reduced pairs, min delta {doc['min_delta']} at {doc['argmin']}, "
        f"{doc['violation_count']} violations",
    )


def test_criterion_02_refined_constant():
    value = refined_factor(4 * 10**5)
    record(2, 65.097 <= value < 65.098, f"(1+r1)(2+r2) at 4e5 = {value!r}")


def test_criterion_03_classical_vs_vk():
    points = [60.0, 100.0, 1e6, 1e10]
    diffs = {L: classical_minus_vk(L) for L in points}
    below = [50.0, 55.0]
    reversed_below = all(classical_minus_vk(L) > 0 for L in below)
    cross = crossover_points(lo=math.log(23), hi=1e11)
    first = cross[0] if cross else math.nan
    near = abs(first - 59) <= 2
    inside = all(d <= 0 for d in diffs.values())
    shown = ", ".join(f"log x={L:g}: {'<=' if d <= 0 else '>'}" for L, d in diffs.items())
    record(
        3,
        inside and reversed_below and near,
        f"classical vs VK [{shown}]; reversed below at {below}: {reversed_below}; "
        f"crossovers at log x = {[float(f'{c:.10g}') for c in cross]}",
    )


def test_criterion_04_schoenfeld_empirical(big_table):
    t0 = time.perf_counter()
    anchors = np.unique(np.geomspace(2658, 10**7 - 1, 5000).astype(np.int64))
    primes = big_table.primes(2658, 10**7)
    idx = np.searchsorted(primes, anchors)
    idx = np.unique(np.minimum(idx, primes.size - 1))
    pts = np.unique(np.concatenate([primes[idx], primes[idx] - 1]))
    # top up with a uniform integer grid to reach exactly 10^4 points
    extra = np.setdiff1d(np.linspace(2657, 10**7, 10**4, dtype=np.int64), pts)
    pts = np.sort(np.concatenate([pts, extra[: 10**4 - pts.size]]))
    worst = 0.0
    for x in pts.tolist():
        bound = math.sqrt(x) * math.log(x) / (8 * math.pi)
        gap = abs(big_table.pi(x) - li(x).value)
        worst = max(worst, gap / bound)
    elapsed = time.perf_counter() - t0
    record(4, pts.size == 10**4 and worst < 1 and elapsed < 60, f"{pts.size} points, max ratio {worst:.6f}, {elapsed:.1f}s")


def test_criterion_05_li_accuracy():
    worst = 0.0
    for x in (10**3, 10**6, 10**9, 10**12):
        with mpmath.workdps(40):
            nodes = [mpmath.mpf(2)] + [mpmath.mpf(10) ** k for k in range(1, 13) if 10**k < x] + [mpmath.mpf(x)]
            ref, err = mpmath.quad(lambda u: 1 / mpmath.log(u), nodes, error=True)
            assert err <= 1e-15 * abs(ref)
            rel = abs((mpmath.mpf(li(x).value) - ref) / ref)
        worst = max(worst, float(rel))
    record(5, worst <= 1e-10, f"max relative error vs adaptive quadrature {worst:.3e}")


def test_criterion_06_proof_inequalities():
    failures = checked = 0
    for x in np.geomspace(4e5, 1e10, 60):
        L = math.log(x)
        lo = math.sqrt(x)
        for y in np.geomspace(lo, x / L, 7):
            checked += 1
            failures += delta_li(x, y) < y * math.log(L) / L**2
        hi = min(0.08 * lo * L**3, x)
        for y in np.geomspace(lo, hi, 7):
            checked += 1
            failures += delta_li(x, y) < y / L / (1 + r1(x))
    record(6, failures == 0, f"{checked} grid points, {failures} failures")


def test_criterion_07_proven_range_spot_checks(big_table):
    checked = bad = 0
    for x in (10**6, 5 * 10**6):
        lo = math.ceil(dusart_ymin(x).y_min)
        rep = verify_range(big_table, x, lo, x, stride=101)
        checked, bad = checked + rep.pairs_checked, bad + rep.violation_count
        lo = math.ceil(rh_refined_ymin(x).y_min)
        rep = verify_range(big_table, x, lo, lo + 10**4, stride=1)
        checked, bad = checked + rep.pairs_checked, bad + rep.violation_count
    record(7, bad == 0, f"{checked} pairs across Dusart and refined RH ranges, {bad} with delta < 0")


def test_criterion_08_montgomery_vaughan(big_table):
    rng = np.random.default_rng(8)
    x = rng.integers(1, 10**6 - 1, size=10**5)
    y = rng.integers(2, 10**6 - x + 1)
    rep = mv_check(big_table, np.column_stack([x, y]))
    record(8, rep.checked == 10**5 and rep.all_pass, f"{rep.checked} random pairs, {len(rep.failures)} failures")


def test_criterion_09_exceptional_set(capsys):
    lines, ok = [], True
    for hyp in ("rh", "unconditional"):
        code, out = cli_json(capsys, "scan", "--X", "1000", "--hypothesis", hyp, "--workers", "1")
        doc = json.loads(out)
        ok &= code == 0 and doc["violating_pairs"] == 0
        lines.append(
            f"{hyp}: uncovered {doc['uncovered_pairs']}, violating {doc['violating_pairs']}, "
            f"bound {doc['bound_value']:.6g}, ratio {doc['empirical_ratio']:.4g}"
        )
    record(9, ok, "; ".join(lines))


def test_criterion_10_determinism(capsys):
    same = True
    for argv in (("verify", "--smax", "1000000", "--reduction"), ("scan", "--X", "1000", "--hypothesis", "rh")):
        outs = {cli_json(capsys, *argv, "--workers", str(w)) for w in (1, 4, 16)}
        same &= len(outs) == 1
    record(10, same, "verify and scan reports byte-identical at 1, 4 and 16 workers")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
