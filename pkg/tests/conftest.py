import math
import sys

import pytest

from hlsub.prime_engine import build_prime_table


def reference_sieve(n):
    """Plain bytearray sieve, kept independent of the package's numpy code."""
    flags = bytearray([1]) * (n + 1)
    flags[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = bytes(len(range(p * p, n + 1, p)))
    return flags


def is_prime_trial(n):
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


@pytest.fixture(scope="session")
def table():
    # 10^7 covers x + y for x = 5 * 10^6 and the Schoenfeld grid
    return build_prime_table(10**7)


@pytest.fixture(scope="session")
def small_table():
    return build_prime_table(10**5)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
