"""Exact prime generation and O(1) prime counting up to desk-scale limits.

The central object is :class:`PrimeTable`, a dense prefix-count array with
``counts[t] == pi(t)`` for every ``0 <= t <= limit``.  It is built with an
odd-only segmented sieve of Eratosthenes; segments can be sieved on a thread
pool, the prefix sums are always stitched together in order so the result does
not depend on the worker count.
"""

from __future__ import annotations

import math
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Union

import numpy as np

from .errors import CacheError, DomainError, RangeError, ResourceError

DEFAULT_SEGMENT_SIZE = 1 << 18  # odd flags per segment
MAX_LIMIT = (1 << 32) - 2  # counts are uint32 and the table holds limit + 1 entries
MEMORY_BUDGET_ENV = "HLSUB_MEMORY_BUDGET"
DEFAULT_MEMORY_BUDGET = 4 << 30

CACHE_MAGIC = b"HLPT"
CACHE_VERSION = 1
_CACHE_HEADER = struct.Struct("<4sIQ")


def simple_sieve(n: int) -> np.ndarray:
    """Return all primes ``<= n`` from a plain (monolithic) sieve."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    is_prime = np.ones(n + 1, dtype=bool)
    is_prime[:2] = False
    is_prime[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if is_prime[p]:
            is_prime[p * p :: 2 * p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


@dataclass(frozen=True)
class SieveSegment:
    """Primality flags for the odd integers of the half-open window ``[lo, hi)``.

    ``flags[i]`` refers to the odd number ``first_odd + 2*i``.  The even prime 2
    is not represented here; :meth:`primes` adds it back when it lies in range.
    """

    lo: int
    hi: int
    flags: np.ndarray

    @property
    def first_odd(self) -> int:
        return self.lo | 1

    def odd_values(self) -> np.ndarray:
        return self.first_odd + 2 * np.arange(self.flags.size, dtype=np.int64)

    def primes(self) -> np.ndarray:
        found = self.first_odd + 2 * np.flatnonzero(self.flags).astype(np.int64)
        if self.lo <= 2 < self.hi:
            found = np.concatenate(([2], found))
        return found

    def indicator(self) -> np.ndarray:
        """0/1 primality indicator for every integer of ``[lo, hi)``."""
        ind = np.zeros(self.hi - self.lo, dtype=np.uint8)
        start = self.first_odd - self.lo
        ind[start::2] = self.flags
        if self.lo <= 2 < self.hi:
            ind[2 - self.lo] = 1
        return ind


def sieve_segment(lo: int, hi: int, base_primes: np.ndarray | None = None) -> SieveSegment:
    """Sieve the odd integers of ``[lo, hi)``.

    ``base_primes`` must contain every odd prime up to ``isqrt(hi - 1)``; it is
    computed when omitted.
    """
    lo = max(lo, 0)
    if hi <= lo:
        return SieveSegment(lo, lo, np.zeros(0, dtype=bool))
    first = lo | 1
    n = max(0, (hi - first + 1) // 2)
    flags = np.ones(n, dtype=bool)
    if n == 0:
        return SieveSegment(lo, hi, flags)
    if first == 1:
        flags[0] = False
    root = math.isqrt(hi - 1)
    if base_primes is None:
        base_primes = simple_sieve(root)
    for p in base_primes:
        p = int(p)
        if p == 2:
            continue
        if p > root:
            break
        start = max(p * p, -(-lo // p) * p)
        if start % 2 == 0:
            start += p
        if start >= hi:
            continue
        flags[(start - first) // 2 :: p] = False
    return SieveSegment(lo, hi, flags)


def iter_segments(
    lo: int, hi: int, segment_size: int = DEFAULT_SEGMENT_SIZE, base_primes: np.ndarray | None = None
) -> Iterator[SieveSegment]:
    """Yield consecutive sieved segments covering ``[lo, hi)``."""
    if base_primes is None:
        base_primes = simple_sieve(math.isqrt(max(hi - 1, 0)))
    span = 2 * segment_size
    for seg_lo in range(lo, hi, span):
        yield sieve_segment(seg_lo, min(seg_lo + span, hi), base_primes)


def memory_budget() -> int:
    """Memory budget in bytes, read from ``HLSUB_MEMORY_BUDGET`` (accepts K/M/G suffixes)."""
    raw = os.environ.get(MEMORY_BUDGET_ENV, "").strip()
    if not raw:
        return DEFAULT_MEMORY_BUDGET
    scale = {"K": 1 << 10, "M": 1 << 20, "G": 1 << 30}
    suffix = raw[-1].upper()
    if suffix in scale:
        return int(float(raw[:-1]) * scale[suffix])
    return int(raw)


def estimate_table_bytes(limit: int, segment_size: int = DEFAULT_SEGMENT_SIZE, workers: int = 1) -> int:
    counts = 4 * (limit + 1)
    # per in-flight segment: odd flags, byte indicator, uint32 cumsum
    per_segment = segment_size + 2 * segment_size + 8 * segment_size
    base = 8 * (math.isqrt(limit) // 2 + 1)
    return counts + max(1, workers) * per_segment + base


@dataclass(frozen=True)
class PrimeTable:
    """Immutable table with ``counts[t] == pi(t)`` for ``0 <= t <= limit``."""

    limit: int
    counts: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.counts.setflags(write=False)

    def pi(self, t: int) -> int:
        return pi(self, t)

    def is_prime(self, t: int) -> bool:
        if t < 2:
            return False
        _check_range(self, t)
        return bool(self.counts[t] != self.counts[t - 1])

    def primes(self, lo: int, hi: int) -> np.ndarray:
        return primes_in(self, lo, hi)


def _check_range(table: PrimeTable, t: int) -> None:
    if t < 0:
        raise DomainError(f"pi is defined here for t >= 0, got {t}")
    if t > table.limit:
        raise RangeError(f"t={t} exceeds table limit {table.limit}")


def build_prime_table(
    limit: int,
    *,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    workers: int = 1,
    budget: int | None = None,
) -> PrimeTable:
    """Build the prefix-count table for ``[0, limit]``.

    Raises :class:`DomainError` for ``limit < 2`` or limits beyond the uint32
    width, and :class:`ResourceError` before allocating anything when the
    estimated footprint exceeds ``budget`` (default: :func:`memory_budget`).
    """
    limit = int(limit)
    if limit < 2:
        raise DomainError(f"limit must be >= 2, got {limit}")
    if limit > MAX_LIMIT:
        raise DomainError(f"limit {limit} exceeds the 32-bit count width (max {MAX_LIMIT})")
    if segment_size < 16:
        raise DomainError("segment_size must be >= 16")
    workers = max(1, int(workers))
    budget = memory_budget() if budget is None else budget
    need = estimate_table_bytes(limit, segment_size, workers)
    if need > budget:
        raise ResourceError(f"prime table up to {limit} needs ~{need} bytes, budget is {budget}")

    counts = np.empty(limit + 1, dtype=np.uint32)
    base = simple_sieve(math.isqrt(limit))
    span = 2 * segment_size
    bounds = [(lo, min(lo + span, limit + 1)) for lo in range(0, limit + 1, span)]

    def work(bound):
        return sieve_segment(bound[0], bound[1], base).indicator()

    running = np.uint32(0)
    if workers == 1:
        indicators = map(work, bounds)
        pool = None
    else:
        pool = ThreadPoolExecutor(max_workers=workers)
        indicators = pool.map(work, bounds)
    try:
        for (lo, hi), ind in zip(bounds, indicators):
            seg = np.cumsum(ind, dtype=np.uint32)
            seg += running
            counts[lo:hi] = seg
            running = seg[-1]
    finally:
        if pool is not None:
            pool.shutdown()
    return PrimeTable(limit, counts)


def pi(table: PrimeTable, t: int) -> int:
    """Exact number of primes ``<= t`` by table lookup."""
    t = int(t)
    _check_range(table, t)
    return int(table.counts[t])


def primes_in(source: Union[PrimeTable, int], lo: int, hi: int) -> np.ndarray:
    """Primes ``p`` with ``lo <= p < hi`` in ascending order.

    ``source`` is either a :class:`PrimeTable` covering ``hi - 1`` or an
    integer, in which case the window is sieved directly.
    """
    lo, hi = int(lo), int(hi)
    if lo < 2 or hi < lo:
        raise DomainError(f"need 2 <= lo <= hi, got lo={lo}, hi={hi}")
    if hi == lo:
        return np.empty(0, dtype=np.int64)
    if isinstance(source, PrimeTable):
        _check_range(source, hi - 1)
        window = source.counts[lo - 1 : hi].astype(np.int64)
        return np.flatnonzero(np.diff(window)).astype(np.int64) + lo
    if hi - 1 > int(source):
        raise RangeError(f"hi - 1 = {hi - 1} exceeds limit {source}")
    parts = [seg.primes() for seg in iter_segments(lo, hi)]
    return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)


def pi_ap(table: PrimeTable, t: int, q: int, a: int) -> int:
    """Count primes ``p <= t`` with ``p = a (mod q)`` by a filtered scan of the table."""
    t, q, a = int(t), int(q), int(a)
    if q < 2:
        raise DomainError(f"modulus must be >= 2, got {q}")
    if math.gcd(a, q) != 1:
        raise DomainError(f"gcd({a}, {q}) != 1")
    _check_range(table, t)
    if t < 2:
        return 0
    a %= q
    total = 0
    chunk = 1 << 22
    for lo in range(2, t + 1, chunk):
        ps = primes_in(table, lo, min(lo + chunk, t + 1))
        total += int(np.count_nonzero(ps % q == a))
    return total


def save_table(table: PrimeTable, path: Union[str, Path]) -> None:
    """Write ``table`` as header (magic, version, limit) plus little-endian uint32 counts."""
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(_CACHE_HEADER.pack(CACHE_MAGIC, CACHE_VERSION, table.limit))
        fh.write(table.counts.astype("<u4", copy=False).tobytes())


def load_table(path: Union[str, Path], segment_size: int = DEFAULT_SEGMENT_SIZE) -> PrimeTable:
    """Load a cached table and re-validate it against a fresh sieve of its top segment."""
    path = Path(path)
    with path.open("rb") as fh:
        head = fh.read(_CACHE_HEADER.size)
        if len(head) != _CACHE_HEADER.size:
            raise CacheError(f"{path}: truncated header")
        magic, version, limit = _CACHE_HEADER.unpack(head)
        if magic != CACHE_MAGIC:
            raise CacheError(f"{path}: bad magic {magic!r}")
        if version != CACHE_VERSION:
            raise CacheError(f"{path}: unsupported version {version}")
        if not 2 <= limit <= MAX_LIMIT:
            raise CacheError(f"{path}: invalid limit {limit}")
        counts = np.fromfile(fh, dtype="<u4")
    if counts.size != limit + 1:
        raise CacheError(f"{path}: expected {limit + 1} entries, found {counts.size}")
    counts = counts.astype(np.uint32, copy=False)
    if counts[0] != 0 or counts[1] != 0 or counts[2] != 1:
        raise CacheError(f"{path}: counts[0..2] must be 0, 0, 1")
    lo = max(3, limit + 1 - 2 * segment_size)
    seg = sieve_segment(lo, limit + 1)
    expected = np.cumsum(seg.indicator(), dtype=np.int64) + int(counts[lo - 1])
    if not np.array_equal(expected, counts[lo:].astype(np.int64)):
        raise CacheError(f"{path}: top segment disagrees with a fresh sieve")
    return PrimeTable(int(limit), counts)
