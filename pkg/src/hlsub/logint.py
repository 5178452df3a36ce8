"""The offset logarithmic integral li(x) = int_2^x du/log u and stable li differences.

li is evaluated from Ramanujan's rapidly convergent series for the principal
value integral, accumulated in mpmath at 30+ significant digits (plus the
digits lost to cancellation), and then shifted so that li(2) = 0.

    Li(x) = gamma + log log x
            + sqrt(x) * sum_{n>=1} (-1)^(n-1) (log x)^n / (n! 2^(n-1))
                               * sum_{k=0}^{floor((n-1)/2)} 1/(2k+1)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from mpmath import mp, mpf

from .errors import DomainError

GUARD_DIGITS = 30
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)
_PANEL_WIDTH = 0.5


@dataclass(frozen=True)
class LiValue:
    """li(x) together with a certified bound on the absolute evaluation error."""

    x: float
    value: float
    abs_err_bound: float

    def __float__(self) -> float:
        return self.value


def _working_dps(x: mpf) -> int:
    # the alternating series peaks near sqrt(x) before cancelling down to O(1)
    lost = int(mpmath.log10(x) / 2) + 2 if x > 1 else 2
    return GUARD_DIGITS + lost + 5


@lru_cache(maxsize=None)
def _series_coefficients(dps: int, count: int) -> tuple[tuple[mpf, ...], tuple[mpf, ...]]:
    """Signed coefficients (-1)^(n-1) h_n / (n! 2^(n-1)) and their magnitudes, n = 1..count."""
    with mp.workdps(dps):
        signed, mags = [], []
        scale = mpf(1)
        inner = mpf(0)
        for n in range(1, count + 1):
            scale = scale if n == 1 else scale / (2 * n)
            if n % 2 == 1:
                inner += mpf(1) / n
            c = scale * inner
            mags.append(c)
            signed.append(c if n % 2 == 1 else -c)
        return tuple(signed), tuple(mags)


def _li_principal(x: mpf) -> tuple[mpf, mpf]:
    """Principal-value Li(x) for x > 1, with an absolute error bound.  Caller sets precision."""
    L = mpmath.log(x)
    root = mpmath.sqrt(x)
    eps = mpf(10) ** (-mp.dps)
    # enough terms for L up to ~2.5x the current one before the cache is regrown
    count = 64
    while True:
        signed, mags = _series_coefficients(mp.dps, count)
        total = mpf(0)
        biggest = mpf(0)
        power = mpf(1)
        trunc = None
        for n in range(1, count):
            power *= L
            piece = mags[n - 1] * power
            biggest = max(biggest, piece)
            total += signed[n - 1] * power
            if L <= n + 1:
                # ratio of successive magnitudes is <= L/(2(n+1)) * (1 + 1/n) <= 1/2 + o(1)
                nxt = mags[n] * power * L
                if nxt < eps * (abs(total) + 1):
                    trunc = 4 * nxt
                    break
        if trunc is not None:
            break
        count *= 2
    rounding = 4 * n * biggest * eps
    value = mpmath.euler + mpmath.log(L) + root * total
    err = root * (trunc + rounding) + 4 * eps * (abs(value) + 1)
    return value, err


@lru_cache(maxsize=None)
def _li_principal_at_two(dps: int) -> tuple[mpf, mpf]:
    with mp.workdps(dps):
        return _li_principal(mpf(2))


def li_mpf(x, dps: int | None = None) -> tuple[mpf, mpf]:
    """li(x) as an mpmath number plus its absolute error bound.

    The working precision is raised for large ``x`` so the result always keeps
    at least 30 significant digits; ``dps`` overrides it.
    """
    if not x >= 2:
        raise DomainError(f"li(x) needs x >= 2, got {x}")
    if x == 2:
        return mpf(0), mpf(0)
    dps = dps or _working_dps(mpf(x))
    li2, err2 = _li_principal_at_two(dps)
    with mp.workdps(dps):
        val, err = _li_principal(mpf(x))
        return val - li2, err + err2


def li(x) -> LiValue:
    """li(x) = int_2^x du/log u for x >= 2, rounded to a float.

    ``abs_err_bound`` covers series truncation, accumulated rounding and the
    final conversion to double precision.
    """
    val, err = li_mpf(x)
    value = float(val)
    conv = abs(mpf(value) - val)
    bound = float(err + conv) if val else 0.0
    bound = math.nextafter(bound, math.inf) if bound else 0.0
    return LiValue(float(x), value, bound)


def _gauss_legendre(f, a: float, b: float, width: float = _PANEL_WIDTH) -> float:
    """Composite 20-point Gauss-Legendre rule on [a, b]."""
    if b <= a:
        return 0.0
    panels = max(1, math.ceil((b - a) / width))
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mids = 0.5 * (edges[:-1] + edges[1:])
    t = (mids[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return float(math.fsum(w * f(t)))


def delta_li(x, y) -> float:
    """li(x) + li(y) - li(x + y) for 2 <= y <= x, without cancellation.

    Uses li(x) + li(y) - li(x+y) = int_2^y (1/log u - 1/log(x+u)) du - int_0^2 du/log(x+u);
    the first integrand equals log1p(x/u) / (log u * log(x+u)) and is integrated
    in the variable t = log u.
    """
    x, y = float(x), float(y)
    if y < 2 or y > x:
        raise DomainError(f"delta_li needs 2 <= y <= x, got x={x}, y={y}")

    def gap(t):
        u = np.exp(t)
        return u * np.log1p(x / u) / (t * np.log(x + u))

    def tail(u):
        return 1.0 / np.log(x + u)

    return _gauss_legendre(gap, math.log(2.0), math.log(y)) - _gauss_legendre(tail, 0.0, 2.0)


def delta_li_three_term(x, y) -> tuple[mpf, mpf]:
    """li(x) + li(y) - li(x+y) from three extended-precision li values, with error bound."""
    if y < 2 or y > x:
        raise DomainError(f"need 2 <= y <= x, got x={x}, y={y}")
    dps = _working_dps(mpf(x) + mpf(y))
    with mp.workdps(dps):
        s = mpf(x) + mpf(y)
    a, ea = li_mpf(x, dps)
    b, eb = li_mpf(y, dps)
    c, ec = li_mpf(s, dps)
    with mp.workdps(dps):
        return a + b - c, ea + eb + ec
