"""First-kind Bessel functions and their zeros, self-contained.

This is the analytic ground-truth path for the disk spectra: ascending
power series for moderate arguments, Miller's normalized downward
recurrence beyond, and zeros by sign-bracketed bisection on a 0.1-step
scan grid. Deliberately independent of the finite element code so the
two can check each other.
"""
from __future__ import annotations

import math

from .errors import SpectrumRangeError

SERIES_CUTOFF = 12.0
SCAN_STEP = 0.1
SCAN_LIMIT = 200.0
BISECT_TOL = 1e-12


def _series(m: int, x: float) -> float:
    half = 0.5 * x
    term = 1.0
    for k in range(1, m + 1):
        term *= half / k
    total = term
    k = 1
    while True:
        term *= -(half * half) / (k * (k + m))
        total += term
        if abs(term) <= 1e-17 * max(1.0, abs(total)):
            return total
        k += 1
        if k > 200:  # series always terminates long before this for x <= 12
            return total


def _miller(m: int, x: float) -> float:
    """Downward recurrence normalized with J_0 + 2*sum J_{2k} = 1."""
    start = int(max(m, x) + 16 + 2.0 * math.sqrt(max(m, x)))
    if start % 2:
        start += 1
    j_hi = 0.0  # J_{k+1}
    j = 1e-30  # J_k
    norm = 0.0
    target = 0.0
    k = start
    while k > 0:
        j_lo = (2.0 * k / x) * j - j_hi  # J_{k-1}
        j_hi, j = j, j_lo
        k -= 1
        if k == m:
            target = j
        if k > 0 and k % 2 == 0:
            norm += 2.0 * j
        if abs(j) > 1e250:
            j_hi *= 1e-250
            j *= 1e-250
            norm *= 1e-250
            target *= 1e-250
    norm += j  # J_0
    return target / norm


def bessel_j(m: int, x: float) -> float:
    """J_m(x) for m >= 0 and x >= 0."""
    if m < 0:
        raise ValueError("order must be >= 0")
    if x < 0:
        raise ValueError("argument must be >= 0")
    if x == 0.0:
        return 1.0 if m == 0 else 0.0
    if x <= SERIES_CUTOFF:
        return _series(m, x)
    return _miller(m, x)


def bessel_jp(m: int, x: float) -> float:
    """Derivative J_m'(x)."""
    if m == 0:
        return -bessel_j(1, x)
    return 0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x))


def _bisect_zeros(f, count: int) -> list[float]:
    zeros: list[float] = []
    x = SCAN_STEP
    f_prev = f(x)
    while len(zeros) < count:
        x_next = x + SCAN_STEP
        if x_next > SCAN_LIMIT:
            raise SpectrumRangeError(
                f"needed {count} zeros but the scan grid ends at {SCAN_LIMIT}"
            )
        f_next = f(x_next)
        # underflowed values near x=0 for large orders carry no sign
        if f_prev != 0.0 and f_prev * f_next < 0.0:
            lo, hi, f_lo = x, x_next, f_prev
            while hi - lo > BISECT_TOL:
                mid = 0.5 * (lo + hi)
                f_mid = f(mid)
                if f_mid == 0.0:
                    lo = hi = mid
                elif f_lo * f_mid < 0.0:
                    hi = mid
                else:
                    lo, f_lo = mid, f_mid
            zeros.append(0.5 * (lo + hi))
        x, f_prev = x_next, f_next
    return zeros


def bessel_j_zeros(m: int, count: int) -> list[float]:
    """First ``count`` positive zeros of J_m."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return _bisect_zeros(lambda x: bessel_j(m, x), count)


def bessel_jp_zeros(m: int, count: int) -> list[float]:
    """First ``count`` positive zeros of J_m' (the trivial x=0 excluded)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return _bisect_zeros(lambda x: bessel_jp(m, x), count)
