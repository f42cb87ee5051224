"""Exact integer combinatorics shared by the bound and spectral modules."""

from __future__ import annotations

from functools import lru_cache
from math import comb


def binomial(n: int, m: int) -> int:
    """C(n, m) as an exact integer; 0 when m is outside [0, n]."""
    if m < 0 or n < 0 or m > n:
        return 0
    return comb(n, m)


def f_km(k: int, m: int) -> int:
    """Number of ordered pairs (x, y) of weight-k/2 words in F_2^(k-1)
    whose difference is a fixed word of weight m.

    Nonzero only for even m with 0 <= m <= k - 2.
    """
    if k % 2:
        raise ValueError(f"k must be even, got {k}")
    if m % 2 or m < 0 or m > k - 2:
        return 0
    return comb(m, m // 2) * comb(k - m - 1, (k - m) // 2)


def g_km(k: int, m: int) -> int:
    """Like f_km but with both words ranging over weight-k/2 words of F_2^k."""
    if k % 2:
        raise ValueError(f"k must be even, got {k}")
    if m % 2 or m < 0 or m > k:
        return 0
    return comb(m, m // 2) * comb(k - m, (k - m) // 2)


def krawchouk(n: int, k: int, t: int) -> int:
    """K_k^n(t) = sum_j (-1)^j C(t, j) C(n - t, k - j)."""
    if not (0 <= k <= n and 0 <= t <= n):
        raise ValueError(f"krawchouk indices out of range: n={n}, k={k}, t={t}")
    total = 0
    for j in range(min(k, t) + 1):
        term = comb(t, j) * comb(n - t, k - j)
        total += -term if j % 2 else term
    return total


@lru_cache(maxsize=64)
def krawchouk_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Row m holds K_m^n(0..n)."""
    return tuple(tuple(krawchouk(n, m, t) for t in range(n + 1)) for m in range(n + 1))
