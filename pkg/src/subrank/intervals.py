"""Outward-rounded interval helpers on top of mpmath's interval context.

Every comparison here answers True, False or None; None means the
enclosures overlap at the working precision and the caller has to
escalate.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from mpmath.ctx_iv import MPIntervalContext
from mpmath.libmp import mpf_le, mpf_lt

DEFAULT_PRECISION = 192
MAX_PRECISION = 1024


def default_precision() -> int:
    env = os.environ.get("SUBRANK_PRECISION_BITS")
    if env:
        bits = int(env)
        if bits < 53:
            raise ValueError("SUBRANK_PRECISION_BITS must be at least 53")
        return bits
    return DEFAULT_PRECISION


def precision_ladder(start: int | None = None, stop: int = MAX_PRECISION) -> list[int]:
    """Working precisions tried in order: start, doubled, ... capped at stop."""
    p = start or default_precision()
    out = [p]
    while p < stop:
        p = min(2 * p, stop)
        out.append(p)
    return out


@lru_cache(maxsize=None)
def ctx(prec: int) -> MPIntervalContext:
    c = MPIntervalContext()
    c.prec = prec
    return c


def to_fraction(raw) -> Fraction:
    """Exact value of a raw mpmath mpf tuple (an interval endpoint)."""
    sign, man, exp, _ = raw
    if not man:
        return Fraction(0)
    v = Fraction(man << exp) if exp >= 0 else Fraction(man, 1 << -exp)
    return -v if sign else v


def lower(iv) -> Fraction:
    return to_fraction(iv._mpi_[0])


def upper(iv) -> Fraction:
    return to_fraction(iv._mpi_[1])


def le(a, b) -> bool | None:
    """Certified a <= b for two intervals; None when they overlap."""
    (alo, ahi), (blo, bhi) = a._mpi_, b._mpi_
    if mpf_le(ahi, blo):
        return True
    if mpf_lt(bhi, alo):
        return False
    return None


def lt(a, b) -> bool | None:
    (alo, ahi), (blo, bhi) = a._mpi_, b._mpi_
    if mpf_lt(ahi, blo):
        return True
    if mpf_le(bhi, alo):
        return False
    return None


def from_fraction(c: MPIntervalContext, q: Fraction):
    return c.mpf(q.numerator) / c.mpf(q.denominator)


@dataclass(frozen=True)
class LogBound:
    """Enclosure lo <= log2(value) <= hi with dyadic endpoints."""

    lo: Fraction
    hi: Fraction
    precision: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty enclosure")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, y: float | Fraction) -> bool:
        return self.lo <= y <= self.hi

    def scale(self, c: int) -> "LogBound":
        """Enclosure of log2(value^c) for a nonnegative integer c (exact)."""
        if c < 0:
            raise ValueError("scale factor must be nonnegative")
        return LogBound(self.lo * c, self.hi * c, self.precision)

    def __add__(self, other: "LogBound") -> "LogBound":
        return LogBound(self.lo + other.lo, self.hi + other.hi, min(self.precision, other.precision))

    def le(self, other: "LogBound") -> bool | None:
        if self.hi <= other.lo:
            return True
        if self.lo > other.hi:
            return False
        return None

    def to_iv(self, c: MPIntervalContext | None = None):
        c = c or ctx(self.precision)
        return c.mpf([from_fraction(c, self.lo).a, from_fraction(c, self.hi).b])


def log2_iv(x: int, prec: int):
    """Interval enclosure of log2(x) for an integer x >= 1 at precision prec."""
    if x <= 0:
        raise ValueError("log2 needs a positive integer")
    c = ctx(prec)
    b = x.bit_length()
    if x == 1 << (b - 1):
        return c.mpf(b - 1)
    # keep the top prec+8 bits: x lies in [m, m+1] * 2^e
    e = max(0, b - prec - 8)
    m = x >> e
    hi_m = m + 1 if (m << e) != x else m
    t = c.log(c.mpf([m, hi_m])) / c.log(2)
    return t + e


def log2_interval(x: int, precision: int | None = None) -> LogBound:
    """Certified LogBound for log2(x), x >= 1; exact for powers of two."""
    prec = precision or default_precision()
    t = log2_iv(x, prec)
    return LogBound(lower(t), upper(t), prec)


@dataclass(frozen=True)
class CertifiedReal:
    """Enclosure lo <= value <= hi with exact rational endpoints."""

    lo: Fraction
    hi: Fraction
    precision: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty enclosure")

    @classmethod
    def from_iv(cls, iv, precision: int) -> "CertifiedReal":
        return cls(lower(iv), upper(iv), precision)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, y: float | Fraction) -> bool:
        return self.lo <= y <= self.hi

    def __float__(self) -> float:
        return float((self.lo + self.hi) / 2)


def compare_fraction(q: Fraction, x: CertifiedReal, strict: bool = False) -> bool | None:
    """Certified q <= x (or q < x); None when q falls inside the enclosure."""
    if q < x.lo or (not strict and q == x.lo):
        return True
    if q > x.hi or (strict and q == x.hi):
        return False
    return None


def pi(precision: int | None = None) -> CertifiedReal:
    prec = precision or default_precision()
    return CertifiedReal.from_iv(ctx(prec).pi, prec)


def e(precision: int | None = None) -> CertifiedReal:
    prec = precision or default_precision()
    c = ctx(prec)
    return CertifiedReal.from_iv(c.exp(c.mpf(1)), prec)


def ln2(precision: int | None = None) -> CertifiedReal:
    prec = precision or default_precision()
    c = ctx(prec)
    return CertifiedReal.from_iv(c.log(c.mpf(2)), prec)
