"""Fourier analysis on {0,1}^n and the inequalities behind the
high-dimensional case: Walsh transform, middle Krawchouk values, the
KKL-derived bound on light dual vectors, the Fourier form of the pair
count, and instance checks of the auxiliary binomial and analytic bounds.

Checks come in two flavours: ``*_report`` returns a :class:`CheckResult`
with both sides, and the plain function returns ``True`` only when the
inequality is certified.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Callable, Sequence

import numpy as np

from . import intervals
from .combinatorics import krawchouk, krawchouk_table
from .gf2 import (
    DEFAULT_ENUMERATION_LIMIT,
    EnumerationLimitError,
    Gf2Subspace,
    dual_weight_distribution,
    iter_elements,
    orthogonal_complement,
    weight_distribution,
)
from .intervals import CertifiedReal, compare_fraction, ctx, precision_ladder

__all__ = [
    "CheckResult",
    "walsh_transform",
    "convolution_identity_check",
    "krawchouk",
    "middle_krawchouk_closed",
    "subspace_indicator_hat",
    "kkl_subspace_check",
    "kkl_subspace_report",
    "pair_count_fourier",
    "f_nc",
    "lemma1_lhs",
    "lemma1_instance_check",
    "lemma1_instance_report",
    "lemma2_instance_check",
    "lemma2_instance_report",
    "binomial_ratio_bounds_check",
    "binomial_ratio_bounds_report",
    "sumratio_lhs",
    "sumratio_check",
    "sumratio_report",
    "sumratio_optimal_constant_report",
    "robbins_check",
    "robbins_report",
]


@dataclass(frozen=True)
class CheckResult:
    """One certified inequality instance lhs <= rhs.

    ``holds`` is True or False when decided and None when the enclosures
    still overlapped at the highest precision tried.
    """

    name: str
    params: dict
    holds: bool | None
    lhs: object
    rhs: object
    precision: int | None = None
    detail: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.holds is True


def _escalate(step: Callable[[int], CheckResult]) -> CheckResult:
    res = None
    for prec in precision_ladder():
        res = step(prec)
        if res.holds is not None:
            return res
    return res


def _fmt(x) -> str:
    if isinstance(x, CertifiedReal):
        return f"[{float(x.lo):.17g}, {float(x.hi):.17g}]"
    if isinstance(x, Fraction):
        return str(x) if x.denominator < 10**12 else f"{float(x):.17g}"
    return str(x)


# -- Walsh transform -----------------------------------------------------

def _is_exact(a: np.ndarray) -> bool:
    if a.dtype.kind in "iub":
        return True
    if a.dtype == object:
        return all(isinstance(v, (int, Fraction)) for v in a.flat)
    return False


def _num_vars(size: int) -> int:
    n = size.bit_length() - 1
    if size < 1 or 1 << n != size:
        raise ValueError(f"table length {size} is not a power of two")
    return n


def _butterfly(a: np.ndarray) -> np.ndarray:
    """Unnormalised transform sum_x a(x) (-1)^(z.x)."""
    a = a.copy()
    h = 1
    while h < len(a):
        b = a.reshape(-1, 2, h)
        lo, hi = b[:, 0, :].copy(), b[:, 1, :].copy()
        b[:, 0, :] = lo + hi
        b[:, 1, :] = lo - hi
        h *= 2
    return a


def walsh_transform(f: Sequence) -> np.ndarray:
    """f^(z) = 2^-n sum_x f(x) (-1)^(z.x) by the fast butterfly.

    Integer or rational tables are transformed exactly (object array of
    Fractions); float tables in float64.
    """
    a = np.asarray(f)
    n = _num_vars(len(a))
    if _is_exact(a):
        W = _butterfly(np.array([Fraction(v) for v in a.flat], dtype=object))
        return W / (1 << n)
    return _butterfly(a.astype(float)) / (1 << n)


def convolution_identity_check(f: Sequence, g: Sequence, rtol: float = 1e-9) -> bool:
    """sum_{x,y} f(x) f(y) g(x+y) == 2^(2n) sum_z f^(z)^2 g^(z)."""
    fa, ga = np.asarray(f), np.asarray(g)
    if len(fa) != len(ga):
        raise ValueError("tables have different lengths")
    n = _num_vars(len(fa))
    idx = np.arange(len(fa))
    if _is_exact(fa) and _is_exact(ga):
        fo = np.array([Fraction(v) for v in fa.flat], dtype=object)
        go = np.array([Fraction(v) for v in ga.flat], dtype=object)
        lhs = sum((fo[x] * np.dot(fo, go[idx ^ x]) for x in range(len(fo)) if fo[x]), Fraction(0))
        Wf, Wg = _butterfly(fo), _butterfly(go)
        # 2^(2n) sum (Wf/2^n)^2 (Wg/2^n) = sum Wf^2 Wg / 2^n
        rhs = Fraction(sum(Wf * Wf * Wg), 1 << n)
        return lhs == rhs
    fo, go = fa.astype(float), ga.astype(float)
    lhs = float(sum(fo[x] * np.dot(fo, go[idx ^ x]) for x in range(len(fo))))
    fh, gh = walsh_transform(fo), walsh_transform(go)
    rhs = float(4**n * np.sum(fh * fh * gh))
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return abs(lhs - rhs) <= rtol * scale


def subspace_indicator_hat(V: Gf2Subspace, enumeration_limit: int = DEFAULT_ENUMERATION_LIMIT) -> dict[int, Fraction]:
    """Nonzero Fourier coefficients of the indicator of V: 1/|V^perp| on V^perp."""
    D = orthogonal_complement(V)
    if D.size > enumeration_limit:
        raise EnumerationLimitError(f"dual has {D.size} elements, limit {enumeration_limit}")
    val = Fraction(1, D.size)
    return {z: val for z in iter_elements(D)}


def indicator_table(V: Gf2Subspace) -> np.ndarray:
    """Dense 0/1 table of V indexed by the integer encoding of words."""
    t = np.zeros(1 << V.n, dtype=np.int64)
    for x in iter_elements(V):
        t[x] = 1
    return t


# -- Krawchouk -----------------------------------------------------------

def middle_krawchouk_closed(n: int, t: int) -> int:
    """(-1)^floor(t/2) C(n,(n-1)/2) C((n-1)/2, floor(t/2)) / C(n,t) for odd n."""
    if n % 2 == 0 or n < 1:
        raise ValueError(f"n must be odd and positive, got {n}")
    if not 0 <= t <= n:
        raise ValueError(f"t={t} outside [0, {n}]")
    h = (n - 1) // 2
    num = comb(n, h) * comb(h, t // 2)
    q, r = divmod(num, comb(n, t))
    if r:
        raise ArithmeticError(f"closed form is not an integer at n={n}, t={t}")
    return -q if (t // 2) % 2 else q


# -- KKL corollary -------------------------------------------------------

def _t_max(c: int) -> int:
    """floor(ln(2) c); ln(2) c is irrational for c >= 1 so this always decides."""
    for prec in precision_ladder():
        x = intervals.ln2(prec)
        lo, hi = x.lo * c, x.hi * c
        if int(lo) == int(hi):
            return int(lo)
    raise ArithmeticError("could not decide floor(ln 2 c)")


def _kkl_rhs(c: int, t: int, prec: int) -> CertifiedReal:
    C = ctx(prec)
    base = 2 * C.e * C.log(2) * c / t
    return CertifiedReal.from_iv(base**t, prec)


@dataclass(frozen=True)
class KklReport:
    n: int
    c: int
    rows: tuple[CheckResult, ...]

    @property
    def holds(self) -> bool | None:
        vals = [r.holds for r in self.rows]
        if any(v is False for v in vals):
            return False
        if any(v is None for v in vals):
            return None
        return True

    def __bool__(self) -> bool:
        return self.holds is True


def kkl_subspace_report(V: Gf2Subspace) -> KklReport:
    """|(V^perp)_t| and |(V^perp)_(n-t)| against (2 e ln2 c / t)^t for 1 <= t <= ln2 c."""
    n = V.n
    c = n - V.dim
    if c < 2:
        raise ValueError(f"codimension must be at least 2, got {c}")
    wd = dual_weight_distribution(V)
    rows = []
    for t in range(1, _t_max(c) + 1):
        low, high = wd[t], wd[n - t]

        def step(prec, t=t, low=low, high=high):
            rhs = _kkl_rhs(c, t, prec)
            a = compare_fraction(Fraction(low), rhs)
            b = compare_fraction(Fraction(high), rhs)
            holds = False if False in (a, b) else (None if None in (a, b) else True)
            return CheckResult("kkl", {"n": n, "c": c, "t": t}, holds, max(low, high), rhs, prec,
                               {"weight_t": low, "weight_n_minus_t": high})

        rows.append(_escalate(step))
    return KklReport(n, c, tuple(rows))


def kkl_subspace_check(V: Gf2Subspace) -> bool:
    return bool(kkl_subspace_report(V))


# -- Fourier form of the pair count --------------------------------------

def pair_count_fourier(n: int, V: Gf2Subspace, enumeration_limit: int = DEFAULT_ENUMERATION_LIMIT) -> int:
    """#{(x, y): |x| = |y| = (n-1)/2, x + y in V} as |V|/2^n sum_t K(t)^2 |(V^perp)_t|.

    The dual weight distribution is obtained by enumerating V^perp.
    """
    if n % 2 == 0:
        raise ValueError(f"n must be odd, got {n}")
    if V.n != n:
        raise ValueError(f"subspace lives in F_2^{V.n}, expected {n}")
    D = orthogonal_complement(V)
    wd = weight_distribution(D, enumeration_limit)
    K = krawchouk_table(n)[(n - 1) // 2]
    total = sum(K[t] ** 2 * wd[t] for t in range(n + 1))
    c = D.dim  # |V| / 2^n = 2^-c
    q, r = divmod(total, 1 << c)
    if r:
        raise ArithmeticError("Fourier pair count is not an integer")
    return q


# -- auxiliary function f(n, c) and the two lemmas -----------------------

def _check_nc(n: int, c: int) -> None:
    if n % 2 == 0:
        raise ValueError(f"n must be odd, got {n}")
    if c < 2 or 12 * c > n:
        raise ValueError(f"need 2 <= c <= n/12, got n={n}, c={c}")


def _f_nc_iv(n: int, c: int, prec: int):
    C = ctx(prec)
    ln2 = C.log(2)
    base = C.e * ln2 * c / n
    return C.mpf(16 * c * c) / (n * n) + C.exp(ln2 * c * C.log(base))


def f_nc(n: int, c: int, precision: int | None = None) -> CertifiedReal:
    """16 c^2 / n^2 + (e ln2 c / n)^(ln2 c)."""
    if n < 1 or c < 2:
        raise ValueError(f"need n >= 1 and c >= 2, got n={n}, c={c}")
    prec = precision or intervals.default_precision()
    return CertifiedReal.from_iv(_f_nc_iv(n, c, prec), prec)


def lemma1_lhs(n: int, V: Gf2Subspace) -> Fraction:
    """sum_{1<=t<=n-1} C((n-1)/2, floor(t/2))^2 / C(n,t)^2 |(V^perp)_t|, exactly."""
    h = (n - 1) // 2
    wd = weight_distribution(orthogonal_complement(V))
    return sum((Fraction(comb(h, t // 2) ** 2 * wd[t], comb(n, t) ** 2)
                for t in range(1, n) if wd[t]), Fraction(0))


def lemma1_instance_report(n: int, V: Gf2Subspace) -> CheckResult:
    if V.n != n:
        raise ValueError(f"subspace lives in F_2^{V.n}, expected {n}")
    c = n - V.dim
    _check_nc(n, c)
    lhs = lemma1_lhs(n, V)

    def step(prec):
        rhs = f_nc(n, c, prec)
        return CheckResult("lem1", {"n": n, "c": c}, compare_fraction(lhs, rhs), lhs, rhs, prec)

    return _escalate(step)


def lemma1_instance_check(n: int, V: Gf2Subspace) -> bool:
    return bool(lemma1_instance_report(n, V))


def lemma2_instance_report(n: int, c: int) -> CheckResult:
    """2 + f(n,c) <= 2^c C(n,(n-1)/2)^((1-c)/(n-1)).

    Raised to the power n-1 this is (2 + f)^(n-1) C^(c-1) <= 2^(c(n-1)),
    decided exactly with f replaced by the endpoints of its enclosure.
    """
    if n < 59:
        raise ValueError(f"need n >= 59, got {n}")
    _check_nc(n, c)
    C = comb(n, (n - 1) // 2)
    target = 1 << (c * (n - 1))

    def step(prec):
        f = f_nc(n, c, prec)
        if (2 + f.hi) ** (n - 1) * C ** (c - 1) <= target:
            holds = True
        elif (2 + f.lo) ** (n - 1) * C ** (c - 1) > target:
            holds = False
        else:
            holds = None
        rhs = CertifiedReal.from_iv(
            ctx(prec).mpf(2) ** c * ctx(prec).mpf(C) ** (ctx(prec).mpf(1 - c) / (n - 1)), prec)
        lhs = CertifiedReal(2 + f.lo, 2 + f.hi, prec)
        return CheckResult("lem2", {"n": n, "c": c}, holds, lhs, rhs, prec)

    return _escalate(step)


def lemma2_instance_check(n: int, c: int) -> bool:
    return bool(lemma2_instance_report(n, c))


# -- binomial ratio bounds -----------------------------------------------

def binomial_ratio_bounds_report(n: int, m: int) -> CheckResult:
    """Both rational inequalities at (n, m), each only where its range applies.

    first:  C(n/2,m)/C(n+1,2m+1) <= 2((2m+1)/(2(n-m+1)))^(m+1)  for 0 <= m <= n/3
    second: C(n/2,m)/C(n+1,2m)   <= (m/(n-m+1))^m               for 1 <= m <= (n+1)/3
    """
    if n % 2:
        raise ValueError(f"n must be even, got {n}")
    first_ok = 0 <= m and 3 * m <= n
    second_ok = 1 <= m and 3 * m <= n + 1
    if not (first_ok or second_ok):
        raise ValueError(f"m={m} is outside both ranges for n={n}")
    detail = {}
    if first_ok:
        l1 = Fraction(comb(n // 2, m), comb(n + 1, 2 * m + 1))
        r1 = 2 * Fraction(2 * m + 1, 2 * (n - m + 1)) ** (m + 1)
        detail["first"] = (l1, r1, l1 <= r1)
    if second_ok:
        l2 = Fraction(comb(n // 2, m), comb(n + 1, 2 * m))
        r2 = Fraction(m, n - m + 1) ** m
        detail["second"] = (l2, r2, l2 <= r2)
    holds = all(v[2] for v in detail.values())
    key = "first" if first_ok else "second"
    return CheckResult("bounds", {"n": n, "m": m}, holds, detail[key][0], detail[key][1], None, detail)


def binomial_ratio_bounds_check(n: int, m: int) -> bool:
    return bool(binomial_ratio_bounds_report(n, m))


# -- ratio of partial sums -----------------------------------------------

def _check_ks(k: int, s: int) -> None:
    if k % 2 or s % 2 or s < 2 or 2 * s > k:
        raise ValueError(f"need even k and even s with 2 <= s <= k/2, got k={k}, s={s}")


def sumratio_lhs(k: int, s: int) -> Fraction:
    """sum_{m even <= s} C(k/2, m/2)^2 / sum_{m even <= s} C(k, m)."""
    _check_ks(k, s)
    num = sum(comb(k // 2, m // 2) ** 2 for m in range(0, s + 1, 2))
    den = sum(comb(k, m) for m in range(0, s + 1, 2))
    return Fraction(num, den)


def _sumratio(k: int, s: int, const_sq_times_pi: int, name: str) -> CheckResult:
    # lhs <= a / sqrt(pi) sqrt(k / (s(k-s)))  <=>  lhs^2 s (k-s) pi <= a^2 k
    lhs = sumratio_lhs(k, s)
    q = lhs * lhs * s * (k - s)
    bound = Fraction(const_sq_times_pi * k)

    def step(prec):
        p = intervals.pi(prec)
        prod = CertifiedReal(q * p.lo, q * p.hi, prec)
        if prod.hi <= bound:
            holds = True
        elif prod.lo > bound:
            holds = False
        else:
            holds = None
        return CheckResult(name, {"k": k, "s": s}, holds, prod, bound, prec, {"ratio": lhs})

    return _escalate(step)


def sumratio_report(k: int, s: int) -> CheckResult:
    """Ratio of partial sums against (4/sqrt(pi)) sqrt(k/(s(k-s)))."""
    _check_ks(k, s)
    return _sumratio(k, s, 16, "sumratio")


def sumratio_check(k: int, s: int) -> bool:
    return bool(sumratio_report(k, s))


def sumratio_optimal_constant_report(k: int, s: int) -> CheckResult:
    """The same ratio against sqrt(2/pi) sqrt(k/(s(k-s))); informational only."""
    _check_ks(k, s)
    # (sqrt(2/pi))^2 pi = 2
    return _sumratio(k, s, 2, "sumratio-sqrt2/pi")


# -- Robbins' Stirling bounds --------------------------------------------

def robbins_report(n: int) -> CheckResult:
    """sqrt(2 pi n)(n/e)^n e^(1/(12n+1)) < n! < sqrt(2 pi n)(n/e)^n e^(1/(12n)), in log space."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    nf = factorial(n)

    def step(prec):
        C = ctx(prec)
        base = C.log(2 * C.pi * n) / 2 + n * C.log(C.mpf(n)) - n
        lo = base + C.mpf(1) / (12 * n + 1)
        hi = base + C.mpf(1) / (12 * n)
        mid = C.log(C.mpf(nf))
        a, b = intervals.lt(lo, mid), intervals.lt(mid, hi)
        holds = False if False in (a, b) else (None if None in (a, b) else True)
        bounds = (CertifiedReal.from_iv(C.exp(lo), prec), CertifiedReal.from_iv(C.exp(hi), prec))
        return CheckResult("robbins", {"n": n}, holds, nf, bounds, prec)

    return _escalate(step)


def robbins_check(n: int) -> bool:
    return bool(robbins_report(n))
