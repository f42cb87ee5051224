"""Certification of |R| <= C(k-1, k/2)^(r/(k-2) + 1) for every even k and r.

The target inequality is compared in the exactified form

    U^(k-2) <= B^(r+k-2),   B = C(k-1, k/2),

where U is some certified upper bound on |R| over all even-weight
subspaces V of F_2^(k-1) with dim V = r.  Comparisons run on log2
enclosures first and fall back to exact integer powers when the
enclosures overlap.
"""

from __future__ import annotations

import bisect
import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable

from .combinatorics import binomial, f_km
from .gf2 import iter_even_subspaces, restricted_pair_count
from .intervals import (
    MAX_PRECISION,
    LogBound,
    ctx,
    default_precision,
    le,
    log2_iv,
    lower,
    precision_ladder,
    upper,
)

METHODS = ("r-zero", "trivial-top", "s-scan", "greedy-weights", "exact-enumeration")
ENUMERATION_K_MAX = 10


@dataclass(frozen=True)
class Policy:
    precision: int = field(default_factory=default_precision)
    max_precision: int = MAX_PRECISION
    exact_fallback: bool = True
    methods: tuple[str, ...] = METHODS
    enumeration_k_max: int = ENUMERATION_K_MAX

    def __post_init__(self):
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")

    def key(self) -> str:
        """Short hash identifying the method set, used to key the cache."""
        blob = json.dumps([list(self.methods), self.enumeration_k_max, self.exact_fallback])
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


@dataclass
class RankCertificate:
    k: int
    r: int
    method: str | None
    decision: str | None
    verified: bool
    s: int | None = None
    counterexample: bool = False
    witness: dict | None = None
    elapsed_ms: float = 0.0

    def to_json(self, timing: bool = True) -> dict:
        out = {
            "k": self.k,
            "r": self.r,
            "method": self.method,
            "decision": self.decision,
            "verified": self.verified,
        }
        if self.s is not None:
            out["s"] = self.s
        if self.counterexample:
            out["counterexample"] = True
        if self.witness is not None:
            out["witness"] = self.witness
        if timing:
            out["elapsed_ms"] = round(self.elapsed_ms, 3)
        return out

    @classmethod
    def from_json(cls, d: dict) -> "RankCertificate":
        return cls(
            k=d["k"],
            r=d["r"],
            method=d.get("method"),
            decision=d.get("decision"),
            verified=d["verified"],
            s=d.get("s"),
            counterexample=d.get("counterexample", False),
            witness=d.get("witness"),
            elapsed_ms=d.get("elapsed_ms", 0.0),
        )


# -- exact building blocks -------------------------------------------------

def check_f_properties(k: int) -> bool:
    return all(f_property_report(k).values())


def f_property_report(k: int) -> dict[str, bool]:
    """Symmetry, strict decrease on [0, k/2], the value at 0, and the interleaved chain."""
    if k % 2 or k < 4:
        raise ValueError(f"k must be even and >= 4, got {k}")
    f = [f_km(k, m) for m in range(k + 1)]
    symmetric = all(f[m] == f[k - m] for m in range(2, k - 1, 2))
    decreasing = all(f[m] > f[m + 2] for m in range(0, k // 2 - 1, 2))
    at_zero = f[0] == binomial(k - 1, k // 2 - 1) == binomial(k - 1, k // 2)
    chain = all(f[m - 2] >= f[k - m] == f[m] for m in range(2, k // 2 + 1, 2))
    return {"symmetry": symmetric, "decreasing": decreasing, "f0": at_zero, "chain": chain}


def _check_s(k: int, s: int) -> None:
    if k % 2 or k < 4:
        raise ValueError(f"k must be even and >= 4, got {k}")
    if s % 2 or not 2 <= s <= k // 2:
        raise ValueError(f"s must be even with 2 <= s <= k/2, got s={s} for k={k}")


def ukrs_lhs(k: int, r: int, s: int) -> int:
    """sum_{m even, m <= s-2} C(k, m) f(k, m) + 2^r f(k, s)."""
    _check_s(k, s)
    if r < 0:
        raise ValueError("r must be nonnegative")
    head = sum(binomial(k, m) * f_km(k, m) for m in range(0, s - 1, 2))
    return head + (f_km(k, s) << r)


class KTables:
    """Per-k precomputation shared by all r."""

    def __init__(self, k: int):
        if k % 2 or k < 4:
            raise ValueError(f"k must be even and >= 4, got {k}")
        self.k = k
        self.B = binomial(k - 1, k // 2)
        self.f = [f_km(k, m) for m in range(k + 1)]
        self.s_max = (k // 2) & ~1
        # head[s] = sum_{m even < s} C(k, m) f(k, m)
        self.head = {}
        acc = 0
        for s in range(0, self.s_max + 1, 2):
            self.head[s] = acc
            acc += binomial(k, s) * self.f[s]
        # greedy levels: weights in decreasing f order (ties by weight)
        levels = sorted(range(0, k - 1, 2), key=lambda m: (-self.f[m], m))
        self.level_f = [self.f[m] for m in levels]
        self.level_m = levels
        self.cum_count = [0]
        self.cum_sum = [0]
        for m in levels:
            c = binomial(k - 1, m)
            self.cum_count.append(self.cum_count[-1] + c)
            self.cum_sum.append(self.cum_sum[-1] + c * self.f[m])
        self._log2B: dict[int, object] = {}

    def log2B(self, prec: int):
        if prec not in self._log2B:
            self._log2B[prec] = log2_iv(self.B, prec)
        return self._log2B[prec]

    def ukrs(self, r: int, s: int) -> int:
        return self.head[s] + (self.f[s] << r)

    def best_s(self, r: int, start: int = 2) -> int:
        """Even s in [start, k/2] minimising ukrs(r, s); the objective is unimodal in s."""
        s = max(2, start)
        while s + 2 <= self.s_max:
            # moving to s+2 adds C(k,s) f(s) and saves 2^r (f(s) - f(s+2))
            if binomial(self.k, s) * self.f[s] >= (self.f[s] - self.f[s + 2]) << r:
                break
            s += 2
        return s

    def greedy(self, r: int) -> int:
        N = 1 << r
        j = bisect.bisect_right(self.cum_count, N) - 1
        G = self.cum_sum[j]
        if j < len(self.level_f) and N > self.cum_count[j]:
            G += (N - self.cum_count[j]) * self.level_f[j]
        return G


@lru_cache(maxsize=8)
def tables(k: int) -> KTables:
    return KTables(k)


def greedy_weight_bound(k: int, r: int) -> int:
    """Max of sum_m a_m f(k, m) with a_0 = 1, a_m <= C(k-1, m), odd a_m = 0, sum a_m = 2^r."""
    if not 0 <= r <= k - 2:
        raise ValueError(f"r must lie in [0, k-2], got {r}")
    return tables(k).greedy(r)


def compare_exactified(U: int, k: int, r: int, policy: Policy | None = None,
                       t: KTables | None = None) -> tuple[bool | None, str | None]:
    """Decide U^(k-2) <= B^(r+k-2).  Returns (verdict, decision mode)."""
    policy = policy or Policy()
    t = t or tables(k)
    B = t.B
    # exact by exponent arithmetic when U is B or B^2
    for j, Bj in ((1, B), (2, B * B)):
        if U == Bj:
            return j * (k - 2) <= r + k - 2, "exact-bigint"
    for prec in precision_ladder(policy.precision, policy.max_precision):
        lhs = log2_iv(U, prec) * (k - 2)
        rhs = t.log2B(prec) * (r + k - 2)
        verdict = le(lhs, rhs)
        if verdict is not None:
            return verdict, "interval"
    if policy.exact_fallback:
        return U ** (k - 2) <= B ** (r + k - 2), "exact-bigint"
    return None, None


def _exhaustive_max(k: int, r: int) -> tuple[int, str]:
    best, arg = -1, ""
    for V in iter_even_subspaces(k - 1, r):
        c = restricted_pair_count(k, V)
        if c > best:
            best, arg = c, ",".join(V.rows())
    return best, arg


def verify_rank_inequality(k: int, r: int, policy: Policy | None = None,
                           s_hint: int = 2) -> RankCertificate:
    """Try the bound menu for one (k, r) cell; the first success wins."""
    policy = policy or Policy()
    if k % 2 or k < 4:
        raise ValueError(f"k must be even and >= 4, got {k}")
    if not 0 <= r <= k - 2:
        raise ValueError(f"r must lie in [0, k-2], got {r}")
    t0 = time.perf_counter()
    t = tables(k)

    def done(**kw) -> RankCertificate:
        return RankCertificate(k=k, r=r, elapsed_ms=(time.perf_counter() - t0) * 1e3, **kw)

    for method in policy.methods:
        if method == "r-zero" and r == 0:
            # only the zero vector: |R| = f(k, 0) = B
            ok, mode = compare_exactified(t.f[0], k, r, policy, t)
            if ok:
                return done(method=method, decision=mode, verified=True)
        elif method == "trivial-top" and r == k - 2:
            ok, mode = compare_exactified(t.B * t.B, k, r, policy, t)
            if ok:
                return done(method=method, decision=mode, verified=True)
        elif method == "s-scan" and t.s_max >= 2:
            s = t.best_s(r, s_hint)
            for cand in (s, s - 2, s + 2):
                if 2 <= cand <= t.s_max:
                    ok, mode = compare_exactified(t.ukrs(r, cand), k, r, policy, t)
                    if ok:
                        return done(method=method, decision=mode, verified=True, s=cand)
        elif method == "greedy-weights":
            ok, mode = compare_exactified(t.greedy(r), k, r, policy, t)
            if ok:
                return done(method=method, decision=mode, verified=True)
        elif method == "exact-enumeration" and k <= policy.enumeration_k_max:
            best, arg = _exhaustive_max(k, r)
            ok, mode = compare_exactified(best, k, r, Policy(exact_fallback=True), t)
            if ok:
                return done(method=method, decision=mode, verified=True,
                            witness={"max_pairs": best, "subspace": arg})
            if ok is False:
                return done(method=method, decision=mode, verified=False, counterexample=True,
                            witness={"max_pairs": best, "subspace": arg})
    return done(method=None, decision=None, verified=False)


def certificate_bound(cert: RankCertificate) -> int | None:
    """The upper bound U on |R| that a certificate compared against the target."""
    t = tables(cert.k)
    if cert.method == "r-zero":
        return t.f[0]
    if cert.method == "trivial-top":
        return t.B * t.B
    if cert.method == "s-scan":
        return t.ukrs(cert.r, cert.s)
    if cert.method == "greedy-weights":
        return t.greedy(cert.r)
    if cert.method == "exact-enumeration":
        return cert.witness["max_pairs"]
    return None


def recheck_exact(cert: RankCertificate) -> bool:
    """Re-decide a certificate with exact integer powers only."""
    U = certificate_bound(cert)
    if U is None:
        return False
    B = tables(cert.k).B
    return U ** (cert.k - 2) <= B ** (cert.r + cert.k - 2)


# -- scans -----------------------------------------------------------------

def certify_k(k: int, policy: Policy | None = None) -> list[RankCertificate]:
    """Certificates for every r in [0, k-2] at one k."""
    policy = policy or Policy()
    out = []
    s_hint = 2
    for r in range(k - 1):
        cert = verify_rank_inequality(k, r, policy, s_hint=s_hint)
        if cert.s is not None:
            s_hint = max(2, cert.s - 2)
        out.append(cert)
    return out


@dataclass(frozen=True)
class MainBoundCertificate:
    k: int
    certified: bool
    certificates: tuple[RankCertificate, ...] = ()
    note: str = ""

    def __bool__(self) -> bool:
        return self.certified


def certify_main_bound(k: int, policy: Policy | None = None,
                       certificates: Iterable[RankCertificate] | None = None) -> MainBoundCertificate:
    """Certified lower bound log2 of the asymptotic subrank >= 1 for the (k/2, k/2) type graph.

    Combined with the trivial upper bound 2 this pins the value at 2.
    """
    if k == 2:
        return MainBoundCertificate(2, True, (), "the (1,1) type graph is itself an induced matching")
    if k % 2 or k < 4:
        raise ValueError(f"k must be even and >= 2, got {k}")
    certs = tuple(certificates) if certificates is not None else tuple(certify_k(k, policy))
    covered = sorted(c.r for c in certs if c.k == k)
    if covered != list(range(k - 1)):
        raise ValueError(f"certificates for k={k} do not cover r = 0..{k - 2}")
    ok = all(c.verified for c in certs)
    return MainBoundCertificate(k, ok, certs)


class CertificateCache:
    """Append-only JSON-lines store keyed by (k, r, policy key)."""

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self.entries: dict[tuple[int, int, str], RankCertificate] = {}
        if self.path.exists():
            for line in self.path.read_text().splitlines():
                line = line.strip()
                if not line:
                    continue
                try:
                    d = json.loads(line)
                except json.JSONDecodeError:
                    # a torn final line from an interrupted run
                    continue
                self.entries[(d["k"], d["r"], d["policy"])] = RankCertificate.from_json(d)

    def lookup_k(self, k: int, policy_key: str) -> list[RankCertificate] | None:
        certs = [self.entries.get((k, r, policy_key)) for r in range(k - 1)]
        if any(c is None for c in certs):
            return None
        return certs

    def append(self, certs: Iterable[RankCertificate], policy_key: str) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        torn = False
        if self.path.exists() and self.path.stat().st_size:
            with self.path.open("rb") as fh:
                fh.seek(-1, os.SEEK_END)
                torn = fh.read(1) != b"\n"
        with self.path.open("a") as fh:
            if torn:
                # start on a fresh line so a torn tail does not swallow the next record
                fh.write("\n")
            for c in certs:
                d = c.to_json(timing=True)
                d["policy"] = policy_key
                fh.write(json.dumps(d, sort_keys=True) + "\n")
                self.entries[(c.k, c.r, policy_key)] = c
            fh.flush()
            os.fsync(fh.fileno())


@dataclass
class ScanReport:
    k_min: int
    k_max: int
    certificates: list[RankCertificate]
    failures: list[RankCertificate]
    counterexamples: list[RankCertificate]
    main_bounds: dict[int, bool]
    elapsed_s: float = 0.0

    @property
    def exit_code(self) -> int:
        if self.counterexamples:
            return 1
        if self.failures:
            return 2
        return 0

    def method_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for c in self.certificates:
            key = c.method or "none"
            counts[key] = counts.get(key, 0) + 1
        return dict(sorted(counts.items()))

    def summary(self) -> dict:
        return {
            "k_min": self.k_min,
            "k_max": self.k_max,
            "cells": len(self.certificates),
            "verified": sum(c.verified for c in self.certificates),
            "failures": [[c.k, c.r] for c in self.failures],
            "counterexamples": [[c.k, c.r] for c in self.counterexamples],
            "methods": self.method_counts(),
            "beyond_s_scan": [[c.k, c.r] for c in self.certificates
                              if c.method in ("greedy-weights", "exact-enumeration")],
            "main_bound_certified": all(self.main_bounds.values()),
            "exit_code": self.exit_code,
        }


def _certify_k_worker(args: tuple[int, Policy]) -> list[RankCertificate]:
    k, policy = args
    return certify_k(k, policy)


def scan_conjecture(k_max: int, jobs: int = 1, cache: str | os.PathLike | None = None,
                    policy: Policy | None = None, k_min: int = 4,
                    progress: Callable[[int, list[RankCertificate]], None] | None = None) -> ScanReport:
    """Certify every (k, r) with k even in [k_min, k_max] and r in [0, k-2]."""
    if k_max < 4 or k_max % 2:
        raise ValueError(f"k_max must be even and >= 4, got {k_max}")
    if k_min < 4 or k_min % 2 or k_min > k_max:
        raise ValueError(f"k_min must be even with 4 <= k_min <= k_max, got {k_min}")
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    policy = policy or Policy()
    pkey = policy.key()
    store = CertificateCache(cache) if cache is not None else None
    t0 = time.perf_counter()

    ks = list(range(k_min, k_max + 1, 2))
    by_k: dict[int, list[RankCertificate]] = {}
    todo = []
    for k in ks:
        hit = store.lookup_k(k, pkey) if store else None
        if hit is not None:
            by_k[k] = hit
        else:
            todo.append(k)

    def collect(k: int, certs: list[RankCertificate]) -> None:
        by_k[k] = certs
        if store:
            store.append(certs, pkey)
        if progress:
            progress(k, certs)

    if jobs == 1 or len(todo) <= 1:
        for k in todo:
            collect(k, certify_k(k, policy))
    else:
        # large k first keeps the pool busy; results are merged by key below
        order = sorted(todo, reverse=True)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for k, certs in zip(order, pool.map(_certify_k_worker, [(k, policy) for k in order])):
                collect(k, certs)

    certs = [c for k in ks for c in sorted(by_k[k], key=lambda c: c.r)]
    main = {k: all(c.verified for c in by_k[k]) for k in ks}
    return ScanReport(
        k_min=k_min,
        k_max=k_max,
        certificates=certs,
        failures=[c for c in certs if not c.verified],
        counterexamples=[c for c in certs if c.counterexample],
        main_bounds=main,
        elapsed_s=time.perf_counter() - t0,
    )


# -- certified real inequalities from the low-dimensional argument ---------

def _decide(build: Callable[[int], tuple[object, object]], start: int | None = None) -> bool | None:
    for prec in precision_ladder(start):
        a, b = build(prec)
        v = le(a, b)
        if v is not None:
            return v
    return None


def small_r_threshold_check(k: int) -> bool | None:
    """Check 2(k-2) ln(1/(1/4 + k/(2(k-1)))) / ln(pi/2 (k+1)) >= k / (2 log2 k).

    None means undecided at the maximum precision.
    """
    if k < 27 or k % 2:
        raise ValueError(f"k must be even and >= 27, got {k}")

    def build(prec):
        c = ctx(prec)
        inner = c.mpf(1) / (c.mpf(1) / 4 + c.mpf(k) / (2 * (k - 1)))
        rhs = 2 * (k - 2) * c.log(inner) / c.log(c.pi / 2 * (k + 1))
        threshold = c.mpf(k) / (2 * c.log(k) / c.log(2))
        return threshold, rhs

    return _decide(build)


@dataclass(frozen=True)
class PowerFloor:
    k: int
    r: int
    floor: LogBound
    holds: bool | None


def binomial_power_floor(k: int, r: int) -> PowerFloor:
    """Certify 2^r (pi(k+1)/2)^(-r/(2(k-2))) <= (2^(k-1)/sqrt(pi(k+1)/2))^(r/(k-2))
    <= C(k-1, k/2-1)^(r/(k-2)) in log2 form.  ``floor`` encloses log2 of the left side."""
    if k % 2 or k < 4:
        raise ValueError(f"k must be even and >= 4, got {k}")
    if r < 0:
        raise ValueError("r must be nonnegative")
    C = binomial(k - 1, k // 2 - 1)
    holds = None
    for prec in precision_ladder():
        c = ctx(prec)
        log2 = c.log(2)
        q = c.mpf(r) / (k - 2)
        L = c.log(c.pi * (k + 1) / 2) / log2
        left = r - q * L / 2
        middle = q * ((k - 1) - L / 2)
        right = q * log2_iv(C, prec)
        if r == 0:
            holds = True
            break
        a, b = le(left, middle), le(middle, right)
        if a is False or b is False:
            holds = False
            break
        if a and b:
            holds = True
            break
    return PowerFloor(k, r, LogBound(lower(left), upper(left), prec), holds)

