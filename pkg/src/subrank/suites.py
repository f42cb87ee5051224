"""Identity and inequality scans that produce uniform report rows.

Every row records the suite, its instance parameters, both sides of the
checked relation, a verdict and the seed that generated the instance.
Verdicts are "holds", "fails", "undecided" or "info"; info rows belong to
exploratory checks and never affect the exit code.
"""

from __future__ import annotations

import json
import random
from fractions import Fraction
from typing import Callable, Iterator

import mpmath

from . import spectral
from .bounds import f_property_report
from .combinatorics import krawchouk
from .gf2 import (
    Gf2Subspace,
    pair_count_coset,
    pair_count_quadratic,
    random_subspace,
    random_subspace_codim,
    subspace_from_ints,
    weight_class,
)
from .intervals import CertifiedReal

SUITES = ("props", "bounds", "sumratio", "kraw", "fourier", "kkl", "lem12")

Row = dict


def verdict(holds: bool | None) -> str:
    return {True: "holds", False: "fails", None: "undecided"}[holds]


def decimal(q: Fraction | int, digits: int = 17) -> str:
    """Decimal rendering of an exact rational; no float overflow for huge values."""
    with mpmath.workprec(96):
        return mpmath.nstr(mpmath.mpf(q.numerator) / q.denominator, digits)


def fmt(x) -> str:
    if isinstance(x, CertifiedReal):
        return f"[{decimal(x.lo)}, {decimal(x.hi)}]"
    if isinstance(x, tuple) and all(isinstance(v, CertifiedReal) for v in x):
        return " ; ".join(fmt(v) for v in x)
    if isinstance(x, Fraction):
        return str(x) if x.denominator < 10**12 and x.numerator < 10**12 else decimal(x)
    if isinstance(x, int) and abs(x) >= 10**30:
        return decimal(Fraction(x))
    return str(x)


def row(suite: str, params: dict, lhs, rhs, holds: bool | None | str, seed=None) -> Row:
    v = holds if isinstance(holds, str) else verdict(holds)
    return {
        "suite": suite,
        "params": json.dumps(params, sort_keys=True, separators=(",", ":")),
        "lhs": fmt(lhs),
        "rhs": fmt(rhs),
        "verdict": v,
        "seed": "" if seed is None else str(seed),
    }


def from_check(res: spectral.CheckResult, suite: str | None = None, seed=None, **extra) -> Row:
    return row(suite or res.name, {**res.params, **extra}, res.lhs, res.rhs, res.holds, seed)


def instance_rng(seed: int, *key) -> random.Random:
    """Per-instance generator derived from the run seed and the instance key."""
    return random.Random(":".join(map(str, (seed, *key))))


# -- individual suites ---------------------------------------------------

def suite_props(k_max: int = 400, **_) -> Iterator[Row]:
    for k in range(4, k_max + 1, 2):
        rep = f_property_report(k)
        failed = [name for name, ok in rep.items() if not ok]
        yield row("props", {"k": k}, ",".join(sorted(rep)), "all hold" if not failed else ",".join(failed),
                  not failed)


def suite_bounds(n_max: int = 500, **_) -> Iterator[Row]:
    for n in range(2, n_max + 1, 2):
        for m in range(0, (n + 1) // 3 + 1):
            if 3 * m > n and (m < 1 or 3 * m > n + 1):
                continue
            res = spectral.binomial_ratio_bounds_report(n, m)
            for which, (lhs, rhs, ok) in sorted(res.detail.items()):
                yield row("bounds", {"n": n, "m": m, "which": which}, lhs, rhs, ok)


def suite_sumratio(k_max: int = 400, robbins_max: int = 300, **_) -> Iterator[Row]:
    for k in range(4, k_max + 1, 2):
        for s in range(2, k // 2 + 1, 2):
            yield from_check(spectral.sumratio_report(k, s))
            info = spectral.sumratio_optimal_constant_report(k, s)
            r = from_check(info)
            r["verdict"] = "info" if info.holds else f"info:{verdict(info.holds)}"
            yield r
    for n in range(1, robbins_max + 1):
        yield from_check(spectral.robbins_report(n))


def suite_kraw(n_max: int = 31, **_) -> Iterator[Row]:
    for n in range(1, n_max + 1, 2):
        for t in range(n + 1):
            closed = spectral.middle_krawchouk_closed(n, t)
            direct = krawchouk(n, (n - 1) // 2, t)
            yield row("kraw", {"n": n, "t": t}, closed, direct, closed == direct)


def brute_pair_count(n: int, V: Gf2Subspace) -> int:
    xs = weight_class(n, (n - 1) // 2)
    return pair_count_quadratic(xs, V) if n <= 11 else pair_count_coset(xs, V)


def suite_fourier(n_max: int = 15, samples: int = 100, seed: int = 0, **_) -> Iterator[Row]:
    for n in range(3, n_max + 1, 2):
        for i in range(samples):
            rng = instance_rng(seed, "fourier", n, i)
            V = random_subspace(n, rng.randint(0, n), rng)
            a, b = spectral.pair_count_fourier(n, V), brute_pair_count(n, V)
            yield row("fourier", {"n": n, "dim": V.dim, "i": i}, a, b, a == b, seed)


def axis_aligned(n: int, d: int) -> Gf2Subspace:
    """Words whose first n-d coordinates vanish."""
    return subspace_from_ints(n, [1 << j for j in range(d)])


def _kkl_rows(V: Gf2Subspace, params: dict, seed) -> Iterator[Row]:
    rep = spectral.kkl_subspace_report(V)
    for r in rep.rows:
        yield row("kkl", {**params, "t": r.params["t"]}, r.lhs, r.rhs, r.holds, seed)


def suite_kkl(n_max: int = 24, samples: int = 10_000, seed: int = 0, **_) -> Iterator[Row]:
    for i in range(samples):
        rng = instance_rng(seed, "kkl", i)
        n = rng.randint(2, n_max)
        V = random_subspace(n, rng.randint(0, n - 2), rng)
        yield from _kkl_rows(V, {"n": n, "c": n - V.dim, "i": i}, seed)
    # the axis-aligned family, where the dual count C(c, t) sits above (c/t)^t
    for n in range(2, n_max + 1):
        for d in range(0, n - 1):
            V = axis_aligned(n, d)
            c = n - d
            yield from _kkl_rows(V, {"n": n, "c": c, "family": "axis"}, None)
            for r in spectral.kkl_subspace_report(V).rows:
                t = r.params["t"]
                count = r.detail["weight_t"]
                lower = Fraction(c, t) ** t
                yield row("kkl-tightness", {"n": n, "c": c, "t": t}, lower, count, lower <= count)


def suite_lem12(n_min: int = 59, n_max: int = 101, samples: int = 100, seed: int = 0, **_) -> Iterator[Row]:
    if n_min % 2 == 0:
        n_min += 1
    for n in range(n_min, n_max + 1, 2):
        for c in range(2, n // 12 + 1):
            yield from_check(spectral.lemma2_instance_report(n, c))
            for i in range(samples):
                rng = instance_rng(seed, "lem1", n, c, i)
                V = random_subspace_codim(n, c, rng)
                yield from_check(spectral.lemma1_instance_report(n, V), "lem1", seed, i=i)


SUITE_FUNCS: dict[str, Callable[..., Iterator[Row]]] = {
    "props": suite_props,
    "bounds": suite_bounds,
    "sumratio": suite_sumratio,
    "kraw": suite_kraw,
    "fourier": suite_fourier,
    "kkl": suite_kkl,
    "lem12": suite_lem12,
}


def run_suite(name: str, **params) -> list[Row]:
    if name not in SUITE_FUNCS:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return list(SUITE_FUNCS[name](**params))


def exit_code(rows: list[Row]) -> int:
    verdicts = {r["verdict"] for r in rows}
    if "fails" in verdicts:
        return 1
    if "undecided" in verdicts:
        return 2
    return 0


def summarize(rows: list[Row]) -> dict:
    counts: dict[str, int] = {}
    for r in rows:
        counts[r["verdict"]] = counts.get(r["verdict"], 0) + 1
    return {"rows": len(rows), "verdicts": dict(sorted(counts.items())), "exit_code": exit_code(rows)}
