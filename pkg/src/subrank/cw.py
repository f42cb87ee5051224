"""Ingredients of the higher-order Coppersmith-Winograd lower bound.

Tightness certificates (alpha maps), ranks of difference sets over Q and
F_2, the reduction of a pair set on balanced words to one on words of
length k-1, maximum-entropy fitting with prescribed marginals, and the
k = 3 maximin entropy value.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb, log2
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import intervals
from .gf2 import _rref
from .hypergraph import Edge, KGraph, Partition

IPF_MAX_ITER = 10**5
IPF_TOL = 1e-10
GRID_RESOLUTION = 200
GRID_MAX_POINTS = 200_000


@dataclass(frozen=True)
class EntropyValue:
    """An entropy in bits.  ``lower`` is a certified lower endpoint when known."""

    value: float
    precision: int | str = "float64"
    lower: Fraction | None = None

    def __float__(self) -> float:
        return self.value


# -- alpha maps --------------------------------------------------------------

@dataclass(frozen=True)
class AlphaMaps:
    """One integer lookup table per coordinate, keyed by vertex."""

    maps: tuple[Mapping[int, int], ...]

    @property
    def order(self) -> int:
        return len(self.maps)

    def injective(self) -> bool:
        return all(len(set(m.values())) == len(m) for m in self.maps)

    def apply(self, e: Sequence[int]) -> tuple[int, ...]:
        return tuple(m[a] for m, a in zip(self.maps, e))

    def to_text(self) -> str:
        lines = []
        for i, m in enumerate(self.maps, 1):
            pairs = ", ".join(f"{v}->{m[v]}" for v in sorted(m))
            lines.append(f"{i}: {pairs}")
        return "\n".join(lines) + "\n"


def alpha_for_type_graph(lam: Partition | Sequence[int]) -> AlphaMaps:
    """Identity on the first k-1 coordinates, x -> x - sum_j j lam_j on the last."""
    if not isinstance(lam, Partition):
        lam = Partition(tuple(lam))
    n, k = len(lam), lam.k
    shift = sum(j * p for j, p in enumerate(lam.parts, 1))
    ident = {v: v for v in range(1, n + 1)}
    last = {v: v - shift for v in range(1, n + 1)}
    return AlphaMaps(tuple([ident] * (k - 1) + [last]))


def check_tightness(phi: KGraph, alpha: AlphaMaps) -> bool:
    if alpha.order != phi.order:
        raise ValueError(f"alpha has {alpha.order} maps for a {phi.order}-graph")
    for m, n in zip(alpha.maps, phi.sizes):
        missing = [v for v in range(1, n + 1) if v not in m]
        if missing:
            raise ValueError(f"alpha map does not cover vertices {missing}")
    if not alpha.injective():
        return False
    return all(sum(alpha.apply(e)) == 0 for e in phi.edges)


_ARROW = re.compile(r"\s*(-?\d+)\s*(?:->|→)\s*(-?\d+)\s*")


def parse_alpha(text: str) -> AlphaMaps:
    """Lines "i: v->a, v->a, ..." (the unicode arrow is accepted too)."""
    maps: dict[int, dict[int, int]] = {}
    for raw in text.splitlines():
        line = raw.split("#")[0].strip()
        if not line:
            continue
        head, sep, body = line.partition(":")
        if not sep:
            raise ValueError(f"missing ':' in alpha line {raw!r}")
        i = int(head)
        table = maps.setdefault(i, {})
        for item in filter(None, (t.strip() for t in body.replace(";", ",").split(","))):
            m = _ARROW.fullmatch(item)
            if not m:
                raise ValueError(f"cannot parse alpha entry {item!r}")
            v, a = int(m.group(1)), int(m.group(2))
            if v in table and table[v] != a:
                raise ValueError(f"conflicting values for vertex {v} in map {i}")
            table[v] = a
    if not maps or sorted(maps) != list(range(1, len(maps) + 1)):
        raise ValueError(f"alpha maps must be numbered 1..k, got {sorted(maps)}")
    return AlphaMaps(tuple(maps[i] for i in range(1, len(maps) + 1)))


# -- pair sets and ranks -----------------------------------------------------

@dataclass(frozen=True)
class PairSet:
    """Ordered edge pairs sharing a constant coordinate (1-based ``coordinate``).

    ``coordinate=0`` picks the first shared coordinate; ``None`` drops the
    requirement, as for the reduced sets on words of length k-1.
    """

    pairs: tuple[tuple[Edge, Edge], ...]
    coordinate: int | None = field(default=0)

    def __post_init__(self):
        pairs = tuple((tuple(x), tuple(y)) for x, y in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if not pairs:
            raise ValueError("pair set is empty")
        k = len(pairs[0][0])
        if any(len(x) != k or len(y) != k for x, y in pairs):
            raise ValueError("pairs have inconsistent length")
        if all(x == y for x, y in pairs):
            raise ValueError("pair set lies on the diagonal")
        if self.coordinate is None:
            return
        const = [i + 1 for i in range(k) if all(x[i] == y[i] for x, y in pairs)]
        if not const:
            raise ValueError("no coordinate is shared by every pair")
        if self.coordinate == 0:
            object.__setattr__(self, "coordinate", const[0])
        elif self.coordinate not in const:
            raise ValueError(f"coordinate {self.coordinate} is not constant across pairs")

    @property
    def k(self) -> int:
        return len(self.pairs[0][0])

    def __len__(self) -> int:
        return len(self.pairs)


def integer_rank(rows: Iterable[Sequence[int]]) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination."""
    M = [list(r) for r in rows]
    if not M:
        return 0
    ncols = len(M[0])
    rank, prev = 0, 1
    for col in range(ncols):
        piv = next((i for i in range(rank, len(M)) if M[i][col]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        p = M[rank][col]
        for i in range(rank + 1, len(M)):
            a = M[i][col]
            M[i] = [(p * M[i][j] - a * M[rank][j]) // prev for j in range(ncols)]
        prev = p
        rank += 1
        if rank == len(M):
            break
    return rank


def difference_rows(R: PairSet, alpha: AlphaMaps | None = None) -> list[tuple[int, ...]]:
    if alpha is None:
        return [tuple(a - b for a, b in zip(x, y)) for x, y in R.pairs]
    return [tuple(a - b for a, b in zip(alpha.apply(x), alpha.apply(y))) for x, y in R.pairs]


def rank_Q(R: PairSet, alpha: AlphaMaps | None = None) -> int:
    return integer_rank(difference_rows(R, alpha))


def rank_F2(R: PairSet) -> int:
    k = R.k
    ints = []
    for row in difference_rows(R):
        v = 0
        for d in row:
            v = (v << 1) | (d & 1)
        ints.append(v)
    return len(_rref(ints, k))


def balanced_pairs_to_bits(R: PairSet) -> PairSet:
    """Map letters {1, 2} of Phi_(k/2,k/2) to bits {0, 1}; bit words pass through."""
    letters = {a for x, y in R.pairs for a in x + y}
    if letters <= {0, 1}:
        return R
    if letters <= {1, 2}:
        return PairSet(tuple((tuple(a - 1 for a in x), tuple(a - 1 for a in y)) for x, y in R.pairs),
                       R.coordinate)
    raise ValueError(f"pairs are not over a two-letter alphabet: {sorted(letters)}")


def reduce_R_to_Rprime(R: PairSet) -> PairSet:
    """Drop the shared coordinate; complement pairs whose shared bit is 0.

    Input pairs are balanced 0/1 words of even length k (letters 1/2 are
    converted).  The output lives on weight k/2 - 1 words of length k - 1.
    Both |R| <= 2|R'| and equality of F_2-ranks are checked before returning.
    """
    R = balanced_pairs_to_bits(R)
    k, c = R.k, R.coordinate - 1
    if k % 2 or any(sum(x) != k // 2 or sum(y) != k // 2 for x, y in R.pairs):
        raise ValueError("pairs must consist of balanced words of even length")
    out: dict[tuple[Edge, Edge], None] = {}
    for x, y in R.pairs:
        xs, ys = x[:c] + x[c + 1:], y[:c] + y[c + 1:]
        if x[c] == 0:
            xs, ys = tuple(1 - a for a in xs), tuple(1 - a for a in ys)
        out[(xs, ys)] = None
    pairs = tuple(out)
    if all(x == y for x, y in pairs):
        raise ValueError("reduction collapsed onto the diagonal")
    Rp = PairSet(pairs, None)
    if len(R) > 2 * len(Rp):
        raise AssertionError(f"|R| = {len(R)} exceeds 2|R'| = {2 * len(Rp)}")
    if rank_F2(R) != rank_F2(Rp):
        raise AssertionError("F_2-rank changed under the reduction")
    return Rp


# -- entropy -----------------------------------------------------------------

def entropy_bits(p: Iterable[float]) -> float:
    """Shannon entropy in bits with 0 log 0 = 0."""
    arr = np.asarray(list(p), dtype=float)
    arr = arr[arr > 0]
    return float(-(arr * np.log2(arr)).sum())


def entropy_interval(p: Sequence[Fraction], precision: int | None = None) -> tuple[Fraction, Fraction]:
    """Certified enclosure of H(p) for exact rational probabilities."""
    prec = precision or intervals.default_precision()
    c = intervals.ctx(prec)
    total = c.mpf(0)
    for q in p:
        if q < 0:
            raise ValueError("negative probability")
        q = Fraction(q)
        if q == 0:
            continue
        if q.numerator == 1 and q.denominator & (q.denominator - 1) == 0:
            # -q log2 q is exactly rational for dyadic q = 2^-j
            total += c.mpf(q.denominator.bit_length() - 1) / q.denominator
            continue
        x = intervals.from_fraction(c, q)
        total -= x * c.log(x) / c.log(2)
    return intervals.lower(total), intervals.upper(total)


def conjectured_value(lam: Partition | Sequence[int]) -> EntropyValue:
    """H(lam/k) in bits."""
    if not isinstance(lam, Partition):
        lam = Partition(tuple(lam))
    k = lam.k
    probs = [Fraction(p, k) for p in lam.parts]
    lo, hi = entropy_interval(probs)
    return EntropyValue(float((lo + hi) / 2), intervals.default_precision(), lo)


@dataclass(frozen=True)
class MaxEntResult:
    entropy: EntropyValue
    distribution: np.ndarray
    residual: float
    iterations: int
    converged: bool


def _coordinate_blocks(R: PairSet) -> list[np.ndarray]:
    """For each of the 2k marginals, the vertex label of every pair."""
    k = R.k
    cols = [[x[i] for x, _ in R.pairs] for i in range(k)]
    cols += [[y[i] for _, y in R.pairs] for i in range(k)]
    return [np.asarray(c) for c in cols]


def max_entropy_with_marginals(R: PairSet, targets: Sequence[Mapping[int, float]],
                               iters: int = IPF_MAX_ITER, tol: float = IPF_TOL) -> MaxEntResult:
    """Iterative proportional fitting from the uniform distribution on R.

    ``targets`` holds 2k marginal distributions: the k coordinates of x
    followed by the k coordinates of y.  The limit is the maximum-entropy
    distribution on R with those marginals when it exists; otherwise the
    result is flagged non-converged with its final residual.
    """
    blocks = _coordinate_blocks(R)
    if len(targets) != len(blocks):
        raise ValueError(f"expected {len(blocks)} marginal targets, got {len(targets)}")
    for t in targets:
        if abs(sum(t.values()) - 1) > 1e-12 or any(v < 0 for v in t.values()):
            raise ValueError("each target must be a probability distribution")
    q = np.full(len(R), 1.0 / len(R))
    idx = []
    for labels, t in zip(blocks, targets):
        verts = sorted(set(labels.tolist()) | set(t))
        pos = {v: j for j, v in enumerate(verts)}
        inv = np.array([pos[v] for v in labels.tolist()])
        want = np.array([t.get(v, 0.0) for v in verts])
        idx.append((inv, want))

    def residual() -> float:
        return max(float(np.abs(np.bincount(inv, q, len(want)) - want).max()) for inv, want in idx)

    it, res = 0, residual()
    while res >= tol and it < iters:
        for inv, want in idx:
            cur = np.bincount(inv, q, len(want))
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(cur > 0, want / cur, 0.0)
            q = q * ratio[inv]
        s = q.sum()
        if s <= 0:
            break
        q /= s
        it += 1
        res = residual()
    H = entropy_bits(q)
    if H > log2(len(R)) + 1e-9:
        raise AssertionError(f"entropy {H} exceeds log2|R| = {log2(len(R))}")
    return MaxEntResult(EntropyValue(H), q, res, it, res < tol)


# -- k = 3 maximin -----------------------------------------------------------

@dataclass(frozen=True)
class Cw3Result:
    value: EntropyValue
    distribution: tuple[Fraction, ...]
    grid_resolution: int


def _marginal_matrices(phi: KGraph) -> list[np.ndarray]:
    mats = []
    for i, n in enumerate(phi.sizes):
        M = np.zeros((n, len(phi)))
        for j, e in enumerate(phi.edges):
            M[e[i] - 1, j] = 1.0
        mats.append(M)
    return mats


def _minH(P: np.ndarray, mats: list[np.ndarray]) -> np.ndarray:
    """min_i H(P_i) for each row of P."""
    out = None
    for M in mats:
        marg = P @ M.T
        with np.errstate(divide="ignore", invalid="ignore"):
            h = -np.where(marg > 0, marg * np.log2(marg), 0.0).sum(axis=1)
        out = h if out is None else np.minimum(out, h)
    return out


def grid_resolution(n_edges: int, cap: int = GRID_MAX_POINTS, finest: int = GRID_RESOLUTION) -> int:
    """Largest N <= finest whose simplex grid has at most cap points."""
    N = finest
    while N > 1 and comb(N + n_edges - 1, n_edges - 1) > cap:
        N -= 1
    return N


def _simplex_grid(E: int, N: int) -> np.ndarray:
    pts = []
    for bars in combinations(range(N + E - 1), E - 1):
        prev, row = -1, []
        for b in bars:
            row.append(b - prev - 1)
            prev = b
        row.append(N + E - 2 - prev)
        pts.append(row)
    return np.asarray(pts, dtype=float) / N


def project_simplex(v: np.ndarray) -> np.ndarray:
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    rho = np.nonzero(u * np.arange(1, len(v) + 1) > css - 1)[0][-1]
    theta = (css[rho] - 1) / (rho + 1)
    return np.maximum(v - theta, 0.0)


def _best_rational(P: np.ndarray, mats: list[np.ndarray]) -> list[Fraction]:
    # snapping to small denominators recovers symmetric optima exactly
    best, best_val = None, -1.0
    for d in (6, 12, 60, 420, 2520, 10**4, 10**6, 10**12):
        q = [Fraction(float(p)).limit_denominator(d) for p in P]
        total = sum(q)
        if total == 0:
            continue
        q = [x / total for x in q]
        val = float(_minH(np.array([[float(x) for x in q]]), mats)[0])
        if val > best_val + 1e-13:
            best, best_val = q, val
    return best


def cw3_lower_bound(phi: KGraph, alpha: AlphaMaps, steps: int = 2000) -> Cw3Result:
    """max over edge distributions P of min_i H(P_i) for a tight 3-graph.

    The returned value is certified from below: it is the interval lower
    endpoint of min_i H(P_i) at the returned rational distribution P.
    """
    if phi.order != 3:
        raise ValueError(f"cw3 needs a 3-graph, got order {phi.order}")
    if not check_tightness(phi, alpha):
        raise ValueError("graph is not tight for the given alpha maps")
    E = len(phi)
    mats = _marginal_matrices(phi)
    if E == 1:
        P = np.ones(1)
        N = 1
    else:
        N = grid_resolution(E)
        grid = _simplex_grid(E, N)
        vals = _minH(grid, mats)
        P = grid[int(np.argmax(vals))]
        best, bestP = float(vals.max()), P.copy()
        # projected supergradient ascent on the concave objective
        for t in range(1, steps + 1):
            Pm = np.maximum(P, 1e-15)
            margs = [M @ Pm for M in mats]
            hs = [entropy_bits(m) for m in margs]
            i = int(np.argmin(hs))
            grad = -(mats[i].T @ np.log2(np.maximum(margs[i], 1e-300))) - 1 / np.log(2)
            grad -= grad.mean()
            P = project_simplex(P + (0.5 / N) / np.sqrt(t) * grad)
            val = float(_minH(P[None, :], mats)[0])
            if val > best:
                best, bestP = val, P.copy()
        P = bestP
    exact = _best_rational(P, mats)
    prec = intervals.default_precision()
    lows, his = [], []
    for i, n in enumerate(phi.sizes):
        marg = [Fraction(0)] * n
        for p, e in zip(exact, phi.edges):
            marg[e[i] - 1] += p
        lo, hi = entropy_interval(marg, prec)
        lows.append(lo)
        his.append(hi)
    lo = min(lows)
    hi = min(his)
    return Cw3Result(EntropyValue(float((lo + hi) / 2), prec, lo), tuple(exact), N)
