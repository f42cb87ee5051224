"""Linear algebra over F_2 on int bitsets.

A word of length n is an int whose bit n-1-i holds coordinate i, so the
string "1100" is ``0b1100`` and the numeric order of words is the
lexicographic order of their strings.  Subspaces are stored by their
reduced row-echelon basis with pivots leftmost, which makes equal
subspaces compare equal.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .combinatorics import f_km, g_km, krawchouk_table

MAX_AMBIENT = 4096
DEFAULT_ENUMERATION_LIMIT = 1 << 24

_BLOCK_DIM = 16


class EnumerationLimitError(ValueError):
    """Raised when a subspace is too large to enumerate element by element."""


@dataclass(frozen=True)
class Gf2Vector:
    n: int
    bits: int

    def __post_init__(self):
        if not 0 < self.n <= MAX_AMBIENT:
            raise ValueError(f"ambient dimension {self.n} outside [1, {MAX_AMBIENT}]")
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError(f"word {self.bits:#x} does not fit in {self.n} bits")

    @classmethod
    def from_str(cls, s: str) -> "Gf2Vector":
        s = s.strip()
        if not s or set(s) - {"0", "1"}:
            raise ValueError(f"not a binary word: {s!r}")
        return cls(len(s), int(s, 2))

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    def __str__(self) -> str:
        return format(self.bits, f"0{self.n}b")


@dataclass(frozen=True)
class Gf2Subspace:
    """Subspace of F_2^n held as a canonical RREF basis (pivots descending)."""

    n: int
    basis: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def size(self) -> int:
        return 1 << len(self.basis)

    def pivots(self) -> list[int]:
        return [row.bit_length() - 1 for row in self.basis]

    def reduce(self, x: int) -> int:
        """Canonical coset representative of x modulo the subspace."""
        for row in self.basis:
            if (x >> (row.bit_length() - 1)) & 1:
                x ^= row
        return x

    def __contains__(self, x) -> bool:
        if isinstance(x, Gf2Vector):
            if x.n != self.n:
                return False
            x = x.bits
        return self.reduce(x) == 0

    def __iter__(self) -> Iterator[int]:
        return iter_elements(self)

    def rows(self) -> list[str]:
        return [format(row, f"0{self.n}b") for row in self.basis]


def _rref(rows: Iterable[int], n: int) -> tuple[int, ...]:
    by_pivot: dict[int, int] = {}
    for x in rows:
        for p in sorted(by_pivot, reverse=True):
            if (x >> p) & 1:
                x ^= by_pivot[p]
        if x:
            p = x.bit_length() - 1
            # clear the new pivot column from existing rows
            for q, row in by_pivot.items():
                if (row >> p) & 1:
                    by_pivot[q] = row ^ x
            by_pivot[p] = x
    return tuple(by_pivot[p] for p in sorted(by_pivot, reverse=True))


def subspace_from_ints(n: int, rows: Iterable[int]) -> Gf2Subspace:
    if not 0 < n <= MAX_AMBIENT:
        raise ValueError(f"ambient dimension {n} outside [1, {MAX_AMBIENT}]")
    rows = list(rows)
    for x in rows:
        if x < 0 or x >> n:
            raise ValueError(f"word {x:#x} does not fit in {n} bits")
    return Gf2Subspace(n, _rref(rows, n))


def canonicalize(vectors: Iterable[Gf2Vector | str], n: int | None = None) -> Gf2Subspace:
    """RREF basis of the span of ``vectors``.

    Strings are parsed as binary words.  ``n`` is required only when
    ``vectors`` is empty.
    """
    vecs = [Gf2Vector.from_str(v) if isinstance(v, str) else v for v in vectors]
    dims = {v.n for v in vecs}
    if n is not None:
        dims.add(n)
    if len(dims) != 1:
        if not dims:
            raise ValueError("ambient dimension unknown for an empty spanning set")
        raise ValueError(f"mixed ambient dimensions: {sorted(dims)}")
    (n,) = dims
    return subspace_from_ints(n, (v.bits for v in vecs))


def zero_subspace(n: int) -> Gf2Subspace:
    return subspace_from_ints(n, [])


def full_space(n: int) -> Gf2Subspace:
    return subspace_from_ints(n, [1 << i for i in range(n)])


def orthogonal_complement(V: Gf2Subspace) -> Gf2Subspace:
    n = V.n
    pivots = V.pivots()
    pivot_set = set(pivots)
    rows = []
    for j in range(n):
        if j in pivot_set:
            continue
        y = 1 << j
        for row, p in zip(V.basis, pivots):
            if (row >> j) & 1:
                y |= 1 << p
        rows.append(y)
    return subspace_from_ints(n, rows)


def is_subspace_of(U: Gf2Subspace, V: Gf2Subspace) -> bool:
    return U.n == V.n and all(V.reduce(x) == 0 for x in U.basis)


def iter_elements(V: Gf2Subspace) -> Iterator[int]:
    """All 2^dim elements in Gray-code order, starting at 0."""
    x = 0
    yield x
    basis = V.basis
    for i in range(1, 1 << len(basis)):
        # flip the basis row indexed by the lowest set bit of i
        x ^= basis[(i & -i).bit_length() - 1]
        yield x


def elements_array(V: Gf2Subspace) -> np.ndarray:
    """All elements as a uint64 array (requires n <= 64)."""
    if V.n > 64:
        raise ValueError("elements_array needs n <= 64; iterate instead")
    out = np.zeros(1, dtype=np.uint64)
    for row in V.basis:
        out = np.concatenate([out, out ^ np.uint64(row)])
    return out


@dataclass(frozen=True)
class WeightDistribution:
    n: int
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.counts) != self.n + 1:
            raise ValueError("need exactly n + 1 weight classes")
        if any(c < 0 for c in self.counts):
            raise ValueError("weight counts must be nonnegative")

    @property
    def total(self) -> int:
        return sum(self.counts)

    def __getitem__(self, t: int) -> int:
        return self.counts[t] if 0 <= t <= self.n else 0


def weight_distribution(V: Gf2Subspace, enumeration_limit: int = DEFAULT_ENUMERATION_LIMIT) -> WeightDistribution:
    """Count elements of V by Hamming weight by walking all 2^dim elements."""
    if V.size > enumeration_limit:
        raise EnumerationLimitError(
            f"2^{V.dim} elements exceed the enumeration limit {enumeration_limit}; "
            "use macwilliams on the dual instead"
        )
    n = V.n
    if n > 64:
        counts = [0] * (n + 1)
        for x in iter_elements(V):
            counts[x.bit_count()] += 1
        return WeightDistribution(n, tuple(counts))

    # numpy block over the trailing basis rows, Gray walk over the leading ones
    split = max(0, V.dim - _BLOCK_DIM)
    head, tail = V.basis[:split], V.basis[split:]
    block = elements_array(Gf2Subspace(n, tail))
    counts = np.zeros(n + 1, dtype=np.int64)
    for offset in iter_elements(Gf2Subspace(n, head)):
        w = np.bitwise_count(block ^ np.uint64(offset))
        counts += np.bincount(w, minlength=n + 1)
    return WeightDistribution(n, tuple(int(c) for c in counts))


def macwilliams(dual_weights: WeightDistribution, dual_size: int) -> WeightDistribution:
    """Weight distribution of V from that of V^perp:
    A_m = (1/|V^perp|) sum_t B_t K_m^n(t)."""
    n = dual_weights.n
    if dual_weights.total != dual_size:
        raise ValueError(f"dual weights sum to {dual_weights.total}, expected {dual_size}")
    K = krawchouk_table(n)
    out = []
    for m in range(n + 1):
        num = sum(b * K[m][t] for t, b in enumerate(dual_weights.counts) if b)
        q, rem = divmod(num, dual_size)
        if rem or q < 0:
            raise ValueError(f"non-integer or negative count at weight {m}: inconsistent input")
        out.append(q)
    return WeightDistribution(n, tuple(out))


def dual_weight_distribution(V: Gf2Subspace, enumeration_limit: int = DEFAULT_ENUMERATION_LIMIT) -> WeightDistribution:
    """Weights of V^perp, enumerating whichever of V, V^perp is smaller."""
    W = orthogonal_complement(V)
    if W.dim <= V.dim:
        return weight_distribution(W, enumeration_limit)
    return macwilliams(weight_distribution(V, enumeration_limit), V.size)


def _embed_for_pairs(k: int, V: Gf2Subspace) -> Gf2Subspace:
    if k < 2 or k % 2:
        raise ValueError(f"k must be even and >= 2, got {k}")
    if V.n == k - 1:
        return V
    if V.n == k and all(row & 1 == 0 for row in V.basis):
        return Gf2Subspace(k - 1, tuple(row >> 1 for row in V.basis))
    raise ValueError(f"subspace must live in F_2^{k - 1} (or F_2^{k} with last coordinate 0), got n={V.n}")


def restricted_pair_count(k: int, V: Gf2Subspace, enumeration_limit: int = DEFAULT_ENUMERATION_LIMIT) -> int:
    """|{(x, y) : |x| = |y| = k/2, x_k = y_k = 0, x - y in V}| = sum_m a_m f(k, m)."""
    V = _embed_for_pairs(k, V)
    a = weight_distribution(V, enumeration_limit)
    return sum(a[m] * f_km(k, m) for m in range(0, k - 1, 2))


def unrestricted_pair_count(k: int, V: Gf2Subspace, enumeration_limit: int = DEFAULT_ENUMERATION_LIMIT) -> int:
    """Same count with x, y ranging over all weight-k/2 words of F_2^k."""
    V = _embed_for_pairs(k, V)
    a = weight_distribution(V, enumeration_limit)
    return sum(a[m] * g_km(k, m) for m in range(0, k - 1, 2))


# -- brute-force oracles ---------------------------------------------------

def weight_class(n: int, w: int) -> np.ndarray:
    """All words of F_2^n with weight w, ascending (n <= 64)."""
    if n > 64:
        raise ValueError("weight_class needs n <= 64")
    words = [sum(1 << (n - 1 - i) for i in c) for c in itertools.combinations(range(n), w)]
    return np.array(sorted(words), dtype=np.uint64)


def _reduce_array(V: Gf2Subspace, xs: np.ndarray) -> np.ndarray:
    xs = xs.copy()
    for row in V.basis:
        p = np.uint64(row.bit_length() - 1)
        hit = ((xs >> p) & np.uint64(1)).astype(bool)
        xs[hit] ^= np.uint64(row)
    return xs


def pair_count_quadratic(xs: np.ndarray, V: Gf2Subspace) -> int:
    """Count ordered pairs from ``xs`` whose sum lies in V by testing all of them."""
    members = np.sort(elements_array(V))
    total = 0
    for x in xs:
        d = xs ^ x
        idx = np.searchsorted(members, d)
        idx[idx == len(members)] = 0
        total += int(np.count_nonzero(members[idx] == d))
    return total


def pair_count_coset(xs: np.ndarray, V: Gf2Subspace) -> int:
    """Same count by grouping ``xs`` into cosets of V: x + y in V iff x, y share a coset."""
    _, sizes = np.unique(_reduce_array(V, xs), return_counts=True)
    return int(np.sum(sizes.astype(object) ** 2))


def restricted_pairs_bruteforce(k: int, V: Gf2Subspace) -> int:
    V = _embed_for_pairs(k, V)
    return pair_count_quadratic(weight_class(k - 1, k // 2), V)


def unrestricted_pairs_bruteforce(k: int, V: Gf2Subspace, quadratic: bool = True) -> int:
    V = _embed_for_pairs(k, V)
    Vk = Gf2Subspace(k, tuple(row << 1 for row in V.basis))
    xs = weight_class(k, k // 2)
    return pair_count_quadratic(xs, Vk) if quadratic else pair_count_coset(xs, Vk)


# -- sampling and enumeration ---------------------------------------------

def random_subspace(n: int, dim: int, rng: random.Random) -> Gf2Subspace:
    """Uniform dim-dimensional subspace: random dim x n matrices, rejecting rank deficiency."""
    if not 0 <= dim <= n:
        raise ValueError(f"dimension {dim} outside [0, {n}]")
    while True:
        rows = [rng.getrandbits(n) for _ in range(dim)]
        V = subspace_from_ints(n, rows)
        if V.dim == dim:
            return V


def random_subspace_codim(n: int, c: int, rng: random.Random) -> Gf2Subspace:
    """Subspace of codimension c whose dual is uniform among c-dimensional subspaces."""
    return orthogonal_complement(random_subspace(n, c, rng))


def _parity_lift(x: int) -> int:
    return (x << 1) | (x.bit_count() & 1)


def random_even_subspace(n: int, dim: int, rng: random.Random) -> Gf2Subspace:
    """Uniform dim-dimensional subspace of the even-weight words of F_2^n."""
    E = random_subspace(n - 1, dim, rng)
    return subspace_from_ints(n, (_parity_lift(x) for x in E.basis))


def iter_subspaces(n: int, dim: int) -> Iterator[Gf2Subspace]:
    """Every dim-dimensional subspace of F_2^n, once each, via RREF shapes."""
    for pivots in itertools.combinations(range(n - 1, -1, -1), dim):
        # free positions of row i: non-pivot columns below its pivot
        free = [[j for j in range(p) if j not in pivots] for p in pivots]
        nfree = sum(len(f) for f in free)
        for fill in range(1 << nfree):
            rows, shift = [], 0
            for p, cols in zip(pivots, free):
                row = 1 << p
                for j_idx, j in enumerate(cols):
                    if (fill >> (shift + j_idx)) & 1:
                        row |= 1 << j
                shift += len(cols)
                rows.append(row)
            yield Gf2Subspace(n, tuple(rows))


def iter_even_subspaces(n: int, dim: int) -> Iterator[Gf2Subspace]:
    """Every dim-dimensional subspace of the even-weight words of F_2^n."""
    for E in iter_subspaces(n - 1, dim):
        yield subspace_from_ints(n, (_parity_lift(x) for x in E.basis))


# -- text format -----------------------------------------------------------

def parse_subspace(text: str) -> Gf2Subspace:
    """First line "n d", then d binary rows (any spanning set)."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("empty subspace file")
    try:
        n, d = (int(tok) for tok in lines[0].split())
    except ValueError as exc:
        raise ValueError(f"bad header {lines[0]!r}; expected 'n d'") from exc
    rows = lines[1:]
    if len(rows) != d:
        raise ValueError(f"header promises {d} rows, found {len(rows)}")
    vecs = [Gf2Vector.from_str(r) for r in rows]
    return canonicalize(vecs, n)


def format_subspace(V: Gf2Subspace) -> str:
    return "\n".join([f"{V.n} {V.dim}", *V.rows()]) + "\n"


def weight(x: int) -> int:
    return x.bit_count()


def span_bruteforce(n: int, vectors: Sequence[int]) -> set[int]:
    """All F_2 combinations of ``vectors``; exponential, for oracles only."""
    out = set()
    for mask in range(1 << len(vectors)):
        x = 0
        for i, v in enumerate(vectors):
            if (mask >> i) & 1:
                x ^= v
        out.add(x)
    return out
