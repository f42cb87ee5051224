"""k-partite k-uniform hypergraphs, type graphs, Kronecker powers, and
exact induced-matching numbers by branch and bound."""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import factorial, prod
from typing import Iterable, Sequence

Edge = tuple[int, ...]

DEFAULT_BUDGET = 10**8


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(self.parts)
        object.__setattr__(self, "parts", parts)
        if not parts:
            raise ValueError("a partition needs at least one part")
        if any(p <= 0 for p in parts):
            raise ValueError(f"parts must be positive: {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"parts must be weakly decreasing: {parts}")

    @property
    def k(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)


@dataclass(frozen=True)
class KGraph:
    """Edge set inside [n_1] x ... x [n_k]; edges 1-based, deduplicated, sorted."""

    sizes: tuple[int, ...]
    edges: tuple[Edge, ...]

    @property
    def order(self) -> int:
        return len(self.sizes)

    def __len__(self) -> int:
        return len(self.edges)

    def to_json(self) -> dict:
        return {"order": self.order, "sizes": list(self.sizes), "edges": [list(e) for e in self.edges]}


def kgraph(sizes: Sequence[int], edges: Iterable[Sequence[int]]) -> KGraph:
    sizes = tuple(int(n) for n in sizes)
    if not sizes or any(n <= 0 for n in sizes):
        raise ValueError(f"vertex set sizes must be positive: {sizes}")
    k = len(sizes)
    clean = set()
    for e in edges:
        e = tuple(int(a) for a in e)
        if len(e) != k:
            raise ValueError(f"edge {e} has {len(e)} coordinates, expected {k}")
        for a, n in zip(e, sizes):
            if not 1 <= a <= n:
                raise ValueError(f"edge {e} out of range for sizes {sizes}")
        clean.add(e)
    return KGraph(sizes, tuple(sorted(clean)))


def _multiset_permutations(counts: list[int], k: int) -> Iterable[Edge]:
    # lexicographic order; letter j + 1 still available counts[j] times
    out: list[int] = []

    def rec():
        if len(out) == k:
            yield tuple(out)
            return
        for j, c in enumerate(counts):
            if c:
                counts[j] -= 1
                out.append(j + 1)
                yield from rec()
                out.pop()
                counts[j] += 1

    yield from rec()


def type_graph(lam: Partition | Sequence[int]) -> KGraph:
    """All k-tuples over [n] with letter j occurring lam_j times."""
    if not isinstance(lam, Partition):
        lam = Partition(tuple(lam))
    n, k = len(lam), lam.k
    edges = list(_multiset_permutations(list(lam.parts), k))
    return KGraph((n,) * k, tuple(edges))


def multinomial(lam: Partition) -> int:
    return factorial(lam.k) // prod(factorial(p) for p in lam.parts)


def kronecker(phi: KGraph, psi: KGraph) -> KGraph:
    """Pairs of edges, with vertex (a, b) of part i flattened to (a-1) m_i + b."""
    if phi.order != psi.order:
        raise ValueError(f"order mismatch: {phi.order} vs {psi.order}")
    ms = psi.sizes
    sizes = tuple(n * m for n, m in zip(phi.sizes, ms))
    edges = [
        tuple((a - 1) * m + b for a, b, m in zip(e, f, ms))
        for e in phi.edges
        for f in psi.edges
    ]
    return KGraph(sizes, tuple(sorted(edges)))


def kronecker_power(phi: KGraph, n: int) -> KGraph:
    if n < 1:
        raise ValueError("power must be >= 1")
    out = phi
    for _ in range(n - 1):
        out = kronecker(out, phi)
    return out


def is_induced_matching(psi: Iterable[Sequence[int]], phi: KGraph) -> bool:
    psi = {tuple(e) for e in psi}
    edge_set = set(phi.edges)
    if not psi <= edge_set:
        raise ValueError(f"not a subset of the graph: {sorted(psi - edge_set)}")
    k = phi.order
    for i in range(k):
        if len({e[i] for e in psi}) != len(psi):
            return False
    marg = [{e[i] for e in psi} for i in range(k)]
    return all(e in psi for e in phi.edges if all(e[i] in marg[i] for i in range(k)))


@dataclass(frozen=True)
class SubrankResult:
    value: int
    witness: tuple[Edge, ...]
    exact: bool
    nodes: int


def subrank(phi: KGraph, budget: int = DEFAULT_BUDGET) -> SubrankResult:
    """Largest induced matching, by branch and bound over edges in lex order.

    Returns the lexicographically least optimal witness.  When the node
    budget runs out the best matching found so far is returned with
    ``exact=False``; its size is then only a lower bound.
    """
    edges = phi.edges
    k = phi.order
    E = len(edges)
    if E == 0:
        return SubrankResult(0, (), True, 0)
    # edges sharing vertex (i, a)
    incident: dict[tuple[int, int], list[int]] = {}
    for idx, e in enumerate(edges):
        for i, a in enumerate(e):
            incident.setdefault((i, a), []).append(idx)

    covered = [dict() for _ in range(k)]  # coordinate -> vertex -> chosen edge
    chosen: list[int] = []
    chosen_set: set[int] = set()
    best: list[int] = []
    nodes = 0
    exhausted = False

    def violates(idx: int) -> bool:
        # adding edge idx must not fully cover any other unchosen edge
        e = edges[idx]
        for i, a in enumerate(e):
            for j in incident[(i, a)]:
                if j == idx or j in chosen_set:
                    continue
                g = edges[j]
                if all(g[t] in covered[t] or g[t] == e[t] for t in range(k)):
                    return True
        return False

    def compatible(idx: int) -> bool:
        e = edges[idx]
        return all(e[i] not in covered[i] for i in range(k))

    def bound(cands: list[int]) -> int:
        if not cands:
            return 0
        return min(len({edges[j][i] for j in cands}) for i in range(k))

    def search(cands: list[int]) -> None:
        nonlocal nodes, exhausted, best
        nodes += 1
        if nodes > budget:
            exhausted = True
            return
        if len(chosen) > len(best):
            best = list(chosen)
        for pos, idx in enumerate(cands):
            rest = cands[pos:]
            if len(chosen) + bound(rest) <= len(best):
                return
            if violates(idx):
                continue
            e = edges[idx]
            chosen.append(idx)
            chosen_set.add(idx)
            for i, a in enumerate(e):
                covered[i][a] = idx
            nxt = [j for j in cands[pos + 1:] if compatible(j)]
            search(nxt)
            for i, a in enumerate(e):
                del covered[i][a]
            chosen_set.discard(idx)
            chosen.pop()
            if exhausted:
                return

    search(list(range(E)))
    witness = tuple(edges[j] for j in sorted(best))
    if not is_induced_matching(witness, phi):
        raise AssertionError("branch and bound produced an invalid witness")
    return SubrankResult(len(best), witness, not exhausted, nodes)


@dataclass(frozen=True)
class PowerRate:
    power: int
    value: int
    rate: float
    exact: bool


def subrank_power_rate(phi: KGraph, n: int, budget: int = DEFAULT_BUDGET) -> PowerRate:
    """Q(phi^n) and Q(phi^n)^(1/n), a lower estimate of the asymptotic subrank."""
    res = subrank(kronecker_power(phi, n), budget)
    root = round(res.value ** (1 / n))
    rate = float(root) if root**n == res.value else res.value ** (1 / n)
    return PowerRate(n, res.value, rate, res.exact)


def recognize_type_graph(phi: KGraph) -> Partition | None:
    """The partition lam with phi == type_graph(lam), if any."""
    if not phi.edges or len(set(phi.sizes)) != 1:
        return None
    n = phi.sizes[0]
    counts = [phi.edges[0].count(j) for j in range(1, n + 1)]
    if any(c == 0 for c in counts) or counts != sorted(counts, reverse=True):
        return None
    lam = Partition(tuple(counts))
    return lam if type_graph(lam) == phi else None


# -- file formats ----------------------------------------------------------

def parse_edges(text: str) -> KGraph:
    """Line 1 "k n_1 ... n_k", then one edge of k 1-based integers per line.
    A document starting with "{" is read as JSON {order, sizes, edges}."""
    if text.lstrip().startswith("{"):
        d = json.loads(text)
        G = kgraph(d["sizes"], d["edges"])
        if "order" in d and d["order"] != G.order:
            raise ValueError(f"order {d['order']} disagrees with {len(d['sizes'])} sizes")
        return G
    lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty edge file")
    try:
        head = [int(t) for t in lines[0].split()]
        rows = [[int(t) for t in ln.split()] for ln in lines[1:]]
    except ValueError as exc:
        raise ValueError(f"non-integer token in edge file: {exc}") from exc
    k, sizes = head[0], head[1:]
    if len(sizes) != k:
        raise ValueError(f"header declares k={k} but lists {len(sizes)} sizes")
    return kgraph(sizes, rows)


def format_edges(phi: KGraph) -> str:
    lines = [" ".join(map(str, (phi.order, *phi.sizes)))]
    lines += [" ".join(map(str, e)) for e in phi.edges]
    return "\n".join(lines) + "\n"
