"""Clique discovery: codegree descent, spiders, greedy tiling, exact search."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from . import _kernels
from .graph import Graph, from_mask, to_mask

__all__ = [
    "Clique",
    "Spider",
    "Tiling",
    "SearchResult",
    "FOUND",
    "INFEASIBLE",
    "EXHAUSTED",
    "greedy_descent_clique",
    "find_spider",
    "greedy_tiling",
    "repair_tiling",
    "enumerate_cliques_in",
    "exact_factor",
    "verify_clique",
]

Clique = tuple[int, ...]

FOUND = "found"
INFEASIBLE = "infeasible"
EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class Spider:
    """A ``(t-1)``-clique ``base`` plus ``apexes`` adjacent to all of it."""

    base: Clique
    apexes: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.base) + 1


@dataclass
class Tiling:
    cliques: list[Clique]
    covered: frozenset[int]
    leftover: frozenset[int]
    stalled: bool = False
    threshold_violations: int = 0

    def check(self) -> None:
        seen: set[int] = set()
        for c in self.cliques:
            if seen.intersection(c):
                raise AssertionError(f"clique {c} overlaps earlier cliques")
            seen.update(c)
        if seen != self.covered:
            raise AssertionError("covered set does not match clique union")
        if self.covered & self.leftover:
            raise AssertionError("covered and leftover intersect")


@dataclass
class SearchResult:
    """Outcome of a budgeted exact search."""

    status: str
    solution: object = None
    nodes: int = 0
    diagnostics: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.status == FOUND


def verify_clique(g: Graph, vertices: Iterable[int]) -> bool:
    return g.is_clique(vertices)


def _regular_or_mean_degree(g: Graph) -> float:
    return 2 * g.edge_count / g.n if g.n else 0.0


def _descend(g: Graph, cand: int, k: int) -> tuple[Clique | None, int, int]:
    """Codegree descent inside ``cand``.

    Returns ``(clique or None, final candidate mask, threshold violations)``.
    A violation is a step where the chosen vertex has fewer than
    ``d|C|/(2n)`` neighbours in the current candidate set ``C``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    rows = g.rows
    d = _regular_or_mean_degree(g)
    chosen = []
    violations = 0
    for step in range(k):
        v, deg = _kernels.best_vertex(g, cand)
        if v < 0:
            return None, cand, violations
        if step < k - 1 and deg <= 0:
            return None, cand, violations
        if deg < d * cand.bit_count() / (2 * g.n):
            violations += 1
        chosen.append(v)
        cand &= rows[v]
    return tuple(sorted(chosen)), cand, violations


def greedy_descent_clique(g: Graph, u: Iterable[int] | int, k: int) -> Clique | None:
    """A ``k``-clique inside ``u`` found by repeatedly taking the vertex of
    largest induced degree and shrinking to its neighbourhood, or ``None``."""
    clique, _, _ = _descend(g, to_mask(u), k)
    return clique


def find_spider(g: Graph, u: Iterable[int] | int, t: int, b: int = 40) -> Spider | None:
    """A ``(t-1)``-clique in ``u`` with ``b`` common neighbours in ``u``.

    The base comes from codegree descent; the ``b`` lowest-index common
    neighbours become the apexes.
    """
    if t < 3 or b < 1:
        raise ValueError("need t >= 3 and b >= 1")
    um = to_mask(u)
    base, common, _ = _descend(g, um, t - 1)
    if base is None or common.bit_count() < b:
        return None
    return Spider(base, tuple(from_mask(common)[:b]))


def greedy_tiling(g: Graph, forbidden: Iterable[int] | int, t: int, stop_at: int,
                  within: Iterable[int] | int | None = None) -> Tiling:
    """Vertex-disjoint ``t``-cliques found greedily among non-forbidden vertices.

    Stops once at most ``stop_at`` vertices remain uncovered or descent fails
    (``stalled``).  ``within`` optionally restricts the ground set.
    """
    if stop_at < 0:
        raise ValueError("stop_at must be non-negative")
    avail = g.full_mask & ~to_mask(forbidden)
    if within is not None:
        avail &= to_mask(within)
    cliques: list[Clique] = []
    covered = 0
    violations = 0
    stalled = False
    while avail.bit_count() > stop_at:
        clique, _, v = _descend(g, avail, t)
        violations += v
        if clique is None:
            stalled = True
            break
        cliques.append(clique)
        cm = to_mask(clique)
        covered |= cm
        avail &= ~cm
    return Tiling(cliques, frozenset(from_mask(covered)), frozenset(from_mask(avail)),
                  stalled, violations)


def _two_disjoint(g: Graph, region: int, t: int) -> tuple[Clique, Clique] | None:
    cliques = _kernels.cliques_in(g, region, t, 1 << 62)
    masks = [to_mask(c) for c in cliques]
    for a in range(len(cliques)):
        for b in range(a + 1, len(cliques)):
            if not masks[a] & masks[b]:
                return cliques[a], cliques[b]
    return None


def repair_tiling(g: Graph, tiling: Tiling, t: int, stop_at: int, max_rounds: int = 64) -> Tiling:
    """Shrink the leftover of a stalled tiling.

    Takes any ``t``-clique still inside the leftover (exact search); failing
    that, replaces one tiled clique ``C`` by two disjoint cliques inside
    ``C`` plus the leftover.  Stops at ``stop_at`` or when neither move applies.
    """
    cliques = list(tiling.cliques)
    left = to_mask(tiling.leftover)
    for _ in range(max_rounds):
        if left.bit_count() <= stop_at:
            break
        found = _kernels.cliques_in(g, left, t, 1)
        if found:
            cliques.append(found[0])
            left &= ~to_mask(found[0])
            continue
        for idx in range(len(cliques) - 1, -1, -1):
            region = left | to_mask(cliques[idx])
            pair = _two_disjoint(g, region, t)
            if pair:
                del cliques[idx]
                cliques.extend(pair)
                left = region & ~(to_mask(pair[0]) | to_mask(pair[1]))
                break
        else:
            break
    covered = 0
    for c in cliques:
        covered |= to_mask(c)
    return Tiling(cliques, frozenset(from_mask(covered)), frozenset(from_mask(left)),
                  left.bit_count() > stop_at, tiling.threshold_violations)


def enumerate_cliques_in(g: Graph, s: Iterable[int] | int, k: int, limit: int) -> list[Clique]:
    """``k``-cliques inside ``s`` in lexicographic order, truncated at ``limit``."""
    if k < 1 or limit < 1:
        raise ValueError("need k >= 1 and limit >= 1")
    return _kernels.cliques_in(g, to_mask(s), k, limit)


def exact_factor(g: Graph, t: int, node_budget: int = 1_000_000) -> SearchResult:
    """Backtracking search for a ``K_t``-factor.

    Always branches on the lowest-index uncovered vertex, trying the cliques
    through it in lexicographic order.  A branch is pruned as soon as some
    uncovered vertex lies in no ``t``-clique of the uncovered graph.
    """
    n = g.n
    if t < 1 or n % t:
        raise ValueError(f"t={t} does not divide n={n}")
    rows = g.rows
    nodes = 0
    chosen: list[Clique] = []

    def alive(unc: int) -> bool:
        rest = unc
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rest ^= low
            if not _kernels.cliques_in(g, rows[v] & unc, t - 1, 1):
                return False
        return True

    class _Budget(Exception):
        pass

    def search(unc: int) -> bool:
        nonlocal nodes
        if not unc:
            return True
        nodes += 1
        if nodes > node_budget:
            raise _Budget
        if t > 1 and not alive(unc):
            return False
        low = unc & -unc
        v = low.bit_length() - 1
        rest = unc ^ low
        for tail in _kernels.cliques_in(g, rows[v] & rest, t - 1, 1 << 62) if t > 1 else [()]:
            chosen.append((v,) + tail)
            if search(rest & ~to_mask(tail)):
                return True
            chosen.pop()
        return False

    try:
        ok = search(g.full_mask)
    except _Budget:
        return SearchResult(EXHAUSTED, None, nodes)
    if ok:
        return SearchResult(FOUND, list(chosen), nodes)
    return SearchResult(INFEASIBLE, None, nodes)
