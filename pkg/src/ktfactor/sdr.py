"""Systems of disjoint representatives for the leftover-cover step.

Each uncovered vertex ``v`` gets candidate ``(t-1)``-cliques inside
``N(v) & Z1``; a solution picks one candidate per vertex, pairwise disjoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

from .cliques import EXHAUSTED, FOUND, INFEASIBLE, Clique, SearchResult
from .graph import Graph, to_mask
from . import _kernels

__all__ = [
    "CandidateFamily",
    "AHReport",
    "build_candidate_family",
    "solve_sdr",
    "ah_condition_check",
    "max_disjoint",
    "AH_MAX_ENTRIES",
]

AH_MAX_ENTRIES = 15


@dataclass
class CandidateFamily:
    """``entries[v]`` lists the candidate cliques (as sorted tuples) for ``v``.

    ``k`` is the common candidate size (``t - 1``); ``cap`` the per-entry limit
    used when the family was enumerated.
    """

    entries: dict[int, list[Clique]]
    k: int
    cap: int = 200

    def __len__(self) -> int:
        return len(self.entries)

    def sizes(self) -> dict[int, int]:
        return {v: len(c) for v, c in self.entries.items()}


def build_candidate_family(g: Graph, u: Iterable[int], z1: Iterable[int], t: int, cap: int = 200) -> CandidateFamily:
    """Up to ``cap`` lexicographically first ``(t-1)``-cliques in ``N(v) & Z1`` per ``v in u``."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    zm = to_mask(z1)
    entries = {v: _kernels.cliques_in(g, g.rows[v] & zm, t - 1, cap) for v in sorted(set(u))}
    return CandidateFamily(entries, t - 1, cap)


def solve_sdr(family: CandidateFamily, node_budget: int = 200_000) -> SearchResult:
    """Exact backtracking for a system of disjoint representatives.

    A greedy pass (fewest candidates first) is tried before the search; the
    search branches on the entry with fewest candidates still disjoint from
    the current selection.  ``solution`` maps each vertex to its clique.
    """
    keys = sorted(family.entries)
    cands = {v: [(c, to_mask(c)) for c in family.entries[v]] for v in keys}

    # greedy warm start
    used = 0
    pick = {}
    for v in sorted(keys, key=lambda v: (len(cands[v]), v)):
        for c, cm in cands[v]:
            if not cm & used:
                pick[v] = c
                used |= cm
                break
        else:
            break
    if len(pick) == len(keys):
        return SearchResult(FOUND, dict(sorted(pick.items())), 0, {"greedy": True})

    nodes = 0
    chosen: dict[int, Clique] = {}

    class _Budget(Exception):
        pass

    def search(open_keys: list[int], used: int) -> bool:
        nonlocal nodes
        if not open_keys:
            return True
        nodes += 1
        if nodes > node_budget:
            raise _Budget
        best_v, best_opts = None, None
        for v in open_keys:
            opts = [(c, cm) for c, cm in cands[v] if not cm & used]
            if best_opts is None or len(opts) < len(best_opts):
                best_v, best_opts = v, opts
                if not opts:
                    return False
        rest = [v for v in open_keys if v != best_v]
        for c, cm in best_opts:
            chosen[best_v] = c
            if search(rest, used | cm):
                return True
            del chosen[best_v]
        return False

    try:
        ok = search(keys, 0)
    except _Budget:
        return SearchResult(EXHAUSTED, None, nodes)
    if ok:
        return SearchResult(FOUND, dict(sorted(chosen.items())), nodes, {"greedy": False})
    return SearchResult(INFEASIBLE, None, nodes)


def max_disjoint(cliques: Iterable[Clique], target: int | None = None) -> int:
    """Size of a largest pairwise-disjoint subcollection.

    Stops early once ``target`` disjoint cliques are found.
    """
    masks = sorted({to_mask(c) for c in cliques})
    best = 0

    def rec(start: int, used: int, size: int) -> bool:
        nonlocal best
        if size > best:
            best = size
            if target is not None and best >= target:
                return True
        if size + (len(masks) - start) <= best:
            return False
        for idx in range(start, len(masks)):
            if not masks[idx] & used and rec(idx + 1, used | masks[idx], size + 1):
                return True
        return False

    rec(0, 0, 0)
    return best


@dataclass
class AHReport:
    passed: bool
    witness: tuple[int, ...] | None = None
    matching_sizes: dict[tuple[int, ...], int] = field(default_factory=dict)


def ah_condition_check(family: CandidateFamily, k: int | None = None) -> AHReport:
    """Check the Aharoni-Haxell sufficient condition by brute force.

    For every nonempty subfamily ``G`` the union of its candidate lists must
    contain more than ``k(|G|-1)`` pairwise-disjoint cliques.  Returns the
    first violating subfamily (by size, then lexicographically) as ``witness``.
    """
    if len(family) > AH_MAX_ENTRIES:
        raise ValueError(f"family has {len(family)} entries; the sweep is limited to {AH_MAX_ENTRIES}")
    k = family.k if k is None else k
    keys = sorted(family.entries)
    sizes: dict[tuple[int, ...], int] = {}
    for r in range(1, len(keys) + 1):
        for sub in combinations(keys, r):
            need = k * (r - 1) + 1
            union = {c for v in sub for c in family.entries[v]}
            size = max_disjoint(union, need)
            sizes[sub] = size
            if size < need:
                return AHReport(False, sub, sizes)
    return AHReport(True, None, sizes)
