"""Pure-Python bitset kernels (reference implementation and fallback).

Every function takes a :class:`~ktfactor.graph.Graph` and int bitmasks.  The
compiled module ``_ckernels`` exports the same names with the same results.
"""

from __future__ import annotations

import numpy as np


def masked_degrees(g, target: int) -> np.ndarray:
    """``out[v] = |N(v) & target|`` for every vertex ``v``."""
    return np.fromiter(((r & target).bit_count() for r in g.rows), dtype=np.int64, count=g.n)


def edge_count_between(g, a: int, b: int) -> int:
    """``sum over v in a of |N(v) & b|`` (edges inside ``a & b`` count twice)."""
    rows = g.rows
    total = 0
    while a:
        low = a & -a
        total += (rows[low.bit_length() - 1] & b).bit_count()
        a ^= low
    return total


def best_vertex(g, cand: int) -> tuple[int, int]:
    """Member of ``cand`` with the most neighbours inside ``cand``.

    Ties go to the lowest index.  Returns ``(-1, -1)`` when ``cand`` is empty.
    """
    rows = g.rows
    best_v, best_d = -1, -1
    rest = cand
    while rest:
        low = rest & -rest
        v = low.bit_length() - 1
        d = (rows[v] & cand).bit_count()
        if d > best_d:
            best_v, best_d = v, d
        rest ^= low
    return best_v, best_d


def cliques_in(g, s: int, k: int, limit: int) -> list[tuple[int, ...]]:
    """k-cliques inside ``s`` in lexicographic order, at most ``limit`` of them."""
    out: list[tuple[int, ...]] = []
    if k <= 0 or limit <= 0:
        return out
    rows = g.rows
    stack: list[int] = []

    def extend(cand: int) -> bool:
        need = k - len(stack)
        while cand and cand.bit_count() >= need:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            stack.append(v)
            if need == 1:
                out.append(tuple(stack))
                stack.pop()
                if len(out) >= limit:
                    return True
                continue
            # only larger indices keep the order lexicographic
            if extend(cand & rows[v]):
                return True
            stack.pop()
        return False

    extend(s)
    return out
