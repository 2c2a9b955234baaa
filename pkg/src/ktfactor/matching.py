"""Maximum bipartite matching by shortest augmenting paths (Hopcroft-Karp)."""

from __future__ import annotations

from collections import deque
from collections.abc import Sequence

__all__ = ["hopcroft_karp"]


def hopcroft_karp(adj: Sequence[Sequence[int]], num_right: int) -> list[int]:
    """Maximum matching of a bipartite graph.

    ``adj[u]`` lists the right vertices adjacent to left vertex ``u``.
    Returns ``match`` with ``match[u]`` the partner of ``u`` or ``-1``.
    """
    num_left = len(adj)
    match_l = [-1] * num_left
    match_r = [-1] * num_right
    inf = num_left + 1
    dist = [0] * num_left

    def bfs() -> bool:
        queue = deque()
        for u in range(num_left):
            if match_l[u] == -1:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = inf
        found = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = match_r[v]
                if w == -1:
                    found = True
                elif dist[w] == inf:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(u: int) -> bool:
        for v in adj[u]:
            w = match_r[v]
            if w == -1 or (dist[w] == dist[u] + 1 and dfs(w)):
                match_l[u] = v
                match_r[v] = u
                return True
        dist[u] = inf
        return False

    while bfs():
        for u in range(num_left):
            if match_l[u] == -1:
                dfs(u)
    return match_l
