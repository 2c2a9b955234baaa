"""Test-graph families with known or controllable spectra."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations

from .graph import Graph

__all__ = [
    "GeneratorSpec",
    "GenerationError",
    "paley",
    "complete_multipartite",
    "random_regular",
    "complete",
    "cycle",
    "complete_bipartite",
    "petersen",
    "generate",
]


class GenerationError(RuntimeError):
    """Raised when a randomized generator runs out of attempts."""


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    f = 3
    while f * f <= q:
        if q % f == 0:
            return False
        f += 2
    return True


def paley(q: int) -> Graph:
    """Paley graph on ``Z_q``: ``x ~ y`` iff ``x - y`` is a nonzero square mod ``q``.

    Requires ``q`` prime with ``q % 4 == 1`` so that -1 is a square and the
    relation is symmetric.
    """
    if not _is_prime(q) or q % 4 != 1:
        raise ValueError(f"Paley graphs need a prime q = 1 mod 4, got {q}")
    squares = {x * x % q for x in range(1, q)}
    return Graph(q, ((x, y) for x in range(q) for y in range(x + 1, q) if (y - x) % q in squares))


def complete_multipartite(t: int, s: int) -> Graph:
    """Complete ``t``-partite graph with parts ``{p*s, ..., p*s + s - 1}``."""
    if t < 2 or s < 1:
        raise ValueError("complete_multipartite needs t >= 2 and s >= 1")
    n = t * s
    return Graph(n, ((u, v) for u in range(n) for v in range(u + 1, n) if u // s != v // s))


def complete(n: int) -> Graph:
    return Graph(n, combinations(range(n), 2))


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycles need at least 3 vertices")
    return Graph(n, ((i, (i + 1) % n) for i in range(n)))


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(a + b, ((u, a + v) for u in range(a) for v in range(b)))


def petersen() -> Graph:
    """Outer 5-cycle ``0..4``, spokes ``i - i+5``, inner pentagram on ``5..9``."""
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(i, i + 5) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, edges)


def _pair_stubs(n: int, d: int, rng: random.Random) -> set[tuple[int, int]] | None:
    # Pair stubs at random; colliding stubs are re-paired among themselves.
    edges: set[tuple[int, int]] = set()
    stubs = [v for v in range(n) for _ in range(d)]
    while stubs:
        rng.shuffle(stubs)
        rejected = []
        it = iter(stubs)
        for a, b in zip(it, it):
            e = (a, b) if a < b else (b, a)
            if a != b and e not in edges:
                edges.add(e)
            else:
                rejected += [a, b]
        if len(rejected) == len(stubs):
            # no progress; check whether any legal pair remains at all
            uniq = sorted(set(rejected))
            if not any(
                (u, v) not in edges for i, u in enumerate(uniq) for v in uniq[i + 1:]
            ):
                return None
        stubs = rejected
    return edges


def _switch(edges: list[tuple[int, int]], present: set[tuple[int, int]], rng: random.Random, steps: int) -> None:
    m = len(edges)
    for _ in range(steps):
        i, j = rng.randrange(m), rng.randrange(m)
        if i == j:
            continue
        a, b = edges[i]
        c, d = edges[j]
        if rng.random() < 0.5:
            c, d = d, c
        # (a,b),(c,d) -> (a,d),(c,b)
        if len({a, b, c, d}) < 4:
            continue
        e1 = (a, d) if a < d else (d, a)
        e2 = (c, b) if c < b else (b, c)
        if e1 in present or e2 in present:
            continue
        present.difference_update((edges[i], edges[j]))
        present.update((e1, e2))
        edges[i], edges[j] = e1, e2


def random_regular(n: int, d: int, seed: int, restarts: int = 100) -> Graph:
    """Random simple ``d``-regular graph on ``n`` vertices.

    Pairing model with collision re-pairing (full restart when stuck), then
    ``n*d`` double-edge switches.  Deterministic for a given seed.
    """
    if n * d % 2:
        raise ValueError("n*d must be even")
    if not 0 <= d < n:
        raise ValueError("need 0 <= d < n")
    rng = random.Random(seed)
    for _ in range(restarts):
        edges = _pair_stubs(n, d, rng)
        if edges is not None:
            break
    else:
        raise GenerationError(f"pairing model failed {restarts} times for n={n}, d={d}")
    ordered = sorted(edges)
    if ordered:
        _switch(ordered, edges, rng, n * d)
    return Graph(n, sorted(ordered))


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def validate(self) -> None:
        need = {
            "paley": {"q"},
            "complete_multipartite": {"t", "s"},
            "random_regular": {"n", "d"},
        }
        if self.family not in need:
            raise ValueError(f"unknown family {self.family!r}")
        missing = need[self.family] - set(self.params)
        if missing:
            raise ValueError(f"{self.family} needs parameters {sorted(missing)}")


def generate(spec: GeneratorSpec) -> Graph:
    spec.validate()
    p = spec.params
    if spec.family == "paley":
        return paley(int(p["q"]))
    if spec.family == "complete_multipartite":
        return complete_multipartite(int(p["t"]), int(p["s"]))
    return random_regular(int(p["n"]), int(p["d"]), spec.seed)
