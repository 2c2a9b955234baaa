"""Bipartite templates with a flexible set, and their resilient matchings.

A template of flexibility ``m`` has left part ``X = {0..3m-1}`` and right
part ``Z = {0..4m-1}`` whose first ``2m`` indices form the flexible set
``Z1``.  Deleting any ``m`` flexible vertices must leave a perfect matching.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Iterable

from .matching import hopcroft_karp

__all__ = [
    "Template",
    "TemplateReport",
    "TemplateError",
    "EXHAUSTIVE_MAX_M",
    "generate_template",
    "verify_template",
    "resilient_matching",
    "complete_template",
]

EXHAUSTIVE_MAX_M = 10
DEFAULT_SAMPLES = 10_000


class TemplateError(RuntimeError):
    """Generation ran out of retries, or a template lacks a required matching."""

    def __init__(self, message: str, stats: dict | None = None):
        super().__init__(message)
        self.stats = stats or {}


@dataclass(frozen=True)
class Template:
    m: int
    max_degree: int
    edges: frozenset[tuple[int, int]]
    verification: dict | None = None

    @property
    def n_left(self) -> int:
        return 3 * self.m

    @property
    def n_right(self) -> int:
        return 4 * self.m

    @property
    def flexible(self) -> range:
        return range(2 * self.m)

    def right_neighbors(self, x: int) -> list[int]:
        return sorted(z for (xx, z) in self.edges if xx == x)

    def left_neighbors(self, z: int) -> list[int]:
        return sorted(x for (x, zz) in self.edges if zz == z)

    def degree_max(self) -> int:
        deg: dict[tuple[str, int], int] = {}
        for x, z in self.edges:
            deg["x", x] = deg.get(("x", x), 0) + 1
            deg["z", z] = deg.get(("z", z), 0) + 1
        return max(deg.values(), default=0)

    def to_dict(self) -> dict:
        out = {
            "m": self.m,
            "max_degree": self.max_degree,
            "edges": [list(e) for e in sorted(self.edges)],
        }
        if self.verification is not None:
            out["verification"] = dict(self.verification)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "Template":
        m = int(data["m"])
        edges = frozenset((int(x), int(z)) for x, z in data["edges"])
        for x, z in edges:
            if not (0 <= x < 3 * m and 0 <= z < 4 * m):
                raise ValueError(f"template edge {(x, z)} out of range for m={m}")
        return cls(m, int(data["max_degree"]), edges, data.get("verification"))


@dataclass
class TemplateReport:
    passed: bool
    checked: int
    failures: list[tuple[int, ...]] = field(default_factory=list)
    mode: str = "exhaustive"


def complete_template(m: int) -> Template:
    """Complete bipartite ``K_{3m,4m}``; trivially resilient."""
    edges = frozenset((x, z) for x in range(3 * m) for z in range(4 * m))
    return Template(m, 4 * m, edges)


def _matching_size(t: Template, removed: frozenset[int]) -> int:
    keep = [z for z in range(t.n_right) if z not in removed]
    index = {z: i for i, z in enumerate(keep)}
    adj: list[list[int]] = [[] for _ in range(t.n_left)]
    for x, z in sorted(t.edges):
        if z in index:
            adj[x].append(index[z])
    return sum(1 for v in hopcroft_karp(adj, len(keep)) if v >= 0)


def verify_template(t: Template, mode: str = "auto", samples: int = DEFAULT_SAMPLES,
                    seed: int = 0, fail_fast: bool = False, max_failures: int = 1000) -> TemplateReport:
    """Check that every (or a sample of) ``m``-subset of ``Z1`` leaves a perfect matching.

    ``mode`` is ``"exhaustive"``, ``"sampled"`` or ``"auto"`` (exhaustive for
    ``m <= 10``).  Sampled mode draws ``samples`` uniform subsets with ``seed``.
    """
    m = t.m
    if mode == "auto":
        mode = "exhaustive" if m <= EXHAUSTIVE_MAX_M else "sampled"
    if mode == "exhaustive":
        subsets: Iterable[tuple[int, ...]] = combinations(range(2 * m), m)
    elif mode == "sampled":
        rng = random.Random(seed)
        subsets = (tuple(sorted(rng.sample(range(2 * m), m))) for _ in range(samples))
    else:
        raise ValueError(f"unknown verification mode {mode!r}")
    checked = 0
    failures: list[tuple[int, ...]] = []
    for zbar in subsets:
        checked += 1
        if _matching_size(t, frozenset(zbar)) < 3 * m:
            if len(failures) < max_failures:
                failures.append(zbar)
            if fail_fast:
                break
    return TemplateReport(not failures, checked, failures, mode)


def generate_template(m: int, max_degree: int = 40, seed: int = 0, retry_budget: int = 100,
                      mode: str = "auto") -> Template:
    """Sample random sparse templates until one verifies.

    Each right vertex picks ``min(max_degree // 2, 3m)`` distinct random left
    neighbours; samples breaking the degree cap or failing verification are
    redrawn, at most ``retry_budget`` times.
    """
    if m < 1:
        raise ValueError("flexibility m must be at least 1")
    if max_degree < 3:
        raise ValueError("max_degree must be at least 3")
    rng = random.Random(seed)
    r = min(max_degree // 2, 3 * m)
    stats = {"attempts": 0, "degree_cap_rejections": 0, "verification_failures": 0}
    for _ in range(retry_budget):
        stats["attempts"] += 1
        edges = frozenset((x, z) for z in range(4 * m) for x in rng.sample(range(3 * m), r))
        cand = Template(m, max_degree, edges)
        if cand.degree_max() > max_degree:
            stats["degree_cap_rejections"] += 1
            continue
        report = verify_template(cand, mode, seed=rng.randrange(2**31), fail_fast=True)
        if report.passed:
            return replace(cand, verification={"mode": report.mode, "checked": report.checked, "pass": True})
        stats["verification_failures"] += 1
    raise TemplateError(f"no template with m={m}, max_degree={max_degree} in {retry_budget} attempts", stats)


def resilient_matching(t: Template, zbar: Iterable[int]) -> list[tuple[int, int]]:
    """Matching covering ``X`` and every right vertex outside ``zbar``.

    ``zbar`` must be an ``m``-subset of the flexible indices ``0..2m-1``.
    """
    removed = frozenset(zbar)
    if len(removed) != t.m or any(not 0 <= z < 2 * t.m for z in removed):
        raise ValueError(f"zbar must be an {t.m}-subset of the flexible set 0..{2 * t.m - 1}")
    keep = [z for z in range(t.n_right) if z not in removed]
    index = {z: i for i, z in enumerate(keep)}
    adj: list[list[int]] = [[] for _ in range(t.n_left)]
    for x, z in sorted(t.edges):
        if z in index:
            adj[x].append(index[z])
    match = hopcroft_karp(adj, len(keep))
    if any(v < 0 for v in match):
        raise TemplateError(f"no perfect matching after removing {sorted(removed)}")
    return [(x, keep[v]) for x, v in enumerate(match)]


def subset_count(m: int) -> int:
    return math.comb(2 * m, m)
