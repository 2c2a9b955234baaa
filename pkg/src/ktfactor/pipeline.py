"""End-to-end ``K_t``-factor search and independent verification.

The absorbing route runs in stages: certify the spectral gap, build an
absorbing structure ``W``, tile ``V - W`` greedily, cover the leftover ``U``
with cliques from the flexible set via disjoint representatives, tile the
rest of the flexible set down to ``m`` vertices, and let the absorber swallow
those.  In the dense regime a budgeted exact search backs up a failed run.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .absorber import BuildFailure, absorb, build_absorbing_structure
from .cliques import FOUND, Clique, Tiling, exact_factor, greedy_tiling, repair_tiling
from .config import ConfigError, PipelineConfig, min_leftover
from .graph import Graph, degree_profile, from_mask, to_mask
from .sdr import build_candidate_family, solve_sdr
from .spectral import SpectralError, certify
from .template import TemplateError

__all__ = [
    "KtFactor",
    "FailureReport",
    "FactorReport",
    "FractionalReport",
    "InternalInvariantError",
    "STAGES",
    "kt_factor",
    "verify_factor",
    "verify_fractional_factor",
    "factor_from_dict",
]

log = logging.getLogger(__name__)

STAGES = ("divisibility", "certification", "absorber", "tiling", "sdr", "final_tiling", "absorption")


class InternalInvariantError(RuntimeError):
    """An assembled factor failed self-verification; always a bug."""


@dataclass
class KtFactor:
    t: int
    n: int
    cliques: list[Clique]
    route: str = "absorbing"
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"t": self.t, "cliques": [list(c) for c in self.cliques], "metadata": self.metadata}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass
class FailureReport:
    stage: str
    diagnostics: dict
    partial: Tiling

    @property
    def coverage(self) -> float:
        n = len(self.partial.covered) + len(self.partial.leftover)
        return len(self.partial.covered) / n if n else 0.0

    def to_dict(self) -> dict:
        return {"stage": self.stage, "diagnostics": self.diagnostics, "coverage": round(self.coverage, 12),
                "partial": [list(c) for c in self.partial.cliques]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=str)


@dataclass
class FactorReport:
    passed: bool
    violations: list[tuple] = field(default_factory=list)


@dataclass
class FractionalReport:
    passed: bool
    max_violation: float


def factor_from_dict(data: Mapping, n: int) -> KtFactor:
    t = int(data["t"])
    return KtFactor(t, n, [tuple(int(v) for v in c) for c in data["cliques"]], data.get("route", "file"))


def verify_factor(g: Graph, factor: KtFactor) -> FactorReport:
    """Check ``factor`` against ``g`` directly: count, disjointness, coverage, adjacency."""
    t, n = factor.t, g.n
    v: list[tuple] = []
    if t < 1 or n % t:
        v.append(("divisibility", n, t))
    elif len(factor.cliques) != n // t:
        v.append(("count", len(factor.cliques), n // t))
    owner: dict[int, int] = {}
    for idx, c in enumerate(factor.cliques):
        if len(c) != t:
            v.append(("order", idx, len(c)))
        for x in c:
            if not 0 <= x < n:
                v.append(("out_of_range", idx, x))
                continue
            if x in owner:
                v.append(("duplicate", x, owner[x], idx))
            else:
                owner[x] = idx
        good = [x for x in c if 0 <= x < n]
        for a in range(len(good)):
            for b in range(a + 1, len(good)):
                if good[a] == good[b]:
                    continue
                if not g.has_edge(good[a], good[b]):
                    v.append(("non_edge", idx, min(good[a], good[b]), max(good[a], good[b])))
    missing = [x for x in range(n) if x not in owner]
    if missing:
        v.append(("uncovered", missing))
    return FactorReport(not v, v)


def verify_fractional_factor(g: Graph, weights: Mapping[Iterable[int], float], t: int, tol: float = 1e-9) -> FractionalReport:
    """Check that clique weights sum to 1 at every vertex (within ``tol``)."""
    load = [0.0] * g.n
    for key, w in weights.items():
        c = tuple(key)
        if len(c) != t or not g.is_clique(c) or any(not 0 <= x < g.n for x in c):
            raise ValueError(f"{c} is not a {t}-clique of the graph")
        if w < -tol:
            raise ValueError(f"negative weight {w} on {c}")
        for x in c:
            load[x] += w
    worst = max((abs(s - 1.0) for s in load), default=0.0)
    return FractionalReport(worst <= tol, worst)


def _partial(g: Graph, cliques: list[Clique]) -> Tiling:
    covered = to_mask(x for c in cliques for x in c)
    return Tiling(list(cliques), frozenset(from_mask(covered)),
                  frozenset(from_mask(g.full_mask & ~covered)))


class _StageFailure(Exception):
    def __init__(self, stage: str, diagnostics: dict, cliques: list[Clique]):
        super().__init__(stage)
        self.stage = stage
        self.diagnostics = diagnostics
        self.cliques = cliques


def _absorbing_route(g: Graph, cfg: PipelineConfig, d: int, meta: dict) -> list[Clique]:
    t = cfg.t
    m = cfg.flexibility_for(d)
    stop = cfg.stop_for(d)
    meta.update(m=m, stop_threshold=stop)

    try:
        s = build_absorbing_structure(g, t, m, cfg.seed, cfg)
    except BuildFailure as exc:
        raise _StageFailure("absorber", {"build_stage": exc.stage, "index": exc.index, **exc.diagnostics}, [])
    w = s.vertex_mask()
    meta["absorber_size"] = w.bit_count()

    target = max(stop, min_leftover(m, t))
    tiling = greedy_tiling(g, w, t, target)
    if tiling.stalled:
        tiling = repair_tiling(g, tiling, t, target)
        meta["tiling_repaired"] = True
    cliques = list(tiling.cliques)
    u = sorted(tiling.leftover)
    meta.update(tiled_cliques=len(tiling.cliques), leftover=len(u),
                threshold_violations=tiling.threshold_violations)
    if w.bit_count() + len(tiling.covered) + len(u) != g.n:
        raise InternalInvariantError("vertex accounting broken after greedy tiling")
    if (t - 1) * len(u) > m:
        raise _StageFailure("tiling", {"leftover": len(u), "capacity": m // (t - 1),
                                       "stalled": tiling.stalled}, cliques)

    z1 = s.Z1
    family = build_candidate_family(g, u, z1, t, cfg.sdr_cap)
    res = solve_sdr(family, cfg.sdr_node_budget)
    if not res.found:
        raise _StageFailure("sdr", {"outcome": res.status, "nodes": res.nodes,
                                    "candidates": {str(k): v for k, v in family.sizes().items()}}, cliques)
    sdr_used = 0
    for v, c in res.solution.items():
        cliques.append(tuple(sorted((v, *c))))
        sdr_used |= to_mask(c)
    meta["sdr_cliques"] = len(res.solution)

    rest = to_mask(z1) & ~sdr_used
    final = greedy_tiling(g, 0, t, m, within=rest)
    if len(final.leftover) != m:
        final = repair_tiling(g, final, t, m)
    cliques += final.cliques
    meta["flexible_cliques"] = len(final.cliques)
    if len(final.leftover) != m:
        raise _StageFailure("final_tiling", {"remaining": len(final.leftover), "target": m}, cliques)

    # the absorber must release exactly the flexible vertices already consumed
    consumed = sorted(set(z1) - final.leftover)
    try:
        absorbed = absorb(s, consumed)
    except (ValueError, TemplateError) as exc:
        raise _StageFailure("absorption", {"error": str(exc)}, cliques)
    meta["absorbed_cliques"] = len(absorbed)
    return cliques + absorbed


def kt_factor(g: Graph, cfg: PipelineConfig | None = None) -> KtFactor | FailureReport:
    """Find a ``K_t``-factor of the regular graph ``g`` or explain why not.

    A returned :class:`KtFactor` has always passed :func:`verify_factor`.
    Invalid configurations raise :class:`ConfigError`.
    """
    cfg = (cfg or PipelineConfig()).resolved()
    t, n = cfg.t, g.n
    meta: dict = {"seed": cfg.seed}

    def fail(stage: str, diagnostics: dict, cliques: list[Clique] | None = None) -> FailureReport:
        if not cliques:
            cliques = greedy_tiling(g, 0, t, 0).cliques
        return FailureReport(stage, diagnostics, _partial(g, cliques))

    if n == 0 or n % t:
        return fail("divisibility", {"n": n, "t": t})
    regular, d = degree_profile(g)
    if not regular:
        return fail("certification", {"reason": "graph is not regular"})
    try:
        cert = certify(g, t, cfg.c, cfg.tolerance)
    except SpectralError as exc:
        return fail("certification", {"reason": str(exc)})
    meta["certificate"] = cert.to_dict()
    if cfg.enforce_spectral_hypothesis and not cert.hypothesis_met:
        return fail("certification", {"reason": "spectral hypothesis not met", **cert.to_dict()})
    dense = d / n > cfg.dense_cutoff
    meta["dense_regime"] = dense

    try:
        cliques = _absorbing_route(g, cfg, d, meta)
        route = "absorbing"
    except _StageFailure as exc:
        log.info("absorbing route failed at %s: %s", exc.stage, exc.diagnostics)
        fallback_ok = dense and (cfg.fallback_max_n is None or n <= cfg.fallback_max_n)
        if not fallback_ok:
            return fail(exc.stage, exc.diagnostics, exc.cliques)
        res = exact_factor(g, t, cfg.fallback_node_budget)
        meta["absorbing_failure"] = {"stage": exc.stage, **exc.diagnostics}
        meta["fallback"] = {"outcome": res.status, "nodes": res.nodes}
        if res.status != FOUND:
            diag = dict(exc.diagnostics)
            diag["fallback"] = {"outcome": res.status, "nodes": res.nodes}
            return fail(exc.stage, diag, exc.cliques)
        cliques = res.solution
        route = "exact_fallback"

    meta["route"] = route
    factor = KtFactor(t, n, sorted(tuple(sorted(c)) for c in cliques), route, meta)
    report = verify_factor(g, factor)
    if not report.passed:
        raise InternalInvariantError(f"assembled factor failed verification: {report.violations[:5]}")
    return factor
