"""Absorbing structures wired along a template, and absorption itself."""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import _kernels
from .cliques import Clique, _descend, greedy_descent_clique
from .config import PipelineConfig
from .graph import Graph, degree_profile, from_mask, to_mask
from .template import Template, TemplateError, generate_template, resilient_matching

__all__ = [
    "AbsorbingStructure",
    "BuildFailure",
    "AbsorberReport",
    "ConcentrationReport",
    "build_absorbing_structure",
    "verify_absorbing_structure",
    "absorb",
    "flexible_degree_check",
    "empirical_concentration",
]


class BuildFailure(RuntimeError):
    """Absorber construction gave up; ``stage`` is one of template, spiders,
    z_pool, cliques."""

    def __init__(self, stage: str, index: int | None = None, diagnostics: dict | None = None):
        self.stage = stage
        self.index = index
        self.diagnostics = diagnostics or {}
        where = f" at index {index}" if index is not None else ""
        super().__init__(f"absorber build failed in {stage}{where}: {self.diagnostics}")


@dataclass
class AbsorbingStructure:
    template: Template
    t: int
    K: list[Clique]
    A: dict[tuple[int, int], int]
    S: dict[tuple[int, int], Clique]
    Z: list[int]

    @property
    def m(self) -> int:
        return self.template.m

    @property
    def Z1(self) -> list[int]:
        return self.Z[: 2 * self.m]

    def vertex_mask(self) -> int:
        mask = to_mask(self.Z) | to_mask(self.A.values())
        for c in self.K:
            mask |= to_mask(c)
        for c in self.S.values():
            mask |= to_mask(c)
        return mask

    def vertices(self) -> frozenset[int]:
        return frozenset(from_mask(self.vertex_mask()))

    def to_dict(self) -> dict:
        tpl = self.template.to_dict()
        ref = hashlib.sha256(json.dumps(tpl, sort_keys=True).encode()).hexdigest()[:16]
        return {
            "t": self.t,
            "m": self.m,
            "template_ref": ref,
            "template": tpl,
            "K": [list(c) for c in self.K],
            "A": {f"{i},{j}": v for (i, j), v in sorted(self.A.items())},
            "S": {f"{i},{j}": list(c) for (i, j), c in sorted(self.S.items())},
            "Z": list(self.Z),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AbsorbingStructure":
        def key(s: str) -> tuple[int, int]:
            i, j = s.split(",")
            return int(i), int(j)

        return cls(
            Template.from_dict(data["template"]),
            int(data["t"]),
            [tuple(c) for c in data["K"]],
            {key(k): int(v) for k, v in data["A"].items()},
            {key(k): tuple(c) for k, c in data["S"].items()},
            [int(z) for z in data["Z"]],
        )


def _bool_to_mask(flags: np.ndarray) -> int:
    return int.from_bytes(np.packbits(flags.astype(np.uint8), bitorder="little").tobytes(), "little")


def _mean_degree(g: Graph) -> float:
    return 2 * g.edge_count / g.n if g.n else 0.0


def _spider(g: Graph, base_region: int, apex_region: int, t: int, b: int) -> tuple[Clique, list[int]] | None:
    base, _, _ = _descend(g, base_region, t - 1)
    if base is None:
        return None
    common = apex_region
    for v in base:
        common &= g.rows[v]
    apexes = from_mask(common)
    if len(apexes) < b:
        return None
    return base, apexes


def _place_spiders(g: Graph, t: int, template: Template, cfg: PipelineConfig):
    """Vertex-disjoint spiders, one per template left vertex.

    After the first spider, bases are sought inside the neighbourhood of the
    first spider's first apex (falling back to the whole free set), so later
    apex classes share neighbourhoods with earlier ones.
    """
    avail = g.full_mask
    K: list[Clique] = []
    A: dict[tuple[int, int], int] = {}
    hub = None
    for i in range(template.n_left):
        zs = template.right_neighbors(i)
        need = max(1, len(zs))
        regions = []
        if hub is not None:
            regions.append(avail & g.rows[hub])
        regions.append(avail)
        found = None
        for region in regions:
            for b in dict.fromkeys((max(cfg.spider_apexes, need), need)):
                found = _spider(g, region, avail, t, b)
                if found:
                    break
            if found:
                break
        if found is None:
            raise BuildFailure("spiders", i, {
                "spiders_found": i, "needed": template.n_left, "apexes_needed": need,
                "free_vertices": avail.bit_count(),
            })
        base, apexes = found
        kept = apexes[: len(zs)]
        if hub is None and kept:
            hub = kept[0]
        K.append(base)
        for z, a in zip(zs, kept):
            A[i, z] = a
        avail &= ~(to_mask(base) | to_mask(kept))
    return K, A, g.full_mask & ~avail


def _codegree_floor(g: Graph, t: int, cfg: PipelineConfig) -> float:
    if cfg.codegree_floor is not None:
        base = cfg.codegree_floor
    else:
        d = _mean_degree(g)
        base = d * d / (4 * g.n) if g.n else 0.0
    return max(base, 3 * (t - 1))


def _select_z(g: Graph, t: int, template: Template, A: dict, used: int, rng: random.Random,
              cfg: PipelineConfig):
    """Sequentially draw ``z_j`` and the cliques ``S_ij`` for ``j = 0..4m-1``.

    ``z_j`` is uniform among free vertices outside the bad set ``B_j`` and
    outside the vertices already rejected for this ``j``; a draw is rejected
    when some ``S_ij`` cannot be found, up to ``cfg.z_attempts`` draws.
    """
    floor = _codegree_floor(g, t, cfg)
    Z: list[int] = []
    S: dict[tuple[int, int], Clique] = {}
    for j in range(template.n_right):
        xs = template.left_neighbors(j)
        bad = 0
        for i in xs:
            pool_i = g.rows[A[i, j]] & ~used
            bad |= _bool_to_mask(_kernels.masked_degrees(g, pool_i) < floor)
        pool = g.full_mask & ~used & ~bad
        rejected = 0
        for attempt in range(cfg.z_attempts):
            cands = from_mask(pool & ~rejected)
            if not cands:
                raise BuildFailure("z_pool", j, {
                    "free": (g.full_mask & ~used).bit_count(), "bad": bad.bit_count(),
                    "rejected": rejected.bit_count(), "codegree_floor": floor,
                })
            z = rng.choice(cands)
            picks = _pick_s(g, t, xs, j, z, A, used | (1 << z))
            if picks is not None:
                Z.append(z)
                used |= 1 << z
                for i, clique in picks.items():
                    S[i, j] = clique
                    used |= to_mask(clique)
                break
            rejected |= 1 << z
        else:
            raise BuildFailure("cliques", j, {
                "attempts": cfg.z_attempts, "pool": pool.bit_count(), "codegree_floor": floor,
            })
    return Z, S, used


def _pick_s(g: Graph, t: int, xs: list[int], j: int, z: int, A: dict, taken: int) -> dict | None:
    picks = {}
    for i in xs:
        clique = greedy_descent_clique(g, g.rows[A[i, j]] & g.rows[z] & ~taken, t - 1)
        if clique is None:
            return None
        picks[i] = clique
        taken |= to_mask(clique)
    return picks


def _deficit(degs: np.ndarray, threshold: float) -> tuple[int, float]:
    short = np.maximum(threshold - degs, 0.0)
    return int(np.count_nonzero(short)), float(short.sum())


def _dense_rows(g: Graph, vertices: list[int]) -> np.ndarray:
    """0/1 adjacency rows of ``vertices`` as an int32 matrix."""
    bits = np.unpackbits(g.words[vertices].view(np.uint8), axis=1, bitorder="little")
    return bits[:, : g.n].astype(np.int32)


def _refine_z1(g: Graph, t: int, template: Template, A: dict, Z: list[int], S: dict, used: int,
               rng: random.Random, cfg: PipelineConfig) -> None:
    """Swap flexible vertices to lift every ``|N(v) & Z1|`` to ``d|Z1|/(2n)``.

    Each round takes one vertex still below the threshold and moves some
    ``z_j`` (``j < 2m``) not adjacent to it onto a neighbour of it from the
    same candidate pool, re-picking the cliques ``S_ij``.  A move is kept only
    if it lowers (number below threshold, total shortfall).  Vertices that
    admit no such move are skipped afterwards.  Edits ``Z`` and ``S`` in place.
    """
    m = template.m
    floor = _codegree_floor(g, t, cfg)
    threshold = _mean_degree(g) * 2 * m / (2 * g.n)
    degs = _kernels.masked_degrees(g, to_mask(Z[: 2 * m])).astype(np.int32)
    score = _deficit(degs, threshold)
    stuck: set[int] = set()
    pools: dict[int, tuple[int, int]] = {}  # j -> (freed vertices, candidate pool); reset on every move
    dead: set[tuple[int, int]] = set()  # (j, z) without cliques S_ij; reset on every move
    for _ in range(cfg.z_refine_rounds):
        if score[0] == 0:
            return
        low = [int(v) for v in np.flatnonzero(degs < threshold) if int(v) not in stuck]
        if not low:
            return
        v = low[rng.randrange(len(low))]
        js = [j for j in range(2 * m) if not g.rows[v] >> Z[j] & 1 and Z[j] != v]
        rng.shuffle(js)
        moved = False
        for j in js:
            xs = template.left_neighbors(j)
            if j not in pools:
                own = 1 << Z[j]
                for i in xs:
                    own |= to_mask(S[i, j])
                free_used = used & ~own
                bad = 0
                for i in xs:
                    pool_i = g.rows[A[i, j]] & ~free_used
                    bad |= _bool_to_mask(_kernels.masked_degrees(g, pool_i) < floor)
                pools[j] = (free_used, g.full_mask & ~free_used & ~bad)
            free_used, pool = pools[j]
            cands = from_mask(g.rows[v] & pool)
            if not cands:
                continue
            base = degs - _dense_rows(g, [Z[j]])[0]
            trial = base[None, :] + _dense_rows(g, cands)
            short = np.maximum(threshold - trial, 0.0)
            scores = list(zip(np.count_nonzero(short, axis=1).tolist(), short.sum(axis=1).tolist()))
            order = sorted((k for k in range(len(cands)) if scores[k] < score), key=lambda k: (scores[k], cands[k]))
            tries = 0
            for k in order:
                z = cands[k]
                if (j, z) in dead:
                    continue
                if tries == 16:
                    break
                tries += 1
                picks = _pick_s(g, t, xs, j, z, A, free_used | (1 << z))
                if picks is None:
                    dead.add((j, z))
                    continue
                Z[j] = z
                used = free_used | (1 << z)
                for i, clique in picks.items():
                    S[i, j] = clique
                    used |= to_mask(clique)
                degs, score = trial[k], scores[k]
                pools.clear()
                dead.clear()
                moved = True
                break
            if moved:
                break
        if not moved:
            stuck.add(v)


def build_absorbing_structure(g: Graph, t: int, m: int, seed: int, cfg: PipelineConfig | None = None,
                              template: Template | None = None) -> AbsorbingStructure:
    """Build an absorbing structure of flexibility ``m`` inside ``g``.

    The random draw of ``Z`` is followed by up to ``cfg.z_refine_rounds``
    local swaps that raise low flexible degrees.  Raises
    :class:`BuildFailure` with the failing stage and diagnostics.
    """
    if t < 3:
        raise ValueError("t must be at least 3")
    if m < 1:
        raise ValueError("m must be at least 1")
    cfg = cfg or PipelineConfig(t=t)
    rng = random.Random(seed)
    template_seed = rng.randrange(2**31)
    if template is None:
        try:
            template = generate_template(m, cfg.template_max_degree, template_seed, cfg.template_retry_budget)
        except TemplateError as exc:
            raise BuildFailure("template", None, dict(exc.stats)) from exc
    elif template.m != m:
        raise ValueError(f"template has flexibility {template.m}, expected {m}")
    K, A, used = _place_spiders(g, t, template, cfg)
    Z, S, used = _select_z(g, t, template, A, used, rng, cfg)
    if cfg.z_refine_rounds:
        _refine_z1(g, t, template, A, Z, S, used, rng, cfg)
    return AbsorbingStructure(template, t, K, A, S, Z)


@dataclass
class AbsorberReport:
    passed: bool
    violations: list[tuple] = field(default_factory=list)


def verify_absorbing_structure(g: Graph, s: AbsorbingStructure) -> AbsorberReport:
    """Re-check every defining property of ``s`` against ``g``."""
    v: list[tuple] = []
    m, t, tpl = s.m, s.t, s.template
    n = g.n

    def in_range(vs) -> bool:
        return all(0 <= x < n for x in vs)

    if len(s.K) != 3 * m:
        v.append(("cardinality", "K", len(s.K), 3 * m))
    if len(s.Z) != 4 * m:
        v.append(("cardinality", "Z", len(s.Z), 4 * m))
    if len(s.Z1) != 2 * m:
        v.append(("cardinality", "Z1", len(s.Z1), 2 * m))
    if set(s.A) != set(tpl.edges):
        v.append(("apex_keys", sorted(set(tpl.edges) ^ set(s.A))))
    if set(s.S) != set(tpl.edges):
        v.append(("clique_keys", sorted(set(tpl.edges) ^ set(s.S))))

    classes = {
        "K": [x for c in s.K for x in c],
        "S": [x for c in s.S.values() for x in c],
        "A": list(s.A.values()),
        "Z": list(s.Z),
    }
    for name, vs in classes.items():
        if not in_range(vs):
            # later checks would index out of range
            v.append(("out_of_range", name))
            return AbsorberReport(False, v)
        if len(set(vs)) != len(vs):
            v.append(("overlap_within", name))
    names = list(classes)
    for a in range(len(names)):
        for b in range(a + 1, len(names)):
            common = set(classes[names[a]]) & set(classes[names[b]])
            if common:
                v.append(("overlap_between", names[a], names[b], sorted(common)))

    for i, c in enumerate(s.K):
        if len(c) != t - 1 or not g.is_clique(c):
            v.append(("K_not_clique", i))
    for (i, j) in sorted(tpl.edges):
        if (i, j) not in s.A or (i, j) not in s.S or i >= len(s.K) or j >= len(s.Z):
            continue
        a, sc = s.A[i, j], s.S[i, j]
        if len(sc) != t - 1:
            v.append(("S_wrong_order", i, j))
        if not g.is_clique((a, *s.K[i])):
            v.append(("apex_K_not_clique", i, j))
        if not g.is_clique((a, *sc)):
            v.append(("apex_S_not_clique", i, j))
        if not g.is_clique((s.Z[j], *sc)):
            v.append(("z_S_not_clique", i, j))
    return AbsorberReport(not v, v)


def absorb(s: AbsorbingStructure, zbar: Iterable[int]) -> list[Clique]:
    """``t``-cliques covering exactly ``V(s)`` minus ``zbar``.

    ``zbar`` is an ``m``-subset of the host vertices in ``Z1``.
    """
    zbar = list(zbar)
    pos = {z: j for j, z in enumerate(s.Z1)}
    if len(set(zbar)) != s.m or any(z not in pos for z in zbar):
        raise ValueError(f"zbar must be {s.m} distinct vertices of Z1")
    matching = resilient_matching(s.template, [pos[z] for z in zbar])
    matched = set(matching)
    out: list[Clique] = []
    for i, j in matching:
        out.append(tuple(sorted((s.A[i, j], *s.K[i]))))
        out.append(tuple(sorted((s.Z[j], *s.S[i, j]))))
    for e in sorted(s.template.edges):
        if e not in matched:
            out.append(tuple(sorted((s.A[e], *s.S[e]))))
    return out


def flexible_degree_check(g: Graph, s: AbsorbingStructure) -> tuple[int, float, bool]:
    """``(min_v |N(v) & Z1|, d|Z1|/(2n), min >= threshold)``."""
    regular, d = degree_profile(g)
    if not regular:
        raise ValueError("flexible_degree_check needs a regular graph")
    z1 = s.Z1
    degs = _kernels.masked_degrees(g, to_mask(z1))
    low = int(degs.min()) if g.n else 0
    threshold = d * len(z1) / (2 * g.n)
    return low, threshold, low >= threshold


@dataclass
class ConcentrationReport:
    runs: int
    delta: float
    x: float
    epsilon: float
    min_flexible_degree: list[int]
    failure_rate: float
    build_failures: int

    @property
    def bound(self) -> float:
        return math.exp(-self.delta**2 * self.x / 3)


def empirical_concentration(g: Graph, t: int, m: int, runs: int, delta: float, seed: int,
                            cfg: PipelineConfig | None = None) -> ConcentrationReport:
    """Repeat the random ``Z`` selection and measure how often ``deg(v, Z1)``
    falls below ``(1-delta)x`` with ``x = (1-140 t eps)(d/n)|Z1|``, ``eps = m/d``.

    Template and spiders are built once; each run redraws ``Z`` and ``S``
    from an independent child seed.
    """
    if runs < 1:
        raise ValueError("runs must be at least 1")
    if not 0 < delta < 1.5:
        raise ValueError("delta must lie in (0, 3/2)")
    regular, d = degree_profile(g)
    if not regular or not d:
        raise ValueError("empirical_concentration needs a regular graph of positive degree")
    cfg = cfg or PipelineConfig(t=t)
    seeds = np.random.SeedSequence(seed).generate_state(runs + 1)
    try:
        template = generate_template(m, cfg.template_max_degree, int(seeds[0]), cfg.template_retry_budget)
        K, A, used = _place_spiders(g, t, template, cfg)
    except (TemplateError, BuildFailure):
        return ConcentrationReport(runs, delta, 0.0, m / d, [], 0.0, runs)
    eps = m / d
    x = (1 - 140 * t * eps) * (d / g.n) * 2 * m
    cutoff = (1 - delta) * x
    mins: list[int] = []
    below = 0
    failures = 0
    for r in range(runs):
        try:
            Z, _, _ = _select_z(g, t, template, A, used, random.Random(int(seeds[r + 1])), cfg)
        except BuildFailure:
            failures += 1
            continue
        degs = _kernels.masked_degrees(g, to_mask(Z[: 2 * m]))
        mins.append(int(degs.min()))
        below += int(np.count_nonzero(degs < cutoff))
    ok = runs - failures
    rate = below / (ok * g.n) if ok else 0.0
    return ConcentrationReport(runs, delta, x, eps, mins, rate, failures)
