"""Run configuration for the factor pipeline and absorber construction."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

__all__ = ["PipelineConfig", "ConfigError"]


class ConfigError(ValueError):
    """Parameter combination the pipeline cannot honour."""


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs for :func:`ktfactor.pipeline.kt_factor`.

    ``None`` fields take default constants derived from ``t``:
    ``epsilon = min(1/(300t), 1/t^2)``, ``c = epsilon^2 / 2^(t+1)``,
    ``dense_cutoff = epsilon/(2t)``, ``m = floor(epsilon*d)`` and
    ``stop_threshold = floor(epsilon^2 * d)``.
    """

    t: int = 3
    epsilon: float | None = None
    c: float | None = None
    m_override: int | None = None
    codegree_floor: float | None = None
    stop_threshold: int | None = None
    dense_cutoff: float | None = None
    seed: int = 0
    enforce_spectral_hypothesis: bool = False
    tolerance: float = 1e-8
    # absorber construction
    template_max_degree: int = 40
    template_retry_budget: int = 200
    spider_apexes: int = 40
    z_attempts: int = 64
    z_refine_rounds: int = 64
    # leftover cover and fallback search
    sdr_cap: int = 200
    sdr_node_budget: int = 200_000
    fallback_node_budget: int = 1_000_000
    fallback_max_n: int | None = None

    def resolved(self) -> "PipelineConfig":
        t = self.t
        if t < 3:
            raise ConfigError("t must be at least 3")
        eps = self.epsilon if self.epsilon is not None else min(1 / (300 * t), t**-2)
        if not 0 < eps < 1:
            raise ConfigError("epsilon must lie in (0, 1)")
        c = self.c if self.c is not None else eps**2 / 2 ** (t + 1)
        if c <= 0:
            raise ConfigError("c must be positive")
        cutoff = self.dense_cutoff if self.dense_cutoff is not None else eps / (2 * t)
        if self.template_max_degree < 3:
            raise ConfigError("template_max_degree must be at least 3")
        if self.spider_apexes < 1 or self.z_attempts < 1 or self.sdr_cap < 1:
            raise ConfigError("spider_apexes, z_attempts and sdr_cap must be positive")
        if self.z_refine_rounds < 0:
            raise ConfigError("z_refine_rounds must be non-negative")
        return replace(self, epsilon=eps, c=c, dense_cutoff=cutoff)

    def stop_for(self, d: int) -> int:
        eps = self.resolved().epsilon
        if self.stop_threshold is not None:
            if self.stop_threshold < 0:
                raise ConfigError("stop_threshold must be non-negative")
            return self.stop_threshold
        return math.floor(eps**2 * d)

    def flexibility_for(self, d: int) -> int:
        """Absorber flexibility ``m`` for degree ``d``.

        An override is validated strictly.  Otherwise the smallest ``m >=
        max(1, floor(epsilon*d))`` whose leftover bookkeeping closes is used.
        """
        t = self.t
        stop = self.stop_for(d)
        if self.m_override is not None:
            check_alignment(self.m_override, t, stop)
            return self.m_override
        m = max(1, math.floor(self.resolved().epsilon * d))
        while not _aligned(m, t, stop):
            m += 1
        return m

    def to_dict(self) -> dict:
        return asdict(self)


def min_leftover(m: int, t: int) -> int:
    """Smallest leftover ``u >= 0`` with ``u = -m (mod t)``.

    When ``t | n`` the vertices outside an absorber of flexibility ``m``
    number ``-m (mod t)``, so greedy ``t``-tiling cannot leave fewer.
    """
    return (-m) % t


def _aligned(m: int, t: int, stop: int) -> bool:
    return (t - 1) * max(stop, min_leftover(m, t)) <= m


def check_alignment(m: int, t: int, stop: int) -> None:
    if m < 1:
        raise ConfigError("flexibility m must be at least 1")
    if (t - 1) * stop > m:
        raise ConfigError(f"(t-1)*stop_threshold = {(t - 1) * stop} exceeds |Z1| - m = {m}")
    u0 = min_leftover(m, t)
    if (t - 1) * u0 > m:
        raise ConfigError(
            f"m={m} forces at least {u0} leftover vertices, needing {(t - 1) * u0} > m flexible vertices"
        )
