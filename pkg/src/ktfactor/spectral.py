"""Spectral parameter of regular graphs and the inequalities built on it."""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from . import _kernels
from .graph import Graph, degree_profile, to_mask

__all__ = [
    "SpectralError",
    "SpectralCertificate",
    "BijumbledEstimate",
    "DENSE_LIMIT",
    "adjacency_matrix",
    "spectrum",
    "second_eigenvalue",
    "certify",
    "hypothesis_threshold",
    "eml_slack",
    "edge_count_between",
    "lambda_floor",
    "degree_floor",
    "low_degree_count",
    "estimate_bijumbledness",
]

DENSE_LIMIT = 2000


class SpectralError(ValueError):
    """Non-regular input or an eigensolver that failed to converge."""


def adjacency_matrix(g: Graph) -> np.ndarray:
    bits = np.unpackbits(g.words.view(np.uint8), axis=1, bitorder="little")
    return bits[:, : g.n].astype(np.float64)


def spectrum(g: Graph) -> np.ndarray:
    """All adjacency eigenvalues in descending order (dense solve)."""
    return np.linalg.eigvalsh(adjacency_matrix(g))[::-1]


def _require_regular(g: Graph) -> int:
    regular, d = degree_profile(g)
    if not regular:
        raise SpectralError("graph is not regular")
    return d


def second_eigenvalue(g: Graph, tolerance: float = 1e-8, method: str = "auto", maxiter: int | None = None) -> float:
    """Largest absolute value among the non-principal adjacency eigenvalues.

    ``method="dense"`` diagonalizes the full matrix (LAPACK ``syevd``);
    ``method="iterative"`` runs Lanczos on the adjacency operator with the
    all-ones direction deflated, so its dominant eigenvalue is ``lambda``.
    ``auto`` picks dense for ``n <= 2000``.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    d = _require_regular(g)
    n = g.n
    if n <= 1:
        return 0.0
    if method == "auto":
        method = "dense" if n <= DENSE_LIMIT else "iterative"
    if method == "dense":
        mu = spectrum(g)
        return float(max(abs(mu[1]), abs(mu[-1])))
    if method != "iterative":
        raise ValueError(f"unknown method {method!r}")
    if n < 3:
        return second_eigenvalue(g, tolerance, "dense")
    edges = np.array(g.edges(), dtype=np.int64).reshape(-1, 2)
    rows = np.concatenate([edges[:, 0], edges[:, 1]])
    cols = np.concatenate([edges[:, 1], edges[:, 0]])
    a = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    shift = d / n

    def matvec(x):
        x = np.ravel(x)
        return a @ x - shift * x.sum()

    op = LinearOperator((n, n), matvec=matvec, dtype=np.float64)
    v0 = np.random.default_rng(0).standard_normal(n)
    try:
        vals = eigsh(op, k=1, which="LM", tol=tolerance / max(d, 1), v0=v0,
                     maxiter=maxiter or 20 * n, return_eigenvectors=False)
    except ArpackNoConvergence as exc:
        raise SpectralError(f"eigensolver did not converge: {exc}") from exc
    return float(abs(vals[0]))


def hypothesis_threshold(n: int, d: int, t: int, c: float) -> float:
    """``c * d**t / n**(t-1)``."""
    return c * d**t / n ** (t - 1)


def _sig12(x: float) -> float:
    return float(f"{x:.12g}")


@dataclass(frozen=True)
class SpectralCertificate:
    n: int
    d: int
    lam: float
    t: int
    c: float
    tolerance: float
    hypothesis_met: bool

    @property
    def threshold(self) -> float:
        return hypothesis_threshold(self.n, self.d, self.t, self.c)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "lambda": _sig12(self.lam),
            "t": self.t,
            "c": _sig12(self.c),
            "threshold": _sig12(self.threshold),
            "hypothesis_met": self.hypothesis_met,
            "tolerance": _sig12(self.tolerance),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def certify(g: Graph, t: int, c: float, tolerance: float = 1e-8) -> SpectralCertificate:
    """Compute ``lambda`` and test ``lambda <= c d^t / n^(t-1)`` (up to tolerance)."""
    if t < 3:
        raise ValueError("t must be at least 3")
    if c <= 0:
        raise ValueError("c must be positive")
    d = _require_regular(g)
    lam = second_eigenvalue(g, tolerance)
    met = lam <= hypothesis_threshold(g.n, d, t, c) + tolerance
    return SpectralCertificate(g.n, d, lam, t, c, tolerance, met)


def edge_count_between(g: Graph, a: Iterable[int] | int, b: Iterable[int] | int) -> int:
    """``e(A, B)``: ordered pairs ``(u, v)``, ``u in A``, ``v in B``, ``uv`` an edge."""
    return int(_kernels.edge_count_between(g, to_mask(a), to_mask(b)))


def eml_slack(g: Graph, a: Iterable[int] | int, b: Iterable[int] | int, lam: float) -> float:
    """``lam*sqrt(|A||B|) - |e(A,B) - (d/n)|A||B||``; positive for a valid ``lam``."""
    d = _require_regular(g)
    am, bm = to_mask(a), to_mask(b)
    if not am or not bm:
        raise ValueError("A and B must be nonempty")
    sa, sb = am.bit_count(), bm.bit_count()
    e = _kernels.edge_count_between(g, am, bm)
    return lam * math.sqrt(sa * sb) - abs(e - d / g.n * sa * sb)


def lambda_floor(d: int) -> float:
    """``sqrt(d/2)``: no regular graph with ``d <= n/2`` has smaller ``lambda``."""
    if d < 1:
        raise ValueError("d must be positive")
    return math.sqrt(d / 2)


def degree_floor(n: int, t: int) -> float:
    """``n^(1-1/(2t-1)) / 2^(1/(2t-1))``.

    Lower bound on ``d`` for any graph with ``d <= n/2`` and
    ``lambda <= d^t/n^(t-1)``; it is at least the cruder ``n^(1-1/(2t-1))/2``.
    """
    if n < 2 or t < 2:
        raise ValueError("need n >= 2 and t >= 2")
    e = 1.0 / (2 * t - 1)
    return n ** (1 - e) / 2**e


def low_degree_count(g: Graph, u: Iterable[int] | int, threshold: float) -> int:
    """Number of vertices with fewer than ``threshold`` neighbours in ``u``."""
    degs = _kernels.masked_degrees(g, to_mask(u))
    return int(np.count_nonzero(degs < threshold))


@dataclass(frozen=True)
class BijumbledEstimate:
    p: float
    lambda_lower_bound: float
    samples: int
    seed: int
    exhaustive: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def estimate_bijumbledness(g: Graph, p: float, samples: int, seed: int) -> BijumbledEstimate:
    """Sampled lower bound on the smallest ``lambda`` making ``g`` ``(lambda, p)``-bijumbled.

    The first sample is always ``A = B = V``.  When ``samples`` covers every
    pair of nonempty subsets the sweep is exhaustive and the bound is exact.
    """
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    if samples < 1:
        raise ValueError("samples must be at least 1")
    n = g.n
    full = g.full_mask

    def discrepancy(am: int, bm: int) -> float:
        sa, sb = am.bit_count(), bm.bit_count()
        e = _kernels.edge_count_between(g, am, bm)
        return abs(e - p * sa * sb) / math.sqrt(sa * sb)

    if n <= 16 and (2**n - 1) ** 2 <= samples:
        best = 0.0
        for am in range(1, full + 1):
            for bm in range(1, full + 1):
                best = max(best, discrepancy(am, bm))
        return BijumbledEstimate(p, best, (2**n - 1) ** 2, seed, exhaustive=True)

    rng = random.Random(seed)
    best = discrepancy(full, full) if n else 0.0
    for _ in range(samples - 1):
        masks = []
        for _ in range(2):
            size = rng.randint(1, n)
            masks.append(to_mask(rng.sample(range(n), size)))
        best = max(best, discrepancy(*masks))
    return BijumbledEstimate(p, best, samples, seed)
