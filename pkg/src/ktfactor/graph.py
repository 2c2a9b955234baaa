"""Immutable simple graphs over dense bitset adjacency, plus the edge-list format.

Vertex sets are passed around internally as Python ``int`` bitmasks (bit ``v``
set iff ``v`` is a member).  The public functions accept any iterable of
vertex ids and return ``frozenset`` values, so callers never need to touch
masks unless they want the speed.
"""

from __future__ import annotations

import io
import os
from collections.abc import Iterable
from typing import BinaryIO, TextIO, Union

import numpy as np

__all__ = [
    "Graph",
    "EdgeListError",
    "load_edge_list",
    "write_edge_list",
    "read_edge_list_file",
    "write_edge_list_file",
    "degree_profile",
    "common_neighborhood",
    "to_mask",
    "from_mask",
]


class EdgeListError(ValueError):
    """Raised when an edge-list document violates the format."""


def to_mask(vertices: Iterable[int] | int) -> int:
    if isinstance(vertices, int):
        return vertices
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def from_mask(mask: int) -> list[int]:
    """Members of ``mask`` in ascending order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    Instances are immutable; ``rows[v]`` is the neighbourhood of ``v`` as a
    bitmask.  Equality compares adjacency exactly.
    """

    __slots__ = ("_n", "_rows", "_edge_count", "_words", "_degrees")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        rows = [0] * n
        count = 0
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if rows[u] >> v & 1:
                raise ValueError(f"duplicate edge ({min(u, v)}, {max(u, v)})")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
            count += 1
        self._n = n
        self._rows = tuple(rows)
        self._edge_count = count
        self._words = None
        self._degrees = None

    @classmethod
    def from_rows(cls, rows: Iterable[int]) -> "Graph":
        """Build from adjacency bitmasks; symmetry and looplessness are checked."""
        rows = tuple(rows)
        n = len(rows)
        full = (1 << n) - 1
        for v, r in enumerate(rows):
            if r & ~full:
                raise ValueError(f"row {v} has bits beyond n={n}")
            if r >> v & 1:
                raise ValueError(f"self-loop at vertex {v}")
        for v, r in enumerate(rows):
            for u in from_mask(r):
                if not rows[u] >> v & 1:
                    raise ValueError(f"asymmetric adjacency between {u} and {v}")
        g = cls.__new__(cls)
        g._n = n
        g._rows = rows
        g._edge_count = sum(r.bit_count() for r in rows) // 2
        g._words = None
        g._degrees = None
        return g

    @property
    def n(self) -> int:
        return self._n

    @property
    def rows(self) -> tuple[int, ...]:
        return self._rows

    @property
    def edge_count(self) -> int:
        return self._edge_count

    @property
    def full_mask(self) -> int:
        return (1 << self._n) - 1

    @property
    def words(self) -> np.ndarray:
        """Adjacency as an ``(n, ceil(n/64))`` little-endian uint64 matrix."""
        if self._words is None:
            nw = max(1, (self._n + 63) // 64)
            buf = b"".join(r.to_bytes(nw * 8, "little") for r in self._rows)
            words = np.frombuffer(buf, dtype="<u8").reshape(self._n, nw).copy()
            words.setflags(write=False)
            self._words = words
        return self._words

    def degree(self, v: int) -> int:
        return self._rows[v].bit_count()

    def degrees(self) -> list[int]:
        if self._degrees is None:
            self._degrees = [r.bit_count() for r in self._rows]
        return list(self._degrees)

    def neighbors(self, v: int) -> list[int]:
        return from_mask(self._rows[v])

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self._rows[u] >> v & 1)

    def edges(self) -> list[tuple[int, int]]:
        """All edges ``(u, v)`` with ``u < v`` in lexicographic order."""
        out = []
        for u, r in enumerate(self._rows):
            out.extend((u, v) for v in from_mask(r >> (u + 1) << (u + 1)))
        return out

    def is_clique(self, vertices: Iterable[int]) -> bool:
        vs = list(vertices)
        if len(set(vs)) != len(vs):
            return False
        return all(self.has_edge(a, b) for i, a in enumerate(vs) for b in vs[i + 1:])

    def relabel(self, perm: list[int]) -> "Graph":
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        return Graph(self._n, ((perm[u], perm[v]) for u, v in self.edges()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._rows == other._rows

    def __hash__(self) -> int:
        return hash(self._rows)

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, edges={self._edge_count})"


def degree_profile(g: Graph) -> tuple[bool, int | None]:
    """``(True, d)`` if every vertex has degree ``d``, else ``(False, None)``."""
    degs = set(g.degrees())
    if len(degs) == 1:
        return True, degs.pop()
    if not degs:
        return True, 0
    return False, None


def common_neighborhood(g: Graph, s: Iterable[int] | int) -> frozenset[int]:
    """Vertices adjacent to every member of ``s``, excluding ``s`` itself."""
    mask = to_mask(s)
    if not mask:
        raise ValueError("common neighbourhood of an empty set is undefined")
    common = g.full_mask & ~mask
    for v in from_mask(mask):
        common &= g.rows[v]
    return frozenset(from_mask(common))


# --- edge-list format ---------------------------------------------------------

def _parse_pair(line: str, lineno: int) -> tuple[int, int]:
    parts = line.split(" ")
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise EdgeListError(f"line {lineno}: expected '<int> <int>', got {line!r}")
    return int(parts[0]), int(parts[1])


def load_edge_list(data: Union[bytes, str, BinaryIO, TextIO]) -> Graph:
    """Parse an edge-list document.

    Line 1 is ``<n> <m>``; then ``m`` lines ``<u> <v>`` with ``u < v < n``.
    Lines starting with ``#`` are comments.  A missing newline after the last
    line is tolerated; duplicate edges and self-loops are rejected.
    """
    if hasattr(data, "read"):
        data = data.read()
    if isinstance(data, bytes):
        try:
            data = data.decode("ascii")
        except UnicodeDecodeError as exc:
            raise EdgeListError("edge list must be ASCII") from exc
    if "\r" in data:
        raise EdgeListError("edge list must use LF line endings")
    lines = data.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    body = [(i + 1, ln) for i, ln in enumerate(lines) if not ln.startswith("#")]
    if not body:
        raise EdgeListError("missing header line")
    lineno, header = body[0]
    n, m = _parse_pair(header, lineno)
    pairs = body[1:]
    if len(pairs) != m:
        raise EdgeListError(f"header declares {m} edges but {len(pairs)} edge lines follow")
    rows = [0] * n
    for lineno, ln in pairs:
        u, v = _parse_pair(ln, lineno)
        if u >= n or v >= n:
            raise EdgeListError(f"line {lineno}: vertex index out of range for n={n}")
        if u == v:
            raise EdgeListError(f"line {lineno}: self-loop at {u}")
        if u > v:
            raise EdgeListError(f"line {lineno}: endpoints must satisfy u < v")
        if rows[u] >> v & 1:
            raise EdgeListError(f"line {lineno}: duplicate edge ({u}, {v})")
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return Graph.from_rows(rows)


def write_edge_list(g: Graph) -> bytes:
    buf = io.StringIO()
    buf.write(f"{g.n} {g.edge_count}\n")
    for u, v in g.edges():
        buf.write(f"{u} {v}\n")
    return buf.getvalue().encode("ascii")


def read_edge_list_file(path: str | os.PathLike) -> Graph:
    with open(path, "rb") as fh:
        return load_edge_list(fh.read())


def write_edge_list_file(g: Graph, path: str | os.PathLike) -> None:
    with open(path, "wb") as fh:
        fh.write(write_edge_list(g))
