"""Explicit construction of Γ(S).

Vertices are the n^2 triples (i, j, i*j) in row-major cell order; two
distinct vertices are adjacent iff they agree in exactly one coordinate.
Vertex positions in Python lists are 0-based; exported vertex ids are
1-based (position + 1).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from glsg.errors import GraphTooLarge, NotNull, UnknownFormat
from glsg.semigroup import CayleyTable

MAX_VERTICES = 4096


class Vertex(NamedTuple):
    i: int
    j: int
    k: int


@dataclass(frozen=True)
class GlsgGraph:
    table: CayleyTable
    vertices: tuple[Vertex, ...]
    adjacency: np.ndarray

    @property
    def order(self) -> int:
        return len(self.vertices)

    @property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def edges(self) -> list[tuple[int, int]]:
        """Edges as 0-based position pairs (u, v) with u < v, sorted."""
        us, vs = np.nonzero(np.triu(self.adjacency, k=1))
        return list(zip(us.tolist(), vs.tolist()))

    @property
    def edge_count(self) -> int:
        return int(self.adjacency.sum()) // 2


def build_graph(t: CayleyTable, *, allow_large: bool = False) -> GlsgGraph:
    """Build the full adjacency matrix straight from the definition.

    This costs O(n^4) and is the independent check on the counting formula.
    Graphs above ``MAX_VERTICES`` vertices need ``allow_large=True``.
    """
    count = t.n * t.n
    if count > MAX_VERTICES and not allow_large:
        raise GraphTooLarge(vertices=count, limit=MAX_VERTICES)
    vertices = tuple(
        Vertex(i, j, t.product(i, j)) for i in range(1, t.n + 1) for j in range(1, t.n + 1)
    )
    coords = np.array(vertices, dtype=np.int64).reshape(count, 3)
    agreements = np.zeros((count, count), dtype=np.int8)
    for axis in range(3):
        col = coords[:, axis]
        agreements += col[:, None] == col[None, :]
    # distinct vertices never agree in all three coordinates, so == 1 already
    # excludes the diagonal
    adjacency = agreements == 1
    adjacency.setflags(write=False)
    return GlsgGraph(table=t, vertices=vertices, adjacency=adjacency)


def naive_degrees(g: GlsgGraph) -> list[int]:
    return g.degrees.tolist()


def neighbour_classes(g: GlsgGraph, v: int) -> tuple[int, int, int]:
    """Count neighbours of position ``v`` sharing only i, only j, only k."""
    counts = [0, 0, 0]
    vert = g.vertices[v]
    for u in np.flatnonzero(g.adjacency[v]):
        other = g.vertices[u]
        shared = [vert.i == other.i, vert.j == other.j, vert.k == other.k]
        counts[shared.index(True)] += 1
    return counts[0], counts[1], counts[2]


def connected_components(g: GlsgGraph) -> list[list[int]]:
    """Components as sorted lists of 0-based positions, ordered by smallest member."""
    seen = np.zeros(g.order, dtype=bool)
    components = []
    for start in range(g.order):
        if seen[start]:
            continue
        seen[start] = True
        queue = deque([start])
        members = []
        while queue:
            u = queue.popleft()
            members.append(u)
            for w in np.flatnonzero(g.adjacency[u] & ~seen):
                seen[w] = True
                queue.append(int(w))
        components.append(sorted(members))
    return components


def verify_null_tensor(t: CayleyTable) -> bool:
    """Check that Γ(S) of a null semigroup is exactly K_n x K_n.

    Cell (i, j) maps to the Kronecker index (i-1)*n + (j-1), which is also
    its row-major vertex position.
    """
    if len({v for row in t.entries for v in row}) != 1:
        raise NotNull(order=t.n)
    complete = np.ones((t.n, t.n), dtype=np.int64) - np.eye(t.n, dtype=np.int64)
    tensor = np.kron(complete, complete).astype(bool)
    return bool(np.array_equal(build_graph(t).adjacency, tensor))


def export_graph(g: GlsgGraph, fmt: str = "edge-list") -> str:
    """Render as ``edge-list`` (``u v`` per line, 1-based) or ``dot``."""
    if fmt == "edge-list":
        return "".join(f"{u + 1} {v + 1}\n" for u, v in g.edges())
    if fmt == "dot":
        lines = ["graph G {"]
        for pos, vert in enumerate(g.vertices, start=1):
            lines.append(f'  {pos} [label="({vert.i},{vert.j},{vert.k})"];')
        for u, v in g.edges():
            lines.append(f"  {u + 1} -- {v + 1};")
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise UnknownFormat(format=fmt)
