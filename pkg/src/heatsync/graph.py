"""Follower network topology: Laplacian, incidence, components, leader mask.

Node indices are 1-based everywhere in this module, matching the on-disk
config format.  Matrices are built with integer arithmetic so structural
identities (zero row sums, U^T U = L) hold exactly; promotion to floating
point happens where certificates are assembled.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DuplicateEdge, IndexOutOfRange, SelfLoop


@dataclass(frozen=True)
class FollowerGraph:
    """Undirected follower graph plus the set of leader-connected nodes.

    ``edges`` holds the in-domain connections only; leader links are the
    separate ``leader_set``.  ``n`` may be 0 for leader-only diagnostics.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    leader_set: frozenset[int]

    @property
    def leader_count(self) -> int:
        return len(self.leader_set)

    def degree(self, node: int) -> int:
        return sum(1 for (a, b) in self.edges if node in (a, b))


def build_graph(n, edges, leader_set) -> FollowerGraph:
    """Validate and freeze a follower graph.

    Edges are unordered pairs of distinct nodes in 1..n; duplicates (in either
    orientation) and self-loops are rejected.  ``leader_set`` may be empty;
    per-component leader requirements are enforced by the gain-design stage,
    not here.
    """
    n = int(n)
    if n < 0:
        raise IndexOutOfRange(f"follower count must be >= 0, got {n}")
    norm: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for pair in edges:
        i, j = int(pair[0]), int(pair[1])
        if i == j:
            raise SelfLoop(f"edge ({i},{j}) is a self-loop")
        if not (1 <= i <= n and 1 <= j <= n):
            raise IndexOutOfRange(f"edge ({i},{j}) outside 1..{n}")
        e = (min(i, j), max(i, j))
        if e in seen:
            raise DuplicateEdge(f"edge {e} given more than once")
        seen.add(e)
        norm.append(e)
    leaders = frozenset(int(v) for v in leader_set)
    for v in leaders:
        if not (1 <= v <= n):
            raise IndexOutOfRange(f"leader node {v} outside 1..{n}")
    return FollowerGraph(n=n, edges=tuple(sorted(norm)), leader_set=leaders)


def laplacian(g: FollowerGraph) -> np.ndarray:
    """Graph Laplacian: -1 at edges, node degree on the diagonal (int64)."""
    lap = np.zeros((g.n, g.n), dtype=np.int64)
    for (i, j) in g.edges:
        lap[i - 1, j - 1] -= 1
        lap[j - 1, i - 1] -= 1
        lap[i - 1, i - 1] += 1
        lap[j - 1, j - 1] += 1
    return lap


def incidence(g: FollowerGraph) -> np.ndarray:
    """Oriented edge-node incidence matrix U with U^T U = laplacian(g).

    One row per edge, +1 at the lower-numbered endpoint.  The orientation is
    arbitrary for all uses here; fixing it keeps outputs reproducible.
    """
    u = np.zeros((len(g.edges), g.n), dtype=np.int64)
    for r, (i, j) in enumerate(g.edges):
        u[r, i - 1] = 1
        u[r, j - 1] = -1
    return u


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:  # path compression
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def connected_components(g: FollowerGraph) -> list[tuple[int, ...]]:
    """Partition 1..n by in-domain connectivity (leader links do not count).

    Components are returned sorted by their smallest node.
    """
    uf = _UnionFind(g.n)
    for (i, j) in g.edges:
        uf.union(i - 1, j - 1)
    groups: dict[int, list[int]] = {}
    for v in range(g.n):
        groups.setdefault(uf.find(v), []).append(v + 1)
    return [tuple(sorted(members)) for _, members in sorted(groups.items())]


def is_leader_connected(g: FollowerGraph) -> bool:
    """True iff every in-domain component contains a leader-connected node."""
    return all(
        any(v in g.leader_set for v in comp) for comp in connected_components(g)
    )


def leader_mask(g: FollowerGraph) -> np.ndarray:
    """Diagonal 0/1 matrix selecting the leader-connected followers (int64)."""
    m = np.zeros((g.n, g.n), dtype=np.int64)
    for v in g.leader_set:
        m[v - 1, v - 1] = 1
    return m
