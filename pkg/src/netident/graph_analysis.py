"""Combinatorial primitives: reachability, vertex-disjoint path counts, and
the numeric cross-check tying them to generic closed-loop ranks.

The generic rank of a closed-loop submatrix ``T[targets, sources]`` equals
the maximum number of mutually vertex-disjoint directed paths from the
source nodes to the target nodes, where a node lying in both sets routes a
length-0 path (the diagonal of ``T`` is generically nonzero).  Disjointness
includes endpoints: a node repeated in the source multiset can only carry
one path.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .network_model import (
    NetworkStructure,
    SamplingPolicy,
    _digest_int,
    sample_realization,
    strip_pinned_values,
)
from .numeric_core import DEFAULT_RANK_TOL, closed_loop, noise_floor, numerical_rank

__all__ = [
    "PathCertificate",
    "successors",
    "reachable",
    "reachable_set",
    "co_reachable_set",
    "shortest_path",
    "max_vertex_disjoint",
    "verify_certificate",
    "transfer_rank_matches_paths",
]

_TAG_PATH_RANK = 5


@dataclass(frozen=True)
class PathCertificate:
    """A group of mutually vertex-disjoint directed paths.

    Each path is a node sequence whose consecutive pairs are edges of the
    owning structure; a single-node path is the length-0 route allowed when
    a source is also a target.  No node may appear twice across (or inside)
    the group.  ``sources`` keeps the requested multiset, ``targets`` the
    requested target set.
    """

    paths: tuple[tuple[int, ...], ...]
    sources: tuple[int, ...]
    targets: tuple[int, ...]


def successors(structure: NetworkStructure) -> list[list[int]]:
    """Adjacency lists (sorted, deduplicated) over all edges, known or not."""
    adj: list[set[int]] = [set() for _ in range(structure.n)]
    for e in structure.edges:
        adj[e.src].add(e.dst)
    return [sorted(s) for s in adj]


def reachable_set(structure: NetworkStructure, start: int) -> set[int]:
    """All nodes reachable from ``start`` along directed edges (incl. itself)."""
    adj = successors(structure)
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def co_reachable_set(structure: NetworkStructure, target: int) -> set[int]:
    """All nodes from which ``target`` is reachable (incl. itself)."""
    pred: list[set[int]] = [set() for _ in range(structure.n)]
    for e in structure.edges:
        pred[e.dst].add(e.src)
    seen = {target}
    queue = deque([target])
    while queue:
        v = queue.popleft()
        for w in pred[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def reachable(structure: NetworkStructure, src: int, dst: int) -> bool:
    """Directed reachability; every node reaches itself (length-0 path)."""
    if src == dst:
        return True
    return dst in reachable_set(structure, src)


def shortest_path(structure: NetworkStructure, src: int, dst: int) -> tuple[int, ...] | None:
    """One shortest directed path as a node sequence, or None."""
    if src == dst:
        return (src,)
    adj = successors(structure)
    parent = {src: None}
    queue = deque([src])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in parent:
                parent[w] = v
                if w == dst:
                    path = [w]
                    while parent[path[-1]] is not None:
                        path.append(parent[path[-1]])
                    return tuple(reversed(path))
                queue.append(w)
    return None


class _UnitFlowNetwork:
    """Unit-capacity flow network with vertex splitting.

    Node ``v`` becomes ``in(v) = 2v`` and ``out(v) = 2v+1`` joined by a unit
    arc, so one unit of flow occupies a whole vertex.  Sources attach to
    ``in`` nodes and targets drain from ``out`` nodes: endpoint vertices
    consume their capacity too, making disjointness include endpoints.
    """

    def __init__(self, structure: NetworkStructure, sources: set[int], targets: set[int]):
        n = structure.n
        self.source = 2 * n
        self.sink = 2 * n + 1
        # arc = [head, residual capacity, reverse-arc index, is_forward]
        self.adj: list[list[list[int]]] = [[] for _ in range(2 * n + 2)]
        for v in range(n):
            self._arc(2 * v, 2 * v + 1)
        for e in structure.edges:
            self._arc(2 * e.src + 1, 2 * e.dst)
        for j in sorted(sources):
            self._arc(self.source, 2 * j)
        for i in sorted(targets):
            self._arc(2 * i + 1, self.sink)

    def _arc(self, u: int, v: int):
        self.adj[u].append([v, 1, len(self.adj[v]), True])
        self.adj[v].append([u, 0, len(self.adj[u]) - 1, False])

    def _augment(self) -> bool:
        parent: dict[int, tuple[int, int]] = {self.source: (-1, -1)}
        queue = deque([self.source])
        while queue:
            u = queue.popleft()
            for idx, arc in enumerate(self.adj[u]):
                if arc[1] > 0 and arc[0] not in parent:
                    parent[arc[0]] = (u, idx)
                    if arc[0] == self.sink:
                        v = self.sink
                        while v != self.source:
                            u, idx = parent[v]
                            fwd = self.adj[u][idx]
                            fwd[1] -= 1
                            self.adj[fwd[0]][fwd[2]][1] += 1
                            v = u
                        return True
                    queue.append(arc[0])
        return False

    def max_flow(self) -> int:
        value = 0
        while self._augment():
            value += 1
        return value

    def extract_paths(self) -> list[tuple[int, ...]]:
        """Decompose the integral flow into vertex-disjoint node paths."""
        flow = [
            [1 - arc[1] if arc[3] else 0 for arc in row] for row in self.adj
        ]
        paths = []
        for idx, arc in enumerate(self.adj[self.source]):
            if flow[self.source][idx] != 1:
                continue
            flow[self.source][idx] = 0
            nodes = []
            u = arc[0]
            while u != self.sink:
                if u % 2 == 0:
                    nodes.append(u // 2)
                for j, a in enumerate(self.adj[u]):
                    if flow[u][j] == 1:
                        flow[u][j] = 0
                        u = a[0]
                        break
                else:
                    raise AssertionError("flow decomposition lost conservation")
            paths.append(tuple(nodes))
        return paths


def max_vertex_disjoint(
    structure: NetworkStructure,
    sources: Iterable[int],
    targets: Iterable[int],
) -> tuple[int, PathCertificate]:
    """Maximum number of mutually vertex-disjoint paths, with a certificate.

    ``sources`` is a multiset: a repeated node still has unit capacity, so
    duplicates cannot both be routed.  The count is exact (integral
    max-flow on the vertex-split network equals the disjoint-path maximum).
    """
    sources = tuple(sources)
    targets = tuple(targets)
    for v in (*sources, *targets):
        if not 0 <= v < structure.n:
            raise ValueError(f"node {v} out of range [0, {structure.n})")
    net = _UnitFlowNetwork(structure, set(sources), set(targets))
    value = net.max_flow()
    paths = net.extract_paths()
    cert = PathCertificate(paths=tuple(paths), sources=sources, targets=targets)
    if len(paths) != value:
        raise AssertionError("path extraction disagrees with the flow value")
    return value, cert


def verify_certificate(structure: NetworkStructure, cert: PathCertificate) -> bool:
    """Re-check a certificate without the flow machinery.

    Valid when every path walks actual edges from a source to a target and
    no node occurs twice anywhere in the group.
    """
    adj = [set(row) for row in successors(structure)]
    seen: set[int] = set()
    source_pool = list(cert.sources)
    for path in cert.paths:
        if len(path) == 0:
            return False
        if path[0] not in source_pool:
            return False
        source_pool.remove(path[0])
        if path[-1] not in cert.targets:
            return False
        for a, b in zip(path, path[1:]):
            if b not in adj[a]:
                return False
        for v in path:
            if v in seen:
                return False
            seen.add(v)
    return True


def transfer_rank_matches_paths(
    structure: NetworkStructure,
    sources: Sequence[int],
    targets: Sequence[int],
    samples: int = 3,
    seed: int = 0,
    policy: SamplingPolicy | None = None,
    rel_tol: float = DEFAULT_RANK_TOL,
) -> bool:
    """Check generic rank of ``T[targets, sources]`` against the path count.

    Every transfer value is randomized here, pinned known values included;
    the equality only holds for generic known values as well.  Returns True
    iff the max numerical rank over the samples equals the vertex-disjoint
    path maximum.
    """
    beta, _ = max_vertex_disjoint(structure, sources, targets)
    stripped = strip_pinned_values(structure)
    src_list = sorted(set(sources))
    tgt_list = sorted(set(targets))
    rng = np.random.default_rng(
        np.random.SeedSequence([int(seed), _digest_int(structure), _TAG_PATH_RANK])
    )
    best = 0
    for _ in range(samples):
        r = sample_realization(stripped, rng, policy)
        t = closed_loop(r)
        sub = t[np.ix_(tgt_list, src_list)]
        best = max(best, numerical_rank(sub, rel_tol, floor=noise_floor((r, t))))
    return best == beta
