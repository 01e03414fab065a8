"""Network structures, numeric realizations, and random instance generation.

A network is a directed graph on nodes ``0..n-1`` following the model
``w = G w + B r``, ``y = C w``: each edge carries one complex transfer value
at a single frequency, a subset of nodes is excited (set B) and a subset is
measured (set C).  Edge values are either known a priori or unknown; the
unknown ones are the identification targets.

Structures are immutable and canonically ordered (edges sorted by
``(dst, src)``, node sets ascending), so structural equality is plain
equality and serialization is deterministic.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

__all__ = [
    "Edge",
    "NetworkStructure",
    "Realization",
    "SamplingPolicy",
    "SamplingError",
    "DEFAULT_POLICY",
    "parse_structure",
    "serialize_structure",
    "structure_digest",
    "sample_realization",
    "sample_pair",
    "random_structure",
    "as_rng",
]


class SamplingError(RuntimeError):
    """Raised when repeated resampling cannot produce a well-posed realization."""


@dataclass(frozen=True)
class Edge:
    """Directed edge from node ``src`` into node ``dst``.

    The edge carries the network-matrix entry ``G[dst, src]``: the transfer
    from its start node into its end node, matching ``w = G w``.  A known
    edge may pin a fixed nonzero ``value``; unknown edges never carry one.
    """

    src: int
    dst: int
    known: bool = False
    value: complex | None = None


@dataclass(frozen=True)
class NetworkStructure:
    """Directed network with known/unknown edge partition and B/C node sets.

    ``excited`` and ``measured`` may overlap.  Self-loops are rejected unless
    ``allow_self_loops`` is set.  All fields are normalized to canonical
    order at construction.
    """

    n: int
    edges: tuple[Edge, ...]
    excited: tuple[int, ...]
    measured: tuple[int, ...]
    allow_self_loops: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(
            self, "edges", tuple(sorted(self.edges, key=lambda e: (e.dst, e.src)))
        )
        object.__setattr__(self, "excited", tuple(sorted(self.excited)))
        object.__setattr__(self, "measured", tuple(sorted(self.measured)))
        self._validate()

    def _validate(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"node count must be a positive integer, got {self.n!r}")
        seen = set()
        for e in self.edges:
            for v in (e.src, e.dst):
                if not isinstance(v, int) or not 0 <= v < self.n:
                    raise ValueError(f"node index {v!r} out of range [0, {self.n})")
            if e.src == e.dst and not self.allow_self_loops:
                raise ValueError(f"self-loop at node {e.src} (allow_self_loops=False)")
            if (e.src, e.dst) in seen:
                raise ValueError(f"duplicate edge ({e.src} -> {e.dst})")
            seen.add((e.src, e.dst))
            if e.value is not None:
                if not e.known:
                    raise ValueError(f"unknown edge ({e.src} -> {e.dst}) carries a value")
                if complex(e.value) == 0:
                    raise ValueError(
                        f"edge ({e.src} -> {e.dst}) has zero value; edges are nonzero entries"
                    )
        for name, nodes in (("excited", self.excited), ("measured", self.measured)):
            if len(set(nodes)) != len(nodes):
                raise ValueError(f"duplicate node in {name} set: {nodes}")
            for v in nodes:
                if not isinstance(v, int) or not 0 <= v < self.n:
                    raise ValueError(f"{name} node {v!r} out of range [0, {self.n})")

    @cached_property
    def unknown_edges(self) -> tuple[Edge, ...]:
        return tuple(e for e in self.edges if not e.known)

    @cached_property
    def known_edges(self) -> tuple[Edge, ...]:
        return tuple(e for e in self.edges if e.known)

    @property
    def n_excited(self) -> int:
        return len(self.excited)

    @property
    def n_measured(self) -> int:
        return len(self.measured)


def parse_structure(text: str, *, allow_self_loops: bool = False) -> NetworkStructure:
    """Parse the JSON structure format into a :class:`NetworkStructure`.

    Schema::

        {"n": int,
         "edges": [{"from": int, "to": int, "known": bool, "value": [re, im]?}, ...],
         "excited": [int, ...],
         "measured": [int, ...]}

    Node indices are 0-based; the optional ``value`` is only legal on known
    edges.  Raises ``ValueError`` on malformed text, duplicate edges,
    out-of-range indices, or duplicate excited/measured nodes.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed structure text: {exc}") from None
    if not isinstance(raw, dict):
        raise ValueError("malformed structure text: top-level object expected")
    for key in ("n", "edges", "excited", "measured"):
        if key not in raw:
            raise ValueError(f"malformed structure text: missing field {key!r}")
    edges = []
    for item in raw["edges"]:
        if not isinstance(item, dict) or "from" not in item or "to" not in item:
            raise ValueError(f"malformed edge entry: {item!r}")
        value = item.get("value")
        if value is not None:
            if not isinstance(value, (list, tuple)) or len(value) != 2:
                raise ValueError(f"edge value must be [re, im], got {value!r}")
            value = complex(float(value[0]), float(value[1]))
        edges.append(
            Edge(
                src=item["from"],
                dst=item["to"],
                known=bool(item.get("known", False)),
                value=value,
            )
        )
    return NetworkStructure(
        n=raw["n"],
        edges=tuple(edges),
        excited=tuple(raw["excited"]),
        measured=tuple(raw["measured"]),
        allow_self_loops=allow_self_loops,
    )


def serialize_structure(structure: NetworkStructure) -> str:
    """Canonical deterministic serialization; inverse of :func:`parse_structure`."""
    edges = []
    for e in structure.edges:
        entry: dict = {"from": e.src, "to": e.dst, "known": e.known}
        if e.value is not None:
            entry["value"] = [complex(e.value).real, complex(e.value).imag]
        edges.append(entry)
    obj = {
        "n": structure.n,
        "edges": edges,
        "excited": list(structure.excited),
        "measured": list(structure.measured),
    }
    return json.dumps(obj, separators=(",", ":"))


def structure_digest(structure: NetworkStructure) -> str:
    """Stable hex digest of the canonical serialization."""
    return hashlib.sha256(serialize_structure(structure).encode()).hexdigest()


def _digest_int(structure: NetworkStructure) -> int:
    return int(structure_digest(structure)[:16], 16)


@dataclass(frozen=True)
class SamplingPolicy:
    """Distribution and well-posedness policy for random edge values.

    Values are drawn with modulus uniform in ``[min_modulus, max_modulus]``
    and uniform phase, keeping them away from the degenerate lower-dimensional
    set.  A draw is rejected while ``cond(I - G)`` exceeds ``max_condition``,
    at most ``max_retries`` times.
    """

    min_modulus: float = 0.2
    max_modulus: float = 1.0
    max_condition: float = 1e8
    max_retries: int = 32


DEFAULT_POLICY = SamplingPolicy()


@dataclass(frozen=True, eq=False)
class Realization:
    """A numeric assignment of one complex value to every edge of a structure.

    ``matrix`` is the dense n-by-n network matrix: ``matrix[e.dst, e.src]``
    holds the value of edge ``e``, every off-edge entry is zero, and every
    edge entry is nonzero.
    """

    structure: NetworkStructure
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        n = self.structure.n
        if m.shape != (n, n):
            raise ValueError(f"matrix shape {m.shape} does not match n={n}")
        if not np.all(np.isfinite(m)):
            raise ValueError("realization values must be finite")
        support = {(e.src, e.dst) for e in self.structure.edges}
        for i, j in zip(*np.nonzero(m)):
            if (int(j), int(i)) not in support:
                raise ValueError(f"nonzero value at non-edge position ({j} -> {i})")
        for e in self.structure.edges:
            if m[e.dst, e.src] == 0:
                raise ValueError(f"edge ({e.src} -> {e.dst}) has no (nonzero) value")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_values(cls, structure: NetworkStructure, values) -> "Realization":
        """Build from a mapping ``(src, dst) -> complex`` covering every edge."""
        m = np.zeros((structure.n, structure.n), dtype=complex)
        remaining = dict(values)
        for e in structure.edges:
            if (e.src, e.dst) not in remaining:
                raise ValueError(f"missing value for edge ({e.src} -> {e.dst})")
            m[e.dst, e.src] = remaining.pop((e.src, e.dst))
        if remaining:
            raise ValueError(f"values given for non-edges: {sorted(remaining)}")
        return cls(structure, m)

    def edge_value(self, edge: Edge) -> complex:
        return complex(self.matrix[edge.dst, edge.src])

    def edge_values(self) -> dict[tuple[int, int], complex]:
        return {(e.src, e.dst): self.edge_value(e) for e in self.structure.edges}


def as_rng(seed) -> np.random.Generator:
    """Normalize an int seed / SeedSequence / Generator into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _draw_value(rng: np.random.Generator, policy: SamplingPolicy) -> complex:
    r = rng.uniform(policy.min_modulus, policy.max_modulus)
    phi = rng.uniform(0.0, 2.0 * np.pi)
    return complex(r * np.cos(phi), r * np.sin(phi))


def _draw_matrix(structure, rng, policy, *, edges=None, base=None) -> np.ndarray:
    m = np.zeros((structure.n, structure.n), dtype=complex) if base is None else base.copy()
    for e in structure.edges if edges is None else edges:
        m[e.dst, e.src] = e.value if e.value is not None else _draw_value(rng, policy)
    return m


def _well_conditioned(m: np.ndarray, policy: SamplingPolicy) -> bool:
    cond = np.linalg.cond(np.eye(m.shape[0]) - m)
    return bool(np.isfinite(cond) and cond <= policy.max_condition)


def sample_realization(
    structure: NetworkStructure, seed, policy: SamplingPolicy | None = None
) -> Realization:
    """Draw one realization of ``structure``; deterministic given the seed.

    Known edges with pinned values keep them, every other edge is drawn
    i.i.d. per the policy.  Raises :class:`SamplingError` when the retry cap
    is exhausted without a well-conditioned ``I - G``.
    """
    policy = policy or DEFAULT_POLICY
    rng = as_rng(seed)
    for _ in range(policy.max_retries):
        m = _draw_matrix(structure, rng, policy)
        if _well_conditioned(m, policy):
            return Realization(structure, m)
    raise SamplingError(
        f"no well-conditioned realization after {policy.max_retries} draws"
    )


def sample_pair(
    structure: NetworkStructure, seed, policy: SamplingPolicy | None = None
) -> tuple[Realization, Realization]:
    """Draw a pair ``(g, g_prime)`` agreeing exactly on known edges.

    Known-edge values (pinned or drawn) are shared between the two
    realizations; unknown-edge values are drawn independently.
    """
    policy = policy or DEFAULT_POLICY
    rng = as_rng(seed)
    for _ in range(policy.max_retries):
        shared = _draw_matrix(structure, rng, policy, edges=structure.known_edges)
        m1 = _draw_matrix(structure, rng, policy, edges=structure.unknown_edges, base=shared)
        m2 = _draw_matrix(structure, rng, policy, edges=structure.unknown_edges, base=shared)
        if _well_conditioned(m1, policy) and _well_conditioned(m2, policy):
            return Realization(structure, m1), Realization(structure, m2)
    raise SamplingError(
        f"no well-conditioned realization pair after {policy.max_retries} draws"
    )


def random_structure(
    n: int,
    density: float,
    n_excited: int,
    n_measured: int,
    unknown_count: int,
    seed,
    *,
    allow_self_loops: bool = False,
) -> NetworkStructure:
    """Generate a random structure with the exact requested cardinalities.

    ``round(density * #candidate pairs)`` directed edges are drawn without
    replacement, ``unknown_count`` of them marked unknown, and the excited
    and measured sets drawn uniformly.  Deterministic given the seed; raises
    ``ValueError`` when the request is infeasible.
    """
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"density must lie in [0, 1], got {density}")
    if n_excited > n or n_measured > n:
        raise ValueError("excited/measured set sizes cannot exceed the node count")
    pairs = [
        (i, j) for i in range(n) for j in range(n) if allow_self_loops or i != j
    ]
    edge_count = int(round(density * len(pairs)))
    if unknown_count > edge_count:
        raise ValueError(
            f"infeasible request: {unknown_count} unknown edges but only "
            f"{edge_count} edges at density {density}"
        )
    rng = as_rng(seed)
    chosen = rng.choice(len(pairs), size=edge_count, replace=False)
    unknown_positions = set(
        int(k) for k in rng.choice(edge_count, size=unknown_count, replace=False)
    ) if edge_count else set()
    edges = tuple(
        Edge(src=pairs[int(p)][0], dst=pairs[int(p)][1], known=(k not in unknown_positions))
        for k, p in enumerate(chosen)
    )
    excited = tuple(int(v) for v in rng.choice(n, size=n_excited, replace=False))
    measured = tuple(int(v) for v in rng.choice(n, size=n_measured, replace=False))
    return NetworkStructure(
        n=n, edges=edges, excited=excited, measured=measured,
        allow_self_loops=allow_self_loops,
    )


def strip_pinned_values(structure: NetworkStructure) -> NetworkStructure:
    """Copy of the structure with all pinned edge values removed.

    Used where every transfer value, known or not, must be randomized.
    """
    return NetworkStructure(
        n=structure.n,
        edges=tuple(replace(e, value=None) for e in structure.edges),
        excited=structure.excited,
        measured=structure.measured,
        allow_self_loops=structure.allow_self_loops,
    )
