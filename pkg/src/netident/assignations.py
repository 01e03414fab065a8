"""Assignations of unknown edges to excitations and measurements.

An assignation maps each unknown edge to an excitation, a measurement, or
both; a bijective assignation pairs the edges one-to-one with the
excitation-measurement pairs and corresponds to one permutation term in the
determinant of the decoupled Jacobian.  This module enumerates assignations,
computes their signatures, expands that determinant in two independent ways
(plain permutation sum, and grouped by the excitation side into closed-loop
subdeterminants), and evaluates the path-based identifiability conditions:
counting connected bijective assignations, and counting per-side
assignations whose edge fan-in routes a full set of vertex-disjoint paths.

Sign conventions (fixed; all expansions and checks agree on them):

* unknown edges are taken in canonical order (sorted by ``(dst, src)``),
  excitation-measurement pairs lexicographically with the excitation major,
  matching the row order of the decoupled Jacobian;
* the signature of a bijective assignation is the parity of the induced
  permutation between those two orders;
* the signature of an excitation-side assignation is the parity of stably
  sorting the edges by assigned excitation; the measurement-side analogue
  sorts by assigned measurement into excitation-major slots.  These are the
  signs under which the grouped determinant expansion is exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .graph_analysis import (
    PathCertificate,
    co_reachable_set,
    max_vertex_disjoint,
    reachable_set,
    shortest_path,
)
from .network_model import NetworkStructure, Realization
from .numeric_core import closed_loop, determinant

__all__ = [
    "Assignation",
    "ConditionVerdict",
    "EnumerationCapExceeded",
    "DEFAULT_ENUMERATION_CAP",
    "canonical_pairs",
    "enumerate_bijective",
    "enumerate_excitation_assignations",
    "enumerate_measurement_assignations",
    "signature",
    "excitation_signature",
    "measurement_signature",
    "block_measurement_signature",
    "block_excitation_signature",
    "verify_signature_factorization",
    "assignation_expansion_det",
    "grouped_expansion_det",
    "connected_bijective_condition",
    "one_sided_path_condition",
    "two_sided_path_condition",
]

DEFAULT_ENUMERATION_CAP = 8


class EnumerationCapExceeded(RuntimeError):
    """Raised when an exhaustive check would enumerate past its cap."""


@dataclass(frozen=True)
class Assignation:
    """Maps of unknown edges (canonical order) to excitation/measurement nodes.

    At least one map is present.  When both are present and the joint map is
    one-to-one onto the excitation-measurement pairs, the assignation is
    bijective.
    """

    excitation_map: tuple[int, ...] | None = None
    measurement_map: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.excitation_map is None and self.measurement_map is None:
            raise ValueError("assignation needs at least one side")
        if (
            self.excitation_map is not None
            and self.measurement_map is not None
            and len(self.excitation_map) != len(self.measurement_map)
        ):
            raise ValueError("the two maps must cover the same edges")

    @property
    def kind(self) -> str:
        if self.excitation_map is None:
            return "measurement"
        if self.measurement_map is None:
            return "excitation"
        return "pair"

    @property
    def is_bijective(self) -> bool:
        if self.kind != "pair":
            return False
        joint = list(zip(self.excitation_map, self.measurement_map))
        return len(set(joint)) == len(joint)

    def to_dict(self, structure: NetworkStructure) -> dict:
        return {
            "kind": self.kind,
            "edges": [[e.src, e.dst] for e in structure.unknown_edges],
            "excitation_map": None
            if self.excitation_map is None
            else list(self.excitation_map),
            "measurement_map": None
            if self.measurement_map is None
            else list(self.measurement_map),
        }


@dataclass(frozen=True)
class ConditionVerdict:
    """Outcome of one counting condition.

    ``counted`` is exact for 0 and 1 and saturates at 2 (the checks only
    need to distinguish "none", "exactly one", and "more than one"):
    at least one qualifying assignation is necessary for decoupled
    identifiability, exactly one is sufficient.
    """

    necessary_holds: bool
    sufficient_holds: bool
    counted: int
    witnesses: tuple[tuple[Assignation, tuple[PathCertificate, ...]], ...] = ()


def _require_square(structure: NetworkStructure, cap: int | None = None) -> int:
    m = len(structure.unknown_edges)
    expected = structure.n_excited * structure.n_measured
    if m != expected:
        raise ValueError(
            f"need exactly one unknown edge per excitation-measurement pair: "
            f"{m} unknowns vs {expected} pairs"
        )
    if cap is not None and m > cap:
        raise EnumerationCapExceeded(f"{m} unknown edges exceed the cap of {cap}")
    return m


def canonical_pairs(structure: NetworkStructure) -> tuple[tuple[int, int], ...]:
    """All (excitation, measurement) pairs, excitation-major."""
    return tuple(
        (b, c) for b in structure.excited for c in structure.measured
    )


def _permutation_parity(perm) -> int:
    """Sign of a permutation of 0..m-1 via cycle decomposition."""
    m = len(perm)
    seen = [False] * m
    sign = 1
    for start in range(m):
        if seen[start]:
            continue
        length = 0
        k = start
        while not seen[k]:
            seen[k] = True
            k = perm[k]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _multiset_permutations(pool: tuple) -> Iterator[tuple]:
    """Unique permutations of a sorted pool, in lexicographic order."""
    items = sorted(set(pool))
    counts = {it: pool.count(it) for it in items}
    total = len(pool)
    out: list = []

    def rec():
        if len(out) == total:
            yield tuple(out)
            return
        for it in items:
            if counts[it]:
                counts[it] -= 1
                out.append(it)
                yield from rec()
                out.pop()
                counts[it] += 1

    yield from rec()


def enumerate_bijective(structure: NetworkStructure) -> Iterator[Assignation]:
    """All bijective assignations, in a deterministic order.

    Requires exactly one unknown edge per excitation-measurement pair;
    yields ``(n_excited * n_measured)!`` assignations.
    """
    m = _require_square(structure)
    pairs = canonical_pairs(structure)
    for perm in itertools.permutations(range(m)):
        yield Assignation(
            excitation_map=tuple(pairs[p][0] for p in perm),
            measurement_map=tuple(pairs[p][1] for p in perm),
        )


def enumerate_excitation_assignations(structure: NetworkStructure) -> Iterator[Assignation]:
    """All maps assigning exactly ``n_measured`` unknown edges to each excitation."""
    _require_square(structure)
    pool = tuple(sorted(b for b in structure.excited for _ in range(structure.n_measured)))
    for eb in _multiset_permutations(pool):
        yield Assignation(excitation_map=eb)


def enumerate_measurement_assignations(structure: NetworkStructure) -> Iterator[Assignation]:
    """All maps assigning exactly ``n_excited`` unknown edges to each measurement."""
    _require_square(structure)
    pool = tuple(sorted(c for c in structure.measured for _ in range(structure.n_excited)))
    for ec in _multiset_permutations(pool):
        yield Assignation(measurement_map=ec)


def signature(assignation: Assignation, structure: NetworkStructure) -> int:
    """Parity (+1/-1) of a bijective assignation.

    Relative to the reference pairing of canonically ordered edges with
    excitation-major pairs; this is the sign of the corresponding term in
    the permutation expansion of the decoupled-Jacobian determinant.
    """
    if assignation.kind != "pair":
        raise ValueError("signature needs both assignation sides")
    index = {p: i for i, p in enumerate(canonical_pairs(structure))}
    try:
        perm = [
            index[(b, c)]
            for b, c in zip(assignation.excitation_map, assignation.measurement_map)
        ]
    except KeyError as exc:
        raise ValueError(f"assigned pair {exc} is not an excitation-measurement pair")
    if sorted(perm) != list(range(len(perm))):
        raise ValueError("assignation is not bijective")
    return _permutation_parity(perm)


def _excitation_counts_ok(assignation: Assignation, structure: NetworkStructure):
    eb = assignation.excitation_map
    if eb is None:
        raise ValueError("excitation side missing")
    for b in structure.excited:
        if sum(1 for x in eb if x == b) != structure.n_measured:
            raise ValueError(f"excitation {b} is not assigned exactly "
                             f"{structure.n_measured} edges")
    return eb


def _measurement_counts_ok(assignation: Assignation, structure: NetworkStructure):
    ec = assignation.measurement_map
    if ec is None:
        raise ValueError("measurement side missing")
    for c in structure.measured:
        if sum(1 for x in ec if x == c) != structure.n_excited:
            raise ValueError(f"measurement {c} is not assigned exactly "
                             f"{structure.n_excited} edges")
    return ec


def excitation_signature(assignation: Assignation, structure: NetworkStructure) -> int:
    """Parity of an excitation-side assignation.

    Defined as the parity of stably sorting the unknown edges by assigned
    excitation; equivalently, the signature of the bijective completion that
    hands each excitation block its measurements in canonical order.
    """
    eb = _excitation_counts_ok(assignation, structure)
    m = len(eb)
    b_index = {b: i for i, b in enumerate(structure.excited)}
    order = sorted(range(m), key=lambda k: (b_index[eb[k]], k))
    pos = [0] * m
    for p, k in enumerate(order):
        pos[k] = p
    return _permutation_parity(pos)


def measurement_signature(assignation: Assignation, structure: NetworkStructure) -> int:
    """Parity of a measurement-side assignation.

    Mirror of :func:`excitation_signature` against the same excitation-major
    global order: within each measurement block the edges (in canonical
    order) take the excitations in canonical order.
    """
    ec = _measurement_counts_ok(assignation, structure)
    m = len(ec)
    n_c = structure.n_measured
    c_index = {c: i for i, c in enumerate(structure.measured)}
    seen: dict[int, int] = {}
    pos = [0] * m
    for k in range(m):
        r = seen.get(ec[k], 0)
        seen[ec[k]] = r + 1
        pos[k] = r * n_c + c_index[ec[k]]
    return _permutation_parity(pos)


def block_measurement_signature(
    assignation: Assignation, structure: NetworkStructure, excitation: int
) -> int:
    """Parity of the measurement sub-assignation of one excitation block.

    Considers the edges assigned to ``excitation`` (in canonical edge order)
    and the measurements they map to, which must be pairwise distinct.
    """
    if assignation.excitation_map is None or assignation.measurement_map is None:
        raise ValueError("both assignation sides are needed")
    c_index = {c: i for i, c in enumerate(structure.measured)}
    targets = [
        c_index[c]
        for b, c in zip(assignation.excitation_map, assignation.measurement_map)
        if b == excitation
    ]
    if len(set(targets)) != len(targets):
        raise ValueError("block measurements are not distinct (incompatible sides)")
    ranks = {t: r for r, t in enumerate(sorted(targets))}
    return _permutation_parity([ranks[t] for t in targets])


def block_excitation_signature(
    assignation: Assignation, structure: NetworkStructure, measurement: int
) -> int:
    """Parity of the excitation sub-assignation of one measurement block."""
    if assignation.excitation_map is None or assignation.measurement_map is None:
        raise ValueError("both assignation sides are needed")
    b_index = {b: i for i, b in enumerate(structure.excited)}
    targets = [
        b_index[b]
        for b, c in zip(assignation.excitation_map, assignation.measurement_map)
        if c == measurement
    ]
    if len(set(targets)) != len(targets):
        raise ValueError("block excitations are not distinct (incompatible sides)")
    ranks = {t: r for r, t in enumerate(sorted(targets))}
    return _permutation_parity([ranks[t] for t in targets])


def verify_signature_factorization(
    structure: NetworkStructure, cap: int = DEFAULT_ENUMERATION_CAP
) -> bool:
    """Exhaustively verify the one-sided signature decompositions.

    For every bijective assignation, the global signature must factor as
    the excitation-side signature times the product of the per-excitation
    measurement sub-signatures, and symmetrically for the measurement side.
    These identities are what make :func:`grouped_expansion_det` exact.
    """
    _require_square(structure, cap)
    for a in enumerate_bijective(structure):
        sgn = signature(a, structure)
        lhs = excitation_signature(a, structure)
        for b in structure.excited:
            lhs *= block_measurement_signature(a, structure, b)
        if lhs != sgn:
            return False
        rhs = measurement_signature(a, structure)
        for c in structure.measured:
            rhs *= block_excitation_signature(a, structure, c)
        if rhs != sgn:
            return False
    return True


def _check_shared(g: Realization, g_prime: Realization):
    if g.structure != g_prime.structure:
        raise ValueError("realizations must share one structure")


def assignation_expansion_det(
    g: Realization, g_prime: Realization, cap: int = DEFAULT_ENUMERATION_CAP
) -> complex:
    """Determinant of the decoupled Jacobian as a sum over bijective assignations.

    Each assignation contributes its signature times the product, over
    unknown edges, of the excited-side transfer into the edge start and the
    measured-side transfer out of the edge end.  Brute force; serves as an
    independent oracle for the factorized determinant.
    """
    _check_shared(g, g_prime)
    structure = g.structure
    m = _require_square(structure, cap)
    t = closed_loop(g)
    tp = closed_loop(g_prime)
    unknown = structure.unknown_edges
    total = 0j
    for a in enumerate_bijective(structure):
        term = complex(signature(a, structure))
        for k in range(m):
            e = unknown[k]
            term *= tp[e.src, a.excitation_map[k]] * t[a.measurement_map[k], e.dst]
        total += term
    return total


def grouped_expansion_det(
    g: Realization, g_prime: Realization, cap: int = DEFAULT_ENUMERATION_CAP
) -> complex:
    """Determinant of the decoupled Jacobian grouped by excitation assignation.

    Sums, over all excitation-side assignations, the side signature times
    the excited-side transfer product times one closed-loop subdeterminant
    per excitation (measured rows against the end nodes of the edges
    assigned to it, in canonical edge order).  Enumerates
    ``m! / (n_measured!)^n_excited`` terms instead of ``m!``.
    """
    _check_shared(g, g_prime)
    structure = g.structure
    _require_square(structure, cap)
    t = closed_loop(g)
    tp = closed_loop(g_prime)
    unknown = structure.unknown_edges
    c_nodes = list(structure.measured)
    total = 0j
    for a in enumerate_excitation_assignations(structure):
        eb = a.excitation_map
        term = complex(excitation_signature(a, structure))
        for k, e in enumerate(unknown):
            term *= tp[e.src, eb[k]]
        for b in structure.excited:
            cols = [e.dst for k, e in enumerate(unknown) if eb[k] == b]
            term *= determinant(t[np.ix_(c_nodes, cols)])
        total += term
    return total


def _leg_certificates(
    structure: NetworkStructure, assignation: Assignation
) -> tuple[PathCertificate, ...]:
    """Single-path certificates for both legs of every assigned edge."""
    certs = []
    for k, e in enumerate(structure.unknown_edges):
        b = assignation.excitation_map[k]
        c = assignation.measurement_map[k]
        leg_in = shortest_path(structure, b, e.src)
        leg_out = shortest_path(structure, e.dst, c)
        certs.append(PathCertificate(paths=(leg_in,), sources=(b,), targets=(e.src,)))
        certs.append(PathCertificate(paths=(leg_out,), sources=(e.dst,), targets=(c,)))
    return tuple(certs)


def connected_bijective_condition(
    structure: NetworkStructure, cap: int = DEFAULT_ENUMERATION_CAP
) -> ConditionVerdict:
    """Count connected bijective assignations (saturating at 2).

    An assignation is connected when every unknown edge lies on a route
    from its assigned excitation to its assigned measurement: the
    excitation reaches the edge start and the edge end reaches the
    measurement.  At least one connected bijective assignation is necessary
    for generic decoupled identifiability; exactly one is sufficient.
    """
    m = _require_square(structure, cap)
    reach_from = {b: reachable_set(structure, b) for b in structure.excited}
    reach_to = {c: co_reachable_set(structure, c) for c in structure.measured}
    unknown = structure.unknown_edges
    count = 0
    witnesses = []
    for a in enumerate_bijective(structure):
        if all(
            unknown[k].src in reach_from[a.excitation_map[k]]
            and unknown[k].dst in reach_to[a.measurement_map[k]]
            for k in range(m)
        ):
            count += 1
            if len(witnesses) < 2:
                witnesses.append((a, _leg_certificates(structure, a)))
            if count >= 2:
                break
    return ConditionVerdict(
        necessary_holds=count >= 1,
        sufficient_holds=count == 1,
        counted=min(count, 2),
        witnesses=tuple(witnesses),
    )


def one_sided_path_condition(
    structure: NetworkStructure,
    side: str,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> ConditionVerdict:
    """Count one-sided assignations with full vertex-disjoint fan-out.

    For ``side="excitation"`` an assignation qualifies when every edge start
    is reachable from its assigned excitation and, for each excitation, the
    end nodes of its assigned edges route ``n_measured`` vertex-disjoint
    paths to the measurements.  ``side="measurement"`` mirrors this: edge
    ends reach their assigned measurement and, per measurement, the
    excitations route ``n_excited`` vertex-disjoint paths to the start
    nodes of its assigned edges.  Necessity/sufficiency semantics as in
    :func:`connected_bijective_condition`.
    """
    if side not in ("excitation", "measurement"):
        raise ValueError(f"side must be 'excitation' or 'measurement', got {side!r}")
    _require_square(structure, cap)
    unknown = structure.unknown_edges
    count = 0
    witnesses = []
    flow_cache: dict[tuple, tuple[int, PathCertificate]] = {}

    if side == "excitation":
        anchors = structure.excited
        needed = structure.n_measured
        reach = {b: reachable_set(structure, b) for b in anchors}

        def legs_ok(a):
            return all(unknown[k].src in reach[a.excitation_map[k]] for k in range(len(unknown)))

        def anchor_flow(a, anchor):
            ends = tuple(e.dst for k, e in enumerate(unknown) if a.excitation_map[k] == anchor)
            if ends not in flow_cache:
                flow_cache[ends] = max_vertex_disjoint(structure, ends, structure.measured)
            return flow_cache[ends]

        candidates = enumerate_excitation_assignations(structure)
    else:
        anchors = structure.measured
        needed = structure.n_excited
        reach = {c: co_reachable_set(structure, c) for c in anchors}

        def legs_ok(a):
            return all(unknown[k].dst in reach[a.measurement_map[k]] for k in range(len(unknown)))

        def anchor_flow(a, anchor):
            starts = tuple(e.src for k, e in enumerate(unknown) if a.measurement_map[k] == anchor)
            if starts not in flow_cache:
                flow_cache[starts] = max_vertex_disjoint(structure, structure.excited, starts)
            return flow_cache[starts]

        candidates = enumerate_measurement_assignations(structure)

    for a in candidates:
        if not legs_ok(a):
            continue
        certs = []
        for anchor in anchors:
            beta, cert = anchor_flow(a, anchor)
            if beta != needed:
                break
            certs.append(cert)
        else:
            count += 1
            if len(witnesses) < 2:
                witnesses.append((a, tuple(certs)))
            if count >= 2:
                break
    return ConditionVerdict(
        necessary_holds=count >= 1,
        sufficient_holds=count == 1,
        counted=min(count, 2),
        witnesses=tuple(witnesses),
    )


def two_sided_path_condition(
    structure: NetworkStructure, cap: int = DEFAULT_ENUMERATION_CAP
) -> ConditionVerdict:
    """Count qualifying (excitation, measurement) assignation pairs.

    A pair qualifies when each side qualifies on its own: the sides are not
    required to be compatible, and both the connectivity legs and the
    vertex-disjoint requirements split cleanly by side, so the pair count
    is the product of the one-sided counts (saturated at 2).
    """
    vb = one_sided_path_condition(structure, "excitation", cap)
    vc = one_sided_path_condition(structure, "measurement", cap)
    if vb.counted == 0 or vc.counted == 0:
        counted = 0
    elif vb.counted == 1 and vc.counted == 1:
        counted = 1
    else:
        counted = 2
    witnesses = tuple(w for v in (vb, vc) for w in v.witnesses[:1])
    return ConditionVerdict(
        necessary_holds=counted >= 1,
        sufficient_holds=counted == 1,
        counted=counted,
        witnesses=witnesses,
    )
