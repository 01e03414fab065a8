"""Rank tests for generic local and decoupled identifiability.

The measured response of ``w = G w + B r``, ``y = C w`` is ``C T(G) B`` with
``T = (I - G)^{-1}``.  A perturbation ``D`` supported on the unknown edges
moves the response, to first order, by ``C T D T B``; vectorizing turns this
into a Jacobian whose column rank decides identifiability of the unknown
values: full column rank over generic samples means local recoverability,
and any kernel direction is a concrete unidentifiable perturbation.

The decoupled variant evaluates the two closed-loop factors at independent
realizations ``(G, G')`` sharing the known entries, i.e. it tests
``C T(G) D T(G') B = 0  =>  D = 0``.  That is exactly plain identifiability
of a doubled network in which the excited copy carries ``G'``, the measured
copy carries ``G``, and each unknown edge is rewired as a cross link between
the copies; :func:`decoupled_structure` builds that network and
:func:`verify_decoupled_equivalence` cross-checks the two routes.

Conventions fixed across the package: vectorization is column-major, the
unknown-edge order is edges sorted by ``(dst, src)``, and Jacobian rows scan
excitation-measurement pairs with the excitation index major.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .network_model import (
    DEFAULT_POLICY,
    Edge,
    NetworkStructure,
    Realization,
    SamplingPolicy,
    _digest_int,
    _draw_value,
    sample_pair,
    sample_realization,
)
from .numeric_core import DEFAULT_RANK_TOL, closed_loop, noise_floor, numerical_rank

__all__ = [
    "vec",
    "unvec",
    "edge_selector",
    "noise_floor",
    "response_jacobian",
    "decoupled_jacobian",
    "generic_rank_local",
    "generic_rank_decoupled",
    "AnalysisConfig",
    "IdentifiabilityReport",
    "analyze",
    "decoupled_structure",
    "verify_decoupled_equivalence",
    "report_to_dict",
    "report_to_json",
]

_TAG_LOCAL = 1
_TAG_DECOUPLED = 2
_TAG_WITNESS = 3
_TAG_EQUIVALENCE = 4


def _rng_stream(structure: NetworkStructure, seed: int, tag: int) -> np.random.Generator:
    """Per-(seed, structure, purpose) random stream, independent of call order."""
    return np.random.default_rng(
        np.random.SeedSequence([int(seed), _digest_int(structure), tag])
    )


def vec(m: np.ndarray) -> np.ndarray:
    """Column-major vectorization."""
    return np.asarray(m).reshape(-1, order="F")


def unvec(v: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Inverse of :func:`vec`."""
    return np.asarray(v).reshape((rows, cols), order="F")


def edge_selector(structure: NetworkStructure) -> np.ndarray:
    """Binary selector mapping unknown-edge coordinates into vec(G) space.

    Column ``k`` is the standard basis vector of length ``n^2`` marking the
    matrix position of the ``k``-th unknown edge (canonical order), under
    column-major vectorization: entry ``(dst, src)`` sits at row
    ``src * n + dst``.
    """
    n = structure.n
    unknown = structure.unknown_edges
    sel = np.zeros((n * n, len(unknown)))
    for k, e in enumerate(unknown):
        sel[e.src * n + e.dst, k] = 1.0
    return sel


def _jacobian(structure: NetworkStructure, t_measured: np.ndarray, t_excited: np.ndarray) -> np.ndarray:
    """Shared Jacobian core: rows scan (b, c) pairs, columns unknown edges.

    Column ``k`` for unknown edge ``src -> dst`` is the Kronecker product of
    ``t_excited[src, excited]`` and ``t_measured[measured, dst]``.
    """
    b_nodes = np.array(structure.excited, dtype=int)
    c_nodes = np.array(structure.measured, dtype=int)
    unknown = structure.unknown_edges
    out = np.empty((len(b_nodes) * len(c_nodes), len(unknown)), dtype=complex)
    for k, e in enumerate(unknown):
        out[:, k] = np.kron(t_excited[e.src, b_nodes], t_measured[c_nodes, e.dst])
    return out


def response_jacobian(realization: Realization) -> np.ndarray:
    """Jacobian of the measured response with respect to the unknown edges.

    Entry at row ``(b, c)``, column for unknown edge ``src -> dst`` equals
    ``T[src, b] * T[c, dst]``.  Full column rank at a generic realization
    means the network is generically locally identifiable.
    """
    t = closed_loop(realization)
    return _jacobian(realization.structure, t_measured=t, t_excited=t)


def decoupled_jacobian(g: Realization, g_prime: Realization) -> np.ndarray:
    """Two-realization Jacobian; entries ``T'[src, b] * T[c, dst]``.

    ``g`` supplies the measured-side factor and ``g_prime`` the excited-side
    factor.  The two realizations must share the structure and the
    known-edge values.
    """
    if g.structure != g_prime.structure:
        raise ValueError("realizations must share one structure")
    for e in g.structure.known_edges:
        if g.matrix[e.dst, e.src] != g_prime.matrix[e.dst, e.src]:
            raise ValueError(
                f"known edge ({e.src} -> {e.dst}) differs between the realizations"
            )
    t = closed_loop(g)
    t_prime = closed_loop(g_prime)
    return _jacobian(g.structure, t_measured=t, t_excited=t_prime)


def generic_rank_local(
    structure: NetworkStructure,
    samples: int = 3,
    seed: int = 0,
    policy: SamplingPolicy | None = None,
    rel_tol: float = DEFAULT_RANK_TOL,
) -> int:
    """Generic rank of the single-realization Jacobian.

    Maximum numerical rank over ``samples`` independent realizations; a
    generic sample attains the generic rank, so the maximum over a few
    samples is correct with probability one.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = _rng_stream(structure, seed, _TAG_LOCAL)
    best = 0
    for _ in range(samples):
        r = sample_realization(structure, rng, policy)
        t = closed_loop(r)
        k = _jacobian(structure, t_measured=t, t_excited=t)
        best = max(best, numerical_rank(k, rel_tol, floor=noise_floor((r, t), (r, t))))
    return best


def generic_rank_decoupled(
    structure: NetworkStructure,
    samples: int = 3,
    seed: int = 0,
    policy: SamplingPolicy | None = None,
    rel_tol: float = DEFAULT_RANK_TOL,
) -> int:
    """Generic rank of the decoupled Jacobian over sampled pairs."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = _rng_stream(structure, seed, _TAG_DECOUPLED)
    best = 0
    for _ in range(samples):
        g, gp = sample_pair(structure, rng, policy)
        t = closed_loop(g)
        tp = closed_loop(gp)
        k = _jacobian(structure, t_measured=t, t_excited=tp)
        best = max(best, numerical_rank(k, rel_tol, floor=noise_floor((g, t), (gp, tp))))
    return best


@dataclass(frozen=True)
class AnalysisConfig:
    """Knobs for :func:`analyze`; defaults match the package-wide policy."""

    samples: int = 3
    seed: int = 0
    rank_rel_tol: float = DEFAULT_RANK_TOL
    policy: SamplingPolicy = DEFAULT_POLICY


@dataclass(frozen=True, eq=False)
class IdentifiabilityReport:
    """Verdicts and ranks for one structure.

    ``locally_identifiable`` holds iff ``rank_local == unknown_count``;
    ``decoupled_identifiable`` iff ``rank_decoupled == unknown_count``.
    ``kernel_witness`` is present only when the decoupled Jacobian is rank
    deficient: a unit vector ``d`` with ``||K d||`` at noise level, whose
    unvectorized form is an unidentifiable edge perturbation.
    """

    rank_local: int
    rank_decoupled: int
    unknown_count: int
    locally_identifiable: bool
    decoupled_identifiable: bool
    samples_used: int
    kernel_witness: np.ndarray | None = None


def analyze(structure: NetworkStructure, config: AnalysisConfig | None = None) -> IdentifiabilityReport:
    """Full identifiability report for a structure.

    Runs both generic-rank tests; on a decoupled rank deficit it also
    extracts a kernel witness from the least singular vector of one sampled
    decoupled Jacobian.
    """
    cfg = config or AnalysisConfig()
    k = len(structure.unknown_edges)
    rank_local = generic_rank_local(
        structure, cfg.samples, cfg.seed, cfg.policy, cfg.rank_rel_tol
    )
    rank_dec = generic_rank_decoupled(
        structure, cfg.samples, cfg.seed, cfg.policy, cfg.rank_rel_tol
    )
    witness = None
    if rank_dec < k:
        rng = _rng_stream(structure, cfg.seed, _TAG_WITNESS)
        g, gp = sample_pair(structure, rng, cfg.policy)
        khat = decoupled_jacobian(g, gp)
        if khat.shape[0] == 0:
            witness = np.zeros(k, dtype=complex)
            witness[0] = 1.0
        else:
            _, _, vh = np.linalg.svd(khat)
            witness = vh[-1].conj()
    return IdentifiabilityReport(
        rank_local=rank_local,
        rank_decoupled=rank_dec,
        unknown_count=k,
        locally_identifiable=rank_local == k,
        decoupled_identifiable=rank_dec == k,
        samples_used=cfg.samples,
        kernel_witness=witness,
    )


def _verdict(flag: bool) -> str:
    return "identifiable" if flag else "not-identifiable"


def report_to_dict(report: IdentifiabilityReport) -> dict:
    """JSON-ready report; complex numbers rendered as [re, im] pairs."""
    witness = report.kernel_witness
    return {
        "rank_local": report.rank_local,
        "rank_decoupled": report.rank_decoupled,
        "unknown_count": report.unknown_count,
        "verdict_local": _verdict(report.locally_identifiable),
        "verdict_decoupled": _verdict(report.decoupled_identifiable),
        "samples_used": report.samples_used,
        "kernel_witness": None
        if witness is None
        else [[float(z.real), float(z.imag)] for z in witness],
    }


def report_to_json(report: IdentifiabilityReport, indent: int | None = 2) -> str:
    return json.dumps(report_to_dict(report), indent=indent)


def decoupled_structure(structure: NetworkStructure) -> NetworkStructure:
    """Doubled network whose plain identifiability matches the decoupled test.

    Nodes ``0..n-1`` are the measured copy and ``n..2n-1`` the excited copy.
    Every edge of the input appears in both copies marked known (pinned
    values preserved); each unknown edge ``src -> dst`` becomes one unknown
    cross edge ``src+n -> dst`` from the excited into the measured copy.
    Excitations move to the excited copy, measurements stay.
    """
    n = structure.n
    edges = []
    for e in structure.edges:
        pinned = e.value if e.known else None
        edges.append(Edge(e.src, e.dst, known=True, value=pinned))
        edges.append(Edge(e.src + n, e.dst + n, known=True, value=pinned))
    for e in structure.unknown_edges:
        edges.append(Edge(e.src + n, e.dst, known=False))
    return NetworkStructure(
        n=2 * n,
        edges=tuple(edges),
        excited=tuple(b + n for b in structure.excited),
        measured=structure.measured,
        allow_self_loops=structure.allow_self_loops,
    )


def _decoupled_realization(
    structure: NetworkStructure,
    doubled: NetworkStructure,
    g: Realization,
    g_prime: Realization,
    rng: np.random.Generator,
    policy: SamplingPolicy,
) -> Realization:
    """Realization of the doubled network from a shared-known pair.

    The measured copy takes the values of ``g`` and the excited copy those of
    ``g_prime``; cross-edge values are fresh draws (the response Jacobian of
    the doubled network does not depend on them).
    """
    n = structure.n
    m = np.zeros((2 * n, 2 * n), dtype=complex)
    m[:n, :n] = g.matrix
    m[n:, n:] = g_prime.matrix
    for e in structure.unknown_edges:
        m[e.dst, e.src + n] = _draw_value(rng, policy)
    return Realization(doubled, m)


def verify_decoupled_equivalence(
    structure: NetworkStructure,
    samples: int = 3,
    seed: int = 0,
    policy: SamplingPolicy | None = None,
    rel_tol: float = DEFAULT_RANK_TOL,
) -> bool:
    """Cross-check the two routes to the decoupled verdict.

    Route one: generic rank of the decoupled Jacobian.  Route two: generic
    rank of the plain response Jacobian of :func:`decoupled_structure`, whose
    unknowns are the cross edges.  Returns whether the two verdicts agree;
    they must for every structure.
    """
    policy = policy or DEFAULT_POLICY
    k = len(structure.unknown_edges)
    direct = generic_rank_decoupled(structure, samples, seed, policy, rel_tol) == k
    doubled = decoupled_structure(structure)
    rng = _rng_stream(structure, seed, _TAG_EQUIVALENCE)
    best = 0
    for _ in range(samples):
        g, gp = sample_pair(structure, rng, policy)
        r = _decoupled_realization(structure, doubled, g, gp, rng, policy)
        t = closed_loop(r)
        jac = _jacobian(doubled, t_measured=t, t_excited=t)
        best = max(best, numerical_rank(jac, rel_tol, floor=noise_floor((r, t), (r, t))))
    return direct == (best == k)
