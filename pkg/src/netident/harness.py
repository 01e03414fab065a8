"""Batch engine: random campaigns, cross-check suites, and report writers.

A campaign draws seeded random structures, runs both rank tests on each,
runs the path-based condition checks where they apply, and classifies the
outcomes.  Disagreements between the two rank tests are conjecture
material: they are archived with full reproduction data but do not fail
the run.  Violations of proven relationships (necessity chains, sufficiency
flags, the local-implies-decoupled direction) are hard failures.

Campaign records are pure functions of (config, index), so result files are
byte-identical across runs and parallelism settings.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .algebraic import (
    AnalysisConfig,
    analyze,
    decoupled_jacobian,
    verify_decoupled_equivalence,
)
from .assignations import (
    assignation_expansion_det,
    connected_bijective_condition,
    grouped_expansion_det,
    one_sided_path_condition,
    two_sided_path_condition,
    verify_signature_factorization,
)
from .fixtures import triple_path_example
from .graph_analysis import max_vertex_disjoint, transfer_rank_matches_paths
from .network_model import (
    SamplingError,
    random_structure,
    sample_pair,
    serialize_structure,
    structure_digest,
)
from .numeric_core import determinant

__all__ = [
    "CampaignConfig",
    "CampaignResult",
    "campaign_record",
    "run_campaign",
    "write_campaign_result",
    "random_square_structure",
    "run_determinant_suite",
    "run_path_rank_suite",
    "run_signature_suite",
    "run_oracle_suites",
]

DET_ABS_TOL = 1e-12
DET_REL_TOL = 1e-8


@dataclass(frozen=True)
class CampaignConfig:
    """Parameters of a randomized campaign; all draws derive from ``seed``."""

    count: int = 100
    seed: int = 0
    n_range: tuple[int, int] = (3, 10)
    density_range: tuple[float, float] = (0.2, 0.6)
    excited_range: tuple[int, int] = (1, 3)
    measured_range: tuple[int, int] = (1, 3)
    unknown_policy: str = "exact"  # "exact": one unknown per (b, c) pair; "upto": fewer allowed
    samples: int = 3
    condition_cap: int = 6
    check_conditions: bool = True
    check_equivalence: bool = False
    jobs: int = 1

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.unknown_policy not in ("exact", "upto"):
            raise ValueError(f"unknown_policy must be 'exact' or 'upto', got {self.unknown_policy!r}")
        for lo, hi in (self.n_range, self.density_range, self.excited_range, self.measured_range):
            if lo > hi:
                raise ValueError(f"empty range ({lo}, {hi})")


@dataclass
class CampaignResult:
    """Outcome of a campaign run.

    ``mismatches`` lists records where the two rank tests disagreed (open
    question material, never a failure); ``violations`` lists records
    breaking a proven relationship (always a failure).  ``elapsed`` is
    wall-clock time and is deliberately kept out of the serialized files.
    """

    records: list[dict]
    mismatches: list[dict]
    violations: list[dict]
    summary: dict
    elapsed: float


def _draw_structure(config: CampaignConfig, index: int):
    """Feasible random structure for one campaign slot, with its entropy."""
    for attempt in range(100):
        entropy = [config.seed, index, attempt]
        rng = np.random.default_rng(np.random.SeedSequence(entropy))
        n = int(rng.integers(config.n_range[0], config.n_range[1] + 1))
        nb = int(rng.integers(config.excited_range[0], min(config.excited_range[1], n) + 1))
        nc = int(rng.integers(config.measured_range[0], min(config.measured_range[1], n) + 1))
        nb, nc = min(nb, n), min(nc, n)
        density = float(rng.uniform(*config.density_range))
        unknown = nb * nc
        if config.unknown_policy == "upto":
            unknown = int(rng.integers(0, nb * nc + 1))
        if unknown > round(density * n * (n - 1)):
            continue
        try:
            structure = random_structure(n, density, nb, nc, unknown, rng)
            return structure, entropy, int(rng.integers(np.iinfo(np.int64).max))
        except ValueError:
            continue
    raise ValueError(
        f"could not draw a feasible structure for slot {index}; widen the ranges"
    )


def _verdict_dict(verdict) -> dict:
    return {
        "necessary_holds": verdict.necessary_holds,
        "sufficient_holds": verdict.sufficient_holds,
        "counted": verdict.counted,
    }


def campaign_record(config: CampaignConfig, index: int) -> dict:
    """Analyze one campaign slot; pure function of (config, index)."""
    structure, entropy, analysis_seed = _draw_structure(config, index)
    cfg = AnalysisConfig(samples=config.samples, seed=analysis_seed)
    report = analyze(structure, cfg)
    record = {
        "index": index,
        "digest": structure_digest(structure),
        "structure": serialize_structure(structure),
        "seed_entropy": entropy,
        "n": structure.n,
        "n_excited": structure.n_excited,
        "n_measured": structure.n_measured,
        "unknown_count": report.unknown_count,
        "rank_local": report.rank_local,
        "rank_decoupled": report.rank_decoupled,
        "verdict_local": "identifiable" if report.locally_identifiable else "not-identifiable",
        "verdict_decoupled": "identifiable" if report.decoupled_identifiable else "not-identifiable",
        "rank_mismatch": report.rank_local != report.rank_decoupled,
        "conditions": None,
        "violations": [],
    }
    violations = []
    if report.locally_identifiable and not report.decoupled_identifiable:
        violations.append("local-identifiable-but-not-decoupled")
    square = report.unknown_count == structure.n_excited * structure.n_measured
    if config.check_conditions and square and report.unknown_count <= config.condition_cap:
        verdicts = {
            "connected_bijective": connected_bijective_condition(structure, config.condition_cap),
            "excitation_side": one_sided_path_condition(structure, "excitation", config.condition_cap),
            "measurement_side": one_sided_path_condition(structure, "measurement", config.condition_cap),
            "two_sided": two_sided_path_condition(structure, config.condition_cap),
        }
        record["conditions"] = {name: _verdict_dict(v) for name, v in verdicts.items()}
        for name, v in verdicts.items():
            if report.decoupled_identifiable and not v.necessary_holds:
                violations.append(f"necessity-violated:{name}")
            if v.sufficient_holds and not report.decoupled_identifiable:
                violations.append(f"sufficiency-violated:{name}")
    if config.check_equivalence:
        if not verify_decoupled_equivalence(structure, config.samples, analysis_seed):
            violations.append("decoupled-network-equivalence-failed")
    record["violations"] = violations
    return record


def _record_worker(args) -> dict:
    config, index = args
    return campaign_record(config, index)


def run_campaign(config: CampaignConfig) -> CampaignResult:
    """Run a campaign; deterministic given the seed, for any jobs count."""
    start = time.perf_counter()
    if config.jobs > 1:
        chunk = max(1, config.count // (config.jobs * 8))
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            records = list(
                pool.map(_record_worker, ((config, i) for i in range(config.count)), chunksize=chunk)
            )
    else:
        records = [campaign_record(config, i) for i in range(config.count)]
    elapsed = time.perf_counter() - start
    mismatches = [r for r in records if r["rank_mismatch"]]
    violations = [r for r in records if r["violations"]]
    summary = {
        "config": asdict(config),
        "count": len(records),
        "identifiable_local": sum(r["verdict_local"] == "identifiable" for r in records),
        "identifiable_decoupled": sum(r["verdict_decoupled"] == "identifiable" for r in records),
        "conditions_checked": sum(r["conditions"] is not None for r in records),
        "rank_mismatches": len(mismatches),
        "violation_records": len(violations),
        "mismatch_indices": [r["index"] for r in mismatches],
        "violation_indices": [r["index"] for r in violations],
    }
    return CampaignResult(records, mismatches, violations, summary, elapsed)


_CSV_COLUMNS = [
    "index", "digest", "n", "n_excited", "n_measured", "unknown_count",
    "rank_local", "rank_decoupled", "verdict_local", "verdict_decoupled",
    "rank_mismatch", "violations",
]


def write_campaign_result(result: CampaignResult, path) -> None:
    """Write records (JSON lines), a summary object, and a summary CSV.

    ``path`` receives one JSON record per line; ``path.summary.json`` and
    ``path.summary.csv`` sit next to it.  Output is byte-identical across
    runs with the same config.
    """
    path = Path(path)
    with path.open("w") as fh:
        for record in result.records:
            fh.write(json.dumps(record, separators=(",", ":")) + "\n")
    with Path(str(path) + ".summary.json").open("w") as fh:
        json.dump(result.summary, fh, indent=2)
        fh.write("\n")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_COLUMNS)
    for record in result.records:
        row = [record[col] for col in _CSV_COLUMNS[:-1]]
        row.append(";".join(record["violations"]))
        writer.writerow(row)
    Path(str(path) + ".summary.csv").write_text(buf.getvalue())


def random_square_structure(rng: np.random.Generator, max_product: int = 6,
                            n_range: tuple[int, int] = (3, 8),
                            density_range: tuple[float, float] = (0.25, 0.6)) -> NetworkStructure:
    """Random structure with exactly one unknown edge per (b, c) pair."""
    shapes = [
        (b, c)
        for b in range(1, max_product + 1)
        for c in range(1, max_product + 1)
        if b * c <= max_product
    ]
    for _ in range(200):
        nb, nc = shapes[int(rng.integers(len(shapes)))]
        n = int(rng.integers(max(nb, nc, n_range[0]), n_range[1] + 1))
        density = float(rng.uniform(*density_range))
        if nb * nc > round(density * n * (n - 1)):
            continue
        try:
            return random_structure(n, density, nb, nc, nb * nc, rng)
        except ValueError:
            continue
    raise ValueError("could not draw a feasible square structure; widen the ranges")


def run_determinant_suite(cases: int = 100, seed: int = 0, cap: int = 6) -> dict:
    """Compare the LU determinant of the decoupled Jacobian with both expansions.

    Every pair must satisfy ``|d_lu - d| <= 1e-8 |d_lu| + 1e-12``; the two
    expansions enumerate assignations independently of the LU route.  Caps
    above 8 are clamped (factorial enumeration) and reported, not fatal.
    """
    requested_cap = cap
    cap = min(cap, 8)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 11]))
    worst_abs = 0.0
    worst_rel = 0.0
    failures = 0
    done = 0
    while done < cases:
        structure = random_square_structure(rng, max_product=cap)
        try:
            g, gp = sample_pair(structure, rng)
        except SamplingError:
            continue
        d_lu = determinant(decoupled_jacobian(g, gp))
        d_perm = assignation_expansion_det(g, gp, cap=cap)
        d_group = grouped_expansion_det(g, gp, cap=cap)
        for d in (d_perm, d_group):
            diff = abs(d_lu - d)
            worst_abs = max(worst_abs, diff)
            if abs(d_lu) > 1e-6:
                worst_rel = max(worst_rel, diff / abs(d_lu))
            if diff > DET_REL_TOL * abs(d_lu) + DET_ABS_TOL:
                failures += 1
        done += 1
    out = {
        "cases": done,
        "failures": failures,
        "max_abs_diff": worst_abs,
        "max_rel_diff_on_regular": worst_rel,
        "passed": failures == 0,
    }
    if requested_cap != cap:
        out["cap_clamped_to"] = cap
    return out


def run_path_rank_suite(cases: int = 200, seed: int = 0) -> dict:
    """Check generic closed-loop subranks against vertex-disjoint path counts."""
    fixture = triple_path_example()
    fixture_beta, _ = max_vertex_disjoint(fixture, fixture.excited, fixture.measured)
    mismatches = 0
    if not transfer_rank_matches_paths(fixture, fixture.excited, fixture.measured, seed=seed):
        mismatches += 1
    rng = np.random.default_rng(np.random.SeedSequence([seed, 12]))
    done = 0
    while done < cases:
        n = int(rng.integers(3, 9))
        density = float(rng.uniform(0.15, 0.6))
        try:
            structure = random_structure(n, density, 1, 1, 0, rng)
        except ValueError:
            continue
        sources = [int(v) for v in rng.integers(0, n, size=int(rng.integers(1, 5)))]
        targets = sorted({int(v) for v in rng.integers(0, n, size=int(rng.integers(1, 5)))})
        if not transfer_rank_matches_paths(structure, sources, targets, seed=int(rng.integers(1 << 62))):
            mismatches += 1
        done += 1
    return {
        "cases": done + 1,
        "fixture_path_count": fixture_beta,
        "mismatches": mismatches,
        "passed": mismatches == 0,
    }


def run_signature_suite(products: tuple[int, ...] = (2, 4, 6), seed: int = 0) -> dict:
    """Exhaustively verify the signature decompositions at small sizes.

    Covers every (n_excited, n_measured) factorization of each requested
    product; the decomposition only depends on those cardinalities.
    """
    shapes = []
    for p in products:
        shapes.extend((b, p // b) for b in range(1, p + 1) if p % b == 0)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 13]))
    checked = []
    ok = True
    for nb, nc in shapes:
        n = max(nb, nc, 4)
        structure = random_structure(n, 0.6, nb, nc, nb * nc, rng)
        result = verify_signature_factorization(structure, cap=max(products))
        checked.append({"n_excited": nb, "n_measured": nc, "ok": result})
        ok = ok and result
    return {"shapes": checked, "passed": ok}


def run_oracle_suites(seed: int = 0, cap: int = 6, det_cases: int = 100,
                      path_cases: int = 200) -> dict:
    """Run all cross-check suites; ``passed`` aggregates the verdicts."""
    suites = {
        "determinant_triangle": run_determinant_suite(det_cases, seed, cap),
        "rank_vs_paths": run_path_rank_suite(path_cases, seed),
        "signature_factorization": run_signature_suite(seed=seed),
    }
    suites["passed"] = all(s["passed"] for s in suites.values())
    return suites
