"""Command-line interface.

Subcommands:

* ``analyze <file>``: identifiability report for one structure file, with
  optional path-condition verdicts and decoupled-network export.  Exits 0
  when the network is identifiable, 1 when it is not, 2 on errors.
* ``campaign``: randomized batch run writing line-delimited records plus
  summary JSON/CSV.  Rank-test disagreements are archived, never fatal;
  violations of proven relationships exit nonzero.
* ``oracles``: determinant, path-rank, and signature cross-check suites.

The default seed comes from ``--seed``, else the ``NETIDENT_SEED``
environment variable, else 0.  A JSON config file may supply defaults for
any flag; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .algebraic import (
    AnalysisConfig,
    analyze,
    decoupled_structure,
    report_to_dict,
)
from .assignations import (
    EnumerationCapExceeded,
    connected_bijective_condition,
    one_sided_path_condition,
    two_sided_path_condition,
)
from .harness import CampaignConfig, run_campaign, run_oracle_suites, write_campaign_result
from .network_model import parse_structure, serialize_structure, structure_digest

__all__ = ["main"]


def _default_seed() -> int:
    env = os.environ.get("NETIDENT_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise SystemExit(f"NETIDENT_SEED must be an integer, got {env!r}")


def _apply_config_file(args: argparse.Namespace, parser: argparse.ArgumentParser):
    """Fill in values from --config for flags the user left at their default."""
    if not getattr(args, "config", None):
        return
    try:
        overrides = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config file: {exc}")
    explicit = {a.lstrip("-").replace("-", "_").split("=")[0] for a in sys.argv[1:]}
    for key, value in overrides.items():
        name = key.replace("-", "_")
        if hasattr(args, name) and name not in explicit:
            setattr(args, name, value)


def _certificate_dict(cert) -> dict:
    return {
        "paths": [list(p) for p in cert.paths],
        "sources": list(cert.sources),
        "targets": list(cert.targets),
    }


def _conditions_payload(structure, cap: int) -> dict:
    unknown = len(structure.unknown_edges)
    pairs = structure.n_excited * structure.n_measured
    if unknown != pairs:
        return {"skipped": f"{unknown} unknown edges vs {pairs} excitation-measurement pairs"}
    try:
        verdicts = {
            "connected_bijective": connected_bijective_condition(structure, cap),
            "excitation_side": one_sided_path_condition(structure, "excitation", cap),
            "measurement_side": one_sided_path_condition(structure, "measurement", cap),
            "two_sided": two_sided_path_condition(structure, cap),
        }
    except EnumerationCapExceeded as exc:
        return {"skipped": str(exc)}
    payload = {}
    for name, v in verdicts.items():
        payload[name] = {
            "necessary_holds": v.necessary_holds,
            "sufficient_holds": v.sufficient_holds,
            "counted": v.counted,
            "witnesses": [
                {
                    "assignation": a.to_dict(structure),
                    "certificates": [_certificate_dict(c) for c in certs],
                }
                for a, certs in v.witnesses
            ],
        }
    return payload


def _cmd_analyze(args) -> int:
    try:
        text = Path(args.file).read_text()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        structure = parse_structure(text)
        cfg = AnalysisConfig(samples=args.samples, seed=args.seed, rank_rel_tol=args.tol)
        report = analyze(structure, cfg)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    payload = {
        "file": str(args.file),
        "structure_digest": structure_digest(structure),
        "report": report_to_dict(report),
    }
    pairs = structure.n_excited * structure.n_measured
    if report.unknown_count > pairs:
        payload["reason"] = "more unknowns than (in, out) data"
    if args.conditions:
        payload["conditions"] = _conditions_payload(structure, args.cap)
    if args.decoupled_out:
        Path(args.decoupled_out).write_text(
            serialize_structure(decoupled_structure(structure)) + "\n"
        )
        payload["decoupled_out"] = str(args.decoupled_out)
    text_out = json.dumps(payload, indent=2)
    print(text_out)
    if args.out:
        Path(args.out).write_text(text_out + "\n")
    identifiable = report.locally_identifiable and report.decoupled_identifiable
    return 0 if identifiable else 1


def _cmd_campaign(args) -> int:
    config = CampaignConfig(
        count=args.count,
        seed=args.seed,
        n_range=(args.n_min, args.n_max),
        density_range=(args.density_min, args.density_max),
        unknown_policy=args.unknown_policy,
        samples=args.samples,
        condition_cap=args.cap,
        check_conditions=not args.no_conditions,
        jobs=args.jobs,
    )
    try:
        result = run_campaign(config)
        write_campaign_result(result, args.out)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(
        f"campaign: {result.summary['count']} structures, "
        f"{result.summary['rank_mismatches']} rank mismatches (archived), "
        f"{result.summary['violation_records']} violation records, "
        f"{result.elapsed:.1f}s",
        file=sys.stderr,
    )
    print(f"records written to {args.out}", file=sys.stderr)
    return 1 if result.violations else 0


def _cmd_oracles(args) -> int:
    try:
        suites = run_oracle_suites(
            seed=args.seed, cap=args.cap,
            det_cases=args.det_cases, path_cases=args.path_cases,
        )
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for name in ("determinant_triangle", "rank_vs_paths", "signature_factorization"):
        state = "PASS" if suites[name]["passed"] else "FAIL"
        print(f"{state} {name}: {json.dumps(suites[name])}")
    return 0 if suites["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netident",
        description="Generic identifiability of dynamical networks "
        "with partial excitation and measurement.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    seed_default = _default_seed()

    p = sub.add_parser("analyze", help="analyze one structure file")
    p.add_argument("file", help="structure file (JSON)")
    p.add_argument("--samples", type=int, default=3, help="realizations per rank test")
    p.add_argument("--tol", type=float, default=1e-9, help="relative rank threshold")
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--conditions", action="store_true", help="run path-based condition checks")
    p.add_argument("--cap", type=int, default=8, help="enumeration cap for condition checks")
    p.add_argument("--decoupled-out", default=None, help="write the decoupled network here")
    p.add_argument("--out", default=None, help="also write the report to this file")
    p.add_argument("--config", default=None, help="JSON file with flag defaults")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("campaign", help="randomized rank-equivalence campaign")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--n-max", type=int, default=10, dest="n_max")
    p.add_argument("--n-min", type=int, default=3, dest="n_min")
    p.add_argument("--density-min", type=float, default=0.2)
    p.add_argument("--density-max", type=float, default=0.6)
    p.add_argument("--unknown-policy", choices=("exact", "upto"), default="exact")
    p.add_argument("--samples", type=int, default=3)
    p.add_argument("--cap", type=int, default=6, help="condition-check enumeration cap")
    p.add_argument("--no-conditions", action="store_true", help="skip condition checks")
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="output path for JSONL records")
    p.add_argument("--config", default=None, help="JSON file with flag defaults")
    p.set_defaults(func=_cmd_campaign)

    p = sub.add_parser("oracles", help="run the oracle cross-check suites")
    p.add_argument("--cap", type=int, default=6)
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--det-cases", type=int, default=100)
    p.add_argument("--path-cases", type=int, default=200)
    p.add_argument("--config", default=None, help="JSON file with flag defaults")
    p.set_defaults(func=_cmd_oracles)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_config_file(args, parser)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
