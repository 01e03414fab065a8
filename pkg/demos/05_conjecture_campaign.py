#!/usr/bin/env python3
"""Walkthrough: probing an open question with a seeded campaign.

The local rank test and the decoupled rank test are provably related in one
direction (local identifiability implies decoupled identifiability).  The
reverse direction is open: no disagreement between the two ranks has ever
been observed.  A campaign samples many random structures and archives any
disagreement with full reproduction data; disagreements are findings, not
failures, so the run still succeeds.

Proven relationships (the necessity chains and sufficiency flags of the
path conditions) are checked on the same corpus and DO fail the run when
violated, since a violation there can only be a bug.
"""

from netident import CampaignConfig, run_campaign

config = CampaignConfig(
    count=800,
    seed=123,
    n_range=(3, 10),
    excited_range=(1, 3),
    measured_range=(1, 2),
    unknown_policy="exact",
    check_conditions=True,
)
result = run_campaign(config)

print(f"analyzed {result.summary['count']} random structures "
      f"in {result.elapsed:.1f}s")
print(f"  decoupled-identifiable : {result.summary['identifiable_decoupled']}")
print(f"  condition checks run   : {result.summary['conditions_checked']}")
print(f"  rank disagreements     : {result.summary['rank_mismatches']} (archived)")
print(f"  hard violations        : {result.summary['violation_records']}")

if result.mismatches:
    print("\nconjecture material! reproduction data for the first case:")
    case = result.mismatches[0]
    print("  seed entropy:", case["seed_entropy"])
    print("  structure   :", case["structure"])
else:
    print("\nno disagreement between the two rank tests on this corpus,")
    print("consistent with every systematic search so far")

suffixes = [v for r in result.records for v in r["violations"]]
assert not suffixes, f"proven relationships violated: {suffixes}"
