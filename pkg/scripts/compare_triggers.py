#!/usr/bin/env python3
"""Trigger-count comparison: graph-guided materialization vs the SNE chase.

Generates seeded KB corpora, runs the Datalog engine in its four
configurations against the restricted chase, and prints per-family trigger
and cost totals.  The interesting column is `tgmat/min+exec`: it should
never exceed the chase and should win clearly on the cyclic family.

    python scripts/compare_triggers.py [--seed N] [--count N]
"""

import argparse
import sys

from tgmat import ChaseConfig, chase, tg_mat
from tgmat.generate import generate_corpus

CONFIGS = {
    "min+exec": dict(use_min=True, use_exec=True),
    "min only": dict(use_min=True, use_exec=False),
    "exec only": dict(use_min=False, use_exec=True),
    "plain": dict(use_min=False, use_exec=False),
}


def run_family(family: str, seed: int, count: int):
    kbs = generate_corpus(seed, family, count)
    totals = {name: {"triggers": 0, "cost": 0} for name in CONFIGS}
    chase_triggers = 0
    wins = 0
    for kb in kbs:
        sne = chase(kb.program, kb.base, ChaseConfig(variant="restricted"))
        chase_triggers += sne.triggers_computed
        for name, opts in CONFIGS.items():
            res = tg_mat(kb.program, kb.base, **opts)
            assert res.final == sne.final, "engine disagreement"
            totals[name]["triggers"] += res.metrics["triggers"]
            totals[name]["cost"] += res.metrics["cost_units"]
        best = tg_mat(kb.program, kb.base, use_min=True, use_exec=True)
        if best.metrics["triggers"] < sne.triggers_computed:
            wins += 1
    print(f"\n== family {family} ({count} KBs, seed {seed}) ==")
    print(f"{'engine':>14} {'triggers':>10} {'cost units':>12}")
    print(f"{'chase (SNE)':>14} {chase_triggers:>10} {'-':>12}")
    for name in CONFIGS:
        t = totals[name]
        print(f"{'tgmat/' + name:>14} {t['triggers']:>10} {t['cost']:>12}")
    print(f"strict trigger wins for min+exec: {wins}/{count}")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--count", type=int, default=30)
    args = ap.parse_args(argv)
    for family in ("datalog", "cyclic-datalog"):
        run_family(family, args.seed, args.count)
    return 0


if __name__ == "__main__":
    sys.exit(main())
