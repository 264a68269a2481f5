#!/usr/bin/env python3
"""Short-term-memory capacity ablation on the tabbed-links family.

Runs the same scripted policy with memory windows all/3/1 and prints the
resulting Exact-Match / Prefix-Match table. Instances whose target sits on a
later tab need the full visited-tab history; small windows lose it and loop.

Usage: python3 scripts/memory_window_ablation.py [--out DIR]
"""
import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from hxagent.environment.builtin import builtin_suite
from hxagent.experience import ExperienceSnapshot
from hxagent.orchestrator import CampaignConfig, run_evaluation


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="out/memory-ablation")
    args = parser.parse_args()

    family = [f for f in builtin_suite() if f.task_id == "tabbed-links"]
    print(f"{'memory window':>14s} | {'Exact-Match':>11s} | {'Prefix-Match':>12s}")
    print("-" * 45)
    for window in ("all", 3, 1):
        config = CampaignConfig(
            out_dir=os.path.join(args.out, f"window-{window}"),
            eval_instances=10,
            memory_window=window,
            save_screenshots=False,
        )
        report = run_evaluation(config, suite=family, frozen=ExperienceSnapshot())
        print(f"{str(window):>14s} | {report.exact_match_pct:>10.1f}% | {report.prefix_match_pct:>11.1f}%")
    return 0


if __name__ == "__main__":
    sys.exit(main())
