#!/usr/bin/env python3
"""Train on the builtin suite, then evaluate with the frozen experience and
print the per-task report.

Usage: python3 scripts/run_builtin_campaign.py [--out DIR] [--episodes N] [--instances N]
"""
import argparse
import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from hxagent.orchestrator import CampaignConfig, run_evaluation, run_training


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="out/builtin-campaign")
    parser.add_argument("--episodes", type=int, default=20)
    parser.add_argument("--instances", type=int, default=10)
    args = parser.parse_args()

    config = CampaignConfig(
        out_dir=args.out,
        training_episodes=args.episodes,
        eval_instances=args.instances,
    )
    training = run_training(config)
    print("training moving averages (last point per task):")
    for task_id, points in training.moving_averages.items():
        print(f"  {task_id:16s} {points[-1]['value']:.2f} over {len(points)} episodes")

    report = run_evaluation(config)
    print("\nevaluation report:")
    print(json.dumps(report.to_dict()["per_task"], indent=2))
    print(
        f"\ntotal: Exact-Match {report.exact_match_pct:.1f}% | "
        f"Prefix-Match {report.prefix_match_pct:.1f}% | "
        f"{report.counts['correct_instances']}/{report.counts['instances']} instances correct"
    )
    print(f"artifacts under {args.out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
