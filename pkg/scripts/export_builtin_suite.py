#!/usr/bin/env python3
"""Materialize the builtin suite as plain files: per-instance sim-site
definitions, static HTML exports, ground-truth files, a task-suite document,
and the scripted perfect-policy table. The exported tree is what the CLI
consumes via --task-suite and llm_script, and doubles as a worked example of
every external file format.

Usage: python3 scripts/export_builtin_suite.py [--out DIR]
"""
import argparse
import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from hxagent.environment.builtin import builtin_suite, suite_policy_entries
from hxagent.environment.sim import export_static_html
from hxagent.metrics import ground_truth_to_dict, GroundTruth


def site_to_dict(site):
    transitions = []
    for t in site.transitions:
        item = {"page": t.page, "on": {"xpath": t.xpath}, "operation": t.operation}
        if t.require:
            item["require"] = dict(t.require)
        if t.set_vars:
            item["set"] = dict(t.set_vars)
        if t.goto is not None:
            item["goto"] = t.goto
        if t.var is not None:
            item["var"] = t.var
        if t.content is not None:
            item["content"] = t.content
        transitions.append(item)
    return {
        "name": site.name,
        "title": site.title,
        "start_page": site.start_page,
        "pages": {name: {"html": html} for name, html in site.pages.items()},
        "transitions": transitions,
        "goal": site.goal,
        "render_overrides": site.render_overrides,
    }


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="out/builtin-suite")
    args = parser.parse_args()

    suite = builtin_suite()
    sites_dir = os.path.join(args.out, "sites")
    html_dir = os.path.join(args.out, "html")
    truth_dir = os.path.join(args.out, "ground-truth")
    for path in (sites_dir, html_dir, truth_dir):
        os.makedirs(path, exist_ok=True)

    suite_doc = {"tasks": []}
    for family in suite:
        truths, texts = {}, {}
        task_entry = {"task_id": family.task_id, "instances": []}
        for instance in family.instances:
            site_file = f"sites/{instance.site.name}.json"
            with open(os.path.join(args.out, site_file), "w") as handle:
                json.dump(site_to_dict(instance.site), handle, indent=2, ensure_ascii=False)
            export_static_html(instance.site, os.path.join(html_dir, instance.site.name))
            truths[instance.instance_id] = GroundTruth(
                task_instance_id=instance.instance_id, actions=instance.ground_truth
            )
            texts[instance.instance_id] = instance.task_text
            task_entry["instances"].append(
                {
                    "id": instance.instance_id,
                    "task_text": instance.task_text,
                    "site": site_file,
                    "entry": instance.entry,
                    "ground_truth": [a.to_dict() for a in instance.ground_truth],
                }
            )
        with open(os.path.join(truth_dir, f"{family.task_id}.json"), "w") as handle:
            json.dump(ground_truth_to_dict(family.task_id, truths, texts), handle, indent=2, ensure_ascii=False)
        suite_doc["tasks"].append(task_entry)

    with open(os.path.join(args.out, "suite.json"), "w") as handle:
        json.dump(suite_doc, handle, indent=2, ensure_ascii=False)
    entries = suite_policy_entries(suite)
    with open(os.path.join(args.out, "perfect-policy.json"), "w") as handle:
        json.dump([e.to_dict() for e in entries], handle, indent=2, ensure_ascii=False)

    print(f"exported {sum(len(f.instances) for f in suite)} instances across {len(suite)} tasks to {args.out}/")
    print(f"  suite document: {args.out}/suite.json")
    print(f"  scripted policy: {args.out}/perfect-policy.json ({len(entries)} entries)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
