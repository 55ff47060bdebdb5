#!/usr/bin/env python3
"""Recompute every cluster's class rules from the input CSV and clusters.json
by brute-force subset counting, then compare against report/rules.csv.

usage: crosscheck_rules.py INPUT_CSV OUTPUT_DIR
"""

import csv
import json
import sys
from collections import Counter
from fractions import Fraction
from itertools import combinations

ATTRS = ["bug_severity", "priority", "op_sys", "component"]
DISPLAY = {"bug_severity": "Severity {%s}", "priority": "Priority {%s}", "op_sys": "Os {%s}",
           "component": "Component{%s}"}


def norm(v):
    v = v.strip()
    return "Unspecified" if v in ("", "--") else v


def main(input_csv, out_dir):
    with open(input_csv, newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    with open(f"{out_dir}/config_used.json") as f:
        cfg = json.load(f)
    with open(f"{out_dir}/clusters.json") as f:
        assignment = json.load(f)["assignments"]

    # Display labels: first-seen casing per attribute; severity is capitalized.
    first = {a: {} for a in ATTRS + ["assigned_to"]}
    for r in rows:
        for a in first:
            v = norm(r[a])
            first[a].setdefault(v.lower(), v.capitalize() if a == "bug_severity" else v)

    def label(a, v):
        return first[a][norm(v).lower()]

    minsup, minconf, top_n = cfg["min_support_count"], Fraction(str(cfg["min_confidence"])), cfg["top_n"]
    expected = {}
    clusters = {}
    for r in rows:
        clusters.setdefault(assignment[r["bug_id"]], []).append(r)
    for c, members in clusters.items():
        who = Counter(label("assigned_to", r["assigned_to"]) for r in members)
        first_seen = list(first["assigned_to"].values())
        top = sorted(who, key=lambda w: (-who[w], first_seen.index(w)))[:top_n]
        ante_count, rule_count = Counter(), Counter()
        for r in members:
            items = tuple((a, label(a, r[a])) for a in ATTRS)
            w = label("assigned_to", r["assigned_to"])
            for n in range(1, 5):
                for sub in combinations(items, n):
                    ante_count[sub] += 1
                    rule_count[(sub, w)] += 1
        rules = {}
        for (sub, w), s in rule_count.items():
            conf = Fraction(s, ante_count[sub])
            if w in top and s >= minsup and conf >= minconf:
                rules[(sub, w)] = (s, conf)
        for (sub, w), (s, conf) in rules.items():
            redundant = any(
                (o, w) in rules and rules[(o, w)][1] >= conf
                for n in range(1, len(sub)) for o in combinations(sub, n))
            text = " ∧ ".join(DISPLAY[a] % v for a, v in sub)
            expected[(c, text, w)] = (s, "redundant" if redundant else "essential")

    with open(f"{out_dir}/report/rules.csv", newline="", encoding="utf-8") as f:
        actual = {(int(r["cluster"]), r["antecedent"], r["consequent"]): (int(r["support_count"]), r["status"])
                  for r in csv.DictReader(f)}

    missing = expected.keys() - actual.keys()
    extra = actual.keys() - expected.keys()
    wrong = [k for k in expected.keys() & actual.keys() if expected[k] != actual[k]]
    for k in sorted(missing)[:10]:
        print("missing", k)
    for k in sorted(extra)[:10]:
        print("unexpected", k)
    for k in sorted(wrong)[:10]:
        print("differs", k, expected[k], actual[k])
    print(f"{len(expected)} rules expected, {len(actual)} reported, "
          f"{len(missing)} missing, {len(extra)} unexpected, {len(wrong)} differing")
    return 0 if not (missing or extra or wrong) else 1


if __name__ == "__main__":
    sys.exit(main(sys.argv[1], sys.argv[2]))
