#!/usr/bin/env python3
"""Independent recomputation of the deviation fixture's expected numbers.

Reads machine.json and baseline.json from this directory, recomputes the
per-criterion deviations by hand (no shared code with the C++ pipeline),
and writes expected.json. With --check it instead verifies that
expected.json matches the recomputation bit for bit.
"""

import json
import os
import sys

HERE = os.path.dirname(os.path.abspath(__file__))


def machine_values(runs):
    """Mean per-run numeric value; NotFound counts 0, NoResult runs are skipped."""
    per_criterion = {}
    for run in runs:
        for agg in run["aggregates"]:
            cid = agg["criterion_id"]
            if agg["status"] == "scored":
                value = agg["value"]
            elif agg["status"] == "not_found":
                value = 0.0
            else:  # no_result
                value = None
            per_criterion.setdefault(cid, []).append(value)
    out = {}
    for cid, values in per_criterion.items():
        usable = [v for v in values if v is not None]
        out[cid] = sum(usable) / len(usable) if usable else None
    return out


def main():
    machine = json.load(open(os.path.join(HERE, "machine.json")))
    baseline = json.load(open(os.path.join(HERE, "baseline.json")))

    human = {}
    for rater in baseline["raters"]:
        for cid, score in rater["scores"].items():
            human.setdefault(int(cid), []).append(score)
    human_mean = {cid: sum(v) / len(v) for cid, v in human.items()}

    machine_mean = machine_values(machine["runs"])

    per_criterion = {}
    excluded = []
    for cid in sorted(human_mean):
        if machine_mean.get(cid) is None:
            excluded.append(cid)
            continue
        per_criterion[str(cid)] = abs(machine_mean[cid] - human_mean[cid]) / 4.0 * 100.0

    deviations = list(per_criterion.values())
    average = sum(deviations) / len(deviations)
    within_15 = sum(1 for d in deviations if d <= 15.0)
    agreement = within_15 / len(deviations)

    expected = {
        "per_criterion_deviation_pct": per_criterion,
        "excluded": excluded,
        "average_deviation_pct": average,
        "agreement_fraction_at_15": agreement,
    }

    path = os.path.join(HERE, "expected.json")
    if "--check" in sys.argv:
        on_disk = json.load(open(path))
        if on_disk != expected:
            print("expected.json does not match the recomputation", file=sys.stderr)
            print("recomputed:", json.dumps(expected, indent=2), file=sys.stderr)
            return 1
        print("expected.json matches the independent recomputation")
        return 0
    with open(path, "w") as f:
        json.dump(expected, f, indent=2)
        f.write("\n")
    print("wrote", path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
