#!/usr/bin/env python3
"""Writes data/paper_funnel: tallied verdicts for rounds 1 and 6 and the round-6 tag accuracy rows."""
import json
import pathlib
import sys

TAGS = [
    ("Inequality", 46847, 10, 10),
    ("Algebra", 45218, 9, 10),
    ("Number Theory", 22474, 9, 10),
    ("Trigonometry", 4133, 4, 5),
    ("Equation", 3255, 5, 5),
    ("Proof", 3172, 5, 5),
    ("Calculus", 1061, 4, 5),
    ("Sequence", 926, 4, 5),
    ("Combinatorics", 893, 4, 5),
    ("Series", 418, 5, 5),
    ("Function", 351, 4, 5),
    ("Modular Arithmetic", 339, 4, 5),
    ("Induction", 285, 5, 5),
    ("Logarithm", 269, 5, 5),
    ("Limit", 224, 3, 5),
    ("Real Analysis", 170, 5, 5),
]
FUNNEL = [("extracted", 1088678), ("well_defined", 458692), ("tag_kept", 327870)]
ROUNDS = {1: (136670, 37122), 6: (205079, 57231)}


def norm(tag):
    return "_".join(tag.lower().split())


def tag_sets(npn):
    # each tag covers a contiguous cyclic run of slots, so no slot sees a tag twice
    slots = [[] for _ in range(npn)]
    pos = 0
    for tag, count, _, _ in TAGS:
        for i in range(count):
            slots[(pos + i) % npn].append(norm(tag))
        pos = (pos + count) % npn
    groups = {}
    for s in slots:
        key = tuple(sorted(s))
        groups[key] = groups.get(key, 0) + 1
    return sorted(groups.items())


def jsonl(path, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(json.dumps(r) + "\n" for r in rows))


def main(out):
    out = pathlib.Path(out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "store.json").write_text(json.dumps({"format": "forge-store", "version": 1}) + "\n")
    translated = FUNNEL[-1][1]
    for rnd, (cpn, npn) in ROUNDS.items():
        rows = []
        if rnd == 6:
            rows += [{"compile": "statement_pass", "nli": "positive", "tags": list(k), "count": c}
                     for k, c in tag_sets(npn)]
        else:
            rows.append({"compile": "statement_pass", "nli": "positive", "count": npn})
        rows.append({"compile": "statement_pass", "nli": "negative", "count": cpn - npn})
        rows.append({"compile": "error", "nli": "unjudged", "count": translated - cpn})
        jsonl(out / "rounds" / str(rnd) / "verdict_table.jsonl", rows)
    jsonl(out / "rounds" / "6" / "accuracy.jsonl",
          [{"tag": t, "count": c, "sampled_correct": k, "sampled_total": n} for t, c, k, n in TAGS])
    jsonl(out / "funnel.jsonl",
          [{"stage": s, "count": c} for s, c in FUNNEL] +
          [{"stage": "compiled", "count": ROUNDS[6][0]}, {"stage": "nli_passed", "count": ROUNDS[6][1]}])


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/paper_funnel")
