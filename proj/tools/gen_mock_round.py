#!/usr/bin/env python3
"""Writes data/mock_round: 10 posts of 5 problems each plus mock LLM replies for a full round."""
import json
import pathlib
import sys

TAGS = [["inequality"], ["number theory"], ["inequality", "algebra"], ["induction"], ["trigonometry"]]


def problem(i):
    post, idx = divmod(i, 5)
    pid = f"post_{post:02d}_{idx}"
    k = i + 2
    tags = ["geometry"] if i % 10 == 9 else TAGS[i % 5]
    p = {
        "id": pid,
        "post": f"post_{post:02d}",
        "problem": f"Let a, b be positive real numbers with a + b = {k}. Prove that a * b <= {k * k}/4.",
        "answer": None,
        "tags": tags,
        "well_defined": i % 10 != 7,
    }
    if i % 4 == 0:
        p["problem"] = f"Find the remainder when {k}^2 is divided by 7."
        p["answer"] = str(k * k % 7)
    return p


def statement(i, variant):
    k = i + 2
    name = f"mock_{i}"
    kind = i % 4
    if kind == 1:
        return f"theorem {name} (a b c : ℝ) (h : a >= b >= c > 0) (hs : a + b = {k}) : a * b <= {k * k} / 4 := by sorry"
    if kind == 2:
        return f"theorem {name} (a b : ℝ) (h : a + b = {k}) : unknown_bound a b {k} := by sorry"
    if kind == 3 and variant == 0:
        return f"theorem {name} (a b : ℝ) (h : a + b = {k}) : a * b <= {k}a := by sorry"
    if kind == 0:
        return f"theorem {name} : ({k} : ℕ) ^ 2 % 7 = {k * k % 7 + variant * 7} % 7 := by sorry"
    return f"theorem {name} (a b : ℝ) (ha : 0 < a) (hb : 0 < b) (h : a + b = {k}) : a * b <= {k * k} / {4 + variant} * {4 + variant} / 4 := by sorry"


def jsonl(path, rows):
    path.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows))


def main(out):
    out = pathlib.Path(out)
    (out / "posts").mkdir(parents=True, exist_ok=True)
    (out / "mock").mkdir(parents=True, exist_ok=True)
    probs = [problem(i) for i in range(50)]

    extract, well, nl2fl, nli = [], [], [], []
    for post in range(10):
        items = probs[post * 5:post * 5 + 5]
        stem = f"post_{post:02d}"
        text = "\n\n".join(f"Problem {j + 1}. {p['problem']}" for j, p in enumerate(items))
        (out / "posts" / f"{stem}.txt").write_text(text + "\n")
        reply = [{"problem": p["problem"], "answer": p["answer"] or "", "tags": p["tags"]} for p in items]
        extract.append({"key": stem, "response": "```json\n" + json.dumps(reply, indent=2) + "\n```"})
    for i, p in enumerate(probs):
        verdict = "**well-defined**" if p["well_defined"] else "The answer depends on a missing constraint. **ill-defined**"
        well.append({"key": p["id"], "response": verdict})
        nl2fl.append({"key": p["id"], "responses": ["```lean\n" + statement(i, 0) + "\n```", statement(i, 1)]})
        nli.append({"key": p["id"], "response": "**different**" if i % 5 == 3 else "Same hypotheses and goal. **same**"})
    jsonl(out / "mock" / "extract.jsonl", extract)
    jsonl(out / "mock" / "well_defined.jsonl", well)
    jsonl(out / "mock" / "nl2fl.jsonl", nl2fl)
    jsonl(out / "mock" / "nli.jsonl", nli)
    jsonl(out / "mock" / "fl2nl.jsonl", [{"key": "*", "response": "Given the hypotheses, show the stated bound."}])

    config = {
        "version": 1,
        "round": 1,
        "model_id": "mock-translator",
        "store": "store",
        "seed": 7,
        "allowlist": ["inequality", "number_theory", "induction", "trigonometry"],
        "sampling": {"n_samples": 1, "temperature": 0.7, "proof_k": 8, "timeout_s": 30},
        "backends": {"default": {"kind": "mock", "dir": "mock"}},
        "prover": {"kind": "simulated"},
    }
    (out / "config.json").write_text(json.dumps(config, indent=2) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/mock_round")
