#!/usr/bin/env python3
"""Records REPL exchanges through `forge repl check --record-fixtures` and the fake REPL,
then stamps each fixture with a hand-assigned expected verdict."""
import json
import pathlib
import subprocess
import sys
import tempfile

S = "theorem t (a b : ℝ) (ha : 0 < a) (hb : 0 < b) : a + b > 0"
CASES = [
    ("sorry_statement", S + " := by sorry", None, "statement_pass"),
    ("sorry_reference", "theorem ex_1 (n p : ℕ) (hp: Nat.Prime p) (h₁ : p ∣ n) : { (x, y) : ℕ × ℕ | x + y = n ∧ Nat.gcd x y = p }.Finite := by sorry", None, "statement_pass"),
    ("sorry_imo1983", "theorem IMO1983_P5 : ∃ S : Finset ℕ, S.card = 1983 ∧ (∀ x ∈ S, x ≤ 10^5) ∧ ∀ x ∈ S, ∀ y ∈ S, ∀ z ∈ S, x < y ∧ y < z → x + z ≠ 2 * y := by sorry", None, "statement_pass"),
    ("proof_closed", S, "by positivity", "proof_pass"),
    ("proof_nlinarith", "theorem u (a b : ℝ) : a ^ 2 + b ^ 2 ≥ 2 * a * b", "by nlinarith [sq_nonneg (a - b)]", "proof_pass"),
    ("proof_bogus_tactic", S, "by bogus_tac", "error"),
    ("proof_sorry_inside", S, "by\n  have h : 0 < a + b := by sorry\n  linarith", "statement_pass"),
    ("unqualified_sqrt", "theorem v (a b c : ℝ) : a / sqrt (a ^ 2 + 8 * b * c) ≥ 0 := by sorry", None, "error"),
    ("chained_relation", "theorem w (a b c : ℝ) (h : a >= b >= c > 0) : a ≥ c := by sorry", None, "error"),
    ("missing_operator", "theorem x1 (a b : ℝ) (ha : 0 ≤ a) (hb : 0 ≤ b) : 2a+3b >= 0 := by sorry", None, "error"),
    ("tuple_list", "theorem x2 (x y : ℕ) (h : 2 * x + y = 7) : (x, y) = (1, 5), (2, 3) := by sorry", None, "error"),
    ("unknown_identifier", "theorem x3 (n : ℕ) : unknown_pred n := by sorry", None, "error"),
    ("unbalanced", "theorem x4 (n : ℕ : n = n := by sorry", None, "error"),
    ("nat_division_elaborates", "theorem x5 (a b c : ℝ) (ha : 0 < a) : (a + b + c) / 3 ≥ (a*b*c)^(1/3) := by sorry", None, "statement_pass"),
    ("linter_warning", S + " := by sorry -- fake:warn=unused variable `hb`", None, "error"),
    ("injected_error", S + " := by sorry -- fake:error=type mismatch", None, "error"),
    ("hang_timeout", S + " := by sorry -- fake:hang", None, "timeout"),
    ("lemma_keyword", "lemma y1 {α : Type*} [Fintype α] (s : Finset α) : s.card ≤ Fintype.card α := by sorry", None, "statement_pass"),
    ("modified_chain", "theorem y2 (a b c : ℝ) (h : a >= b ∧ b >= c ∧ c > 0) : a ≥ c := by sorry", None, "statement_pass"),
]


def main(out, forge, fake):
    out = pathlib.Path(out)
    out.mkdir(parents=True, exist_ok=True)
    for old in out.glob("*.json"):
        old.unlink()
    for name, stmt, proof, expected in CASES:
        with tempfile.TemporaryDirectory() as tmp:
            src = pathlib.Path(tmp) / "s.lean"
            src.write_text(stmt)
            cmd = [forge, "--repl-cmd", fake, "--timeout", "1", "--record-fixtures", tmp + "/rec", "repl", "check", str(src)]
            if proof:
                cmd += ["--proof", proof]
            subprocess.run(cmd, capture_output=True, text=True)
            recs = sorted((pathlib.Path(tmp) / "rec").glob("*.json"))
            if len(recs) != 1:
                sys.exit(f"{name}: expected one recorded exchange, got {len(recs)}")
            fx = json.loads(recs[0].read_text())
        fx["name"] = name
        fx["expected"] = expected
        (out / f"{name}.json").write_text(json.dumps(fx, indent=2, ensure_ascii=False) + "\n")
    # a REPL-level failure has no messages array, only a top-level message
    (out / "unknown_env.json").write_text(json.dumps({
        "name": "unknown_env", "request": "{\"cmd\": \"theorem t : True := by sorry\", \"env\": 7}",
        "expects_proof": False, "had_timeout": False, "response": {"message": "Unknown environment."},
        "expected": "error"}, indent=2) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/repl_fixtures",
         sys.argv[2] if len(sys.argv) > 2 else "build/forge",
         sys.argv[3] if len(sys.argv) > 3 else "build/fake_lean_repl")
