#!/usr/bin/env python3
"""Writes data/corpus/statements.jsonl: reference examples, false-pattern fixtures and generated statements (100 total)."""
import json
import pathlib
import random
import sys

REFERENCE = [
    "theorem ex_1 (n p : ℕ) (hp: Nat.Prime p) (h₁ : p ∣ n) : { (x, y) : ℕ × ℕ | x + y = n ∧ Nat.gcd x y = p }.Finite := by sorry",
    "theorem IMO1983_P5 :\n    ∃ S : Finset ℕ, S.card = 1983 ∧ (∀ x ∈ S, x ≤ 10^5) ∧\n    ∀ x ∈ S, ∀ y ∈ S, ∀ z ∈ S, x < y ∧ y < z → x + z ≠ 2 * y := by sorry",
    "theorem lem1 (a b c d : ℝ) (hab : 0 < a) (hbc : 0 < b) (hcd : 0 < c) (hda : 0 < d) (habc : a * b * c * d = 1) : \n(1 / (1 + (1 + a) ^ 2) + 1 / (1 + (1 + b) ^ 2) + 1 / (1 + (1 + c) ^ 2) + 1 / (1 + (1 + d) ^ 2)) ≤ (4:ℝ) / 5 := by sorry",
    "theorem sum_factorial_not_prod_factorial (m : ℕ) (hm : 5 ≤ m) : (∑ k in Finset.range m, k!) ≠ (∏ k in Finset.Icc 1 m, (2 * k - 1)!) := by sorry",
    "theorem p2_dvd_2pCp_2 (p : ℕ) (hp : Nat.Prime p) : p^2 ∣ (Nat.choose (2 * p) p) - 2 := by sorry",
    "theorem sin_problem (a b c : ℝ) : sin a + 2 * sin (a + b + c) = 0 ∧ sin b + 3 * sin (a + b + c) = 0 ∧ sin c + 4 * sin (a + b + c) = 0 ↔ ∃ (k n m : ℤ), a = π * k ∧ b = π * n ∧ c = π * m := by sorry",
    "theorem imo_1964_p1_1 (a b c : ℝ) (hx: a > 0 ∧ b > 0 ∧ c > 0) (hab : a + b > c) (hbc : b + c > a) (hca : a + c > b) : (a / (b + c) + b / (c + a) + c / (a + b) : ℝ) ≤ (1:ℝ) / 2 + (3 * (a ^ 3 + b ^ 3 + c ^ 3)) / ((a + b + c) * (a ^ 2 + b ^ 2 + c ^ 2)) := by sorry",
    "theorem subset_of_1d_subsets {M : Set ℂ} (a b : ℝ)   (hA : {z : ℂ | z.re = a} ⊆ M)    (hB : {z : ℂ | z.im = b} ⊆ M)   (hM : ∀ z1 z2 : ℂ, z1 ∈ M ∧ z2 ∈ M → z1 + z2 ∈ M) : M = ℂ := by sorry",
    "theorem Injective_total : ∀ ε : ℝ, ε > 0 → ∃ N : ℕ, ∀ n : ℕ, n ≥ N → |(1 / n) * (∑ i in Finset.Icc 1 n, i / (Real.sqrt (i ^ 2 + 1))) - 1| < ε := by sorry",
    "theorem FE (f : ℝ → ℝ):(∀ x y, f (x * f x + f y) = (f x)^2 + y) ↔ ∀ x, f x = x ∨ ∀ x, f x = -x := by sorry",
    "theorem aops_1212 (n : ℕ) (a : ℕ → ℕ) (ha : a 1 = 3) (hab : ∀ n, a (n + 1) = (a n)^2 + n * a n - 2) : ∑ k in Finset.Icc 1 n, (1 / (a k - 2)) < 2 := by sorry",
    "theorem t_cubic_mod9 : ∀ t : ℤ, t^3 ≡ 0 [ZMOD 9] ∨ t^3 ≡ 1 [ZMOD 9] ∨ t^3 ≡ -1 [ZMOD 9] := by sorry",
    "theorem continuous_compact_support (D : Set ℝ) (f : ℝ → ℝ)  (hD : IsCompact D) (hf : ContinuousOn f D) : IsCompact (Set.image f D) := by sorry",
    "theorem imo1975_p2 (a : ℕ → ℤ) (apos : ∀ i, 0 < a i) (ha : ∀ i, a i < a (i + 1)) (i : ℕ) : ( ∀ i n0:ℕ , ∃ n, n0 ≤ n ∧ ∃ r s : ℕ, ∃ j : ℕ, a n = r * a i + s * a j ∧ i < j ∧ 0 < r ∧ 0 < s ):= by sorry",
    "theorem imo1977_p4 (f : ℝ → ℝ) (a b A B : ℝ)  (h₀ : ∀ x, f x = 1 - a * Real.cos x - b * Real.sin x - A * Real.cos (2 * x) - B * Real.sin (2 * x))  (h₁ : ∀ x, f x ≥ 0) : a ^ 2 + b ^ 2 ≤ 2 ∧ A ^ 2 + B ^ 2 ≤ 1 := by sorry",
    # printed truncated after the first goal token
    "theorem imo1978_p1 (m n : ℕ) (hmn: m < n) (hmn2: m = 3 ∧ n=103) : (1978^m) ",
    "theorem imo1982_p4 (n : ℕ) (hn : 0 < n) (hxy : ∃ x y : ℤ, x^3 - 3 * x * y^2 + y^3 = n) : (n ≠ 2891) ∧ ∃ x1 x2 x3 y1 y2 y3 : ℤ, (x1^3 - 3 * x1 * y1^2 + y1^3 = n ∧ x2^3 - 3 * x2 * y2^2 + y2^3 = n ∧ x3^3 - 3 * x3 * y3^2 + y3^3 = n ∧ (x1 ≠ x2 ∨ y1 ≠ y2) ∧ (x1 ≠ x3 ∨ y1 ≠ y3)  ∧ (x2 ≠ x3 ∨ y2 ≠ y3)) := by sorry",
    "theorem imo1978_p6 (n : ℕ) (hn : n = 1978) (C : Fin n → Fin 6) : ∃ i : Fin n,   ∃ j : Fin n,  ∃ k : Fin n,  C i = C j ∧ C j = C k ∧ i ≠ k ∧ (i:ℕ ) + (k:ℕ ) = (j:ℕ ) + 1 := by sorry",
]

TYPES = ["ℝ", "ℕ", "ℤ", "ℚ", "ℂ"]
GOALS = [
    "{a} ^ 2 + {b} ^ 2 ≥ 2 * {a} * {b}",
    "({a} + {b}) ^ 2 ≤ 2 * ({a} ^ 2 + {b} ^ 2)",
    "{a} * {b} ≤ ({a} + {b}) ^ 2 / 4",
    "∃ k, {a} + {b} = 2 * k ∨ {a} + {b} = 2 * k + 1",
    "∀ n : ℕ, ∑ i in Finset.range n, ({a} + i) = n * {a} + n * (n - 1) / 2",
    "|{a} - {b}| ≤ |{a}| + |{b}|",
    "{a} ∣ {b} → {a} ∣ {b} * {b}",
    "IsLeast {{x | 0 ≤ x ∧ {a} ≤ x}} {a}",
]


def generated(rng, i):
    a, b = rng.sample(["a", "b", "x", "y", "m", "n", "p", "q"], 2)
    ty = rng.choice(TYPES)
    kind = rng.choice(["theorem", "lemma"])
    binders = [f"({a} {b} : {ty})"]
    if rng.random() < 0.3:
        binders.insert(0, "{α : Type*}")
    if rng.random() < 0.2:
        binders.append("[Fintype α]")
    if rng.random() < 0.2:
        binders.append("⦃f : α → α⦄")
    if rng.random() < 0.6:
        binders.append(f"(h{rng.choice(['₀', '₁', 'a', ''])} : 0 < {a})")
    if rng.random() < 0.4:
        binders.append(f"(h₂ : {a} ≠ {b})")
    goal = rng.choice(GOALS).format(a=a, b=b)
    sep = rng.choice([" ", "\n  ", "  "])
    text = f"{kind} gen_{i} " + sep.join(binders) + f" :{sep}{goal} :="
    proof = rng.choice([" by sorry", " by\n  sorry", " by nlinarith [sq_nonneg ({a} - {b})]".format(a=a, b=b), " sorry"])
    text += proof
    if rng.random() < 0.15:
        text = f"/-- generated statement {i} -/\n" + text
    if rng.random() < 0.1:
        text = "-- a line comment\n" + text
    return text


def main(out):
    out = pathlib.Path(out)
    out.mkdir(parents=True, exist_ok=True)
    rows = [{"id": f"reference_{i}", "origin": "reference", "text": t} for i, t in enumerate(REFERENCE)]
    patterns = pathlib.Path(__file__).resolve().parent.parent / "data" / "false_patterns" / "patterns.jsonl"
    for line in patterns.read_text().splitlines():
        p = json.loads(line)
        rows.append({"id": f"pattern_{p['pattern']}", "origin": "pattern", "text": p["modified"]})
    rng = random.Random(20240101)
    i = 0
    while len(rows) < 100:
        rows.append({"id": f"generated_{i}", "origin": "generated", "text": generated(rng, i)})
        i += 1
    (out / "statements.jsonl").write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/corpus")
