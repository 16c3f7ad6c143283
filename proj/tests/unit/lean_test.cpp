#include <doctest.h>

#include <random>

#include "forge/core/store.hpp"
#include "forge/lean/fingerprint.hpp"
#include "forge/lean/lint.hpp"
#include "forge/lean/statement.hpp"
#include "forge/lean/tokenizer.hpp"
#include "statement_fuzz.hpp"
#include "test_util.hpp"

using namespace forge;
using namespace forge::lean;

namespace {

const std::string kEx1 =
    "theorem ex_1 (n p : ℕ) (hp: Nat.Prime p) (h₁ : p ∣ n) : { (x, y) : ℕ × ℕ | x + y = n ∧ Nat.gcd x y = p }.Finite "
    ":= by sorry";
const std::string kImo =
    "theorem IMO1983_P5 :\n    ∃ S : Finset ℕ, S.card = 1983 ∧ (∀ x ∈ S, x ≤ 10^5) ∧\n    ∀ x ∈ S, ∀ y ∈ S, ∀ z ∈ S, "
    "x < y ∧ y < z → x + z ≠ 2 * y := by sorry";

std::vector<Json> corpus() { return read_jsonl(test::data_dir() / "corpus" / "statements.jsonl"); }

std::string fixed(std::string_view text) { return apply_fixes(text, lint(text)); }

bool has(const LintReport& r, std::string_view rule) { return r.has_rule(rule); }

const Finding* find(const LintReport& r, std::string_view rule) {
    for (const auto& f : r.findings) {
        if (f.rule_id == rule) return &f;
    }
    return nullptr;
}

}  // namespace

TEST_CASE("parse: the sorry-convention example") {
    auto t = parse_statement(kEx1);
    CHECK(t.name == "ex_1");
    REQUIRE(t.binders.size() == 3);
    CHECK(t.binders[0].names == std::vector<std::string>{"n", "p"});
    CHECK(t.binders[0].type_text == "ℕ");
    CHECK_FALSE(t.binders[0].is_hypothesis);
    CHECK(t.binders[1].is_hypothesis);
    CHECK(t.binders[2].names == std::vector<std::string>{"h₁"});
    CHECK(t.hypotheses() == std::vector<std::size_t>{1, 2});
    CHECK(t.goal_text.starts_with("{ (x, y) : ℕ × ℕ |"));
    CHECK(t.goal_text.ends_with(".Finite"));
    CHECK(t.terminator == Terminator::sorry);
}

TEST_CASE("parse: minimal and IMO statements") {
    auto t = parse_statement("theorem t : True := by sorry");
    CHECK(t.binders.empty());
    CHECK(t.goal_text == "True");

    auto imo = parse_statement(kImo);
    CHECK(imo.name == "IMO1983_P5");
    CHECK(imo.goal_text.starts_with("∃ S : Finset ℕ"));

    auto lemma = parse_statement("/-- doc -/\nlemma l {α : Type*} [Fintype α] ⦃f : α → α⦄ (x) : f x = x := by simp");
    CHECK(lemma.keyword == "lemma");
    CHECK(lemma.doc_comment == "/-- doc -/");
    REQUIRE(lemma.binders.size() == 4);
    CHECK(lemma.binders[0].kind == BinderKind::implicit);
    CHECK(lemma.binders[1].kind == BinderKind::instance);
    CHECK(lemma.binders[1].names.empty());
    CHECK(lemma.binders[2].kind == BinderKind::strict_implicit);
    CHECK(lemma.binders[3].type_text.empty());
    CHECK(lemma.terminator == Terminator::proof_body);
    CHECK(lemma.proof_text == "by simp");

    auto missing = parse_statement("theorem m (a : ℕ) : a = a");
    CHECK(missing.terminator == Terminator::missing);
}

TEST_CASE("parse errors carry positions") {
    for (std::string bad : {"theorem x (n : ℕ : n = n := by sorry", "theorem x : (a = b := by sorry",
                            "theorem x (a : ℕ) a = a := by sorry", "def x : ℕ := 1",
                            "theorem a : True := by sorry\ntheorem b : True := by sorry"}) {
        CAPTURE(bad);
        try {
            parse_statement(bad);
            FAIL("parsed");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::parse);
            CHECK(e.details().contains("offset"));
            CHECK(e.details().contains("line"));
        }
    }
}

TEST_CASE("normalize_statement") {
    auto t = parse_statement("theorem lem1 (a b : ℝ)   (h : 0 < a) :\n  a + b = b + a := sorry");
    auto n = normalize_statement(t, NamePolicy::keep());
    CHECK(n == "theorem lem1 (a b : ℝ) (h : 0 < a) : a + b = b + a := by sorry");
    CHECK(normalize_text(n, NamePolicy::keep()) == n);

    auto renamed = normalize_statement(t, NamePolicy::fixed("lean_workbook_0"));
    auto a = token_texts(n);
    auto b = token_texts(renamed);
    REQUIRE(a.size() == b.size());
    int differing = 0;
    for (std::size_t i = 0; i < a.size(); ++i) differing += a[i] != b[i];
    CHECK(differing == 1);
    CHECK(stable_theorem_name("post_1_0", 0) == "lean_workbook_post_1_0");
    CHECK(stable_theorem_name("a-b", 2) == "lean_workbook_a_b_2");
}

TEST_CASE("corpus: parse, serialize, parse is a fixpoint") {
    auto rows = corpus();
    CHECK(rows.size() == 100);
    int reference = 0;
    for (const auto& r : rows) {
        const auto text = r.at("text").get<std::string>();
        CAPTURE(text);
        reference += r.at("origin") == "reference";
        auto once = parse_statement(text);
        auto again = parse_statement(serialize(once));
        CHECK(again == once);
        CHECK(serialize(again) == serialize(once));
        CHECK(collapse_whitespace(serialize(once)).size() > 0);
    }
    CHECK(reference == 18);
}

TEST_CASE("fingerprint invariance and sensitivity") {
    auto base = canonical_fingerprint(kEx1);
    CHECK_FALSE(base.from_raw);
    CHECK(base.digest.size() == 64);

    std::string renamed = kEx1;
    renamed.replace(renamed.find("ex_1"), 4, "thm_2");
    CHECK(canonical_fingerprint(renamed).digest == base.digest);

    std::string doubled;
    for (char c : kEx1) {
        doubled += c;
        if (c == ' ') doubled += ' ';
    }
    CHECK(canonical_fingerprint(doubled).digest == base.digest);

    CHECK(canonical_fingerprint("theorem t (a b : ℝ) : a ≤ b := by sorry").digest !=
          canonical_fingerprint("theorem t (a b : ℝ) : a < b := by sorry").digest);
    CHECK(canonical_fingerprint("theorem t (a b : ℝ) (h : 0 < a) : a ≤ b := by sorry").digest !=
          canonical_fingerprint("theorem t (a b : ℝ) (h : 0 ≤ a) : a ≤ b := by sorry").digest);
    // order-preserving re-bracketing and a different proof
    CHECK(canonical_fingerprint("theorem t (a b : ℝ) : a ≤ b := by sorry").digest ==
          canonical_fingerprint("lemma u (a : ℝ) (b : ℝ) : a ≤ b := by linarith").digest);
    CHECK(canonical_fingerprint("theorem t (a b : ℝ) : a ≤ b := by sorry").digest !=
          canonical_fingerprint("theorem t (b a : ℝ) : a ≤ b := by sorry").digest);

    auto raw = canonical_fingerprint("theorem broken (a : ℝ : a = a");
    CHECK(raw.from_raw);
}

TEST_CASE("fingerprint fuzz over the corpus") {
    std::mt19937_64 rng(1234);
    auto rows = corpus();
    for (int i = 0; i < 300; ++i) {
        const auto text = rows[static_cast<std::size_t>(i) % rows.size()].at("text").get<std::string>();
        const auto fuzzed = test::fuzz_statement(text, rng);
        CAPTURE(text);
        CAPTURE(fuzzed);
        CHECK(canonical_fingerprint(fuzzed).digest == canonical_fingerprint(text).digest);
    }
}

TEST_CASE("lint: fixable rules") {
    SUBCASE("chained inequality") {
        auto r = lint("a >= b >= c > 0");
        auto f = find(r, "chained_inequality");
        REQUIRE(f);
        CHECK(f->severity == FindingSeverity::fixable);
        CHECK(f->suggestion == "a >= b ∧ b >= c ∧ c > 0");
        CHECK(fixed("a >= b >= c > 0") == "a >= b ∧ b >= c ∧ c > 0");
    }
    SUBCASE("missing operator") {
        CHECK(has(lint("2a+3b >= 0"), "missing_operator"));
        CHECK(fixed("2a+3b >= 0") == "2*a+3*b >= 0");
        CHECK_FALSE(has(lint("x2 + y >= 0"), "missing_operator"));
        CHECK_FALSE(has(lint("theorem t (x2 : ℝ) : x2 ^ 2 ≥ 0 := by sorry"), "missing_operator"));
    }
    SUBCASE("nat division in an exponent over the reals") {
        const std::string s = "theorem t (a b c : ℝ) : (a*b*c)^(1/3) ≤ a := by sorry";
        auto r = lint(s);
        auto f = find(r, "nat_division");
        REQUIRE(f);
        CHECK(fixed(s) == "theorem t (a b c : ℝ) : (a*b*c)^((1:ℝ)/3) ≤ a := by sorry");
    }
    SUBCASE("unqualified sqrt over the reals") {
        const std::string s = "theorem t (a : ℝ) (h : 0 ≤ a) : sqrt (a ^ 2) = a := by sorry";
        auto r = lint(s);
        auto f = find(r, "namespace_qualification");
        REQUIRE(f);
        CHECK(f->suggestion == "Real.sqrt");
        CHECK(fixed(s) == "theorem t (a : ℝ) (h : 0 ≤ a) : Real.sqrt (a ^ 2) = a := by sorry");
        CHECK_FALSE(has(lint("theorem t (a : ℝ) : Real.sqrt (a ^ 2) = |a| := by sorry"), "namespace_qualification"));
    }
    SUBCASE("two patterns in one pass") {
        CHECK(fixed("2a >= b >= 0") == "2*a >= b ∧ b >= 0");
        auto after = lint(fixed("2a >= b >= 0"));
        CHECK(after.fixable_count() == 0);
    }
    SUBCASE("no findings leaves the text alone") {
        const std::string s = "theorem t (a : ℝ) : a ^ 2 ≥ 0 := by sorry";
        CHECK(lint(s).findings.empty());
        CHECK(apply_fixes(s, lint(s)) == s);
    }
}

TEST_CASE("lint: flag rules need the natural-language side") {
    const std::string no_triangle = "theorem t (a b c : ℝ) : a ^ 2 + b ^ 2 + c ^ 2 < 2 * (a * b + b * c + c * a) := by sorry";
    CHECK_FALSE(has(lint(no_triangle), "triangle_condition"));
    auto r = lint(no_triangle, "Let a, b, c be the side lengths of a triangle.");
    auto f = find(r, "triangle_condition");
    REQUIRE(f);
    CHECK(f->severity == FindingSeverity::flag);
    CHECK_FALSE(f->suggestion);
    CHECK(apply_fixes(no_triangle, r) == no_triangle);

    CHECK(has(lint("theorem m (a : ℝ) (h : a ^ 2 ≤ 100) : a ≤ 10 := by sorry", "Find the maximal value of a."),
              "missing_extremum_witness"));
    CHECK_FALSE(has(lint("theorem m : IsGreatest {a : ℝ | a ^ 2 ≤ 100} 10 := by sorry", "Find the maximal value of a."),
                    "missing_extremum_witness"));
    CHECK(has(lint("theorem s (x y : ℕ) : (x, y) = (1, 5), (2, 3) := by sorry"), "all_solutions"));
}

TEST_CASE("lint: unparseable text is a single finding") {
    auto r = lint("theorem t (a : ℝ : a = a := by sorry");
    REQUIRE(r.findings.size() == 1);
    CHECK(r.findings[0].rule_id == "parse_failure");
}

TEST_CASE("apply_fixes rejects overlapping spans") {
    LintReport r;
    r.findings.push_back({"missing_operator", {0, 2}, FindingSeverity::fixable, std::string("2*a")});
    r.findings.push_back({"missing_operator", {1, 3}, FindingSeverity::fixable, std::string("a*b")});
    CHECK_THROWS_AS(apply_fixes("2ab", r), Error);
    LintReport out_of_range;
    out_of_range.findings.push_back({"missing_operator", {5, 9}, FindingSeverity::fixable, std::string("x")});
    CHECK_THROWS_AS(apply_fixes("2a", out_of_range), Error);
}

TEST_CASE("false pattern catalog") {
    for (const auto& p : read_jsonl(test::data_dir() / "false_patterns" / "patterns.jsonl")) {
        const auto rule = p.at("rule_id").get<std::string>();
        const auto nl = p.at("nl").get<std::string>();
        const auto wrong = p.at("wrong").get<std::string>();
        const auto modified = p.at("modified").get<std::string>();
        CAPTURE(rule);
        CHECK(lint(wrong, nl).has_rule(rule));
        CHECK_FALSE(lint(modified, nl).has_rule(rule));
        if (p.at("kind") == "fixable") {
            CHECK(fixed(wrong) == modified);
        } else {
            CHECK(apply_fixes(wrong, lint(wrong, nl)) == wrong);
        }
    }
}

TEST_CASE("false pattern golden files") {
    // the CLI fixes each blank-line separated block on its own
    const auto wrong = read_file(test::data_dir() / "false_patterns" / "fixable_wrong.lean");
    const auto modified = read_file(test::data_dir() / "false_patterns" / "fixable_modified.lean");
    std::string out;
    std::size_t pos = 0;
    while (pos < wrong.size()) {
        auto next = wrong.find("\n\n", pos);
        auto end = next == std::string::npos ? wrong.size() : next;
        out += fixed(std::string_view(wrong).substr(pos, end - pos));
        if (next == std::string::npos) break;
        out += "\n\n";
        pos = next + 2;
    }
    CHECK(out == modified);
}

TEST_CASE("rule catalog") {
    int fixable = 0;
    for (const auto& r : lint_rules()) fixable += r.severity == FindingSeverity::fixable;
    CHECK(fixable == 4);
    CHECK(lint_rules().size() >= 10);
}
