#include <doctest.h>

#include <optional>
#include <set>

#include <sstream>

#include "forge/core/json_io.hpp"
#include "forge/lean/fingerprint.hpp"
#include "forge/lean/statement.hpp"
#include "forge/pipeline/config.hpp"
#include "forge/pipeline/export.hpp"
#include "forge/pipeline/review.hpp"
#include "forge/pipeline/round.hpp"
#include "forge/pipeline/search.hpp"
#include "forge/pipeline/stages.hpp"
#include "forge/repl/simulator.hpp"
#include "test_util.hpp"

using namespace forge;
using namespace forge::pipeline;

namespace {

std::filesystem::path mock_round_dir() { return test::data_dir() / "mock_round"; }

RoundConfig mock_config() { return RoundConfig::load(mock_round_dir() / "config.json"); }

// Labels used by the crash tests: a fixed mix over the first compiled candidates.
std::vector<LabelRecord> some_labels(Store& store, int round) {
    std::vector<LabelRecord> out;
    for (const auto& c : store.load_round(round)) {
        if (!c.compile || !c.compile->compiles()) continue;
        LabelRecord l;
        l.candidate_id = c.key().str();
        l.verdict = out.size() % 3 == 2 ? HumanVerdict::rejected : HumanVerdict::correct;
        out.push_back(l);
        if (out.size() == 6) break;
    }
    return out;
}

// ingest, round, label merge; returns the manifest bytes
std::string full_run(const std::filesystem::path& root, FaultInjector& fault) {
    auto store = Store::open(root, OpenMode::writer, false);
    auto cfg = mock_config();
    auto gw = make_gateways(cfg);
    repl::SimulatedChecker sim;
    ingest(store, mock_round_dir() / "posts", gw, fault);
    run_round(store, cfg, gw, sim, fault, 4);
    auto labels = some_labels(store, cfg.round);
    merge_human_labels(store, cfg.round, labels, sim, &fault);
    return read_file(store.round_dir(cfg.round) / "manifest.json");
}

Problem problem(std::string id, std::string text, std::vector<std::string> tags, std::optional<std::string> answer = {}) {
    Problem p;
    p.id = std::move(id);
    p.source = "fixture";
    p.nl_text = std::move(text);
    p.tags = std::move(tags);
    p.answer = std::move(answer);
    p.well_defined = Judgement::positive;
    return p;
}

TranslationCandidate candidate(std::string pid, int sample, CompileKind kind, Judgement nli, std::string text = "") {
    TranslationCandidate c;
    c.problem_id = std::move(pid);
    c.round = 1;
    c.sample_index = sample;
    c.statement_text = text.empty() ? "theorem " + lean::stable_theorem_name(c.problem_id, sample) +
                                          " (a b : ℝ) (h : a ≤ b) : a ≤ b := by sorry"
                                    : std::move(text);
    c.compile = CompileVerdict{kind, {}, {}};
    c.nli = nli;
    c.statement_text = lean::normalize_text(c.statement_text, lean::NamePolicy::keep());
    c.fingerprint = lean::sha256_hex(c.statement_text);
    return c;
}

}  // namespace

TEST_CASE("tag filter and answer rephrasing") {
    auto p = problem("p", "Find the remainder when 2^10 is divided by 7.", {"number_theory"}, "2");
    auto q = rephrase_answer(p);
    CHECK(q.nl_text == "Find the remainder when 2^10 is divided by 7. Show that it is 2.");
    CHECK(rephrase_answer(q).nl_text == q.nl_text);
    CHECK(rephrase_answer(problem("p", "Prove it.", {})).nl_text == "Prove it.");

    std::vector<Problem> ps{p, problem("g", "x", {"geometry"}), problem("m", "x", {"geometry", "inequality"}),
                            problem("n", "x", {})};
    auto kept = filter_by_tags(ps, {"inequality", "number_theory"});
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].id == "p");
    CHECK(kept[1].id == "m");
}

TEST_CASE("prepare_statement fixes and renames") {
    auto s = prepare_statement("```lean\ntheorem foo (a b c : ℝ) (h : a >= b >= c) : a ≥ c := by sorry\n```", "post_1_0",
                               2, "Let a >= b >= c. Prove a >= c.");
    CHECK(s.parsed);
    CHECK(s.fixes_applied >= 1);
    CHECK(s.text.find("lean_workbook_post_1_0_2") != std::string::npos);
    CHECK(s.text.find("a >= b ∧ b >= c") != std::string::npos);
    CHECK(s.pre_fix_text.find("a >= b >= c") != std::string::npos);
    CHECK(s.fingerprint.size() == 64);

    auto bad = prepare_statement("I cannot formalize this.", "p", 0, "x");
    CHECK_FALSE(bad.parsed);
}

TEST_CASE("a four-problem round") {
    test::TempDir dir;
    test::write_text(dir / "mock" / "nl2fl.jsonl",
                     R"({"key": "p0", "response": "theorem a (x : ℝ) (h : 0 < x) : 0 < x ^ 2 := by sorry"})" "\n"
                     R"({"key": "p1", "response": "theorem b (n : ℕ) : n % 2 < 2 := by sorry"})" "\n"
                     R"({"key": "p2", "response": "theorem c (a b : ℝ) : a ^ 2 + b ^ 2 ≥ 2 * a * b := by sorry"})" "\n"
                     R"({"key": "p3", "response": "theorem d (x : ℝ) : unknown_mystery x := by sorry"})" "\n");
    test::write_text(dir / "mock" / "fl2nl.jsonl",
                     R"({"key": "p0", "response": "Let x be positive. Prove x^2 is positive."})" "\n"
                     R"({"key": "p1", "response": "Show n mod 2 is below 2."})" "\n"
                     R"({"key": "p2", "response": "Something else entirely."})" "\n");
    auto cfg = RoundConfig::from_json(
        Json::parse(R"({"version": 1, "round": 1, "model_id": "m", "seed": 3, "allowlist": ["inequality"],
                        "backends": {"default": {"kind": "mock", "dir": "mock"}}})"),
        dir.path());
    auto store = Store::open(dir / "store", OpenMode::writer, false);
    store.problems().append(problem("p0", "Let x be positive. Prove x^2 is positive.", {"inequality"}));
    store.problems().append(problem("p1", "Show n mod 2 is below 2.", {"inequality", "number_theory"}));
    store.problems().append(problem("p2", "Prove a^2 + b^2 >= 2ab.", {"inequality"}));
    store.problems().append(problem("p3", "Prove mystery.", {"inequality"}));
    store.problems().append(problem("p4", "A triangle.", {"geometry"}));

    auto gw = make_gateways(cfg);
    repl::SimulatedChecker sim;
    FaultInjector none;
    auto r = run_round(store, cfg, gw, sim, none);
    CHECK_FALSE(r.partial());
    CHECK(r.manifest.translated_count == 4);
    CHECK(r.manifest.cpn == 3);
    CHECK(r.manifest.npn == 2);
    CHECK(r.manifest.per_tag_counts == std::map<std::string, std::int64_t>{{"inequality", 2}, {"number_theory", 1}});
    CHECK(r.funnel.count("tag_kept") == 4);
    CHECK(store.manifest(1) == r.manifest);
    CHECK(std::filesystem::exists(store.round_dir(1) / "funnel.jsonl"));
    CHECK(store.raw(1).size() == 4);

    // a rerun finds everything journaled
    auto again = run_round(store, cfg, gw, sim, none);
    CHECK(again.new_candidates == 0);
    CHECK(again.manifest == r.manifest);
}

TEST_CASE("mock round funnel") {
    test::TempDir dir;
    FaultInjector none;
    full_run(dir.path(), none);
    auto store = Store::open(dir.path(), OpenMode::reader);
    auto m = current_manifest(store, 1);
    auto f = compute_funnel(store, m, mock_config().allowlist);
    // counted by hand from the generator's rules
    CHECK(f.count("extracted") == 50);
    CHECK(f.count("well_defined") == 45);
    CHECK(f.count("tag_kept") == 40);
    CHECK(f.count("translated") == 40);
    CHECK(f.count("compiled") == 28);
    CHECK(f.count("nli_passed") == 20);
    CHECK(f.monotone());
    CHECK(m.per_tag_counts ==
          std::map<std::string, std::int64_t>{{"algebra", 2}, {"inequality", 10}, {"number_theory", 7}, {"trigonometry", 3}});
    CHECK(m.human_labels_added == 4);
    CHECK(m.config_digest == mock_config().digest());

    // raw output is kept next to the fixed candidate
    bool saw_fix = false;
    for (const auto& raw : store.raw(1).records()) {
        if (raw.raw_text.find(">= b >= c") != std::string::npos) saw_fix = true;
    }
    CHECK(saw_fix);
}

TEST_CASE("crash and resume gives the same manifest") {
    test::TempDir clean;
    FaultInjector none;
    const auto expected = full_run(clean.path(), none);
    for (std::string stage : {"extract", "problem", "raw", "candidate", "label", "manifest"}) {
        CAPTURE(stage);
        test::TempDir dir;
        FaultInjector fault(stage, stage == "manifest" ? 1 : 3);
        CHECK_THROWS_AS(full_run(dir.path(), fault), SimulatedCrash);
        FaultInjector resume;
        CHECK(full_run(dir.path(), resume) == expected);
    }
}

TEST_CASE("empty round") {
    test::TempDir dir;
    auto store = Store::open(dir.path(), OpenMode::writer, false);
    auto cfg = mock_config();
    auto gw = make_gateways(cfg);
    repl::SimulatedChecker sim;
    FaultInjector none;
    auto r = run_round(store, cfg, gw, sim, none);
    CHECK(r.manifest.translated_count == 0);
    CHECK(r.manifest.cpn == 0);
    CHECK_FALSE(r.partial());
    CHECK(sim.calls() == 0);
}

TEST_CASE("fault injector") {
    FaultInjector f("raw", 2);
    f.tick("candidate");
    f.tick("raw");
    CHECK_THROWS_AS(f.tick("raw"), SimulatedCrash);
    FaultInjector off;
    CHECK_FALSE(off.armed());
    for (int i = 0; i < 100; ++i) off.tick("raw");
}

TEST_CASE("review quotas") {
    CHECK(tag_quotas({{"a", 500}, {"b", 400}, {"c", 300}, {"d", 200}, {"e", 100}, {"f", 50}}) ==
          std::map<std::string, int>{{"a", 10}, {"b", 10}, {"c", 10}, {"d", 5}});
    // ties break by name
    CHECK(tag_quotas({{"x", 200}, {"w", 200}, {"v", 200}, {"u", 200}}) ==
          std::map<std::string, int>{{"u", 10}, {"v", 10}, {"w", 10}, {"x", 5}});
    CHECK(tag_quotas({}).empty());

    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) CHECK(uniform_below(rng, 7) < 7);
    std::vector<int> a{1, 2, 3, 4, 5, 6, 7, 8}, b = a;
    std::mt19937_64 r1(5), r2(5);
    seeded_shuffle(a, r1);
    seeded_shuffle(b, r2);
    CHECK(a == b);
    std::sort(a.begin(), a.end());
    CHECK(a == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8});
}

TEST_CASE("review batches") {
    std::vector<TranslationCandidate> cs;
    TagIndex tags;
    for (int i = 0; i < 150; ++i) {
        const auto pid = "q" + std::to_string(i);
        cs.push_back(candidate(pid, 0, CompileKind::statement_pass, Judgement::positive));
        tags[pid] = i < 120 ? std::vector<std::string>{"algebra"} : std::vector<std::string>{"geometry"};
    }
    cs.push_back(candidate("q0", 1, CompileKind::error, Judgement::unjudged));
    cs.push_back(candidate("q1", 1, CompileKind::statement_pass, Judgement::negative));

    auto s1 = build_review_batch(cs, tags, 1, ReviewStrategy::tag_stratified, 9);
    auto s2 = build_review_batch(cs, tags, 1, ReviewStrategy::tag_stratified, 9);
    CHECK(s1.items == s2.items);
    CHECK(s1.quota_map == std::map<std::string, int>{{"algebra", 10}});
    CHECK(s1.items.size() == 10);
    CHECK(std::set<std::string>(s1.items.begin(), s1.items.end()).size() == 10);
    auto s3 = build_review_batch(cs, tags, 1, ReviewStrategy::tag_stratified, 10);
    CHECK(s3.items != s1.items);

    auto triage = build_review_batch(cs, tags, 1, ReviewStrategy::pattern_triage, 0);
    CHECK(triage.items == std::vector<std::string>{"q0:1:1", "q1:1:1"});

    auto round_trip = review_batch_from_json(to_json(s1));
    CHECK(round_trip.items == s1.items);
    CHECK(round_trip.quota_map == s1.quota_map);
    CHECK(review_strategy_from_string(to_string(ReviewStrategy::tag_stratified)) == ReviewStrategy::tag_stratified);
    CHECK_THROWS_AS(review_strategy_from_string("random"), Error);
}

TEST_CASE("merging thirty labels") {
    test::TempDir dir;
    auto store = Store::open(dir.path(), OpenMode::writer, false);
    std::vector<std::string> ids;
    for (int i = 0; i < 30; ++i) {
        auto c = candidate("m" + std::to_string(i), 0, CompileKind::statement_pass, Judgement::positive);
        store.problems().append(problem(c.problem_id, "x", {"inequality"}));
        store.candidates(1).append(c);
        ids.push_back(c.key().str());
    }
    store.write_manifest(derive_manifest(store, 1, "m", "d", 0));
    const auto before = store.manifest(1)->human_labels_added;

    std::vector<LabelRecord> labels;
    for (int i = 0; i < 30; ++i) {
        LabelRecord l;
        l.candidate_id = ids[i];
        if (i < 20) {
            l.verdict = HumanVerdict::correct;
        } else if (i < 28) {
            l.verdict = HumanVerdict::modified;
            l.modified_text = "theorem t (a b : ℝ) (h : a ≤ b) (h2 : 0 ≤ a) : a ≤ b := by sorry";
        } else {
            l.verdict = HumanVerdict::rejected;
        }
        labels.push_back(l);
    }
    repl::SimulatedChecker sim;
    auto report = merge_human_labels(store, 1, labels, sim);
    CHECK(report.applied == 30);
    CHECK(report.accepted == 28);
    CHECK(report.rejected.empty());
    CHECK(store.manifest(1)->human_labels_added - before == 28);

    auto round = store.load_round(1);
    CHECK(round[20].human == HumanVerdict::modified);
    CHECK(round[20].modified_text->find(lean::stable_theorem_name("m20", 0)) != std::string::npos);

    // bad labels are reported, not journaled
    LabelRecord identical{ids[0], HumanVerdict::modified, round[0].statement_text, std::nullopt};
    LabelRecord broken{ids[1], HumanVerdict::modified, "theorem t (x : ℝ) : unknown_nope x := by sorry", std::nullopt};
    LabelRecord missing{ids[2], HumanVerdict::modified, std::nullopt, std::nullopt};
    LabelRecord unknown{"zz:1:0", HumanVerdict::correct, std::nullopt, std::nullopt};
    std::vector<LabelRecord> bad{identical, broken, missing, unknown};
    auto rejected = merge_human_labels(store, 1, bad, sim);
    CHECK(rejected.applied == 0);
    REQUIRE(rejected.rejected.size() == 4);
    CHECK(rejected.rejected[1].compile);
    CHECK(store.labels(1).size() == 30);
}

TEST_CASE("training pairs") {
    std::map<std::string, Problem> problems{{"a", problem("a", "Find x with x + 1 = 3.", {"algebra"}, "2")},
                                            {"b", problem("b", "Prove 1 < 2.", {"inequality"})}};
    auto good = candidate("a", 0, CompileKind::statement_pass, Judgement::positive);
    good.human = HumanVerdict::correct;
    auto mod = candidate("b", 1, CompileKind::statement_pass, Judgement::positive);
    mod.human = HumanVerdict::modified;
    mod.modified_text = "theorem lean_workbook_b_1 : (1 : ℕ) < 2 := by sorry";
    std::vector<TranslationCandidate> accepted{good, mod};

    auto pairs = training_pairs(accepted, problems);
    REQUIRE(pairs.size() == 4);
    CHECK(pairs[0].prompt_id == "nl2fl");
    CHECK(pairs[0].input == "Find x with x + 1 = 3. Show that it is 2.");
    CHECK(pairs[0].target == good.statement_text);
    CHECK(pairs[1].prompt_id == "fl2nl");
    CHECK(pairs[1].input == pairs[0].target);
    CHECK(pairs[1].target == pairs[0].input);
    CHECK(pairs[2].target == *mod.modified_text);

    auto text = encode_training_pairs(pairs);
    auto header = Json::parse(text.substr(0, text.find('\n')));
    CHECK(header.at("format") == kPairsFormat);
    CHECK(header.at("version") == kPairsVersion);
    auto back = decode_training_pairs(text);
    REQUIRE(back.size() == 4);
    CHECK(back[3].input == pairs[3].input);
    CHECK(decode_training_pairs(encode_training_pairs({})).empty());
    CHECK_THROWS_AS(decode_training_pairs("{\"format\": \"other\", \"version\": 1}\n"), Error);

    auto stray = candidate("b", 2, CompileKind::statement_pass, Judgement::positive);
    std::vector<TranslationCandidate> with_stray{good, stray};
    try {
        training_pairs(with_stray, problems);
        FAIL("unreviewed candidate exported");
    } catch (const Error& e) {
        CHECK(e.details().at("not_accepted").dump().find("b:1:2") != std::string::npos);
    }
}

TEST_CASE("dataset export") {
    test::TempDir dir;
    FaultInjector none;
    full_run(dir.path(), none);
    auto store = Store::open(dir.path(), OpenMode::reader);
    std::vector<int> rounds{1};
    auto out = export_dataset(store, rounds);
    std::set<std::string> fps;
    int lines = 0;
    std::istringstream in(out);
    for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        auto j = Json::parse(line);
        CHECK(fps.insert(j.at("fingerprint").get<std::string>()).second);
        CHECK(j.at("human") != "rejected");
        CHECK(j.contains("formal_statement"));
        ++lines;
    }
    CHECK(lines > 0);
    CHECK(lines <= 20);
    CHECK(accepted_candidates(store, rounds).size() == 4);
}

TEST_CASE("IMO mode ranks the faithful statement first") {
    auto cfg = RoundConfig::load(test::data_dir() / "imo" / "config.json");
    auto gw = make_gateways(cfg);
    auto p = problem_from_json(read_jsonl(test::data_dir() / "imo" / "problems.jsonl").at(0));
    repl::SimulatedChecker sim;
    auto r = imo_mode(p, 100, 0.7, *gw.translate, *gw.back_translate, *gw.nli, sim);
    CHECK(r.samples == 100);
    CHECK(r.distinct == 3);
    CHECK(r.compiled == 2);
    CHECK(r.survivors() == 1);
    REQUIRE(r.ranked.size() == 2);
    CHECK(r.ranked[0].survives());
    CHECK(r.ranked[0].frequency == 60);
    CHECK(r.ranked[0].statement_text.find("10^5") != std::string::npos);
    CHECK(r.ranked[1].frequency == 30);
    CHECK(r.ranked[1].nli == Judgement::negative);
    CHECK(to_json(r).at("ranked").size() == 2);
}

TEST_CASE("proof search stops at the first closing proof") {
    test::TempDir dir;
    test::write_text(dir / "prove.jsonl",
                     R"({"key": "*", "responses": ["by sorry", "by bogus_tactic", "by norm_num", "by sorry", "by sorry", "by sorry", "by sorry", "by sorry"]})"
                     "\n");
    llm::Gateway gw(std::make_shared<llm::MockBackend>(dir.path()));
    repl::SimulatedChecker sim;
    auto s = proof_search("theorem t : 1 + 1 = 2 := by sorry", 8, 0.7, {"t"}, gw, sim);
    CHECK(s.solved);
    CHECK(s.winning_index == 3);
    CHECK(s.attempts == 3);
    CHECK(s.failures == std::vector<CompileKind>{CompileKind::statement_pass, CompileKind::error});

    test::TempDir none;
    test::write_text(none / "prove.jsonl", R"({"key": "*", "response": "by sorry"})" "\n");
    llm::Gateway never(std::make_shared<llm::MockBackend>(none.path()));
    auto unsolved = proof_search("theorem t : 1 + 1 = 3 := by sorry", 4, 0.7, {"t"}, never, sim);
    CHECK_FALSE(unsolved.solved);
    CHECK(unsolved.attempts == 4);
    CHECK_FALSE(unsolved.winning_index);
}

TEST_CASE("config validation and digest") {
    auto base = Json::parse(read_file(mock_round_dir() / "config.json"));
    auto cfg = RoundConfig::from_json(base, mock_round_dir());
    CHECK(cfg.digest() == RoundConfig::from_json(base, mock_round_dir()).digest());
    CHECK(cfg.digest() == RoundConfig::from_json(base, "/elsewhere").digest());

    auto seeded = base;
    seeded["seed"] = 8;
    CHECK(RoundConfig::from_json(seeded, mock_round_dir()).digest() != cfg.digest());

    auto bad = [&](const char* pointer, Json value) {
        auto j = base;
        j[Json::json_pointer(pointer)] = std::move(value);
        CAPTURE(pointer);
        CHECK_THROWS_AS(RoundConfig::from_json(j, mock_round_dir()).validate(), Error);
    };
    bad("/version", 2);
    bad("/round", -1);
    bad("/sampling/n_samples", 0);
    bad("/sampling/temperature", 3.5);
    CHECK_THROWS_AS(make_checker({{"kind", "oracle"}}, mock_round_dir(), 1.0), Error);
    CHECK(default_allowlist().count("inequality") == 1);
}
