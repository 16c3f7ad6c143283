#include "forge/pipeline/round.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "forge/core/json_io.hpp"
#include "forge/llm/operations.hpp"

namespace forge::pipeline {

std::int64_t FunnelReport::count(std::string_view stage) const {
    for (const auto& r : rows) {
        if (r.stage == stage) return r.count;
    }
    return 0;
}

bool FunnelReport::monotone() const {
    const char* chain[] = {"extracted", "well_defined", "tag_kept", "compiled", "nli_passed"};
    for (std::size_t i = 1; i < std::size(chain); ++i) {
        if (count(chain[i]) > count(chain[i - 1])) return false;
    }
    return true;
}

std::string FunnelReport::to_jsonl() const {
    std::string out;
    for (const auto& r : rows) out += dump_line({{"round", round}, {"stage", r.stage}, {"count", r.count}}) + "\n";
    return out;
}

std::string FunnelReport::table() const {
    std::ostringstream os;
    char line[96];
    std::snprintf(line, sizeof line, "%-14s %12s\n", "stage", "count");
    os << line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-14s %12lld\n", r.stage.c_str(), static_cast<long long>(r.count));
        os << line;
    }
    return os.str();
}

FunnelReport compute_funnel(Store& store, const RoundManifest& m, const std::set<std::string>& allowlist) {
    FunnelReport f;
    f.round = m.round;
    std::int64_t extracted = 0, well = 0, kept = 0;
    for (const auto& p : store.problems().records()) {
        ++extracted;
        if (p.well_defined != Judgement::positive) continue;
        ++well;
        if (tag_kept(p, allowlist)) ++kept;
    }
    f.rows = {{"extracted", extracted},          {"well_defined", well}, {"tag_kept", kept},
              {"translated", m.translated_count}, {"compiled", m.cpn},    {"nli_passed", m.npn}};
    return f;
}

RoundManifest derive_manifest(Store& store, int round, const std::string& model_id, const std::string& config_digest,
                              std::uint64_t seed) {
    auto candidates = store.load_round(round);
    RoundManifest m = compute_round_stats(candidates, store.tag_index());
    m.round = round;
    m.model_id = model_id;
    m.config_digest = config_digest;
    m.seed = seed;
    m.human_labels_added = std::count_if(candidates.begin(), candidates.end(), [](const TranslationCandidate& c) {
        return c.human == HumanVerdict::correct || c.human == HumanVerdict::modified;
    });
    return m;
}

std::optional<RoundManifest> manifest_from_verdict_table(const Store& store, int round) {
    auto rows = store.verdict_table(round);
    if (!rows) return std::nullopt;
    RoundStatsAccumulator acc;
    for (const auto& r : *rows) {
        bool pass = r.compile == CompileKind::statement_pass || r.compile == CompileKind::proof_pass;
        acc.add(round, pass, pass && r.nli == Judgement::positive, r.tags, r.count);
    }
    RoundManifest m = acc.fragment();
    m.round = round;
    return m;
}

RoundManifest current_manifest(Store& store, int round) {
    if (auto m = store.manifest(round)) return *m;
    if (auto m = manifest_from_verdict_table(store, round)) return *m;
    if (!store.has_round(round)) {
        throw validation_error("unknown round " + std::to_string(round), {{"round", round}});
    }
    return derive_manifest(store, round, "", "", 0);
}

std::string manifest_table(const std::vector<RoundManifest>& manifests) {
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof line, "%-6s %-28s %12s %12s %12s\n", "round", "model", "translated", "CPN", "NPN");
    os << line;
    for (const auto& m : manifests) {
        std::snprintf(line, sizeof line, "%-6d %-28s %12lld %12lld %12lld\n", m.round,
                      m.model_id.empty() ? "-" : m.model_id.c_str(), static_cast<long long>(m.translated_count),
                      static_cast<long long>(m.cpn), static_cast<long long>(m.npn));
        os << line;
    }
    return os.str();
}

namespace {

struct RoundState {
    Store& store;
    const RoundConfig& cfg;
    Gateways& gw;
    repl::StatementChecker& checker;
    FaultInjector& fault;

    std::mutex mu;  // journal writes, failures, counters, fault ticks
    std::unordered_map<std::string, std::string> raw;
    std::vector<StageFailure> failures;
    std::int64_t new_candidates = 0;
    std::atomic<std::int64_t> compile_jobs{0};

    void fail(std::string item, std::string stage, const Error& e) {
        std::lock_guard lk(mu);
        spdlog::warn("{} {}: {}", stage, item, e.what());
        failures.push_back({std::move(item), std::move(stage), std::string(to_string(e.code())), e.what()});
    }
};

void process_problem(RoundState& st, const Problem& original) {
    const int round = st.cfg.round;
    const int n = st.cfg.sampling.n_samples;
    const Problem problem = rephrase_answer(original);

    std::vector<int> missing;
    bool need_translation = false;
    {
        std::lock_guard lk(st.mu);
        for (int k = 0; k < n; ++k) {
            CandidateKey key{problem.id, round, k};
            if (st.store.candidates(round).contains(key.str())) continue;
            missing.push_back(k);
            if (!st.raw.count(key.str())) need_translation = true;
        }
    }
    if (missing.empty()) return;

    if (need_translation) {
        if (!st.gw.translate) throw validation_error("round needs a translate backend");
        std::vector<std::string> outs;
        try {
            outs = llm::translate(problem, n, st.cfg.sampling.temperature, *st.gw.translate);
        } catch (const Error& e) {
            st.fail(problem.id, "translate", e);
            return;
        }
        std::lock_guard lk(st.mu);
        for (int k : missing) {
            RawTranslation r{problem.id, round, k, outs.at(static_cast<std::size_t>(k))};
            auto key = r.key().str();
            if (st.raw.count(key)) continue;
            st.store.raw(round).append(r);
            st.raw.emplace(key, r.raw_text);
            st.fault.tick("raw");
        }
    }

    for (int k : missing) {
        TranslationCandidate c;
        c.problem_id = problem.id;
        c.round = round;
        c.sample_index = k;
        const std::string id = c.key().str();
        std::string raw;
        {
            std::lock_guard lk(st.mu);
            raw = st.raw.at(id);
        }
        PreparedStatement prepared;
        try {
            prepared = prepare_statement(raw, problem.id, k, problem.nl_text);
        } catch (const Error& e) {
            st.fail(id, "lint", e);
            continue;
        }
        c.statement_text = prepared.text;
        c.lint = prepared.lint;
        c.fingerprint = prepared.fingerprint;

        ++st.compile_jobs;
        CompileVerdict v;
        try {
            v = st.checker.check_statement(c.statement_text);
        } catch (const Error& e) {
            st.fail(id, "compile", e);
            continue;
        }
        if (v.kind == CompileKind::worker_crash) {
            // the worker died, not the statement; leave it for the rerun
            st.fail(id, "compile", Error(ErrorCode::transport, "worker crashed during check"));
            continue;
        }
        c.compile = v;

        if (c.compile_pass()) {
            if (!st.gw.back_translate || !st.gw.nli) throw validation_error("round needs back_translate and nli backends");
            const std::vector<std::string> keys{id, problem.id};
            try {
                c.back_translation = llm::back_translate(c.statement_text, keys, *st.gw.back_translate);
                c.nli = llm::judge_nli(problem.nl_text, *c.back_translation, keys, *st.gw.nli).value;
            } catch (const Error& e) {
                st.fail(id, "nli", e);
                continue;
            }
        }

        std::lock_guard lk(st.mu);
        st.store.candidates(round).append(c);
        ++st.new_candidates;
        st.fault.tick("candidate");
    }
}

}  // namespace

RoundResult run_round(Store& store, const RoundConfig& cfg, Gateways& gw, repl::StatementChecker& checker,
                      FaultInjector& fault, int parallelism) {
    cfg.validate();
    if (store.mode() != OpenMode::writer) throw validation_error("run_round needs a writable store");
    std::filesystem::create_directories(store.round_dir(cfg.round));

    std::vector<Problem> eligible;
    for (const auto& p : store.problems().records()) {
        if (p.well_defined == Judgement::positive && tag_kept(p, cfg.allowlist)) eligible.push_back(p);
    }

    RoundState st{store, cfg, gw, checker, fault, {}, {}, {}, 0, {}};
    for (const auto& r : store.raw(cfg.round).records()) st.raw.emplace(r.key().str(), r.raw_text);
    store.candidates(cfg.round);

    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr crash;
    std::mutex crash_mu;
    auto work = [&] {
        for (;;) {
            if (stop) return;
            std::size_t i = next++;
            if (i >= eligible.size()) return;
            try {
                process_problem(st, eligible[i]);
            } catch (...) {
                std::lock_guard lk(crash_mu);
                if (!crash) crash = std::current_exception();
                stop = true;
                return;
            }
        }
    };
    const int threads = std::max(1, std::min<int>(parallelism, static_cast<int>(eligible.size())));
    if (!eligible.empty()) {
        std::vector<std::thread> pool;
        for (int t = 1; t < threads; ++t) pool.emplace_back(work);
        work();
        for (auto& t : pool) t.join();
    }
    if (crash) std::rethrow_exception(crash);

    RoundResult result;
    result.manifest = derive_manifest(store, cfg.round, cfg.model_id, cfg.digest(), cfg.seed);
    result.failures = std::move(st.failures);
    std::sort(result.failures.begin(), result.failures.end(),
              [](const StageFailure& a, const StageFailure& b) { return std::tie(a.item, a.stage) < std::tie(b.item, b.stage); });
    result.new_candidates = st.new_candidates;
    result.compile_jobs = st.compile_jobs;
    result.funnel = compute_funnel(store, result.manifest, cfg.allowlist);

    fault.tick("manifest");
    store.write_manifest(result.manifest);
    write_file_atomic(store.round_dir(cfg.round) / "funnel.jsonl", result.funnel.to_jsonl());
    const auto failures_path = store.round_dir(cfg.round) / "failures.json";
    if (result.partial()) {
        Json arr = Json::array();
        for (const auto& f : result.failures) arr.push_back(to_json(f));
        write_file_atomic(failures_path, arr.dump(2) + "\n");
    } else if (std::filesystem::exists(failures_path)) {
        std::filesystem::remove(failures_path);
    }
    return result;
}

}  // namespace forge::pipeline
