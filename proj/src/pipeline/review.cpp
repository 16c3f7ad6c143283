#include "forge/pipeline/review.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "forge/core/json_io.hpp"
#include "forge/lean/statement.hpp"
#include "forge/pipeline/round.hpp"

namespace forge::pipeline {

std::string_view to_string(ReviewStrategy s) {
    return s == ReviewStrategy::pattern_triage ? "pattern_triage" : "tag_stratified";
}

ReviewStrategy review_strategy_from_string(std::string_view s) {
    if (s == "pattern_triage") return ReviewStrategy::pattern_triage;
    if (s == "tag_stratified") return ReviewStrategy::tag_stratified;
    throw validation_error("unknown review strategy '" + std::string(s) + "'");
}

Json to_json(const ReviewBatch& b) {
    Json j;
    j["round"] = b.round;
    j["strategy"] = std::string(to_string(b.strategy));
    j["seed"] = b.seed;
    j["quota_map"] = Json::object();
    for (const auto& [t, q] : b.quota_map) j["quota_map"][t] = q;
    j["items"] = b.items;
    return j;
}

ReviewBatch review_batch_from_json(const Json& j) {
    ReviewBatch b;
    try {
        b.round = j.at("round").get<int>();
        b.strategy = review_strategy_from_string(j.at("strategy").get<std::string>());
        b.seed = j.value("seed", std::uint64_t{0});
        for (const auto& [t, q] : j.at("quota_map").items()) b.quota_map[t] = q.get<int>();
        b.items = j.at("items").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("bad review batch: ") + e.what());
    }
    return b;
}

std::map<std::string, int> tag_quotas(const std::map<std::string, std::int64_t>& per_tag_counts) {
    std::vector<std::pair<std::string, std::int64_t>> common;
    for (const auto& [tag, n] : per_tag_counts) {
        if (n > 100) common.emplace_back(tag, n);
    }
    std::stable_sort(common.begin(), common.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::map<std::string, int> out;
    for (std::size_t i = 0; i < common.size(); ++i) out[common[i].first] = i < 3 ? 10 : 5;
    return out;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound == 0) throw validation_error("uniform_below needs bound > 0");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    for (;;) {
        std::uint64_t x = rng();
        if (x < limit) return x % bound;
    }
}

ReviewBatch build_review_batch(std::span<const TranslationCandidate> candidates, const TagIndex& tags, int round,
                               ReviewStrategy strategy, std::uint64_t seed) {
    std::vector<const TranslationCandidate*> sorted;
    for (const auto& c : candidates) {
        if (c.round != round) throw validation_error("candidate from another round in review batch");
        sorted.push_back(&c);
    }
    // journal order depends on thread timing; key order does not
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->key() < b->key(); });

    ReviewBatch b;
    b.round = round;
    b.strategy = strategy;
    b.seed = seed;
    if (strategy == ReviewStrategy::pattern_triage) {
        for (auto* c : sorted) {
            if (!c->compile_pass()) b.items.push_back(c->key().str());
        }
        for (auto* c : sorted) {
            if (c->compile_pass() && c->nli != Judgement::positive) b.items.push_back(c->key().str());
        }
        return b;
    }

    std::map<std::string, std::int64_t> counts;
    std::map<std::string, std::vector<const TranslationCandidate*>> by_tag;
    for (auto* c : sorted) {
        if (!c->nli_pass()) continue;
        auto it = tags.find(c->problem_id);
        if (it == tags.end()) continue;
        for (const auto& t : it->second) {
            ++counts[t];
            by_tag[t].push_back(c);
        }
    }
    b.quota_map = tag_quotas(counts);
    if (b.quota_map.empty()) {
        spdlog::warn("round {}: no tag has more than 100 NLI-passing candidates; review batch is empty", round);
        return b;
    }
    std::vector<std::pair<std::string, int>> order(b.quota_map.begin(), b.quota_map.end());
    std::stable_sort(order.begin(), order.end(),
                     [&](const auto& x, const auto& y) { return counts[x.first] > counts[y.first]; });

    std::mt19937_64 rng(seed);
    std::set<std::string> taken;
    for (const auto& [tag, quota] : order) {
        auto pool = by_tag[tag];
        seeded_shuffle(pool, rng);
        int got = 0;
        for (auto* c : pool) {
            if (got == quota) break;
            auto id = c->key().str();
            if (!taken.insert(id).second) continue;
            b.items.push_back(id);
            ++got;
        }
    }
    return b;
}

ReviewBatch enqueue_review(Store& store, int round, ReviewStrategy strategy, std::uint64_t seed) {
    if (!store.has_round(round)) throw validation_error("unknown round " + std::to_string(round), {{"round", round}});
    auto candidates = store.load_round(round);
    auto batch = build_review_batch(candidates, store.tag_index(), round, strategy, seed);
    write_file_atomic(store.round_dir(round) / "review_batch.json", to_json(batch).dump(2) + "\n");
    return batch;
}

std::optional<ReviewBatch> load_review_batch(const Store& store, int round) {
    auto p = store.round_dir(round) / "review_batch.json";
    if (!std::filesystem::exists(p)) return std::nullopt;
    Json j = Json::parse(read_file(p), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::environment, "unreadable review batch", {{"path", p.string()}});
    return review_batch_from_json(j);
}

Json to_json(const MergeReport& r) {
    Json j;
    j["applied"] = r.applied;
    j["accepted"] = r.accepted;
    j["rejected"] = Json::array();
    for (const auto& x : r.rejected) {
        Json e{{"candidate_id", x.candidate_id}, {"reason", x.reason}};
        e["compile"] = x.compile ? to_json(*x.compile) : Json(nullptr);
        j["rejected"].push_back(std::move(e));
    }
    return j;
}

std::variant<LabelRecord, LabelRejection> vet_label(const TranslationCandidate& c, LabelRecord label,
                                                    repl::StatementChecker& checker) {
    auto reject = [&](std::string why, std::optional<CompileVerdict> v = std::nullopt) {
        return LabelRejection{label.candidate_id, std::move(why), std::move(v)};
    };
    if (label.verdict == HumanVerdict::unreviewed) return reject("verdict must be correct, modified or rejected");
    if (label.verdict != HumanVerdict::modified) {
        label.modified_text.reset();
        return label;
    }
    if (!label.modified_text || label.modified_text->find_first_not_of(" \t\r\n") == std::string::npos) {
        return reject("modified verdict needs modified_text");
    }
    std::string text;
    try {
        text = lean::normalize_text(*label.modified_text,
                                    lean::NamePolicy::fixed(lean::stable_theorem_name(c.problem_id, c.sample_index)));
    } catch (const Error& e) {
        CompileVerdict v;
        v.messages.push_back({MessageSeverity::error, e.what(), {}});
        return reject("modified_text does not parse", v);
    }
    if (text == c.statement_text) return reject("modified_text is identical to the statement");
    auto v = checker.check_statement(text);
    if (!v.compiles()) return reject("modified_text does not compile", v);
    label.modified_text = text;
    return label;
}

MergeReport merge_human_labels(Store& store, int round, std::span<const LabelRecord> labels,
                               repl::StatementChecker& checker, FaultInjector* fault) {
    MergeReport report;
    std::map<std::string, TranslationCandidate> by_id;
    for (auto& c : store.load_round(round)) by_id.emplace(c.key().str(), c);

    for (const auto& label : labels) {
        auto it = by_id.find(label.candidate_id);
        if (it == by_id.end()) {
            report.rejected.push_back({label.candidate_id, "unknown candidate in round " + std::to_string(round), {}});
            continue;
        }
        auto vetted = vet_label(it->second, label, checker);
        if (auto* r = std::get_if<LabelRejection>(&vetted)) {
            report.rejected.push_back(std::move(*r));
            continue;
        }
        const auto& rec = std::get<LabelRecord>(vetted);
        store.labels(round).append(rec);
        if (fault) fault->tick("label");
        ++report.applied;
        if (rec.verdict == HumanVerdict::correct || rec.verdict == HumanVerdict::modified) ++report.accepted;
    }

    if (auto m = store.manifest(round)) {
        auto updated = *m;
        auto current = store.load_round(round);
        updated.human_labels_added = std::count_if(current.begin(), current.end(), [](const TranslationCandidate& c) {
            return c.human == HumanVerdict::correct || c.human == HumanVerdict::modified;
        });
        store.write_manifest(updated);
    }
    return report;
}

std::vector<AccuracyRow> accuracy_from_labels(Store& store, int round) {
    auto batch = load_review_batch(store, round);
    if (!batch) return {};
    auto manifest = current_manifest(store, round);
    auto tags = store.tag_index();
    std::map<std::string, TranslationCandidate> by_id;
    for (auto& c : store.load_round(round)) by_id.emplace(c.key().str(), c);

    std::vector<AccuracyRow> rows;
    std::vector<std::pair<std::string, std::int64_t>> order;
    for (const auto& [tag, q] : batch->quota_map) {
        auto it = manifest.per_tag_counts.find(tag);
        order.emplace_back(tag, it == manifest.per_tag_counts.end() ? 0 : it->second);
    }
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    for (const auto& [tag, count] : order) {
        AccuracyRow row{tag, count, 0, 0};
        for (const auto& id : batch->items) {
            auto c = by_id.find(id);
            if (c == by_id.end() || c->second.human == HumanVerdict::unreviewed) continue;
            const auto& ptags = tags[c->second.problem_id];
            if (std::find(ptags.begin(), ptags.end(), tag) == ptags.end()) continue;
            ++row.sampled_total;
            if (c->second.human == HumanVerdict::correct) ++row.sampled_correct;
        }
        if (row.sampled_total > 0) rows.push_back(row);
    }
    return rows;
}

std::vector<AccuracyRow> round_accuracy(Store& store, int round) {
    if (auto rows = store.accuracy_rows(round)) return *rows;
    return accuracy_from_labels(store, round);
}

std::string accuracy_table(std::span<const AccuracyRow> rows) {
    std::ostringstream os;
    char line[128];
    std::snprintf(line, sizeof line, "%-22s %12s %18s\n", "tag", "count", "sampled accuracy");
    os << line;
    for (const auto& r : rows) {
        std::string acc = std::to_string(r.sampled_correct) + "/" + std::to_string(r.sampled_total);
        std::snprintf(line, sizeof line, "%-22s %12lld %18s\n", r.tag.c_str(), static_cast<long long>(r.count), acc.c_str());
        os << line;
    }
    if (rows.empty()) {
        std::snprintf(line, sizeof line, "%-22s %12s %18s\n", "weighted average", "-", "-");
    } else {
        std::snprintf(line, sizeof line, "%-22s %12s %18.3f\n", "weighted average", "-", weighted_accuracy(rows));
    }
    os << line;
    return os.str();
}

}  // namespace forge::pipeline
