#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "forge/core/store.hpp"
#include "forge/pipeline/stages.hpp"
#include "forge/repl/checker.hpp"

namespace forge::pipeline {

enum class ReviewStrategy { pattern_triage, tag_stratified };

std::string_view to_string(ReviewStrategy s);
ReviewStrategy review_strategy_from_string(std::string_view s);

struct ReviewBatch {
    int round = 0;
    std::vector<std::string> items;  // candidate ids
    ReviewStrategy strategy = ReviewStrategy::pattern_triage;
    std::map<std::string, int> quota_map;
    std::uint64_t seed = 0;
};

Json to_json(const ReviewBatch& b);
ReviewBatch review_batch_from_json(const Json& j);

/// Tags with count > 100 get a quota: 10 for the three largest, 5 for the
/// rest. Ties in count break by tag name.
std::map<std::string, int> tag_quotas(const std::map<std::string, std::int64_t>& per_tag_counts);

/// Uniform in [0, bound) by rejection, so the draw sequence for a seed is the
/// same on every standard library.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// Fisher-Yates with uniform_below.
template <typename T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

/// pattern_triage: compile failures, then compiled-but-not-NLI-positive
/// candidates, in key order. tag_stratified: NLI-passing candidates drawn per
/// tag_quotas with a seeded shuffle, largest tag first, no candidate twice.
ReviewBatch build_review_batch(std::span<const TranslationCandidate> candidates, const TagIndex& tags, int round,
                               ReviewStrategy strategy, std::uint64_t seed);

/// build_review_batch over the journal; writes rounds/<N>/review_batch.json.
ReviewBatch enqueue_review(Store& store, int round, ReviewStrategy strategy, std::uint64_t seed);

std::optional<ReviewBatch> load_review_batch(const Store& store, int round);

struct LabelRejection {
    std::string candidate_id;
    std::string reason;
    std::optional<CompileVerdict> compile;
};

struct MergeReport {
    std::int64_t applied = 0;   // labels journaled
    std::int64_t accepted = 0;  // of those, correct or modified
    std::vector<LabelRejection> rejected;
};

Json to_json(const MergeReport& r);

/// Validates one label against the round: known candidate, modified text
/// present and different, and the modified text (normalized) recompiles.
/// Returns the label to journal (with normalized text) or the rejection.
std::variant<LabelRecord, LabelRejection> vet_label(const TranslationCandidate& candidate, LabelRecord label,
                                                    repl::StatementChecker& checker);

/// Journals every valid label; updates manifest.human_labels_added if a
/// manifest exists.
MergeReport merge_human_labels(Store& store, int round, std::span<const LabelRecord> labels,
                               repl::StatementChecker& checker, FaultInjector* fault = nullptr);

/// Per tag in the batch's quota map: count from the manifest, sampled
/// correct/total from labels on batch items. Tags with no reviewed items are
/// omitted.
std::vector<AccuracyRow> accuracy_from_labels(Store& store, int round);

/// Shipped rows (accuracy.jsonl) if present, else accuracy_from_labels.
std::vector<AccuracyRow> round_accuracy(Store& store, int round);

std::string accuracy_table(std::span<const AccuracyRow> rows);

}  // namespace forge::pipeline
