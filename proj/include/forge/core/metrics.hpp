#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "forge/core/types.hpp"

namespace forge {

using TagIndex = std::unordered_map<std::string, std::vector<std::string>>;

/// Builds the count fields of a RoundManifest (translated_count, cpn, npn,
/// per_tag_counts). Rows may carry a multiplicity so aggregated verdict
/// tables can be fed without expanding them.
class RoundStatsAccumulator {
public:
    void add(int round, bool compile_pass, bool nli_pass, std::span<const std::string> tags,
             std::int64_t multiplicity = 1);
    void add(const TranslationCandidate& c, std::span<const std::string> tags, std::int64_t multiplicity = 1);

    /// Throws validation error when rows from different rounds were mixed.
    RoundManifest fragment() const;

private:
    std::optional<int> round_;
    bool mixed_ = false;
    RoundManifest m_;
};

RoundManifest compute_round_stats(std::span<const TranslationCandidate> candidates, const TagIndex& tags);

struct AccuracyRow {
    std::string tag;
    std::int64_t count = 0;
    std::int64_t sampled_correct = 0;
    std::int64_t sampled_total = 0;
};

/// Σ count·(correct/total) / Σ count.
double weighted_accuracy(std::span<const AccuracyRow> rows);

PassAtK pass_rate(std::int64_t solved, std::int64_t total, int k);

}  // namespace forge
