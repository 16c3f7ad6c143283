#include "forge/core/metrics.hpp"

#include <set>

#include "forge/core/errors.hpp"

namespace forge {

void RoundStatsAccumulator::add(int round, bool compile_pass, bool nli_pass, std::span<const std::string> tags,
                                std::int64_t multiplicity) {
    if (multiplicity < 0) throw validation_error("multiplicity must be non-negative");
    if (!round_) {
        round_ = round;
        m_.round = round;
    } else if (*round_ != round) {
        mixed_ = true;
    }
    m_.translated_count += multiplicity;
    if (!compile_pass) return;
    m_.cpn += multiplicity;
    if (!nli_pass) return;
    m_.npn += multiplicity;
    // A problem carrying several tags counts once under each distinct tag.
    std::set<std::string_view> seen(tags.begin(), tags.end());
    for (auto tag : seen) m_.per_tag_counts[std::string(tag)] += multiplicity;
}

void RoundStatsAccumulator::add(const TranslationCandidate& c, std::span<const std::string> tags,
                                std::int64_t multiplicity) {
    add(c.round, c.compile_pass(), c.nli_pass(), tags, multiplicity);
}

RoundManifest RoundStatsAccumulator::fragment() const {
    if (mixed_) throw validation_error("candidates from more than one round passed to compute_round_stats");
    return m_;
}

RoundManifest compute_round_stats(std::span<const TranslationCandidate> candidates, const TagIndex& tags) {
    RoundStatsAccumulator acc;
    static const std::vector<std::string> kNoTags;
    for (const auto& c : candidates) {
        auto it = tags.find(c.problem_id);
        acc.add(c, it == tags.end() ? kNoTags : it->second);
    }
    return acc.fragment();
}

double weighted_accuracy(std::span<const AccuracyRow> rows) {
    if (rows.empty()) throw validation_error("weighted_accuracy needs at least one row");
    long double weighted = 0.0L;
    long double weight = 0.0L;
    for (const auto& r : rows) {
        if (r.sampled_total < 1) throw validation_error("row '" + r.tag + "' has sampled_total < 1");
        if (r.count < 0) throw validation_error("row '" + r.tag + "' has a negative count");
        if (r.sampled_correct < 0 || r.sampled_correct > r.sampled_total) {
            throw validation_error("row '" + r.tag + "' has sampled_correct outside [0, sampled_total]");
        }
        weighted += static_cast<long double>(r.count) * r.sampled_correct / r.sampled_total;
        weight += static_cast<long double>(r.count);
    }
    if (weight == 0.0L) throw validation_error("weighted_accuracy needs a positive total count");
    return static_cast<double>(weighted / weight);
}

PassAtK pass_rate(std::int64_t solved, std::int64_t total, int k) {
    if (total <= 0) throw validation_error("pass_rate needs total > 0");
    if (solved < 0 || solved > total) throw validation_error("pass_rate needs 0 <= solved <= total");
    if (k < 0) throw validation_error("pass_rate needs k >= 0");
    return PassAtK{solved, total, k, Fraction::reduced(solved, total)};
}

}  // namespace forge
