#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "forge/core/store.hpp"

namespace forge::pipeline {

inline constexpr std::string_view kPairsFormat = "forge-training-pairs";
inline constexpr int kPairsVersion = 1;

struct TrainingPair {
    std::string prompt_id;  // nl2fl or fl2nl
    std::string input;
    std::string target;
};

/// Two pairs per candidate: (nl2fl, nl, statement) and (fl2nl, statement, nl).
/// The nl side carries the rephrased answer sentence; the statement is the
/// accepted text normalized to end in `:= by sorry`. Throws Error{validation}
/// listing every candidate that is not correct or modified.
std::vector<TrainingPair> training_pairs(std::span<const TranslationCandidate> accepted,
                                         const std::map<std::string, Problem>& problems);

/// Header line {"format", "version"} followed by one {prompt_id, input, target} per line.
std::string encode_training_pairs(std::span<const TrainingPair> pairs);
std::vector<TrainingPair> decode_training_pairs(std::string_view text);

/// Human-accepted candidates of the given rounds (all rounds when empty).
std::vector<TranslationCandidate> accepted_candidates(Store& store, std::span<const int> rounds);

/// NLI-passing candidates not rejected by a reviewer, first occurrence per
/// fingerprint, as JSONL {problem_id, round, sample_index, nl_text, answer,
/// tags, formal_statement, fingerprint, human}.
std::string export_dataset(Store& store, std::span<const int> rounds);

std::map<std::string, Problem> problem_map(Store& store);

}  // namespace forge::pipeline
