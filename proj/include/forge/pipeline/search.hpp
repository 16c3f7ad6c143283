#pragma once

#include <optional>
#include <string>
#include <vector>

#include "forge/core/types.hpp"
#include "forge/llm/backend.hpp"
#include "forge/repl/checker.hpp"

namespace forge::pipeline {

struct ImoCandidate {
    std::string statement_text;
    std::string fingerprint;
    int frequency = 0;            // samples that collapsed onto this fingerprint
    int first_sample = 0;
    CompileVerdict compile;
    std::optional<std::string> back_translation;
    Judgement nli = Judgement::unjudged;

    bool survives() const noexcept { return compile.compiles() && nli == Judgement::positive; }
};

struct ImoResult {
    std::string problem_id;
    int samples = 0;
    int distinct = 0;
    int compiled = 0;
    std::vector<ImoCandidate> ranked;  // compiling candidates: NLI pass first, then frequency, then first sample
    int survivors() const;
};

Json to_json(const ImoResult& r);

/// k samples at `temperature`, deduplicated by fingerprint, compile-checked,
/// back-translated and NLI-judged.
ImoResult imo_mode(const Problem& problem, int k, double temperature, llm::Gateway& translate,
                   llm::Gateway& back_translate, llm::Gateway& nli, repl::StatementChecker& checker);

struct ProofSearchSummary {
    bool solved = false;
    std::optional<int> winning_index;  // 1-based attempt number
    int attempts = 0;                  // proofs sent to the checker
    std::vector<CompileKind> failures;
    bool retryable = false;
    std::string error;
};

Json to_json(const ProofSearchSummary& s);

/// Samples up to proof_k whole proofs and checks them in order, stopping at
/// the first proof_pass. A backend or pool failure ends the search with
/// retryable set.
ProofSearchSummary proof_search(std::string_view statement, int proof_k, double temperature,
                                const std::vector<std::string>& keys, llm::Gateway& prover,
                                repl::StatementChecker& checker);

}  // namespace forge::pipeline
