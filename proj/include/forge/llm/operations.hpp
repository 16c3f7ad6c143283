#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "forge/core/types.hpp"
#include "forge/llm/backend.hpp"
#include "forge/llm/parsers.hpp"

namespace forge::llm {

/// Raw extraction reply for one post. Mock key: `source`.
std::string request_extraction(std::string_view post_text, std::string_view source, Gateway& gw);

/// request_extraction + parse_extraction_json.
std::vector<ProblemDraft> extract_problems(std::string_view post_text, std::string_view source, Gateway& gw);

/// Mock key: problem id. An indeterminate reply is asked once more.
TriVerdict judge_well_defined(const Problem& problem, Gateway& gw);

/// n raw completions. Mock key: problem id.
std::vector<std::string> translate(const Problem& problem, int n, double temperature, Gateway& gw);

/// Mock keys: `keys` (e.g. candidate id, problem id).
std::string back_translate(std::string_view statement, const std::vector<std::string>& keys, Gateway& gw);

/// positive iff the last marker is **same**. An indeterminate reply is asked once more.
TriVerdict judge_nli(std::string_view original_nl, std::string_view back_translated_nl,
                     const std::vector<std::string>& keys, Gateway& gw);

/// k whole-proof samples for one statement.
std::vector<std::string> sample_proofs(std::string_view statement, int k, double temperature,
                                       const std::vector<std::string>& keys, Gateway& gw);

}  // namespace forge::llm
