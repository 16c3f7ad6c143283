#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/core/errors.hpp"
#include "forge/core/types.hpp"

namespace forge::llm {

struct TriVerdict {
    Judgement value = Judgement::indeterminate;  // positive, negative or indeterminate
    std::string raw;
};

/// Finds `**positive**` and `**negative**` case-insensitively and returns the
/// side whose last occurrence starts later; neither gives indeterminate.
/// Throws Error{validation} if the markers are empty or equal.
Judgement parse_bold_verdict(std::string_view text, std::string_view positive_marker,
                             std::string_view negative_marker);

struct ProblemDraft {
    std::string problem;
    std::optional<std::string> answer;  // "" in the response means a proof problem
    std::vector<std::string> tags;      // normalized
    friend bool operator==(const ProblemDraft&, const ProblemDraft&) = default;
};

/// Strips code fences, finds the outermost array (or a lone object), drops
/// trailing commas, and reads each element. Missing tags default to [],
/// missing answer to "". Elements without a problem text are skipped.
/// Throws Error{extraction} with the raw text in details when no array parses.
std::vector<ProblemDraft> parse_extraction_json(std::string_view text);

/// First fenced block if any, else the text; trimmed. Used for statements and proofs.
std::string strip_code_fence(std::string_view text);

}  // namespace forge::llm
