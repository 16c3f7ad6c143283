#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/core/types.hpp"

namespace forge::lean {

struct LintRule {
    std::string_view id;
    FindingSeverity severity;
    std::string_view summary;
};

/// The rule catalog in report order. Fixable rules rewrite a span; flag rules
/// only point a reviewer at the statement.
const std::vector<LintRule>& lint_rules();

/// Lints a declaration, or a bare term when the text does not start with
/// `theorem`/`lemma`. `nl_text` drives the flag rules. Text that cannot be
/// tokenized or parsed yields a single `parse_failure` flag. Findings are
/// sorted by (span.begin, rule_id); fixable spans never overlap, because fixes
/// nested inside a chained inequality are folded into its suggestion.
LintReport lint(std::string_view text, std::optional<std::string_view> nl_text = std::nullopt);

/// Applies every fixable suggestion right to left. Throws Error{validation}
/// on overlapping fixable spans or spans outside the text.
std::string apply_fixes(std::string_view text, const LintReport& report);

}  // namespace forge::lean
