#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace forge::llm {

/// Stable ids. extract, well_defined and nli carry the published prompt
/// text; nl2fl, fl2nl and prove are this project's own fixed prompts.
inline constexpr std::string_view kExtract = "extract";
inline constexpr std::string_view kWellDefined = "well_defined";
inline constexpr std::string_view kNl2Fl = "nl2fl";
inline constexpr std::string_view kFl2Nl = "fl2nl";
inline constexpr std::string_view kNli = "nli";
inline constexpr std::string_view kProve = "prove";

struct PromptTemplate {
    std::string prompt_id;
    std::string instruction;  // the fixed prompt text
    std::string template_text;  // instruction followed by `{name}` placeholders

    /// Substitutes each `{name}` in the template once; values are not rescanned.
    /// Throws Error{validation} for a placeholder without a value.
    std::string render(const std::map<std::string, std::string>& vars) const;
    std::vector<std::string> placeholders() const;
};

const std::vector<PromptTemplate>& prompt_registry();

/// Throws Error{validation} for an unknown id.
const PromptTemplate& prompt(std::string_view prompt_id);

/// sha256 over every template, in registry order.
std::string registry_digest();

}  // namespace forge::llm
