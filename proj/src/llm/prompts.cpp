#include "forge/llm/prompts.hpp"

#include "forge/core/errors.hpp"
#include "forge/lean/fingerprint.hpp"

namespace forge::llm {

namespace {

// Math-mode dollars are kept; "\_" became "_" and "\\" line breaks became newlines.
constexpr std::string_view kExtractText =
    "You are a data labeler. Here is a discussion between math students. It may contain several problems and "
    "several solutions. Please extract them in a JSON format. Each problem is an element and has keys including "
    "problem (str, you should not miss any assumption like non-negativity of numbers, be formal), answer (return "
    "numbers as a string for calculation problems and return an empty string for proof problems), and tags (list "
    "of str). Tags should identify the category of this math problem. Possible tags contain: equation, inequality, "
    "number_theory, algebra, probability, combination, trigonometry, and etc.";

constexpr std::string_view kWellDefinedText =
    "Please check whether the following math problem is well-defined? Please follow the rules: 1. Consider each "
    "condition given in the problem, it is not well-defined one variable is used without definition anywhere in "
    "the question.\n"
    "2.The problem is not well-defined if it contains more than one goal or no clear goals to solve.\n"
    "3. Note that inequalities may omit the statement that $x,y,z,a,b,c$ are real numbers, but they are "
    "well-defined, do not judge them to be ill-defined.\n"
    "4. Please reply **well-defined** or **ill-defined** in the final sentence with bold format, be sure not to "
    "fail well-defined questions.";

constexpr std::string_view kNliText =
    "Please check following two math problems is same or different? Please consider each statement in two "
    "problems, they are different if any statement is different. Please point out any differences you found. "
    "Please reply **same** or **different** in the final sentence with bold format.";

constexpr std::string_view kNl2FlText =
    "Translate the following natural language math problem into a Lean 4 theorem statement using Mathlib. "
    "Reply with the statement only, ending in \":= by sorry\".";

constexpr std::string_view kFl2NlText =
    "Translate the following Lean 4 theorem statement into a natural language math problem. "
    "Keep every hypothesis and the goal.";

constexpr std::string_view kProveText =
    "Write a complete Lean 4 proof for the following theorem using Mathlib. "
    "Reply with the proof term only, starting with \"by\".";

std::vector<PromptTemplate> build() {
    auto make = [](std::string_view id, std::string_view text, std::string_view tail) {
        PromptTemplate t;
        t.prompt_id = std::string(id);
        t.instruction = std::string(text);
        t.template_text = std::string(text) + std::string(tail);
        return t;
    };
    return {
        make(kExtract, kExtractText, "\n\n{post}"),
        make(kWellDefined, kWellDefinedText, "\n\n{problem}"),
        make(kNl2Fl, kNl2FlText, "\n\n{problem}"),
        make(kFl2Nl, kFl2NlText, "\n\n{statement}"),
        make(kNli, kNliText, "\n\nProblem 1:\n{problem_a}\n\nProblem 2:\n{problem_b}"),
        make(kProve, kProveText, "\n\n{statement}"),
    };
}

}  // namespace

std::vector<std::string> PromptTemplate::placeholders() const {
    std::vector<std::string> out;
    // the instruction itself may hold braces; only the tail is scanned
    for (std::size_t i = instruction.size(); i < template_text.size(); ++i) {
        if (template_text[i] != '{') continue;
        auto close = template_text.find('}', i);
        if (close == std::string::npos) break;
        out.push_back(template_text.substr(i + 1, close - i - 1));
        i = close;
    }
    return out;
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& vars) const {
    std::string out = instruction;
    for (std::size_t i = instruction.size(); i < template_text.size(); ++i) {
        char c = template_text[i];
        if (c == '{') {
            auto close = template_text.find('}', i);
            if (close != std::string::npos) {
                std::string name = template_text.substr(i + 1, close - i - 1);
                auto it = vars.find(name);
                if (it == vars.end()) {
                    throw validation_error("prompt '" + prompt_id + "' needs {" + name + "}", {{"prompt_id", prompt_id}});
                }
                out += it->second;
                i = close;
                continue;
            }
        }
        out += c;
    }
    return out;
}

const std::vector<PromptTemplate>& prompt_registry() {
    static const std::vector<PromptTemplate> reg = build();
    return reg;
}

const PromptTemplate& prompt(std::string_view prompt_id) {
    for (const auto& t : prompt_registry()) {
        if (t.prompt_id == prompt_id) return t;
    }
    throw validation_error("unknown prompt id '" + std::string(prompt_id) + "'");
}

std::string registry_digest() {
    std::string all;
    for (const auto& t : prompt_registry()) {
        all += t.prompt_id;
        all += '\x1e';
        all += t.template_text;
        all += '\x1e';
    }
    return lean::sha256_hex(all);
}

}  // namespace forge::llm
