#include "forge/repl/simulator.hpp"

#include <regex>
#include <set>

#include "forge/lean/lint.hpp"
#include "forge/lean/statement.hpp"
#include "forge/lean/tokenizer.hpp"
#include "forge/repl/protocol.hpp"

namespace forge::repl {

namespace {

Position position_of(std::string_view text, std::size_t offset) {
    Position p{1, 0};
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++p.line;
            p.column = 0;
        } else if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
            ++p.column;
        }
    }
    return p;
}

CompileMessage error_at(std::string_view text, std::size_t offset, std::string msg) {
    return {MessageSeverity::error, std::move(msg), position_of(text, offset)};
}

std::string lint_error_text(const Finding& f, std::string_view text) {
    std::string snippet(text.substr(f.span.begin, f.span.size()));
    if (f.rule_id == "namespace_qualification") {
        return "ambiguous, possible interpretations \n  Nat.sqrt : ℕ → ℕ\n  \n  NNReal.sqrt : NNReal →*₀ NNReal";
    }
    if (f.rule_id == "chained_inequality") return "failed to synthesize\n  LE Prop\n(in '" + snippet + "')";
    if (f.rule_id == "missing_operator") return "unexpected identifier; expected term (in '" + snippet + "')";
    return "elaboration error (" + f.rule_id + ")";
}

// Binary operators that need a term on both sides; `-` and `¬` are left out
// because they also work as prefixes.
bool infix(const lean::Token& t) {
    static const std::set<std::string_view> ops{"+", "*", "/", "^", "%", "=", "≠", "<", ">", "≤", "≥", "<=", ">=",
                                                "∧", "∨", "→", "↔", "∣", "∈", "∉", "⊆", "∩", "∪"};
    return t.kind == lean::TokenKind::op && ops.count(t.text) != 0;
}

}  // namespace

SimDirectives parse_directives(std::string_view cmd) {
    SimDirectives d;
    static const std::regex re(R"(fake:(sleep|crash|hang|error|warn)(?:=([^\n]*))?)");
    std::string s(cmd);
    for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        std::string name = m[1];
        std::string value = m[2];
        if (name == "sleep") d.sleep_ms = std::atoi(value.c_str());
        if (name == "crash") d.crash = true;
        if (name == "hang") d.hang = true;
        if (name == "error") d.error = value;
        if (name == "warn") d.warning = value;
    }
    return d;
}

std::vector<CompileMessage> simulate_elaboration(std::string_view cmd) {
    std::vector<CompileMessage> out;
    auto d = parse_directives(cmd);
    if (d.error) out.push_back({MessageSeverity::error, *d.error, {1, 0}});
    if (d.warning) out.push_back({MessageSeverity::warning, *d.warning, {1, 0}});

    lean::ParseResult parsed;
    try {
        parsed = lean::parse_statement_detailed(cmd);
    } catch (const Error& e) {
        std::size_t offset = e.details().is_object() ? e.details().value("offset", std::size_t{0}) : 0;
        out.push_back(error_at(cmd, offset, std::string("unexpected token: ") + e.what()));
        return out;
    }

    const auto toks = lean::tokenize(cmd);
    for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
        const bool universe = toks[i].is_op("*") && i > 0 && (toks[i - 1].is("Type") || toks[i - 1].is("Sort"));
        if (!universe && infix(toks[i]) && (infix(toks[i + 1]) || toks[i + 1].kind == lean::TokenKind::close)) {
            out.push_back(error_at(cmd, toks[i + 1].begin, "unexpected token '" + std::string(toks[i + 1].text) +
                                                                "'; expected term"));
            return out;
        }
    }
    for (const auto& t : toks) {
        if (t.kind == lean::TokenKind::identifier && t.text.starts_with("unknown_")) {
            out.push_back(error_at(cmd, t.begin, "unknown identifier '" + std::string(t.text) + "'"));
        }
    }

    auto report = lean::lint(cmd);
    for (const auto& f : report.findings) {
        if (f.rule_id == "nat_division") continue;  // elaborates; the bug is semantic
        if (f.severity == FindingSeverity::fixable) out.push_back(error_at(cmd, f.span.begin, lint_error_text(f, cmd)));
        if (f.rule_id == "all_solutions") {
            out.push_back(error_at(cmd, parsed.map.goal.begin, "unexpected token ','; expected ':='"));
        }
    }

    const auto& th = parsed.theorem;
    if (th.terminator == lean::Terminator::missing) {
        out.push_back(error_at(cmd, cmd.size(), "unexpected end of input; expected ':='"));
        return out;
    }
    if (th.terminator == lean::Terminator::sorry || th.proof_text.find("sorry") != std::string::npos) {
        out.push_back({MessageSeverity::warning, std::string(kSorryWarning), position_of(cmd, parsed.map.declaration.begin)});
        return out;
    }
    for (const auto& t : lean::tokenize(th.proof_text)) {
        if (t.kind == lean::TokenKind::identifier && t.text.starts_with("bogus")) {
            out.push_back(error_at(cmd, parsed.map.proof->begin, "unknown tactic '" + std::string(t.text) + "'"));
            break;
        }
    }
    return out;
}

Json simulate_response(std::string_view cmd, int env) {
    Json j;
    j["env"] = env;
    auto messages = simulate_elaboration(cmd);
    if (!messages.empty()) {
        Json arr = Json::array();
        Json sorries = Json::array();
        for (const auto& m : messages) {
            Json mj;
            mj["severity"] = std::string(forge::to_string(m.severity));
            mj["pos"] = {{"line", m.pos.line}, {"column", m.pos.column}};
            mj["endPos"] = nullptr;
            mj["data"] = m.text;
            arr.push_back(std::move(mj));
            if (is_sorry_warning(m)) {
                sorries.push_back({{"pos", {{"line", m.pos.line}, {"column", m.pos.column}}}, {"goal", "⊢ ?"}});
            }
        }
        j["messages"] = std::move(arr);
        if (!sorries.empty()) j["sorries"] = std::move(sorries);
    }
    return j;
}

}  // namespace forge::repl
