#include "forge/lean/lint.hpp"

#include <algorithm>
#include <array>
#include <regex>
#include <tuple>

#include "forge/core/errors.hpp"
#include "forge/lean/statement.hpp"
#include "forge/lean/tokenizer.hpp"

namespace forge::lean {

namespace {

constexpr std::array<std::string_view, 9> kRelations{"<", ">", "≤", "≥", "<=", ">=", "=", "≠", "!="};

constexpr std::array<std::string_view, 17> kBoundaryOps{
    ",", ":", ":=", "∧", "∨", "→", "↔", "->", "<->", "=>", "¬", "∀", "∃", "∃!", "λ", "∑", "∏",
};

constexpr std::array<std::string_view, 8> kBoundaryWords{"fun", "if", "then", "else", "in", "let", "have", "by"};

constexpr std::array<std::string_view, 12> kExtremumIdents{
    "IsGreatest", "IsLeast", "sSup", "sInf", "iSup", "iInf", "IsLUB", "IsGLB", "IsMaxOn", "IsMinOn", "Maximal",
    "Minimal",
};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& set, std::string_view s) {
    return std::find(set.begin(), set.end(), s) != set.end();
}

bool is_relation(const Token& t) { return t.kind == TokenKind::op && contains(kRelations, t.text); }

const Finding* find_rule(const std::vector<Finding>& fs, std::string_view id) {
    for (const auto& f : fs) {
        if (f.rule_id == id) return &f;
    }
    return nullptr;
}

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (auto& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

bool nl_matches(const std::string& nl, const char* pattern) {
    return std::regex_search(nl, std::regex(pattern, std::regex::ECMAScript));
}

struct Relation {
    std::size_t token;                          // index of the relation token
    std::pair<std::size_t, std::size_t> left;   // token range of the left operand
    std::pair<std::size_t, std::size_t> right;  // token range of the right operand
};

class Linter {
public:
    Linter(std::string_view text, const std::vector<Token>& toks) : text_(text), toks_(toks) {
        match_.assign(toks_.size(), 0);
        std::vector<std::size_t> stack;
        for (std::size_t i = 0; i < toks_.size(); ++i) {
            if (toks_[i].kind == TokenKind::open) stack.push_back(i);
            if (toks_[i].kind == TokenKind::close && !stack.empty()) {
                match_[stack.back()] = i;
                stack.pop_back();
            }
        }
        for (const auto& t : toks_) {
            if (t.is("ℝ") || (t.kind == TokenKind::identifier && t.text.starts_with("Real."))) real_context_ = true;
        }
    }

    std::vector<Finding> run() {
        token_rules();
        scan_level(0, toks_.size(), "");
        return std::move(findings_);
    }

    const std::vector<Relation>& relations() const { return relations_; }

private:
    void add_fix(std::string rule, std::size_t begin, std::size_t end, std::string suggestion) {
        findings_.push_back({std::move(rule), {begin, end}, FindingSeverity::fixable, std::move(suggestion)});
    }

    void token_rules() {
        for (std::size_t i = 0; i < toks_.size(); ++i) {
            const Token& t = toks_[i];

            if (real_context_ && t.kind == TokenKind::identifier && t.is("sqrt")) {
                add_fix("namespace_qualification", t.begin, t.end, "Real.sqrt");
            }

            // 2a -> 2*a
            if (t.kind == TokenKind::number && i + 1 < toks_.size()) {
                const Token& n = toks_[i + 1];
                bool glued_to_previous = i > 0 && !t.space_before &&
                                         (toks_[i - 1].kind == TokenKind::identifier || toks_[i - 1].is_op("."));
                if (n.kind == TokenKind::identifier && !n.space_before && is_single_letter(n.text) &&
                    !glued_to_previous) {
                    add_fix("missing_operator", t.begin, n.end, std::string(t.text) + "*" + std::string(n.text));
                }
            }

            // x ^ (1/3) -> x ^ ((1:ℝ)/3)
            if (real_context_ && t.is_op("^") && i + 5 < toks_.size() && toks_[i + 1].is("(") &&
                toks_[i + 2].kind == TokenKind::number && toks_[i + 3].is_op("/") &&
                toks_[i + 4].kind == TokenKind::number && toks_[i + 5].is(")")) {
                const Token& num = toks_[i + 2];
                add_fix("nat_division", num.begin, num.end, "(" + std::string(num.text) + ":ℝ)");
            }
        }
    }

    bool is_boundary(const Token& t, std::string_view opener, bool& bar_used) const {
        if (t.kind == TokenKind::op && contains(kBoundaryOps, t.text)) return true;
        if (t.kind == TokenKind::identifier && contains(kBoundaryWords, t.text)) return true;
        if (t.is_op(";")) return true;
        // `{x | ...}`: the first bar at the braces' level separates binder from body.
        if (t.is_op("|") && opener == "{" && !bar_used) {
            bar_used = true;
            return true;
        }
        return false;
    }

    void scan_level(std::size_t first, std::size_t last, std::string_view opener) {
        for (std::size_t k = first; k < last; ++k) {
            if (toks_[k].kind == TokenKind::open) {
                scan_level(k + 1, match_[k], toks_[k].text);
                k = match_[k];
            }
        }

        std::vector<std::pair<std::size_t, std::size_t>> items;
        std::optional<std::size_t> before;
        bool bar_used = false;
        for (std::size_t k = first; k < last; ++k) {
            const Token& t = toks_[k];
            if (is_boundary(t, opener, bar_used)) {
                finish_segment(items, before, k);
                items.clear();
                before = k;
                continue;
            }
            std::size_t end = t.kind == TokenKind::open ? match_[k] + 1 : k + 1;
            items.emplace_back(k, end);
            k = end - 1;
        }
        finish_segment(items, before, std::nullopt);
    }

    void finish_segment(const std::vector<std::pair<std::size_t, std::size_t>>& items,
                        std::optional<std::size_t> before, std::optional<std::size_t> after) {
        if (items.empty()) return;
        std::vector<std::size_t> rel_items;
        for (std::size_t n = 0; n < items.size(); ++n) {
            if (items[n].second == items[n].first + 1 && is_relation(toks_[items[n].first])) rel_items.push_back(n);
        }
        if (rel_items.empty()) return;

        // Operand token ranges between relations.
        std::vector<std::pair<std::size_t, std::size_t>> operands;
        std::size_t prev = 0;
        for (std::size_t r : rel_items) {
            operands.emplace_back(prev < r ? items[prev].first : 0, prev < r ? items[r - 1].second : 0);
            prev = r + 1;
        }
        operands.emplace_back(prev < items.size() ? items[prev].first : 0,
                              prev < items.size() ? items.back().second : 0);
        bool complete = std::all_of(operands.begin(), operands.end(), [](auto& o) { return o.second > o.first; });

        for (std::size_t r = 0; r < rel_items.size(); ++r) {
            relations_.push_back({items[rel_items[r]].first, operands[r], operands[r + 1]});
        }

        if (rel_items.size() < 2 || !complete) return;
        // `∀ x < y < z, ...` is a binder predicate, not a chain we can split.
        if (before && after && toks_[*after].is_op(",") &&
            (toks_[*before].is_op("∀") || toks_[*before].is_op("∃") || toks_[*before].is_op("∃!"))) {
            return;
        }

        std::vector<std::string> ops;
        for (const auto& o : operands) ops.push_back(fold(toks_[o.first].begin, toks_[o.second - 1].end));
        std::string suggestion;
        for (std::size_t r = 0; r < rel_items.size(); ++r) {
            if (r) suggestion += " ∧ ";
            suggestion += ops[r];
            suggestion += ' ';
            suggestion += toks_[items[rel_items[r]].first].text;
            suggestion += ' ';
            suggestion += ops[r + 1];
        }
        if (before && toks_[*before].is_op("¬")) suggestion = "(" + suggestion + ")";

        std::size_t begin = toks_[items.front().first].begin;
        std::size_t end = toks_[items.back().second - 1].end;
        // Fixes still inside the chain now live in the suggestion.
        std::erase_if(findings_, [&](const Finding& f) {
            return f.severity == FindingSeverity::fixable && f.span.begin >= begin && f.span.end <= end;
        });
        add_fix("chained_inequality", begin, end, std::move(suggestion));
    }

    // Source slice [begin, end) with every fixable finding inside it applied.
    std::string fold(std::size_t begin, std::size_t end) const {
        std::vector<const Finding*> inner;
        for (const auto& f : findings_) {
            if (f.severity == FindingSeverity::fixable && f.span.begin >= begin && f.span.end <= end) {
                inner.push_back(&f);
            }
        }
        std::sort(inner.begin(), inner.end(), [](auto* a, auto* b) { return a->span.begin > b->span.begin; });
        std::string out(text_.substr(begin, end - begin));
        for (const auto* f : inner) {
            out.replace(f->span.begin - begin, f->span.size(), f->suggestion.value_or(""));
        }
        return out;
    }

    std::string_view text_;
    const std::vector<Token>& toks_;
    std::vector<std::size_t> match_;
    bool real_context_ = false;
    std::vector<Finding> findings_;
    std::vector<Relation> relations_;
};

bool range_has(const std::vector<Token>& toks, std::pair<std::size_t, std::size_t> r, std::string_view text) {
    for (std::size_t i = r.first; i < r.second; ++i) {
        if (toks[i].is(text)) return true;
    }
    return false;
}

bool any_ident_contains(const std::vector<Token>& toks, std::string_view needle) {
    return std::any_of(toks.begin(), toks.end(), [&](const Token& t) {
        return t.kind == TokenKind::identifier && t.text.find(needle) != std::string_view::npos;
    });
}

bool any_token(const std::vector<Token>& toks, std::string_view text) {
    return std::any_of(toks.begin(), toks.end(), [&](const Token& t) { return t.is(text); });
}

// `(x,y)=(1,5),(2,3)`: a tuple equated to a comma-separated list of tuples.
bool has_tuple_list(const std::vector<Token>& toks) {
    for (std::size_t i = 1; i + 1 < toks.size(); ++i) {
        if (!toks[i].is_op("=") || !toks[i - 1].is(")") || !toks[i + 1].is("(")) continue;
        int depth = 0;
        for (std::size_t k = i + 1; k < toks.size(); ++k) {
            if (toks[k].kind == TokenKind::open) ++depth;
            if (toks[k].kind == TokenKind::close && --depth == 0) {
                if (k + 2 < toks.size() && toks[k + 1].is_op(",") && toks[k + 2].is("(")) return true;
                break;
            }
        }
    }
    return false;
}

void flag_rules(std::vector<Finding>& out, const std::vector<Token>& toks, const std::vector<Token>& body,
                const std::vector<Token>& goal,
                const std::vector<Relation>& relations, Span decl, std::optional<std::string_view> nl_text) {
    auto flag = [&](std::string rule) { out.push_back({std::move(rule), decl, FindingSeverity::flag, std::nullopt}); };

    if (has_tuple_list(toks)) flag("all_solutions");
    if (!nl_text) return;
    const std::string nl = lower_ascii(*nl_text);

    if (nl_matches(nl, "triangle")) {
        int sides = 0;
        for (const auto& r : relations) {
            const Token& t = toks[r.token];
            if (!(t.is_op(">") || t.is_op("<"))) continue;
            bool l = range_has(toks, r.left, "+");
            bool rr = range_has(toks, r.right, "+");
            if (l != rr) ++sides;
        }
        if (sides < 3) flag("triangle_condition");
    }

    if (nl_matches(nl, "\\b(maximum|minimum|maximal|minimal|maximi[sz]e|minimi[sz]e|greatest|largest|smallest|"
                       "max|min)\\b|\\bleast (possible )?value|\\bthe least\\b")) {
        bool witnessed = std::any_of(kExtremumIdents.begin(), kExtremumIdents.end(),
                                     [&](std::string_view id) { return any_ident_contains(body, id); });
        if (!witnessed && !any_token(goal, "∃")) flag("missing_extremum_witness");
    }

    if (!find_rule(out, "all_solutions") &&
        nl_matches(nl, "\\b(find|determine) all\\b|\\ball (the )?solutions\\b|\\ball (ordered )?(pairs|triples)\\b")) {
        if (!any_token(goal, "↔") && !any_token(goal, "∨") && !any_token(goal, "<->") && !any_token(goal, "{")) {
            flag("all_solutions");
        }
    }

    if (nl_matches(nl, "\\bhow many\\b|\\bnumber of (ordered |distinct |positive |real |integer )*"
                       "(solutions|pairs|triples|integers|roots|ways|values)\\b|\\bsum of all\\b")) {
        if (!any_ident_contains(body, "card") && !any_token(body, "∑") && !any_ident_contains(body, "Finset.sum")) {
            flag("solution_count");
        }
    }

    if (nl_matches(nl, "\\binfinitely many\\b|\\binfinite (number|set)\\b")) {
        bool witnessed = any_ident_contains(body, "Infinite") || any_ident_contains(body, "infinite");
        if (!witnessed) {
            auto forall = std::find_if(goal.begin(), goal.end(), [](const Token& t) { return t.is_op("∀"); });
            witnessed = forall != goal.end() &&
                        std::any_of(forall, goal.end(), [](const Token& t) { return t.is_op("∃"); });
        }
        if (!witnessed) flag("infinitude");
    }

    if (nl_matches(nl, "\\bdigits?\\b") && !any_ident_contains(body, "digits")) flag("digits");
}

}  // namespace

const std::vector<LintRule>& lint_rules() {
    static const std::vector<LintRule> rules{
        {"namespace_qualification", FindingSeverity::fixable, "unqualified sqrt over reals; use Real.sqrt"},
        {"chained_inequality", FindingSeverity::fixable, "a >= b >= c is not a conjunction in Lean"},
        {"missing_operator", FindingSeverity::fixable, "implicit multiplication such as 2a"},
        {"nat_division", FindingSeverity::fixable, "literal division in an exponent truncates over ℕ"},
        {"triangle_condition", FindingSeverity::flag, "triangle sides without the three triangle inequalities"},
        {"all_solutions", FindingSeverity::flag, "solution set not stated as an equivalence or disjunction"},
        {"solution_count", FindingSeverity::flag, "count or sum of solutions without a cardinality"},
        {"missing_extremum_witness", FindingSeverity::flag, "extremum stated as a one-sided bound"},
        {"infinitude", FindingSeverity::flag, "infinitely many without Infinite or an unbounded witness"},
        {"digits", FindingSeverity::flag, "digit condition without Nat.digits"},
        {"parse_failure", FindingSeverity::flag, "text could not be parsed"},
    };
    return rules;
}

LintReport lint(std::string_view text, std::optional<std::string_view> nl_text) {
    LintReport report;
    auto failure = [&] {
        report.findings = {{"parse_failure", {0, text.size()}, FindingSeverity::flag, std::nullopt}};
        return report;
    };

    std::vector<Token> toks;
    Span decl;
    std::vector<Token> goal;
    Span name{0, 0};
    try {
        toks = tokenize(text);
        if (looks_like_declaration(text)) {
            auto parsed = parse_statement_detailed(text);
            decl = parsed.map.declaration;
            name = parsed.map.name;
            goal = tokenize(text.substr(0, parsed.map.goal.end));
            std::erase_if(goal, [&](const Token& t) { return t.begin < parsed.map.goal.begin; });
        } else {
            check_brackets(text, toks);
            if (toks.empty()) return report;
            decl = {toks.front().begin, toks.back().end};
            goal = toks;
        }
    } catch (const Error&) {
        return failure();
    }

    Linter linter(text, toks);
    report.findings = linter.run();
    // the theorem name says nothing about the statement (`theorem digits ...`)
    std::vector<Token> body = toks;
    std::erase_if(body, [&](const Token& t) { return t.begin >= name.begin && t.end <= name.end && name.end > name.begin; });
    flag_rules(report.findings, toks, body, goal, linter.relations(), decl, nl_text);
    std::sort(report.findings.begin(), report.findings.end(), [](const Finding& a, const Finding& b) {
        return std::tie(a.span.begin, a.rule_id) < std::tie(b.span.begin, b.rule_id);
    });
    return report;
}

std::string apply_fixes(std::string_view text, const LintReport& report) {
    std::vector<const Finding*> fixes;
    for (const auto& f : report.findings) {
        if (f.severity != FindingSeverity::fixable || !f.suggestion) continue;
        if (f.span.end > text.size() || f.span.begin > f.span.end) {
            throw validation_error("finding span outside the text",
                                   {{"rule_id", f.rule_id}, {"span", {f.span.begin, f.span.end}}});
        }
        fixes.push_back(&f);
    }
    std::sort(fixes.begin(), fixes.end(), [](auto* a, auto* b) { return a->span.begin > b->span.begin; });
    for (std::size_t i = 1; i < fixes.size(); ++i) {
        if (fixes[i]->span.end > fixes[i - 1]->span.begin) {
            throw validation_error("overlapping fixable findings",
                                   {{"first", fixes[i]->rule_id}, {"second", fixes[i - 1]->rule_id}});
        }
    }
    std::string out(text);
    for (const auto* f : fixes) out.replace(f->span.begin, f->span.size(), *f->suggestion);
    return out;
}

}  // namespace forge::lean
