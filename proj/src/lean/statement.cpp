#include "forge/lean/statement.hpp"

#include <algorithm>
#include <array>

#include "forge/lean/tokenizer.hpp"

namespace forge::lean {

namespace {

constexpr std::array<std::string_view, 12> kDeclKeywords{
    "theorem", "lemma", "def", "example", "instance", "axiom", "abbrev", "structure", "inductive", "class",
    "noncomputable", "opaque",
};

constexpr std::array<std::string_view, 22> kPropOps{
    "=", "≠", "<", ">", "≤", "≥", "∣", "∧", "∨", "↔", "¬", "∈", "∉", "⊆", "⊂", "≡", "∀", "∃", "<=", ">=", "!=", "∃!",
};

// Heads that build types rather than propositions.
constexpr std::array<std::string_view, 20> kTypeHeads{
    "Set", "Finset", "List", "Multiset", "Fin", "ZMod", "Matrix", "Polynomial", "Option", "Array",
    "Vector", "Sym2", "Type", "Sort", "Prop", "Function", "Equiv.Perm", "Submodule", "Subgroup", "Ideal",
};

bool is_decl_keyword(std::string_view s) {
    return std::find(kDeclKeywords.begin(), kDeclKeywords.end(), s) != kDeclKeywords.end();
}

bool looks_like_prop(std::string_view type_text) {
    auto toks = tokenize(type_text);
    if (toks.empty()) return false;
    for (const auto& t : toks) {
        if (t.kind == TokenKind::op &&
            std::find(kPropOps.begin(), kPropOps.end(), t.text) != kPropOps.end()) {
            return true;
        }
    }
    const auto& head = toks.front();
    if (head.kind != TokenKind::identifier) return false;
    if (head.text == "True" || head.text == "False") return true;
    if (std::find(kTypeHeads.begin(), kTypeHeads.end(), head.text) != kTypeHeads.end()) return false;
    auto dot = head.text.rfind('.');
    std::string_view last = dot == std::string_view::npos ? head.text : head.text.substr(dot + 1);
    if (last.empty() || !(last.front() >= 'A' && last.front() <= 'Z')) return false;
    // `Nat.Prime p`, `IsCompact D`, `p.Prime`
    return toks.size() > 1 || dot != std::string_view::npos;
}

BinderKind kind_for(std::string_view open) {
    if (open == "(") return BinderKind::explicit_binder;
    if (open == "{") return BinderKind::implicit;
    if (open == "⦃") return BinderKind::strict_implicit;
    return BinderKind::instance;
}

std::pair<std::string_view, std::string_view> brackets_for(BinderKind k) {
    switch (k) {
        case BinderKind::explicit_binder: return {"(", ")"};
        case BinderKind::implicit: return {"{", "}"};
        case BinderKind::strict_implicit: return {"⦃", "⦄"};
        case BinderKind::instance: return {"[", "]"};
    }
    return {"(", ")"};
}

std::size_t skip_comments(const std::vector<Token>& toks, std::size_t i) {
    while (i < toks.size() && toks[i].kind == TokenKind::comment) ++i;
    return i;
}

bool is_name_like(const Token& t) { return t.kind == TokenKind::identifier || t.is_op("_"); }

}  // namespace

std::string_view to_string(BinderKind k) {
    switch (k) {
        case BinderKind::explicit_binder: return "explicit";
        case BinderKind::implicit: return "implicit";
        case BinderKind::strict_implicit: return "strict_implicit";
        case BinderKind::instance: return "instance";
    }
    return "explicit";
}

std::string_view to_string(Terminator t) {
    switch (t) {
        case Terminator::sorry: return "sorry";
        case Terminator::proof_body: return "proof_body";
        case Terminator::missing: return "missing";
    }
    return "missing";
}

std::vector<std::size_t> ParsedTheorem::hypotheses() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < binders.size(); ++i) {
        if (binders[i].is_hypothesis) out.push_back(i);
    }
    return out;
}

ParseResult parse_statement_detailed(std::string_view text) {
    const auto toks = tokenize(text, /*keep_comments=*/true);
    check_brackets(text, toks);

    ParseResult res;
    auto& th = res.theorem;
    auto& map = res.map;

    std::size_t i = 0;
    for (; i < toks.size() && toks[i].kind == TokenKind::comment; ++i) {
        if (toks[i].text.starts_with("/--")) {
            th.doc_comment = std::string(toks[i].text);
        } else {
            th.doc_comment.reset();
        }
    }
    if (i == toks.size()) throw parse_error(text, text.size(), "no declaration found");
    const Token& kw = toks[i];
    if (!(kw.is("theorem") || kw.is("lemma")) || kw.kind != TokenKind::identifier) {
        throw parse_error(text, kw.begin, "expected 'theorem' or 'lemma', found '" + std::string(kw.text) + "'");
    }
    th.keyword = std::string(kw.text);
    map.declaration.begin = kw.begin;

    for (std::size_t k = i + 1; k < toks.size(); ++k) {
        if (toks[k].kind == TokenKind::identifier && is_decl_keyword(toks[k].text)) {
            throw parse_error(text, toks[k].begin, "multiple declarations");
        }
    }

    i = skip_comments(toks, i + 1);
    if (i == toks.size() || toks[i].kind != TokenKind::identifier) {
        throw parse_error(text, i < toks.size() ? toks[i].begin : text.size(), "expected theorem name");
    }
    th.name = std::string(toks[i].text);
    map.name = {toks[i].begin, toks[i].end};

    i = skip_comments(toks, i + 1);
    while (i < toks.size() && toks[i].kind == TokenKind::open) {
        const Token& open = toks[i];
        if (!(open.is("(") || open.is("{") || open.is("⦃") || open.is("["))) {
            throw parse_error(text, open.begin, "unexpected '" + std::string(open.text) + "' in binders");
        }
        std::size_t close = matching_close(text, toks, i);
        Binder b;
        b.kind = kind_for(open.text);

        std::vector<std::size_t> inner;
        for (std::size_t k = i + 1; k < close; ++k) {
            if (toks[k].kind != TokenKind::comment) inner.push_back(k);
        }
        // First ':' at the group's own nesting level.
        std::optional<std::size_t> colon;
        int depth = 0;
        for (std::size_t n = 0; n < inner.size(); ++n) {
            const Token& t = toks[inner[n]];
            if (t.kind == TokenKind::open) ++depth;
            if (t.kind == TokenKind::close) --depth;
            if (depth == 0 && t.is_op(":")) {
                colon = n;
                break;
            }
        }

        auto join_inner = [&](std::size_t from, std::size_t to) {
            if (from >= to) return std::string();
            return join_tokens(toks, inner[from], inner[to - 1] + 1);
        };

        if (b.kind == BinderKind::instance && !colon) {
            b.type_text = join_inner(0, inner.size());
        } else {
            std::size_t names_end = colon ? *colon : inner.size();
            for (std::size_t n = 0; n < names_end; ++n) {
                const Token& t = toks[inner[n]];
                if (!is_name_like(t)) {
                    throw parse_error(text, t.begin, "expected binder name, found '" + std::string(t.text) + "'");
                }
                b.names.emplace_back(t.text);
            }
            if (b.names.empty()) throw parse_error(text, open.begin, "binder without names");
            if (colon) b.type_text = join_inner(*colon + 1, inner.size());
            if (colon && b.type_text.empty()) throw parse_error(text, open.begin, "binder without type");
        }
        if (b.type_text.empty() && b.kind == BinderKind::instance) {
            throw parse_error(text, open.begin, "empty instance binder");
        }
        b.is_hypothesis = b.kind != BinderKind::instance && looks_like_prop(b.type_text);
        map.binders.push_back({open.begin, toks[close].end});
        th.binders.push_back(std::move(b));
        i = skip_comments(toks, close + 1);
    }

    if (i == toks.size() || !toks[i].is_op(":")) {
        throw parse_error(text, i < toks.size() ? toks[i].begin : text.size(), "expected ':' before the goal");
    }
    ++i;

    std::size_t goal_first = skip_comments(toks, i);
    std::size_t goal_end = goal_first;
    int depth = 0;
    std::optional<std::size_t> assign;
    for (std::size_t k = goal_first; k < toks.size(); ++k) {
        const Token& t = toks[k];
        if (t.kind == TokenKind::open) ++depth;
        if (t.kind == TokenKind::close) --depth;
        if (depth == 0 && t.is_op(":=")) {
            assign = k;
            break;
        }
        goal_end = k + 1;
    }
    while (goal_end > goal_first && toks[goal_end - 1].kind == TokenKind::comment) --goal_end;
    if (goal_end <= goal_first) {
        throw parse_error(text, goal_first < toks.size() ? toks[goal_first].begin : text.size(), "empty goal");
    }
    th.goal_text = join_tokens(toks, goal_first, goal_end);
    map.goal = {toks[goal_first].begin, toks[goal_end - 1].end};
    map.declaration.end = map.goal.end;

    if (!assign) {
        th.terminator = Terminator::missing;
        return res;
    }
    std::size_t proof_first = skip_comments(toks, *assign + 1);
    std::size_t proof_end = toks.size();
    while (proof_end > proof_first && toks[proof_end - 1].kind == TokenKind::comment) --proof_end;
    if (proof_end <= proof_first) throw parse_error(text, toks[*assign].end, "empty proof after ':='");
    th.proof_text = join_tokens(toks, proof_first, proof_end);
    map.proof = Span{toks[proof_first].begin, toks[proof_end - 1].end};
    map.declaration.end = map.proof->end;
    th.terminator = (th.proof_text == "sorry" || th.proof_text == "by sorry") ? Terminator::sorry
                                                                               : Terminator::proof_body;
    return res;
}

ParsedTheorem parse_statement(std::string_view text) { return parse_statement_detailed(text).theorem; }

std::string serialize(const ParsedTheorem& t) {
    std::string out;
    if (t.doc_comment) {
        out += *t.doc_comment;
        out += '\n';
    }
    out += t.keyword;
    out += ' ';
    out += t.name;
    for (const auto& b : t.binders) {
        auto [open, close] = brackets_for(b.kind);
        out += ' ';
        out += open;
        for (std::size_t n = 0; n < b.names.size(); ++n) {
            if (n) out += ' ';
            out += b.names[n];
        }
        if (!b.type_text.empty()) {
            if (!b.names.empty()) out += " : ";
            out += b.type_text;
        }
        out += close;
    }
    out += " : ";
    out += t.goal_text;
    if (t.terminator != Terminator::missing) {
        out += " := ";
        out += t.proof_text.empty() ? std::string("by sorry") : t.proof_text;
    }
    return out;
}

std::string stable_theorem_name(std::string_view problem_id, int sample_index) {
    std::string id;
    for (char c : problem_id) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
        id.push_back(ok ? c : '_');
    }
    std::string out = "lean_workbook_" + id;
    if (sample_index > 0) out += "_" + std::to_string(sample_index);
    return out;
}

std::string normalize_statement(const ParsedTheorem& t, const NamePolicy& policy) {
    ParsedTheorem n = t;
    if (policy.rename_to) n.name = *policy.rename_to;
    n.terminator = Terminator::sorry;
    n.proof_text = "by sorry";
    n.doc_comment.reset();
    return serialize(n);
}

std::string normalize_text(std::string_view text, const NamePolicy& policy) {
    return normalize_statement(parse_statement(text), policy);
}

std::vector<std::string> token_texts(std::string_view text) {
    std::vector<std::string> out;
    for (const auto& t : tokenize(text)) out.emplace_back(t.text);
    return out;
}

bool looks_like_declaration(std::string_view text) {
    try {
        auto toks = tokenize(text);
        return !toks.empty() && toks.front().kind == TokenKind::identifier &&
               (toks.front().is("theorem") || toks.front().is("lemma"));
    } catch (const Error&) {
        return false;
    }
}

}  // namespace forge::lean
