#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/core/types.hpp"

namespace forge::lean {

enum class BinderKind {
    explicit_binder,  // ( )
    implicit,         // { }
    strict_implicit,  // ⦃ ⦄
    instance,         // [ ]
};

enum class Terminator { sorry, proof_body, missing };

std::string_view to_string(BinderKind k);
std::string_view to_string(Terminator t);

struct Binder {
    std::vector<std::string> names;  // empty for an anonymous instance binder
    std::string type_text;           // whitespace-collapsed; empty for `(x)`
    BinderKind kind = BinderKind::explicit_binder;
    bool is_hypothesis = false;      // type reads as a proposition, e.g. `0 < a`

    friend bool operator==(const Binder&, const Binder&) = default;
};

/// Header of one `theorem`/`lemma` declaration.
struct ParsedTheorem {
    std::string keyword = "theorem";
    std::string name;
    std::vector<Binder> binders;
    std::string goal_text;
    Terminator terminator = Terminator::missing;
    std::string proof_text;                  // text after `:=`, collapsed; empty when missing
    std::optional<std::string> doc_comment;  // `/-- ... -/` directly before the keyword

    /// Indices into `binders` of the hypothesis binders.
    std::vector<std::size_t> hypotheses() const;

    friend bool operator==(const ParsedTheorem&, const ParsedTheorem&) = default;
};

/// Byte offsets of the parsed pieces inside the source text.
struct SourceMap {
    Span declaration;           // keyword through the end of the proof (or goal)
    Span name;
    std::vector<Span> binders;  // each group including its brackets
    Span goal;
    std::optional<Span> proof;  // text after `:=`
};

struct ParseResult {
    ParsedTheorem theorem;
    SourceMap map;
};

/// Throws Error{parse} with {offset, line, column} details on unbalanced
/// brackets, missing `:`, anything but comments before the keyword, or a
/// second declaration.
ParseResult parse_statement_detailed(std::string_view text);
ParsedTheorem parse_statement(std::string_view text);

/// Lean source for `t`, one line plus an optional doc comment line.
std::string serialize(const ParsedTheorem& t);

struct NamePolicy {
    std::optional<std::string> rename_to;  // nullopt keeps the parsed name

    static NamePolicy keep() { return {}; }
    static NamePolicy fixed(std::string name) { return {std::move(name)}; }
};

/// `lean_workbook_<id>` for sample 0, `lean_workbook_<id>_<k>` otherwise;
/// characters outside [A-Za-z0-9_] in the id become '_'.
std::string stable_theorem_name(std::string_view problem_id, int sample_index);

/// Forces `:= by sorry`, applies the name policy, drops comments, and
/// collapses whitespace runs to one space.
std::string normalize_statement(const ParsedTheorem& t, const NamePolicy& policy);

/// parse + normalize in one step.
std::string normalize_text(std::string_view text, const NamePolicy& policy);

/// Token texts of `text` with comments removed. Two texts that are equal
/// modulo whitespace produce the same sequence.
std::vector<std::string> token_texts(std::string_view text);

/// True if the text's first non-comment token is `theorem` or `lemma`.
bool looks_like_declaration(std::string_view text);

}  // namespace forge::lean
