#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "forge/core/errors.hpp"

namespace forge::lean {

enum class TokenKind {
    identifier,
    number,
    string,
    open,     // ( [ { ⦃ ⟨ ⟦ ⌊ ⌈
    close,    // matching closers
    op,       // operators and punctuation, including ':' ':=' ','
    comment,  // only when tokenize(..., keep_comments=true)
};

struct Token {
    TokenKind kind;
    std::string_view text;
    std::size_t begin = 0;
    std::size_t end = 0;
    bool space_before = false;  // whitespace or a comment separates it from the previous token

    bool is(std::string_view s) const noexcept { return text == s; }
    bool is_op(std::string_view s) const noexcept { return kind == TokenKind::op && text == s; }
};

/// Error{parse} with details {offset, line, column}.
Error parse_error(std::string_view source, std::size_t offset, const std::string& message);

/// Header-level Lean 4 tokenizer. Tokens view into `source`, which must
/// outlive them. Throws parse_error on unterminated strings or comments.
std::vector<Token> tokenize(std::string_view source, bool keep_comments = false);

/// The bracket that closes `open`, or empty when `open` is not an opener.
std::string_view closing_bracket(std::string_view open);

/// Index of the token closing the bracket at `open_index`; throws on mismatch.
std::size_t matching_close(std::string_view source, const std::vector<Token>& tokens, std::size_t open_index);

/// Verifies bracket nesting over the whole stream.
void check_brackets(std::string_view source, const std::vector<Token>& tokens);

/// Joins tokens[first, last) with one space wherever the source had any
/// whitespace or comment, and none elsewhere.
std::string join_tokens(const std::vector<Token>& tokens, std::size_t first, std::size_t last);

/// Whitespace-canonical form of a text fragment: join_tokens over all of it.
std::string collapse_whitespace(std::string_view text);

/// True for a single ASCII or Greek letter, the shape of a math variable.
bool is_single_letter(std::string_view ident);

}  // namespace forge::lean
