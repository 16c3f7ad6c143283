#include "forge/lean/tokenizer.hpp"

#include <algorithm>
#include <array>

namespace forge::lean {

namespace {

struct Decoded {
    char32_t cp;
    std::size_t len;
};

Decoded decode(std::string_view s, std::size_t i) {
    auto b = static_cast<unsigned char>(s[i]);
    auto cont = [&](std::size_t k) -> unsigned {
        if (i + k >= s.size()) return 0x100;
        auto c = static_cast<unsigned char>(s[i + k]);
        return (c & 0xC0) == 0x80 ? (c & 0x3F) : 0x100;
    };
    if (b < 0x80) return {b, 1};
    if ((b & 0xE0) == 0xC0) {
        unsigned c1 = cont(1);
        if (c1 < 0x100) return {static_cast<char32_t>(((b & 0x1F) << 6) | c1), 2};
    } else if ((b & 0xF0) == 0xE0) {
        unsigned c1 = cont(1), c2 = cont(2);
        if (c1 < 0x100 && c2 < 0x100) return {static_cast<char32_t>(((b & 0x0F) << 12) | (c1 << 6) | c2), 3};
    } else if ((b & 0xF8) == 0xF0) {
        unsigned c1 = cont(1), c2 = cont(2), c3 = cont(3);
        if (c1 < 0x100 && c2 < 0x100 && c3 < 0x100) {
            return {static_cast<char32_t>(((b & 0x07) << 18) | (c1 << 12) | (c2 << 6) | c3), 4};
        }
    }
    return {0xFFFD, 1};
}

bool is_ascii_letter(char32_t c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char32_t c) { return c >= '0' && c <= '9'; }

// Mirrors Lean 4's `isLetterLike`.
bool is_letter_like(char32_t c) {
    return (c >= 0x3b1 && c <= 0x3c9 && c != 0x3bb) ||                // lower greek except lambda
           (c >= 0x391 && c <= 0x3a9 && c != 0x3a0 && c != 0x3a3) ||  // upper greek except Pi, Sigma
           (c >= 0x3ca && c <= 0x3fb) ||                              // coptic
           (c >= 0x1f00 && c <= 0x1ffe) ||                            // polytonic greek
           (c >= 0x2100 && c <= 0x214f) ||                            // letterlike block (ℝ ℕ ℤ ℚ ℂ)
           (c >= 0x1d49c && c <= 0x1d59f);                            // script, double-struck, fraktur
}

bool is_subscript_alnum(char32_t c) {
    return (c >= 0x2080 && c <= 0x2089) || (c >= 0x2090 && c <= 0x209c) || (c >= 0x1d62 && c <= 0x1d6a);
}

bool is_id_first(char32_t c) { return is_ascii_letter(c) || c == '_' || is_letter_like(c); }

bool is_id_rest(char32_t c) {
    return is_id_first(c) || is_digit(c) || c == '\'' || c == '!' || c == '?' || is_subscript_alnum(c);
}

bool is_space(char32_t c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

constexpr std::array<std::pair<std::string_view, std::string_view>, 9> kBrackets{{
    {"(", ")"},
    {"[", "]"},
    {"{", "}"},
    {"⦃", "⦄"},
    {"⟨", "⟩"},
    {"⟦", "⟧"},
    {"⌊", "⌋"},
    {"⌈", "⌉"},
    {"⁅", "⁆"},
}};

// Longest first so maximal munch picks e.g. "<->" over "<-".
constexpr std::array<std::string_view, 22> kMultiOps{
    "<;>", "<->", ":=", ">=", "<=", "!=", "->", "<-", "=>", "<|", "|>", "++",
    "&&", "||", "==", "..", "::", "⁻¹", "×ˢ", "^^", "∃!", "⌋₊",
};

bool is_opener(std::string_view s) {
    return std::any_of(kBrackets.begin(), kBrackets.end(), [&](const auto& b) { return b.first == s; });
}

bool is_closer(std::string_view s) {
    return std::any_of(kBrackets.begin(), kBrackets.end(), [&](const auto& b) { return b.second == s; });
}

std::pair<int, int> line_col(std::string_view source, std::size_t offset) {
    int line = 1, col = 0;
    for (std::size_t i = 0; i < offset && i < source.size(); ++i) {
        if (source[i] == '\n') {
            ++line;
            col = 0;
        } else if ((static_cast<unsigned char>(source[i]) & 0xC0) != 0x80) {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

Error parse_error(std::string_view source, std::size_t offset, const std::string& message) {
    auto [line, col] = line_col(source, offset);
    return Error(ErrorCode::parse, message + " at line " + std::to_string(line) + ", column " + std::to_string(col),
                 {{"offset", offset}, {"line", line}, {"column", col}});
}

std::string_view closing_bracket(std::string_view open) {
    for (const auto& [o, c] : kBrackets) {
        if (o == open) return c;
    }
    return {};
}

std::vector<Token> tokenize(std::string_view src, bool keep_comments) {
    std::vector<Token> out;
    std::size_t i = 0;
    bool space = false;
    auto push = [&](TokenKind kind, std::size_t begin, std::size_t end) {
        out.push_back(Token{kind, src.substr(begin, end - begin), begin, end, space});
        space = false;
    };

    while (i < src.size()) {
        auto [c, len] = decode(src, i);

        if (is_space(c)) {
            space = true;
            i += len;
            continue;
        }

        // Line comment.
        if (src.compare(i, 2, "--") == 0) {
            std::size_t end = src.find('\n', i);
            if (end == std::string_view::npos) end = src.size();
            if (keep_comments) push(TokenKind::comment, i, end);
            space = true;
            i = end;
            continue;
        }

        // Block comment, nested.
        if (src.compare(i, 2, "/-") == 0) {
            std::size_t start = i;
            int depth = 0;
            while (i < src.size()) {
                if (src.compare(i, 2, "/-") == 0) {
                    ++depth;
                    i += 2;
                } else if (src.compare(i, 2, "-/") == 0) {
                    --depth;
                    i += 2;
                    if (depth == 0) break;
                } else {
                    ++i;
                }
            }
            if (depth != 0) throw parse_error(src, start, "unterminated block comment");
            if (keep_comments) push(TokenKind::comment, start, i);
            space = true;
            continue;
        }

        if (c == '"') {
            std::size_t start = i++;
            bool closed = false;
            while (i < src.size()) {
                if (src[i] == '\\') {
                    i += 2;
                    continue;
                }
                if (src[i] == '"') {
                    ++i;
                    closed = true;
                    break;
                }
                ++i;
            }
            if (!closed) throw parse_error(src, start, "unterminated string literal");
            push(TokenKind::string, start, std::min(i, src.size()));
            continue;
        }

        // Character literal 'x' (a quote after an identifier is part of the name).
        if (c == '\'' && i + 2 < src.size()) {
            auto [inner, ilen] = decode(src, i + 1);
            if (inner != '\\' && i + 1 + ilen < src.size() && src[i + 1 + ilen] == '\'') {
                push(TokenKind::string, i, i + 2 + ilen);
                i += 2 + ilen;
                continue;
            }
        }

        if (c == U'«') {
            std::size_t start = i;
            std::size_t close = src.find("»", i);
            if (close == std::string_view::npos) throw parse_error(src, start, "unterminated «identifier»");
            i = close + std::string_view("»").size();
            push(TokenKind::identifier, start, i);
            continue;
        }

        if (is_id_first(c)) {
            std::size_t start = i;
            i += len;
            for (;;) {
                while (i < src.size()) {
                    auto [d, dl] = decode(src, i);
                    if (!is_id_rest(d)) break;
                    i += dl;
                }
                // Dotted continuation: Nat.Prime, p.1, S.card.
                if (i + 1 < src.size() && src[i] == '.') {
                    auto [d, dl] = decode(src, i + 1);
                    if (is_id_first(d) || is_digit(d)) {
                        i += 1 + dl;
                        continue;
                    }
                }
                break;
            }
            push(TokenKind::identifier, start, i);
            continue;
        }

        if (is_digit(c)) {
            std::size_t start = i;
            if (src.compare(i, 2, "0x") == 0 || src.compare(i, 2, "0b") == 0) {
                i += 2;
                while (i < src.size() && std::isxdigit(static_cast<unsigned char>(src[i]))) ++i;
            } else {
                while (i < src.size() && is_digit(static_cast<unsigned char>(src[i]))) ++i;
                if (i + 1 < src.size() && src[i] == '.' && is_digit(static_cast<unsigned char>(src[i + 1]))) {
                    ++i;
                    while (i < src.size() && is_digit(static_cast<unsigned char>(src[i]))) ++i;
                }
            }
            push(TokenKind::number, start, i);
            continue;
        }

        std::string_view one = src.substr(i, len);
        if (is_opener(one)) {
            push(TokenKind::open, i, i + len);
            i += len;
            continue;
        }
        if (is_closer(one) && src.compare(i, std::string_view("⌋₊").size(), "⌋₊") != 0) {
            push(TokenKind::close, i, i + len);
            i += len;
            continue;
        }

        bool matched = false;
        for (auto op : kMultiOps) {
            if (src.compare(i, op.size(), op) == 0) {
                if (op == "⌋₊") {
                    push(TokenKind::close, i, i + op.size());
                } else {
                    push(TokenKind::op, i, i + op.size());
                }
                i += op.size();
                matched = true;
                break;
            }
        }
        if (matched) continue;

        push(TokenKind::op, i, i + len);
        i += len;
    }
    return out;
}

std::size_t matching_close(std::string_view source, const std::vector<Token>& tokens, std::size_t open_index) {
    std::vector<std::size_t> stack;
    for (std::size_t i = open_index; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        if (t.kind == TokenKind::open) {
            stack.push_back(i);
        } else if (t.kind == TokenKind::close) {
            if (stack.empty()) throw parse_error(source, t.begin, "unexpected '" + std::string(t.text) + "'");
            auto want = closing_bracket(tokens[stack.back()].text);
            bool ok = t.text == want || (t.text == "⌋₊" && want == "⌋");
            if (!ok) {
                throw parse_error(source, t.begin,
                                  "mismatched '" + std::string(t.text) + "', expected '" + std::string(want) + "'");
            }
            stack.pop_back();
            if (stack.empty()) return i;
        }
    }
    throw parse_error(source, tokens[open_index].begin, "unclosed '" + std::string(tokens[open_index].text) + "'");
}

void check_brackets(std::string_view source, const std::vector<Token>& tokens) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i].kind == TokenKind::open) {
            i = matching_close(source, tokens, i);
        } else if (tokens[i].kind == TokenKind::close) {
            throw parse_error(source, tokens[i].begin, "unexpected '" + std::string(tokens[i].text) + "'");
        }
    }
}

std::string join_tokens(const std::vector<Token>& tokens, std::size_t first, std::size_t last) {
    std::string out;
    for (std::size_t i = first; i < last; ++i) {
        if (tokens[i].kind == TokenKind::comment) continue;
        if (!out.empty() && tokens[i].space_before) out.push_back(' ');
        out.append(tokens[i].text);
    }
    return out;
}

std::string collapse_whitespace(std::string_view text) {
    auto toks = tokenize(text);
    return join_tokens(toks, 0, toks.size());
}

bool is_single_letter(std::string_view ident) {
    if (ident.empty()) return false;
    auto [c, len] = decode(ident, 0);
    if (len != ident.size()) return false;
    return is_ascii_letter(c) || (c >= 0x3b1 && c <= 0x3c9 && c != 0x3bb);
}

}  // namespace forge::lean
