#pragma once

// Meaning-preserving perturbations of a Lean statement for fingerprint tests.

#include <random>
#include <string>
#include <string_view>

#include "forge/lean/statement.hpp"
#include "forge/lean/tokenizer.hpp"

namespace forge::test {

inline std::string random_whitespace(std::mt19937_64& rng) {
    static constexpr std::string_view kPieces[] = {" ", "  ", "\n", "\n    ", "\t", " -- note\n", " /- c -/ "};
    std::string out;
    const int n = 1 + static_cast<int>(rng() % 2);
    for (int i = 0; i < n; ++i) out += kPieces[rng() % std::size(kPieces)];
    return out;
}

/// Renames the declaration and rewrites every gap between tokens: existing
/// whitespace runs get new random runs, and bracket-adjacent gaps sometimes
/// gain one.
inline std::string fuzz_statement(std::string_view text, std::mt19937_64& rng) {
    auto parsed = lean::parse_statement_detailed(text);
    const auto toks = lean::tokenize(text);
    const auto name = parsed.map.name;
    std::string out;
    std::size_t prev_end = 0;
    const lean::Token* prev = nullptr;
    for (const auto& t : toks) {
        std::string_view gap = text.substr(prev_end, t.begin - prev_end);
        if (prev == nullptr) {
            out += gap;
        } else if (!gap.empty()) {
            out += random_whitespace(rng);
        } else if ((prev->kind == lean::TokenKind::open || t.kind == lean::TokenKind::close) && rng() % 2) {
            out += ' ';
        }
        if (t.begin == name.begin) {
            out += "renamed_" + std::to_string(rng() % 100000);
        } else {
            out += t.text;
        }
        prev_end = t.end;
        prev = &t;
    }
    out += text.substr(prev_end);
    return out;
}

}  // namespace forge::test
