#include "forge/lean/fingerprint.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>

#include "forge/core/errors.hpp"
#include "forge/lean/statement.hpp"
#include "forge/lean/tokenizer.hpp"

namespace forge::lean {

namespace {

constexpr char kSep = '\x1f';

void add(std::string& out, std::string_view tok) {
    out.append(tok);
    out.push_back(kSep);
}

void add_tokens(std::string& out, std::string_view text) {
    for (const auto& t : tokenize(text)) add(out, t.text);
}

}  // namespace

std::string sha256_hex(std::string_view data) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
        throw Error(ErrorCode::environment, "SHA-256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

Fingerprint canonical_fingerprint(std::string_view text) {
    ParsedTheorem th;
    try {
        th = parse_statement(text);
    } catch (const Error&) {
        std::string raw = "raw";
        raw.push_back(kSep);
        try {
            raw += collapse_whitespace(text);
        } catch (const Error&) {
            raw.append(text);  // unterminated comment or string: hash the bytes
        }
        return {sha256_hex(raw), true};
    }

    std::string canon;
    add(canon, "theorem");
    add(canon, "_");
    for (const auto& b : th.binders) {
        std::string_view open = b.kind == BinderKind::explicit_binder ? "("
                                : b.kind == BinderKind::implicit  ? "{"
                                : b.kind == BinderKind::strict_implicit ? "⦃"
                                                                        : "[";
        std::string_view close = closing_bracket(open);
        if (b.names.empty()) {
            add(canon, open);
            add_tokens(canon, b.type_text);
            add(canon, close);
            continue;
        }
        for (const auto& name : b.names) {
            add(canon, open);
            add(canon, name);
            if (!b.type_text.empty()) {
                add(canon, ":");
                add_tokens(canon, b.type_text);
            }
            add(canon, close);
        }
    }
    add(canon, ":");
    add_tokens(canon, th.goal_text);
    return {sha256_hex(canon), false};
}

}  // namespace forge::lean
