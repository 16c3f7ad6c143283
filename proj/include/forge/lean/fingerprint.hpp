#pragma once

#include <string>
#include <string_view>

namespace forge::lean {

struct Fingerprint {
    std::string digest;     // lowercase hex SHA-256
    bool from_raw = false;  // text did not parse; digest covers collapsed raw text
};

/// Hash of the canonical header token stream: the keyword is fixed to
/// `theorem`, the name becomes a placeholder, each binder group is split into
/// one group per name, and the proof is ignored. Invariant under renaming,
/// whitespace, comments and order-preserving re-bracketing of binders.
Fingerprint canonical_fingerprint(std::string_view text);

std::string sha256_hex(std::string_view data);

}  // namespace forge::lean
