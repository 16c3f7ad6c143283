#pragma once

// Wire format of the Lean REPL (leanprover-community/repl): one JSON request
// per command, answered by one JSON object terminated by a blank line.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/core/errors.hpp"
#include "forge/core/types.hpp"

namespace forge::repl {

/// Imported once per worker; every job runs in the resulting environment.
inline constexpr std::string_view kDefaultHeader =
    "import Mathlib\nimport Aesop\nset_option maxHeartbeats 400000\nopen BigOperators Real Nat Topology Rat";

inline constexpr std::string_view kSorryWarning = "declaration uses 'sorry'";

struct ReplResponse {
    std::optional<int> env;
    std::vector<CompileMessage> messages;
    std::size_t sorries = 0;
};

/// {"cmd": ..., "env": ...}; env omitted for the header command.
Json make_request(std::string_view cmd, std::optional<int> env);

/// Decodes a response object. A top-level {"message": ...} (REPL-level
/// failure such as an unknown env) becomes one error message.
ReplResponse parse_response(const Json& j);

bool is_sorry_warning(const CompileMessage& m);

/// Pure verdict rule:
///   timeout                          -> timeout
///   any error                        -> error
///   any warning other than the sorry -> error (statement_pass allows only it)
///   sorry warning present            -> statement_pass
///   nothing                          -> proof_pass
/// `expects_proof` does not change the mapping; it is recorded so callers can
/// tell a sorry-closed proof (statement_pass) from a real one.
CompileKind classify_response(const std::vector<CompileMessage>& messages, bool had_timeout, bool expects_proof);

/// One recorded exchange, as written by --record-fixtures.
struct ReplFixture {
    std::string name;
    std::string request;
    bool expects_proof = false;
    bool had_timeout = false;
    Json response;  // null when the job timed out
    std::optional<CompileKind> expected;
};

Json to_json(const ReplFixture& f);
ReplFixture repl_fixture_from_json(const Json& j);

/// Replays a fixture through parse_response + classify_response.
CompileKind replay(const ReplFixture& f);

}  // namespace forge::repl
