#pragma once

// A stand-in for Lean elaboration used by the fake REPL binary and the
// in-process mock checker. It knows the header grammar, the compile-breaking
// lint patterns, and the sorry convention; it is not a type checker.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/core/errors.hpp"
#include "forge/core/types.hpp"

namespace forge::repl {

/// Test hooks embedded in a command as `fake:<name>[=<value>]`.
struct SimDirectives {
    int sleep_ms = 0;
    bool crash = false;  // exit without answering
    bool hang = false;   // never answer
    std::optional<std::string> error;
    std::optional<std::string> warning;
};

SimDirectives parse_directives(std::string_view cmd);

/// Diagnostics the simulator reports for one declaration:
///   - tokenizer, bracket and header parse failures are errors;
///   - identifiers starting with `unknown_` are unknown identifiers;
///   - unqualified `sqrt` over ℝ, chained relations, `2a`, and
///     `(x,y)=(1,5),(2,3)` are errors (they fail in Lean too);
///   - a sorry proof gives the sorry warning; a proof naming a `bogus`
///     tactic is an error; any other proof passes.
std::vector<CompileMessage> simulate_elaboration(std::string_view cmd);

/// Full REPL response object for a job command.
Json simulate_response(std::string_view cmd, int env);

}  // namespace forge::repl
