// Statement checks against a real Lean REPL with Mathlib, named by FORGE_REPL_CMD.
// Exits 77 (skipped) when no REPL is configured.

#include <cstdio>

#include "prover_checks.hpp"

using namespace forge;

int main() {
    const auto data = std::filesystem::path(FORGE_SOURCE_DIR) / "data";
    std::unique_ptr<repl::StatementChecker> checker;
    try {
        checker = test::real_checker();
    } catch (const Error& e) {
        std::printf("FAIL prover startup: %s\n", e.what());
        return 1;
    }
    if (!checker) {
        std::printf("SKIP FORGE_REPL_CMD is not set\n");
        return 77;
    }
    std::printf("environment: %s\n", checker->env_tag().c_str());
    auto patterns = test::patterns_through_prover(*checker, data / "false_patterns" / "patterns.jsonl");
    std::printf("%s false patterns: %s\n", patterns.ok ? "PASS" : "FAIL", patterns.detail.c_str());
    auto imo = test::imo_through_prover(*checker, data / "corpus" / "statements.jsonl");
    std::printf("%s imo: %s\n", imo.ok ? "PASS" : "FAIL", imo.detail.c_str());
    return patterns.ok && imo.ok ? 0 : 1;
}
