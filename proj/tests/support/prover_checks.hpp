#pragma once

#include <cstdlib>
#include <memory>
#include <string>

#include "forge/core/store.hpp"
#include "forge/pipeline/config.hpp"
#include "forge/repl/checker.hpp"

namespace forge::test {

inline std::string env_or(const char* name, std::string fallback = "") {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

/// A worker pool over the REPL named by FORGE_REPL_CMD, or null when unset.
/// FORGE_REPL_VERSION_CMD and FORGE_ENV_TAG pin the toolchain if given.
inline std::unique_ptr<repl::StatementChecker> real_checker() {
    const auto cmd = env_or("FORGE_REPL_CMD");
    if (cmd.empty()) return nullptr;
    Json prover{{"kind", "repl"}, {"command", cmd}, {"workers", 2}, {"timeout_s", 300}, {"startup_timeout_s", 900}};
    if (auto v = env_or("FORGE_REPL_VERSION_CMD"); !v.empty()) prover["version_command"] = v;
    if (auto t = env_or("FORGE_ENV_TAG"); !t.empty()) prover["env_tag"] = t;
    return pipeline::make_checker(prover, std::filesystem::current_path(), 300);
}

struct Outcome {
    bool ok = true;
    std::string detail;
};

/// Every wrong form must fail and every modified form must elaborate.
inline Outcome patterns_through_prover(repl::StatementChecker& checker, const std::filesystem::path& patterns) {
    Outcome out;
    int good = 0, total = 0;
    for (const auto& p : read_jsonl(patterns)) {
        const auto name = p.at("pattern").get<std::string>();
        const auto wrong = checker.check_statement(p.at("wrong").get<std::string>());
        const auto modified = checker.check_statement(p.at("modified").get<std::string>());
        total += 2;
        if (!wrong.compiles()) ++good;
        else out.detail += " " + name + ":wrong-compiled";
        if (modified.compiles()) ++good;
        else out.detail += " " + name + ":modified-failed(" + std::string(to_string(modified.kind)) + ")";
    }
    out.ok = good == total && total == 20;
    out.detail = std::to_string(good) + "/" + std::to_string(total) + " prover checks as expected" + out.detail;
    return out;
}

inline Outcome imo_through_prover(repl::StatementChecker& checker, const std::filesystem::path& corpus) {
    for (const auto& row : read_jsonl(corpus)) {
        const auto text = row.at("text").get<std::string>();
        if (text.find("IMO1983_P5") == std::string::npos) continue;
        auto v = checker.check_statement(text);
        return {v.compiles(), "IMO1983_P5 " + std::string(to_string(v.kind))};
    }
    return {false, "IMO1983_P5 missing from the corpus"};
}

}  // namespace forge::test
