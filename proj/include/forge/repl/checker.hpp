#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "forge/core/types.hpp"
#include "forge/repl/pool.hpp"

namespace forge::repl {

/// What the pipeline and review server need from a prover.
class StatementChecker {
public:
    virtual ~StatementChecker() = default;
    virtual CompileVerdict check_statement(std::string_view statement_text) = 0;
    virtual CompileVerdict check_proof(std::string_view statement_text, std::string_view proof_text) = 0;

    /// Non-blocking variant for request handlers; nullopt means saturated.
    virtual std::optional<CompileVerdict> try_check_statement(std::string_view statement_text) {
        return check_statement(statement_text);
    }
    virtual std::string env_tag() const = 0;
};

class PoolChecker final : public StatementChecker {
public:
    explicit PoolChecker(PoolConfig config) : pool_(std::move(config)) {}

    CompileVerdict check_statement(std::string_view text) override { return pool_.check_statement(text); }
    CompileVerdict check_proof(std::string_view text, std::string_view proof) override {
        return pool_.check_proof(text, proof);
    }
    std::optional<CompileVerdict> try_check_statement(std::string_view text) override;
    std::string env_tag() const override { return pool_.env_tag(); }

    ReplPool& pool() noexcept { return pool_; }

private:
    ReplPool pool_;
};

/// Runs the simulator in-process. No subprocesses, no timeouts.
class SimulatedChecker final : public StatementChecker {
public:
    CompileVerdict check_statement(std::string_view text) override;
    CompileVerdict check_proof(std::string_view text, std::string_view proof) override;
    std::string env_tag() const override { return "simulated"; }

    std::uint64_t calls() const noexcept { return calls_; }

private:
    std::atomic<std::uint64_t> calls_{0};
};

/// Replaces the terminator of `statement_text` with `proof_text`.
std::string with_proof(std::string_view statement_text, std::string_view proof_text);

}  // namespace forge::repl
