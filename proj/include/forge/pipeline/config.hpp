#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <set>
#include <string>

#include "forge/core/errors.hpp"
#include "forge/core/types.hpp"
#include "forge/llm/backend.hpp"
#include "forge/repl/checker.hpp"

namespace forge::pipeline {

std::set<std::string> default_allowlist();

/// Round config file, version 1:
/// {
///   "version": 1, "round": 1, "model_id": "...", "store": "store",
///   "seed": 7, "allowlist": [...],
///   "sampling": {"n_samples", "temperature", "proof_k", "timeout_s"},
///   "gateway": {"max_concurrency", "retries", "backoff_ms"},
///   "backends": {"extract": B, "well_defined": B, "translate": B,
///                "back_translate": B, "nli": B, "prove": B},
///   "prover": {"kind": "simulated"} | {"kind": "repl", "command", ...}
/// }
/// A stage missing from "backends" falls back to "default".
struct RoundConfig {
    int version = 1;
    int round = 1;
    std::string model_id;
    std::filesystem::path store;
    std::uint64_t seed = 0;
    std::set<std::string> allowlist = default_allowlist();
    SamplingConfig sampling;
    llm::GatewayOptions gateway;
    Json backends = Json::object();
    Json prover = {{"kind", "simulated"}};
    std::filesystem::path base_dir;  // relative paths resolve here
    Json source = Json::object();    // the parsed file, for the digest

    static RoundConfig from_json(const Json& j, const std::filesystem::path& base_dir);
    static RoundConfig load(const std::filesystem::path& file);

    /// sha256 over the config (minus paths) and the prompt registry.
    std::string digest() const;
    void validate() const;
};

/// One gateway per stage; stages sharing a backend spec share a gateway.
struct Gateways {
    std::shared_ptr<llm::Gateway> extract, well_defined, translate, back_translate, nli, prove;
};

Gateways make_gateways(const RoundConfig& cfg, bool trace = false);

/// "simulated" runs the in-process simulator; "repl" starts a worker pool:
/// {"kind": "repl", "command": "lake env repl" | [...], "version_command": ...,
///  "env_tag": ..., "workers", "timeout_s", "proof_timeout_s",
///  "max_jobs_per_worker", "queue_capacity", "header", "record_dir"}
std::unique_ptr<repl::StatementChecker> make_checker(const Json& prover, const std::filesystem::path& base_dir,
                                                     double default_timeout_s);

repl::PoolConfig pool_config_from_json(const Json& prover, const std::filesystem::path& base_dir);

}  // namespace forge::pipeline
