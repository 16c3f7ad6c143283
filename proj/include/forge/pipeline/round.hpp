#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "forge/core/store.hpp"
#include "forge/pipeline/config.hpp"
#include "forge/pipeline/stages.hpp"
#include "forge/repl/checker.hpp"

namespace forge::pipeline {

struct FunnelRow {
    std::string stage;
    std::int64_t count = 0;
};

/// extracted, well_defined, tag_kept, translated, compiled, nli_passed.
struct FunnelReport {
    int round = 0;
    std::vector<FunnelRow> rows;

    std::int64_t count(std::string_view stage) const;

    /// extracted >= well_defined >= tag_kept >= compiled >= nli_passed.
    /// `translated` is left out: it scales with n_samples.
    bool monotone() const;

    std::string to_jsonl() const;
    std::string table() const;
};

FunnelReport compute_funnel(Store& store, const RoundManifest& manifest, const std::set<std::string>& allowlist);

struct RoundResult {
    RoundManifest manifest;
    FunnelReport funnel;
    std::vector<StageFailure> failures;
    std::int64_t new_candidates = 0;
    std::int64_t compile_jobs = 0;

    bool partial() const noexcept { return !failures.empty(); }
};

/// One active-learning round over the store's well-defined, allowlisted
/// problems: translate, normalize, lint, fix, compile, back-translate, NLI.
/// Raw samples and candidates are journaled as they finish; a rerun skips
/// journaled work, so a crashed round resumes to the same manifest.
/// Backend and pool failures are reported per item, not thrown.
/// Writes rounds/<N>/manifest.json, funnel.jsonl and, if partial, failures.json.
RoundResult run_round(Store& store, const RoundConfig& cfg, Gateways& gw, repl::StatementChecker& checker,
                      FaultInjector& fault, int parallelism = 4);

/// Recomputes the manifest from the journal (counts, tags, labels).
RoundManifest derive_manifest(Store& store, int round, const std::string& model_id, const std::string& config_digest,
                              std::uint64_t seed);

/// Manifest from rounds/<N>/verdict_table.jsonl, for rounds stored only as tallies.
std::optional<RoundManifest> manifest_from_verdict_table(const Store& store, int round);

/// The recorded manifest, else one derived from a verdict table, else from the journal.
RoundManifest current_manifest(Store& store, int round);

/// One row per round: round, model, translated, CPN, NPN.
std::string manifest_table(const std::vector<RoundManifest>& manifests);

}  // namespace forge::pipeline
