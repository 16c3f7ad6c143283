#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "forge/core/store.hpp"
#include "forge/core/types.hpp"
#include "forge/pipeline/config.hpp"

namespace forge::pipeline {

/// Kept iff tags ∩ allowlist is non-empty.
std::vector<Problem> filter_by_tags(std::span<const Problem> problems, const std::set<std::string>& allowlist);
bool tag_kept(const Problem& p, const std::set<std::string>& allowlist);

/// Appends "Show that it is {answer}." once; problems without an answer pass through.
Problem rephrase_answer(Problem p);

/// Thrown by FaultInjector. Not an Error: nothing should catch it except a test
/// harness or the CLI, which exits as if killed.
struct SimulatedCrash : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Crashes the run on the Nth event of one stage. Stages: extract, problem,
/// raw, candidate, label, manifest.
class FaultInjector {
public:
    FaultInjector() = default;
    FaultInjector(std::string stage, int after) : stage_(std::move(stage)), after_(after) {}

    /// FORGE_FAULT=<stage>:<N>; unset means never.
    static FaultInjector from_env();

    void tick(std::string_view stage);
    bool armed() const noexcept { return after_ > 0; }

private:
    std::string stage_;
    int after_ = 0;
    int seen_ = 0;
};

/// What one Lean sample turns into before compile checking.
struct PreparedStatement {
    std::string text;         // normalized, fixes applied
    std::string pre_fix_text; // normalized, before fixes
    LintReport lint;          // findings left on `text`
    std::size_t fixes_applied = 0;
    std::string fingerprint;
    bool parsed = true;
};

/// Strips fences, normalizes with the stable theorem name, lints against the
/// problem text and applies fixable suggestions.
PreparedStatement prepare_statement(std::string_view raw, std::string_view problem_id, int sample_index,
                                    std::string_view nl_text);

struct StageFailure {
    std::string item;   // post source, problem id or candidate id
    std::string stage;
    std::string code;
    std::string message;
};

Json to_json(const StageFailure& f);

struct IngestReport {
    std::int64_t posts = 0;
    std::int64_t extracted = 0;
    std::int64_t well_defined = 0;
    std::vector<StageFailure> failures;
};

/// Reads `*.txt` / `*.md` posts (sorted by name), extracts problems and judges
/// well-definedness. Problem ids are `<file stem>_<index>`. Replies are
/// journaled before use, so a rerun after a crash skips finished work and
/// never re-asks the extractor for a journaled post.
IngestReport ingest(Store& store, const std::filesystem::path& posts_dir, Gateways& gw, FaultInjector& fault);

}  // namespace forge::pipeline
