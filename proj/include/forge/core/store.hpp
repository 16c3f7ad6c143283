#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "forge/core/journal.hpp"
#include "forge/core/metrics.hpp"

namespace forge {

inline constexpr int kStoreFormatVersion = 1;

/// Aggregated verdict row: `count` candidates sharing one compile kind, NLI
/// judgement, and tag set. Lets a round be summarized without one journal line
/// per candidate.
struct VerdictTallyRow {
    CompileKind compile = CompileKind::error;
    Judgement nli = Judgement::unjudged;
    std::vector<std::string> tags;
    std::int64_t count = 0;
};

/// On-disk layout:
///   store.json                      format marker
///   problems.jsonl                  extracted problems
///   extractions.jsonl               raw extraction reply per post (problem_id = source)
///   rounds/<N>/candidates.jsonl     post-fix candidates, one per sample
///   rounds/<N>/raw.jsonl            pre-fix model output
///   rounds/<N>/labels.jsonl         reviewer verdicts
///   rounds/<N>/manifest.json        derived round summary
///   rounds/<N>/review_batch.json    derived review queue
///   rounds/<N>/verdict_table.jsonl  optional aggregated verdicts
///   rounds/<N>/accuracy.jsonl       optional per-tag sampled accuracy rows
/// A writer holds .lock for its lifetime; readers take no lock.
class Store {
public:
    static Store open(const std::filesystem::path& root, OpenMode mode, bool sync = true);

    Store(Store&&) noexcept;
    Store& operator=(Store&&) noexcept;
    ~Store();

    const std::filesystem::path& root() const noexcept { return root_; }
    OpenMode mode() const noexcept { return mode_; }

    Journal<Problem>& problems();
    Journal<RawTranslation>& extractions();
    Journal<TranslationCandidate>& candidates(int round);
    Journal<RawTranslation>& raw(int round);
    Journal<LabelRecord>& labels(int round);

    std::filesystem::path round_dir(int round) const;
    std::vector<int> rounds() const;
    bool has_round(int round) const;

    std::optional<RoundManifest> manifest(int round) const;
    void write_manifest(const RoundManifest& m);

    /// Journaled candidates with the latest label per candidate applied.
    std::vector<TranslationCandidate> load_round(int round);

    std::optional<std::vector<VerdictTallyRow>> verdict_table(int round) const;
    std::optional<std::vector<AccuracyRow>> accuracy_rows(int round) const;

    TagIndex tag_index();

    /// Drops cached journals so readers see appends made by another process.
    void reload();

private:
    Store(std::filesystem::path root, OpenMode mode, bool sync);

    struct RoundJournals;
    RoundJournals& round_state(int round);

    std::filesystem::path root_;
    OpenMode mode_;
    bool sync_;
    std::optional<FileLock> lock_;
    std::unique_ptr<Journal<Problem>> problems_;
    std::unique_ptr<Journal<RawTranslation>> extractions_;
    std::map<int, std::unique_ptr<RoundJournals>> rounds_;
};

/// Writes `content` to `path` via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

/// Reads a JSONL file of arbitrary objects (blank lines skipped).
std::vector<Json> read_jsonl(const std::filesystem::path& path);

}  // namespace forge
