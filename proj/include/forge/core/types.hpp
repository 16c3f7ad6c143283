#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace forge {

/// Tri-state judgement shared by well-definedness and NLI checks.
/// `unjudged` means the stage never ran for this item.
enum class Judgement { unjudged, positive, negative, indeterminate };

enum class HumanVerdict { unreviewed, correct, modified, rejected };

enum class CompileKind { statement_pass, proof_pass, error, timeout, worker_crash };

enum class MessageSeverity { error, warning, info };

enum class FindingSeverity { fixable, flag };

std::string_view to_string(Judgement j);
std::string_view to_string(HumanVerdict v);
std::string_view to_string(CompileKind k);
std::string_view to_string(MessageSeverity s);
std::string_view to_string(FindingSeverity s);

Judgement judgement_from_string(std::string_view s);
HumanVerdict human_verdict_from_string(std::string_view s);
CompileKind compile_kind_from_string(std::string_view s);
MessageSeverity message_severity_from_string(std::string_view s);
FindingSeverity finding_severity_from_string(std::string_view s);

struct Position {
    int line = 0;
    int column = 0;
    friend bool operator==(const Position&, const Position&) = default;
};

struct CompileMessage {
    MessageSeverity severity = MessageSeverity::info;
    std::string text;
    Position pos;
    friend bool operator==(const CompileMessage&, const CompileMessage&) = default;
};

struct CompileVerdict {
    CompileKind kind = CompileKind::error;
    std::vector<CompileMessage> messages;
    std::int64_t elapsed_ms = 0;
    std::string env_tag;

    /// True for both statement_pass and proof_pass: the declaration elaborated.
    bool compiles() const noexcept {
        return kind == CompileKind::statement_pass || kind == CompileKind::proof_pass;
    }
    friend bool operator==(const CompileVerdict&, const CompileVerdict&) = default;
};

/// Half-open byte range into the linted text.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const noexcept { return end - begin; }
    bool overlaps(const Span& o) const noexcept {
        if (size() == 0 || o.size() == 0) return false;
        return begin < o.end && o.begin < end;
    }
    friend bool operator==(const Span&, const Span&) = default;
};

struct Finding {
    std::string rule_id;
    Span span;
    FindingSeverity severity = FindingSeverity::flag;
    std::optional<std::string> suggestion;
    friend bool operator==(const Finding&, const Finding&) = default;
};

struct LintReport {
    std::vector<Finding> findings;

    std::size_t fixable_count() const noexcept;
    bool has_rule(std::string_view rule_id) const noexcept;
    friend bool operator==(const LintReport&, const LintReport&) = default;
};

struct Problem {
    std::string id;
    std::string source;
    std::string nl_text;
    std::optional<std::string> answer;
    std::vector<std::string> tags;
    Judgement well_defined = Judgement::unjudged;
    friend bool operator==(const Problem&, const Problem&) = default;
};

/// Identity of a candidate inside a store: one sample of one problem in one round.
struct CandidateKey {
    std::string problem_id;
    int round = 0;
    int sample_index = 0;

    /// "problem_id:round:sample_index"; parsed from the right so ids may contain ':'.
    std::string str() const;
    static std::optional<CandidateKey> parse(std::string_view s);

    friend auto operator<=>(const CandidateKey&, const CandidateKey&) = default;
};

struct TranslationCandidate {
    std::string problem_id;
    int round = 0;
    int sample_index = 0;
    std::string statement_text;
    LintReport lint;
    std::optional<CompileVerdict> compile;
    std::optional<std::string> back_translation;
    Judgement nli = Judgement::unjudged;
    HumanVerdict human = HumanVerdict::unreviewed;
    std::optional<std::string> modified_text;
    std::string fingerprint;

    CandidateKey key() const { return {problem_id, round, sample_index}; }
    bool compile_pass() const noexcept { return compile && compile->compiles(); }
    bool nli_pass() const noexcept { return compile_pass() && nli == Judgement::positive; }

    /// Text that goes into the training set: modified_text when a reviewer edited it.
    const std::string& accepted_text() const noexcept {
        return human == HumanVerdict::modified && modified_text ? *modified_text : statement_text;
    }
    friend bool operator==(const TranslationCandidate&, const TranslationCandidate&) = default;
};

struct SamplingConfig {
    int n_samples = 1;
    double temperature = 0.0;
    int proof_k = 0;
    double timeout_s = 60.0;

    void validate() const;
    friend bool operator==(const SamplingConfig&, const SamplingConfig&) = default;
};

struct RoundManifest {
    int round = 0;
    std::string model_id;
    std::int64_t translated_count = 0;
    std::int64_t cpn = 0;
    std::int64_t npn = 0;
    std::map<std::string, std::int64_t> per_tag_counts;
    std::int64_t human_labels_added = 0;
    std::string config_digest;
    std::uint64_t seed = 0;

    void validate() const;
    friend bool operator==(const RoundManifest&, const RoundManifest&) = default;
};

/// Exact non-negative rational in lowest terms.
struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Fraction reduced(std::int64_t num, std::int64_t den);
    double as_double() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Fraction&, const Fraction&) = default;
};

struct PassAtK {
    std::int64_t solved = 0;
    std::int64_t total = 0;
    int k = 0;
    Fraction rate;

    /// Percentage rounded half-up to one decimal, e.g. "8.6%".
    std::string display() const;
};

/// Untouched model output for one sample, journaled before lint/fix so the
/// pre-fix text survives next to the post-fix candidate.
struct RawTranslation {
    std::string problem_id;
    int round = 0;
    int sample_index = 0;
    std::string raw_text;

    CandidateKey key() const { return {problem_id, round, sample_index}; }
    friend bool operator==(const RawTranslation&, const RawTranslation&) = default;
};

/// One reviewer decision. Later records for the same candidate supersede earlier ones.
struct LabelRecord {
    std::string candidate_id;
    HumanVerdict verdict = HumanVerdict::unreviewed;
    std::optional<std::string> modified_text;
    std::optional<std::string> note;
    friend bool operator==(const LabelRecord&, const LabelRecord&) = default;
};

/// Lowercase, trim, and join internal whitespace runs with '_'.
std::string normalize_tag(std::string_view tag);

}  // namespace forge
