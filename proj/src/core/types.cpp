#include "forge/core/types.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <numeric>
#include <utility>

#include "forge/core/errors.hpp"

namespace forge {

namespace {

template <typename E, std::size_t N>
E from_table(std::string_view s, const std::array<std::pair<E, std::string_view>, N>& table,
             std::string_view what) {
    for (const auto& [value, name] : table) {
        if (name == s) return value;
    }
    throw validation_error("unknown " + std::string(what) + " '" + std::string(s) + "'");
}

template <typename E, std::size_t N>
std::string_view to_table(E e, const std::array<std::pair<E, std::string_view>, N>& table) {
    for (const auto& [value, name] : table) {
        if (value == e) return name;
    }
    return "?";
}

constexpr std::array<std::pair<Judgement, std::string_view>, 4> kJudgement{{
    {Judgement::unjudged, "unjudged"},
    {Judgement::positive, "positive"},
    {Judgement::negative, "negative"},
    {Judgement::indeterminate, "indeterminate"},
}};

constexpr std::array<std::pair<HumanVerdict, std::string_view>, 4> kHuman{{
    {HumanVerdict::unreviewed, "unreviewed"},
    {HumanVerdict::correct, "correct"},
    {HumanVerdict::modified, "modified"},
    {HumanVerdict::rejected, "rejected"},
}};

constexpr std::array<std::pair<CompileKind, std::string_view>, 5> kCompile{{
    {CompileKind::statement_pass, "statement_pass"},
    {CompileKind::proof_pass, "proof_pass"},
    {CompileKind::error, "error"},
    {CompileKind::timeout, "timeout"},
    {CompileKind::worker_crash, "worker_crash"},
}};

constexpr std::array<std::pair<MessageSeverity, std::string_view>, 3> kSeverity{{
    {MessageSeverity::error, "error"},
    {MessageSeverity::warning, "warning"},
    {MessageSeverity::info, "info"},
}};

constexpr std::array<std::pair<FindingSeverity, std::string_view>, 2> kFinding{{
    {FindingSeverity::fixable, "fixable"},
    {FindingSeverity::flag, "flag"},
}};

}  // namespace

std::string_view to_string(Judgement j) { return to_table(j, kJudgement); }
std::string_view to_string(HumanVerdict v) { return to_table(v, kHuman); }
std::string_view to_string(CompileKind k) { return to_table(k, kCompile); }
std::string_view to_string(MessageSeverity s) { return to_table(s, kSeverity); }
std::string_view to_string(FindingSeverity s) { return to_table(s, kFinding); }

Judgement judgement_from_string(std::string_view s) { return from_table(s, kJudgement, "judgement"); }
HumanVerdict human_verdict_from_string(std::string_view s) { return from_table(s, kHuman, "human verdict"); }
CompileKind compile_kind_from_string(std::string_view s) { return from_table(s, kCompile, "compile kind"); }
MessageSeverity message_severity_from_string(std::string_view s) {
    return from_table(s, kSeverity, "message severity");
}
FindingSeverity finding_severity_from_string(std::string_view s) {
    return from_table(s, kFinding, "finding severity");
}

std::size_t LintReport::fixable_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(findings.begin(), findings.end(), [](const Finding& f) {
        return f.severity == FindingSeverity::fixable;
    }));
}

bool LintReport::has_rule(std::string_view rule_id) const noexcept {
    return std::any_of(findings.begin(), findings.end(),
                       [&](const Finding& f) { return f.rule_id == rule_id; });
}

std::string CandidateKey::str() const {
    return problem_id + ":" + std::to_string(round) + ":" + std::to_string(sample_index);
}

std::optional<CandidateKey> CandidateKey::parse(std::string_view s) {
    auto last = s.rfind(':');
    if (last == std::string_view::npos || last == 0) return std::nullopt;
    auto mid = s.rfind(':', last - 1);
    if (mid == std::string_view::npos || mid == 0) return std::nullopt;
    auto to_int = [](std::string_view part, int& out) {
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
        return ec == std::errc{} && ptr == part.data() + part.size() && !part.empty();
    };
    CandidateKey key;
    key.problem_id = std::string(s.substr(0, mid));
    if (!to_int(s.substr(mid + 1, last - mid - 1), key.round)) return std::nullopt;
    if (!to_int(s.substr(last + 1), key.sample_index)) return std::nullopt;
    if (key.round < 0 || key.sample_index < 0) return std::nullopt;
    return key;
}

void SamplingConfig::validate() const {
    if (n_samples < 1) throw validation_error("n_samples must be >= 1");
    if (temperature < 0.0 || temperature > 2.0) throw validation_error("temperature must be in [0, 2]");
    if (proof_k < 0) throw validation_error("proof_k must be >= 0");
    if (!(timeout_s > 0.0)) throw validation_error("timeout_s must be > 0");
}

void RoundManifest::validate() const {
    if (translated_count < 0 || cpn < 0 || npn < 0) throw validation_error("manifest counts must be non-negative");
    if (!(npn <= cpn && cpn <= translated_count)) {
        throw validation_error("manifest violates npn <= cpn <= translated_count",
                               {{"translated_count", translated_count}, {"cpn", cpn}, {"npn", npn}});
    }
    for (const auto& [tag, count] : per_tag_counts) {
        if (count < 0 || count > npn) {
            throw validation_error("per-tag count out of range for tag '" + tag + "'");
        }
    }
}

Fraction Fraction::reduced(std::int64_t num, std::int64_t den) {
    if (den <= 0) throw validation_error("fraction denominator must be positive");
    if (num < 0) throw validation_error("fraction numerator must be non-negative");
    auto g = std::gcd(num, den);
    if (g == 0) return {0, 1};
    return {num / g, den / g};
}

std::string PassAtK::display() const {
    // Tenths of a percent, rounded half-up: floor((2000*s + t) / (2t)).
    const std::int64_t tenths = (2000 * solved + total) / (2 * total);
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10) + "%";
}

std::string normalize_tag(std::string_view tag) {
    std::string out;
    bool pending_space = false;
    for (char c : tag) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back('_');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::validation: return "validation";
        case ErrorCode::parse: return "parse";
        case ErrorCode::extraction: return "extraction_failure";
        case ErrorCode::environment: return "environment";
        case ErrorCode::lock: return "lock";
        case ErrorCode::transport: return "transport";
        case ErrorCode::partial: return "partial_failure";
    }
    return "unknown";
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::validation:
        case ErrorCode::parse:
        case ErrorCode::extraction:
            return 1;
        case ErrorCode::environment:
        case ErrorCode::lock:
        case ErrorCode::transport:
            return 2;
        case ErrorCode::partial:
            return 3;
    }
    return 1;
}

Json Error::to_json() const {
    return {{"code", std::string(forge::to_string(code_))}, {"message", what()}, {"details", details_}};
}

}  // namespace forge
