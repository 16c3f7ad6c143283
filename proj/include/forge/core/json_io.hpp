#pragma once

// JSON encodings of the record schemas. Every encoder emits keys in schema
// order, so encode(decode(line)).dump() reproduces a line this code wrote.

#include <optional>
#include <string>

#include "forge/core/errors.hpp"
#include "forge/core/types.hpp"

namespace forge {

Json to_json(const CompileMessage& m);
Json to_json(const CompileVerdict& v);
Json to_json(const Finding& f);
Json to_json(const LintReport& r);
Json to_json(const Problem& p);
Json to_json(const TranslationCandidate& c);
Json to_json(const RoundManifest& m);
Json to_json(const SamplingConfig& s);
Json to_json(const RawTranslation& r);
Json to_json(const LabelRecord& l);

// Decoders throw Error{validation} naming the offending field.
CompileMessage compile_message_from_json(const Json& j);
CompileVerdict compile_verdict_from_json(const Json& j);
Finding finding_from_json(const Json& j);
LintReport lint_report_from_json(const Json& j);
Problem problem_from_json(const Json& j);
TranslationCandidate candidate_from_json(const Json& j);
RoundManifest manifest_from_json(const Json& j);
SamplingConfig sampling_config_from_json(const Json& j);
RawTranslation raw_translation_from_json(const Json& j);
LabelRecord label_from_json(const Json& j);

/// Codec hook used by the journal template.
template <typename T>
struct RecordCodec;

/// `key` returns the uniqueness key, or nullopt for records that may repeat.
template <>
struct RecordCodec<Problem> {
    static Json encode(const Problem& p) { return to_json(p); }
    static Problem decode(const Json& j) { return problem_from_json(j); }
    static std::optional<std::string> key(const Problem& p) { return p.id; }
};

template <>
struct RecordCodec<TranslationCandidate> {
    static Json encode(const TranslationCandidate& c) { return to_json(c); }
    static TranslationCandidate decode(const Json& j) { return candidate_from_json(j); }
    static std::optional<std::string> key(const TranslationCandidate& c) { return c.key().str(); }
};

template <>
struct RecordCodec<RawTranslation> {
    static Json encode(const RawTranslation& r) { return to_json(r); }
    static RawTranslation decode(const Json& j) { return raw_translation_from_json(j); }
    static std::optional<std::string> key(const RawTranslation& r) { return r.key().str(); }
};

template <>
struct RecordCodec<LabelRecord> {
    static Json encode(const LabelRecord& l) { return to_json(l); }
    static LabelRecord decode(const Json& j) { return label_from_json(j); }
    static std::optional<std::string> key(const LabelRecord&) { return std::nullopt; }
};

/// One compact JSON line, no trailing newline.
inline std::string dump_line(const Json& j) { return j.dump(-1, ' ', false, Json::error_handler_t::replace); }

}  // namespace forge
