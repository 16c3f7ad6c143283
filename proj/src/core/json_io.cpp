#include "forge/core/json_io.hpp"

#include <algorithm>
#include <cctype>

namespace forge {

namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object()) throw validation_error("expected a JSON object");
    auto it = j.find(key);
    if (it == j.end()) throw validation_error(std::string("missing field '") + key + "'", {{"field", key}});
    return *it;
}

template <typename T>
T get_as(const Json& j, const char* key) {
    const Json& v = field(j, key);
    try {
        return v.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw validation_error(std::string("field '") + key + "' has the wrong type", {{"field", key}});
    }
}

std::optional<std::string> optional_string(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw validation_error(std::string("field '") + key + "' must be a string or null");
    return it->get<std::string>();
}

bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

Json to_json(const CompileMessage& m) {
    Json j;
    j["severity"] = to_string(m.severity);
    j["text"] = m.text;
    j["line"] = m.pos.line;
    j["column"] = m.pos.column;
    return j;
}

Json to_json(const CompileVerdict& v) {
    Json j;
    j["kind"] = to_string(v.kind);
    Json msgs = Json::array();
    for (const auto& m : v.messages) msgs.push_back(to_json(m));
    j["messages"] = std::move(msgs);
    j["elapsed_ms"] = v.elapsed_ms;
    j["env_tag"] = v.env_tag;
    return j;
}

Json to_json(const Finding& f) {
    Json j;
    j["rule_id"] = f.rule_id;
    j["span"] = Json::array({f.span.begin, f.span.end});
    j["severity"] = to_string(f.severity);
    j["suggestion"] = f.suggestion ? Json(*f.suggestion) : Json(nullptr);
    return j;
}

Json to_json(const LintReport& r) {
    Json j = Json::array();
    for (const auto& f : r.findings) j.push_back(to_json(f));
    return j;
}

Json to_json(const Problem& p) {
    Json j;
    j["id"] = p.id;
    j["source"] = p.source;
    j["nl_text"] = p.nl_text;
    j["answer"] = p.answer.value_or("");
    j["tags"] = p.tags;
    j["well_defined"] = to_string(p.well_defined);
    return j;
}

Json to_json(const TranslationCandidate& c) {
    Json j;
    j["problem_id"] = c.problem_id;
    j["round"] = c.round;
    j["sample_index"] = c.sample_index;
    j["statement_text"] = c.statement_text;
    j["lint"] = to_json(c.lint);
    j["compile"] = c.compile ? to_json(*c.compile) : Json(nullptr);
    j["back_translation"] = c.back_translation ? Json(*c.back_translation) : Json(nullptr);
    j["nli"] = to_string(c.nli);
    j["human"] = to_string(c.human);
    j["modified_text"] = c.modified_text ? Json(*c.modified_text) : Json(nullptr);
    j["fingerprint"] = c.fingerprint;
    return j;
}

Json to_json(const RoundManifest& m) {
    Json j;
    j["round"] = m.round;
    j["model_id"] = m.model_id;
    j["translated_count"] = m.translated_count;
    j["cpn"] = m.cpn;
    j["npn"] = m.npn;
    Json tags = Json::object();
    for (const auto& [tag, count] : m.per_tag_counts) tags[tag] = count;
    j["per_tag_counts"] = std::move(tags);
    j["human_labels_added"] = m.human_labels_added;
    j["config_digest"] = m.config_digest;
    j["seed"] = m.seed;
    return j;
}

Json to_json(const SamplingConfig& s) {
    Json j;
    j["n_samples"] = s.n_samples;
    j["temperature"] = s.temperature;
    j["proof_k"] = s.proof_k;
    j["timeout_s"] = s.timeout_s;
    return j;
}

Json to_json(const RawTranslation& r) {
    Json j;
    j["problem_id"] = r.problem_id;
    j["round"] = r.round;
    j["sample_index"] = r.sample_index;
    j["raw_text"] = r.raw_text;
    return j;
}

Json to_json(const LabelRecord& l) {
    Json j;
    j["candidate_id"] = l.candidate_id;
    j["verdict"] = to_string(l.verdict);
    j["modified_text"] = l.modified_text ? Json(*l.modified_text) : Json(nullptr);
    j["note"] = l.note ? Json(*l.note) : Json(nullptr);
    return j;
}

CompileMessage compile_message_from_json(const Json& j) {
    CompileMessage m;
    m.severity = message_severity_from_string(get_as<std::string>(j, "severity"));
    m.text = get_as<std::string>(j, "text");
    m.pos.line = get_as<int>(j, "line");
    m.pos.column = get_as<int>(j, "column");
    return m;
}

CompileVerdict compile_verdict_from_json(const Json& j) {
    CompileVerdict v;
    v.kind = compile_kind_from_string(get_as<std::string>(j, "kind"));
    const Json& msgs = field(j, "messages");
    if (!msgs.is_array()) throw validation_error("field 'messages' must be an array");
    for (const auto& m : msgs) v.messages.push_back(compile_message_from_json(m));
    v.elapsed_ms = get_as<std::int64_t>(j, "elapsed_ms");
    v.env_tag = get_as<std::string>(j, "env_tag");
    return v;
}

Finding finding_from_json(const Json& j) {
    Finding f;
    f.rule_id = get_as<std::string>(j, "rule_id");
    const Json& span = field(j, "span");
    if (!span.is_array() || span.size() != 2) throw validation_error("field 'span' must be [start, end]");
    f.span = {span[0].get<std::size_t>(), span[1].get<std::size_t>()};
    if (f.span.end < f.span.begin) throw validation_error("span end precedes start");
    f.severity = finding_severity_from_string(get_as<std::string>(j, "severity"));
    f.suggestion = optional_string(j, "suggestion");
    return f;
}

LintReport lint_report_from_json(const Json& j) {
    if (!j.is_array()) throw validation_error("lint report must be an array");
    LintReport r;
    for (const auto& f : j) r.findings.push_back(finding_from_json(f));
    return r;
}

Problem problem_from_json(const Json& j) {
    Problem p;
    p.id = get_as<std::string>(j, "id");
    if (p.id.empty()) throw validation_error("problem id must be non-empty");
    p.source = get_as<std::string>(j, "source");
    p.nl_text = get_as<std::string>(j, "nl_text");
    auto answer = optional_string(j, "answer");
    if (answer && !blank(*answer)) p.answer = std::move(answer);
    p.tags = get_as<std::vector<std::string>>(j, "tags");
    for (auto& t : p.tags) t = normalize_tag(t);
    p.well_defined = judgement_from_string(get_as<std::string>(j, "well_defined"));
    return p;
}

TranslationCandidate candidate_from_json(const Json& j) {
    TranslationCandidate c;
    c.problem_id = get_as<std::string>(j, "problem_id");
    c.round = get_as<int>(j, "round");
    c.sample_index = get_as<int>(j, "sample_index");
    if (c.round < 0 || c.sample_index < 0) throw validation_error("round and sample_index must be >= 0");
    c.statement_text = get_as<std::string>(j, "statement_text");
    c.lint = lint_report_from_json(field(j, "lint"));
    const Json& compile = field(j, "compile");
    if (!compile.is_null()) c.compile = compile_verdict_from_json(compile);
    c.back_translation = optional_string(j, "back_translation");
    c.nli = judgement_from_string(get_as<std::string>(j, "nli"));
    c.human = human_verdict_from_string(get_as<std::string>(j, "human"));
    c.modified_text = optional_string(j, "modified_text");
    c.fingerprint = get_as<std::string>(j, "fingerprint");
    if (c.nli == Judgement::positive && !c.compile_pass()) {
        throw validation_error("candidate has positive NLI without a compile pass", {{"key", c.key().str()}});
    }
    if (c.human == HumanVerdict::modified && (!c.modified_text || *c.modified_text == c.statement_text)) {
        throw validation_error("modified candidate needs a distinct modified_text", {{"key", c.key().str()}});
    }
    return c;
}

RoundManifest manifest_from_json(const Json& j) {
    RoundManifest m;
    m.round = get_as<int>(j, "round");
    m.model_id = get_as<std::string>(j, "model_id");
    m.translated_count = get_as<std::int64_t>(j, "translated_count");
    m.cpn = get_as<std::int64_t>(j, "cpn");
    m.npn = get_as<std::int64_t>(j, "npn");
    for (const auto& [tag, count] : field(j, "per_tag_counts").items()) {
        m.per_tag_counts[tag] = count.get<std::int64_t>();
    }
    m.human_labels_added = get_as<std::int64_t>(j, "human_labels_added");
    m.config_digest = get_as<std::string>(j, "config_digest");
    if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();
    m.validate();
    return m;
}

SamplingConfig sampling_config_from_json(const Json& j) {
    SamplingConfig s;
    if (j.contains("n_samples")) s.n_samples = j.at("n_samples").get<int>();
    if (j.contains("temperature")) s.temperature = j.at("temperature").get<double>();
    if (j.contains("proof_k")) s.proof_k = j.at("proof_k").get<int>();
    if (j.contains("timeout_s")) s.timeout_s = j.at("timeout_s").get<double>();
    s.validate();
    return s;
}

RawTranslation raw_translation_from_json(const Json& j) {
    RawTranslation r;
    r.problem_id = get_as<std::string>(j, "problem_id");
    r.round = get_as<int>(j, "round");
    r.sample_index = get_as<int>(j, "sample_index");
    r.raw_text = get_as<std::string>(j, "raw_text");
    return r;
}

LabelRecord label_from_json(const Json& j) {
    LabelRecord l;
    l.candidate_id = get_as<std::string>(j, "candidate_id");
    l.verdict = human_verdict_from_string(get_as<std::string>(j, "verdict"));
    if (l.verdict == HumanVerdict::unreviewed) throw validation_error("label verdict cannot be 'unreviewed'");
    l.modified_text = optional_string(j, "modified_text");
    l.note = optional_string(j, "note");
    if (l.verdict == HumanVerdict::modified && !l.modified_text) {
        throw validation_error("modified verdict requires modified_text", {{"field", "modified_text"}});
    }
    return l;
}

}  // namespace forge
