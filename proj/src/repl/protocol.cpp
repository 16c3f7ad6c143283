#include "forge/repl/protocol.hpp"

#include <algorithm>

namespace forge::repl {

namespace {

Position pos_from(const Json& j) {
    Position p;
    if (j.is_object()) {
        p.line = j.value("line", 0);
        p.column = j.value("column", 0);
    }
    return p;
}

}  // namespace

Json make_request(std::string_view cmd, std::optional<int> env) {
    Json j;
    j["cmd"] = std::string(cmd);
    if (env) j["env"] = *env;
    return j;
}

ReplResponse parse_response(const Json& j) {
    if (!j.is_object()) throw Error(ErrorCode::transport, "REPL response is not an object");
    ReplResponse r;
    if (j.contains("env") && j["env"].is_number_integer()) r.env = j["env"].get<int>();
    if (j.contains("message") && j["message"].is_string() && !j.contains("messages")) {
        r.messages.push_back({MessageSeverity::error, j["message"].get<std::string>(), {}});
    }
    if (j.contains("messages")) {
        for (const auto& m : j["messages"]) {
            CompileMessage cm;
            std::string sev = m.value("severity", "error");
            cm.severity = sev == "information" ? MessageSeverity::info : message_severity_from_string(sev);
            cm.text = m.value("data", "");
            if (m.contains("pos")) cm.pos = pos_from(m["pos"]);
            r.messages.push_back(std::move(cm));
        }
    }
    if (j.contains("sorries") && j["sorries"].is_array()) r.sorries = j["sorries"].size();
    return r;
}

bool is_sorry_warning(const CompileMessage& m) {
    return m.severity == MessageSeverity::warning && m.text.find(kSorryWarning) != std::string::npos;
}

CompileKind classify_response(const std::vector<CompileMessage>& messages, bool had_timeout, bool /*expects_proof*/) {
    if (had_timeout) return CompileKind::timeout;
    bool sorry = false;
    for (const auto& m : messages) {
        if (m.severity == MessageSeverity::error) return CompileKind::error;
    }
    for (const auto& m : messages) {
        if (m.severity != MessageSeverity::warning) continue;
        if (!is_sorry_warning(m)) return CompileKind::error;
        sorry = true;
    }
    return sorry ? CompileKind::statement_pass : CompileKind::proof_pass;
}

Json to_json(const ReplFixture& f) {
    Json j;
    j["name"] = f.name;
    j["request"] = f.request;
    j["expects_proof"] = f.expects_proof;
    j["had_timeout"] = f.had_timeout;
    j["response"] = f.response;
    j["expected"] = f.expected ? Json(std::string(forge::to_string(*f.expected))) : Json(nullptr);
    return j;
}

ReplFixture repl_fixture_from_json(const Json& j) {
    ReplFixture f;
    f.name = j.value("name", "");
    f.request = j.value("request", "");
    f.expects_proof = j.value("expects_proof", false);
    f.had_timeout = j.value("had_timeout", false);
    f.response = j.contains("response") ? j["response"] : Json(nullptr);
    if (j.contains("expected") && j["expected"].is_string()) {
        f.expected = compile_kind_from_string(j["expected"].get<std::string>());
    }
    return f;
}

CompileKind replay(const ReplFixture& f) {
    std::vector<CompileMessage> messages;
    if (!f.response.is_null()) messages = parse_response(f.response).messages;
    return classify_response(messages, f.had_timeout, f.expects_proof);
}

}  // namespace forge::repl
