#include "forge/llm/parsers.hpp"

#include <algorithm>
#include <cctype>

namespace forge::llm {

namespace {

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// Removes commas that directly precede a closing bracket, outside strings.
std::string drop_trailing_commas(std::string_view s) {
    std::string out;
    bool in_str = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (in_str) {
            out += c;
            if (c == '\\' && i + 1 < s.size()) out += s[++i];
            else if (c == '"') in_str = false;
            continue;
        }
        if (c == '"') in_str = true;
        if (c == ',') {
            auto j = s.find_first_not_of(" \t\r\n", i + 1);
            if (j != std::string_view::npos && (s[j] == ']' || s[j] == '}')) continue;
        }
        out += c;
    }
    return out;
}

std::optional<Json> try_parse(std::string_view s) {
    Json j = Json::parse(s, nullptr, false);
    if (j.is_discarded()) j = Json::parse(drop_trailing_commas(s), nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    return j;
}

std::string scalar_text(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return {};
    return v.dump();
}

[[noreturn]] void fail(std::string_view raw, const std::string& why) {
    throw Error(ErrorCode::extraction, "extraction failed: " + why, {{"raw", std::string(raw)}});
}

}  // namespace

Judgement parse_bold_verdict(std::string_view text, std::string_view positive_marker,
                             std::string_view negative_marker) {
    if (positive_marker.empty() || negative_marker.empty() ||
        lower_ascii(positive_marker) == lower_ascii(negative_marker)) {
        throw validation_error("verdict markers must be distinct and non-empty");
    }
    const std::string hay = lower_ascii(text);
    auto last = [&](std::string_view marker) -> std::optional<std::size_t> {
        std::string needle = "**" + lower_ascii(marker) + "**";
        auto p = hay.rfind(needle);
        if (p == std::string::npos) return std::nullopt;
        return p;
    };
    auto pos = last(positive_marker);
    auto neg = last(negative_marker);
    if (!pos && !neg) return Judgement::indeterminate;
    if (pos && (!neg || *pos > *neg)) return Judgement::positive;
    return Judgement::negative;
}

std::string strip_code_fence(std::string_view text) {
    auto open = text.find("```");
    if (open == std::string_view::npos) return trim(text);
    auto body = text.find('\n', open);
    if (body == std::string_view::npos) return trim(text);
    auto close = text.find("```", body + 1);
    if (close == std::string_view::npos) return trim(text.substr(body + 1));
    return trim(text.substr(body + 1, close - body - 1));
}

std::vector<ProblemDraft> parse_extraction_json(std::string_view text) {
    std::string body = strip_code_fence(text);

    std::optional<Json> parsed;
    auto lb = body.find('[');
    auto rb = body.rfind(']');
    if (lb != std::string::npos && rb != std::string::npos && rb > lb) {
        parsed = try_parse(std::string_view(body).substr(lb, rb - lb + 1));
    }
    if (!parsed || !parsed->is_array()) {
        // a single object, or {"problems": [...]}
        auto lo = body.find('{');
        auto ro = body.rfind('}');
        if (lo != std::string::npos && ro != std::string::npos && ro > lo) {
            auto obj = try_parse(std::string_view(body).substr(lo, ro - lo + 1));
            if (obj && obj->is_object()) {
                if (obj->contains("problems") && (*obj)["problems"].is_array()) {
                    parsed = (*obj)["problems"];
                } else {
                    parsed = Json::array({*obj});
                }
            }
        }
    }
    if (!parsed || !parsed->is_array()) fail(text, "no JSON array found");

    std::vector<ProblemDraft> out;
    for (const auto& el : *parsed) {
        if (!el.is_object()) continue;
        ProblemDraft d;
        if (el.contains("problem")) d.problem = trim(scalar_text(el["problem"]));
        if (d.problem.empty()) continue;
        std::string answer = el.contains("answer") ? trim(scalar_text(el["answer"])) : std::string();
        if (!answer.empty()) d.answer = answer;
        if (el.contains("tags")) {
            const auto& t = el["tags"];
            if (t.is_array()) {
                for (const auto& x : t) {
                    auto n = normalize_tag(scalar_text(x));
                    if (!n.empty() && std::find(d.tags.begin(), d.tags.end(), n) == d.tags.end()) d.tags.push_back(n);
                }
            } else if (t.is_string()) {
                auto n = normalize_tag(t.get<std::string>());
                if (!n.empty()) d.tags.push_back(n);
            }
        }
        out.push_back(std::move(d));
    }
    return out;
}

}  // namespace forge::llm
