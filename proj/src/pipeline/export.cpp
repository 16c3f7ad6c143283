#include "forge/pipeline/export.hpp"

#include <set>
#include <sstream>

#include "forge/core/json_io.hpp"
#include "forge/lean/statement.hpp"
#include "forge/pipeline/stages.hpp"

namespace forge::pipeline {

std::map<std::string, Problem> problem_map(Store& store) {
    std::map<std::string, Problem> out;
    for (const auto& p : store.problems().records()) out.emplace(p.id, p);
    return out;
}

std::vector<TrainingPair> training_pairs(std::span<const TranslationCandidate> accepted,
                                         const std::map<std::string, Problem>& problems) {
    Json bad = Json::array();
    for (const auto& c : accepted) {
        if (c.human != HumanVerdict::correct && c.human != HumanVerdict::modified) bad.push_back(c.key().str());
    }
    if (!bad.empty()) {
        throw validation_error("export needs human-accepted candidates", {{"not_accepted", bad}});
    }
    std::vector<TrainingPair> out;
    for (const auto& c : accepted) {
        auto it = problems.find(c.problem_id);
        if (it == problems.end()) throw validation_error("candidate refers to unknown problem " + c.problem_id);
        const std::string nl = rephrase_answer(it->second).nl_text;
        const std::string statement = lean::normalize_text(
            c.accepted_text(), lean::NamePolicy::fixed(lean::stable_theorem_name(c.problem_id, c.sample_index)));
        out.push_back({"nl2fl", nl, statement});
        out.push_back({"fl2nl", statement, nl});
    }
    return out;
}

std::string encode_training_pairs(std::span<const TrainingPair> pairs) {
    std::string out = dump_line({{"format", kPairsFormat}, {"version", kPairsVersion}}) + "\n";
    for (const auto& p : pairs) {
        out += dump_line({{"prompt_id", p.prompt_id}, {"input", p.input}, {"target", p.target}}) + "\n";
    }
    return out;
}

std::vector<TrainingPair> decode_training_pairs(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    bool header = false;
    std::vector<TrainingPair> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded()) throw validation_error("training pairs: invalid JSON line");
        if (!header) {
            if (j.value("format", std::string()) != kPairsFormat || j.value("version", 0) != kPairsVersion) {
                throw validation_error("training pairs: missing or unsupported header");
            }
            header = true;
            continue;
        }
        out.push_back({j.at("prompt_id").get<std::string>(), j.at("input").get<std::string>(),
                       j.at("target").get<std::string>()});
    }
    if (!header) throw validation_error("training pairs: missing header");
    return out;
}

namespace {

std::vector<int> resolve_rounds(Store& store, std::span<const int> rounds) {
    if (!rounds.empty()) return {rounds.begin(), rounds.end()};
    return store.rounds();
}

}  // namespace

std::vector<TranslationCandidate> accepted_candidates(Store& store, std::span<const int> rounds) {
    std::vector<TranslationCandidate> out;
    for (int r : resolve_rounds(store, rounds)) {
        auto cs = store.load_round(r);
        std::sort(cs.begin(), cs.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
        for (auto& c : cs) {
            if (c.human == HumanVerdict::correct || c.human == HumanVerdict::modified) out.push_back(std::move(c));
        }
    }
    return out;
}

std::string export_dataset(Store& store, std::span<const int> rounds) {
    auto problems = problem_map(store);
    std::set<std::string> seen;
    std::string out;
    for (int r : resolve_rounds(store, rounds)) {
        auto cs = store.load_round(r);
        std::sort(cs.begin(), cs.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
        for (const auto& c : cs) {
            if (!c.nli_pass() || c.human == HumanVerdict::rejected) continue;
            if (!seen.insert(c.fingerprint).second) continue;
            Json j;
            j["problem_id"] = c.problem_id;
            j["round"] = c.round;
            j["sample_index"] = c.sample_index;
            auto it = problems.find(c.problem_id);
            if (it != problems.end()) {
                j["nl_text"] = rephrase_answer(it->second).nl_text;
                j["answer"] = it->second.answer ? Json(*it->second.answer) : Json(nullptr);
                j["tags"] = it->second.tags;
            } else {
                j["nl_text"] = nullptr;
                j["answer"] = nullptr;
                j["tags"] = Json::array();
            }
            j["formal_statement"] = c.accepted_text();
            j["fingerprint"] = c.fingerprint;
            j["human"] = std::string(to_string(c.human));
            out += dump_line(j) + "\n";
        }
    }
    return out;
}

}  // namespace forge::pipeline
