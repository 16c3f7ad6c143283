#include "forge/pipeline/search.hpp"

#include <algorithm>
#include <map>

#include "forge/core/json_io.hpp"
#include "forge/llm/operations.hpp"
#include "forge/llm/parsers.hpp"
#include "forge/pipeline/stages.hpp"

namespace forge::pipeline {

int ImoResult::survivors() const {
    return static_cast<int>(std::count_if(ranked.begin(), ranked.end(), [](const auto& c) { return c.survives(); }));
}

Json to_json(const ImoResult& r) {
    Json j;
    j["problem_id"] = r.problem_id;
    j["samples"] = r.samples;
    j["distinct"] = r.distinct;
    j["compiled"] = r.compiled;
    j["survivors"] = r.survivors();
    j["ranked"] = Json::array();
    for (const auto& c : r.ranked) {
        Json e;
        e["statement_text"] = c.statement_text;
        e["fingerprint"] = c.fingerprint;
        e["frequency"] = c.frequency;
        e["first_sample"] = c.first_sample;
        e["compile"] = to_json(c.compile);
        e["back_translation"] = c.back_translation ? Json(*c.back_translation) : Json(nullptr);
        e["nli"] = std::string(to_string(c.nli));
        e["survives"] = c.survives();
        j["ranked"].push_back(std::move(e));
    }
    return j;
}

ImoResult imo_mode(const Problem& original, int k, double temperature, llm::Gateway& translate,
                   llm::Gateway& back_translate, llm::Gateway& nli, repl::StatementChecker& checker) {
    if (k < 1) throw validation_error("k must be >= 1", {{"k", k}});
    const Problem problem = rephrase_answer(original);
    ImoResult result;
    result.problem_id = problem.id;
    auto samples = llm::translate(problem, k, temperature, translate);
    result.samples = static_cast<int>(samples.size());

    std::vector<ImoCandidate> distinct;
    std::map<std::string, std::size_t> index;
    for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
        auto prepared = prepare_statement(samples[static_cast<std::size_t>(i)], problem.id, 0, problem.nl_text);
        auto [it, fresh] = index.emplace(prepared.fingerprint, distinct.size());
        if (fresh) {
            ImoCandidate c;
            c.statement_text = prepared.text;
            c.fingerprint = prepared.fingerprint;
            c.first_sample = i;
            distinct.push_back(std::move(c));
        }
        ++distinct[it->second].frequency;
    }
    result.distinct = static_cast<int>(distinct.size());

    for (auto& c : distinct) {
        c.compile = checker.check_statement(c.statement_text);
        if (!c.compile.compiles()) continue;
        ++result.compiled;
        const std::vector<std::string> keys{problem.id + "@" + c.fingerprint.substr(0, 12), problem.id};
        c.back_translation = llm::back_translate(c.statement_text, keys, back_translate);
        c.nli = llm::judge_nli(problem.nl_text, *c.back_translation, keys, nli).value;
        result.ranked.push_back(c);
    }
    std::stable_sort(result.ranked.begin(), result.ranked.end(), [](const ImoCandidate& a, const ImoCandidate& b) {
        if (a.survives() != b.survives()) return a.survives();
        if (a.frequency != b.frequency) return a.frequency > b.frequency;
        return a.first_sample < b.first_sample;
    });
    return result;
}

Json to_json(const ProofSearchSummary& s) {
    Json j;
    j["solved"] = s.solved;
    j["winning_index"] = s.winning_index ? Json(*s.winning_index) : Json(nullptr);
    j["attempts"] = s.attempts;
    j["failures"] = Json::array();
    for (auto k : s.failures) j["failures"].push_back(std::string(to_string(k)));
    j["retryable"] = s.retryable;
    if (!s.error.empty()) j["error"] = s.error;
    return j;
}

ProofSearchSummary proof_search(std::string_view statement, int proof_k, double temperature,
                                const std::vector<std::string>& keys, llm::Gateway& prover,
                                repl::StatementChecker& checker) {
    ProofSearchSummary s;
    if (proof_k <= 0) return s;
    std::vector<std::string> proofs;
    try {
        proofs = llm::sample_proofs(statement, proof_k, temperature, keys, prover);
    } catch (const Error& e) {
        s.retryable = e.code() == ErrorCode::transport;
        s.error = e.what();
        return s;
    }
    for (int i = 0; i < proof_k && i < static_cast<int>(proofs.size()); ++i) {
        ++s.attempts;
        CompileVerdict v;
        try {
            v = checker.check_proof(statement, llm::strip_code_fence(proofs[static_cast<std::size_t>(i)]));
        } catch (const Error& e) {
            s.retryable = true;
            s.error = e.what();
            return s;
        }
        if (v.kind == CompileKind::proof_pass) {
            s.solved = true;
            s.winning_index = i + 1;
            return s;
        }
        s.failures.push_back(v.kind);
    }
    return s;
}

}  // namespace forge::pipeline
