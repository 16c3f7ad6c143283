#include "forge/llm/operations.hpp"

#include "forge/llm/prompts.hpp"

namespace forge::llm {

namespace {

CompletionRequest request(std::string_view prompt_id, std::vector<std::string> keys,
                          std::map<std::string, std::string> vars, int n = 1, double temperature = 0.0) {
    CompletionRequest r;
    r.prompt_id = std::string(prompt_id);
    r.keys = std::move(keys);
    r.prompt = prompt(prompt_id).render(vars);
    r.vars = std::move(vars);
    r.n = n;
    r.temperature = temperature;
    return r;
}

TriVerdict judged(Gateway& gw, const CompletionRequest& req, std::string_view pos, std::string_view neg) {
    TriVerdict v;
    for (int attempt = 0; attempt < 2; ++attempt) {
        v.raw = gw.complete(req).front();
        v.value = parse_bold_verdict(v.raw, pos, neg);
        if (v.value != Judgement::indeterminate) break;
    }
    return v;
}

void require_text(std::string_view text, const char* what) {
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        throw validation_error(std::string(what) + " is empty");
    }
}

}  // namespace

std::string request_extraction(std::string_view post_text, std::string_view source, Gateway& gw) {
    require_text(post_text, "post text");
    auto req = request(kExtract, {std::string(source)}, {{"post", std::string(post_text)}});
    return gw.complete(req).front();
}

std::vector<ProblemDraft> extract_problems(std::string_view post_text, std::string_view source, Gateway& gw) {
    return parse_extraction_json(request_extraction(post_text, source, gw));
}

TriVerdict judge_well_defined(const Problem& problem, Gateway& gw) {
    require_text(problem.nl_text, "problem text");
    auto req = request(kWellDefined, {problem.id}, {{"problem", problem.nl_text}});
    return judged(gw, req, "well-defined", "ill-defined");
}

std::vector<std::string> translate(const Problem& problem, int n, double temperature, Gateway& gw) {
    if (n < 1) throw validation_error("n must be >= 1", {{"n", n}});
    auto req = request(kNl2Fl, {problem.id}, {{"problem", problem.nl_text}}, n, temperature);
    return gw.complete(req);
}

std::string back_translate(std::string_view statement, const std::vector<std::string>& keys, Gateway& gw) {
    require_text(statement, "statement");
    auto req = request(kFl2Nl, keys, {{"statement", std::string(statement)}});
    return gw.complete(req).front();
}

TriVerdict judge_nli(std::string_view original_nl, std::string_view back_translated_nl,
                     const std::vector<std::string>& keys, Gateway& gw) {
    require_text(original_nl, "original text");
    require_text(back_translated_nl, "back-translated text");
    auto req = request(kNli, keys,
                       {{"problem_a", std::string(original_nl)}, {"problem_b", std::string(back_translated_nl)}});
    return judged(gw, req, "same", "different");
}

std::vector<std::string> sample_proofs(std::string_view statement, int k, double temperature,
                                       const std::vector<std::string>& keys, Gateway& gw) {
    if (k < 1) return {};
    auto req = request(kProve, keys, {{"statement", std::string(statement)}}, k, temperature);
    return gw.complete(req);
}

}  // namespace forge::llm
