#include "forge/pipeline/stages.hpp"

#include <algorithm>
#include <cstdlib>

#include <spdlog/spdlog.h>

#include "forge/lean/fingerprint.hpp"
#include "forge/lean/lint.hpp"
#include "forge/lean/statement.hpp"
#include "forge/lean/tokenizer.hpp"
#include "forge/llm/operations.hpp"

namespace forge::pipeline {

namespace fs = std::filesystem;

bool tag_kept(const Problem& p, const std::set<std::string>& allowlist) {
    return std::any_of(p.tags.begin(), p.tags.end(), [&](const std::string& t) { return allowlist.count(t) != 0; });
}

std::vector<Problem> filter_by_tags(std::span<const Problem> problems, const std::set<std::string>& allowlist) {
    std::vector<Problem> out;
    for (const auto& p : problems) {
        if (tag_kept(p, allowlist)) out.push_back(p);
    }
    return out;
}

Problem rephrase_answer(Problem p) {
    if (!p.answer) return p;
    const std::string sentence = "Show that it is " + *p.answer + ".";
    std::string body = p.nl_text;
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back()))) body.pop_back();
    if (body.size() >= sentence.size() && body.compare(body.size() - sentence.size(), sentence.size(), sentence) == 0) {
        return p;
    }
    p.nl_text = body.empty() ? sentence : body + " " + sentence;
    return p;
}

FaultInjector FaultInjector::from_env() {
    const char* v = std::getenv("FORGE_FAULT");
    if (!v || !*v) return {};
    std::string s(v);
    auto colon = s.find(':');
    if (colon == std::string::npos) throw validation_error("FORGE_FAULT must be <stage>:<N>");
    return {s.substr(0, colon), std::atoi(s.c_str() + colon + 1)};
}

void FaultInjector::tick(std::string_view stage) {
    if (after_ <= 0 || stage != stage_) return;
    if (++seen_ == after_) {
        throw SimulatedCrash("injected crash at " + stage_ + " #" + std::to_string(after_));
    }
}

PreparedStatement prepare_statement(std::string_view raw, std::string_view problem_id, int sample_index,
                                    std::string_view nl_text) {
    PreparedStatement out;
    std::string text = llm::strip_code_fence(raw);
    const auto policy = lean::NamePolicy::fixed(lean::stable_theorem_name(problem_id, sample_index));
    try {
        text = lean::normalize_text(text, policy);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::parse) throw;
        out.parsed = false;
        text = lean::collapse_whitespace(text);
    }
    out.pre_fix_text = text;

    auto report = lean::lint(text, nl_text);
    // a fix can expose another fixable pattern, so iterate a few times
    for (int pass = 0; pass < 4 && report.fixable_count() > 0; ++pass) {
        out.fixes_applied += report.fixable_count();
        text = lean::apply_fixes(text, report);
        report = lean::lint(text, nl_text);
    }
    out.text = std::move(text);
    out.lint = std::move(report);
    out.fingerprint = lean::canonical_fingerprint(out.text).digest;
    return out;
}

Json to_json(const StageFailure& f) {
    return {{"item", f.item}, {"stage", f.stage}, {"code", f.code}, {"message", f.message}};
}

namespace {

StageFailure failure(std::string item, std::string stage, const Error& e) {
    return {std::move(item), std::move(stage), std::string(to_string(e.code())), e.what()};
}

std::vector<fs::path> list_posts(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw validation_error("posts directory not found: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        auto ext = e.path().extension().string();
        if (ext == ".txt" || ext == ".md") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

IngestReport ingest(Store& store, const fs::path& posts_dir, Gateways& gw, FaultInjector& fault) {
    if (!gw.extract || !gw.well_defined) throw validation_error("ingest needs extract and well_defined backends");
    IngestReport report;
    auto& problems = store.problems();
    auto& extractions = store.extractions();

    std::map<std::string, Judgement> known;
    for (const auto& q : problems.records()) known[q.id] = q.well_defined;
    std::map<std::string, std::string> journaled;
    for (const auto& r : extractions.records()) journaled[r.problem_id] = r.raw_text;

    for (const auto& path : list_posts(posts_dir)) {
        ++report.posts;
        const std::string source = path.stem().string();
        std::string reply;
        if (auto it = journaled.find(source); it != journaled.end()) {
            reply = it->second;
        } else {
            try {
                reply = llm::request_extraction(read_file(path), source, *gw.extract);
            } catch (const Error& e) {
                report.failures.push_back(failure(source, "extract", e));
                continue;
            }
            extractions.append({source, 0, 0, reply});
            fault.tick("extract");
        }

        std::vector<llm::ProblemDraft> drafts;
        try {
            drafts = llm::parse_extraction_json(reply);
        } catch (const Error& e) {
            report.failures.push_back(failure(source, "extract", e));
            continue;
        }

        for (std::size_t i = 0; i < drafts.size(); ++i) {
            Problem p;
            p.id = source + "_" + std::to_string(i);
            ++report.extracted;
            if (auto it = known.find(p.id); it != known.end()) {
                if (it->second == Judgement::positive) ++report.well_defined;
                continue;
            }
            p.source = source;
            p.nl_text = drafts[i].problem;
            p.answer = drafts[i].answer;
            p.tags = drafts[i].tags;
            try {
                auto v = llm::judge_well_defined(p, *gw.well_defined);
                // an indeterminate reply was already asked twice
                p.well_defined = v.value;
            } catch (const Error& e) {
                report.failures.push_back(failure(p.id, "well_defined", e));
                continue;
            }
            problems.append(p);
            fault.tick("problem");
            if (p.well_defined == Judgement::positive) ++report.well_defined;
        }
    }
    if (!report.failures.empty()) spdlog::warn("ingest finished with {} failures", report.failures.size());
    return report;
}

}  // namespace forge::pipeline
