// forge command-line entry point.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "forge/core/json_io.hpp"
#include "forge/core/store.hpp"
#include "forge/lean/lint.hpp"
#include "forge/llm/operations.hpp"
#include "forge/pipeline/config.hpp"
#include "forge/pipeline/export.hpp"
#include "forge/pipeline/review.hpp"
#include "forge/pipeline/round.hpp"
#include "forge/pipeline/search.hpp"
#include "forge/pipeline/stages.hpp"
#include "forge/repl/checker.hpp"
#include "forge/server/review_server.hpp"

namespace fs = std::filesystem;
using namespace forge;

namespace {

constexpr int kCrashExit = 70;

struct Globals {
    std::string store;
    std::string config;
    std::string log_level = "info";
    bool trace = false;
    bool simulate = false;
    std::string repl_cmd;
    std::string repl_version_cmd;
    std::string env_tag;
    int workers = 0;
    double timeout_s = 0.0;
    std::string record_fixtures;
};

Globals g;

std::optional<pipeline::RoundConfig> load_config() {
    if (g.config.empty()) return std::nullopt;
    return pipeline::RoundConfig::load(g.config);
}

fs::path store_path(const std::optional<pipeline::RoundConfig>& cfg) {
    if (!g.store.empty()) return g.store;
    if (cfg) return cfg->store;
    throw validation_error("no store given (use --store or FORGE_STORE, or a config with \"store\")");
}

// --simulate, then --repl-cmd, then the config's prover section.
std::unique_ptr<repl::StatementChecker> make_checker(const std::optional<pipeline::RoundConfig>& cfg) {
    if (g.simulate) return std::make_unique<repl::SimulatedChecker>();
    Json prover;
    fs::path base = fs::current_path();
    if (!g.repl_cmd.empty()) {
        prover = {{"kind", "repl"}, {"command", g.repl_cmd}};
        if (cfg && cfg->prover.value("kind", std::string()) == "repl") {
            prover = cfg->prover;
            prover["command"] = g.repl_cmd;
        }
    } else if (cfg) {
        prover = cfg->prover;
        base = cfg->base_dir;
    } else {
        throw Error(ErrorCode::environment, "no prover configured (use --repl-cmd, FORGE_REPL_CMD or --simulate)");
    }
    if (prover.value("kind", std::string()) == "repl") {
        if (!g.repl_version_cmd.empty()) prover["version_command"] = g.repl_version_cmd;
        if (!g.env_tag.empty()) prover["env_tag"] = g.env_tag;
        if (g.workers > 0) prover["workers"] = g.workers;
        if (g.timeout_s > 0) prover["timeout_s"] = g.timeout_s;
        if (!g.record_fixtures.empty()) prover["record_dir"] = fs::absolute(g.record_fixtures).string();
    }
    double timeout = cfg ? cfg->sampling.timeout_s : 60.0;
    return pipeline::make_checker(prover, base, timeout);
}

pipeline::RoundConfig require_config() {
    auto cfg = load_config();
    if (!cfg) throw validation_error("this command needs --config (or FORGE_CONFIG)");
    return *cfg;
}

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    if (!fs::exists(path)) throw validation_error("file not found: " + path, {{"path", path}});
    return read_file(path);
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-") {
        std::cout << content;
        std::cout.flush();
    } else {
        write_file_atomic(out_path, content);
    }
}

// Blank-line separated blocks, each linted on its own.
struct Block {
    std::size_t begin;
    std::string_view text;
};

std::vector<Block> split_blocks(std::string_view s) {
    std::vector<Block> out;
    std::size_t i = 0;
    while (i < s.size()) {
        // skip blank lines
        std::size_t line_end = s.find('\n', i);
        std::string_view line = s.substr(i, line_end == std::string_view::npos ? std::string_view::npos : line_end - i);
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            if (line_end == std::string_view::npos) break;
            i = line_end + 1;
            continue;
        }
        std::size_t begin = i, end = s.size();
        std::size_t j = i;
        while (j < s.size()) {
            std::size_t le = s.find('\n', j);
            std::string_view l = s.substr(j, le == std::string_view::npos ? std::string_view::npos : le - j);
            if (l.find_first_not_of(" \t\r") == std::string_view::npos) {
                end = j;
                break;
            }
            if (le == std::string_view::npos) {
                end = s.size();
                j = s.size();
                break;
            }
            j = le + 1;
            end = j;
        }
        std::string_view block = s.substr(begin, end - begin);
        while (!block.empty() && (block.back() == '\n' || block.back() == '\r')) block.remove_suffix(1);
        out.push_back({begin, block});
        i = end;
    }
    return out;
}

std::vector<LabelRecord> read_labels(const std::string& path) {
    std::vector<LabelRecord> out;
    for (const auto& j : read_jsonl(path)) out.push_back(label_from_json(j));
    return out;
}

std::vector<Problem> read_problems(const std::string& path) {
    std::vector<Problem> out;
    for (const auto& j : read_jsonl(path)) out.push_back(problem_from_json(j));
    return out;
}

int report_partial(const fs::path& path, const Json& report) {
    write_file_atomic(path, report.dump(2) + "\n");
    Json err = Error(ErrorCode::partial, "finished with failures", {{"report", path.string()}}).to_json();
    std::cerr << err.dump() << "\n";
    return exit_code_for(ErrorCode::partial);
}

}  // namespace

int main(int argc, char** argv) {
    std::signal(SIGPIPE, SIG_IGN);
    auto logger = spdlog::stderr_color_mt("forge");
    spdlog::set_default_logger(logger);

    CLI::App app{"forge: autoformalization pipeline orchestrator"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.add_option("--store", g.store, "store directory")->envname("FORGE_STORE");
    app.add_option("--config", g.config, "round config file")->envname("FORGE_CONFIG");
    app.add_option("--log-level", g.log_level, "trace|debug|info|warn|error|off")->envname("FORGE_LOG_LEVEL");
    app.add_flag("--trace", g.trace, "log backend requests and responses (keys redacted)")->envname("FORGE_TRACE");
    app.add_flag("--simulate", g.simulate, "use the built-in prover simulator")->envname("FORGE_SIMULATE");
    app.add_option("--repl-cmd", g.repl_cmd, "prover REPL command line")->envname("FORGE_REPL_CMD");
    app.add_option("--repl-version-cmd", g.repl_version_cmd, "prints the toolchain version")
        ->envname("FORGE_REPL_VERSION_CMD");
    app.add_option("--env-tag", g.env_tag, "expected toolchain version substring")->envname("FORGE_ENV_TAG");
    app.add_option("--workers", g.workers, "REPL workers")->envname("FORGE_WORKERS");
    app.add_option("--timeout", g.timeout_s, "per-statement timeout in seconds")->envname("FORGE_TIMEOUT_S");
    app.add_option("--record-fixtures", g.record_fixtures, "dump raw REPL responses here")
        ->envname("FORGE_RECORD_FIXTURES");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "extract problems from forum posts and judge well-definedness");
    std::string posts_dir;
    ingest->add_option("dir", posts_dir, "directory of .txt/.md posts")->required();

    // filter
    auto* filter = app.add_subcommand("filter", "print problems whose tags meet the allowlist");
    std::vector<std::string> allow;
    std::string filter_out;
    filter->add_option("--allow", allow, "allowlist tags (default: config or built-in)")->delimiter(',');
    filter->add_option("--out", filter_out, "output file (default stdout)");

    // round
    auto* round = app.add_subcommand("round", "active-learning rounds");
    round->require_subcommand(1);
    auto* round_run = round->add_subcommand("run", "run one round");
    std::string problems_file;
    int parallel = 4;
    round_run->add_option("--problems", problems_file, "JSONL problems to add to the store first");
    round_run->add_option("--parallel", parallel, "problems processed concurrently")->envname("FORGE_PARALLEL");

    // review
    auto* review = app.add_subcommand("review", "human review");
    review->require_subcommand(1);
    int review_round = 0;
    std::string strategy = "pattern_triage";
    std::uint64_t seed = 0;
    bool seed_given = false;
    auto* enqueue = review->add_subcommand("enqueue", "build the review batch for a round");
    enqueue->add_option("--round", review_round)->required();
    enqueue->add_option("--strategy", strategy)->check(CLI::IsMember({"pattern_triage", "tag_stratified"}));
    enqueue->add_option("--seed", seed)->each([&](const std::string&) { seed_given = true; });
    auto* serve = review->add_subcommand("serve", "serve the review API");
    int port = 8080;
    std::string host = "127.0.0.1";
    std::string static_dir;
    serve->add_option("--round", review_round)->required();
    serve->add_option("--port", port)->envname("FORGE_PORT");
    serve->add_option("--host", host)->envname("FORGE_HOST");
    serve->add_option("--static", static_dir, "UI asset directory")->envname("FORGE_STATIC_DIR");
    serve->add_option("--strategy", strategy)->check(CLI::IsMember({"pattern_triage", "tag_stratified"}));
    serve->add_option("--seed", seed)->each([&](const std::string&) { seed_given = true; });

    // labels
    auto* labels = app.add_subcommand("labels", "reviewer labels");
    labels->require_subcommand(1);
    auto* merge = labels->add_subcommand("merge", "merge a JSONL file of labels into a round");
    std::string labels_file;
    int labels_round = 0;
    merge->add_option("file", labels_file)->required();
    merge->add_option("--round", labels_round)->required();

    // export
    auto* exp = app.add_subcommand("export", "export the dataset or training pairs");
    std::string export_kind;
    std::vector<int> export_rounds;
    std::string export_out;
    exp->add_option("kind", export_kind)->required()->check(CLI::IsMember({"dataset", "pairs"}));
    exp->add_option("--round", export_rounds, "rounds to include (default all)");
    exp->add_option("--out", export_out, "output file (default stdout)");

    // stats
    auto* stats = app.add_subcommand("stats", "CPN, NPN and sampled accuracy of a round");
    int stats_round = 0;
    bool stats_json = false;
    stats->add_option("--round", stats_round)->required();
    stats->add_flag("--json", stats_json);

    // imo
    auto* imo = app.add_subcommand("imo", "best-of-k translation for hard problems");
    std::string imo_file;
    int imo_k = 100;
    double imo_temp = 0.7;
    imo->add_option("problems", imo_file, "JSONL problems")->required();
    imo->add_option("--k", imo_k);
    imo->add_option("--temperature", imo_temp);

    // prove
    auto* prove = app.add_subcommand("prove", "whole-proof search over candidates");
    std::string prove_file;
    int prove_k = 0;
    double prove_temp = 0.7;
    prove->add_option("candidates", prove_file, "candidates JSONL")->required();
    prove->add_option("--k", prove_k, "proof attempts per statement")->required();
    prove->add_option("--temperature", prove_temp);

    // lint / fix
    auto* lint_cmd = app.add_subcommand("lint", "report false patterns as JSONL");
    auto* fix_cmd = app.add_subcommand("fix", "apply fixable suggestions");
    std::string lint_file, nl_file;
    for (auto* c : {lint_cmd, fix_cmd}) {
        c->add_option("file", lint_file, "Lean text; blank lines separate statements ('-' for stdin)")->required();
        c->add_option("--nl", nl_file, "natural-language problem text");
    }

    // repl
    auto* repl_cmd = app.add_subcommand("repl", "prover REPL utilities");
    repl_cmd->require_subcommand(1);
    auto* check = repl_cmd->add_subcommand("check", "check one statement (exit 0 iff it elaborates)");
    std::string check_file, proof_text;
    check->add_option("file", check_file)->required();
    check->add_option("--proof", proof_text, "check this proof instead of the sorry placeholder");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << validation_error(e.what()).to_json().dump() << "\n";
        return exit_code_for(ErrorCode::validation);
    }

    try {
        spdlog::set_level(spdlog::level::from_str(g.log_level));

        if (*ingest) {
            auto cfg = require_config();
            auto store = Store::open(store_path(cfg), OpenMode::writer);
            auto gw = pipeline::make_gateways(cfg, g.trace);
            auto fault = pipeline::FaultInjector::from_env();
            auto r = pipeline::ingest(store, posts_dir, gw, fault);
            Json out{{"posts", r.posts}, {"extracted", r.extracted}, {"well_defined", r.well_defined}};
            std::cout << out.dump() << "\n";
            if (!r.failures.empty()) {
                Json arr = Json::array();
                for (const auto& f : r.failures) arr.push_back(pipeline::to_json(f));
                return report_partial(store.root() / "ingest_failures.json", arr);
            }
            return 0;
        }

        if (*filter) {
            auto cfg = load_config();
            auto store = Store::open(store_path(cfg), OpenMode::reader);
            std::set<std::string> allowlist = cfg ? cfg->allowlist : pipeline::default_allowlist();
            if (!allow.empty()) {
                allowlist.clear();
                for (const auto& t : allow) allowlist.insert(normalize_tag(t));
            }
            std::string out;
            for (const auto& p : pipeline::filter_by_tags(store.problems().records(), allowlist)) {
                out += dump_line(to_json(p)) + "\n";
            }
            write_output(filter_out, out);
            return 0;
        }

        if (*round_run) {
            auto cfg = require_config();
            auto store = Store::open(store_path(cfg), OpenMode::writer);
            if (!problems_file.empty()) {
                for (auto& p : read_problems(problems_file)) {
                    if (!store.problems().contains(p.id)) store.problems().append(p);
                }
            }
            auto gw = pipeline::make_gateways(cfg, g.trace);
            auto checker = make_checker(cfg);
            auto fault = pipeline::FaultInjector::from_env();
            auto r = pipeline::run_round(store, cfg, gw, *checker, fault, parallel);
            std::cout << to_json(r.manifest).dump(2) << "\n" << r.funnel.table();
            if (r.partial()) {
                std::cerr << Error(ErrorCode::partial, "round finished with failures",
                                   {{"report", (store.round_dir(cfg.round) / "failures.json").string()}})
                                 .to_json()
                                 .dump()
                          << "\n";
                return exit_code_for(ErrorCode::partial);
            }
            return 0;
        }

        if (*enqueue || *serve) {
            auto cfg = load_config();
            auto store = Store::open(store_path(cfg), OpenMode::writer);
            if (!seed_given && cfg) seed = cfg->seed;
            const auto strat = pipeline::review_strategy_from_string(strategy);
            if (*enqueue) {
                auto b = pipeline::enqueue_review(store, review_round, strat, seed);
                std::cout << pipeline::to_json(b).dump(2) << "\n";
                return 0;
            }
            if (!store.has_round(review_round)) {
                throw validation_error("unknown round " + std::to_string(review_round), {{"round", review_round}});
            }
            if (!pipeline::load_review_batch(store, review_round)) pipeline::enqueue_review(store, review_round, strat, seed);
            auto checker = make_checker(cfg);
            server::ReviewServerOptions opts;
            opts.round = review_round;
            opts.host = host;
            opts.port = port;
            if (!static_dir.empty()) opts.static_dir = static_dir;
            server::ReviewServer srv(store, *checker, opts);
            srv.run();
            return 0;
        }

        if (*merge) {
            auto cfg = load_config();
            auto store = Store::open(store_path(cfg), OpenMode::writer);
            if (!store.has_round(labels_round)) {
                throw validation_error("unknown round " + std::to_string(labels_round), {{"round", labels_round}});
            }
            auto checker = make_checker(cfg);
            auto records = read_labels(labels_file);
            auto fault = pipeline::FaultInjector::from_env();
            auto r = pipeline::merge_human_labels(store, labels_round, records, *checker, &fault);
            std::cout << pipeline::to_json(r).dump(2) << "\n";
            if (!r.rejected.empty()) {
                return report_partial(store.round_dir(labels_round) / "merge_report.json", pipeline::to_json(r));
            }
            return 0;
        }

        if (*exp) {
            auto cfg = load_config();
            auto store = Store::open(store_path(cfg), OpenMode::reader);
            for (int r : export_rounds) {
                if (!store.has_round(r)) throw validation_error("unknown round " + std::to_string(r), {{"round", r}});
            }
            if (export_kind == "pairs") {
                auto accepted = pipeline::accepted_candidates(store, export_rounds);
                auto pairs = pipeline::training_pairs(accepted, pipeline::problem_map(store));
                write_output(export_out, pipeline::encode_training_pairs(pairs));
            } else {
                write_output(export_out, pipeline::export_dataset(store, export_rounds));
            }
            return 0;
        }

        if (*stats) {
            auto cfg = load_config();
            auto store = Store::open(store_path(cfg), OpenMode::reader);
            if (!store.has_round(stats_round)) {
                throw validation_error("unknown round " + std::to_string(stats_round), {{"round", stats_round}});
            }
            auto m = pipeline::current_manifest(store, stats_round);
            auto rows = pipeline::round_accuracy(store, stats_round);
            if (stats_json) {
                Json out;
                out["manifest"] = to_json(m);
                out["weighted_accuracy"] = rows.empty() ? Json(nullptr) : Json(weighted_accuracy(rows));
                std::cout << out.dump(2) << "\n";
            } else {
                std::cout << pipeline::manifest_table({m}) << "\n" << pipeline::accuracy_table(rows);
            }
            return 0;
        }

        if (*imo) {
            auto cfg = require_config();
            auto gw = pipeline::make_gateways(cfg, g.trace);
            if (!gw.translate || !gw.back_translate || !gw.nli) {
                throw validation_error("imo needs translate, back_translate and nli backends");
            }
            auto checker = make_checker(cfg);
            for (const auto& p : read_problems(imo_file)) {
                auto r = pipeline::imo_mode(p, imo_k, imo_temp, *gw.translate, *gw.back_translate, *gw.nli, *checker);
                std::cout << dump_line(pipeline::to_json(r)) << "\n";
            }
            return 0;
        }

        if (*prove) {
            auto cfg = require_config();
            auto gw = pipeline::make_gateways(cfg, g.trace);
            if (!gw.prove) throw validation_error("prove needs a prove backend");
            auto checker = make_checker(cfg);
            std::int64_t solved = 0, total = 0;
            bool retryable = false;
            for (const auto& j : read_jsonl(prove_file)) {
                auto c = candidate_from_json(j);
                if (!c.compile_pass()) continue;
                ++total;
                auto s = pipeline::proof_search(c.statement_text, prove_k, prove_temp, {c.key().str(), c.problem_id},
                                                *gw.prove, *checker);
                if (s.solved) ++solved;
                retryable = retryable || s.retryable;
                Json line = pipeline::to_json(s);
                line["candidate_id"] = c.key().str();
                std::cout << dump_line(line) << "\n";
            }
            if (total > 0) {
                auto rate = pass_rate(solved, total, prove_k);
                Json summary{{"solved", solved}, {"total", total}, {"k", prove_k}, {"rate", rate.display()}};
                std::cout << dump_line(summary) << "\n";
                std::cerr << "pass@" << prove_k << ": " << solved << "/" << total << " = " << rate.display() << "\n";
            }
            return retryable ? exit_code_for(ErrorCode::partial) : 0;
        }

        if (*lint_cmd || *fix_cmd) {
            const std::string text = read_input(lint_file);
            std::optional<std::string> nl;
            if (!nl_file.empty()) nl = read_input(nl_file);
            std::string out;
            std::size_t cursor = 0;
            for (const auto& b : split_blocks(text)) {
                auto report = lean::lint(b.text, nl ? std::optional<std::string_view>(*nl) : std::nullopt);
                if (*lint_cmd) {
                    for (const auto& f : report.findings) {
                        Json j;
                        j["rule_id"] = f.rule_id;
                        j["span"] = {f.span.begin + b.begin, f.span.end + b.begin};
                        j["severity"] = std::string(to_string(f.severity));
                        j["suggestion"] = f.suggestion ? Json(*f.suggestion) : Json(nullptr);
                        out += dump_line(j) + "\n";
                    }
                } else {
                    out += text.substr(cursor, b.begin - cursor);
                    out += lean::apply_fixes(b.text, report);
                    cursor = b.begin + b.text.size();
                }
            }
            if (*fix_cmd) out += text.substr(std::min(cursor, text.size()));
            std::cout << out;
            return 0;
        }

        if (*check) {
            auto cfg = load_config();
            auto checker = make_checker(cfg);
            const std::string text = read_input(check_file);
            auto v = proof_text.empty() ? checker->check_statement(text) : checker->check_proof(text, proof_text);
            std::cout << to_json(v).dump(2) << "\n";
            return v.compiles() ? 0 : 1;
        }
    } catch (const pipeline::SimulatedCrash& e) {
        std::cerr << "crash: " << e.what() << "\n";
        std::fflush(nullptr);
        std::_Exit(kCrashExit);
    } catch (const Error& e) {
        std::cerr << e.to_json().dump() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << Error(ErrorCode::environment, e.what()).to_json().dump() << "\n";
        return exit_code_for(ErrorCode::environment);
    }
    return 0;
}
