#include "forge/pipeline/config.hpp"

#include <map>

#include "forge/core/json_io.hpp"
#include "forge/core/store.hpp"
#include "forge/lean/fingerprint.hpp"
#include "forge/llm/prompts.hpp"
#include "forge/repl/subprocess.hpp"

namespace forge::pipeline {

namespace fs = std::filesystem;

std::set<std::string> default_allowlist() {
    return {"inequality",         "number_theory",   "trigonometry",  "modular_arithmetic",
            "induction",          "functional_equation", "complex_numbers", "polynomial"};
}

RoundConfig RoundConfig::from_json(const Json& j, const fs::path& base_dir) {
    if (!j.is_object()) throw validation_error("round config must be a JSON object");
    RoundConfig c;
    c.base_dir = base_dir;
    c.source = j;
    try {
        c.version = j.value("version", 1);
        if (c.version != 1) {
            throw validation_error("unsupported config version " + std::to_string(c.version), {{"version", c.version}});
        }
        c.round = j.value("round", 1);
        c.model_id = j.value("model_id", std::string());
        c.store = j.value("store", std::string("store"));
        if (c.store.is_relative()) c.store = base_dir / c.store;
        c.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("allowlist")) {
            c.allowlist.clear();
            for (const auto& t : j["allowlist"]) c.allowlist.insert(normalize_tag(t.get<std::string>()));
        }
        if (j.contains("sampling")) c.sampling = sampling_config_from_json(j["sampling"]);
        if (j.contains("gateway")) {
            const auto& g = j["gateway"];
            c.gateway.max_concurrency = g.value("max_concurrency", c.gateway.max_concurrency);
            c.gateway.retries = g.value("retries", c.gateway.retries);
            c.gateway.backoff = std::chrono::milliseconds(g.value("backoff_ms", 200));
        }
        if (j.contains("backends")) c.backends = j["backends"];
        if (j.contains("prover")) c.prover = j["prover"];
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("bad round config: ") + e.what());
    }
    c.validate();
    return c;
}

RoundConfig RoundConfig::load(const fs::path& file) {
    if (!fs::exists(file)) throw validation_error("config file not found: " + file.string(), {{"path", file.string()}});
    Json j = Json::parse(read_file(file), nullptr, false);
    if (j.is_discarded()) throw validation_error("config is not valid JSON", {{"path", file.string()}});
    return from_json(j, fs::absolute(file).parent_path());
}

void RoundConfig::validate() const {
    if (round < 0) throw validation_error("round must be >= 0", {{"round", round}});
    if (allowlist.empty()) throw validation_error("allowlist must not be empty");
    for (const auto& t : allowlist) {
        if (t != normalize_tag(t)) throw validation_error("allowlist tag not normalized: " + t);
    }
    sampling.validate();
    if (!backends.is_object()) throw validation_error("backends must be an object");
}

std::string RoundConfig::digest() const {
    Json j = source;
    j.erase("store");  // where the store lives does not change the round
    return lean::sha256_hex(j.dump() + "\x1e" + llm::registry_digest());
}

Gateways make_gateways(const RoundConfig& cfg, bool trace) {
    std::map<std::string, std::shared_ptr<llm::Gateway>> by_spec;
    auto get = [&](const char* stage) -> std::shared_ptr<llm::Gateway> {
        Json spec;
        if (cfg.backends.contains(stage)) spec = cfg.backends[stage];
        else if (cfg.backends.contains("default")) spec = cfg.backends["default"];
        else return nullptr;  // missing stages fail when used
        auto key = spec.dump();
        auto it = by_spec.find(key);
        if (it != by_spec.end()) return it->second;
        auto gw = std::make_shared<llm::Gateway>(llm::make_backend(spec, cfg.base_dir, trace), cfg.gateway);
        by_spec.emplace(key, gw);
        return gw;
    };
    Gateways g;
    g.extract = get("extract");
    g.well_defined = get("well_defined");
    g.translate = get("translate");
    g.back_translate = get("back_translate");
    g.nli = get("nli");
    g.prove = get("prove");
    return g;
}

repl::PoolConfig pool_config_from_json(const Json& p, const fs::path& base_dir) {
    repl::PoolConfig c;
    auto argv = [](const Json& v) {
        if (v.is_array()) return v.get<std::vector<std::string>>();
        return repl::split_command(v.get<std::string>());
    };
    try {
        if (p.contains("command")) c.command = argv(p["command"]);
        if (p.contains("version_command")) c.version_command = argv(p["version_command"]);
        c.env_tag = p.value("env_tag", c.env_tag);
        c.workers = p.value("workers", c.workers);
        c.timeout_s = p.value("timeout_s", c.timeout_s);
        c.proof_timeout_s = p.value("proof_timeout_s", c.proof_timeout_s);
        c.startup_timeout_s = p.value("startup_timeout_s", c.startup_timeout_s);
        c.max_jobs_per_worker = p.value("max_jobs_per_worker", c.max_jobs_per_worker);
        c.queue_capacity = p.value("queue_capacity", c.queue_capacity);
        c.header = p.value("header", c.header);
        if (p.contains("record_dir")) {
            fs::path d = p["record_dir"].get<std::string>();
            c.record_dir = d.is_relative() ? base_dir / d : d;
        }
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("bad prover config: ") + e.what());
    }
    c.validate();
    return c;
}

std::unique_ptr<repl::StatementChecker> make_checker(const Json& prover, const fs::path& base_dir,
                                                     double default_timeout_s) {
    std::string kind = prover.value("kind", std::string("simulated"));
    if (kind == "simulated") return std::make_unique<repl::SimulatedChecker>();
    if (kind == "repl") {
        Json p = prover;
        if (!p.contains("timeout_s")) p["timeout_s"] = default_timeout_s;
        return std::make_unique<repl::PoolChecker>(pool_config_from_json(p, base_dir));
    }
    throw validation_error("unknown prover kind '" + kind + "'", {{"kind", kind}});
}

}  // namespace forge::pipeline
