#include "forge/llm/backend.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "forge/core/store.hpp"
#include "forge/lean/tokenizer.hpp"
#include "forge/llm/parsers.hpp"
#include "forge/llm/prompts.hpp"

namespace forge::llm {

MockBackend::MockBackend(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!std::filesystem::is_directory(dir_)) {
        throw Error(ErrorCode::environment, "mock backend directory not found", {{"dir", dir_.string()}});
    }
}

std::vector<MockBackend::Entry>& MockBackend::entries(const std::string& prompt_id) {
    auto it = cache_.find(prompt_id);
    if (it != cache_.end()) return it->second;
    std::vector<Entry> list;
    auto path = dir_ / (prompt_id + ".jsonl");
    if (std::filesystem::exists(path)) {
        for (const auto& j : read_jsonl(path)) {
            Entry e;
            e.key = j.value("key", std::string());
            e.match = j.value("match", std::string());
            if (j.contains("responses")) {
                for (const auto& r : j["responses"]) e.responses.push_back(r.get<std::string>());
            } else if (j.contains("response")) {
                e.responses.push_back(j["response"].get<std::string>());
            }
            e.fail = j.value("fail", 0);
            list.push_back(std::move(e));
        }
    }
    return cache_.emplace(prompt_id, std::move(list)).first->second;
}

std::vector<std::string> MockBackend::complete(const CompletionRequest& req) {
    std::vector<std::string> responses;
    {
        std::lock_guard lk(mu_);
        ++calls_[req.prompt_id];
        auto& list = entries(req.prompt_id);
        Entry* hit = nullptr;
        for (const auto& k : req.keys) {
            for (auto& e : list) {
                if (!e.key.empty() && e.key == k) {
                    hit = &e;
                    break;
                }
            }
            if (hit) break;
        }
        if (!hit) {
            for (auto& e : list) {
                if (!e.match.empty() && req.prompt.find(e.match) != std::string::npos) {
                    hit = &e;
                    break;
                }
            }
        }
        if (!hit) {
            for (auto& e : list) {
                if (e.key == "*") {
                    hit = &e;
                    break;
                }
            }
        }
        if (hit) {
            if (hit->fail > 0) {
                --hit->fail;
                throw Error(ErrorCode::transport, "mock transport failure", {{"prompt_id", req.prompt_id}});
            }
            responses = hit->responses;
        }
    }

    if (responses.empty() && req.prompt_id == kNli) {
        auto a = req.vars.find("problem_a");
        auto b = req.vars.find("problem_b");
        bool same = a != req.vars.end() && b != req.vars.end() &&
                    lean::collapse_whitespace(a->second) == lean::collapse_whitespace(b->second);
        responses.push_back(same ? "No differences. **same**" : "The statements differ. **different**");
    }
    if (responses.empty()) {
        Json keys = req.keys;
        throw validation_error("no mock response for prompt '" + req.prompt_id + "'",
                               {{"prompt_id", req.prompt_id}, {"keys", keys}, {"dir", dir_.string()}});
    }
    std::vector<std::string> out;
    for (int i = 0; i < req.n; ++i) out.push_back(responses[static_cast<std::size_t>(i) % responses.size()]);
    return out;
}

std::uint64_t MockBackend::calls(const std::string& prompt_id) const {
    std::lock_guard lk(mu_);
    auto it = calls_.find(prompt_id);
    return it == calls_.end() ? 0 : it->second;
}

std::string redact(std::string text, const std::string& secret) {
    if (secret.empty()) return text;
    for (auto p = text.find(secret); p != std::string::npos; p = text.find(secret, p + 3)) {
        text.replace(p, secret.size(), "***");
    }
    return text;
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty() || config_.model.empty()) {
        throw validation_error("http backend needs base_url and model");
    }
    if (const char* k = std::getenv(config_.api_key_env.c_str())) api_key_ = k;
}

std::vector<std::string> HttpBackend::complete(const CompletionRequest& req) {
    // split "scheme://host[:port]/prefix"
    std::string url = config_.base_url;
    auto scheme_end = url.find("://");
    auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

    Json body;
    body["model"] = config_.model;
    body["messages"] = Json::array({{{"role", "user"}, {"content", req.prompt}}});
    body["n"] = req.n;
    body["temperature"] = req.temperature;
    const std::string payload = body.dump();

    httplib::Client cli(origin);
    auto secs = std::chrono::duration<double>(config_.timeout_s);
    cli.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(secs));
    cli.set_connection_timeout(std::chrono::seconds(30));
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    if (config_.trace) {
        spdlog::info("POST {}{}/chat/completions Authorization: Bearer *** body={}", origin, prefix,
                     redact(payload, api_key_));
    }
    auto res = cli.Post(prefix + "/chat/completions", headers, payload, "application/json");
    if (!res) {
        throw Error(ErrorCode::transport, "request failed: " + httplib::to_string(res.error()),
                    {{"backend", id()}});
    }
    if (config_.trace) spdlog::info("HTTP {} body={}", res->status, redact(res->body, api_key_));
    if (res->status == 429 || res->status >= 500) {
        throw Error(ErrorCode::transport, "backend returned HTTP " + std::to_string(res->status), {{"backend", id()}});
    }
    if (res->status == 401 || res->status == 403) {
        throw Error(ErrorCode::environment, "backend rejected credentials", {{"status", res->status}});
    }
    if (res->status != 200) {
        throw validation_error("backend returned HTTP " + std::to_string(res->status),
                               {{"status", res->status}, {"body", redact(res->body, api_key_)}});
    }
    Json j = Json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices")) {
        throw Error(ErrorCode::transport, "malformed completion response", {{"backend", id()}});
    }
    std::vector<std::string> out;
    for (const auto& c : j["choices"]) {
        if (c.contains("message") && c["message"].contains("content") && c["message"]["content"].is_string()) {
            out.push_back(c["message"]["content"].get<std::string>());
        } else if (c.contains("text") && c["text"].is_string()) {
            out.push_back(c["text"].get<std::string>());
        }
    }
    // some servers ignore n
    if (out.empty()) throw Error(ErrorCode::transport, "completion had no choices", {{"backend", id()}});
    while (static_cast<int>(out.size()) < req.n) {
        CompletionRequest more = req;
        more.n = req.n - static_cast<int>(out.size());
        auto extra = complete(more);
        out.insert(out.end(), extra.begin(), extra.end());
    }
    out.resize(static_cast<std::size_t>(req.n));
    return out;
}

std::shared_ptr<Backend> make_backend(const Json& spec, const std::filesystem::path& base, bool trace) {
    if (!spec.is_object()) throw validation_error("backend spec must be an object");
    std::string kind = spec.value("kind", std::string());
    if (kind == "mock") {
        std::filesystem::path dir = spec.value("dir", std::string());
        if (dir.is_relative()) dir = base / dir;
        return std::make_shared<MockBackend>(dir);
    }
    if (kind == "http") {
        HttpBackendConfig c;
        c.base_url = spec.value("base_url", std::string());
        c.model = spec.value("model", std::string());
        c.api_key_env = spec.value("api_key_env", c.api_key_env);
        c.timeout_s = spec.value("timeout_s", c.timeout_s);
        c.trace = trace;
        return std::make_shared<HttpBackend>(std::move(c));
    }
    throw validation_error("unknown backend kind '" + kind + "'", {{"kind", kind}});
}

Gateway::Gateway(std::shared_ptr<Backend> backend, GatewayOptions options)
    : backend_(std::move(backend)), options_(options) {
    if (!backend_) throw validation_error("gateway needs a backend");
    if (options_.max_concurrency < 1) throw validation_error("max_concurrency must be >= 1");
    if (options_.retries < 0) throw validation_error("retries must be >= 0");
}

std::vector<std::string> Gateway::complete(const CompletionRequest& req) {
    if (req.n < 1) throw validation_error("n must be >= 1", {{"n", req.n}});
    {
        std::unique_lock lk(mu_);
        cv_.wait(lk, [&] { return in_flight_ < options_.max_concurrency; });
        ++in_flight_;
    }
    struct Release {
        Gateway* g;
        ~Release() {
            {
                std::lock_guard lk(g->mu_);
                --g->in_flight_;
            }
            g->cv_.notify_one();
        }
    } release{this};

    auto delay = options_.backoff;
    for (int attempt = 0;; ++attempt) {
        ++requests_;
        try {
            return backend_->complete(req);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::transport || attempt >= options_.retries) throw;
            spdlog::warn("{} request failed ({}), retry {}/{}", req.prompt_id, e.what(), attempt + 1,
                         options_.retries);
        }
        std::this_thread::sleep_for(delay);
        delay *= 2;
    }
}

}  // namespace forge::llm
