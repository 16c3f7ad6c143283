#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "forge/core/errors.hpp"

namespace forge::llm {

struct CompletionRequest {
    std::string prompt_id;
    std::vector<std::string> keys;  // fixture lookup keys, most specific first
    std::map<std::string, std::string> vars;
    std::string prompt;             // rendered template
    int n = 1;
    double temperature = 0.0;
};

/// Chat-completion style model endpoint. Transport failures throw
/// Error{transport}; anything else is not retried.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::vector<std::string> complete(const CompletionRequest& req) = 0;
    virtual std::string id() const = 0;
};

/// Replays keyed fixtures from `<dir>/<prompt_id>.jsonl`. Each line is
///   {"key": K, "responses": [...]}     matched against the request keys
///   {"match": S, "responses": [...]}   matched when S occurs in the prompt
///   {"key": "*", ...}                  fallback
/// `"response": "..."` is shorthand for one response, and `"fail": N` makes
/// the first N calls for that entry throw a transport error. A request for
/// n samples takes responses[i % size] for i < n. Without a fixture, nli
/// echoes: identical texts (after whitespace collapse) are **same**.
class MockBackend final : public Backend {
public:
    explicit MockBackend(std::filesystem::path dir);

    std::vector<std::string> complete(const CompletionRequest& req) override;
    std::string id() const override { return "mock:" + dir_.string(); }

    std::uint64_t calls(const std::string& prompt_id) const;

private:
    struct Entry {
        std::string key;
        std::string match;
        std::vector<std::string> responses;
        int fail = 0;
    };
    std::vector<Entry>& entries(const std::string& prompt_id);

    std::filesystem::path dir_;
    mutable std::mutex mu_;
    std::map<std::string, std::vector<Entry>> cache_;
    std::map<std::string, std::uint64_t> calls_;
};

struct HttpBackendConfig {
    std::string base_url;  // e.g. https://host/v1
    std::string model;
    std::string api_key_env = "FORGE_API_KEY";
    double timeout_s = 120.0;
    bool trace = false;
};

/// POST {base_url}/chat/completions with {model, messages, n, temperature}.
class HttpBackend final : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig config);
    std::vector<std::string> complete(const CompletionRequest& req) override;
    std::string id() const override { return "http:" + config_.model; }

private:
    HttpBackendConfig config_;
    std::string api_key_;
};

/// Builds a backend from {"kind": "mock", "dir": ...} or
/// {"kind": "http", "base_url", "model", "api_key_env", "timeout_s"}.
/// Relative mock dirs resolve against `base`.
std::shared_ptr<Backend> make_backend(const Json& spec, const std::filesystem::path& base, bool trace = false);

struct GatewayOptions {
    int max_concurrency = 8;
    int retries = 2;                        // extra attempts after a transport failure
    std::chrono::milliseconds backoff{200};  // doubled per retry
};

/// Caps in-flight requests and retries transport failures.
class Gateway {
public:
    explicit Gateway(std::shared_ptr<Backend> backend, GatewayOptions options = {});

    std::vector<std::string> complete(const CompletionRequest& req);
    const Backend& backend() const noexcept { return *backend_; }
    std::uint64_t requests() const noexcept { return requests_; }

private:
    std::shared_ptr<Backend> backend_;
    GatewayOptions options_;
    std::mutex mu_;
    std::condition_variable cv_;
    int in_flight_ = 0;
    std::atomic<std::uint64_t> requests_{0};
};

/// Replaces every occurrence of `secret` with "***".
std::string redact(std::string text, const std::string& secret);

}  // namespace forge::llm
