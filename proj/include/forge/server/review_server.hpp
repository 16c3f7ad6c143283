#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "forge/core/store.hpp"
#include "forge/repl/checker.hpp"

namespace httplib {
class Server;
}

namespace forge::server {

struct ReviewServerOptions {
    int round = 0;
    std::string host = "127.0.0.1";
    int port = 0;  // 0 picks a free port
    std::optional<std::filesystem::path> static_dir;
    int retry_after_s = 5;
};

/// Review API for one round:
///   GET  /api/queue?round=N   pending batch items in batch order
///   POST /api/check           {statement_text} -> CompileVerdict; never writes
///   POST /api/verdict         {candidate_id, verdict, modified_text?, note?}
///   GET  /api/stats?round=N   manifest plus sampled accuracy so far
/// Static files (or a placeholder page) under /.
class ReviewServer {
public:
    ReviewServer(Store& store, repl::StatementChecker& checker, ReviewServerOptions options);
    ~ReviewServer();
    ReviewServer(const ReviewServer&) = delete;
    ReviewServer& operator=(const ReviewServer&) = delete;

    /// Binds and serves on a background thread; returns the bound port.
    int start();

    /// Binds and serves on the calling thread until stop().
    void run();

    void stop();
    int port() const noexcept { return port_; }

private:
    void routes();
    int bind();

    Store& store_;
    repl::StatementChecker& checker_;
    ReviewServerOptions options_;
    std::unique_ptr<httplib::Server> http_;
    std::mutex store_mu_;  // the store has a single writer
    std::thread thread_;
    int port_ = 0;
};

}  // namespace forge::server
