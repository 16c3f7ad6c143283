#pragma once

#include <sys/types.h>

#include <atomic>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "forge/core/types.hpp"
#include "forge/repl/protocol.hpp"

namespace forge::repl {

struct PoolConfig {
    std::vector<std::string> command;          // REPL program and arguments
    std::vector<std::string> version_command;  // prints the toolchain version; empty skips the check
    std::string env_tag;                       // expected substring of the version output
    int workers = 1;
    double timeout_s = 60.0;                   // per statement
    double proof_timeout_s = 120.0;            // per proof
    double startup_timeout_s = 900.0;          // header import
    int max_jobs_per_worker = 200;
    std::size_t queue_capacity = 0;            // 0 means 4 * workers
    std::string header = std::string(kDefaultHeader);
    std::optional<std::filesystem::path> record_dir;

    void validate() const;
};

struct PoolStats {
    std::uint64_t completed = 0;
    std::uint64_t timeouts = 0;
    std::uint64_t crashes = 0;
    std::uint64_t restarts = 0;
    std::int64_t max_job_ms = 0;
};

/// Fixed set of REPL workers. Each worker imports the header once and then
/// serves one job at a time in that environment. Every submitted job gets
/// exactly one verdict: a hung job is killed at its timeout (timeout), a
/// worker that dies mid-job yields worker_crash, and in both cases the worker
/// is replaced before taking the next job.
class ReplPool {
public:
    /// Checks the version, starts all workers and waits until each has
    /// imported the header. Throws Error{environment} on a missing toolchain,
    /// version mismatch, or failed import.
    explicit ReplPool(PoolConfig config);
    ~ReplPool();
    ReplPool(const ReplPool&) = delete;
    ReplPool& operator=(const ReplPool&) = delete;

    /// Blocks while the queue is full. Throws Error{validation} after shutdown.
    std::future<CompileVerdict> submit(std::string cmd, bool expects_proof);

    /// Like submit, but returns nullopt instead of blocking when the queue is full.
    std::optional<std::future<CompileVerdict>> try_submit(std::string cmd, bool expects_proof);

    CompileVerdict check_statement(std::string_view statement_text);

    /// Replaces the statement's terminator with `proof_text` and checks the result.
    CompileVerdict check_proof(std::string_view statement_text, std::string_view proof_text);

    /// Finishes queued jobs, then stops the workers.
    void shutdown();

    std::vector<pid_t> worker_pids() const;
    PoolStats stats() const;
    const PoolConfig& config() const noexcept { return config_; }
    const std::string& env_tag() const noexcept { return found_version_; }

private:
    struct Job {
        std::string cmd;
        bool expects_proof = false;
        std::promise<CompileVerdict> promise;
    };
    struct Worker;

    void worker_loop(Worker& w);
    bool start_process(Worker& w, std::string& error);
    void restart(Worker& w);
    CompileVerdict run_job(Worker& w, Job& job);
    void record(const Job& job, const Json& response, bool had_timeout);

    PoolConfig config_;
    std::string found_version_;
    std::size_t capacity_ = 0;

    mutable std::mutex mu_;
    std::condition_variable not_empty_;
    std::condition_variable not_full_;
    std::condition_variable ready_cv_;
    std::deque<Job> queue_;
    bool stopping_ = false;
    int ready_ = 0;
    std::vector<std::string> startup_errors_;
    PoolStats stats_;
    std::atomic<std::uint64_t> record_seq_{0};

    std::vector<std::unique_ptr<Worker>> workers_;
};

}  // namespace forge::repl
