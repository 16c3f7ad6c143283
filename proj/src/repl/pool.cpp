#include "forge/repl/pool.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include <spdlog/spdlog.h>

#include "forge/core/store.hpp"
#include "forge/lean/statement.hpp"
#include "forge/lean/tokenizer.hpp"
#include "forge/repl/checker.hpp"
#include "forge/repl/subprocess.hpp"

namespace forge::repl {

namespace {

using ms = std::chrono::milliseconds;

Clock::duration seconds(double s) {
    return std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(s));
}

enum class ReadResult { ok, timeout, broken };

// Responses are pretty-printed objects ended by a blank line; a complete
// object on one line is accepted as well.
ReadResult read_json(Subprocess& p, Clock::time_point deadline, Json& out) {
    std::string acc;
    std::string line;
    for (;;) {
        auto st = p.read_line(line, deadline);
        if (st == Subprocess::ReadStatus::timeout) return ReadResult::timeout;
        if (st == Subprocess::ReadStatus::eof) return ReadResult::broken;
        auto last = line.find_last_not_of(" \t\r");
        if (last == std::string::npos) {
            if (acc.empty()) continue;
            break;
        }
        acc += line;
        acc += '\n';
        if (line[last] == '}') {
            Json j = Json::parse(acc, nullptr, false);
            if (!j.is_discarded()) {
                out = std::move(j);
                return ReadResult::ok;
            }
        }
    }
    out = Json::parse(acc, nullptr, false);
    return out.is_discarded() || !out.is_object() ? ReadResult::broken : ReadResult::ok;
}

std::string first_line(const std::string& s) {
    auto nl = s.find('\n');
    std::string l = s.substr(0, nl);
    while (!l.empty() && (l.back() == '\r' || l.back() == ' ')) l.pop_back();
    return l;
}

CompileVerdict failure(CompileKind kind, std::string text) {
    CompileVerdict v;
    v.kind = kind;
    v.messages.push_back({MessageSeverity::error, std::move(text), {}});
    return v;
}

}  // namespace

struct ReplPool::Worker {
    int index = 0;
    Subprocess proc;
    std::atomic<pid_t> pid{-1};
    int env = 0;
    int served = 0;
    bool needs_restart = false;
    std::thread thread;
};

void PoolConfig::validate() const {
    if (workers < 1) throw validation_error("workers must be >= 1", {{"workers", workers}});
    if (!(timeout_s > 0.0) || !(proof_timeout_s > 0.0)) throw validation_error("timeout_s must be > 0");
    if (max_jobs_per_worker < 1) throw validation_error("max_jobs_per_worker must be >= 1");
    if (command.empty()) throw validation_error("REPL command is empty");
}

ReplPool::ReplPool(PoolConfig config) : config_(std::move(config)) {
    config_.validate();
    capacity_ = config_.queue_capacity ? config_.queue_capacity : 4 * static_cast<std::size_t>(config_.workers);

    if (!config_.version_command.empty()) {
        CapturedRun run;
        try {
            run = run_capture(config_.version_command, ms(30'000));
        } catch (const Error& e) {
            throw Error(ErrorCode::environment, std::string("prover toolchain not found: ") + e.what(),
                        {{"command", config_.version_command}});
        }
        if (run.timed_out || run.exit_code != 0) {
            throw Error(ErrorCode::environment, "prover version command failed",
                        {{"command", config_.version_command}, {"exit_code", run.exit_code}});
        }
        found_version_ = first_line(run.output);
        if (!config_.env_tag.empty() && run.output.find(config_.env_tag) == std::string::npos) {
            throw Error(ErrorCode::environment,
                        "prover version mismatch: found '" + found_version_ + "', expected '" + config_.env_tag + "'",
                        {{"found", found_version_}, {"expected", config_.env_tag}});
        }
    } else {
        found_version_ = config_.env_tag;
    }
    if (config_.record_dir) std::filesystem::create_directories(*config_.record_dir);

    for (int i = 0; i < config_.workers; ++i) {
        auto w = std::make_unique<Worker>();
        w->index = i;
        workers_.push_back(std::move(w));
    }
    for (auto& w : workers_) {
        Worker* wp = w.get();
        wp->thread = std::thread([this, wp] { worker_loop(*wp); });
    }

    std::unique_lock lk(mu_);
    ready_cv_.wait(lk, [&] { return ready_ + static_cast<int>(startup_errors_.size()) == config_.workers; });
    if (!startup_errors_.empty()) {
        std::string err = startup_errors_.front();
        lk.unlock();
        shutdown();
        throw Error(ErrorCode::environment, "REPL worker failed to start: " + err);
    }
}

ReplPool::~ReplPool() { shutdown(); }

bool ReplPool::start_process(Worker& w, std::string& error) {
    w.proc.kill();
    w.pid = -1;
    try {
        w.proc = Subprocess::spawn(config_.command);
    } catch (const Error& e) {
        error = e.what();
        return false;
    }
    w.pid = w.proc.pid();
    if (!w.proc.write_all(make_request(config_.header, std::nullopt).dump() + "\n\n")) {
        error = "worker closed its input during startup";
        w.proc.kill();
        w.pid = -1;
        return false;
    }
    Json resp;
    auto r = read_json(w.proc, Clock::now() + seconds(config_.startup_timeout_s), resp);
    if (r != ReadResult::ok) {
        error = r == ReadResult::timeout ? "header import timed out" : "worker exited during header import";
        w.proc.kill();
        w.pid = -1;
        return false;
    }
    auto parsed = parse_response(resp);
    for (const auto& m : parsed.messages) {
        if (m.severity == MessageSeverity::error) {
            error = "header import failed: " + m.text;
            w.proc.kill();
            w.pid = -1;
            return false;
        }
    }
    w.env = parsed.env.value_or(0);
    w.served = 0;
    return true;
}

void ReplPool::worker_loop(Worker& w) {
    {
        std::string err;
        bool ok = start_process(w, err);
        std::lock_guard lk(mu_);
        if (ok) {
            ++ready_;
        } else {
            startup_errors_.push_back(err);
        }
        ready_cv_.notify_all();
    }

    for (;;) {
        Job job;
        {
            std::unique_lock lk(mu_);
            not_empty_.wait(lk, [&] { return stopping_ || !queue_.empty(); });
            if (queue_.empty()) break;
            job = std::move(queue_.front());
            queue_.pop_front();
        }
        not_full_.notify_one();

        CompileVerdict v;
        try {
            v = run_job(w, job);
        } catch (const std::exception& e) {
            v = failure(CompileKind::worker_crash, e.what());
            w.needs_restart = true;
        }
        {
            std::lock_guard lk(mu_);
            ++stats_.completed;
            if (v.kind == CompileKind::timeout) ++stats_.timeouts;
            if (v.kind == CompileKind::worker_crash) ++stats_.crashes;
            stats_.max_job_ms = std::max(stats_.max_job_ms, v.elapsed_ms);
        }
        job.promise.set_value(std::move(v));
        if (w.needs_restart) restart(w);
    }
    w.proc.kill();
    w.pid = -1;
}

void ReplPool::restart(Worker& w) {
    w.needs_restart = false;
    std::string err;
    if (!start_process(w, err)) spdlog::warn("REPL worker {} restart failed: {}", w.index, err);
    std::lock_guard lk(mu_);
    ++stats_.restarts;
}

CompileVerdict ReplPool::run_job(Worker& w, Job& job) {

    const auto start = Clock::now();
    auto finish = [&](CompileVerdict v) {
        v.elapsed_ms = std::chrono::duration_cast<ms>(Clock::now() - start).count();
        v.env_tag = found_version_;
        return v;
    };

    if (!w.proc.running()) {
        restart(w);
        if (!w.proc.running()) return finish(failure(CompileKind::worker_crash, "REPL worker unavailable"));
    }

    const double budget = job.expects_proof ? config_.proof_timeout_s : config_.timeout_s;
    Json resp;
    ReadResult r = ReadResult::broken;
    if (w.proc.write_all(make_request(job.cmd, w.env).dump() + "\n\n")) {
        r = read_json(w.proc, start + seconds(budget), resp);
    }

    if (r == ReadResult::timeout) {
        record(job, nullptr, true);
        w.needs_restart = true;
        return finish(failure(CompileKind::timeout, "timed out after " + std::to_string(budget) + " s"));
    }
    if (r == ReadResult::broken) {
        w.needs_restart = true;
        return finish(failure(CompileKind::worker_crash, "REPL worker exited mid-job"));
    }

    record(job, resp, false);
    CompileVerdict v;
    v.messages = parse_response(resp).messages;
    v.kind = classify_response(v.messages, false, job.expects_proof);
    v = finish(std::move(v));
    if (++w.served >= config_.max_jobs_per_worker) w.needs_restart = true;
    return v;
}

void ReplPool::record(const Job& job, const Json& response, bool had_timeout) {
    if (!config_.record_dir) return;
    ReplFixture f;
    char name[32];
    std::snprintf(name, sizeof name, "%06llu", static_cast<unsigned long long>(record_seq_.fetch_add(1)));
    f.name = name;
    f.request = job.cmd;
    f.expects_proof = job.expects_proof;
    f.had_timeout = had_timeout;
    f.response = response;
    f.expected = replay(f);
    write_file_atomic(*config_.record_dir / (f.name + ".json"), to_json(f).dump(2) + "\n");
}

std::future<CompileVerdict> ReplPool::submit(std::string cmd, bool expects_proof) {
    std::unique_lock lk(mu_);
    not_full_.wait(lk, [&] { return stopping_ || queue_.size() < capacity_; });
    if (stopping_) throw validation_error("REPL pool is shut down");
    Job job{std::move(cmd), expects_proof, {}};
    auto fut = job.promise.get_future();
    queue_.push_back(std::move(job));
    lk.unlock();
    not_empty_.notify_one();
    return fut;
}

std::optional<std::future<CompileVerdict>> ReplPool::try_submit(std::string cmd, bool expects_proof) {
    std::unique_lock lk(mu_);
    if (stopping_) throw validation_error("REPL pool is shut down");
    if (queue_.size() >= capacity_) return std::nullopt;
    Job job{std::move(cmd), expects_proof, {}};
    auto fut = job.promise.get_future();
    queue_.push_back(std::move(job));
    lk.unlock();
    not_empty_.notify_one();
    return fut;
}

CompileVerdict ReplPool::check_statement(std::string_view statement_text) {
    return submit(std::string(statement_text), false).get();
}

CompileVerdict ReplPool::check_proof(std::string_view statement_text, std::string_view proof_text) {
    return submit(with_proof(statement_text, proof_text), true).get();
}

void ReplPool::shutdown() {
    {
        std::lock_guard lk(mu_);
        stopping_ = true;
    }
    not_empty_.notify_all();
    not_full_.notify_all();
    for (auto& w : workers_) {
        if (w->thread.joinable()) w->thread.join();
    }
}

std::vector<pid_t> ReplPool::worker_pids() const {
    std::vector<pid_t> out;
    for (const auto& w : workers_) out.push_back(w->pid.load());
    return out;
}

PoolStats ReplPool::stats() const {
    std::lock_guard lk(mu_);
    return stats_;
}

}  // namespace forge::repl
