#pragma once

#include <sys/types.h>

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

namespace forge::repl {

using Clock = std::chrono::steady_clock;

/// Child process with piped stdin/stdout; stderr goes to /dev/null.
/// The destructor kills and reaps the child.
class Subprocess {
public:
    /// Throws Error{environment} if the program cannot be started.
    static Subprocess spawn(const std::vector<std::string>& argv);

    Subprocess() = default;
    ~Subprocess();
    Subprocess(Subprocess&& o) noexcept;
    Subprocess& operator=(Subprocess&& o) noexcept;
    Subprocess(const Subprocess&) = delete;
    Subprocess& operator=(const Subprocess&) = delete;

    bool running() const noexcept { return pid_ > 0; }
    pid_t pid() const noexcept { return pid_; }

    /// False when the child has gone away.
    bool write_all(std::string_view data);

    enum class ReadStatus { ok, timeout, eof };

    /// One line without its terminator.
    ReadStatus read_line(std::string& line, Clock::time_point deadline);

    void close_stdin();

    /// Blocks until the child exits; returns its exit status (128+signal if killed).
    int wait_exit();

    /// Bytes read after the last complete line.
    std::string take_buffer();

    /// SIGKILL and reap. Safe to call twice.
    void kill();

private:
    void close_fds();

    pid_t pid_ = -1;
    int in_fd_ = -1;   // child's stdin
    int out_fd_ = -1;  // child's stdout
    std::string buffer_;
};

struct CapturedRun {
    int exit_code = -1;
    std::string output;
    bool timed_out = false;
};

/// Runs argv to completion (or the timeout) and returns its stdout.
CapturedRun run_capture(const std::vector<std::string>& argv, std::chrono::milliseconds timeout);

/// Splits a command line on whitespace; double quotes group words.
std::vector<std::string> split_command(std::string_view command);

}  // namespace forge::repl
