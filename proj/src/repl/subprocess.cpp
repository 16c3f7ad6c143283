#include "forge/repl/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <utility>

#include "forge/core/errors.hpp"

extern char** environ;

namespace forge::repl {

namespace {

int remaining_ms(Clock::time_point deadline) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (left <= 0) return 0;
    return left > 60'000 ? 60'000 : static_cast<int>(left);
}

}  // namespace

Subprocess Subprocess::spawn(const std::vector<std::string>& argv) {
    if (argv.empty()) throw Error(ErrorCode::environment, "empty command");
    static const bool sigpipe_ignored = [] {
        ::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)sigpipe_ignored;

    int to_child[2];
    int from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) throw Error(ErrorCode::environment, "pipe failed");
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
        ::close(to_child[0]);
        ::close(to_child[1]);
        throw Error(ErrorCode::environment, "pipe failed");
    }

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, to_child[0], 0);
    posix_spawn_file_actions_adddup2(&actions, from_child[1], 1);
    posix_spawn_file_actions_addopen(&actions, 2, "/dev/null", O_WRONLY, 0);

    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    pid_t pid = -1;
    int rc = ::posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(to_child[0]);
    ::close(from_child[1]);
    if (rc != 0) {
        ::close(to_child[1]);
        ::close(from_child[0]);
        throw Error(ErrorCode::environment, "cannot start '" + argv[0] + "': " + std::strerror(rc),
                    {{"command", argv[0]}});
    }

    Subprocess p;
    p.pid_ = pid;
    p.in_fd_ = to_child[1];
    p.out_fd_ = from_child[0];
    return p;
}

Subprocess::~Subprocess() { kill(); }

Subprocess::Subprocess(Subprocess&& o) noexcept
    : pid_(std::exchange(o.pid_, -1)),
      in_fd_(std::exchange(o.in_fd_, -1)),
      out_fd_(std::exchange(o.out_fd_, -1)),
      buffer_(std::move(o.buffer_)) {}

Subprocess& Subprocess::operator=(Subprocess&& o) noexcept {
    if (this != &o) {
        kill();
        pid_ = std::exchange(o.pid_, -1);
        in_fd_ = std::exchange(o.in_fd_, -1);
        out_fd_ = std::exchange(o.out_fd_, -1);
        buffer_ = std::move(o.buffer_);
    }
    return *this;
}

bool Subprocess::write_all(std::string_view data) {
    if (in_fd_ < 0) return false;
    while (!data.empty()) {
        ssize_t n = ::write(in_fd_, data.data(), data.size());
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
    return true;
}

Subprocess::ReadStatus Subprocess::read_line(std::string& line, Clock::time_point deadline) {
    for (;;) {
        auto nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            line.assign(buffer_, 0, nl);
            buffer_.erase(0, nl + 1);
            return ReadStatus::ok;
        }
        if (out_fd_ < 0) return ReadStatus::eof;
        int wait = remaining_ms(deadline);
        if (wait == 0 && Clock::now() >= deadline) return ReadStatus::timeout;
        pollfd pfd{out_fd_, POLLIN, 0};
        int rc = ::poll(&pfd, 1, wait);
        if (rc < 0) {
            if (errno == EINTR) continue;
            return ReadStatus::eof;
        }
        if (rc == 0) {
            if (Clock::now() >= deadline) return ReadStatus::timeout;
            continue;
        }
        char buf[8192];
        ssize_t n = ::read(out_fd_, buf, sizeof buf);
        if (n < 0) {
            if (errno == EINTR || errno == EAGAIN) continue;
            return ReadStatus::eof;
        }
        if (n == 0) return ReadStatus::eof;
        buffer_.append(buf, static_cast<std::size_t>(n));
    }
}

std::string Subprocess::take_buffer() { return std::exchange(buffer_, {}); }

void Subprocess::close_fds() {
    if (in_fd_ >= 0) ::close(in_fd_);
    if (out_fd_ >= 0) ::close(out_fd_);
    in_fd_ = out_fd_ = -1;
}

void Subprocess::kill() {
    close_fds();
    if (pid_ > 0) {
        ::kill(pid_, SIGKILL);
        int status = 0;
        while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
        }
        pid_ = -1;
    }
    buffer_.clear();
}

void Subprocess::close_stdin() {
    if (in_fd_ >= 0) ::close(in_fd_);
    in_fd_ = -1;
}

int Subprocess::wait_exit() {
    if (pid_ <= 0) return -1;
    int status = 0;
    while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
    }
    pid_ = -1;
    close_fds();
    return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
}

CapturedRun run_capture(const std::vector<std::string>& argv, std::chrono::milliseconds timeout) {
    CapturedRun run;
    Subprocess p = Subprocess::spawn(argv);
    p.close_stdin();
    const auto deadline = Clock::now() + timeout;
    std::string line;
    for (;;) {
        auto st = p.read_line(line, deadline);
        if (st == Subprocess::ReadStatus::ok) {
            run.output += line;
            run.output += '\n';
        } else if (st == Subprocess::ReadStatus::timeout) {
            run.timed_out = true;
            p.kill();
            return run;
        } else {
            break;
        }
    }
    run.output += p.take_buffer();
    run.exit_code = p.wait_exit();
    return run;
}

std::vector<std::string> split_command(std::string_view command) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    bool any = false;
    for (char c : command) {
        if (c == '"') {
            quoted = !quoted;
            any = true;
            continue;
        }
        if (!quoted && (c == ' ' || c == '\t' || c == '\n')) {
            if (any) out.push_back(std::move(cur));
            cur.clear();
            any = false;
            continue;
        }
        cur.push_back(c);
        any = true;
    }
    if (any) out.push_back(std::move(cur));
    return out;
}

}  // namespace forge::repl
