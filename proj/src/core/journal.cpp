#include "forge/core/journal.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include <spdlog/spdlog.h>

namespace forge {

namespace {

Error io_error(const std::string& what, const std::filesystem::path& path) {
    return Error(ErrorCode::environment, what + ": " + std::strerror(errno), {{"path", path.string()}});
}

void lock_exclusive(int fd, const std::filesystem::path& path) {
    if (::flock(fd, LOCK_EX | LOCK_NB) != 0) {
        if (errno == EWOULDBLOCK) {
            throw Error(ErrorCode::lock, "another writer holds " + path.string(), {{"path", path.string()}});
        }
        throw io_error("flock failed", path);
    }
}

}  // namespace

FileLock::FileLock(const std::filesystem::path& path) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw io_error("cannot open lock file", path);
    try {
        lock_exclusive(fd_, path);
    } catch (...) {
        ::close(fd_);
        fd_ = -1;
        throw;
    }
}

FileLock::~FileLock() {
    if (fd_ >= 0) ::close(fd_);
}

FileLock::FileLock(FileLock&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}

FileLock& FileLock::operator=(FileLock&& o) noexcept {
    if (this != &o) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
}

JournalFile::JournalFile(std::filesystem::path path, OpenMode mode, bool sync)
    : path_(std::move(path)), mode_(mode), sync_(sync) {
    if (mode_ == OpenMode::writer) {
        if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
        fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
        if (fd_ < 0) throw io_error("cannot open journal", path_);
        try {
            lock_exclusive(fd_, path_);
        } catch (...) {
            ::close(fd_);
            fd_ = -1;
            throw;
        }
    } else {
        fd_ = ::open(path_.c_str(), O_RDONLY | O_CLOEXEC);
        if (fd_ < 0 && errno != ENOENT) throw io_error("cannot open journal", path_);
    }
}

JournalFile::~JournalFile() {
    if (fd_ >= 0) ::close(fd_);
}

JournalFile::JournalFile(JournalFile&& o) noexcept
    : path_(std::move(o.path_)), mode_(o.mode_), sync_(o.sync_), fd_(std::exchange(o.fd_, -1)) {}

std::vector<Json> JournalFile::load(JournalRecovery& recovery) {
    recovery = {};
    std::vector<Json> out;
    if (fd_ < 0) return out;  // reader on a journal that does not exist yet

    std::string data;
    char buf[1 << 16];
    if (::lseek(fd_, 0, SEEK_SET) < 0) throw io_error("seek failed", path_);
    for (;;) {
        ssize_t n = ::read(fd_, buf, sizeof buf);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw io_error("read failed", path_);
        }
        if (n == 0) break;
        data.append(buf, static_cast<std::size_t>(n));
    }

    std::size_t good_end = 0;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < data.size()) {
        auto nl = data.find('\n', pos);
        ++line_no;
        if (nl == std::string::npos) break;  // torn final write: no terminator
        std::string_view line(data.data() + pos, nl - pos);
        bool last = nl + 1 == data.size();
        if (!line.empty()) {
            Json parsed = Json::parse(line, nullptr, false);
            if (parsed.is_discarded() || !parsed.is_object()) {
                if (!last) {
                    throw Error(ErrorCode::environment, "corrupt journal record",
                                {{"path", path_.string()}, {"line", line_no}});
                }
                break;
            }
            out.push_back(std::move(parsed));
        }
        pos = nl + 1;
        good_end = pos;
    }

    recovery.records = out.size();
    recovery.dropped_bytes = data.size() - good_end;
    if (recovery.dropped_bytes > 0) {
        spdlog::warn("journal {}: dropping {} bytes of torn or corrupt trailing record", path_.string(),
                     recovery.dropped_bytes);
        if (mode_ == OpenMode::writer) {
            if (::ftruncate(fd_, static_cast<off_t>(good_end)) != 0) throw io_error("truncate failed", path_);
            if (sync_) ::fsync(fd_);
            recovery.truncated = true;
        }
    }
    return out;
}

void JournalFile::append_line(const std::string& line) {
    if (mode_ != OpenMode::writer) throw Error(ErrorCode::validation, "journal opened read-only");
    std::string buf = line;
    buf.push_back('\n');
    const char* p = buf.data();
    std::size_t left = buf.size();
    while (left > 0) {
        ssize_t n = ::write(fd_, p, left);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw io_error("append failed", path_);
        }
        p += n;
        left -= static_cast<std::size_t>(n);
    }
    if (sync_ && ::fdatasync(fd_) != 0) throw io_error("fdatasync failed", path_);
}

}  // namespace forge
