#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "forge/core/json_io.hpp"

namespace forge {

enum class OpenMode { reader, writer };

/// What load-time recovery did to the file.
struct JournalRecovery {
    std::size_t records = 0;
    std::size_t dropped_bytes = 0;  // torn or corrupt trailing record
    bool truncated = false;         // writer mode rewrote the tail away
};

/// Exclusive advisory lock on a file, held for the object's lifetime.
class FileLock {
public:
    /// Throws Error{lock} if another writer holds it.
    explicit FileLock(const std::filesystem::path& path);
    ~FileLock();
    FileLock(FileLock&& o) noexcept;
    FileLock& operator=(FileLock&& o) noexcept;
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

private:
    int fd_ = -1;
};

/// Line-level file access behind Journal<T>: locking, durable appends, and
/// torn-tail recovery. One JSON object per line, UTF-8.
class JournalFile {
public:
    JournalFile(std::filesystem::path path, OpenMode mode, bool sync = true);
    ~JournalFile();
    JournalFile(JournalFile&& o) noexcept;
    JournalFile& operator=(JournalFile&&) = delete;
    JournalFile(const JournalFile&) = delete;

    /// Reads every complete record. A torn or unparseable last line is
    /// dropped (and truncated away in writer mode) with a warning; a bad line
    /// anywhere else is corruption and throws Error{environment}.
    std::vector<Json> load(JournalRecovery& recovery);

    /// Appends one line and flushes it to stable storage before returning.
    void append_line(const std::string& line);

    const std::filesystem::path& path() const noexcept { return path_; }
    OpenMode mode() const noexcept { return mode_; }

private:
    std::filesystem::path path_;
    OpenMode mode_;
    bool sync_;
    int fd_ = -1;
};

/// Append-only journal of typed records. Records load in append order;
/// append returns a receipt (the record's sequence number).
template <typename Record>
class Journal {
public:
    using Codec = RecordCodec<Record>;

    Journal(std::filesystem::path path, OpenMode mode, bool sync = true) : file_(std::move(path), mode, sync) {
        for (const auto& j : file_.load(recovery_)) {
            Record r = Codec::decode(j);
            if (auto k = Codec::key(r)) {
                if (!keys_.insert(*k).second) {
                    throw Error(ErrorCode::environment, "journal has duplicate key '" + *k + "'",
                                {{"path", file_.path().string()}});
                }
            }
            records_.push_back(std::move(r));
        }
    }

    std::span<const Record> records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool contains(const std::string& key) const { return keys_.count(key) != 0; }
    const JournalRecovery& recovery() const noexcept { return recovery_; }
    const std::filesystem::path& path() const noexcept { return file_.path(); }

    std::uint64_t append(const Record& r) {
        if (file_.mode() != OpenMode::writer) {
            throw Error(ErrorCode::validation, "journal opened read-only", {{"path", file_.path().string()}});
        }
        auto key = Codec::key(r);
        if (key && keys_.count(*key)) {
            throw validation_error("duplicate record key '" + *key + "'", {{"key", *key}});
        }
        file_.append_line(dump_line(Codec::encode(r)));
        if (key) keys_.insert(*key);
        records_.push_back(r);
        return records_.size() - 1;
    }

private:
    JournalFile file_;
    JournalRecovery recovery_;
    std::vector<Record> records_;
    std::unordered_set<std::string> keys_;
};

}  // namespace forge
