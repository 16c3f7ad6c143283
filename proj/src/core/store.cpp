#include "forge/core/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace forge {

namespace fs = std::filesystem;

struct Store::RoundJournals {
    std::unique_ptr<Journal<TranslationCandidate>> candidates;
    std::unique_ptr<Journal<RawTranslation>> raw;
    std::unique_ptr<Journal<LabelRecord>> labels;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::environment, "cannot read " + path.string(), {{"path", path.string()}});
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
        if (fd < 0) throw Error(ErrorCode::environment, "cannot write " + tmp.string());
        const char* p = content.data();
        std::size_t left = content.size();
        while (left > 0) {
            ssize_t n = ::write(fd, p, left);
            if (n < 0) {
                ::close(fd);
                throw Error(ErrorCode::environment, "write failed for " + tmp.string());
            }
            p += n;
            left -= static_cast<std::size_t>(n);
        }
        ::fsync(fd);
        ::close(fd);
    }
    fs::rename(tmp, path);
}

std::vector<Json> read_jsonl(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::environment, "cannot read " + path.string(), {{"path", path.string()}});
    std::vector<Json> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw validation_error("invalid JSON on line " + std::to_string(line_no) + " of " + path.string(),
                                   {{"path", path.string()}, {"line", line_no}});
        }
        out.push_back(std::move(j));
    }
    return out;
}

Store::Store(fs::path root, OpenMode mode, bool sync) : root_(std::move(root)), mode_(mode), sync_(sync) {}
Store::Store(Store&&) noexcept = default;
Store& Store::operator=(Store&&) noexcept = default;
Store::~Store() = default;

Store Store::open(const fs::path& root, OpenMode mode, bool sync) {
    Store s(root, mode, sync);
    const fs::path marker = root / "store.json";
    if (mode == OpenMode::writer) {
        fs::create_directories(root);
        s.lock_.emplace(root / ".lock");
        if (!fs::exists(marker)) {
            Json j;
            j["format"] = "forge-store";
            j["version"] = kStoreFormatVersion;
            write_file_atomic(marker, j.dump(2) + "\n");
        }
    } else if (!fs::exists(marker)) {
        throw Error(ErrorCode::environment, "no store at " + root.string(), {{"path", root.string()}});
    }
    Json j = Json::parse(read_file(marker), nullptr, false);
    if (j.is_discarded() || !j.contains("version")) {
        throw Error(ErrorCode::environment, "unreadable store marker", {{"path", marker.string()}});
    }
    int found = j["version"].get<int>();
    if (found != kStoreFormatVersion) {
        throw Error(ErrorCode::environment,
                    "store format version " + std::to_string(found) + ", expected " +
                        std::to_string(kStoreFormatVersion),
                    {{"found", found}, {"expected", kStoreFormatVersion}});
    }
    return s;
}

Journal<Problem>& Store::problems() {
    if (!problems_) problems_ = std::make_unique<Journal<Problem>>(root_ / "problems.jsonl", mode_, sync_);
    return *problems_;
}

Journal<RawTranslation>& Store::extractions() {
    if (!extractions_) {
        extractions_ = std::make_unique<Journal<RawTranslation>>(root_ / "extractions.jsonl", mode_, sync_);
    }
    return *extractions_;
}

fs::path Store::round_dir(int round) const { return root_ / "rounds" / std::to_string(round); }

Store::RoundJournals& Store::round_state(int round) {
    if (round < 0) throw validation_error("round must be non-negative");
    auto& slot = rounds_[round];
    if (!slot) slot = std::make_unique<RoundJournals>();
    return *slot;
}

Journal<TranslationCandidate>& Store::candidates(int round) {
    auto& st = round_state(round);
    if (!st.candidates) {
        st.candidates =
            std::make_unique<Journal<TranslationCandidate>>(round_dir(round) / "candidates.jsonl", mode_, sync_);
    }
    return *st.candidates;
}

Journal<RawTranslation>& Store::raw(int round) {
    auto& st = round_state(round);
    if (!st.raw) st.raw = std::make_unique<Journal<RawTranslation>>(round_dir(round) / "raw.jsonl", mode_, sync_);
    return *st.raw;
}

Journal<LabelRecord>& Store::labels(int round) {
    auto& st = round_state(round);
    if (!st.labels) {
        st.labels = std::make_unique<Journal<LabelRecord>>(round_dir(round) / "labels.jsonl", mode_, sync_);
    }
    return *st.labels;
}

std::vector<int> Store::rounds() const {
    std::vector<int> out;
    const fs::path dir = root_ / "rounds";
    if (!fs::exists(dir)) return out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_directory()) continue;
        const auto name = entry.path().filename().string();
        if (!name.empty() && std::all_of(name.begin(), name.end(), ::isdigit)) out.push_back(std::stoi(name));
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool Store::has_round(int round) const { return fs::exists(round_dir(round)); }

std::optional<RoundManifest> Store::manifest(int round) const {
    const fs::path p = round_dir(round) / "manifest.json";
    if (!fs::exists(p)) return std::nullopt;
    Json j = Json::parse(read_file(p), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::environment, "unreadable manifest", {{"path", p.string()}});
    return manifest_from_json(j);
}

void Store::write_manifest(const RoundManifest& m) {
    if (mode_ != OpenMode::writer) throw validation_error("store opened read-only");
    m.validate();
    write_file_atomic(round_dir(m.round) / "manifest.json", to_json(m).dump(2) + "\n");
}

std::vector<TranslationCandidate> Store::load_round(int round) {
    auto journaled = candidates(round).records();
    std::vector<TranslationCandidate> out(journaled.begin(), journaled.end());
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < out.size(); ++i) index[out[i].key().str()] = i;
    for (const auto& label : labels(round).records()) {
        auto it = index.find(label.candidate_id);
        if (it == index.end()) continue;
        auto& c = out[it->second];
        c.human = label.verdict;
        c.modified_text = label.verdict == HumanVerdict::modified ? label.modified_text : std::nullopt;
    }
    return out;
}

std::optional<std::vector<VerdictTallyRow>> Store::verdict_table(int round) const {
    const fs::path p = round_dir(round) / "verdict_table.jsonl";
    if (!fs::exists(p)) return std::nullopt;
    std::vector<VerdictTallyRow> rows;
    for (const auto& j : read_jsonl(p)) {
        VerdictTallyRow r;
        r.compile = compile_kind_from_string(j.at("compile").get<std::string>());
        r.nli = judgement_from_string(j.at("nli").get<std::string>());
        if (j.contains("tags")) r.tags = j.at("tags").get<std::vector<std::string>>();
        r.count = j.at("count").get<std::int64_t>();
        rows.push_back(std::move(r));
    }
    return rows;
}

std::optional<std::vector<AccuracyRow>> Store::accuracy_rows(int round) const {
    const fs::path p = round_dir(round) / "accuracy.jsonl";
    if (!fs::exists(p)) return std::nullopt;
    std::vector<AccuracyRow> rows;
    for (const auto& j : read_jsonl(p)) {
        rows.push_back({normalize_tag(j.at("tag").get<std::string>()), j.at("count").get<std::int64_t>(),
                        j.at("sampled_correct").get<std::int64_t>(), j.at("sampled_total").get<std::int64_t>()});
    }
    return rows;
}

TagIndex Store::tag_index() {
    TagIndex idx;
    for (const auto& p : problems().records()) idx[p.id] = p.tags;
    return idx;
}

void Store::reload() {
    problems_.reset();
    extractions_.reset();
    rounds_.clear();
}

}  // namespace forge
