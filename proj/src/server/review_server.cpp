#include "forge/server/review_server.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "forge/core/json_io.hpp"
#include "forge/pipeline/review.hpp"
#include "forge/pipeline/round.hpp"

namespace forge::server {

namespace {

constexpr const char* kJson = "application/json";

constexpr const char* kPlaceholderPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>forge review</title></head>
<body>
<h1>forge review</h1>
<p>The review UI is not installed. API endpoints:</p>
<ul>
<li>GET /api/queue?round=N</li>
<li>POST /api/check</li>
<li>POST /api/verdict</li>
<li>GET /api/stats?round=N</li>
</ul>
</body></html>
)";

void send(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, const Error& e) { send(res, status, e.to_json()); }

std::optional<Json> parse_body(const httplib::Request& req, httplib::Response& res) {
    Json j = Json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        send_error(res, 400, validation_error("request body must be a JSON object"));
        return std::nullopt;
    }
    return j;
}

// ?round=N must name the served round when given.
bool check_round(const httplib::Request& req, httplib::Response& res, int round) {
    if (!req.has_param("round")) return true;
    const auto v = req.get_param_value("round");
    if (v == std::to_string(round)) return true;
    send_error(res, 404, Error(ErrorCode::validation, "this server reviews round " + std::to_string(round),
                               {{"round", round}, {"requested", v}}));
    return false;
}

}  // namespace

ReviewServer::ReviewServer(Store& store, repl::StatementChecker& checker, ReviewServerOptions options)
    : store_(store), checker_(checker), options_(std::move(options)), http_(std::make_unique<httplib::Server>()) {
    if (store_.mode() != OpenMode::writer) throw validation_error("review server needs a writable store");
    routes();
}

ReviewServer::~ReviewServer() { stop(); }

void ReviewServer::routes() {
    const int round = options_.round;

    http_->Get("/api/queue", [this, round](const httplib::Request& req, httplib::Response& res) {
        if (!check_round(req, res, round)) return;
        std::lock_guard lk(store_mu_);
        Json items = Json::array();
        auto batch = pipeline::load_review_batch(store_, round);
        if (batch) {
            std::map<std::string, TranslationCandidate> by_id;
            for (auto& c : store_.load_round(round)) by_id.emplace(c.key().str(), std::move(c));
            std::map<std::string, Problem> problems;
            for (const auto& p : store_.problems().records()) problems.emplace(p.id, p);
            for (const auto& id : batch->items) {
                auto it = by_id.find(id);
                if (it == by_id.end() || it->second.human != HumanVerdict::unreviewed) continue;
                const auto& c = it->second;
                Json item;
                item["id"] = id;
                item["candidate"] = to_json(c);
                auto p = problems.find(c.problem_id);
                item["problem"] = p == problems.end() ? Json(nullptr) : to_json(p->second);
                item["lint"] = to_json(c.lint);
                item["compile"] = c.compile ? to_json(*c.compile) : Json(nullptr);
                item["back_translation"] = c.back_translation ? Json(*c.back_translation) : Json(nullptr);
                item["nli"] = std::string(to_string(c.nli));
                items.push_back(std::move(item));
            }
        }
        send(res, 200, items);
    });

    http_->Post("/api/check", [this](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req, res);
        if (!body) return;
        if (!body->contains("statement_text") || !(*body)["statement_text"].is_string()) {
            send_error(res, 400, validation_error("invalid request", {{"fields", Json::array({{{"field", "statement_text"}, {"error", "required string"}}})}}));
            return;
        }
        try {
            auto v = checker_.try_check_statement((*body)["statement_text"].get<std::string>());
            if (!v) {
                res.set_header("Retry-After", std::to_string(options_.retry_after_s));
                send_error(res, 503, Error(ErrorCode::transport, "prover pool is saturated",
                                           {{"retry_after_s", options_.retry_after_s}}));
                return;
            }
            send(res, 200, to_json(*v));
        } catch (const Error& e) {
            send_error(res, 503, e);
        }
    });

    http_->Post("/api/verdict", [this, round](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req, res);
        if (!body) return;
        const Json& b = *body;
        Json fields = Json::array();
        auto field_error = [&](const char* f, const char* why) { fields.push_back({{"field", f}, {"error", why}}); };
        LabelRecord label;
        if (!b.contains("candidate_id") || !b["candidate_id"].is_string() || b["candidate_id"].get<std::string>().empty()) {
            field_error("candidate_id", "required string");
        } else {
            label.candidate_id = b["candidate_id"].get<std::string>();
        }
        if (!b.contains("verdict") || !b["verdict"].is_string()) {
            field_error("verdict", "required: correct, modified or rejected");
        } else {
            auto v = b["verdict"].get<std::string>();
            if (v == "correct") label.verdict = HumanVerdict::correct;
            else if (v == "modified") label.verdict = HumanVerdict::modified;
            else if (v == "rejected") label.verdict = HumanVerdict::rejected;
            else field_error("verdict", "must be correct, modified or rejected");
        }
        if (b.contains("modified_text") && !b["modified_text"].is_null()) {
            if (b["modified_text"].is_string()) label.modified_text = b["modified_text"].get<std::string>();
            else field_error("modified_text", "must be a string");
        }
        if (label.verdict == HumanVerdict::modified && !label.modified_text) {
            field_error("modified_text", "required when verdict is modified");
        }
        if (b.contains("note") && !b["note"].is_null()) {
            if (b["note"].is_string()) label.note = b["note"].get<std::string>();
            else field_error("note", "must be a string");
        }
        if (!fields.empty()) {
            send_error(res, 400, validation_error("invalid verdict submission", {{"fields", fields}}));
            return;
        }

        std::lock_guard lk(store_mu_);
        try {
            std::optional<TranslationCandidate> cand;
            for (auto& c : store_.load_round(round)) {
                if (c.key().str() == label.candidate_id) cand = std::move(c);
            }
            if (!cand) {
                send_error(res, 404, validation_error("unknown candidate in round " + std::to_string(round),
                                                      {{"candidate_id", label.candidate_id}}));
                return;
            }
            auto vetted = pipeline::vet_label(*cand, label, checker_);
            if (auto* r = std::get_if<pipeline::LabelRejection>(&vetted)) {
                Json details{{"candidate_id", r->candidate_id}};
                details["compile"] = r->compile ? to_json(*r->compile) : Json(nullptr);
                send_error(res, 422, validation_error(r->reason, details));
                return;
            }
            const auto& rec = std::get<LabelRecord>(vetted);
            store_.labels(round).append(rec);
            if (auto m = store_.manifest(round)) {
                auto current = store_.load_round(round);
                m->human_labels_added = std::count_if(current.begin(), current.end(), [](const TranslationCandidate& c) {
                    return c.human == HumanVerdict::correct || c.human == HumanVerdict::modified;
                });
                store_.write_manifest(*m);
            }
            send(res, 200, {{"stored", to_json(rec)}});
        } catch (const Error& e) {
            send_error(res, e.code() == ErrorCode::validation ? 400 : 500, e);
        }
    });

    http_->Get("/api/stats", [this, round](const httplib::Request& req, httplib::Response& res) {
        if (!check_round(req, res, round)) return;
        std::lock_guard lk(store_mu_);
        try {
            Json out;
            out["manifest"] = to_json(pipeline::current_manifest(store_, round));
            auto rows = pipeline::round_accuracy(store_, round);
            Json arr = Json::array();
            for (const auto& r : rows) {
                arr.push_back({{"tag", r.tag},
                               {"count", r.count},
                               {"sampled_correct", r.sampled_correct},
                               {"sampled_total", r.sampled_total}});
            }
            out["accuracy"] = {{"rows", arr},
                               {"weighted_average", rows.empty() ? Json(nullptr) : Json(weighted_accuracy(rows))}};
            send(res, 200, out);
        } catch (const Error& e) {
            send_error(res, 500, e);
        }
    });

    if (options_.static_dir) {
        if (!http_->set_mount_point("/", options_.static_dir->string())) {
            throw validation_error("static directory not found: " + options_.static_dir->string());
        }
    } else {
        http_->Get("/", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(kPlaceholderPage, "text/html; charset=utf-8");
        });
    }
}

int ReviewServer::bind() {
    if (options_.port == 0) {
        port_ = http_->bind_to_any_port(options_.host);
    } else {
        port_ = http_->bind_to_port(options_.host, options_.port) ? options_.port : -1;
    }
    if (port_ <= 0) {
        throw Error(ErrorCode::environment, "cannot bind " + options_.host + ":" + std::to_string(options_.port));
    }
    return port_;
}

int ReviewServer::start() {
    int p = bind();
    thread_ = std::thread([this] { http_->listen_after_bind(); });
    http_->wait_until_ready();
    return p;
}

void ReviewServer::run() {
    bind();
    spdlog::info("review server for round {} on http://{}:{}/", options_.round, options_.host, port_);
    http_->listen_after_bind();
}

void ReviewServer::stop() {
    if (http_) http_->stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace forge::server
