#include <doctest.h>

#include <httplib.h>

#include "forge/core/json_io.hpp"
#include "forge/pipeline/review.hpp"
#include "forge/pipeline/round.hpp"
#include "forge/pipeline/stages.hpp"
#include "forge/repl/simulator.hpp"
#include "forge/server/review_server.hpp"
#include "test_util.hpp"

using namespace forge;

namespace {

// Always reports a saturated pool.
class BusyChecker final : public repl::StatementChecker {
public:
    CompileVerdict check_statement(std::string_view) override { throw Error(ErrorCode::transport, "busy"); }
    CompileVerdict check_proof(std::string_view, std::string_view) override { throw Error(ErrorCode::transport, "busy"); }
    std::optional<CompileVerdict> try_check_statement(std::string_view) override { return std::nullopt; }
    std::string env_tag() const override { return "busy"; }
};

// Runs the mock round into `root` and queues its failures for review.
void seed_round(const std::filesystem::path& root) {
    auto store = Store::open(root, OpenMode::writer, false);
    auto dir = test::data_dir() / "mock_round";
    auto cfg = pipeline::RoundConfig::load(dir / "config.json");
    auto gw = pipeline::make_gateways(cfg);
    repl::SimulatedChecker sim;
    pipeline::FaultInjector none;
    pipeline::ingest(store, dir / "posts", gw, none);
    pipeline::run_round(store, cfg, gw, sim, none);
    pipeline::enqueue_review(store, 1, pipeline::ReviewStrategy::pattern_triage, 0);
}

Json body_of(const httplib::Result& r) {
    REQUIRE(r);
    return Json::parse(r->body);
}

httplib::Result post(httplib::Client& c, const std::string& path, const Json& body) {
    return c.Post(path, body.dump(), "application/json");
}

}  // namespace

TEST_CASE("review API") {
    test::TempDir dir;
    seed_round(dir.path());
    auto store = Store::open(dir.path(), OpenMode::writer, false);
    repl::SimulatedChecker sim;
    server::ReviewServer srv(store, sim, {.round = 1});
    const int port = srv.start();
    httplib::Client client("127.0.0.1", port);

    auto queue = body_of(client.Get("/api/queue?round=1"));
    auto batch = pipeline::load_review_batch(store, 1);
    REQUIRE(batch);
    REQUIRE(queue.size() == batch->items.size());
    CHECK(queue.size() == 20);
    for (std::size_t i = 0; i < queue.size(); ++i) CHECK(queue[i].at("id") == batch->items[i]);
    CHECK(queue[0].contains("lint"));
    CHECK(queue[0].at("problem").at("id") == queue[0].at("candidate").at("problem_id"));
    CHECK(client.Get("/api/queue?round=2")->status == 404);

    SUBCASE("check compiles without writing") {
        auto ok = post(client, "/api/check", {{"statement_text", "theorem t (a b : ℝ) (h : a ≤ b) : a ≤ b := by sorry"}});
        CHECK(ok->status == 200);
        CHECK(body_of(ok).at("kind") == "statement_pass");
        auto bad = post(client, "/api/check", {{"statement_text", "theorem t (a b c : ℝ) (h : a >= b >= c) : a ≥ c := by sorry"}});
        CHECK(bad->status == 200);
        CHECK(body_of(bad).at("kind") == "error");
        auto missing = post(client, "/api/check", {{"text", "x"}});
        CHECK(missing->status == 400);
        CHECK(body_of(missing).at("details").at("fields").at(0).at("field") == "statement_text");
        CHECK(client.Post("/api/check", "not json", "application/json")->status == 400);
        CHECK(store.labels(1).size() == 0);
    }

    SUBCASE("verdicts") {
        const std::string first = queue[0].at("id");
        CHECK(post(client, "/api/verdict", {{"candidate_id", first}, {"verdict", "maybe"}})->status == 400);
        CHECK(post(client, "/api/verdict", {{"candidate_id", first}, {"verdict", "modified"}})->status == 400);
        CHECK(post(client, "/api/verdict", {{"verdict", "correct"}})->status == 400);
        CHECK(post(client, "/api/verdict", {{"candidate_id", "nope:1:0"}, {"verdict", "correct"}})->status == 404);

        // a compile failure repaired by hand: the chained form is refused, the split one accepted
        const std::string chained = "theorem x (a b c : ℝ) (h : a >= b >= c > 0) (hs : a + b = 4) : a * b <= 16 / 4 := by sorry";
        auto refused = post(client, "/api/verdict", {{"candidate_id", first}, {"verdict", "modified"}, {"modified_text", chained}});
        CHECK(refused->status == 422);
        CHECK(body_of(refused).at("details").at("compile").at("kind") == "error");

        const std::string split =
            "theorem x (a b c : ℝ) (h : a >= b ∧ b >= c ∧ c > 0) (hs : a + b = 4) : a * b <= 16 / 4 := by sorry";
        auto stored = post(client, "/api/verdict",
                           {{"candidate_id", first}, {"verdict", "modified"}, {"modified_text", split}, {"note", "split chain"}});
        CHECK(stored->status == 200);
        auto rec = body_of(stored).at("stored");
        CHECK(rec.at("verdict") == "modified");
        CHECK(rec.at("modified_text").get<std::string>().find("b >= c ∧ c > 0") != std::string::npos);

        const std::string second = queue[1].at("id");
        CHECK(post(client, "/api/verdict", {{"candidate_id", second}, {"verdict", "rejected"}})->status == 200);

        auto after = body_of(client.Get("/api/queue"));
        CHECK(after.size() == 18);
        CHECK(after[0].at("id") == queue[2].at("id"));
        CHECK(store.labels(1).size() == 2);
        CHECK(store.manifest(1)->human_labels_added == 1);

        auto reader = Store::open(dir.path(), OpenMode::reader);
        CHECK(reader.labels(1).size() == 2);
    }

    SUBCASE("stats track the manifest") {
        auto stats = body_of(client.Get("/api/stats?round=1"));
        CHECK(stats.at("manifest") == to_json(pipeline::current_manifest(store, 1)));
        CHECK(stats.at("accuracy").at("rows").empty());
        CHECK(stats.at("accuracy").at("weighted_average").is_null());
    }
}

TEST_CASE("review API restarts on the same store") {
    test::TempDir dir;
    seed_round(dir.path());
    std::string reviewed;
    {
        auto store = Store::open(dir.path(), OpenMode::writer, false);
        repl::SimulatedChecker sim;
        server::ReviewServer srv(store, sim, {.round = 1});
        httplib::Client client("127.0.0.1", srv.start());
        reviewed = body_of(client.Get("/api/queue")).at(0).at("id");
        CHECK(post(client, "/api/verdict", {{"candidate_id", reviewed}, {"verdict", "rejected"}})->status == 200);
    }
    auto store = Store::open(dir.path(), OpenMode::writer, false);
    repl::SimulatedChecker sim;
    server::ReviewServer srv(store, sim, {.round = 1});
    httplib::Client client("127.0.0.1", srv.start());
    auto queue = body_of(client.Get("/api/queue"));
    CHECK(queue.size() == 19);
    for (const auto& item : queue) CHECK(item.at("id") != reviewed);
}

TEST_CASE("review API reports a saturated prover") {
    test::TempDir dir;
    auto store = Store::open(dir.path(), OpenMode::writer, false);
    BusyChecker busy;
    server::ReviewServer srv(store, busy, {.round = 1, .retry_after_s = 7});
    httplib::Client client("127.0.0.1", srv.start());
    auto r = post(client, "/api/check", {{"statement_text", "theorem t : True := by sorry"}});
    REQUIRE(r);
    CHECK(r->status == 503);
    CHECK(r->get_header_value("Retry-After") == "7");
    // an empty round still answers
    CHECK(body_of(client.Get("/api/queue")).empty());
    CHECK(client.Get("/")->status == 200);
}

TEST_CASE("review stats on the shipped funnel") {
    test::TempDir dir;
    std::filesystem::copy(test::data_dir() / "paper_funnel", dir.path(), std::filesystem::copy_options::recursive);
    auto store = Store::open(dir.path(), OpenMode::writer, false);
    repl::SimulatedChecker sim;
    server::ReviewServer srv(store, sim, {.round = 6});
    httplib::Client client("127.0.0.1", srv.start());
    auto stats = body_of(client.Get("/api/stats?round=6"));
    CHECK(stats.at("manifest").at("cpn") == 205079);
    CHECK(stats.at("manifest").at("npn") == 57231);
    auto rows = pipeline::round_accuracy(store, 6);
    CHECK(stats.at("accuracy").at("rows").size() == rows.size());
    CHECK(stats.at("accuracy").at("weighted_average").get<double>() == doctest::Approx(weighted_accuracy(rows)));
    CHECK(stats.at("accuracy").at("weighted_average").get<double>() == doctest::Approx(0.935).epsilon(0.0005));
}
