#include <doctest.h>

#include <chrono>
#include <csignal>
#include <cstdlib>
#include <thread>

#include "forge/core/store.hpp"
#include "forge/repl/checker.hpp"
#include "forge/repl/pool.hpp"
#include "forge/repl/protocol.hpp"
#include "forge/repl/simulator.hpp"
#include "test_util.hpp"

using namespace forge;
using namespace forge::repl;
using Clock = std::chrono::steady_clock;

namespace {

const std::string kEx1 =
    "theorem ex_1 (n p : ℕ) (hp: Nat.Prime p) (h₁ : p ∣ n) : { (x, y) : ℕ × ℕ | x + y = n ∧ Nat.gcd x y = p }.Finite "
    ":= by sorry";

PoolConfig fake_config(int workers) {
    PoolConfig c;
    c.command = {FORGE_FAKE_REPL};
    c.workers = workers;
    c.timeout_s = 5;
    c.proof_timeout_s = 5;
    c.startup_timeout_s = 10;
    return c;
}

CompileMessage warning(std::string text) { return {MessageSeverity::warning, std::move(text), {1, 0}}; }
CompileMessage error(std::string text) { return {MessageSeverity::error, std::move(text), {1, 0}}; }

// Sets an environment variable for the scope; child processes inherit it.
struct ScopedEnv {
    std::string name;
    ScopedEnv(std::string n, const std::string& value) : name(std::move(n)) { ::setenv(name.c_str(), value.c_str(), 1); }
    ~ScopedEnv() { ::unsetenv(name.c_str()); }
};

}  // namespace

TEST_CASE("classify_response") {
    CHECK(classify_response({warning("declaration uses 'sorry'")}, false, false) == CompileKind::statement_pass);
    CHECK(classify_response({}, false, true) == CompileKind::proof_pass);
    CHECK(classify_response({}, false, false) == CompileKind::proof_pass);
    CHECK(classify_response({error("unknown identifier 'sqrt'")}, false, false) == CompileKind::error);
    CHECK(classify_response({warning("declaration uses 'sorry'"), error("x")}, false, false) == CompileKind::error);
    CHECK(classify_response({warning("unused variable `h`")}, false, false) == CompileKind::error);
    CHECK(classify_response({warning("declaration uses 'sorry'")}, true, false) == CompileKind::timeout);
    CHECK(classify_response({{MessageSeverity::info, "goals accomplished", {1, 0}}}, false, true) == CompileKind::proof_pass);
}

TEST_CASE("parse_response") {
    auto r = parse_response(Json::parse(
        R"({"env":3,"messages":[{"severity":"warning","pos":{"line":2,"column":4},"endPos":null,"data":"declaration uses 'sorry'"}],"sorries":[{"pos":{"line":2,"column":4},"goal":"⊢ True"}]})"));
    CHECK(r.env == 3);
    REQUIRE(r.messages.size() == 1);
    CHECK(r.messages[0].pos == Position{2, 4});
    CHECK(r.sorries == 1);

    auto failure = parse_response(Json::parse(R"({"message":"Unknown environment."})"));
    REQUIRE(failure.messages.size() == 1);
    CHECK(failure.messages[0].severity == MessageSeverity::error);

    CHECK(make_request("theorem t : True := by sorry", 0).dump() == R"({"cmd":"theorem t : True := by sorry","env":0})");
    CHECK_FALSE(make_request("import Mathlib", std::nullopt).contains("env"));
}

TEST_CASE("recorded fixtures replay deterministically") {
    int n = 0;
    for (const auto& entry : std::filesystem::directory_iterator(test::data_dir() / "repl_fixtures")) {
        auto f = repl_fixture_from_json(Json::parse(read_file(entry.path())));
        CAPTURE(f.name);
        REQUIRE(f.expected);
        CHECK(replay(f) == *f.expected);
        CHECK(replay(f) == replay(f));
        ++n;
    }
    CHECK(n == 20);
}

TEST_CASE("simulator mirrors the sorry convention") {
    SimulatedChecker sim;
    auto v = sim.check_statement(kEx1);
    CHECK(v.kind == CompileKind::statement_pass);
    REQUIRE(v.messages.size() == 1);
    CHECK(v.messages[0].text == kSorryWarning);
    CHECK(sim.check_statement("theorem t (x : ℕ) : x + = 2 := by sorry").kind == CompileKind::error);
    CHECK(sim.check_statement("theorem w (a b c : ℝ) (h : a >= b >= c > 0) : a ≥ c := by sorry").kind ==
          CompileKind::error);
    CHECK(sim.check_statement("theorem w (a b c : ℝ) (h : a >= b ∧ b >= c ∧ c > 0) : a ≥ c := by sorry").kind ==
          CompileKind::statement_pass);
    CHECK(sim.check_proof("theorem t : 1 + 1 = 2 := by sorry", "by norm_num").kind == CompileKind::proof_pass);
    CHECK(sim.check_proof("theorem t : 1 + 1 = 2 := by sorry", "by sorry").kind == CompileKind::statement_pass);
    CHECK(sim.calls() == 6);
}

TEST_CASE("with_proof keeps the proof layout") {
    auto s = with_proof("/-- d -/\ntheorem t (a : ℕ) : a = a := by sorry", "by\n  rfl\n");
    CHECK(s == "theorem t (a : ℕ) : a = a := by\n  rfl");
}

TEST_CASE("pool config validation") {
    auto c = fake_config(0);
    CHECK_THROWS_AS(c.validate(), Error);
    CHECK_THROWS_AS(ReplPool{fake_config(0)}, Error);
    auto t = fake_config(1);
    t.timeout_s = 0;
    CHECK_THROWS_AS(t.validate(), Error);
}

TEST_CASE("pool: statements and proofs through the fake REPL") {
    ReplPool pool(fake_config(2));
    CHECK(pool.worker_pids().size() == 2);
    auto v = pool.check_statement(kEx1);
    CHECK(v.kind == CompileKind::statement_pass);
    CHECK(pool.check_statement("theorem t (x : ℕ) : unknown_f x = 2 := by sorry").kind == CompileKind::error);
    CHECK(pool.check_proof("theorem t : 1 + 1 = 2 := by sorry", "by norm_num").kind == CompileKind::proof_pass);
    CHECK(pool.check_proof("theorem t : 1 + 1 = 2 := by sorry", "by sorry").kind == CompileKind::statement_pass);
    pool.shutdown();
    CHECK_THROWS_AS(pool.submit("theorem t : True := by sorry", false), Error);
}

TEST_CASE("pool: throughput with four workers") {
    ScopedEnv import_delay("FAKE_LEAN_IMPORT_MS", "100");
    const auto t0 = Clock::now();
    ReplPool pool(fake_config(4));
    const auto startup = Clock::now() - t0;

    // per-job service time on one worker, including protocol overhead
    const std::string job = "theorem t : True := by sorry -- fake:sleep=100";
    const auto c0 = Clock::now();
    pool.check_statement(job);
    const auto single = Clock::now() - c0;

    const auto j0 = Clock::now();
    std::vector<std::future<CompileVerdict>> futures;
    for (int i = 0; i < 40; ++i) futures.push_back(pool.submit(job, false));
    for (auto& f : futures) CHECK(f.get().kind == CompileKind::statement_pass);
    const auto wall = Clock::now() - j0;
    CHECK(wall <= single * 10 + startup);
    CHECK(pool.stats().completed == 41);
}

TEST_CASE("pool: a killed worker yields one worker_crash and loses no job") {
    ReplPool pool(fake_config(1));
    const auto pid = pool.worker_pids().at(0);
    auto in_flight = pool.submit("theorem t : True := by sorry -- fake:sleep=2000", false);
    std::vector<std::future<CompileVerdict>> queued;
    for (int i = 0; i < 3; ++i) queued.push_back(pool.submit("theorem q : True := by sorry", false));
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    ::kill(pid, SIGKILL);
    CHECK(in_flight.get().kind == CompileKind::worker_crash);
    for (auto& f : queued) CHECK(f.get().kind == CompileKind::statement_pass);
    CHECK(pool.worker_pids().at(0) != pid);
    CHECK(pool.stats().crashes == 1);
}

TEST_CASE("pool: a hung job times out and the worker is replaced") {
    auto c = fake_config(1);
    c.timeout_s = 0.3;
    ReplPool pool(c);
    const auto pid = pool.worker_pids().at(0);
    auto v = pool.check_statement("theorem t : True := by sorry -- fake:hang");
    CHECK(v.kind == CompileKind::timeout);
    CHECK(pool.check_statement("theorem t : True := by sorry").kind == CompileKind::statement_pass);
    CHECK(pool.worker_pids().at(0) != pid);
    CHECK(pool.stats().timeouts == 1);
}

TEST_CASE("pool: a worker crash on a directive is a worker_crash") {
    ReplPool pool(fake_config(1));
    CHECK(pool.check_statement("theorem t : True := by sorry -- fake:crash").kind == CompileKind::worker_crash);
    CHECK(pool.check_statement("theorem t : True := by sorry").kind == CompileKind::statement_pass);
}

TEST_CASE("pool: workers recycle after max_jobs_per_worker") {
    auto c = fake_config(1);
    c.max_jobs_per_worker = 2;
    ReplPool pool(c);
    for (int i = 0; i < 5; ++i) CHECK(pool.check_statement("theorem t : True := by sorry").compiles());
    CHECK(pool.stats().restarts == 2);
}

TEST_CASE("pool: version check") {
    auto c = fake_config(1);
    c.version_command = {FORGE_FAKE_REPL, "--version"};
    c.env_tag = "4.8.0-rc1";
    {
        ReplPool pool(c);
        CHECK(pool.env_tag().find("4.8.0-rc1") != std::string::npos);
    }
    ScopedEnv version("FAKE_LEAN_VERSION", "4.9.0");
    try {
        ReplPool pool(c);
        FAIL("version mismatch accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::environment);
        CHECK(std::string(e.what()).find("4.9.0") != std::string::npos);
        CHECK(std::string(e.what()).find("4.8.0-rc1") != std::string::npos);
    }
}

TEST_CASE("pool: startup failures are environment errors") {
    auto missing = fake_config(1);
    missing.command = {"/nonexistent/lean-repl"};
    try {
        ReplPool pool(missing);
        FAIL("started without a toolchain");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::environment);
    }
    ScopedEnv fail("FAKE_LEAN_FAIL_IMPORT", "1");
    try {
        ReplPool pool(fake_config(1));
        FAIL("started with a failed import");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::environment);
    }
}

TEST_CASE("pool: try_submit reports saturation") {
    auto c = fake_config(1);
    c.queue_capacity = 1;
    PoolChecker checker(c);
    auto busy = checker.pool().submit("theorem t : True := by sorry -- fake:sleep=500", false);
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    auto queued = checker.pool().submit("theorem t : True := by sorry", false);
    CHECK_FALSE(checker.pool().try_submit("theorem t : True := by sorry", false));
    CHECK_FALSE(checker.try_check_statement("theorem t : True := by sorry"));
    CHECK(busy.get().compiles());
    CHECK(queued.get().compiles());
}

TEST_CASE("pool: recording fixtures") {
    test::TempDir dir;
    auto c = fake_config(1);
    c.record_dir = dir.path();
    {
        ReplPool pool(c);
        pool.check_statement(kEx1);
    }
    int n = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
        auto f = repl_fixture_from_json(Json::parse(read_file(e.path())));
        CHECK(f.request == kEx1);
        CHECK(replay(f) == CompileKind::statement_pass);
        ++n;
    }
    CHECK(n == 1);
}
