#include "dacopt/dachc.hpp"
#include "dacopt/external_objective.hpp"
#include "dacopt/harness.hpp"
#include "dacopt/objectives.hpp"

#include <doctest.h>

#include <chrono>
#include <unistd.h>

using namespace dacopt;

namespace {

ExternalObjectiveConfig worker(Index dim, const std::string& extra = "") {
    ExternalObjectiveConfig cfg;
    cfg.command = std::string(SPHERE_WORKER_PATH) + " --dim " + std::to_string(dim) + " " + extra;
    cfg.dimension = dim;
    cfg.handshake_timeout_seconds = 5.0;
    cfg.eval_timeout_seconds = 5.0;
    return cfg;
}

}  // namespace

TEST_CASE("request and response lines") {
    CHECK(format_eval_request(4, Vector{1.5, -2.0, 0.1}) == "EVAL 4 1.5 -2 0.1");
    CHECK(parse_result_line("RESULT 4 12.25", 4) == 12.25);
    CHECK_THROWS_AS(parse_result_line("RESULT 5 1", 4), ProtocolError);
    CHECK_THROWS_AS(parse_result_line("RESULT 4", 4), ProtocolError);
    CHECK_THROWS_AS(parse_result_line("RESULT 4 abc", 4), ProtocolError);
    CHECK_THROWS_AS(parse_result_line("VALUE 4 1", 4), ProtocolError);
}

TEST_CASE("worker round trip matches in-process evaluation bit for bit") {
    ExternalObjective w(worker(5));
    Rng rng(1);
    for (int k = 0; k < 200; ++k) {
        Vector x(5);
        for (double& v : x) v = rng.uniform(-100, 100);
        REQUIRE(w.evaluate(x) == sphere(x));
    }
    CHECK(w.shutdown() == 0);
    CHECK(w.shutdown() == 0);
}

TEST_CASE("optimizing through the worker equals optimizing in process") {
    const ProblemSpec spec(6, Interval{-100, 100});
    DacConfig cfg;
    cfg.population_size = 2;
    cfg.groups = 3;
    cfg.budget = 600;
    Rng a(3);
    Rng b(3);
    const auto local = run_dachc([](std::span<const double> x) { return sphere(x); }, spec, cfg, a);
    const auto remote = run_dachc(as_objective(std::make_shared<ExternalObjective>(worker(6))), spec, cfg, b);
    CHECK(local.trace == remote.trace);
}

TEST_CASE("worker faults map to typed errors") {
    SUBCASE("garbage") {
        ExternalObjective w(worker(2, "--fault garbage --fault-after 1"));
        CHECK(w.evaluate(Vector{1, 1}) == 2.0);
        CHECK_THROWS_AS(w.evaluate(Vector{1, 1}), ProtocolError);
    }
    SUBCASE("crash") {
        ExternalObjective w(worker(2, "--fault crash"));
        try {
            w.evaluate(Vector{1, 1});
            FAIL("expected a crash");
        } catch (const WorkerCrashed& e) {
            CHECK(std::string(e.what()).find("exit status 7") != std::string::npos);
        }
    }
    SUBCASE("wrong id") {
        ExternalObjective w(worker(2, "--fault wrong-id"));
        CHECK_THROWS_AS(w.evaluate(Vector{1, 1}), ProtocolError);
    }
    SUBCASE("bad ready") {
        CHECK_THROWS_AS(ExternalObjective(worker(2, "--fault bad-ready")), ProtocolError);
    }
    SUBCASE("missing command") {
        auto cfg = worker(2);
        cfg.command = "/nonexistent/worker-binary";
        CHECK_THROWS_AS(ExternalObjective{cfg}, WorkerCrashed);
    }
    SUBCASE("hang") {
        auto cfg = worker(2, "--fault hang");
        cfg.eval_timeout_seconds = 0.3;
        ExternalObjective w(cfg);
        const auto start = std::chrono::steady_clock::now();
        CHECK_THROWS_AS(w.evaluate(Vector{1, 1}), WorkerTimeout);
        CHECK(w.shutdown() == -1);
        CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(5));
    }
    SUBCASE("dimension mismatch on request") {
        ExternalObjective w(worker(2));
        CHECK_THROWS_AS(w.evaluate(Vector{1, 1, 1}), ProtocolError);
    }
}

TEST_CASE("harness records a failing external run without stopping the others") {
    const auto dir = std::filesystem::temp_directory_path() / ("dacopt_ext_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    ExperimentConfig cfg;
    cfg.function.reset();
    cfg.worker_command = std::string(SPHERE_WORKER_PATH) + " --dim 4";
    cfg.dimension = 4;
    cfg.groups = 2;
    cfg.budget = 200;
    cfg.runs = 2;
    cfg.threads = 1;
    cfg.output_dir = dir;
    const auto ok = run_experiment(cfg);
    CHECK(ok.records[0].ok);
    CHECK(ok.records[1].ok);
    CHECK(ok.summary.function == "external");

    cfg.worker_command = std::string(SPHERE_WORKER_PATH) + " --dim 4 --fault crash --fault-after 50";
    const auto bad = run_experiment(cfg);
    CHECK_FALSE(bad.records[0].ok);
    CHECK(bad.records[0].error.find("exit") != std::string::npos);
    CHECK(bad.summary.runs == 0);
    std::filesystem::remove_all(dir);
}
