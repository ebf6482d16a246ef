#include "dacopt/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace dacopt;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("dacopt_test_" + std::to_string(::getpid()) + "_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

}  // namespace

TEST_CASE("parse_config accepts a full command line") {
    const auto cfg = parse_config(
        split("--algo dac-hc --fn f1 --dim 100 --m 10 --n 2 --M 10 --budget 200000 --runs 10 --seed 42"));
    CHECK(cfg.algorithm == Algorithm::DacHc);
    CHECK(cfg.function == FunctionId::F1);
    CHECK(cfg.dimension == 100);
    CHECK(cfg.group_size == 10);
    CHECK(cfg.population_size == 2);
    CHECK(cfg.groups == 10);
    CHECK(cfg.budget == 200000);
    CHECK(cfg.runs == 10);
    CHECK(cfg.base_seed == 42);
}

TEST_CASE("parse_config names the offending flag") {
    try {
        parse_config(split("--fn f9"));
        FAIL("expected a usage error");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).find("--fn") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config(split("--algo cmaes")), UsageError);
    CHECK_THROWS_AS(parse_config(split("--bogus 1")), UsageError);
    CHECK_THROWS_AS(parse_config(split("--fn f3 --dim 101 --m 10")), UsageError);
    CHECK_THROWS_AS(parse_config(split("--runs 0")), UsageError);
    CHECK_THROWS_AS(parse_config(split("--fn external")), UsageError);
}

TEST_CASE("flags override the config file and unknown keys are rejected") {
    const auto dir = scratch("cfg");
    const auto file = dir / "exp.ini";
    {
        std::ofstream out(file);
        out << "runs = 25\nfn = f3\nbudget = 5000\n";
    }
    const auto cfg = parse_config({"--config", file.string(), "--runs", "5"});
    CHECK(cfg.runs == 5);
    CHECK(cfg.function == FunctionId::F3);
    CHECK(cfg.budget == 5000);

    {
        std::ofstream out(file);
        out << "runs = 25\ncolour = blue\n";
    }
    try {
        parse_config({"--config", file.string()});
        FAIL("expected a usage error");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).find("colour") != std::string::npos);
    }
    fs::remove_all(dir);
}

TEST_CASE("trace csv format") {
    const auto dir = scratch("trace");
    write_trace_csv({{1, 50.0}, {41, 12.5}}, 3, dir / "t.csv");
    CHECK(slurp(dir / "t.csv") == "run,fe,best_value\n3,1,50\n3,41,12.5\n");
    const auto back = read_trace_csv(dir / "t.csv");
    REQUIRE(back.count(3) == 1);
    CHECK(back.at(3) == ConvergenceTrace{{1, 50.0}, {41, 12.5}});

    write_trace_csv({}, 0, dir / "e.csv");
    CHECK(slurp(dir / "e.csv") == "run,fe,best_value\n");

    const double awkward = 0.1 + 0.2;
    write_trace_csv({{7, awkward}}, 0, dir / "r.csv");
    CHECK(read_trace_csv(dir / "r.csv").at(0).front().best_value == awkward);

    CHECK_THROWS_AS(write_trace_csv({}, 0, dir / "missing" / "x.csv"), IoError);
    fs::remove_all(dir);
}

TEST_CASE("summary statistics") {
    ExperimentConfig cfg;
    std::vector<RunRecord> recs(2);
    recs[0].ok = true;
    recs[0].final_best = 2.0;
    recs[1].ok = true;
    recs[1].final_best = 4.0;
    const auto s = summarize(cfg, recs);
    CHECK(s.mean == 3.0);
    REQUIRE(s.std.has_value());
    CHECK(*s.std == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    recs[1].ok = false;
    const auto one = summarize(cfg, recs);
    CHECK(one.runs == 1);
    CHECK_FALSE(one.std.has_value());

    const auto dir = scratch("summary");
    write_summary({s, one}, dir / "s.csv");
    const std::string text = slurp(dir / "s.csv");
    CHECK(text.rfind("algo,function,D,m,N,M,budget,runs,mean,std\n", 0) == 0);
    CHECK(text.find("dac-hc,f1,100,10,2,10,200000,1,2,\n") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("experiment budget and byte determinism") {
    const auto dir_a = scratch("det_a");
    const auto dir_b = scratch("det_b");
    const auto dir_c = scratch("det_c");
    ExperimentConfig cfg;
    cfg.function = FunctionId::F1;
    cfg.dimension = 100;
    cfg.budget = 4040;
    cfg.runs = 2;
    cfg.log_every = 10;
    cfg.base_seed = 7;
    cfg.threads = 2;

    cfg.output_dir = dir_a;
    const auto a = run_experiment(cfg);
    for (const auto& r : a.records) {
        CHECK(r.ok);
        CHECK(r.evaluations == 4040);
    }
    const auto traces = read_trace_csv(dir_a / "dac-hc_f1_run0.csv");
    CHECK(traces.at(0).back().fe == 4040);

    cfg.output_dir = dir_b;
    cfg.threads = 1;
    run_experiment(cfg);
    for (const char* f : {"dac-hc_f1_run0.csv", "dac-hc_f1_run1.csv", "dac-hc_f1_summary.csv"})
        CHECK(slurp(dir_a / f) == slurp(dir_b / f));
    CHECK(slurp(dir_a / "dac-hc_f1_run0.csv") != slurp(dir_a / "dac-hc_f1_run1.csv"));

    cfg.output_dir = dir_c;
    cfg.base_seed = 8;
    run_experiment(cfg);
    CHECK(slurp(dir_a / "dac-hc_f1_run0.csv") != slurp(dir_c / "dac-hc_f1_run0.csv"));

    for (const auto& d : {dir_a, dir_b, dir_c}) fs::remove_all(d);
}

TEST_CASE("algorithms under one base seed share the instance") {
    const auto dir = scratch("paired");
    ExperimentConfig cfg;
    cfg.function = FunctionId::F4;
    cfg.dimension = 20;
    cfg.group_size = 5;
    cfg.groups = 4;
    cfg.budget = 3000;
    cfg.runs = 3;
    cfg.output_dir = dir;
    cfg.base_seed = 3;
    cfg.log_every = 1;
    const auto hc = run_experiment(cfg);
    cfg.algorithm = Algorithm::Phc;
    const auto phc = run_experiment(cfg);
    cfg.algorithm = Algorithm::DacGeneric;
    const auto dac = run_experiment(cfg);
    CHECK(fs::exists(dir / "phc_f4_summary.csv"));
    CHECK(fs::exists(dir / "dac_f4_runs.csv"));
    // Same run seeds, and the initial population is drawn identically, so
    // the first trace point agrees.
    for (Index r = 0; r < 3; ++r) {
        CHECK(hc.records[r].seed == phc.records[r].seed);
        const auto t1 = read_trace_csv(hc.records[r].trace_path).at(r);
        const auto t2 = read_trace_csv(phc.records[r].trace_path).at(r);
        CHECK(t1.front() == t2.front());
        CHECK(dac.records[r].evaluations == 3000);
    }
    fs::remove_all(dir);
}

TEST_CASE("seed derivation separates instance and runs") {
    CHECK(instance_seed(1) != run_seed(1, 0));
    CHECK(run_seed(1, 0) != run_seed(1, 1));
    CHECK(run_seed(1, 0) != run_seed(2, 0));
}
