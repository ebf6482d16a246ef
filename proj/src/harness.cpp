#include "dacopt/harness.hpp"

#include "dacopt/dachc.hpp"
#include "dacopt/external_objective.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

namespace dacopt {

namespace {

constexpr std::array<std::pair<std::string_view, Algorithm>, 3> kAlgorithms{{
    {"dac-hc", Algorithm::DacHc},
    {"phc", Algorithm::Phc},
    {"dac", Algorithm::DacGeneric},
}};

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

void close_output(std::ofstream& out, const std::filesystem::path& path) {
    out.close();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string csv_field(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

Index thread_count(Index requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("DACOPT_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<Index>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max<Index>(1, std::thread::hardware_concurrency());
}

}  // namespace

std::string_view to_string(Algorithm algo) {
    for (const auto& [name, value] : kAlgorithms)
        if (value == algo) return name;
    return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
    for (const auto& [n, value] : kAlgorithms)
        if (n == name) return value;
    return std::nullopt;
}

std::string ExperimentConfig::function_name() const {
    return function ? std::string(to_string(*function)) : std::string("external");
}

void ExperimentConfig::validate() const {
    if (runs == 0) throw UsageError("runs must be at least 1");
    if (log_every == 0) throw UsageError("log-every must be at least 1");
    if (population_size == 0) throw UsageError("n (population size) must be at least 1");
    if (groups == 0 || groups > dimension) throw UsageError("M must lie in [1, dim]");
    if (budget < population_size) throw UsageError("budget must be at least n");
    if (!function && worker_command.empty()) throw UsageError("fn=external needs --worker");
    if (function && !worker_command.empty()) throw UsageError("--worker requires --fn external");
    if (!(bounds.lo < bounds.hi)) throw UsageError("lo must be below hi");
    if (function) {
        try {
            InstanceOptions opts;
            opts.bounds = bounds;
            make_instance(*function, dimension, group_size, 0, opts);
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    }
}

ExperimentConfig parse_config(const std::vector<std::string>& args) {
    ExperimentConfig cfg;
    std::string algo = std::string(to_string(cfg.algorithm));
    std::string fn = cfg.function_name();
    std::string out = cfg.output_dir.string();

    CLI::App app{"dacopt run", "run"};
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.set_config("--config", "", "flat key = value file; flags override its values");
    app.add_option("--algo", algo, "dac-hc | phc | dac");
    app.add_option("--fn", fn, "f1..f5 | sphere | schwefel12 | rosenbrock | external");
    app.add_option("--dim", cfg.dimension, "problem dimension D");
    app.add_option("--m", cfg.group_size, "benchmark group size m");
    app.add_option("--n", cfg.population_size, "population size N");
    app.add_option("--M", cfg.groups, "sub-problem count M");
    app.add_option("--budget", cfg.budget, "FE budget per run");
    app.add_option("--runs", cfg.runs, "independent runs R");
    app.add_option("--seed", cfg.base_seed, "base seed");
    app.add_option("--out", out, "output directory");
    app.add_option("--log-every", cfg.log_every, "trace sampling interval in FEs");
    app.add_option("--worker", cfg.worker_command, "external worker command (with --fn external)");
    app.add_option("--lo", cfg.bounds.lo, "lower bound per dimension");
    app.add_option("--hi", cfg.bounds.hi, "upper bound per dimension");
    app.add_option("--threads", cfg.threads, "run-level threads (default DACOPT_THREADS or all cores)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw UsageError(app.help());
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    const auto a = parse_algorithm(algo);
    if (!a) throw UsageError("--algo: unknown algorithm '" + algo + "'");
    cfg.algorithm = *a;
    if (fn == "external") {
        cfg.function.reset();
    } else {
        cfg.function = parse_function_id(fn);
        if (!cfg.function) throw UsageError("--fn: unknown function '" + fn + "'");
    }
    cfg.output_dir = out;
    cfg.validate();
    return cfg;
}

std::uint64_t instance_seed(std::uint64_t base_seed) {
    return derive_seed(base_seed, "instance");
}

std::uint64_t run_seed(std::uint64_t base_seed, Index run_index) {
    return derive_seed(base_seed, "run", run_index);
}

SummaryRow summarize(const ExperimentConfig& cfg, const std::vector<RunRecord>& records) {
    SummaryRow row;
    row.algorithm = std::string(to_string(cfg.algorithm));
    row.function = cfg.function_name();
    row.dimension = cfg.dimension;
    row.group_size = cfg.group_size;
    row.population_size = cfg.population_size;
    row.groups = cfg.groups;
    row.budget = cfg.budget;

    Vector finals;
    for (const auto& r : records)
        if (r.ok) finals.push_back(r.final_best);
    row.runs = finals.size();
    if (finals.empty()) {
        row.mean = std::nan("");
        return row;
    }
    double sum = 0.0;
    for (double v : finals) sum += v;
    row.mean = sum / static_cast<double>(finals.size());
    if (finals.size() >= 2) {
        double ss = 0.0;
        for (double v : finals) ss += (v - row.mean) * (v - row.mean);
        row.std = std::sqrt(ss / static_cast<double>(finals.size() - 1));
    }
    return row;
}

RunResult run_algorithm(const ExperimentConfig& cfg, const Objective& f, const ProblemSpec& spec,
                        std::uint64_t seed) {
    DacConfig dc;
    dc.population_size = cfg.population_size;
    dc.groups = cfg.groups;
    dc.budget = cfg.budget;
    dc.direction = spec.direction();
    dc.log_every = cfg.log_every;
    dc.seed = seed;
    Rng rng(seed);
    switch (cfg.algorithm) {
        case Algorithm::DacHc:
            return run_dachc(f, spec, dc, rng);
        case Algorithm::Phc:
            return run_phc(f, spec, dc, rng);
        case Algorithm::DacGeneric: {
            GaussianSearch search(spec.dimension());
            return run_dac(f, spec, dc, search, random_grouping, rng);
        }
    }
    throw InvalidArgument("unknown algorithm");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) throw IoError("cannot create '" + cfg.output_dir.string() + "': " + ec.message());

    std::optional<BenchmarkInstance> instance;
    if (cfg.function) {
        InstanceOptions opts;
        opts.bounds = cfg.bounds;
        instance = make_instance(*cfg.function, cfg.dimension, cfg.group_size, instance_seed(cfg.base_seed), opts);
    }
    const ProblemSpec spec(cfg.dimension, cfg.bounds, Direction::Minimize);
    const std::string stem = std::string(to_string(cfg.algorithm)) + "_" + cfg.function_name();

    std::vector<RunRecord> records(cfg.runs);
    std::atomic<Index> next{0};
    const auto worker = [&] {
        for (Index r = next++; r < cfg.runs; r = next++) {
            RunRecord& rec = records[r];
            rec.run_index = r;
            rec.seed = run_seed(cfg.base_seed, r);
            rec.trace_path = cfg.output_dir / (stem + "_run" + std::to_string(r) + ".csv");
            const auto start = std::chrono::steady_clock::now();
            try {
                Objective f;
                if (instance) {
                    f = instance->objective();
                } else {
                    ExternalObjectiveConfig ec_cfg;
                    ec_cfg.command = cfg.worker_command;
                    ec_cfg.dimension = cfg.dimension;
                    f = as_objective(std::make_shared<ExternalObjective>(ec_cfg));
                }
                const RunResult res = run_algorithm(cfg, f, spec, rec.seed);
                rec.final_best = res.trace.empty() ? std::nan("") : res.trace.back().best_value;
                rec.evaluations = res.evaluations;
                write_trace_csv(res.trace, r, rec.trace_path);
                rec.ok = true;
            } catch (const std::exception& e) {
                rec.ok = false;
                rec.error = e.what();
            }
            rec.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
    };

    const Index threads = std::min(thread_count(cfg.threads), cfg.runs);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (Index t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    ExperimentResult result{std::move(records), {}};
    result.summary = summarize(cfg, result.records);
    write_summary({result.summary}, cfg.output_dir / (stem + "_summary.csv"));
    write_run_records(result.records, cfg.output_dir / (stem + "_runs.csv"));
    return result;
}

void write_trace_csv(const ConvergenceTrace& trace, Index run_index, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << "run,fe,best_value\n";
    const std::string run = std::to_string(run_index);
    for (const auto& p : trace) out << run << ',' << p.fe << ',' << format_double(p.best_value) << '\n';
    close_output(out, path);
}

std::map<Index, ConvergenceTrace> read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != "run,fe,best_value")
        throw IoError("'" + path.string() + "' is not a trace CSV (bad header)");
    std::map<Index, ConvergenceTrace> traces;
    Index line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string::npos)
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 3 fields");
        try {
            const Index run = std::stoull(line.substr(0, c1));
            const std::uint64_t fe = std::stoull(line.substr(c1 + 1, c2 - c1 - 1));
            const double v = parse_double(std::string_view(line).substr(c2 + 1));
            traces[run].push_back({fe, v});
        } catch (const std::exception& e) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return traces;
}

void write_summary(const std::vector<SummaryRow>& rows, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << "algo,function,D,m,N,M,budget,runs,mean,std\n";
    for (const auto& r : rows) {
        out << r.algorithm << ',' << r.function << ',' << r.dimension << ',' << r.group_size << ','
            << r.population_size << ',' << r.groups << ',' << r.budget << ',' << r.runs << ','
            << format_double(r.mean) << ',' << (r.std ? format_double(*r.std) : std::string()) << '\n';
    }
    close_output(out, path);
}

void write_run_records(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << "run,seed,status,final_best,fes,wall_seconds,trace\n";
    for (const auto& r : records) {
        out << r.run_index << ',' << r.seed << ',' << (r.ok ? std::string("ok") : "failed: " + csv_field(r.error))
            << ',' << (r.ok ? format_double(r.final_best) : std::string()) << ',' << r.evaluations << ','
            << format_double(r.wall_seconds) << ',' << csv_field(r.trace_path.filename().string()) << '\n';
    }
    close_output(out, path);
}

}  // namespace dacopt
