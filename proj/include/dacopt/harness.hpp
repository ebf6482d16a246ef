#pragma once

// Experiment harness: configuration, seeded multi-run execution with FE
// budgets, trace CSVs and mean/std summaries.

#include "dacopt/framework.hpp"
#include "dacopt/objectives.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dacopt {

class UsageError : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

enum class Algorithm { DacHc, Phc, DacGeneric };

std::string_view to_string(Algorithm algo);
/// "dac-hc", "phc" or "dac".
std::optional<Algorithm> parse_algorithm(std::string_view name);

struct ExperimentConfig {
    Algorithm algorithm = Algorithm::DacHc;
    /// Empty when optimizing an external worker.
    std::optional<FunctionId> function = FunctionId::F1;
    Index dimension = 100;
    Index group_size = 10;       // m
    Index population_size = 2;  // N
    Index groups = 10;           // M
    std::uint64_t budget = 200'000;
    Index runs = 1;
    std::uint64_t base_seed = 0;
    std::filesystem::path output_dir = "results";
    std::uint64_t log_every = 1000;
    /// Worker command for the external objective (function must be empty).
    std::string worker_command;
    Interval bounds{-100.0, 100.0};
    /// Run-level threads; 0 reads DACOPT_THREADS or uses every core.
    Index threads = 0;

    std::string function_name() const;
    void validate() const;
};

/// Parses the arguments that follow the `run` subcommand. `--config FILE`
/// loads flat `key = value` lines named after the long flags; flags given on
/// the command line override file values and unknown keys are rejected.
ExperimentConfig parse_config(const std::vector<std::string>& args);

struct RunRecord {
    Index run_index = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double final_best = 0.0;
    std::uint64_t evaluations = 0;
    double wall_seconds = 0.0;
    std::filesystem::path trace_path;
};

struct SummaryRow {
    std::string algorithm;
    std::string function;
    Index dimension = 0;
    Index group_size = 0;
    Index population_size = 0;
    Index groups = 0;
    std::uint64_t budget = 0;
    /// Successful runs the statistics are computed over.
    Index runs = 0;
    double mean = 0.0;
    /// Unbiased (R - 1) standard deviation; absent for fewer than two runs.
    std::optional<double> std;
};

struct ExperimentResult {
    std::vector<RunRecord> records;
    SummaryRow summary;
};

/// Seed of the benchmark instance shared by every run under `base_seed`.
std::uint64_t instance_seed(std::uint64_t base_seed);
/// Algorithm seed of run r.
std::uint64_t run_seed(std::uint64_t base_seed, Index run_index);

/// Mean and unbiased standard deviation of the successful records.
SummaryRow summarize(const ExperimentConfig& cfg, const std::vector<RunRecord>& records);

/// Runs one configured algorithm on a prepared objective.
RunResult run_algorithm(const ExperimentConfig& cfg, const Objective& f, const ProblemSpec& spec,
                        std::uint64_t seed);

/// Executes cfg.runs isolated runs (possibly concurrently) against one
/// shared instance and writes, under cfg.output_dir:
///   <algo>_<fn>_run<r>.csv   trace per run
///   <algo>_<fn>_summary.csv  one summary line
///   <algo>_<fn>_runs.csv     per-run status, final value, FEs, wall time
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Header `run,fe,best_value`, one LF-terminated line per trace point.
void write_trace_csv(const ConvergenceTrace& trace, Index run_index, const std::filesystem::path& path);
/// Traces of a CSV in the format above, keyed by run index.
std::map<Index, ConvergenceTrace> read_trace_csv(const std::filesystem::path& path);

/// Header `algo,function,D,m,N,M,budget,runs,mean,std`.
void write_summary(const std::vector<SummaryRow>& rows, const std::filesystem::path& path);

void write_run_records(const std::vector<RunRecord>& records, const std::filesystem::path& path);

}  // namespace dacopt
