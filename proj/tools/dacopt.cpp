// dacopt command-line front end.
//
//   dacopt run        [--config FILE] [--algo ..] [--fn ..] ...
//   dacopt oracle     complement | interaction | agreement  ...
//   dacopt fit        --trace FILE [--window 0.5] [--run R]
//   dacopt bench-info --fn f3 --dim 100 --m 10 --seed 42
//
// Exit codes: 0 success, 2 usage error, 3 runtime error.

#include "dacopt/analysis.hpp"
#include "dacopt/harness.hpp"
#include "dacopt/objectives.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

using namespace dacopt;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

Vector parse_list(const std::string& text) {
    Vector out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        out.push_back(parse_double(item));
    }
    return out;
}

std::vector<Vector> parse_rows(const std::string& text) {
    std::vector<Vector> rows;
    std::stringstream in(text);
    std::string row;
    while (std::getline(in, row, ';'))
        if (!row.empty()) rows.push_back(parse_list(row));
    return rows;
}

std::string join(const Vector& v) {
    std::string s;
    for (Index k = 0; k < v.size(); ++k) {
        if (k) s += ' ';
        s += format_double(v[k]);
    }
    return s;
}

// Base functions are used unshifted; composites become seeded instances.
struct ResolvedObjective {
    Objective f;
    std::optional<BenchmarkInstance> instance;
};

ResolvedObjective resolve(const std::string& name, Index dim, Index m, std::uint64_t seed) {
    const auto id = parse_function_id(name);
    if (!id) throw UsageError("--fn: unknown function '" + name + "'");
    ResolvedObjective r;
    switch (*id) {
        case FunctionId::Sphere:
            r.f = [](std::span<const double> x) { return sphere(x); };
            break;
        case FunctionId::Schwefel12:
            r.f = [](std::span<const double> x) { return schwefel12(x); };
            break;
        case FunctionId::Rosenbrock:
            r.f = [](std::span<const double> x) { return rosenbrock(x); };
            break;
        default:
            try {
                r.instance = make_instance(*id, dim, m, instance_seed(seed));
            } catch (const IncompatibleDimensions& e) {
                throw UsageError(e.what());
            }
            // Capture by value: `r` is returned and moved.
            r.f = [inst = *r.instance](std::span<const double> x) { return evaluate_instance(inst, x); };
            break;
    }
    return r;
}

int parse_or_usage(CLI::App& app, std::vector<std::string> args) {
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    return -1;
}

int cmd_run(const std::vector<std::string>& args) {
    for (const auto& a : args) {
        if (a == "-h" || a == "--help") {
            try {
                parse_config({"--help"});
            } catch (const UsageError& e) {
                std::cout << e.what();
            }
            return 0;
        }
    }
    const ExperimentConfig cfg = parse_config(args);
    const ExperimentResult res = run_experiment(cfg);
    int failed = 0;
    for (const auto& r : res.records) {
        if (r.ok) {
            std::cout << "run " << r.run_index << ": best " << format_double(r.final_best) << " after "
                      << r.evaluations << " FEs\n";
        } else {
            ++failed;
            std::cout << "run " << r.run_index << ": FAILED " << r.error << "\n";
        }
    }
    const auto& s = res.summary;
    std::cout << s.algorithm << " " << s.function << " D=" << s.dimension << " runs=" << s.runs
              << " mean=" << format_double(s.mean) << " std=" << (s.std ? format_double(*s.std) : "-") << "\n";
    std::cout << "results written to " << cfg.output_dir.string() << "\n";
    return failed == 0 ? 0 : kExitRuntime;
}

int cmd_oracle(const std::vector<std::string>& args) {
    CLI::App app{"analysis oracles", "oracle"};
    app.require_subcommand(1);
    std::string fn = "schwefel12";
    Index dim = 2;
    Index m = 2;
    std::uint64_t seed = 0;
    app.add_option("--fn", fn, "objective (base functions are unshifted)");
    app.add_option("--dim", dim, "dimension D");
    app.add_option("--m", m, "group size for composites");
    app.add_option("--seed", seed, "base seed (composites and sampling)");

    auto* complement = app.add_subcommand("complement", "exhaustive accurate complement");
    std::string partial_text;
    std::string grid_text;
    complement->add_option("--partial", partial_text, "values of the leading dimensions, comma separated")
        ->required();
    complement->add_option("--grid", grid_text, "grid points applied to every remaining dimension")->required();

    auto* interaction = app.add_subcommand("interaction", "sample for an interaction witness");
    Index dim_i = 0;
    Index dim_j = 1;
    std::uint64_t trials = 1000;
    interaction->add_option("--i", dim_i, "first dimension (0-based)");
    interaction->add_option("--j", dim_j, "second dimension (0-based)");
    interaction->add_option("--trials", trials, "number of sampled quadruples");

    auto* agreement = app.add_subcommand("agreement", "ranking agreement of approximate vs accurate complements");
    std::string partials_text;
    std::string population_text;
    std::string agree_grid_text;
    agreement->add_option("--partials", partials_text, "';'-separated partials over the leading dimensions")
        ->required();
    agreement->add_option("--population", population_text,
                          "';'-separated complement rows over the remaining dimensions")
        ->required();
    agreement->add_option("--grid", agree_grid_text, "grid points applied to every remaining dimension")->required();

    if (const int rc = parse_or_usage(app, args); rc >= 0) return rc;
    const auto obj = resolve(fn, dim, m, seed);
    const ProblemSpec spec(dim, obj.instance ? obj.instance->options().bounds : Interval{-100.0, 100.0});

    const auto leading = [](Index count) {
        std::vector<Index> idx(count);
        for (Index k = 0; k < count; ++k) idx[k] = k;
        return idx;
    };
    const auto make_grid = [&](Index fixed, const Vector& points) {
        GridSpec grid;
        for (Index k = fixed; k < dim; ++k) {
            grid.indices.push_back(k);
            grid.points.push_back(points);
        }
        return grid;
    };

    if (complement->parsed()) {
        const Vector values = parse_list(partial_text);
        if (values.empty() || values.size() >= dim) throw UsageError("--partial needs between 1 and dim-1 values");
        const PartialSolution partial{leading(values.size()), values};
        const auto res = accurate_complement(obj.f, partial, make_grid(values.size(), parse_list(grid_text)));
        std::cout << "complement " << join(res.complement.values) << "\nvalue " << format_double(res.value) << "\n";
        return 0;
    }
    if (interaction->parsed()) {
        Rng rng(derive_seed(seed, "interaction"));
        const auto w = detect_interaction(obj.f, dim_i, dim_j, spec, trials, rng);
        if (!w) {
            std::cout << "none\n";
            return 0;
        }
        std::cout << "witness i=" << w->i << " j=" << w->j << "\n"
                  << "xi " << format_double(w->xi) << " xi' " << format_double(w->xi_alt) << "\n"
                  << "xj " << format_double(w->xj) << " xj' " << format_double(w->xj_alt) << "\n"
                  << "f(xi,xj) " << format_double(w->f00) << " f(xi',xj) " << format_double(w->f10) << "\n"
                  << "f(xi,xj') " << format_double(w->f01) << " f(xi',xj') " << format_double(w->f11) << "\n"
                  << "base " << join(w->base) << "\n";
        return 0;
    }
    // agreement
    const auto partial_rows = parse_rows(partials_text);
    const auto pop_rows = parse_rows(population_text);
    if (partial_rows.empty() || pop_rows.empty()) throw UsageError("--partials and --population must be non-empty");
    const Index fixed = partial_rows.front().size();
    if (fixed == 0 || fixed >= dim) throw UsageError("partials need between 1 and dim-1 values");
    std::vector<PartialSolution> partials;
    for (const auto& p : partial_rows) {
        if (p.size() != fixed) throw UsageError("all partials need the same length");
        partials.push_back({leading(fixed), p});
    }
    std::vector<FullSolution> population;
    for (const auto& r : pop_rows) {
        if (r.size() != dim - fixed) throw UsageError("population rows need dim - partial length values");
        Vector full(fixed, 0.0);
        full.insert(full.end(), r.begin(), r.end());
        population.emplace_back(std::move(full));
    }
    const double a = ranking_agreement(obj.f, partials, population, make_grid(fixed, parse_list(agree_grid_text)));
    std::cout << "agreement " << format_double(a) << "\n";
    return 0;
}

int cmd_fit(const std::vector<std::string>& args) {
    CLI::App app{"log-linear fit of a trace CSV", "fit"};
    std::string path;
    double window = 0.5;
    std::optional<Index> run;
    app.add_option("--trace", path, "trace CSV (run,fe,best_value)")->required();
    app.add_option("--window", window, "trailing fraction of points to fit");
    app.add_option("--run", run, "run index to fit (default: median over all runs)");
    if (const int rc = parse_or_usage(app, args); rc >= 0) return rc;

    const auto traces = read_trace_csv(path);
    if (traces.empty()) throw UsageError("trace file has no data");
    ConvergenceTrace trace;
    if (run) {
        const auto it = traces.find(*run);
        if (it == traces.end()) throw UsageError("run " + std::to_string(*run) + " not in trace file");
        trace = it->second;
    } else if (traces.size() == 1) {
        trace = traces.begin()->second;
    } else {
        std::vector<ConvergenceTrace> all;
        for (const auto& [r, t] : traces) all.push_back(t);
        trace = median_trace(all);
    }
    const auto fit = loglinear_fit(trace, window);
    std::cout << "slope " << format_double(fit.slope) << "\nr_squared " << format_double(fit.r_squared)
              << "\npoints " << fit.points_used << "\n";
    if (fit.degenerate) std::cout << "degenerate (zero variance)\n";
    if (fit.truncated) std::cout << "truncated to the positive suffix\n";
    return 0;
}

int cmd_bench_info(const std::vector<std::string>& args) {
    CLI::App app{"print a benchmark instance", "bench-info"};
    std::string fn = "f1";
    Index dim = 100;
    Index m = 10;
    std::uint64_t seed = 0;
    app.add_option("--fn", fn, "f1..f5 | sphere | schwefel12 | rosenbrock");
    app.add_option("--dim", dim, "dimension D");
    app.add_option("--m", m, "group size m");
    app.add_option("--seed", seed, "base seed, as passed to `run`");
    if (const int rc = parse_or_usage(app, args); rc >= 0) return rc;

    const auto id = parse_function_id(fn);
    if (!id) throw UsageError("--fn: unknown function '" + fn + "'");
    BenchmarkInstance inst;
    try {
        inst = make_instance(*id, dim, m, instance_seed(seed));
    } catch (const IncompatibleDimensions& e) {
        throw UsageError(e.what());
    }
    const Vector opt = inst.optimum();
    std::cout << "function " << to_string(inst.function()) << "\nD " << inst.dimension() << "\nm "
              << inst.group_size() << "\ninstance_seed " << inst.seed() << "\nshift " << join(inst.shift())
              << "\npermutation";
    for (Index p : inst.permutation()) std::cout << ' ' << p;
    std::cout << "\noptimum " << join(opt) << "\noptimum_value " << format_double(evaluate_instance(inst, opt))
              << "\n";
    return 0;
}

void print_usage(std::ostream& os) {
    os << "usage: dacopt <run|oracle|fit|bench-info> [options]\n"
          "       dacopt <command> --help\n";
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        print_usage(std::cerr);
        return kExitUsage;
    }
    const std::string command = argv[1];
    const std::vector<std::string> args(argv + 2, argv + argc);
    try {
        if (command == "run") return cmd_run(args);
        if (command == "oracle") return cmd_oracle(args);
        if (command == "fit") return cmd_fit(args);
        if (command == "bench-info") return cmd_bench_info(args);
        if (command == "-h" || command == "--help") {
            print_usage(std::cout);
            return 0;
        }
        std::cerr << "unknown command '" << command << "'\n";
        print_usage(std::cerr);
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
