#pragma once

// The generic divide-and-approximate-conquer loop: a population of N full
// solutions is swept group by group; every partial solution is scored with
// the best complement found among the population's rows and selection is
// conditioned on that complement.

#include "dacopt/core.hpp"

#include <functional>
#include <memory>
#include <optional>

namespace dacopt {

class InvalidGroupCount : public Error { using Error::Error; };

struct TracePoint {
    std::uint64_t fe;
    double best_value;

    friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

using ConvergenceTrace = std::vector<TracePoint>;

/// Row-major N x M table of positive step sizes, indexed by (row, group slot).
class StepSizes {
public:
    StepSizes() = default;
    StepSizes(Index rows, Index groups, double initial) : groups_(groups), data_(rows * groups, initial) {}

    double& operator()(Index row, Index group) { return data_[row * groups_ + group]; }
    double operator()(Index row, Index group) const { return data_[row * groups_ + group]; }
    Index rows() const { return groups_ == 0 ? 0 : data_.size() / groups_; }
    Index groups() const { return groups_; }

private:
    Index groups_ = 0;
    Vector data_;
};

struct Population {
    std::vector<FullSolution> rows;
    StepSizes step_sizes;
    Grouping grouping;

    Index size() const { return rows.size(); }
};

struct ComplementChoice {
    /// Population row whose remainder is the chosen complement.
    Index row_index = 0;
    /// Objective of the partial composed with that complement.
    double value = 0.0;
    /// Uncached FEs spent on the search.
    std::uint64_t fresh_evals = 0;
};

/// One completed (group, row) update, reported to DacConfig::on_step.
struct StepEvent {
    std::uint64_t iteration;
    Index group;
    Index row;
    double before;
    double after;
};

struct DacConfig {
    Index population_size = 2;  // N
    Index groups = 10;          // M
    std::uint64_t budget = 0;   // max FEs, initialisation included
    Direction direction = Direction::Minimize;
    bool regroup_each_iteration = true;
    /// Reuse each row's stored objective value as its own-row candidate.
    bool cache_incumbent = true;
    /// Iteration cap on top of the FE budget.
    std::optional<std::uint64_t> max_iterations;
    /// Trace points are kept at every multiple of this FE count plus the last FE.
    std::uint64_t log_every = 1;
    std::uint64_t seed = 0;
    std::function<void(const StepEvent&)> on_step;

    void validate(Index dimension) const;
};

struct RunResult {
    FullSolution best;
    ConvergenceTrace trace;
    std::uint64_t evaluations = 0;
    /// Completed full sweeps.
    std::uint64_t iterations = 0;
    bool budget_exhausted = false;
};

/// Counted evaluation with best-so-far bookkeeping and trace sampling.
class Evaluator {
public:
    Evaluator(Objective f, Direction direction, EvalCounter& counter, std::uint64_t log_every);

    double operator()(FullSolution& x);

    EvalCounter& counter() { return counter_; }
    const FullSolution& best() const { return best_; }
    double best_value() const { return best_value_; }
    Direction direction() const { return direction_; }

    /// Appends the final point if it is not already the last one.
    ConvergenceTrace finish();

private:
    Objective f_;
    Direction direction_;
    EvalCounter& counter_;
    std::uint64_t log_every_;
    FullSolution best_;
    double best_value_;
    ConvergenceTrace trace_;
};

/// Uniform random permutation of {0..D-1} cut into M contiguous chunks
/// whose sizes differ by at most one (larger chunks first). Each group is
/// returned in ascending order.
Grouping random_grouping(Index dimension, Index groups, Rng& rng);

using Decomposer = std::function<Grouping(Index dimension, Index groups, Rng& rng)>;

/// Scores `partial` against the remainder of every population row and
/// returns the best. Row `own_row` is served from its cached value when
/// `use_incumbent_cache` is set; ties go to the lowest row index.
ComplementChoice best_complement(const PartialSolution& partial, std::optional<Index> own_row,
                                 const Population& pop, Evaluator& eval, bool use_incumbent_cache = true);

/// Approximate complement of row j's own partial on group i.
ComplementChoice approximate_complement(Index row, Index group, const Population& pop, Evaluator& eval,
                                        bool use_incumbent_cache = true);

/// Produces new partial solutions for the generic loop.
class SearchOperator {
public:
    virtual ~SearchOperator() = default;

    /// New partial for row j on group i of the current grouping.
    virtual PartialSolution propose(const Population& pop, Index row, Index group, const ProblemSpec& spec,
                                    Rng& rng) = 0;

    /// Whether the proposal for (row, group) was at least as good as the
    /// incumbent under their respective complements.
    virtual void feedback(Population&, Index /*row*/, Index /*group*/, bool /*success*/) {}
};

/// N uniform rows over the bounds, each evaluated once.
Population initialize_population(const ProblemSpec& spec, Index size, Index groups, Evaluator& eval, Rng& rng);

/// Generic loop: per group, all N proposals are drawn, then every old and
/// new partial gets its approximate complement against the unchanged
/// population, then each row keeps the better of its pair together with
/// that pair member's complement.
RunResult run_dac(const Objective& f, const ProblemSpec& spec, const DacConfig& cfg, SearchOperator& search,
                  const Decomposer& decomposer, Rng& rng);

}  // namespace dacopt
