#include "dacopt/framework.hpp"

#include <algorithm>
#include <cassert>

namespace dacopt {

void DacConfig::validate(Index dimension) const {
    if (population_size == 0) throw InvalidArgument("population size N must be at least 1");
    if (groups == 0 || groups > dimension)
        throw InvalidGroupCount("group count M=" + std::to_string(groups) + " must lie in [1, D=" +
                                std::to_string(dimension) + "]");
    if (budget < population_size) throw InvalidArgument("FE budget must cover the initial population");
    if (log_every == 0) throw InvalidArgument("log_every must be at least 1");
}

Evaluator::Evaluator(Objective f, Direction direction, EvalCounter& counter, std::uint64_t log_every)
    : f_(std::move(f)), direction_(direction), counter_(counter), log_every_(log_every),
      best_value_(worst_value(direction)) {
    if (log_every_ == 0) throw InvalidArgument("log_every must be at least 1");
}

double Evaluator::operator()(FullSolution& x) {
    if (x.cached_value()) return *x.cached_value();
    const double v = counted_eval(f_, x, counter_);
    if (best_.size() == 0 || strictly_better(v, best_value_, direction_)) {
        best_ = x;
        best_value_ = v;
    }
    if (counter_.consumed() % log_every_ == 0) trace_.push_back({counter_.consumed(), best_value_});
    return v;
}

ConvergenceTrace Evaluator::finish() {
    if (counter_.consumed() > 0 && (trace_.empty() || trace_.back().fe != counter_.consumed()))
        trace_.push_back({counter_.consumed(), best_value_});
    return trace_;
}

Grouping random_grouping(Index dimension, Index groups, Rng& rng) {
    if (groups == 0 || groups > dimension)
        throw InvalidGroupCount("cannot split D=" + std::to_string(dimension) + " into M=" + std::to_string(groups) +
                                " non-empty groups");
    const auto perm = rng.permutation(dimension);
    const Index base = dimension / groups;
    const Index extra = dimension % groups;
    std::vector<std::vector<Index>> out(groups);
    Index pos = 0;
    for (Index g = 0; g < groups; ++g) {
        const Index len = base + (g < extra ? 1 : 0);
        out[g].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                      perm.begin() + static_cast<std::ptrdiff_t>(pos + len));
        std::sort(out[g].begin(), out[g].end());
        pos += len;
    }
    return Grouping(std::move(out), dimension);
}

ComplementChoice best_complement(const PartialSolution& partial, std::optional<Index> own_row,
                                 const Population& pop, Evaluator& eval, bool use_incumbent_cache) {
    if (pop.rows.empty()) throw InvalidArgument("empty population");
    ComplementChoice choice;
    bool have = false;
    for (Index k = 0; k < pop.rows.size(); ++k) {
        double v;
        if (own_row && *own_row == k && use_incumbent_cache && pop.rows[k].cached_value()) {
            v = *pop.rows[k].cached_value();
        } else {
            FullSolution combo = overlay(partial, pop.rows[k]);
            v = eval(combo);
            ++choice.fresh_evals;
        }
        if (!have || strictly_better(v, choice.value, eval.direction())) {
            choice.row_index = k;
            choice.value = v;
            have = true;
        }
    }
    return choice;
}

ComplementChoice approximate_complement(Index row, Index group, const Population& pop, Evaluator& eval,
                                        bool use_incumbent_cache) {
    if (row >= pop.rows.size()) throw IndexOutOfRange("row " + std::to_string(row) + " outside population");
    const PartialSolution own = project(pop.rows[row], pop.grouping[group]);
    return best_complement(own, row, pop, eval, use_incumbent_cache);
}

Population initialize_population(const ProblemSpec& spec, Index size, Index groups, Evaluator& eval, Rng& rng) {
    Population pop;
    pop.step_sizes = StepSizes(size, groups, 1.0);
    pop.rows.reserve(size);
    const Index d = spec.dimension();
    for (Index j = 0; j < size; ++j) {
        Vector x(d);
        for (Index k = 0; k < d; ++k) x[k] = rng.uniform(spec.bounds(k).lo, spec.bounds(k).hi);
        pop.rows.emplace_back(std::move(x));
    }
    for (auto& row : pop.rows) eval(row);
    return pop;
}

namespace {

[[maybe_unused]] bool not_worse(double after, double before, Direction dir) {
    return better(after, before, dir);
}

}  // namespace

RunResult run_dac(const Objective& f, const ProblemSpec& spec, const DacConfig& cfg, SearchOperator& search,
                  const Decomposer& decomposer, Rng& rng) {
    cfg.validate(spec.dimension());
    EvalCounter counter(cfg.budget);
    Evaluator eval(f, cfg.direction, counter, cfg.log_every);
    RunResult result;
    const Index n = cfg.population_size;
    const Index d = spec.dimension();

    try {
        Population pop = initialize_population(spec, n, cfg.groups, eval, rng);
        pop.grouping = decomposer(d, cfg.groups, rng);
        for (std::uint64_t t = 0; !cfg.max_iterations || t < *cfg.max_iterations; ++t) {
            if (t > 0 && cfg.regroup_each_iteration) pop.grouping = decomposer(d, cfg.groups, rng);
            for (Index i = 0; i < pop.grouping.size(); ++i) {
                const auto& group = pop.grouping[i];
                std::vector<PartialSolution> proposals;
                proposals.reserve(n);
                for (Index j = 0; j < n; ++j) proposals.push_back(search.propose(pop, j, i, spec, rng));

                std::vector<ComplementChoice> old_choice(n);
                std::vector<ComplementChoice> new_choice(n);
                for (Index j = 0; j < n; ++j) {
                    old_choice[j] = approximate_complement(j, i, pop, eval, cfg.cache_incumbent);
                    new_choice[j] = best_complement(proposals[j], std::nullopt, pop, eval, cfg.cache_incumbent);
                }

                // Complements come from the population as it was before this group.
                const std::vector<FullSolution> snapshot = pop.rows;
                for (Index j = 0; j < n; ++j) {
                    const double before = *pop.rows[j].cached_value();
                    const bool success = better(new_choice[j].value, old_choice[j].value, cfg.direction);
                    search.feedback(pop, j, i, success);
                    const PartialSolution winner = success ? proposals[j] : project(snapshot[j], group);
                    const ComplementChoice& c = success ? new_choice[j] : old_choice[j];
                    pop.rows[j] = overlay(winner, snapshot[c.row_index]);
                    pop.rows[j].set_cached_value(c.value);
                    assert(not_worse(c.value, before, cfg.direction));
                    if (cfg.on_step) cfg.on_step({t, i, j, before, c.value});
                }
            }
            ++result.iterations;
        }
    } catch (const BudgetExhausted&) {
        result.budget_exhausted = true;
    }

    result.best = eval.best();
    result.trace = eval.finish();
    result.evaluations = counter.consumed();
    return result;
}

}  // namespace dacopt
