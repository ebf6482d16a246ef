#include "dacopt/dachc.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace dacopt {

HcState HcState::for_dimension(Index dimension) {
    return HcState{1.0 / std::sqrt(static_cast<double>(dimension) + 1.0)};
}

PartialSolution gaussian_mutation(const PartialSolution& partial, double sigma, const ProblemSpec& spec, Rng& rng) {
    PartialSolution out = partial;
    for (Index n = 0; n < out.indices.size(); ++n) {
        const Index k = out.indices[n];
        out.values[n] = spec.clamp(k, out.values[n] + sigma * rng.normal());
    }
    return out;
}

double update_step_size(double sigma, bool success, double tau) {
    const double indicator = success ? 1.0 : 0.0;
    return std::clamp(sigma * std::exp(tau * (indicator - 0.2)), kSigmaMin, kSigmaMax);
}

RunResult run_dachc(const Objective& f, const ProblemSpec& spec, const DacConfig& cfg, Rng& rng,
                    const HillClimbOptions& options) {
    cfg.validate(spec.dimension());
    EvalCounter counter(cfg.budget);
    Evaluator eval(f, cfg.direction, counter, cfg.log_every);
    const HcState hc = HcState::for_dimension(spec.dimension());
    const Index n = cfg.population_size;
    const Index d = spec.dimension();
    RunResult result;

    try {
        Population pop = initialize_population(spec, n, cfg.groups, eval, rng);
        for (std::uint64_t t = 0; !cfg.max_iterations || t < *cfg.max_iterations; ++t) {
            pop.grouping = random_grouping(d, cfg.groups, rng);
            for (Index i = 0; i < cfg.groups; ++i) {
                const auto& group = pop.grouping[i];
                for (Index j = 0; j < n; ++j) {
                    const double before = *pop.rows[j].cached_value();
                    const PartialSolution old_part = project(pop.rows[j], group);
                    const PartialSolution new_part = gaussian_mutation(old_part, pop.step_sizes(j, i), spec, rng);

                    const ComplementChoice shared =
                        options.complement == ComplementPolicy::Population
                            ? best_complement(old_part, j, pop, eval)
                            : ComplementChoice{j, before, 0};

                    FullSolution challenger = overlay(new_part, pop.rows[shared.row_index]);
                    const double challenger_value = eval(challenger);
                    const bool success = better(challenger_value, shared.value, cfg.direction);
                    pop.step_sizes(j, i) = update_step_size(pop.step_sizes(j, i), success, hc.tau);

                    if (success) {
                        pop.rows[j] = std::move(challenger);
                    } else if (shared.row_index != j) {
                        pop.rows[j] = overlay(old_part, pop.rows[shared.row_index]);
                        pop.rows[j].set_cached_value(shared.value);
                    }
                    const double after = *pop.rows[j].cached_value();
                    assert(better(after, before, cfg.direction));
                    if (cfg.on_step) cfg.on_step({t, i, j, before, after});
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

RunResult run_phc(const Objective& f, const ProblemSpec& spec, const DacConfig& cfg, Rng& rng) {
    return run_dachc(f, spec, cfg, rng, HillClimbOptions{ComplementPolicy::OwnRow});
}

PartialSolution GaussianSearch::propose(const Population& pop, Index row, Index group, const ProblemSpec& spec,
                                        Rng& rng) {
    return gaussian_mutation(project(pop.rows[row], pop.grouping[group]), pop.step_sizes(row, group), spec, rng);
}

void GaussianSearch::feedback(Population& pop, Index row, Index group, bool success) {
    pop.step_sizes(row, group) = update_step_size(pop.step_sizes(row, group), success, state_.tau);
}

}  // namespace dacopt
