#pragma once

// DAC-HC: N parallel hill climbers, one per population row, each mutating
// its partial solution on every group of a fresh random grouping. The old
// and the mutated partial share one approximate complement, so a group step
// costs exactly N fresh FEs per row.

#include "dacopt/framework.hpp"

namespace dacopt {

inline constexpr double kSigmaMin = 1e-12;
inline constexpr double kSigmaMax = 1e4;
inline constexpr double kSigmaInitial = 1.0;

/// Step-size adaptation constants for a run. The sigma values themselves
/// live in Population::step_sizes, indexed by (row, group slot) and kept
/// across regroupings.
struct HcState {
    double tau;  // 1 / sqrt(D + 1)

    static HcState for_dimension(Index dimension);
};

/// Adds isotropic N(0, sigma^2) noise to every coordinate, then clamps to
/// the bounds.
PartialSolution gaussian_mutation(const PartialSolution& partial, double sigma, const ProblemSpec& spec, Rng& rng);

/// sigma * exp(tau * (success - 1/5)), clamped to [kSigmaMin, kSigmaMax].
double update_step_size(double sigma, bool success, double tau);

enum class ComplementPolicy {
    /// Best remainder over all population rows.
    Population,
    /// Always the row's own remainder (parallel hill climbing).
    OwnRow,
};

struct HillClimbOptions {
    ComplementPolicy complement = ComplementPolicy::Population;
};

RunResult run_dachc(const Objective& f, const ProblemSpec& spec, const DacConfig& cfg, Rng& rng,
                    const HillClimbOptions& options = {});

/// Parallel hill climbing baseline: run_dachc with the complement fixed to
/// each row's own remainder. Costs one fresh FE per (group, row).
RunResult run_phc(const Objective& f, const ProblemSpec& spec, const DacConfig& cfg, Rng& rng);

/// Gaussian mutation with 1/5-rule feedback, for use with run_dac.
class GaussianSearch : public SearchOperator {
public:
    explicit GaussianSearch(Index dimension) : state_(HcState::for_dimension(dimension)) {}

    PartialSolution propose(const Population& pop, Index row, Index group, const ProblemSpec& spec,
                            Rng& rng) override;
    void feedback(Population& pop, Index row, Index group, bool success) override;

private:
    HcState state_;
};

}  // namespace dacopt
