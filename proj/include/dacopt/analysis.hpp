#pragma once

// Ground-truth oracles and diagnostics: exhaustive complement search over a
// grid, sampling-based detection of interacting variables, the product vs.
// AM-GM bound on accurate-complement probability, ranking agreement between
// approximate and accurate complements, and log-linear trace fitting.

#include "dacopt/framework.hpp"

#include <optional>

namespace dacopt {

class GridTooLarge : public Error { using Error::Error; };
class OutOfRangeProbability : public Error { using Error::Error; };
class NonPositiveValues : public Error { using Error::Error; };

inline constexpr std::uint64_t kDefaultGridCap = 1'000'000;

/// Axis-aligned grid over a set of dimensions: points[n] are the candidate
/// values of dimension indices[n].
struct GridSpec {
    std::vector<Index> indices;
    std::vector<Vector> points;

    /// Number of grid vectors; saturates at UINT64_MAX.
    std::uint64_t size() const;
    void validate() const;
};

struct AccurateComplement {
    PartialSolution complement;
    double value = 0.0;
    /// Position of the complement in the grid, one entry per grid dimension.
    std::vector<Index> grid_index;
};

/// Exhaustive search over every grid vector composed with `partial`. Grid
/// vectors are enumerated lexicographically (last dimension fastest); the
/// first optimum wins ties. The grid must cover exactly the dimensions
/// missing from `partial`.
AccurateComplement accurate_complement(const Objective& f, const PartialSolution& partial, const GridSpec& grid,
                                       Direction direction = Direction::Minimize,
                                       std::uint64_t cap = kDefaultGridCap);

struct InteractionWitness {
    Vector base;
    Index i = 0;
    Index j = 0;
    double xi = 0.0, xi_alt = 0.0;
    double xj = 0.0, xj_alt = 0.0;
    /// f at (xi, xj), (xi', xj), (xi, xj'), (xi', xj').
    double f00 = 0.0, f10 = 0.0, f01 = 0.0, f11 = 0.0;
};

inline constexpr double kInteractionMargin = 1e-12;

/// Samples random (x, xi', xj') quadruples inside the bounds and returns the
/// first whose i-ranking flips when dimension j changes, beyond a relative
/// margin. No witness after `trials` samples is evidence of separability,
/// not proof.
std::optional<InteractionWitness> detect_interaction(const Objective& f, Index i, Index j, const ProblemSpec& spec,
                                                     std::uint64_t trials, Rng& rng);

/// Re-evaluates a witness from scratch and checks both strict inequalities.
bool verify_witness(const Objective& f, const InteractionWitness& w);

struct ProbabilityReport {
    Vector probabilities;
    /// Size of the sub-problem the probabilities complement.
    Index subproblem_size = 0;
    double product = 1.0;
    double mean = 1.0;
    /// mean ^ (number of complement variables)
    double bound = 1.0;
};

/// Probability of complementing a d_i-dimensional sub-problem correctly as
/// the product of per-variable probabilities, with its AM-GM upper bound.
ProbabilityReport probability_report(std::span<const double> probabilities, Index subproblem_size);

/// Fraction of partial-solution pairs ordered the same way by their
/// accurate-complement value (grid oracle) and their approximate-complement
/// value (best remainder among `population`). Pairs tied under both count
/// as concordant.
double ranking_agreement(const Objective& f, const std::vector<PartialSolution>& partials,
                         const std::vector<FullSolution>& population, const GridSpec& grid,
                         Direction direction = Direction::Minimize, std::uint64_t cap = kDefaultGridCap);

struct LogLinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    Index points_used = 0;
    /// Zero variance in log value or FE; slope 0 and r_squared 0 by convention.
    bool degenerate = false;
    /// The window held non-positive values; the fit uses the longest
    /// positive suffix.
    bool truncated = false;
};

/// Least squares of ln(best_value) against FE over the trailing `window`
/// fraction of trace points.
LogLinearFit loglinear_fit(const ConvergenceTrace& trace, double window);

/// Pointwise median of step-function traces over the union of their FE
/// points, starting where every trace has a value.
ConvergenceTrace median_trace(const std::vector<ConvergenceTrace>& traces);

}  // namespace dacopt
