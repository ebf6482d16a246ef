#include "dacopt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dacopt {

std::uint64_t GridSpec::size() const {
    std::uint64_t total = 1;
    for (const auto& p : points) {
        if (p.empty()) return 0;
        if (total > std::numeric_limits<std::uint64_t>::max() / p.size())
            return std::numeric_limits<std::uint64_t>::max();
        total *= p.size();
    }
    return total;
}

void GridSpec::validate() const {
    if (indices.size() != points.size()) throw InvalidArgument("grid indices and point lists differ in length");
    for (Index n = 0; n < points.size(); ++n) {
        if (points[n].size() < 2)
            throw InvalidArgument("grid dimension " + std::to_string(indices[n]) + " needs at least 2 points");
        for (double v : points[n])
            if (!std::isfinite(v)) throw NonFiniteValue("non-finite grid point");
    }
}

AccurateComplement accurate_complement(const Objective& f, const PartialSolution& partial, const GridSpec& grid,
                                       Direction direction, std::uint64_t cap) {
    grid.validate();
    const std::uint64_t total = grid.size();
    if (total > cap)
        throw GridTooLarge("grid has " + (total == std::numeric_limits<std::uint64_t>::max()
                                              ? std::string("more than 2^64")
                                              : std::to_string(total)) +
                           " points, cap is " + std::to_string(cap));

    const Index dimension = partial.size() + grid.indices.size();
    if (complement_indices(partial.indices, dimension) != [&] {
            auto sorted = grid.indices;
            std::sort(sorted.begin(), sorted.end());
            return sorted;
        }())
        throw OverlapOrGapError("grid dimensions must be exactly the complement of the partial solution");

    PartialSolution candidate{grid.indices, Vector(grid.indices.size())};
    std::vector<Index> odometer(grid.indices.size(), 0);
    AccurateComplement best;
    bool have = false;
    for (std::uint64_t step = 0; step < total; ++step) {
        for (Index n = 0; n < odometer.size(); ++n) candidate.values[n] = grid.points[n][odometer[n]];
        const FullSolution x = compose(partial, candidate);
        const double v = f(x.values());
        if (std::isnan(v)) throw NonFiniteValue("objective returned NaN");
        if (!have || strictly_better(v, best.value, direction)) {
            best.complement = candidate;
            best.value = v;
            best.grid_index = odometer;
            have = true;
        }
        for (Index n = odometer.size(); n-- > 0;) {
            if (++odometer[n] < grid.points[n].size()) break;
            odometer[n] = 0;
        }
    }
    return best;
}

namespace {

bool clearly_less(double a, double b) {
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return b - a > kInteractionMargin * scale;
}

bool is_flip(double f00, double f10, double f01, double f11) {
    return (clearly_less(f00, f10) && clearly_less(f11, f01)) || (clearly_less(f10, f00) && clearly_less(f01, f11));
}

double eval_checked(const Objective& f, const Vector& x) {
    const double v = f(x);
    if (std::isnan(v)) throw NonFiniteValue("objective returned NaN");
    return v;
}

}  // namespace

std::optional<InteractionWitness> detect_interaction(const Objective& f, Index i, Index j, const ProblemSpec& spec,
                                                     std::uint64_t trials, Rng& rng) {
    const Index d = spec.dimension();
    if (i >= d || j >= d) throw IndexOutOfRange("interaction dimensions outside the problem");
    if (i == j) throw InvalidArgument("interaction needs two distinct dimensions");
    if (trials == 0) throw InvalidArgument("trials must be at least 1");

    Vector x(d);
    for (std::uint64_t t = 0; t < trials; ++t) {
        for (Index k = 0; k < d; ++k) x[k] = rng.uniform(spec.bounds(k).lo, spec.bounds(k).hi);
        const double xi_alt = rng.uniform(spec.bounds(i).lo, spec.bounds(i).hi);
        const double xj_alt = rng.uniform(spec.bounds(j).lo, spec.bounds(j).hi);
        const double xi = x[i];
        const double xj = x[j];

        const double f00 = eval_checked(f, x);
        x[i] = xi_alt;
        const double f10 = eval_checked(f, x);
        x[j] = xj_alt;
        const double f11 = eval_checked(f, x);
        x[i] = xi;
        const double f01 = eval_checked(f, x);
        x[j] = xj;

        if (is_flip(f00, f10, f01, f11))
            return InteractionWitness{x, i, j, xi, xi_alt, xj, xj_alt, f00, f10, f01, f11};
    }
    return std::nullopt;
}

bool verify_witness(const Objective& f, const InteractionWitness& w) {
    Vector x = w.base;
    x[w.i] = w.xi;
    x[w.j] = w.xj;
    const double f00 = eval_checked(f, x);
    x[w.i] = w.xi_alt;
    const double f10 = eval_checked(f, x);
    x[w.j] = w.xj_alt;
    const double f11 = eval_checked(f, x);
    x[w.i] = w.xi;
    const double f01 = eval_checked(f, x);
    return is_flip(f00, f10, f01, f11);
}

ProbabilityReport probability_report(std::span<const double> probabilities, Index subproblem_size) {
    if (probabilities.empty()) throw InvalidArgument("need at least one complement variable");
    ProbabilityReport r;
    r.probabilities.assign(probabilities.begin(), probabilities.end());
    r.subproblem_size = subproblem_size;
    double sum = 0.0;
    for (double p : probabilities) {
        if (!(p >= 0.0 && p <= 1.0)) throw OutOfRangeProbability("probability " + format_double(p) + " outside [0, 1]");
        r.product *= p;
        sum += p;
    }
    const double count = static_cast<double>(probabilities.size());
    r.mean = sum / count;
    r.bound = std::pow(r.mean, count);
    if (r.product > r.bound * (1.0 + 1e-12))
        throw std::logic_error("product " + format_double(r.product) + " exceeds AM-GM bound " + format_double(r.bound));
    return r;
}

double ranking_agreement(const Objective& f, const std::vector<PartialSolution>& partials,
                         const std::vector<FullSolution>& population, const GridSpec& grid, Direction direction,
                         std::uint64_t cap) {
    if (partials.size() < 2) throw InvalidArgument("ranking agreement needs at least two partial solutions");
    if (population.empty()) throw InvalidArgument("empty population");

    Population pop;
    pop.rows = population;
    for (auto& row : pop.rows) row.clear_cache();
    EvalCounter counter(std::numeric_limits<std::uint64_t>::max());
    Evaluator eval(f, direction, counter, std::numeric_limits<std::uint64_t>::max());

    Vector accurate(partials.size());
    Vector approximate(partials.size());
    for (Index p = 0; p < partials.size(); ++p) {
        accurate[p] = accurate_complement(f, partials[p], grid, direction, cap).value;
        approximate[p] = best_complement(partials[p], std::nullopt, pop, eval).value;
    }

    const auto sign = [](double a, double b) { return (a > b) - (a < b); };
    std::uint64_t concordant = 0;
    std::uint64_t pairs = 0;
    for (Index a = 0; a < partials.size(); ++a) {
        for (Index b = a + 1; b < partials.size(); ++b) {
            ++pairs;
            if (sign(accurate[a], accurate[b]) == sign(approximate[a], approximate[b])) ++concordant;
        }
    }
    return static_cast<double>(concordant) / static_cast<double>(pairs);
}

LogLinearFit loglinear_fit(const ConvergenceTrace& trace, double window) {
    if (!(window > 0.0 && window <= 1.0)) throw InvalidArgument("window must lie in (0, 1]");
    if (trace.size() < 2) throw InvalidArgument("trace needs at least two points");

    const Index n = trace.size();
    Index take = static_cast<Index>(std::ceil(window * static_cast<double>(n)));
    take = std::clamp<Index>(take, 2, n);
    Index first = n - take;

    LogLinearFit fit;
    Index positive_from = n;
    while (positive_from > first && trace[positive_from - 1].best_value > 0.0) --positive_from;
    if (positive_from != first) {
        fit.truncated = true;
        first = positive_from;
        if (n - first < 2) throw NonPositiveValues("fewer than two positive values at the end of the trace");
    }

    const Index count = n - first;
    double mx = 0.0;
    double my = 0.0;
    for (Index k = first; k < n; ++k) {
        mx += static_cast<double>(trace[k].fe);
        my += std::log(trace[k].best_value);
    }
    mx /= static_cast<double>(count);
    my /= static_cast<double>(count);
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (Index k = first; k < n; ++k) {
        const double dx = static_cast<double>(trace[k].fe) - mx;
        const double dy = std::log(trace[k].best_value) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    fit.points_used = count;
    if (sxx == 0.0 || syy == 0.0) {
        fit.degenerate = true;
        fit.slope = 0.0;
        fit.intercept = my;
        fit.r_squared = 0.0;
        return fit;
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = (sxy * sxy) / (sxx * syy);
    return fit;
}

ConvergenceTrace median_trace(const std::vector<ConvergenceTrace>& traces) {
    if (traces.empty()) return {};
    std::vector<std::uint64_t> fes;
    std::uint64_t start = 0;
    for (const auto& t : traces) {
        if (t.empty()) return {};
        start = std::max(start, t.front().fe);
        for (const auto& p : t) fes.push_back(p.fe);
    }
    std::sort(fes.begin(), fes.end());
    fes.erase(std::unique(fes.begin(), fes.end()), fes.end());

    ConvergenceTrace out;
    std::vector<Index> cursor(traces.size(), 0);
    Vector values(traces.size());
    for (std::uint64_t fe : fes) {
        for (Index r = 0; r < traces.size(); ++r) {
            const auto& t = traces[r];
            while (cursor[r] + 1 < t.size() && t[cursor[r] + 1].fe <= fe) ++cursor[r];
            values[r] = t[cursor[r]].best_value;
        }
        if (fe < start) continue;
        Vector sorted = values;
        std::sort(sorted.begin(), sorted.end());
        const Index m = sorted.size();
        const double med = m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
        out.push_back({fe, med});
    }
    return out;
}

}  // namespace dacopt
