#pragma once

// Benchmark functions: the three base functions and the shifted/permuted
// composites built from them.

#include "dacopt/core.hpp"

#include <string>
#include <string_view>

namespace dacopt {

class DimensionTooSmall : public Error { using Error::Error; };
class DimensionMismatch : public Error { using Error::Error; };
class IncompatibleDimensions : public Error { using Error::Error; };

double sphere(std::span<const double> z);

/// sum_i (sum_{j<=i} z_j)^2 with a running prefix sum.
double schwefel12(std::span<const double> z);

/// sum_{i<D} 100 (z_i^2 - z_{i+1})^2 + (z_i - 1)^2; needs |z| >= 2.
double rosenbrock(std::span<const double> z);

enum class FunctionId { F1, F2, F3, F4, F5, Sphere, Schwefel12, Rosenbrock };

std::string_view to_string(FunctionId id);
/// Accepts "f1".."f5", "sphere", "schwefel12", "rosenbrock" (case-insensitive).
std::optional<FunctionId> parse_function_id(std::string_view name);

struct InstanceOptions {
    Interval bounds{-100.0, 100.0};
    /// Shift entries are drawn uniformly from this interval.
    Interval shift_range{-80.0, 80.0};
};

/// A benchmark function bound to a shift o and permutation P. Immutable
/// after construction and safe to share between threads.
class BenchmarkInstance {
public:
    FunctionId function() const { return function_; }
    Index dimension() const { return shift_.size(); }
    Index group_size() const { return group_size_; }
    std::uint64_t seed() const { return seed_; }
    const Vector& shift() const { return shift_; }
    /// P as 0-based indices: block entries are z[P[a]], z[P[a+1]], ...
    const std::vector<Index>& permutation() const { return permutation_; }
    const InstanceOptions& options() const { return options_; }

    ProblemSpec problem() const;

    /// Global optimum: o for F1-F4 and the Schwefel/sphere bases, o + 1 for
    /// the Rosenbrock-based functions.
    Vector optimum() const;

    double operator()(std::span<const double> x) const;

    /// Copyable callable referencing this instance (which must outlive it).
    Objective objective() const;

private:
    friend BenchmarkInstance make_instance(FunctionId, Index, Index, std::uint64_t, const InstanceOptions&);
    friend BenchmarkInstance make_custom_instance(FunctionId, Index, Vector, std::vector<Index>,
                                                  const InstanceOptions&);

    FunctionId function_ = FunctionId::Sphere;
    Index group_size_ = 1;
    std::uint64_t seed_ = 0;
    Vector shift_;
    std::vector<Index> permutation_;
    InstanceOptions options_;
};

/// Builds an instance whose shift and permutation depend only on
/// (function, dimension, group_size, seed, options). Composite functions
/// need compatible sizes: F1 D >= m, F2 (D/2) % m == 0, F3/F5 D % m == 0.
BenchmarkInstance make_instance(FunctionId function, Index dimension, Index group_size, std::uint64_t seed,
                                const InstanceOptions& options = {});

/// Instance with a caller-supplied shift and 0-based permutation.
BenchmarkInstance make_custom_instance(FunctionId function, Index group_size, Vector shift,
                                       std::vector<Index> permutation, const InstanceOptions& options = {});

double evaluate_instance(const BenchmarkInstance& instance, std::span<const double> x);

}  // namespace dacopt
