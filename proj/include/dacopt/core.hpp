#pragma once

// Shared domain types for the dacopt toolkit: problem bounds, full and
// partial solutions, groupings, FE-metered evaluation and the repo-wide
// deterministic random stream.
//
// Dimension indices are 0-based throughout the C++ API.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dacopt {

using Index = std::size_t;
using Vector = std::vector<double>;

/// Black-box objective. Receives a full D-dimensional point.
using Objective = std::function<double(std::span<const double>)>;

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OverlapOrGapError : public Error { using Error::Error; };
class IndexOutOfRange : public Error { using Error::Error; };
class BudgetExhausted : public Error { using Error::Error; };
class NonFiniteValue : public Error { using Error::Error; };
class InvalidArgument : public Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Problem description

enum class Direction { Minimize, Maximize };

struct Interval {
    double lo;
    double hi;
};

class ProblemSpec {
public:
    ProblemSpec(Index dimension, Interval bounds, Direction direction = Direction::Minimize);
    ProblemSpec(std::vector<Interval> bounds, Direction direction = Direction::Minimize);

    Index dimension() const { return bounds_.size(); }
    const Interval& bounds(Index k) const { return bounds_[k]; }
    const std::vector<Interval>& bounds() const { return bounds_; }
    Direction direction() const { return direction_; }

    double clamp(Index k, double v) const;
    bool contains(std::span<const double> x) const;

private:
    std::vector<Interval> bounds_;
    Direction direction_;
};

// ---------------------------------------------------------------------------
// Solutions

/// A D-dimensional point plus the objective value of exactly these values,
/// when known. Any write through `set` or `assign` drops the cache.
class FullSolution {
public:
    FullSolution() = default;
    explicit FullSolution(Vector values) : values_(std::move(values)) {}

    const Vector& values() const { return values_; }
    Index size() const { return values_.size(); }
    double operator[](Index k) const { return values_[k]; }

    void set(Index k, double v) {
        values_[k] = v;
        cached_.reset();
    }
    void assign(Vector values) {
        values_ = std::move(values);
        cached_.reset();
    }

    const std::optional<double>& cached_value() const { return cached_; }
    void set_cached_value(double v) { cached_ = v; }
    void clear_cache() { cached_.reset(); }

private:
    Vector values_;
    std::optional<double> cached_;
};

/// Values of a solution restricted to an ordered set of dimensions.
struct PartialSolution {
    std::vector<Index> indices;
    Vector values;

    Index size() const { return indices.size(); }
    bool empty() const { return indices.empty(); }
};

/// Partition of {0..D-1} into M sub-problems.
class Grouping {
public:
    Grouping() = default;
    /// Validates that `groups` partition {0..dimension-1}.
    Grouping(std::vector<std::vector<Index>> groups, Index dimension);

    Index size() const { return groups_.size(); }
    Index dimension() const { return dimension_; }
    const std::vector<Index>& operator[](Index i) const { return groups_[i]; }
    const std::vector<std::vector<Index>>& groups() const { return groups_; }

    /// Ascending indices of every dimension outside group i.
    std::vector<Index> complement(Index i) const;

private:
    std::vector<std::vector<Index>> groups_;
    Index dimension_ = 0;
};

/// Ascending {0..dimension-1} \ indices.
std::vector<Index> complement_indices(std::span<const Index> indices, Index dimension);

/// Place a's values at a's indices and b's at b's. The index sets must be
/// disjoint and cover {0..|a|+|b|-1}; the result carries no cached value.
FullSolution compose(const PartialSolution& a, const PartialSolution& b);

PartialSolution project(const FullSolution& x, std::span<const Index> indices);

/// `row` with the coordinates of `partial` overwritten. Same result as
/// compose(partial, project(row, complement(partial.indices))).
FullSolution overlay(const PartialSolution& partial, const FullSolution& row);

// ---------------------------------------------------------------------------
// Evaluation accounting

class EvalCounter {
public:
    explicit EvalCounter(std::uint64_t budget);

    std::uint64_t consumed() const { return consumed_; }
    std::uint64_t budget() const { return budget_; }
    std::uint64_t remaining() const { return budget_ - consumed_; }
    bool exhausted() const { return consumed_ >= budget_; }

    /// Throws BudgetExhausted if no FE is left.
    void charge();

private:
    std::uint64_t consumed_ = 0;
    std::uint64_t budget_;
};

/// Returns the cached value if present (free); otherwise evaluates f,
/// charges one FE and caches the result. NaN results throw NonFiniteValue.
double counted_eval(const Objective& f, FullSolution& x, EvalCounter& counter);

/// True when `challenger` is at least as good as `incumbent`. Ties go to
/// the challenger.
bool better(double challenger, double incumbent, Direction direction);

/// Strict variant of `better`: ties go to the incumbent.
bool strictly_better(double challenger, double incumbent, Direction direction);

/// The worst possible value under `direction` (+inf for Minimize).
double worst_value(Direction direction);

// ---------------------------------------------------------------------------
// Deterministic randomness

/// Derives an independent seed from (base_seed, label, index) via
/// FNV-1a over the label and SplitMix64 finalisation.
std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view label, std::uint64_t index = 0);

/// The repo-wide random stream: mt19937_64 with hand-written transforms so
/// draws are identical across standard library implementations.
class Rng {
public:
    static constexpr std::string_view algorithm = "mt19937_64/splitmix64-derive/v1";

    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    /// Sub-stream seeded with derive_seed(seed(), label, index).
    Rng split(std::string_view label, std::uint64_t index = 0) const {
        return Rng(derive_seed(seed_, label, index));
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01();
    double uniform(double lo, double hi);
    /// Standard normal via Box-Muller; consumes two uniforms per draw.
    double normal();
    /// Uniform in {0..n-1}, unbiased by rejection.
    std::uint64_t below(std::uint64_t n);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (Index k = v.size(); k > 1; --k) {
            const Index r = static_cast<Index>(below(k));
            std::swap(v[k - 1], v[r]);
        }
    }

    std::vector<Index> permutation(Index n);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Strict full-string parse; throws InvalidArgument on anything else.
double parse_double(std::string_view text);

}  // namespace dacopt
