#include "dacopt/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

namespace dacopt {

ProblemSpec::ProblemSpec(Index dimension, Interval bounds, Direction direction)
    : ProblemSpec(std::vector<Interval>(dimension, bounds), direction) {}

ProblemSpec::ProblemSpec(std::vector<Interval> bounds, Direction direction)
    : bounds_(std::move(bounds)), direction_(direction) {
    if (bounds_.empty()) throw InvalidArgument("problem dimension must be at least 1");
    for (Index k = 0; k < bounds_.size(); ++k) {
        const auto& b = bounds_[k];
        if (!(b.lo < b.hi))
            throw InvalidArgument("empty bound interval on dimension " + std::to_string(k));
    }
}

double ProblemSpec::clamp(Index k, double v) const {
    return std::clamp(v, bounds_[k].lo, bounds_[k].hi);
}

bool ProblemSpec::contains(std::span<const double> x) const {
    if (x.size() != bounds_.size()) return false;
    for (Index k = 0; k < x.size(); ++k)
        if (!(x[k] >= bounds_[k].lo && x[k] <= bounds_[k].hi)) return false;
    return true;
}

Grouping::Grouping(std::vector<std::vector<Index>> groups, Index dimension)
    : groups_(std::move(groups)), dimension_(dimension) {
    std::vector<char> seen(dimension, 0);
    Index total = 0;
    for (const auto& g : groups_) {
        for (Index k : g) {
            if (k >= dimension) throw IndexOutOfRange("group index " + std::to_string(k) + " >= D");
            if (seen[k]) throw OverlapOrGapError("dimension " + std::to_string(k) + " in two groups");
            seen[k] = 1;
        }
        total += g.size();
    }
    if (total != dimension) throw OverlapOrGapError("groups do not cover every dimension");
}

std::vector<Index> Grouping::complement(Index i) const {
    return complement_indices(groups_.at(i), dimension_);
}

std::vector<Index> complement_indices(std::span<const Index> indices, Index dimension) {
    std::vector<char> in(dimension, 0);
    for (Index k : indices) {
        if (k >= dimension) throw IndexOutOfRange("index " + std::to_string(k) + " >= D");
        in[k] = 1;
    }
    std::vector<Index> out;
    out.reserve(dimension - std::min(dimension, indices.size()));
    for (Index k = 0; k < dimension; ++k)
        if (!in[k]) out.push_back(k);
    return out;
}

namespace {

void place(const PartialSolution& p, Vector& out, std::vector<char>& seen) {
    if (p.values.size() != p.indices.size())
        throw InvalidArgument("partial solution has mismatched index/value lengths");
    for (Index n = 0; n < p.indices.size(); ++n) {
        const Index k = p.indices[n];
        if (k >= out.size()) throw OverlapOrGapError("index " + std::to_string(k) + " outside composed range");
        if (seen[k]) throw OverlapOrGapError("index " + std::to_string(k) + " present in both parts");
        seen[k] = 1;
        out[k] = p.values[n];
    }
}

}  // namespace

FullSolution compose(const PartialSolution& a, const PartialSolution& b) {
    const Index dimension = a.indices.size() + b.indices.size();
    Vector out(dimension, 0.0);
    std::vector<char> seen(dimension, 0);
    place(a, out, seen);
    place(b, out, seen);
    // Disjointness plus |a|+|b| == D implies full coverage.
    return FullSolution(std::move(out));
}

PartialSolution project(const FullSolution& x, std::span<const Index> indices) {
    PartialSolution p;
    p.indices.assign(indices.begin(), indices.end());
    p.values.reserve(indices.size());
    for (Index k : indices) {
        if (k >= x.size()) throw IndexOutOfRange("index " + std::to_string(k) + " >= D");
        p.values.push_back(x[k]);
    }
    return p;
}

FullSolution overlay(const PartialSolution& partial, const FullSolution& row) {
    Vector out = row.values();
    for (Index n = 0; n < partial.indices.size(); ++n) {
        const Index k = partial.indices[n];
        if (k >= out.size()) throw IndexOutOfRange("index " + std::to_string(k) + " >= D");
        out[k] = partial.values[n];
    }
    return FullSolution(std::move(out));
}

EvalCounter::EvalCounter(std::uint64_t budget) : budget_(budget) {
    if (budget == 0) throw InvalidArgument("FE budget must be positive");
}

void EvalCounter::charge() {
    if (consumed_ >= budget_) throw BudgetExhausted("FE budget of " + std::to_string(budget_) + " exhausted");
    ++consumed_;
}

double counted_eval(const Objective& f, FullSolution& x, EvalCounter& counter) {
    if (x.cached_value()) return *x.cached_value();
    if (counter.exhausted())
        throw BudgetExhausted("FE budget of " + std::to_string(counter.budget()) + " exhausted");
    const double v = f(x.values());
    if (std::isnan(v)) throw NonFiniteValue("objective returned NaN");
    counter.charge();
    x.set_cached_value(v);
    return v;
}

bool better(double challenger, double incumbent, Direction direction) {
    if (std::isnan(challenger) || std::isnan(incumbent)) throw NonFiniteValue("NaN in comparison");
    return direction == Direction::Minimize ? challenger <= incumbent : challenger >= incumbent;
}

bool strictly_better(double challenger, double incumbent, Direction direction) {
    if (std::isnan(challenger) || std::isnan(incumbent)) throw NonFiniteValue("NaN in comparison");
    return direction == Direction::Minimize ? challenger < incumbent : challenger > incumbent;
}

double worst_value(Direction direction) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return direction == Direction::Minimize ? inf : -inf;
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view label, std::uint64_t index) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(splitmix64(splitmix64(base_seed) ^ h) ^ index);
}

double Rng::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

double Rng::normal() {
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw InvalidArgument("Rng::below(0)");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do {
        r = engine_();
    } while (r >= limit);
    return r % n;
}

std::vector<Index> Rng::permutation(Index n) {
    std::vector<Index> p(n);
    for (Index k = 0; k < n; ++k) p[k] = k;
    shuffle(p);
    return p;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || first == last)
        throw InvalidArgument("not a number: '" + std::string(text) + "'");
    return v;
}

}  // namespace dacopt
