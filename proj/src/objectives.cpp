#include "dacopt/objectives.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

namespace dacopt {

namespace {

void require_finite(std::span<const double> z) {
    for (double v : z)
        if (!std::isfinite(v)) throw NonFiniteValue("non-finite input coordinate");
}

void require_nonempty(std::span<const double> z) {
    if (z.empty()) throw DimensionTooSmall("empty input vector");
}

// Shifted, permuted coordinate accessor. z(pos) = x[P[pos]] - o[P[pos]].
struct Shifted {
    std::span<const double> x;
    const Vector& o;
    const std::vector<Index>& perm;
    bool permuted;

    double operator()(Index pos) const {
        const Index k = permuted ? perm[pos] : pos;
        return x[k] - o[k];
    }
};

double schwefel_block(const Shifted& z, Index first, Index last) {
    double prefix = 0.0;
    double sum = 0.0;
    for (Index p = first; p < last; ++p) {
        prefix += z(p);
        sum += prefix * prefix;
    }
    return sum;
}

double sphere_block(const Shifted& z, Index first, Index last) {
    double sum = 0.0;
    for (Index p = first; p < last; ++p) {
        const double v = z(p);
        sum += v * v;
    }
    return sum;
}

double rosenbrock_block(const Shifted& z, Index first, Index last) {
    double sum = 0.0;
    double cur = z(first);
    for (Index p = first + 1; p < last; ++p) {
        const double next = z(p);
        const double a = cur * cur - next;
        const double b = cur - 1.0;
        sum += 100.0 * a * a + b * b;
        cur = next;
    }
    return sum;
}

bool rosenbrock_based(FunctionId id) {
    return id == FunctionId::F5 || id == FunctionId::Rosenbrock;
}

constexpr std::array<std::pair<std::string_view, FunctionId>, 8> kNames{{
    {"f1", FunctionId::F1},
    {"f2", FunctionId::F2},
    {"f3", FunctionId::F3},
    {"f4", FunctionId::F4},
    {"f5", FunctionId::F5},
    {"sphere", FunctionId::Sphere},
    {"schwefel12", FunctionId::Schwefel12},
    {"rosenbrock", FunctionId::Rosenbrock},
}};

}  // namespace

double sphere(std::span<const double> z) {
    require_nonempty(z);
    require_finite(z);
    double sum = 0.0;
    for (double v : z) sum += v * v;
    return sum;
}

double schwefel12(std::span<const double> z) {
    require_nonempty(z);
    require_finite(z);
    double prefix = 0.0;
    double sum = 0.0;
    for (double v : z) {
        prefix += v;
        sum += prefix * prefix;
    }
    return sum;
}

double rosenbrock(std::span<const double> z) {
    if (z.size() < 2) throw DimensionTooSmall("rosenbrock needs at least 2 dimensions");
    require_finite(z);
    double sum = 0.0;
    for (Index i = 0; i + 1 < z.size(); ++i) {
        const double a = z[i] * z[i] - z[i + 1];
        const double b = z[i] - 1.0;
        sum += 100.0 * a * a + b * b;
    }
    return sum;
}

std::string_view to_string(FunctionId id) {
    for (const auto& [name, value] : kNames)
        if (value == id) return name;
    return "?";
}

std::optional<FunctionId> parse_function_id(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (const auto& [n, value] : kNames)
        if (n == lower) return value;
    return std::nullopt;
}

ProblemSpec BenchmarkInstance::problem() const {
    return ProblemSpec(dimension(), options_.bounds, Direction::Minimize);
}

Vector BenchmarkInstance::optimum() const {
    Vector x = shift_;
    if (rosenbrock_based(function_))
        for (double& v : x) v += 1.0;
    return x;
}

double BenchmarkInstance::operator()(std::span<const double> x) const {
    return evaluate_instance(*this, x);
}

Objective BenchmarkInstance::objective() const {
    const BenchmarkInstance* self = this;
    return [self](std::span<const double> x) { return evaluate_instance(*self, x); };
}

namespace {

void check_sizes(FunctionId function, Index dimension, Index group_size) {
    const auto incompatible = [&](const std::string& why) {
        return IncompatibleDimensions(std::string(to_string(function)) + " with D=" + std::to_string(dimension) +
                                      ", m=" + std::to_string(group_size) + ": " + why);
    };
    if (dimension == 0) throw incompatible("D must be positive");
    switch (function) {
        case FunctionId::F1:
            if (group_size == 0 || dimension < group_size) throw incompatible("need 1 <= m <= D");
            break;
        case FunctionId::F2:
            if (group_size == 0 || dimension % 2 != 0 || (dimension / 2) % group_size != 0)
                throw incompatible("need D even and D/2 divisible by m");
            break;
        case FunctionId::F3:
            if (group_size == 0 || dimension % group_size != 0) throw incompatible("need D divisible by m");
            break;
        case FunctionId::F5:
            if (group_size < 2 || dimension % group_size != 0)
                throw incompatible("need m >= 2 and D divisible by m");
            break;
        case FunctionId::Rosenbrock:
            if (dimension < 2) throw incompatible("rosenbrock needs D >= 2");
            break;
        default:
            break;
    }
}

}  // namespace

BenchmarkInstance make_custom_instance(FunctionId function, Index group_size, Vector shift,
                                       std::vector<Index> permutation, const InstanceOptions& options) {
    const Index dimension = shift.size();
    check_sizes(function, dimension, group_size);
    if (!(options.bounds.lo < options.bounds.hi)) throw InvalidArgument("invalid instance bounds");
    if (permutation.size() != dimension) throw InvalidArgument("permutation length differs from D");
    std::vector<char> seen(dimension, 0);
    for (Index p : permutation) {
        if (p >= dimension || seen[p]) throw InvalidArgument("not a permutation of 0..D-1");
        seen[p] = 1;
    }
    for (double o : shift)
        if (!std::isfinite(o)) throw NonFiniteValue("non-finite shift entry");

    BenchmarkInstance inst;
    inst.function_ = function;
    inst.group_size_ = group_size;
    inst.options_ = options;
    inst.shift_ = std::move(shift);
    inst.permutation_ = std::move(permutation);
    if (!ProblemSpec(dimension, options.bounds).contains(inst.optimum()))
        throw InvalidArgument("instance optimum falls outside the bounds");
    return inst;
}

BenchmarkInstance make_instance(FunctionId function, Index dimension, Index group_size, std::uint64_t seed,
                                const InstanceOptions& options) {
    check_sizes(function, dimension, group_size);
    const auto& sr = options.shift_range;
    if (!(sr.lo <= sr.hi)) throw InvalidArgument("invalid shift range");

    Rng shift_rng(derive_seed(seed, "shift"));
    Vector shift(dimension);
    for (double& o : shift) {
        o = shift_rng.uniform(sr.lo, sr.hi);
        if (rosenbrock_based(function)) o = std::min(o, sr.hi - 1.0);
    }
    Rng perm_rng(derive_seed(seed, "permutation"));
    BenchmarkInstance inst =
        make_custom_instance(function, group_size, std::move(shift), perm_rng.permutation(dimension), options);
    inst.seed_ = seed;
    return inst;
}

double evaluate_instance(const BenchmarkInstance& inst, std::span<const double> x) {
    const Index d = inst.dimension();
    if (x.size() != d)
        throw DimensionMismatch("expected " + std::to_string(d) + " coordinates, got " + std::to_string(x.size()));
    require_finite(x);
    const Index m = inst.group_size();
    const Shifted permuted{x, inst.shift(), inst.permutation(), true};
    const Shifted plain{x, inst.shift(), inst.permutation(), false};

    switch (inst.function()) {
        case FunctionId::F1:
            return schwefel_block(permuted, 0, m) * 1e6 + sphere_block(permuted, m, d);
        case FunctionId::F2: {
            double sum = 0.0;
            for (Index k = 0; k < d / (2 * m); ++k) sum += schwefel_block(permuted, k * m, (k + 1) * m);
            return sum + sphere_block(permuted, d / 2, d);
        }
        case FunctionId::F3: {
            double sum = 0.0;
            for (Index k = 0; k < d / m; ++k) sum += schwefel_block(permuted, k * m, (k + 1) * m);
            return sum;
        }
        case FunctionId::F4:
            return schwefel_block(plain, 0, d);
        case FunctionId::F5: {
            double sum = 0.0;
            for (Index k = 0; k < d / m; ++k) sum += rosenbrock_block(permuted, k * m, (k + 1) * m);
            return sum;
        }
        case FunctionId::Sphere:
            return sphere_block(plain, 0, d);
        case FunctionId::Schwefel12:
            return schwefel_block(plain, 0, d);
        case FunctionId::Rosenbrock:
            return rosenbrock_block(plain, 0, d);
    }
    return 0.0;
}

}  // namespace dacopt
