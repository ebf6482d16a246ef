#include "dacopt/dachc.hpp"
#include "dacopt/objectives.hpp"

#include <doctest.h>

#include <cmath>

using namespace dacopt;

namespace {

const Objective kSphere = [](std::span<const double> x) { return sphere(x); };

DacConfig hc_config(Index n, Index m, std::uint64_t budget) {
    DacConfig cfg;
    cfg.population_size = n;
    cfg.groups = m;
    cfg.budget = budget;
    return cfg;
}

}  // namespace

TEST_CASE("tau is 1/sqrt(D+1)") {
    CHECK(HcState::for_dimension(99).tau == 0.1);
    CHECK(HcState::for_dimension(3).tau == 0.5);
}

TEST_CASE("step size update factors") {
    CHECK(update_step_size(1.0, true, 0.1) == doctest::Approx(1.0832870676749586).epsilon(1e-15));
    CHECK(update_step_size(1.0, false, 0.5) == doctest::Approx(0.9048374180359595).epsilon(1e-15));

    for (double tau : {0.1, 0.5, 0.03}) {
        double s = 2.5;
        s = update_step_size(s, true, tau);
        for (int k = 0; k < 4; ++k) s = update_step_size(s, false, tau);
        CHECK(std::abs(s - 2.5) < 1e-14);
    }
}

TEST_CASE("step size stays clamped") {
    double s = 1.0;
    for (int k = 0; k < 100000; ++k) s = update_step_size(s, true, 1.0);
    CHECK(s == kSigmaMax);
    for (int k = 0; k < 100000; ++k) s = update_step_size(s, false, 1.0);
    CHECK(s == kSigmaMin);
    Rng rng(3);
    for (int k = 0; k < 100000; ++k) {
        s = update_step_size(s, rng.uniform01() < 0.5, 0.7);
        REQUIRE(s >= kSigmaMin);
        REQUIRE(s <= kSigmaMax);
    }
}

TEST_CASE("gaussian mutation statistics") {
    const ProblemSpec spec(3, Interval{-100, 100});
    const PartialSolution p{{0, 2}, {1.0, -2.0}};
    Rng rng(8);
    const int n = 100000;
    double sum0 = 0.0, sum1 = 0.0, sq0 = 0.0, cross = 0.0;
    for (int k = 0; k < n; ++k) {
        const auto q = gaussian_mutation(p, 1.0, spec, rng);
        REQUIRE(q.indices == p.indices);
        const double d0 = q.values[0] - 1.0;
        const double d1 = q.values[1] + 2.0;
        sum0 += d0;
        sum1 += d1;
        sq0 += d0 * d0;
        cross += d0 * d1;
    }
    CHECK(std::abs(sum0 / n) < 3.0 / std::sqrt(double(n)));
    CHECK(std::abs(sum1 / n) < 3.0 / std::sqrt(double(n)));
    CHECK(std::abs(sq0 / n - 1.0) < 0.02);
    CHECK(std::abs(cross / n) < 0.02);
}

TEST_CASE("gaussian mutation limits") {
    const ProblemSpec spec(1, Interval{-100, 100});
    Rng rng(1);
    const PartialSolution p{{0}, {3.25}};
    CHECK(gaussian_mutation(p, 1e-300, spec, rng).values[0] == 3.25);

    const PartialSolution top{{0}, {100.0}};
    for (int k = 0; k < 1000; ++k) {
        const double v = gaussian_mutation(top, 1e6, spec, rng).values[0];
        REQUIRE(v <= 100.0);
        REQUIRE(v >= -100.0);
    }
}

TEST_CASE("DAC-HC FE law is N + k M N^2") {
    const ProblemSpec spec(12, Interval{-100, 100});
    for (auto [n, m] : {std::pair<Index, Index>{1, 1}, {2, 10}, {3, 4}}) {
        for (std::uint64_t k : {1u, 2u, 5u}) {
            auto cfg = hc_config(n, m, 1'000'000);
            cfg.max_iterations = k;
            Rng rng(k);
            const auto r = run_dachc(kSphere, spec, cfg, rng);
            CHECK(r.evaluations == n + k * m * n * n);
            CHECK(r.iterations == k);

            Rng rng2(k);
            CHECK(run_phc(kSphere, spec, cfg, rng2).evaluations == n + k * m * n);
        }
    }
}

TEST_CASE("DAC-HC stops exactly at the budget") {
    const auto inst = make_instance(FunctionId::F1, 100, 10, 0);
    Rng rng(0);
    const auto r = run_dachc(inst.objective(), inst.problem(), hc_config(2, 10, 4041), rng);
    CHECK(r.evaluations == 4041);
    CHECK(r.budget_exhausted);
    CHECK(r.iterations == 100);  // 2 + 100 * 40 = 4002
    CHECK(r.trace.back().fe == 4041);
}

TEST_CASE("PHC equals DAC-HC when N = 1") {
    const auto inst = make_instance(FunctionId::F3, 20, 5, 2);
    const auto cfg = hc_config(1, 4, 5000);
    Rng a(9);
    Rng b(9);
    const auto x = run_dachc(inst.objective(), inst.problem(), cfg, a);
    const auto y = run_phc(inst.objective(), inst.problem(), cfg, b);
    CHECK(x.trace == y.trace);
    CHECK(x.best.values() == y.best.values());
}

TEST_CASE("own-row policy is PHC") {
    const auto inst = make_instance(FunctionId::F2, 20, 5, 2);
    const auto cfg = hc_config(3, 4, 5000);
    Rng a(4);
    Rng b(4);
    const auto x = run_dachc(inst.objective(), inst.problem(), cfg, a, {ComplementPolicy::OwnRow});
    const auto y = run_phc(inst.objective(), inst.problem(), cfg, b);
    CHECK(x.trace == y.trace);
}

TEST_CASE("rows and trace are monotone") {
    for (auto id : {FunctionId::F1, FunctionId::F3, FunctionId::F5}) {
        const auto inst = make_instance(id, 20, 5, 6);
        for (bool phc : {false, true}) {
            auto cfg = hc_config(3, 4, 20000);
            Index violations = 0;
            cfg.on_step = [&](const StepEvent& e) {
                if (e.after > e.before) ++violations;
            };
            Rng rng(1);
            const auto r = phc ? run_phc(inst.objective(), inst.problem(), cfg, rng)
                               : run_dachc(inst.objective(), inst.problem(), cfg, rng);
            CHECK(violations == 0);
            for (Index k = 1; k < r.trace.size(); ++k) REQUIRE(r.trace[k].best_value <= r.trace[k - 1].best_value);
        }
    }
}

TEST_CASE("(1+1) hill climber on a 1-D sphere") {
    const ProblemSpec spec(1, Interval{-100, 100});
    Rng rng(12);
    auto cfg = hc_config(1, 1, 2000);
    const auto r = run_dachc(kSphere, spec, cfg, rng);
    CHECK(r.evaluations == 2000);
    for (Index k = 1; k < r.trace.size(); ++k) REQUIRE(r.trace[k].best_value <= r.trace[k - 1].best_value);
    CHECK(r.trace.back().best_value < 1e-20);
}

TEST_CASE("DAC-HC on scaled F1 reduces the best value by three orders") {
    const auto inst = make_instance(FunctionId::F1, 100, 10, 2024);
    auto cfg = hc_config(2, 10, 200000);
    cfg.log_every = 1;
    Rng rng(derive_seed(2024, "run", 0));
    const auto r = run_dachc(inst.objective(), inst.problem(), cfg, rng);
    const double initial = r.trace[cfg.population_size - 1].best_value;
    CHECK(r.trace.back().best_value < 1e-3 * initial);
}

TEST_CASE("DAC-HC with the generic loop") {
    // GaussianSearch plugged into run_dac updates sigma per slot.
    const ProblemSpec spec(6, Interval{-10, 10});
    DacConfig cfg = hc_config(2, 3, 4000);
    GaussianSearch search(6);
    Rng rng(1);
    const auto r = run_dac(kSphere, spec, cfg, search, random_grouping, rng);
    CHECK(r.evaluations == 4000);
    CHECK(r.trace.back().best_value < r.trace[1].best_value);
}
