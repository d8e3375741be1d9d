#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dymo/error.hpp"
#include "dymo/estimation.hpp"
#include "dymo/rng.hpp"

using namespace dymo;
using namespace dymo::est;

namespace {

// Reference quantile: walk the sorted values, first one whose cumulative
// count reaches ceil(p n).
double sorted_walk_quantile(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(v.size()) - 1e-9));
    return v[std::max<std::size_t>(k, 1) - 1];
}

std::vector<double> uniform_population(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> pop(n);
    for (double& v : pop) v = rng.uniform();
    std::sort(pop.begin(), pop.end());
    return pop;
}

}  // namespace

TEST_CASE("empirical quantile picks the first order statistic and the maximum") {
    std::vector<double> v;
    for (int i = 1; i <= 100; ++i) v.push_back(i);
    const SampleSet s(v);
    CHECK(empirical_quantile(s, 0.01) == 1.0);
    CHECK(empirical_quantile(s, 0.011) == 2.0);
    CHECK(empirical_quantile(s, 1.0) == 100.0);
}

TEST_CASE("empirical quantile matches a sorted-walk oracle on random sets") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = static_cast<std::size_t>(1 + rng.below(300));
        std::vector<double> v(n);
        for (double& x : v) x = std::round(rng.gaussian(0.0, 50.0)) / 10.0;
        const double p = 0.001 + 0.999 * rng.uniform();
        CHECK(empirical_quantile(SampleSet(v), p) == sorted_walk_quantile(v, p));
    }
}

TEST_CASE("empirical quantile respects weights") {
    SampleSet s;
    s.add(1.0, 1.0);
    s.add(2.0, 3.0);
    s.add(3.0, 6.0);
    CHECK(empirical_quantile(s, 0.1) == 1.0);
    CHECK(empirical_quantile(s, 0.11) == 2.0);
    CHECK(empirical_quantile(s, 0.4) == 2.0);
    CHECK(empirical_quantile(s, 0.41) == 3.0);
}

TEST_CASE("empirical quantile is monotone in p") {
    Rng rng(11);
    std::vector<double> v(257);
    for (double& x : v) x = rng.gaussian();
    const SampleSet s(v);
    double prev = -INFINITY;
    for (int k = 1; k <= 1000; ++k) {
        const double q = empirical_quantile(s, k / 1000.0);
        CHECK(q >= prev);
        prev = q;
    }
}

TEST_CASE("empirical quantile and sample validation errors") {
    CHECK_THROWS_AS(empirical_quantile(SampleSet{}, 0.5), InsufficientData);
    SampleSet s;
    CHECK_THROWS_AS(s.add(NAN), DomainError);
    CHECK_THROWS_AS(s.add(INFINITY), DomainError);
    CHECK_THROWS_AS(s.add(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(s.add(1.0, -1.0), DomainError);
    s.add(1.0);
    CHECK_THROWS_AS(empirical_quantile(s, 0.0), DomainError);
    CHECK_THROWS_AS(empirical_quantile(s, 1.5), DomainError);
}

TEST_CASE("one-step estimate on a uniform law: unbiased with the order-statistics variance") {
    // F(x) = x on [0, 1], so the true quantile of an estimate is the estimate.
    Rng rng(2024);
    const double p = 0.01;
    const int runs = 500;
    std::vector<double> f;
    for (int i = 0; i < runs; ++i) {
        SampleSet s;
        for (int k = 0; k < 400; ++k) s.add(rng.uniform());
        f.push_back(empirical_quantile(s, p));
    }
    const double mean = std::accumulate(f.begin(), f.end(), 0.0) / runs;
    double var = 0.0;
    for (double x : f) var += (x - mean) * (x - mean);
    var /= runs - 1;
    const double theory_sd = std::sqrt(p * (1 - p) / 400.0);
    CHECK(theory_sd == doctest::Approx(0.00497).epsilon(0.002));
    CHECK(std::abs(mean - p) <= 3.0 * std::sqrt(var / runs));
    CHECK(std::abs(var / (theory_sd * theory_sd) - 1.0) <= 0.2);
}

TEST_CASE("quantile variance") {
    CHECK(quantile_variance(0.01, 400) == doctest::Approx(2.475e-5).epsilon(1e-12));
    CHECK(quantile_variance(0.5, 100) == doctest::Approx(2.5e-3).epsilon(1e-12));
    CHECK(quantile_variance(0.0, 100) == 0.0);
    CHECK_THROWS_AS(quantile_variance(0.5, 0.0), DomainError);
}

TEST_CASE("optimal two-step plan") {
    const TwoStepPlan a = optimal_two_step_plan(0.01, 400);
    CHECK(a.p1 == doctest::Approx(0.1));
    CHECK(a.p2 == doctest::Approx(0.1));
    CHECK(a.r1 == 200.0);
    CHECK(a.r2 == 200.0);
    CHECK_NOTHROW(a.validate(0.01, 400));
    const TwoStepPlan b = optimal_two_step_plan(1e-4, 100);
    CHECK(b.p1 == doctest::Approx(0.01));
    CHECK(b.r1 == 50.0);
    CHECK_THROWS_AS((TwoStepPlan{0.1, 0.2, 200, 200}.validate(0.01, 400)), DomainError);
    CHECK_THROWS_AS((TwoStepPlan{0.1, 0.1, 200, 100}.validate(0.01, 400)), DomainError);
}

TEST_CASE("two-step error expression") {
    const double oracle = 3 * 0.01 * 2 * std::sqrt(9.0 / 200.0);
    CHECK(oracle == doctest::Approx(0.012728).epsilon(1e-4));
    CHECK(two_step_error_expression(0.1, 200, 0.01, 400) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(two_step_error_expression(0.1, 200, 0.01, 400) ==
          doctest::Approx(two_step_bound(0.01, 400)).epsilon(1e-12));
    CHECK_THROWS_AS(two_step_error_expression(0.01, 200, 0.01, 400), DomainError);
    CHECK_THROWS_AS(two_step_error_expression(1.0, 200, 0.01, 400), DomainError);
    CHECK_THROWS_AS(two_step_error_expression(0.1, 0, 0.01, 400), DomainError);
    CHECK_THROWS_AS(two_step_error_expression(0.1, 400, 0.01, 400), DomainError);
}

TEST_CASE("two-step error expression decreases as the budget grows") {
    for (double p1 : {0.02, 0.05, 0.1, 0.3, 0.9}) {
        for (double frac : {0.1, 0.5, 0.9}) {
            double prev = INFINITY;
            for (double r = 50; r <= 5000; r *= 1.5) {
                const double e = two_step_error_expression(p1, frac * r, 0.01, r);
                CHECK(e < prev);
                prev = e;
            }
        }
    }
}

TEST_CASE("two-step error expression is stationary at the optimal plan") {
    for (double p : {1e-2, 1e-3, 1e-4}) {
        const double r = 400;
        const double at = two_step_error_expression(std::sqrt(p), r / 2, p, r);
        for (double dp : {0.97, 1.03}) {
            for (double dr : {0.97, 1.0, 1.03}) {
                CHECK(two_step_error_expression(std::sqrt(p) * dp, r / 2 * dr, p, r) > at);
            }
        }
    }
}

TEST_CASE("two-step and order-statistics bounds") {
    CHECK(two_step_bound(0.01, 400) == doctest::Approx(0.012728).epsilon(1e-4));
    CHECK(two_step_bound(0.01, 1600) == doctest::Approx(two_step_bound(0.01, 400) / 2));
    const double p = 1.0 / 49.0;
    CHECK(two_step_bound(p, 300) == doctest::Approx(order_statistics_bound(p, 300)).epsilon(0.02));
    CHECK(two_step_bound(0.001, 400) < order_statistics_bound(0.001, 400));
    CHECK(two_step_bound(0.1, 400) > order_statistics_bound(0.1, 400));
}

TEST_CASE("iterative bound") {
    CHECK(iterative_bound(0.01, 100, 0.001) == doctest::Approx(0.005));
    CHECK(iterative_bound(0.02, 400, 0.001) == doctest::Approx(0.005));
    CHECK_THROWS_AS(iterative_bound(0.01, 99, 0.001), DomainError);
    CHECK_THROWS_AS(iterative_bound(0.01, 100, 0.0071), DomainError);
    CHECK_NOTHROW(iterative_bound(0.01, 100, 0.007));
}

TEST_CASE("subpopulation fraction estimate") {
    const FractionEstimate a = estimate_subpopulation_fraction(50, 2500, 0.2);
    CHECK(a.value == doctest::Approx(0.1));
    CHECK(a.variance == doctest::Approx((0.1 / 2500) * 0.8 / 0.2));
    CHECK(estimate_subpopulation_fraction(0, 2500, 0.2).value == 0.0);
    const FractionEstimate census = estimate_subpopulation_fraction(250, 2500, 1.0);
    CHECK(census.value == doctest::Approx(0.1));
    CHECK(census.variance == 0.0);
    CHECK(estimate_subpopulation_fraction(100, 5000, 0.2).value ==
          doctest::Approx(estimate_subpopulation_fraction(50, 2500, 0.2).value));
    CHECK_THROWS_AS(estimate_subpopulation_fraction(1, 100, 0.0), DomainError);
    CHECK_THROWS_AS(estimate_subpopulation_fraction(1, 0, 0.5), DomainError);
}

TEST_CASE("subpopulation estimate is unbiased with the stated variance") {
    Rng rng(5);
    const std::size_t m = 2500;
    const std::size_t group = 250;
    const double q = 0.2;
    const int runs = 4000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < runs; ++i) {
        std::size_t y = 0;
        rng.for_each_bernoulli(group, q, [&](std::size_t) { ++y; });
        const double v = estimate_subpopulation_fraction(static_cast<double>(y), m, q).value;
        sum += v;
        sq += v * v;
    }
    const double mean = sum / runs;
    const double var = sq / runs - mean * mean;
    const double theory = (0.1 / m) * (1 - q) / q;
    CHECK(std::abs(mean - 0.1) <= 3 * std::sqrt(theory / runs));
    CHECK(var == doctest::Approx(theory).epsilon(0.1));
}

TEST_CASE("exponential smoothing") {
    CHECK(exp_smooth(10, 12, 0.5) == 11.0);
    CHECK(exp_smooth(10, 12, 1.0) == 12.0);
    CHECK(std::pow(0.5, 7) == doctest::Approx(0.0078).epsilon(0.002));
    CHECK(std::pow(0.5, 7) < 0.01);
    CHECK_THROWS_AS(exp_smooth(1, 2, 0.0), DomainError);
    CHECK_THROWS_AS(exp_smooth(1, 2, 1.5), DomainError);
}

TEST_CASE("iterative state validation") {
    CHECK_NOTHROW(IterativeState{}.validate());
    CHECK_THROWS_AS((IterativeState{0, -1, 0.5, 10, 0.5}.validate()), DomainError);
    CHECK_THROWS_AS((IterativeState{0, 5, 1.5, 10, 0.5}.validate()), DomainError);
    CHECK_THROWS_AS((IterativeState{0, 5, 0.5, -1, 0.5}.validate()), DomainError);
    CHECK_THROWS_AS((IterativeState{0, 5, 0.5, 10, 0.0}.validate()), DomainError);
}

TEST_CASE("population cdf") {
    const std::vector<double> pop{1, 2, 2, 3};
    CHECK(population_cdf(pop, 0.5) == 0.0);
    CHECK(population_cdf(pop, 2) == 0.75);
    CHECK(population_cdf(pop, 3) == 1.0);
    CHECK_THROWS_AS(population_cdf(std::vector<double>{}, 1), InsufficientData);
}

TEST_CASE("sampling procedures with a full budget are exact") {
    const auto pop = uniform_population(1000, 3);
    Rng rng(1);
    CHECK(one_step_estimate(pop, 0.01, 5000, rng) == pop[9]);
    const TwoStepResult r = two_step_estimate(pop, {0.1, 0.1, 5000, 5000}, rng);
    CHECK(r.first_step == pop[99]);
    CHECK(r.first_reports == 1000);
    CHECK(r.second_reports == 100);
    CHECK(r.estimate == pop[9]);
}

TEST_CASE("two-step beats one-step on a uniform population") {
    const auto pop = uniform_population(200000, 9);
    Rng one(1);
    Rng two(2);
    const double p = 0.001;
    const double r = 400;
    const TwoStepPlan plan = optimal_two_step_plan(p, r);
    double e1 = 0.0;
    double e2 = 0.0;
    int covered = 0;
    const int runs = 300;
    for (int i = 0; i < runs; ++i) {
        const double f1 = population_cdf(pop, one_step_estimate(pop, p, r, one)) - p;
        const double f2 = population_cdf(pop, two_step_estimate(pop, plan, two).estimate) - p;
        e1 += f1 * f1;
        e2 += f2 * f2;
        covered += std::abs(f2) <= two_step_bound(p, r) ? 1 : 0;
    }
    CHECK(e2 < e1);
    CHECK(covered >= runs * 99 / 100);
}
