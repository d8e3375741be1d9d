#include "dymo/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dymo/error.hpp"

namespace dymo::est {

namespace {

// Cumulative-weight comparisons tolerate this much relative round-off so
// that e.g. 100 unit weights at p = 0.01 hit the first order statistic.
constexpr double kMassSlack = 1e-12;

void require_fraction(double p, const char* what) {
    if (!(p > 0.0 && p <= 1.0)) {
        throw DomainError(std::string(what) + " must be in (0, 1], got " + std::to_string(p));
    }
}

}  // namespace

SampleSet::SampleSet(std::span<const double> values) {
    samples_.reserve(values.size());
    for (const double v : values) {
        add(v);
    }
}

void SampleSet::add(double value, double weight) {
    if (!std::isfinite(value)) {
        throw DomainError("sample value must be finite");
    }
    if (!(weight > 0.0) || !std::isfinite(weight)) {
        throw DomainError("sample weight must be positive and finite");
    }
    samples_.push_back({value, weight});
    total_weight_ += weight;
}

void QuantileQuery::validate() const {
    require_fraction(p, "p");
    if (!(r > 0.0)) {
        throw DomainError("report budget r must be positive");
    }
}

void TwoStepPlan::validate(double p, double r) const {
    if (std::abs(p1 * p2 - p) > 1e-12 * p) {
        throw DomainError("two-step plan violates p1 * p2 = p");
    }
    if (std::abs(r1 + r2 - r) > 1e-9 * r) {
        throw DomainError("two-step plan violates r1 + r2 = r");
    }
}

void IterativeState::validate() const {
    if (!(L >= 0.0)) {
        throw DomainError("Lipschitz bound L must be >= 0");
    }
    if (!(p_L_hat >= 0.0 && p_L_hat <= 1.0)) {
        throw DomainError("p_L estimate must be in [0, 1]");
    }
    if (!(m_hat >= 0.0)) {
        throw DomainError("population estimate must be >= 0");
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw DomainError("smoothing factor must be in (0, 1]");
    }
}

double empirical_quantile(const SampleSet& samples, double p) {
    require_fraction(p, "p");
    if (samples.empty()) {
        throw InsufficientData("empirical quantile over an empty report set");
    }
    std::vector<Sample> sorted(samples.samples().begin(), samples.samples().end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Sample& a, const Sample& b) { return a.value < b.value; });

    const double total = samples.total_weight();
    const double target = p * total - kMassSlack * total;
    double cum = 0.0;
    for (const Sample& s : sorted) {
        cum += s.weight;
        if (cum >= target) {
            return s.value;
        }
    }
    return sorted.back().value;
}

double quantile_variance(double p, double r) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("p must be in [0, 1]");
    }
    if (!(r > 0.0)) {
        throw DomainError("report budget r must be positive");
    }
    return p * (1.0 - p) / r;
}

TwoStepPlan optimal_two_step_plan(double p, double r) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("p must be in (0, 1)");
    }
    const double root = std::sqrt(p);
    return {root, root, r / 2.0, r / 2.0};
}

double two_step_error_expression(double p1, double r1, double p, double r) {
    if (!(p > 0.0 && p < p1 && p1 < 1.0)) {
        throw DomainError("two-step error expression requires p < p1 < 1");
    }
    if (!(r1 > 0.0 && r1 < r)) {
        throw DomainError("two-step error expression requires 0 < r1 < r");
    }
    return 3.0 * p *
           (std::sqrt((1.0 / p1 - 1.0) / r1) + std::sqrt((p1 / p - 1.0) / (r - r1)));
}

double two_step_bound(double p, double r) {
    if (!(p > 0.0 && p < 1.0) || !(r > 0.0)) {
        throw DomainError("two-step bound requires 0 < p < 1 and r > 0");
    }
    const double root = std::sqrt(p);
    return 6.0 * std::sqrt(2.0) * std::sqrt(p * root * (1.0 - root) / r);
}

double order_statistics_bound(double p, double r) {
    return 3.0 * std::sqrt(quantile_variance(p, r));
}

double iterative_bound(double p_L, double r, double p) {
    if (r < 100.0) {
        throw DomainError("iterative bound applies only for an expected sample size r >= 100");
    }
    if (!(p_L > 0.0 && p_L <= 1.0)) {
        throw DomainError("p_L must be in (0, 1]");
    }
    if (!(p > 0.0) || p > 0.7 * p_L * (1.0 + 1e-12)) {
        throw DomainError("iterative bound applies only for p <= 0.7 p_L");
    }
    return 5.0 * p_L / std::sqrt(r);
}

FractionEstimate estimate_subpopulation_fraction(double reports, double population, double rate) {
    if (!(population > 0.0)) {
        throw DomainError("population must be positive");
    }
    if (!(rate > 0.0 && rate <= 1.0)) {
        throw DomainError("report rate q must be in (0, 1]");
    }
    if (reports < 0.0) {
        throw DomainError("report count must be >= 0");
    }
    const double value = reports / (population * rate);
    return {value, (value / population) * (1.0 - rate) / rate};
}

double exp_smooth(double previous, double fresh, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw DomainError("smoothing factor must be in (0, 1]");
    }
    return alpha * fresh + (1.0 - alpha) * previous;
}

double population_cdf(std::span<const double> sorted_population, double x) {
    if (sorted_population.empty()) {
        throw InsufficientData("empty population");
    }
    const auto it = std::upper_bound(sorted_population.begin(), sorted_population.end(), x);
    return static_cast<double>(it - sorted_population.begin()) /
           static_cast<double>(sorted_population.size());
}

double one_step_estimate(std::span<const double> population, double p, double r, Rng& rng) {
    QuantileQuery{p, r}.validate();
    const double q = std::min(1.0, r / static_cast<double>(population.size()));
    SampleSet reports;
    rng.for_each_bernoulli(population.size(), q, [&](std::size_t i) { reports.add(population[i]); });
    return empirical_quantile(reports, p);
}

TwoStepResult two_step_estimate(std::span<const double> population, const TwoStepPlan& plan,
                                Rng& rng) {
    const double m = static_cast<double>(population.size());
    if (population.empty()) {
        throw InsufficientData("empty population");
    }

    SampleSet first;
    rng.for_each_bernoulli(population.size(), std::min(1.0, plan.r1 / m),
                           [&](std::size_t i) { first.add(population[i]); });
    const double x1 = empirical_quantile(first, plan.p1);

    // members with value <= x1 form a prefix of the sorted population
    const auto group_end = std::upper_bound(population.begin(), population.end(), x1);
    const auto group = population.first(static_cast<std::size_t>(group_end - population.begin()));

    SampleSet second;
    rng.for_each_bernoulli(group.size(), std::min(1.0, plan.r2 / (plan.p1 * m)),
                           [&](std::size_t i) { second.add(group[i]); });
    const double x2 = empirical_quantile(second, plan.p2);
    return {x1, x2, first.size(), second.size()};
}

}  // namespace dymo::est
