#pragma once

// Low-tail quantile estimators and their error bounds.
//
// Everything here is a pure function of its arguments; the sampling
// procedures take the random source explicitly.

#include <cstddef>
#include <span>
#include <vector>

#include "dymo/rng.hpp"

namespace dymo::est {

struct Sample {
    double value;
    double weight;
};

/// Reported SNR values, optionally weighted (weights come from merging
/// smoothed history). Invariants: values finite, weights > 0.
class SampleSet {
public:
    SampleSet() = default;
    explicit SampleSet(std::span<const double> values);

    void add(double value, double weight = 1.0);

    bool empty() const { return samples_.empty(); }
    std::size_t size() const { return samples_.size(); }
    double total_weight() const { return total_weight_; }
    std::span<const Sample> samples() const { return samples_; }

private:
    std::vector<Sample> samples_;
    double total_weight_ = 0.0;
};

/// QoS threshold p and report budget r for one estimation round.
struct QuantileQuery {
    double p;
    double r;

    void validate() const;
};

/// Split of (p, r) across the two steps: p1 * p2 = p, r1 + r2 = r.
struct TwoStepPlan {
    double p1;
    double p2;
    double r1;
    double r2;

    void validate(double p, double r) const;
};

/// Running state of the iterative (dynamic) estimator.
struct IterativeState {
    double x_hat = 0.0;     // current threshold estimate, dB
    double L = 5.0;         // per-interval SNR Lipschitz bound, dB
    double p_L_hat = 1.0;   // estimated fraction below x_hat + L
    double m_hat = 0.0;     // estimated active population
    double alpha = 0.5;     // smoothing factor in (0, 1]

    void validate() const;
};

struct FractionEstimate {
    double value;
    double variance;
};

/// inf { x : F_r(x) >= p } over the weighted empirical CDF. Ties keep
/// insertion order (stable sort). Throws InsufficientData when empty.
double empirical_quantile(const SampleSet& samples, double p);

/// p (1 - p) / r, the asymptotic variance of the true quantile of an
/// order-statistics estimate from r samples.
double quantile_variance(double p, double r);

/// (sqrt(p), sqrt(p), r/2, r/2).
TwoStepPlan optimal_two_step_plan(double p, double r);

/// 3p [ sqrt((1/p1 - 1)/r1) + sqrt((p1/p - 1)/(r - r1)) ], the 3-sigma
/// over-estimation error of a two-step split with p2 = p/p1, r2 = r - r1.
/// Domain: p < p1 < 1, 0 < r1 < r.
double two_step_error_expression(double p1, double r1, double p, double r);

/// 6 sqrt(2) sqrt(p sqrt(p) (1 - sqrt(p)) / r): error bound of the optimal
/// two-step split, holding with probability >= 1 - 2(1 - Phi(3)).
double two_step_bound(double p, double r);

/// 3 sqrt(p (1 - p) / r): the 3-sigma bound of the one-step estimator.
double order_statistics_bound(double p, double r);

/// 5 p_L / sqrt(r): error bound of the iterative estimator. Only valid for
/// r >= 100 and p <= 0.7 p_L; throws DomainError otherwise.
double iterative_bound(double p_L, double r, double p);

/// Horvitz-Thompson fraction estimate Y / (m q) with variance
/// (p_L / m)(1 - q)/q evaluated at the estimate.
FractionEstimate estimate_subpopulation_fraction(double reports, double population, double rate);

/// alpha * fresh + (1 - alpha) * previous, alpha in (0, 1].
double exp_smooth(double previous, double fresh, double alpha);

// --- Sampling procedures over a finite population -------------------------
//
// `population` must be sorted ascending. Each member is a UE holding that
// value; members report independently with the instructed probability.

/// Order-statistics estimate: every member reports with probability r/m,
/// answer is the empirical p-quantile of the reports.
double one_step_estimate(std::span<const double> population, double p, double r, Rng& rng);

struct TwoStepResult {
    double first_step;      // x1, the p1-quantile of the first-step reports
    double estimate;        // x2, the p2-quantile of the second-step reports
    std::size_t first_reports;
    std::size_t second_reports;
};

/// Two-step estimate. Step 1: all members report with probability r1/m and
/// x1 = F_r1^-1(p1). Step 2: members with value <= x1 report with
/// probability r2/(p1 m) and x2 = G_r2^-1(p2).
TwoStepResult two_step_estimate(std::span<const double> population, const TwoStepPlan& plan,
                                Rng& rng);

/// Fraction of the population with value <= x (the population CDF).
double population_cdf(std::span<const double> sorted_population, double x);

}  // namespace dymo::est
