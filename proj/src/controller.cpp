#include "dymo/controller.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "dymo/error.hpp"
#include "dymo/estimation.hpp"

namespace dymo::ctl {

namespace {

std::string edge_text(BinIndex edge) {
    if (edge == kMinusInf) return "-inf";
    if (edge == kPlusInf) return "inf";
    return snr::format_db(edge);
}

BinIndex lipschitz_bins(double L_db) {
    return static_cast<BinIndex>(std::lround(L_db * snr::kBinsPerDb));
}

void require_probability(double q, const char* what) {
    if (!(q >= 0.0 && q <= 1.0)) {
        throw DomainError(std::string(what) + " must be in [0, 1]");
    }
}

}  // namespace

GroupInstruction GroupInstruction::single(int interval, double probability) {
    require_probability(probability, "report probability");
    return {interval, {{kMinusInf, kPlusInf, probability}}};
}

GroupInstruction GroupInstruction::split(int interval, BinIndex boundary, double below,
                                         double above) {
    require_probability(below, "report probability");
    require_probability(above, "report probability");
    if (boundary == kMinusInf || boundary == kPlusInf) {
        throw DomainError("group boundary must be finite");
    }
    return {interval, {{kMinusInf, boundary, below}, {boundary, kPlusInf, above}}};
}

void GroupInstruction::validate() const {
    if (ranges.empty() || ranges.front().lower != kMinusInf || ranges.back().upper != kPlusInf) {
        throw DomainError("instruction must cover the whole SNR axis");
    }
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        require_probability(ranges[i].probability, "report probability");
        if (ranges[i].lower >= ranges[i].upper) {
            throw DomainError("instruction range is empty");
        }
        if (i > 0 && ranges[i].lower != ranges[i - 1].upper) {
            throw DomainError("instruction ranges must be contiguous");
        }
    }
}

std::size_t GroupInstruction::match(BinIndex snr) const {
    const auto it = std::upper_bound(ranges.begin(), ranges.end(), snr,
                                     [](BinIndex v, const ReportRange& r) { return v < r.upper; });
    if (it == ranges.end() || snr < it->lower) {
        throw std::logic_error("SNR " + snr::format_db(snr) +
                               " is not covered by the group instruction");
    }
    return static_cast<std::size_t>(it - ranges.begin());
}

void GroupInstruction::write_trace(std::ostream& out) const {
    for (const ReportRange& r : ranges) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.9g", r.probability);
        out << interval << ',' << edge_text(r.lower) << ',' << edge_text(r.upper) << ',' << buf
            << '\n';
    }
}

std::optional<QosReport> ue_decide(const GroupInstruction& instruction, std::uint32_t ue,
                                   BinIndex snr, Rng& rng) {
    const double q = instruction.ranges[instruction.match(snr)].probability;
    if (rng.bernoulli(q)) {
        return QosReport{ue, snr, instruction.interval};
    }
    return std::nullopt;
}

std::vector<QosReport> collect_reports(const GroupInstruction& instruction,
                                       const venue::IntervalTrace& trace, Rng& rng) {
    std::vector<QosReport> reports;
    for (std::size_t i = 0; i < trace.ids.size(); ++i) {
        if (auto r = ue_decide(instruction, trace.ids[i], trace.snr[i], rng)) {
            r->interval = trace.t;
            reports.push_back(*r);
        }
    }
    return reports;
}

double expected_reports(const GroupInstruction& instruction, std::span<const BinIndex> snr) {
    double sum = 0.0;
    for (const BinIndex h : snr) {
        sum += instruction.ranges[instruction.match(h)].probability;
    }
    return sum;
}

GroupInstruction dymo_bootstrap(double r_interval, std::optional<double> m_guess,
                                double prior_probability, int interval) {
    if (!(r_interval > 0.0)) {
        throw DomainError("report budget must be positive");
    }
    if (m_guess) {
        if (!(*m_guess > 0.0)) {
            throw DomainError("population guess must be positive");
        }
        return GroupInstruction::single(interval, std::min(1.0, r_interval / *m_guess));
    }
    require_probability(prior_probability, "prior report probability");
    return GroupInstruction::single(interval, prior_probability);
}

BinIndex iterative_estimate(const SnrHistogram& below, double p, double p_L_hat) {
    if (!(p_L_hat > 0.0)) {
        throw InsufficientData("no mass below the group boundary");
    }
    return snr::histogram_quantile(below, std::min(1.0, p / p_L_hat));
}

std::string_view to_string(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::dymo:
            return "dymo";
        case SchemeKind::optimal:
            return "optimal";
        case SchemeKind::uniform:
            return "uniform";
        case SchemeKind::order_stats_hist:
            return "order_stats_hist";
        case SchemeKind::order_stats_nohist:
            return "order_stats_nohist";
    }
    return "unknown";
}

SchemeKind parse_scheme_kind(std::string_view name) {
    for (const SchemeKind k : all_schemes()) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw ConfigError("unknown scheme '" + std::string(name) +
                      "' (expected dymo, optimal, uniform, order_stats_hist, order_stats_nohist)");
}

std::vector<SchemeKind> all_schemes() {
    return {SchemeKind::dymo, SchemeKind::optimal, SchemeKind::uniform,
            SchemeKind::order_stats_hist, SchemeKind::order_stats_nohist};
}

void DymoConfig::validate() const {
    if (!(p > 0.0 && p < 1.0)) {
        throw ConfigError("p must be in (0, 1)");
    }
    if (!(r_interval > 0.0)) {
        throw ConfigError("report budget must be positive");
    }
    if (!(L_db >= 0.0)) {
        throw ConfigError("L must be >= 0");
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ConfigError("alpha must be in (0, 1]");
    }
    if (m_guess && !(*m_guess > 0.0)) {
        throw ConfigError("population guess must be positive");
    }
    if (!(prior_probability > 0.0 && prior_probability <= 1.0)) {
        throw ConfigError("prior report probability must be in (0, 1]");
    }
}

DymoController::DymoController(DymoConfig config) : config_(std::move(config)) {
    config_.validate();
    instruction_ = dymo_bootstrap(config_.r_interval, config_.m_guess, config_.prior_probability);
    prior_used_ = !config_.m_guess.has_value();
}

void DymoController::plan_next(BinIndex boundary) {
    const double m_hat = hist_.total();
    const double half = config_.r_interval / 2.0;
    const double c_b = std::max(hist_.mass_below(boundary), config_.p * m_hat);
    const double rest = m_hat - c_b;
    const double q1 = c_b > 0.0 ? std::min(1.0, half / c_b) : 1.0;
    const double q2 = rest > 0.0 ? std::min(1.0, half / rest) : 1.0;
    instruction_ = GroupInstruction::split(instruction_.interval + 1, boundary, q1, q2);
    diag_.boundary = boundary;
}

IntervalOutcome DymoController::step(std::span<const QosReport> reports) {
    IntervalOutcome out;
    out.reports = reports.size();

    SnrHistogram fresh;
    std::size_t below_reports = 0;
    for (const QosReport& r : reports) {
        const std::size_t g = instruction_.match(r.snr);
        fresh.add(r.snr, 1.0 / instruction_.ranges[g].probability);
        if (g == 0) {
            ++below_reports;
        }
    }

    if (!bootstrapped_) {
        out.bootstrap = true;
        out.prior_used = prior_used_;
        if (reports.empty()) {
            // nothing known yet: most conservative threshold, bootstrap again
            s_ = hist_.first_bin();
            out.starved = true;
            out.s = s_;
            const int next = instruction_.interval + 1;
            instruction_ = dymo_bootstrap(config_.r_interval, config_.m_guess,
                                          config_.prior_probability, next);
            return out;
        }
        bootstrapped_ = true;
        hist_ = fresh;
        s_ = snr::histogram_quantile(hist_, config_.p);
        diag_.m_hat = hist_.total();
        diag_.p_L_hat = 1.0;
        diag_.x_hat = s_;
        plan_next(s_ + lipschitz_bins(config_.L_db));
        out.s = s_;
        return out;
    }

    hist_ = snr::merge_smoothed(hist_, fresh, config_.alpha);
    const BinIndex boundary = instruction_.ranges.front().upper;
    diag_.m_hat = hist_.total();

    if (below_reports == 0) {
        out.starved = true;
        out.s = s_;
        plan_next(boundary + lipschitz_bins(config_.L_db));
        return out;
    }

    const SnrHistogram below = hist_.below(boundary);
    const double p_L = below.total() / hist_.total();
    diag_.p_L_hat = p_L;
    const BinIndex x_hat = p_L > config_.p ? iterative_estimate(below, config_.p, p_L)
                                           : snr::histogram_quantile(hist_, config_.p);
    diag_.x_hat = x_hat;
    if (config_.smooth_threshold) {
        s_ = static_cast<BinIndex>(std::floor(est::exp_smooth(s_, x_hat, config_.alpha)));
    } else {
        s_ = x_hat;
    }
    plan_next(s_ + lipschitz_bins(config_.L_db));
    out.s = s_;
    return out;
}

OrderStatsController::OrderStatsController(double p, double probability, bool with_history,
                                           double alpha)
    : p_(p),
      with_history_(with_history),
      alpha_(alpha),
      instruction_(GroupInstruction::single(0, probability)) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("p must be in (0, 1)");
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw DomainError("alpha must be in (0, 1]");
    }
}

IntervalOutcome OrderStatsController::step(std::span<const QosReport> reports) {
    IntervalOutcome out;
    out.reports = reports.size();
    SnrHistogram fresh;
    for (const QosReport& r : reports) {
        fresh.add(r.snr);
    }
    if (with_history_ && have_history_) {
        hist_ = snr::merge_smoothed(hist_, fresh, alpha_);
    } else {
        hist_ = fresh;
    }
    have_history_ = have_history_ || !reports.empty();
    ++instruction_.interval;

    if (hist_.empty()) {
        out.no_reports = true;
        if (!have_threshold_) {
            s_ = hist_.first_bin();
        }
        out.s = s_;
        return out;
    }
    s_ = snr::histogram_quantile(hist_, p_);
    have_threshold_ = true;
    out.s = s_;
    return out;
}

BinIndex optimal_threshold(std::span<const BinIndex> active_snr, double p) {
    if (!(p > 0.0 && p <= 1.0)) {
        throw DomainError("p must be in (0, 1]");
    }
    if (active_snr.empty()) {
        throw InsufficientData("no active UE");
    }
    const double n = static_cast<double>(active_snr.size());
    const double rank = std::max(1.0, std::ceil(p * n - 1e-12 * n));
    std::vector<BinIndex> values(active_snr.begin(), active_snr.end());
    const auto k = static_cast<std::size_t>(std::min(rank, n)) - 1;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
    return values[k];
}

BinIndex uniform_threshold(const venue::VenueGrid& grid, double p) {
    if (!(p > 0.0 && p <= 1.0)) {
        throw DomainError("p must be in (0, 1]");
    }
    const double sigma = grid.sigma_db();
    const auto mass_below = [&](double edge_db) {
        double sum = 0.0;
        for (std::size_t c = 0; c < grid.cell_count(); ++c) {
            const double mu = grid.mean(c, 0);
            if (sigma > 0.0) {
                sum += 0.5 * std::erfc(-(edge_db - mu) / (sigma * std::sqrt(2.0)));
            } else {
                sum += mu < edge_db ? 1.0 : 0.0;
            }
        }
        return sum / static_cast<double>(grid.cell_count());
    };
    const double target = p * (1.0 - 1e-12);
    BinIndex lo = SnrHistogram::kDefaultFirst;
    BinIndex hi = SnrHistogram::kDefaultLast;
    // smallest bin k whose cumulative mass through k reaches p
    while (lo < hi) {
        const BinIndex mid = lo + (hi - lo) / 2;
        if (mass_below(snr::to_db(mid + 1)) >= target) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return lo;
}

namespace {

class DymoScheme final : public Scheme {
public:
    DymoScheme(const SchemeParams& params, Rng rng)
        : ctl_(DymoConfig{params.p, params.r_interval, params.L_db, params.alpha, params.m_guess,
                          params.prior_probability, params.smooth_threshold}),
          rng_(std::move(rng)) {}

    SchemeKind kind() const override { return SchemeKind::dymo; }
    IntervalOutcome run_interval(const venue::IntervalTrace& trace) override {
        const auto reports = collect_reports(ctl_.instruction(), trace, rng_);
        return ctl_.step(reports);
    }
    const GroupInstruction* instruction() const override { return &ctl_.instruction(); }
    const DymoController& controller() const { return ctl_; }

private:
    DymoController ctl_;
    Rng rng_;
};

class OrderStatsScheme final : public Scheme {
public:
    OrderStatsScheme(const SchemeParams& params, bool with_history, Rng rng)
        : ctl_(params.p, order_stats_probability(params), with_history, params.alpha),
          with_history_(with_history),
          rng_(std::move(rng)) {}

    SchemeKind kind() const override {
        return with_history_ ? SchemeKind::order_stats_hist : SchemeKind::order_stats_nohist;
    }
    IntervalOutcome run_interval(const venue::IntervalTrace& trace) override {
        const auto reports = collect_reports(ctl_.instruction(), trace, rng_);
        return ctl_.step(reports);
    }
    const GroupInstruction* instruction() const override { return &ctl_.instruction(); }

private:
    static double order_stats_probability(const SchemeParams& params) {
        if (!(params.expected_active > 0.0)) {
            throw DomainError("order statistics needs a positive E[m(t)]");
        }
        return std::min(1.0, params.r_interval / params.expected_active);
    }

    OrderStatsController ctl_;
    bool with_history_;
    Rng rng_;
};

class OptimalScheme final : public Scheme {
public:
    explicit OptimalScheme(double p) : p_(p) {}
    SchemeKind kind() const override { return SchemeKind::optimal; }
    IntervalOutcome run_interval(const venue::IntervalTrace& trace) override {
        if (!trace.snr.empty()) {
            s_ = optimal_threshold(trace.snr, p_);
        }
        IntervalOutcome out;
        out.s = s_;
        out.reports = trace.snr.size();
        return out;
    }

private:
    double p_;
    BinIndex s_ = SnrHistogram::kDefaultFirst;
};

class UniformScheme final : public Scheme {
public:
    UniformScheme(const venue::VenueGrid& grid, double p) : s_(uniform_threshold(grid, p)) {}
    SchemeKind kind() const override { return SchemeKind::uniform; }
    IntervalOutcome run_interval(const venue::IntervalTrace&) override {
        IntervalOutcome out;
        out.s = s_;
        return out;
    }

private:
    BinIndex s_;
};

}  // namespace

std::unique_ptr<Scheme> make_scheme(SchemeKind kind, const SchemeParams& params,
                                    const venue::ScenarioInstance& instance, Rng sampling) {
    switch (kind) {
        case SchemeKind::dymo:
            return std::make_unique<DymoScheme>(params, std::move(sampling));
        case SchemeKind::optimal:
            return std::make_unique<OptimalScheme>(params.p);
        case SchemeKind::uniform:
            return std::make_unique<UniformScheme>(instance.grid(), params.p);
        case SchemeKind::order_stats_hist:
            return std::make_unique<OrderStatsScheme>(params, true, std::move(sampling));
        case SchemeKind::order_stats_nohist:
            return std::make_unique<OrderStatsScheme>(params, false, std::move(sampling));
    }
    throw std::logic_error("unhandled scheme kind");
}

const DymoController* dymo_controller(const Scheme& scheme) {
    if (const auto* d = dynamic_cast<const DymoScheme*>(&scheme)) {
        return &d->controller();
    }
    return nullptr;
}

}  // namespace dymo::ctl
