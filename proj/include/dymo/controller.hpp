#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dymo/rng.hpp"
#include "dymo/snr.hpp"
#include "dymo/venue.hpp"

namespace dymo::ctl {

using snr::BinIndex;
using snr::SnrHistogram;

/// Open ends of the SNR axis.
inline constexpr BinIndex kMinusInf = std::numeric_limits<BinIndex>::min();
inline constexpr BinIndex kPlusInf = std::numeric_limits<BinIndex>::max();

/// UEs whose SNR bin lies in [lower, upper) report with `probability`.
struct ReportRange {
    BinIndex lower;
    BinIndex upper;
    double probability;
};

/// Broadcast for one interval. Ranges are ascending, contiguous and cover
/// the whole axis from kMinusInf to kPlusInf.
struct GroupInstruction {
    int interval = 0;
    std::vector<ReportRange> ranges;

    static GroupInstruction single(int interval, double probability);
    /// Two groups split at `boundary`: below [-inf, boundary), above [boundary, +inf).
    static GroupInstruction split(int interval, BinIndex boundary, double below, double above);

    /// Throws DomainError when the coverage or probability invariant fails.
    void validate() const;

    /// Index of the range holding `snr`. Throws std::logic_error if none
    /// does, which only happens for an instruction that fails validate().
    std::size_t match(BinIndex snr) const;

    /// One line per range: interval,lower_dB,upper_dB,probability.
    void write_trace(std::ostream& out) const;
};

struct QosReport {
    std::uint32_t ue;
    BinIndex snr;
    int interval;
};

/// One Bernoulli trial at the probability of the range matching `snr`.
std::optional<QosReport> ue_decide(const GroupInstruction& instruction, std::uint32_t ue,
                                   BinIndex snr, Rng& rng);

/// Applies ue_decide to every active UE of a trace, in id order.
std::vector<QosReport> collect_reports(const GroupInstruction& instruction,
                                       const venue::IntervalTrace& trace, Rng& rng);

/// Expected report count of an instruction over a set of SNR bins.
double expected_reports(const GroupInstruction& instruction, std::span<const BinIndex> snr);

/// Reports per interval: r (per second) times the interval length.
inline double interval_budget(double r_per_second, double interval_seconds) {
    return r_per_second * interval_seconds;
}

/// First-interval instruction: one group reporting with min(1, r_interval /
/// m_guess). Without a guess, `prior_probability` is used.
GroupInstruction dymo_bootstrap(double r_interval, std::optional<double> m_guess,
                                double prior_probability, int interval = 0);

/// Quantile of the below-boundary histogram at p' = min(1, p / p_L_hat).
BinIndex iterative_estimate(const SnrHistogram& below, double p, double p_L_hat);

enum class SchemeKind { dymo, optimal, uniform, order_stats_hist, order_stats_nohist };

std::string_view to_string(SchemeKind kind);
SchemeKind parse_scheme_kind(std::string_view name);
std::vector<SchemeKind> all_schemes();

/// What a scheme produced for one interval.
struct IntervalOutcome {
    BinIndex s = 0;
    std::size_t reports = 0;
    bool bootstrap = false;
    bool starved = false;     // DyMo: no below-boundary report
    bool no_reports = false;  // order statistics: threshold held
    bool prior_used = false;  // DyMo: bootstrap probability came from the prior
};

struct DymoConfig {
    double p = 0.001;
    double r_interval = 60.0;
    double L_db = 5.0;
    double alpha = 0.5;
    std::optional<double> m_guess;
    double prior_probability = 0.01;
    /// Also smooth s(t) itself; off by default (the histogram is smoothed).
    bool smooth_threshold = false;

    void validate() const;
};

struct DymoDiagnostics {
    double m_hat = 0.0;
    double p_L_hat = 0.0;
    BinIndex x_hat = 0;
    BinIndex boundary = 0;
};

/// DyMo feedback loop. Each call to step() consumes the reports sent under
/// instruction() and prepares the instruction of the next interval.
///
/// State: H, the alpha-smoothed histogram of report weights 1/q. H.total()
/// is the population estimate m_hat, and the mass of H below the boundary
/// b = s + L gives p_L_hat. The next interval splits the budget evenly:
/// UEs below b report at r1 / C_b, UEs above at r2 / (m_hat - C_b), where
/// C_b is H's mass below the new boundary (at least p m_hat).
class DymoController {
public:
    explicit DymoController(DymoConfig config);

    const GroupInstruction& instruction() const { return instruction_; }
    IntervalOutcome step(std::span<const QosReport> reports);

    BinIndex threshold() const { return s_; }
    const SnrHistogram& history() const { return hist_; }
    const DymoDiagnostics& diagnostics() const { return diag_; }
    const DymoConfig& config() const { return config_; }

private:
    void plan_next(BinIndex boundary);

    DymoConfig config_;
    GroupInstruction instruction_;
    SnrHistogram hist_;
    bool bootstrapped_ = false;
    bool prior_used_ = false;
    BinIndex s_ = 0;
    DymoDiagnostics diag_;
};

/// Fixed-rate order statistics with or without smoothed history.
class OrderStatsController {
public:
    OrderStatsController(double p, double probability, bool with_history, double alpha = 0.5);

    const GroupInstruction& instruction() const { return instruction_; }
    IntervalOutcome step(std::span<const QosReport> reports);
    BinIndex threshold() const { return s_; }

private:
    double p_;
    bool with_history_;
    double alpha_;
    GroupInstruction instruction_;
    SnrHistogram hist_;
    bool have_history_ = false;
    bool have_threshold_ = false;
    BinIndex s_ = 0;
};

/// Exact quantile over all active UE SNRs.
BinIndex optimal_threshold(std::span<const BinIndex> active_snr, double p);

/// p-quantile of the equal-mass mixture of Gaussian(cell mean at t = 0,
/// sigma) over all cells, quantized to bins in the default histogram range
/// (mass below the range counts in the first bin).
BinIndex uniform_threshold(const venue::VenueGrid& grid, double p);

struct SchemeParams {
    double p = 0.001;
    double r_interval = 60.0;
    double L_db = 5.0;
    double alpha = 0.5;
    std::optional<double> m_guess;
    double prior_probability = 0.01;
    bool smooth_threshold = false;
    double expected_active = 0.0;  // E[m(t)] for order statistics
};

/// One scheme driven interval by interval over a common SNR trace. Each
/// scheme draws its report decisions from its own stream.
class Scheme {
public:
    virtual ~Scheme() = default;
    virtual SchemeKind kind() const = 0;
    virtual IntervalOutcome run_interval(const venue::IntervalTrace& trace) = 0;
    /// Instruction in force for the next interval, if the scheme uses one.
    virtual const GroupInstruction* instruction() const { return nullptr; }
};

std::unique_ptr<Scheme> make_scheme(SchemeKind kind, const SchemeParams& params,
                                    const venue::ScenarioInstance& instance, Rng sampling);

/// The DyMo scheme's controller, for dumping state; nullptr for others.
const DymoController* dymo_controller(const Scheme& scheme);

}  // namespace dymo::ctl
