#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dymo/controller.hpp"
#include "dymo/snr.hpp"

namespace dymo::metrics {

using snr::BinIndex;

struct IntervalRecord {
    int t = 0;
    ctl::SchemeKind scheme = ctl::SchemeKind::dymo;
    BinIndex s = 0;
    double actual_pct = 0.0;  // share of active UEs strictly below s
    double outliers = 0.0;    // actual_pct * active
    std::size_t active = 0;
    std::size_t reports = 0;
    double overhead_violation = 0.0;  // max(0, reports - r_interval)
    int mcs = 0;
    double spec_eff = 0.0;
    bool skipped = false;  // no active UE; excluded from every aggregate
    bool mcs_below_floor = false;
    bool starved = false;
    bool bootstrap = false;
};

/// |{h < s}| / |active|. Throws InsufficientData for an empty set.
double actual_percentile(BinIndex s, std::span<const BinIndex> active_snr);

/// sqrt(mean((values - targets)^2)). Throws DomainError on a length
/// mismatch and InsufficientData on empty input.
double rmse(std::span<const double> values, std::span<const double> targets);

struct SummaryOptions {
    double p = 0.001;
    double r_interval = 60.0;
    double m_nominal = 20000.0;  // scales outlier RMSE to units of p m
    int warmup = 0;              // leading intervals left out
};

struct RunSummary {
    ctl::SchemeKind scheme = ctl::SchemeKind::dymo;
    double pct_rmse = 0.0;       // vs p, as a fraction
    double thr_rmse_db = 0.0;    // vs the reference (optimal) threshold
    double outlier_rmse = 0.0;   // (outliers - p m(t)) in units of p m_nominal
    double overhead_rmse = 0.0;  // max(0, reports - r_interval) vs 0, per interval
    double overhead_dev_rmse = 0.0;  // reports - r_interval, signed
    std::size_t intervals = 0;
};

/// Summary of one scheme's run. `reference` holds the optimal threshold of
/// each interval, aligned with `records`.
RunSummary summarize(std::span<const IntervalRecord> records, std::span<const BinIndex> reference,
                     const SummaryOptions& options);

/// Mean of each metric per scheme across instances. Every instance must
/// list the same schemes in the same order. Sums are taken over sorted
/// values, so the result does not depend on instance order.
std::vector<RunSummary> aggregate_runs(const std::vector<std::vector<RunSummary>>& instances);

void write_interval_csv(std::ostream& out, std::span<const IntervalRecord> records);

struct SummaryRow {
    std::string param;  // "none" without a sweep
    std::string value;
    RunSummary summary;
};

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

/// Shortest round-trip text for a double, e.g. 0.001 -> "0.001".
std::string format_number(double v);

}  // namespace dymo::metrics
