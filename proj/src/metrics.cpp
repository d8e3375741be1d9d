#include "dymo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>

#include "dymo/error.hpp"

namespace dymo::metrics {

namespace {

double sorted_mean(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (const double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

}  // namespace

double actual_percentile(BinIndex s, std::span<const BinIndex> active_snr) {
    if (active_snr.empty()) {
        throw InsufficientData("actual percentile over an empty active set");
    }
    const auto below = std::count_if(active_snr.begin(), active_snr.end(),
                                     [s](BinIndex h) { return h < s; });
    return static_cast<double>(below) / static_cast<double>(active_snr.size());
}

double rmse(std::span<const double> values, std::span<const double> targets) {
    if (values.size() != targets.size()) {
        throw DomainError("rmse needs series of equal length");
    }
    if (values.empty()) {
        throw InsufficientData("rmse of an empty series");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - targets[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(values.size()));
}

RunSummary summarize(std::span<const IntervalRecord> records, std::span<const BinIndex> reference,
                     const SummaryOptions& options) {
    if (records.size() != reference.size()) {
        throw DomainError("reference series does not match the records");
    }
    if (options.warmup < 0) {
        throw DomainError("warm-up must be >= 0");
    }
    std::vector<double> pct, pct_target, thr, thr_target, out, out_target, reports, budget, violation;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const IntervalRecord& r = records[i];
        if (r.skipped || r.t < options.warmup) {
            continue;
        }
        pct.push_back(r.actual_pct);
        pct_target.push_back(options.p);
        thr.push_back(snr::to_db(r.s));
        thr_target.push_back(snr::to_db(reference[i]));
        const double permitted = options.p * options.m_nominal;
        out.push_back(r.outliers / permitted);
        out_target.push_back(options.p * static_cast<double>(r.active) / permitted);
        reports.push_back(static_cast<double>(r.reports));
        budget.push_back(options.r_interval);
        violation.push_back(std::max(0.0, static_cast<double>(r.reports) - options.r_interval));
    }
    if (pct.empty()) {
        throw InsufficientData("no interval left to summarize");
    }
    RunSummary s;
    s.scheme = records.front().scheme;
    s.pct_rmse = rmse(pct, pct_target);
    s.thr_rmse_db = rmse(thr, thr_target);
    s.outlier_rmse = rmse(out, out_target);
    s.overhead_rmse = rmse(violation, std::vector<double>(violation.size(), 0.0));
    s.overhead_dev_rmse = rmse(reports, budget);
    s.intervals = pct.size();
    return s;
}

std::vector<RunSummary> aggregate_runs(const std::vector<std::vector<RunSummary>>& instances) {
    if (instances.empty()) {
        throw InsufficientData("no instance to aggregate");
    }
    const std::size_t n_schemes = instances.front().size();
    std::vector<RunSummary> out;
    for (std::size_t k = 0; k < n_schemes; ++k) {
        std::vector<double> pct, thr, outl, over, dev;
        std::size_t intervals = 0;
        for (const auto& inst : instances) {
            if (inst.size() != n_schemes || inst[k].scheme != instances.front()[k].scheme) {
                throw DomainError("instances list different schemes");
            }
            pct.push_back(inst[k].pct_rmse);
            thr.push_back(inst[k].thr_rmse_db);
            outl.push_back(inst[k].outlier_rmse);
            over.push_back(inst[k].overhead_rmse);
            dev.push_back(inst[k].overhead_dev_rmse);
            intervals += inst[k].intervals;
        }
        RunSummary s;
        s.scheme = instances.front()[k].scheme;
        s.pct_rmse = sorted_mean(pct);
        s.thr_rmse_db = sorted_mean(thr);
        s.outlier_rmse = sorted_mean(outl);
        s.overhead_rmse = sorted_mean(over);
        s.overhead_dev_rmse = sorted_mean(dev);
        s.intervals = intervals;
        out.push_back(s);
    }
    return out;
}

std::string format_number(double v) {
    char buf[40];
    for (int precision = 6; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) {
            break;
        }
    }
    return buf;
}

void write_interval_csv(std::ostream& out, std::span<const IntervalRecord> records) {
    out << "t,scheme,s_est_db,actual_pct,outliers,reports,overhead_violation,mcs,spec_eff\n";
    for (const IntervalRecord& r : records) {
        out << r.t << ',' << ctl::to_string(r.scheme) << ',' << snr::format_db(r.s) << ','
            << format_number(r.actual_pct) << ',' << format_number(r.outliers) << ','
            << r.reports << ',' << format_number(r.overhead_violation) << ',' << r.mcs << ','
            << format_number(r.spec_eff) << '\n';
    }
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
    out << "param,value,scheme,pct_rmse,thr_rmse_db,outlier_rmse,overhead_rmse\n";
    for (const SummaryRow& row : rows) {
        out << row.param << ',' << row.value << ',' << ctl::to_string(row.summary.scheme) << ','
            << format_number(row.summary.pct_rmse) << ',' << format_number(row.summary.thr_rmse_db)
            << ',' << format_number(row.summary.outlier_rmse) << ','
            << format_number(row.summary.overhead_rmse) << '\n';
    }
}

}  // namespace dymo::metrics
