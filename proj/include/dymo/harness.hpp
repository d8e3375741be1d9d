#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dymo/controller.hpp"
#include "dymo/mcs.hpp"
#include "dymo/metrics.hpp"
#include "dymo/venue.hpp"

namespace dymo::harness {

enum class SweepAxis { none, m, p, r };

struct RunConfig {
    venue::ScenarioKind scenario = venue::ScenarioKind::homogeneous;
    std::size_t m = 20000;
    double p = 0.001;
    double r = 5.0;  // reports per second
    int duration = 150;
    double interval_seconds = 12.0;
    std::uint64_t seed = 1;
    double L_db = 5.0;
    double alpha = 0.5;
    std::vector<ctl::SchemeKind> schemes = ctl::all_schemes();
    SweepAxis sweep_axis = SweepAxis::none;
    std::vector<double> sweep_values;
    int instances = 1;
    int parallel = 1;
    std::string mcs_table;  // empty: built-in table
    std::filesystem::path out_dir = "dymo-out";
    /// "m" (use the true m), "unknown" (use the prior) or a number.
    std::string m_guess = "m";
    double prior_probability = 0.01;
    int warmup = 5;
    bool smooth_threshold = false;
    bool dump_traces = false;

    double r_interval() const { return r * interval_seconds; }
    void validate() const;
};

/// Default output directory: $DYMO_OUT_DIR if set, else "dymo-out".
std::filesystem::path default_out_dir();

/// Sets one `key = value` setting (same keys as config.txt). Throws
/// ConfigError on an unknown key or a malformed value.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Reads `key = value` lines; '#' starts a comment. Errors carry the
/// source name and line number.
void apply_config_stream(RunConfig& config, std::istream& in, const std::string& source);
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

/// Fully resolved configuration, one `key = value` per line.
void write_config(std::ostream& out, const RunConfig& config);

std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view name);

/// Comma-separated numbers. Throws ConfigError on a malformed item.
std::vector<double> parse_number_list(const std::string& text);
std::vector<ctl::SchemeKind> parse_scheme_list(const std::string& text);

/// The scenario of one instance: the config with a sweep value applied and
/// the seed offset by the instance index.
venue::Scenario make_scenario(const RunConfig& config, int instance);

/// Config with the sweep axis set to `value`.
RunConfig at_sweep_point(const RunConfig& config, double value);

struct SchemeRun {
    ctl::SchemeKind scheme;
    std::vector<metrics::IntervalRecord> records;
};

struct InstanceResult {
    std::uint64_t seed = 0;
    double expected_active = 0.0;
    std::vector<SchemeRun> runs;            // in config.schemes order
    std::vector<snr::BinIndex> reference;   // optimal threshold per interval
    venue::LipschitzAudit audit;
    std::string instruction_trace;          // filled when dump_traces
    std::string dymo_histogram;
    std::string heatmap;
};

/// Replays one scenario instance through every configured scheme over the
/// same SNR draws.
InstanceResult simulate_instance(const RunConfig& config, int instance, const mcs::McsTable& table);

std::vector<metrics::RunSummary> summarize_instance(const RunConfig& config,
                                                    const InstanceResult& result, int warmup);

struct PointResult {
    std::string param;  // "none" without a sweep
    std::string value;
    RunConfig config;
    std::vector<InstanceResult> instances;
    std::vector<metrics::RunSummary> summary;  // mean over instances
};

struct ExperimentResult {
    std::vector<PointResult> points;
};

/// Every sweep point times every instance; `config.parallel` instances run
/// at once. Results do not depend on the parallel degree.
ExperimentResult run_experiment(const RunConfig& config);

/// Runs the experiment and writes config.txt, summary.csv and the
/// per-interval CSVs under config.out_dir. Output is assembled in a
/// staging directory and removed if anything fails.
ExperimentResult run(const RunConfig& config);

void write_summary(std::ostream& out, const ExperimentResult& result);

struct EstimatorStudy {
    double p = 0.0;
    int runs = 0;
    double one_step_se = 0.0;   // RMS of F(estimate) - p
    double two_step_se = 0.0;
    double one_step_theory = 0.0;  // sqrt(p (1 - p) / r)
    double two_step_bound = 0.0;
    double coverage = 0.0;      // share of runs within two_step_bound
};

/// Monte-Carlo comparison of the one- and two-step estimators on a sorted
/// uniform [0, 1] population.
EstimatorStudy estimator_study(double p, double r, int runs, std::size_t population,
                          std::uint64_t seed);

struct GridOptimum {
    double p = 0.0;
    double r = 0.0;
    double best_p1 = 0.0;
    double best_r1 = 0.0;
    double p1_step = 0.0;  // log-grid ratio around the optimum
    double r1_step = 0.0;
    bool within_one_cell = false;
};

/// Minimizes the two-step error expression on an n x n grid: p1 log-spaced
/// on (p, 1), r1 linear on (0, r), endpoints excluded.
GridOptimum grid_minimize(double p, double r, int n = 200);

struct CrossoverCheck {
    int points = 0;
    int mismatches = 0;
    double boundary_gap = 0.0;  // |bound difference| at p = 1/49
};

/// Compares the two-step bound with the one-step 3-sigma bound on a log
/// grid of p; the two-step bound must be smaller exactly for p < 1/49.
CrossoverCheck crossover_scan(double r, int points = 2000);

struct Check {
    std::string name;
    bool passed;
    std::string detail;
};

/// Estimator checks (Monte-Carlo study, grid optimum, crossover).
std::vector<Check> validate_estimators(std::uint64_t seed = 1, int runs = 500);

}  // namespace dymo::harness
