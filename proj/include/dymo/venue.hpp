#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "dymo/rng.hpp"
#include "dymo/snr.hpp"

namespace dymo::venue {

enum class ScenarioKind { homogeneous, stadium, failure };

std::string_view to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(std::string_view name);

struct Point {
    double x;
    double y;
};

/// Half-open block of cells [x0, x1) x [y0, y1).
struct CellRegion {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    bool contains(int cx, int cy) const { return cx >= x0 && cx < x1 && cy >= y0 && cy < y1; }
    int cell_count() const { return (x1 - x0) * (y1 - y0); }
};

struct GridGeometry {
    double width_m = 1000.0;
    double height_m = 1000.0;
    double cell_m = 10.0;
    double sigma_db = 5.0;
};

/// Mean SNR per 10 m x 10 m rectangle, optionally overridden inside a time
/// window (used for failures).
class VenueGrid {
public:
    explicit VenueGrid(const GridGeometry& geometry = {});

    int cols() const { return cols_; }
    int rows() const { return rows_; }
    std::size_t cell_count() const { return base_.size(); }
    const GridGeometry& geometry() const { return geometry_; }
    double sigma_db() const { return geometry_.sigma_db; }

    bool contains(Point p) const;
    /// Every point of the venue maps to exactly one cell; the far edges
    /// belong to the last row/column.
    std::size_t cell_of(Point p) const;
    std::size_t cell_index(int cx, int cy) const {
        return static_cast<std::size_t>(cy) * static_cast<std::size_t>(cols_) +
               static_cast<std::size_t>(cx);
    }

    double base_mean(std::size_t cell) const { return base_[cell]; }
    void set_base_mean(std::size_t cell, double mean_db);

    /// Mean SNR of `cell` during interval t.
    double mean(std::size_t cell, int t) const;
    double mean_at(Point p, int t) const { return mean(cell_of(p), t); }

    /// Replace the means of `region` by `means` (row-major over the region)
    /// for intervals in [t_start, t_end).
    void add_window(const CellRegion& region, int t_start, int t_end, std::vector<double> means);
    bool time_varying() const { return !windows_.empty(); }

    /// CSV dump cell_x,cell_y,mean_dB,t of the field at interval t.
    void write_heatmap_csv(std::ostream& out, int t) const;

private:
    struct Window {
        int t_start;
        int t_end;
        std::vector<double> override_db;  // NaN where unaffected
    };

    GridGeometry geometry_;
    int cols_;
    int rows_;
    std::vector<double> base_;
    std::vector<Window> windows_;
};

/// Means drawn i.i.d. uniform [5, 25] dB.
VenueGrid gen_homogeneous(std::uint64_t seed, const GridGeometry& geometry = {});

/// Centered square of side `center_fraction` x venue side drawn uniform
/// [15, 25] dB; the surrounding vicinity uniform [5, 10] dB.
VenueGrid gen_stadium(std::uint64_t seed, const GridGeometry& geometry = {},
                      double center_fraction = 0.5);

/// High-SNR venue, means uniform [15, 25] dB.
VenueGrid gen_failure_base(std::uint64_t seed, const GridGeometry& geometry = {});

/// Centered square block of cells covering `fraction` of a cols x rows grid.
CellRegion centered_block(int cols, int rows, double fraction);

/// Copy of `base` whose `region` means are redrawn uniform [5, 10] dB for
/// intervals in [t_start, t_end). Throws DomainError when the window is not
/// inside [0, duration].
VenueGrid apply_failure(const VenueGrid& base, const CellRegion& region, int t_start, int t_end,
                        int duration, std::uint64_t seed);

/// Gaussian(mean of the containing cell at t, sigma) quantized to 0.1 dB.
snr::BinIndex sample_ue_snr(const VenueGrid& grid, Point position, int t, Rng& rng);

struct Scenario {
    ScenarioKind kind = ScenarioKind::homogeneous;
    std::size_t m = 20000;
    int duration = 150;
    double interval_seconds = 12.0;
    std::uint64_t seed = 1;
    GridGeometry geometry;

    // homogeneous / failure: one A->B traverse takes this many intervals
    int traverse_intervals = 75;

    double stadium_center_fraction = 0.5;
    int stadium_inbound = 60;
    int stadium_hold = 15;
    int stadium_outbound = 60;
    double stadium_min_active = 0.1;

    int failure_start = 50;
    int failure_end = 75;
    double failure_area_fraction = 0.25;

    void validate() const;
};

struct UeProfile {
    Point start;
    Point end;
    bool always_active = false;
    int join = 0;             // homogeneous/failure window [join, leave)
    int leave = 0;
    double activity_key = 0;  // stadium: active while key < ramp fraction
};

/// Stadium path fraction in [0, 1]: 0 at the edge, 1 at the center target.
double stadium_phase(const Scenario& scenario, int t);

/// Position of a UE during interval t.
Point mobility_step(const Scenario& scenario, const UeProfile& ue, int t);

bool activity_schedule(const Scenario& scenario, const UeProfile& ue, int t);

/// A scenario with its grid and UE population built from the seed.
///
/// Streams: "grid" (cell means), "failure" (failed-cell means),
/// "waypoints" (UE endpoints, UE order), "activity" (join/leave windows or
/// stadium keys, UE order) and "draws" (per-interval SNR, see TraceGenerator).
class ScenarioInstance {
public:
    explicit ScenarioInstance(Scenario scenario);

    const Scenario& scenario() const { return scenario_; }
    const VenueGrid& grid() const { return grid_; }
    std::span<const UeProfile> ues() const { return ues_; }
    const CellRegion& center_region() const { return center_; }
    const CellRegion& failure_region() const { return failure_; }

    std::size_t active_count(int t) const;
    /// Time average of the active count over the run (the E[m(t)] that the
    /// order-statistics baselines are assumed to know).
    double expected_active() const { return expected_active_; }

private:
    Scenario scenario_;
    VenueGrid grid_;
    CellRegion center_;
    CellRegion failure_;
    std::vector<UeProfile> ues_;
    double expected_active_ = 0.0;
};

/// SNR draws of the active UEs for one interval, ids ascending.
struct IntervalTrace {
    int t = 0;
    std::vector<std::uint32_t> ids;
    std::vector<snr::BinIndex> snr;
};

/// Per-interval change of the cell mean seen by each UE.
struct LipschitzAudit {
    double L_db = 5.0;
    std::size_t samples = 0;
    std::size_t violations = 0;
    double sum_abs_change = 0.0;
    double max_abs_change = 0.0;

    double mean_abs_change() const {
        return samples == 0 ? 0.0 : sum_abs_change / static_cast<double>(samples);
    }
};

/// Replays the scenario one interval at a time. Draw order: for each
/// interval, UEs in id order, one Gaussian per active UE from the "draws"
/// stream.
class TraceGenerator {
public:
    TraceGenerator(const ScenarioInstance& instance, double L_db = 5.0);

    bool done() const { return t_ >= instance_->scenario().duration; }
    IntervalTrace next();
    const LipschitzAudit& audit() const { return audit_; }

private:
    const ScenarioInstance* instance_;
    Rng draws_;
    int t_ = 0;
    std::vector<double> prev_mean_;
    LipschitzAudit audit_;
};

}  // namespace dymo::venue
