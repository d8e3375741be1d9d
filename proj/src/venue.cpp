#include "dymo/venue.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "dymo/error.hpp"

namespace dymo::venue {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

VenueGrid uniform_grid(std::uint64_t seed, const GridGeometry& geometry, double lo, double hi) {
    VenueGrid grid(geometry);
    Rng rng = Rng::stream(seed, "grid");
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        grid.set_base_mean(c, rng.uniform(lo, hi));
    }
    return grid;
}

Point uniform_point(Rng& rng, double x0, double y0, double x1, double y1) {
    const double x = rng.uniform(x0, x1);
    const double y = rng.uniform(y0, y1);
    return {x, y};
}

Point lerp(Point a, Point b, double f) { return {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)}; }

}  // namespace

std::string_view to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::homogeneous:
            return "homogeneous";
        case ScenarioKind::stadium:
            return "stadium";
        case ScenarioKind::failure:
            return "failure";
    }
    return "unknown";
}

ScenarioKind parse_scenario_kind(std::string_view name) {
    if (name == "homogeneous") return ScenarioKind::homogeneous;
    if (name == "stadium") return ScenarioKind::stadium;
    if (name == "failure") return ScenarioKind::failure;
    throw ConfigError("unknown scenario kind '" + std::string(name) +
                      "' (expected homogeneous, stadium or failure)");
}

VenueGrid::VenueGrid(const GridGeometry& geometry) : geometry_(geometry) {
    if (!(geometry.cell_m > 0.0) || !(geometry.width_m > 0.0) || !(geometry.height_m > 0.0)) {
        throw DomainError("venue and cell dimensions must be positive");
    }
    const double cols = geometry.width_m / geometry.cell_m;
    const double rows = geometry.height_m / geometry.cell_m;
    if (std::abs(cols - std::round(cols)) > 1e-9 || std::abs(rows - std::round(rows)) > 1e-9) {
        throw DomainError("cells must exactly tile the venue");
    }
    if (!(geometry.sigma_db >= 0.0)) {
        throw DomainError("SNR standard deviation must be >= 0");
    }
    cols_ = static_cast<int>(std::round(cols));
    rows_ = static_cast<int>(std::round(rows));
    base_.assign(static_cast<std::size_t>(cols_) * static_cast<std::size_t>(rows_), 0.0);
}

bool VenueGrid::contains(Point p) const {
    return p.x >= 0.0 && p.x <= geometry_.width_m && p.y >= 0.0 && p.y <= geometry_.height_m;
}

std::size_t VenueGrid::cell_of(Point p) const {
    if (!contains(p)) {
        throw DomainError("position outside the venue");
    }
    const int cx = std::min(cols_ - 1, static_cast<int>(p.x / geometry_.cell_m));
    const int cy = std::min(rows_ - 1, static_cast<int>(p.y / geometry_.cell_m));
    return cell_index(cx, cy);
}

void VenueGrid::set_base_mean(std::size_t cell, double mean_db) {
    if (!std::isfinite(mean_db)) {
        throw DomainError("cell mean SNR must be finite");
    }
    base_.at(cell) = mean_db;
}

double VenueGrid::mean(std::size_t cell, int t) const {
    for (const Window& w : windows_) {
        if (t >= w.t_start && t < w.t_end && !std::isnan(w.override_db[cell])) {
            return w.override_db[cell];
        }
    }
    return base_[cell];
}

void VenueGrid::add_window(const CellRegion& region, int t_start, int t_end,
                           std::vector<double> means) {
    if (region.x0 < 0 || region.y0 < 0 || region.x1 > cols_ || region.y1 > rows_ ||
        region.x0 > region.x1 || region.y0 > region.y1) {
        throw DomainError("override region outside the grid");
    }
    if (means.size() != static_cast<std::size_t>(region.cell_count())) {
        throw DomainError("override means do not match the region size");
    }
    Window w{t_start, t_end, std::vector<double>(base_.size(), kNaN)};
    std::size_t k = 0;
    for (int cy = region.y0; cy < region.y1; ++cy) {
        for (int cx = region.x0; cx < region.x1; ++cx) {
            if (!std::isfinite(means[k])) {
                throw DomainError("cell mean SNR must be finite");
            }
            w.override_db[cell_index(cx, cy)] = means[k++];
        }
    }
    windows_.push_back(std::move(w));
}

void VenueGrid::write_heatmap_csv(std::ostream& out, int t) const {
    out << "cell_x,cell_y,mean_dB,t\n";
    char buf[96];
    for (int cy = 0; cy < rows_; ++cy) {
        for (int cx = 0; cx < cols_; ++cx) {
            std::snprintf(buf, sizeof buf, "%d,%d,%.4f,%d\n", cx, cy, mean(cell_index(cx, cy), t),
                          t);
            out << buf;
        }
    }
}

VenueGrid gen_homogeneous(std::uint64_t seed, const GridGeometry& geometry) {
    return uniform_grid(seed, geometry, 5.0, 25.0);
}

VenueGrid gen_failure_base(std::uint64_t seed, const GridGeometry& geometry) {
    return uniform_grid(seed, geometry, 15.0, 25.0);
}

CellRegion centered_block(int cols, int rows, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw DomainError("region fraction must be in (0, 1]");
    }
    const double side = std::sqrt(fraction);
    const int w = std::max(1, static_cast<int>(std::lround(side * cols)));
    const int h = std::max(1, static_cast<int>(std::lround(side * rows)));
    const int x0 = (cols - w) / 2;
    const int y0 = (rows - h) / 2;
    return {x0, y0, x0 + w, y0 + h};
}

VenueGrid gen_stadium(std::uint64_t seed, const GridGeometry& geometry, double center_fraction) {
    VenueGrid grid(geometry);
    // center_fraction is a side ratio; centered_block takes an area ratio
    const CellRegion center =
        centered_block(grid.cols(), grid.rows(), center_fraction * center_fraction);
    Rng rng = Rng::stream(seed, "grid");
    for (int cy = 0; cy < grid.rows(); ++cy) {
        for (int cx = 0; cx < grid.cols(); ++cx) {
            const bool inside = center.contains(cx, cy);
            grid.set_base_mean(grid.cell_index(cx, cy),
                               inside ? rng.uniform(15.0, 25.0) : rng.uniform(5.0, 10.0));
        }
    }
    return grid;
}

VenueGrid apply_failure(const VenueGrid& base, const CellRegion& region, int t_start, int t_end,
                        int duration, std::uint64_t seed) {
    if (t_start < 0 || t_end > duration || t_start >= t_end) {
        throw DomainError("failure window [" + std::to_string(t_start) + ", " +
                          std::to_string(t_end) + ") is not inside the run of " +
                          std::to_string(duration) + " intervals");
    }
    VenueGrid out = base;
    Rng rng = Rng::stream(seed, "failure");
    std::vector<double> means(static_cast<std::size_t>(region.cell_count()));
    for (double& m : means) {
        m = rng.uniform(5.0, 10.0);
    }
    out.add_window(region, t_start, t_end, std::move(means));
    return out;
}

snr::BinIndex sample_ue_snr(const VenueGrid& grid, Point position, int t, Rng& rng) {
    const double mean = grid.mean_at(position, t);
    return snr::quantize(rng.gaussian(mean, grid.sigma_db()));
}

void Scenario::validate() const {
    if (duration <= 0) {
        throw ConfigError("duration must be positive");
    }
    if (m == 0 || m > std::numeric_limits<std::uint32_t>::max()) {
        throw ConfigError("number of UEs m must be positive");
    }
    if (!(interval_seconds > 0.0)) {
        throw ConfigError("interval length must be positive");
    }
    if (traverse_intervals <= 0) {
        throw ConfigError("traverse period must be positive");
    }
    if (kind == ScenarioKind::stadium) {
        if (!(stadium_center_fraction > 0.0 && stadium_center_fraction < 1.0)) {
            throw ConfigError("stadium center fraction must be in (0, 1)");
        }
        if (stadium_inbound <= 0 || stadium_hold < 0 || stadium_outbound <= 0) {
            throw ConfigError("stadium phases must be positive");
        }
        if (!(stadium_min_active > 0.0 && stadium_min_active <= 1.0)) {
            throw ConfigError("stadium minimum active share must be in (0, 1]");
        }
    }
    if (kind == ScenarioKind::failure) {
        if (failure_start < 0 || failure_end > duration || failure_start >= failure_end) {
            throw ConfigError("failure window must lie inside the run");
        }
        if (!(failure_area_fraction > 0.0 && failure_area_fraction <= 1.0)) {
            throw ConfigError("failure area fraction must be in (0, 1]");
        }
    }
}

double stadium_phase(const Scenario& s, int t) {
    if (t <= 0) {
        return 0.0;
    }
    if (t < s.stadium_inbound) {
        return static_cast<double>(t) / s.stadium_inbound;
    }
    const int hold_end = s.stadium_inbound + s.stadium_hold;
    if (t < hold_end) {
        return 1.0;
    }
    const int back = t - hold_end;
    if (back < s.stadium_outbound) {
        return 1.0 - static_cast<double>(back) / s.stadium_outbound;
    }
    return 0.0;
}

Point mobility_step(const Scenario& s, const UeProfile& ue, int t) {
    if (s.kind == ScenarioKind::stadium) {
        return lerp(ue.start, ue.end, stadium_phase(s, t));
    }
    const int period = 2 * s.traverse_intervals;
    const int phase = ((t % period) + period) % period;
    if (phase <= s.traverse_intervals) {
        return lerp(ue.start, ue.end, static_cast<double>(phase) / s.traverse_intervals);
    }
    return lerp(ue.end, ue.start,
                static_cast<double>(phase - s.traverse_intervals) / s.traverse_intervals);
}

bool activity_schedule(const Scenario& s, const UeProfile& ue, int t) {
    if (s.kind == ScenarioKind::stadium) {
        const double share = s.stadium_min_active + (1.0 - s.stadium_min_active) * stadium_phase(s, t);
        return ue.activity_key < share;
    }
    return ue.always_active || (t >= ue.join && t < ue.leave);
}

ScenarioInstance::ScenarioInstance(Scenario scenario) : scenario_(std::move(scenario)) {
    scenario_.validate();
    const Scenario& s = scenario_;
    switch (s.kind) {
        case ScenarioKind::homogeneous:
            grid_ = gen_homogeneous(s.seed, s.geometry);
            break;
        case ScenarioKind::stadium:
            grid_ = gen_stadium(s.seed, s.geometry, s.stadium_center_fraction);
            break;
        case ScenarioKind::failure:
            grid_ = gen_failure_base(s.seed, s.geometry);
            break;
    }
    center_ = centered_block(grid_.cols(), grid_.rows(),
                             s.stadium_center_fraction * s.stadium_center_fraction);
    if (s.kind == ScenarioKind::failure) {
        failure_ = centered_block(grid_.cols(), grid_.rows(), s.failure_area_fraction);
        grid_ = apply_failure(grid_, failure_, s.failure_start, s.failure_end, s.duration, s.seed);
    }

    const double cell = s.geometry.cell_m;
    const double cx0 = center_.x0 * cell;
    const double cy0 = center_.y0 * cell;
    const double cx1 = center_.x1 * cell;
    const double cy1 = center_.y1 * cell;

    Rng waypoints = Rng::stream(s.seed, "waypoints");
    Rng activity = Rng::stream(s.seed, "activity");
    ues_.resize(s.m);
    for (std::size_t i = 0; i < s.m; ++i) {
        UeProfile& ue = ues_[i];
        if (s.kind == ScenarioKind::stadium) {
            // start in the vicinity, end inside the stadium
            do {
                ue.start = uniform_point(waypoints, 0.0, 0.0, s.geometry.width_m, s.geometry.height_m);
            } while (ue.start.x >= cx0 && ue.start.x < cx1 && ue.start.y >= cy0 && ue.start.y < cy1);
            ue.end = uniform_point(waypoints, cx0, cy0, cx1, cy1);
            ue.activity_key = activity.uniform();
        } else {
            ue.start = uniform_point(waypoints, 0.0, 0.0, s.geometry.width_m, s.geometry.height_m);
            ue.end = uniform_point(waypoints, 0.0, 0.0, s.geometry.width_m, s.geometry.height_m);
            ue.always_active = i < s.m / 2;
            if (!ue.always_active) {
                const auto span = static_cast<std::uint64_t>(s.duration) + 1;
                const int a = static_cast<int>(activity.below(span));
                const int b = static_cast<int>(activity.below(span));
                ue.join = std::min(a, b);
                ue.leave = std::max(a, b);
            }
        }
    }

    double total = 0.0;
    for (int t = 0; t < s.duration; ++t) {
        total += static_cast<double>(active_count(t));
    }
    expected_active_ = total / s.duration;
}

std::size_t ScenarioInstance::active_count(int t) const {
    std::size_t n = 0;
    for (const UeProfile& ue : ues_) {
        n += activity_schedule(scenario_, ue, t) ? 1 : 0;
    }
    return n;
}

TraceGenerator::TraceGenerator(const ScenarioInstance& instance, double L_db)
    : instance_(&instance),
      draws_(Rng::stream(instance.scenario().seed, "draws")),
      prev_mean_(instance.ues().size(), kNaN) {
    audit_.L_db = L_db;
}

IntervalTrace TraceGenerator::next() {
    const Scenario& s = instance_->scenario();
    const VenueGrid& grid = instance_->grid();
    const auto ues = instance_->ues();

    IntervalTrace trace;
    trace.t = t_;
    for (std::size_t i = 0; i < ues.size(); ++i) {
        const Point pos = mobility_step(s, ues[i], t_);
        const double mean = grid.mean_at(pos, t_);
        if (!std::isnan(prev_mean_[i])) {
            const double change = std::abs(mean - prev_mean_[i]);
            ++audit_.samples;
            audit_.sum_abs_change += change;
            audit_.max_abs_change = std::max(audit_.max_abs_change, change);
            if (change > audit_.L_db) {
                ++audit_.violations;
            }
        }
        prev_mean_[i] = mean;

        if (activity_schedule(s, ues[i], t_)) {
            trace.ids.push_back(static_cast<std::uint32_t>(i));
            trace.snr.push_back(snr::quantize(draws_.gaussian(mean, grid.sigma_db())));
        }
    }
    ++t_;
    return trace;
}

}  // namespace dymo::venue
