#include "dymo/snr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>

#include "dymo/error.hpp"
#include "dymo/estimation.hpp"

namespace dymo::snr {

namespace {

// Inputs within this many tenths of a bin edge are treated as on the edge;
// absorbs decimal-to-binary error such as 17.2 * 10 = 171.99999999999997.
constexpr double kEdgeSnap = 1e-9;

double scaled(double snr_db) {
    if (!std::isfinite(snr_db)) {
        throw DomainError("SNR must be finite");
    }
    return snr_db * kBinsPerDb;
}

}  // namespace

BinIndex quantize(double snr_db) {
    const double x = scaled(snr_db);
    const double nearest = std::round(x);
    if (std::abs(x - nearest) < kEdgeSnap) {
        return static_cast<BinIndex>(nearest);
    }
    return static_cast<BinIndex>(std::floor(x));
}

BinIndex quantize_up(double snr_db) {
    const double x = scaled(snr_db);
    const double nearest = std::round(x);
    if (std::abs(x - nearest) < kEdgeSnap) {
        return static_cast<BinIndex>(nearest);
    }
    return static_cast<BinIndex>(std::ceil(x));
}

std::string format_db(BinIndex bin) {
    const long v = bin;
    const long mag = std::labs(v);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%ld.%ld", v < 0 ? "-" : "", mag / kBinsPerDb,
                  mag % kBinsPerDb);
    return buf;
}

SnrHistogram::SnrHistogram(BinIndex first_bin, BinIndex last_bin) : first_(first_bin) {
    if (last_bin < first_bin) {
        throw DomainError("histogram range is empty");
    }
    weights_.assign(static_cast<std::size_t>(last_bin - first_bin) + 1, 0.0);
}

void SnrHistogram::add(BinIndex bin, double weight) {
    if (!(weight >= 0.0) || !std::isfinite(weight)) {
        throw DomainError("histogram weight must be finite and >= 0");
    }
    if (bin < first_bin() || bin > last_bin()) {
        ++clamped_;
        bin = std::clamp(bin, first_bin(), last_bin());
    }
    weights_[static_cast<std::size_t>(bin - first_)] += weight;
    total_ += weight;
}

double SnrHistogram::weight(BinIndex bin) const {
    if (bin < first_bin() || bin > last_bin()) {
        return 0.0;
    }
    return weights_[static_cast<std::size_t>(bin - first_)];
}

double SnrHistogram::mass_below(BinIndex edge) const {
    const BinIndex stop = std::clamp(edge, first_bin(), last_bin() + 1);
    double sum = 0.0;
    for (BinIndex b = first_bin(); b < stop; ++b) {
        sum += weights_[static_cast<std::size_t>(b - first_)];
    }
    return sum;
}

SnrHistogram SnrHistogram::below(BinIndex edge) const {
    SnrHistogram out(first_bin(), last_bin());
    const BinIndex stop = std::clamp(edge, first_bin(), last_bin() + 1);
    for (BinIndex b = first_bin(); b < stop; ++b) {
        const double w = weights_[static_cast<std::size_t>(b - first_)];
        out.weights_[static_cast<std::size_t>(b - first_)] = w;
        out.total_ += w;
    }
    return out;
}

bool SnrHistogram::same_geometry(const SnrHistogram& other) const {
    return first_ == other.first_ && weights_.size() == other.weights_.size();
}

SnrHistogram SnrHistogram::shifted(BinIndex bins) const {
    SnrHistogram out = *this;
    out.first_ += bins;
    return out;
}

void SnrHistogram::write_csv(std::ostream& out) const {
    out << "bin_lower_edge_dB,weight\n";
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (weights_[i] > 0.0) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", weights_[i]);
            out << format_db(first_ + static_cast<BinIndex>(i)) << ',' << buf << '\n';
        }
    }
}

BinIndex histogram_quantile(const SnrHistogram& hist, double p) {
    if (!(p > 0.0 && p <= 1.0)) {
        throw DomainError("p must be in (0, 1]");
    }
    if (hist.empty()) {
        throw InsufficientData("histogram quantile over an empty histogram");
    }
    const double total = hist.total();
    const double target = p * total - 1e-12 * total;
    double cum = 0.0;
    BinIndex last_nonempty = hist.first_bin();
    for (BinIndex b = hist.first_bin(); b <= hist.last_bin(); ++b) {
        const double w = hist.weight(b);
        if (w > 0.0) {
            cum += w;
            last_nonempty = b;
            if (cum >= target) {
                return b;
            }
        }
    }
    return last_nonempty;
}

SnrHistogram merge_smoothed(const SnrHistogram& prev, const SnrHistogram& fresh, double alpha) {
    if (!prev.same_geometry(fresh)) {
        throw DomainError("cannot merge histograms with different bin geometry");
    }
    SnrHistogram out(prev.first_bin(), prev.last_bin());
    for (std::size_t i = 0; i < out.weights_.size(); ++i) {
        out.weights_[i] = est::exp_smooth(prev.weights_[i], fresh.weights_[i], alpha);
    }
    out.total_ = est::exp_smooth(prev.total_, fresh.total_, alpha);
    out.clamped_ = prev.clamped_ + fresh.clamped_;
    return out;
}

}  // namespace dymo::snr
