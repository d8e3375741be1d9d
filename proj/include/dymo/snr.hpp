#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dymo::snr {

/// SNR in tenths of a dB. Bin k covers [k/10, (k+1)/10) dB; the value is
/// also the bin's lower edge. Integer bins keep histograms bit-exact.
using BinIndex = std::int32_t;

inline constexpr double kBinWidthDb = 0.1;
inline constexpr BinIndex kBinsPerDb = 10;

/// Floor to the containing 0.1 dB bin. Inputs on a bin edge (up to
/// representation error) belong to the bin they open. Throws DomainError
/// on non-finite input.
BinIndex quantize(double snr_db);

/// Smallest bin whose lower edge is >= snr_db.
BinIndex quantize_up(double snr_db);

inline double to_db(BinIndex bin) { return static_cast<double>(bin) / kBinsPerDb; }

/// Exact decimal rendering of a bin edge, e.g. -31 -> "-3.1".
std::string format_db(BinIndex bin);

/// Weight per 0.1 dB bin over a fixed range [first_bin, last_bin].
/// Samples outside the range are clamped into the edge bins and counted.
class SnrHistogram {
public:
    static constexpr BinIndex kDefaultFirst = -100;  // -10.0 dB
    static constexpr BinIndex kDefaultLast = 399;    // [39.9, 40.0)

    SnrHistogram() : SnrHistogram(kDefaultFirst, kDefaultLast) {}
    SnrHistogram(BinIndex first_bin, BinIndex last_bin);

    void add(BinIndex bin, double weight = 1.0);

    BinIndex first_bin() const { return first_; }
    BinIndex last_bin() const { return first_ + static_cast<BinIndex>(weights_.size()) - 1; }
    std::size_t bin_count() const { return weights_.size(); }
    double weight(BinIndex bin) const;
    double total() const { return total_; }
    std::size_t clamped() const { return clamped_; }
    bool empty() const { return !(total_ > 0.0); }

    /// Weight in bins strictly below the edge `edge` (clamped to range).
    double mass_below(BinIndex edge) const;

    /// Copy holding only the bins strictly below `edge`.
    SnrHistogram below(BinIndex edge) const;

    bool same_geometry(const SnrHistogram& other) const;

    /// Shift the whole histogram (geometry and contents) by `bins`.
    SnrHistogram shifted(BinIndex bins) const;

    /// CSV dump: bin_lower_edge_dB,weight for every nonzero bin.
    void write_csv(std::ostream& out) const;

    friend SnrHistogram merge_smoothed(const SnrHistogram&, const SnrHistogram&, double);

private:
    BinIndex first_;
    std::vector<double> weights_;
    double total_ = 0.0;
    std::size_t clamped_ = 0;
};

/// Lower edge of the bin holding the p-quantile mass: the smallest bin k
/// with cumulative weight through k >= p * total. The weight strictly below
/// the returned edge is therefore < p * total. Throws InsufficientData on
/// an empty histogram.
BinIndex histogram_quantile(const SnrHistogram& hist, double p);

/// Per-bin alpha * fresh + (1 - alpha) * prev. Throws DomainError on a bin
/// geometry mismatch.
SnrHistogram merge_smoothed(const SnrHistogram& prev, const SnrHistogram& fresh, double alpha);

}  // namespace dymo::snr
