#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dymo/snr.hpp"

namespace dymo::mcs {

struct McsRow {
    int index;
    double min_snr_db;
    double spectral_efficiency;  // bit/s/Hz
};

struct McsChoice {
    int index;
    double spectral_efficiency;
    bool below_floor;  // threshold under the lowest row; lowest MCS returned
};

/// Monotone step function from SNR threshold to MCS. Rows are strictly
/// increasing in both index and minimum SNR; efficiency is nondecreasing.
class McsTable {
public:
    explicit McsTable(std::vector<McsRow> rows);

    /// 15 rows over -6..20 dB; MCS 3 and 4 carry 0.29 and 0.36 bit/s/Hz.
    static McsTable standard();

    /// Rows mcs_index,min_snr_dB,spectral_efficiency; an optional header
    /// line and '#' comments are skipped. Throws ConfigError with the line
    /// number on malformed input.
    static McsTable parse_csv(std::istream& in, const std::string& source = "<table>");
    static McsTable load_csv(const std::string& path);

    /// Highest MCS whose minimum SNR is <= the threshold (ties pick the
    /// higher row).
    McsChoice select(snr::BinIndex threshold) const;

    /// Same table with every boundary moved by `bins` tenths of a dB.
    McsTable shifted(snr::BinIndex bins) const;

    const std::vector<McsRow>& rows() const { return rows_; }

    void write_csv(std::ostream& out) const;

private:
    std::vector<McsRow> rows_;
    std::vector<snr::BinIndex> min_bins_;
};

}  // namespace dymo::mcs
