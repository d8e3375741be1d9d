#include "dymo/mcs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dymo/error.hpp"

namespace dymo::mcs {

McsTable::McsTable(std::vector<McsRow> rows) : rows_(std::move(rows)) {
    if (rows_.empty()) {
        throw ConfigError("MCS table has no rows");
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const McsRow& row = rows_[i];
        if (!std::isfinite(row.min_snr_db) || !std::isfinite(row.spectral_efficiency) ||
            row.spectral_efficiency <= 0.0) {
            throw ConfigError("MCS row " + std::to_string(row.index) +
                              ": SNR must be finite and efficiency positive");
        }
        min_bins_.push_back(snr::quantize_up(row.min_snr_db));
        if (i > 0) {
            const McsRow& prev = rows_[i - 1];
            if (row.index <= prev.index || min_bins_[i] <= min_bins_[i - 1] ||
                row.spectral_efficiency < prev.spectral_efficiency) {
                throw ConfigError("MCS table is not monotone at row " + std::to_string(row.index));
            }
        }
    }
}

McsTable McsTable::standard() {
    return McsTable({
        {0, -6.0, 0.12},  {1, -4.1, 0.18}, {2, -2.3, 0.23},  {3, -0.4, 0.29},  {4, 1.4, 0.36},
        {5, 3.3, 0.47},   {6, 5.1, 0.60},  {7, 7.0, 0.76},   {8, 8.9, 0.95},   {9, 10.7, 1.18},
        {10, 12.6, 1.45}, {11, 14.4, 1.76}, {12, 16.3, 2.10}, {13, 18.1, 2.48}, {14, 20.0, 2.90},
    });
}

McsTable McsTable::parse_csv(std::istream& in, const std::string& source) {
    std::vector<McsRow> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        if (rows.empty() && line.find("mcs_index") != std::string::npos) {
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        McsRow row{};
        std::string extra;
        if (!(fields >> row.index >> row.min_snr_db >> row.spectral_efficiency) || (fields >> extra)) {
            throw ConfigError(source + ":" + std::to_string(lineno) +
                              ": expected mcs_index,min_snr_dB,spectral_efficiency");
        }
        rows.push_back(row);
    }
    try {
        return McsTable(std::move(rows));
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    }
}

McsTable McsTable::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path + ": cannot open MCS table");
    }
    return parse_csv(in, path);
}

McsChoice McsTable::select(snr::BinIndex threshold) const {
    const auto it = std::upper_bound(min_bins_.begin(), min_bins_.end(), threshold);
    if (it == min_bins_.begin()) {
        return {rows_.front().index, rows_.front().spectral_efficiency, true};
    }
    const McsRow& row = rows_[static_cast<std::size_t>(it - min_bins_.begin()) - 1];
    return {row.index, row.spectral_efficiency, false};
}

McsTable McsTable::shifted(snr::BinIndex bins) const {
    McsTable out = *this;
    for (std::size_t i = 0; i < out.rows_.size(); ++i) {
        out.min_bins_[i] += bins;
        out.rows_[i].min_snr_db = snr::to_db(out.min_bins_[i]);
    }
    return out;
}

void McsTable::write_csv(std::ostream& out) const {
    out << "mcs_index,min_snr_dB,spectral_efficiency\n";
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", rows_[i].spectral_efficiency);
        out << rows_[i].index << ',' << snr::format_db(min_bins_[i]) << ',' << buf << '\n';
    }
}

}  // namespace dymo::mcs
