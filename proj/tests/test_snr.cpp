#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "dymo/error.hpp"
#include "dymo/rng.hpp"
#include "dymo/snr.hpp"

using namespace dymo;
using namespace dymo::snr;

namespace {

// Reference: walk bins from the bottom, first whose cumulative weight
// reaches p * total.
BinIndex cdf_walk(const std::vector<std::pair<BinIndex, double>>& bins, double p) {
    double total = 0.0;
    for (const auto& b : bins) total += b.second;
    double cum = 0.0;
    for (const auto& b : bins) {
        cum += b.second;
        if (cum >= p * total * (1 - 1e-12)) return b.first;
    }
    return bins.back().first;
}

}  // namespace

TEST_CASE("quantize floors to 0.1 dB bins") {
    CHECK(quantize(17.25) == 172);
    CHECK(quantize(17.2) == 172);
    CHECK(quantize(17.299999) == 172);
    CHECK(quantize(17.3) == 173);
    CHECK(quantize(-3.07) == -31);
    CHECK(quantize(-3.1) == -31);
    CHECK(quantize(0.0) == 0);
    CHECK(quantize(-0.01) == -1);
    CHECK_THROWS_AS(quantize(NAN), DomainError);
    CHECK_THROWS_AS(quantize(-INFINITY), DomainError);
}

TEST_CASE("quantize_up and formatting") {
    CHECK(quantize_up(1.4) == 14);
    CHECK(quantize_up(1.41) == 15);
    CHECK(quantize_up(-0.4) == -4);
    CHECK(format_db(-31) == "-3.1");
    CHECK(format_db(-1) == "-0.1");
    CHECK(format_db(172) == "17.2");
    CHECK(format_db(0) == "0.0");
    CHECK(to_db(172) == doctest::Approx(17.2));
}

TEST_CASE("every bin edge round-trips") {
    for (BinIndex b = -2000; b <= 2000; ++b) {
        CHECK(quantize(to_db(b)) == b);
    }
}

TEST_CASE("single-bin histogram quantile") {
    SnrHistogram h;
    h.add(100, 100.0);
    CHECK(histogram_quantile(h, 0.001) == 100);
    CHECK(histogram_quantile(h, 1.0) == 100);
}

TEST_CASE("uniform bins: median is the lower edge of the 50th bin") {
    std::vector<std::pair<BinIndex, double>> bins;
    SnrHistogram h;
    for (BinIndex b = 0; b < 100; ++b) {
        h.add(b);
        bins.emplace_back(b, 1.0);
    }
    const BinIndex oracle = cdf_walk(bins, 0.5);
    CHECK(oracle == 49);
    CHECK(histogram_quantile(h, 0.5) == oracle);
    CHECK(format_db(histogram_quantile(h, 0.5)) == "4.9");
}

TEST_CASE("histogram quantile matches the CDF walk on random weights") {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        SnrHistogram h;
        std::vector<std::pair<BinIndex, double>> bins;
        for (BinIndex b = -100; b <= 399; ++b) {
            if (rng.uniform() < 0.3) {
                const double w = rng.uniform(0.01, 5.0);
                h.add(b, w);
                bins.emplace_back(b, w);
            }
        }
        const double p = rng.uniform(0.0001, 1.0);
        CHECK(histogram_quantile(h, p) == cdf_walk(bins, p));
    }
}

TEST_CASE("mass strictly below the returned edge is below p") {
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        SnrHistogram h;
        for (int i = 0; i < 2000; ++i) h.add(quantize(rng.gaussian(10.0, 5.0)));
        for (double p : {0.001, 0.01, 0.1, 0.5}) {
            const BinIndex s = histogram_quantile(h, p);
            CHECK(h.mass_below(s) < p * h.total());
            CHECK(h.mass_below(s + 1) >= p * h.total() * (1 - 1e-12));
        }
    }
}

TEST_CASE("histogram quantile is monotone in p") {
    Rng rng(29);
    SnrHistogram h;
    for (int i = 0; i < 5000; ++i) h.add(quantize(rng.gaussian(5.0, 7.0)));
    BinIndex prev = h.first_bin();
    for (int k = 1; k <= 1000; ++k) {
        const BinIndex s = histogram_quantile(h, k / 1000.0);
        CHECK(s >= prev);
        prev = s;
    }
}

TEST_CASE("histogram quantile stays within one bin of the exact population quantile") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> pop(10000);
        for (double& v : pop) v = rng.gaussian(12.0, 5.0);
        std::vector<double> sorted = pop;
        std::sort(sorted.begin(), sorted.end());
        SnrHistogram h;
        for (double v : pop) h.add(quantize(v));
        for (double p : {0.001, 0.01, 0.1}) {
            const auto k = static_cast<std::size_t>(std::ceil(p * 10000)) - 1;
            const double exact = sorted[k];
            const double edge = to_db(histogram_quantile(h, p));
            CHECK(edge <= exact + 1e-9);
            CHECK(exact - edge < kBinWidthDb + 1e-9);
        }
    }
}

TEST_CASE("empty histogram and bad p") {
    SnrHistogram h;
    CHECK_THROWS_AS(histogram_quantile(h, 0.5), InsufficientData);
    h.add(3);
    CHECK_THROWS_AS(histogram_quantile(h, 0.0), DomainError);
    CHECK_THROWS_AS(h.add(3, -1.0), DomainError);
    CHECK_THROWS_AS(SnrHistogram(10, 9), DomainError);
}

TEST_CASE("out-of-range samples clamp and are counted") {
    SnrHistogram h;
    h.add(-500);
    h.add(5000);
    h.add(0);
    CHECK(h.clamped() == 2);
    CHECK(h.weight(SnrHistogram::kDefaultFirst) == 1.0);
    CHECK(h.weight(SnrHistogram::kDefaultLast) == 1.0);
    CHECK(h.total() == 3.0);
}

TEST_CASE("below and mass_below") {
    SnrHistogram h;
    h.add(10, 2.0);
    h.add(20, 3.0);
    h.add(30, 5.0);
    CHECK(h.mass_below(20) == 2.0);
    CHECK(h.mass_below(21) == 5.0);
    CHECK(h.mass_below(-1000) == 0.0);
    CHECK(h.mass_below(100000) == 10.0);
    const SnrHistogram b = h.below(21);
    CHECK(b.total() == 5.0);
    CHECK(b.weight(30) == 0.0);
    CHECK(b.same_geometry(h));
}

TEST_CASE("merge_smoothed") {
    Rng rng(37);
    SnrHistogram a;
    SnrHistogram b;
    for (int i = 0; i < 300; ++i) {
        a.add(quantize(rng.gaussian(0, 5)), rng.uniform(0.1, 2));
        b.add(quantize(rng.gaussian(3, 5)), rng.uniform(0.1, 2));
    }
    const SnrHistogram zero;
    const SnrHistogram halved = merge_smoothed(zero, b, 0.5);
    const SnrHistogram same = merge_smoothed(a, b, 1.0);
    const SnrHistogram idem = merge_smoothed(a, a, 0.3);
    const SnrHistogram mixed = merge_smoothed(a, b, 0.25);
    for (BinIndex k = a.first_bin(); k <= a.last_bin(); ++k) {
        CHECK(halved.weight(k) == doctest::Approx(b.weight(k) / 2));
        CHECK(same.weight(k) == b.weight(k));
        CHECK(idem.weight(k) == doctest::Approx(a.weight(k)));
        CHECK(mixed.weight(k) >= 0.0);
        CHECK(mixed.weight(k) == doctest::Approx(0.25 * b.weight(k) + 0.75 * a.weight(k)));
    }
    CHECK(mixed.total() == doctest::Approx(0.25 * b.total() + 0.75 * a.total()));
    CHECK(mixed.same_geometry(a));
    CHECK_THROWS_AS(merge_smoothed(a, SnrHistogram(0, 10), 0.5), DomainError);
}

TEST_CASE("shifting a histogram shifts its quantiles by the same bins") {
    Rng rng(41);
    SnrHistogram h;
    for (int i = 0; i < 3000; ++i) h.add(quantize(rng.gaussian(8, 5)));
    for (BinIndex shift : {-37, 0, 55}) {
        const SnrHistogram s = h.shifted(shift);
        for (double p : {0.001, 0.05, 0.5}) {
            CHECK(histogram_quantile(s, p) == histogram_quantile(h, p) + shift);
        }
    }
}

TEST_CASE("csv dump lists nonzero bins") {
    SnrHistogram h;
    h.add(-31, 2.5);
    h.add(172);
    std::ostringstream out;
    h.write_csv(out);
    CHECK(out.str() == "bin_lower_edge_dB,weight\n-3.1,2.5\n17.2,1\n");
}
