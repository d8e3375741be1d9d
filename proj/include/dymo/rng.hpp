#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace dymo {

/// Seedable random source with platform-independent output.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The distribution code below is our own: the standard library
/// distributions are implementation-defined and would break bit-exact
/// reproducibility across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent stream derived from a run seed and a concern name
    /// ("grid", "waypoints", "activity", "draws", ...) plus an optional index.
    static Rng stream(std::uint64_t seed, std::string_view name, std::uint64_t index = 0);

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);

    bool bernoulli(double prob) { return uniform() < prob; }

    /// Standard normal via the Marsaglia polar method.
    double gaussian();

    double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

    /// Calls fn(i) for each i in [0, n) selected by an independent
    /// Bernoulli(q) trial, using geometric skips so the cost is O(n q).
    template <class Fn>
    void for_each_bernoulli(std::size_t n, double q, Fn&& fn);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// SplitMix64 finalizer; used for seed derivation.
std::uint64_t mix64(std::uint64_t x);

template <class Fn>
void Rng::for_each_bernoulli(std::size_t n, double q, Fn&& fn) {
    if (q <= 0.0 || n == 0) {
        return;
    }
    if (q >= 1.0) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    const double log_miss = std::log1p(-q);
    std::size_t i = 0;
    while (true) {
        // 1 - uniform() is in (0, 1], so the log is finite.
        const double skip = std::floor(std::log(1.0 - uniform()) / log_miss);
        if (skip >= static_cast<double>(n - i)) {
            return;
        }
        i += static_cast<std::size_t>(skip);
        fn(i);
        ++i;
        if (i >= n) {
            return;
        }
    }
}

}  // namespace dymo
