#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "cyclepatrol/fleet.hpp"

namespace cyclepatrol {

// mt19937_64 is specified bit-for-bit by the standard; the conversions below
// avoid the library distributions, whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

private:
    std::mt19937_64 gen_;
};

// Sorted positions with non-overlapping zones inside [0, L].
inline std::vector<double> random_positions(const FleetConfig& fleet, Rng& rng) {
    validate_fleet(fleet);
    const std::size_t n = fleet.size();
    const double free = fleet.length - 2.0 * total_radius(fleet);
    std::vector<double> w(n + 1);
    double sum = 0.0;
    for (auto& x : w) {
        x = 0.05 + rng.uniform();
        sum += x;
    }
    std::vector<double> p(n);
    double cursor = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cursor += free * w[i] / sum;
        p[i] = cursor + fleet.robots[i].r;
        cursor = p[i] + fleet.robots[i].r;
    }
    return p;
}

// Orientations with exactly n_plus entries of +1, shuffled.
inline std::vector<int> random_orientations(std::size_t n, std::size_t n_plus, Rng& rng) {
    std::vector<int> o(n, -1);
    std::fill(o.begin(), o.begin() + static_cast<std::ptrdiff_t>(n_plus), 1);
    for (std::size_t i = n; i > 1; --i) std::swap(o[i - 1], o[rng.below(i)]);
    return o;
}

// Orientations with at least one of each sign.
inline std::vector<int> random_orientations(std::size_t n, Rng& rng) {
    return random_orientations(n, 1 + rng.below(n - 1), rng);
}

}  // namespace cyclepatrol
