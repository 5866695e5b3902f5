#pragma once

#include <array>
#include <cstdint>
#include <random>

namespace msclim {

/// Maps a 64-bit engine draw onto [0,1) using the top 53 bits.
/// std::uniform_real_distribution is implementation-defined, so sweeps and
/// seeded initial conditions go through this instead to stay reproducible
/// across platforms.
inline double unit_double(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Uniform draw on [lo, hi).
inline double uniform_in(std::mt19937_64& eng, double lo, double hi) {
    return lo + (hi - lo) * unit_double(eng);
}

/// Random point in the cube [-half, half]^N.
template <std::size_t N>
std::array<double, N> random_state(std::mt19937_64& eng, double half) {
    std::array<double, N> s{};
    for (auto& c : s) c = uniform_in(eng, -half, half);
    return s;
}

}  // namespace msclim
