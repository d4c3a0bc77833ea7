#include "openmax/rng.hpp"

#include <cmath>
#include <numbers>

namespace openmax {

std::uint64_t SplitMix64::next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform_open() noexcept {
    constexpr double kTwoPowMinus53 = 1.0 / 9007199254740992.0;
    return (static_cast<double>(next() >> 11) + 0.5) * kTwoPowMinus53;
}

std::uint64_t SplitMix64::below(std::uint64_t n) noexcept {
    __extension__ using u128 = unsigned __int128;
    return static_cast<std::uint64_t>((static_cast<u128>(next()) * n) >> 64);
}

double SplitMix64::normal() noexcept {
    if (spare_normal_) {
        const double z = *spare_normal_;
        spare_normal_.reset();
        return z;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = r * std::sin(angle);
    return r * std::cos(angle);
}

}  // namespace openmax
