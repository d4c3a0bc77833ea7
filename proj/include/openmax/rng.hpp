#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

namespace openmax {

// SplitMix64 generator. The algorithm is fixed so that seeded streams are
// reproducible across platforms and languages:
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
//
// Derived draws:
//   uniform_open()  = ((next() >> 11) + 0.5) * 2^-53, strictly inside (0, 1)
//   below(n)        = high 64 bits of next() * n
//   normal()        = Box-Muller on two uniform_open() draws u1, u2:
//                     r = sqrt(-2 ln u1); returns r cos(2 pi u2) and caches
//                     r sin(2 pi u2) for the following call.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept;
    double uniform_open() noexcept;
    std::uint64_t below(std::uint64_t n) noexcept;
    double normal() noexcept;

    // Fisher-Yates, drawing j = below(i + 1) for i = n-1 down to 1.
    template <typename T>
    void shuffle(std::span<T> items) noexcept {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t state_;
    std::optional<double> spare_normal_;
};

}  // namespace openmax
