#include "ogs/rng.hpp"

#include <cmath>

namespace ogs {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

RngSeed derive_seed(RngSeed root, std::string_view tag) {
    std::uint64_t st = root.value ^ fnv1a64(tag);
    return RngSeed{splitmix64(st)};
}

Rng::Rng(RngSeed seed) {
    std::uint64_t st = seed.value;
    for (auto& s : state_) s = splitmix64(st);
}

static inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

std::uint64_t Rng::bounded(std::uint64_t n) {
    // rejection sampling on the top bits, bias-free
    if (n == 0) return 0;
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= threshold) return r % n;
    }
}

double Rng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller; u clamped away from 0 so log stays finite
    double u = uniform01();
    if (u < 1e-300) u = 1e-300;
    const double v = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double c = std::cos(2.0 * M_PI * v);
    const double s = std::sin(2.0 * M_PI * v);
    spare_ = r * s;
    has_spare_ = true;
    return r * c;
}

std::complex<double> Rng::circular_gaussian(double total_variance) {
    const double sd = std::sqrt(total_variance / 2.0);
    const double re = gaussian();
    const double im = gaussian();
    return {sd * re, sd * im};
}

}  // namespace ogs
