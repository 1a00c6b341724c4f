#ifndef OGS_RNG_HPP
#define OGS_RNG_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <string_view>

namespace ogs {

/// 64-bit seed; the same seed always reproduces the same sample stream,
/// independent of platform and standard library.
struct RngSeed {
    std::uint64_t value = 1;
};

std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t fnv1a64(std::string_view s);

/// Seed-splitting rule: each pipeline stage draws from its own stream,
/// derived as splitmix64(root XOR fnv1a64(tag)). Toggling one stage's
/// noise never reshuffles another stage's samples.
RngSeed derive_seed(RngSeed root, std::string_view tag);

/// xoshiro256++ with Box-Muller Gaussians. Values are reproducible
/// bit-for-bit for a given seed.
class Rng {
public:
    explicit Rng(RngSeed seed);
    Rng(RngSeed root, std::string_view tag) : Rng(derive_seed(root, tag)) {}

    std::uint64_t next_u64();
    std::uint64_t bounded(std::uint64_t n);  // uniform in [0, n)
    double uniform01();                      // [0, 1), 53-bit resolution
    double gaussian();                       // N(0, 1)

    /// Circularly symmetric complex Gaussian with E[|n|^2] = total_variance.
    std::complex<double> circular_gaussian(double total_variance);

private:
    std::array<std::uint64_t, 4> state_{};
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ogs

#endif
