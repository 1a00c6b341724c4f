#include "ogs/signal.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ogs {

void ComplexWaveform::validate() const {
    if (symbol_rate <= 0.0) throw std::invalid_argument("waveform: symbol_rate must be > 0");
    if (samples_per_symbol < 1) throw std::invalid_argument("waveform: samples_per_symbol must be >= 1");
    if (samples.size() % static_cast<std::size_t>(samples_per_symbol) != 0)
        throw std::invalid_argument("waveform: length not divisible by samples_per_symbol");
}

bool all_finite(const ComplexWaveform& w) {
    for (const auto& s : w.samples)
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) return false;
    return true;
}

double mean_power_w(const ComplexWaveform& w) {
    if (w.samples.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& s : w.samples) acc += std::norm(s);
    return acc / static_cast<double>(w.samples.size());
}

std::uint64_t prbs_tap_mask(int order) {
    // Maximal-length trinomials x^r + x^t + 1. With register bit i holding
    // s[n+i], the recurrence s[n+r] = s[n+t] ^ s[n] taps bits t and 0.
    switch (order) {
        case 7:  return (1ULL << 6) | 1ULL;   // x^7 + x^6 + 1
        case 15: return (1ULL << 14) | 1ULL;  // x^15 + x^14 + 1
        case 23: return (1ULL << 18) | 1ULL;  // x^23 + x^18 + 1
        case 31: return (1ULL << 28) | 1ULL;  // x^31 + x^28 + 1
        default:
            throw std::invalid_argument("prbs_generate: unsupported order " + std::to_string(order) +
                                        " (supported: 7, 15, 23, 31)");
    }
}

BitSequence prbs_generate(int order, std::size_t n_bits, RngSeed seed) {
    const std::uint64_t taps = prbs_tap_mask(order);
    if (n_bits == 0) throw std::invalid_argument("prbs_generate: n_bits must be > 0");

    std::uint64_t st = seed.value ^ fnv1a64("prbs");
    // top bits of the mixed word avalanche hardest across adjacent seeds
    std::uint64_t reg = splitmix64(st) >> (64 - order);
    if (reg == 0) reg = 1;  // all-zero state is the one forbidden LFSR state

    BitSequence bits(n_bits);
    for (std::size_t i = 0; i < n_bits; ++i) {
        const auto out = static_cast<std::uint8_t>(reg & 1ULL);
        // Fibonacci LFSR: feedback = parity of the tapped stages
        const std::uint64_t fb = std::popcount(reg & taps) & 1ULL;
        reg = (reg >> 1) | (fb << (order - 1));
        bits[i] = out;
    }
    return bits;
}

ComplexWaveform awgn_add(const ComplexWaveform& w, double snr_db,
                         double signal_power_ref_w, RngSeed seed) {
    if (!(signal_power_ref_w > 0.0))
        throw std::invalid_argument("awgn_add: signal_power_ref_w must be > 0");
    if (std::isinf(snr_db) && snr_db > 0) return w;  // noise disabled

    const double noise_var = signal_power_ref_w / db_to_linear(snr_db);
    ComplexWaveform out = w;
    Rng rng(seed);
    for (auto& s : out.samples) s += rng.circular_gaussian(noise_var);
    return out;
}

}  // namespace ogs
