#ifndef OGS_SIGNAL_HPP
#define OGS_SIGNAL_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "ogs/rng.hpp"

namespace ogs {

using ComplexSample = std::complex<double>;

/// Complex baseband waveform. Field amplitudes are normalized so that
/// |sample|^2 is optical power in watts.
struct ComplexWaveform {
    std::vector<ComplexSample> samples;
    int samples_per_symbol = 2;
    double symbol_rate = 10e9;  // symbols/s

    double sample_rate() const { return symbol_rate * samples_per_symbol; }
    std::size_t symbol_count() const { return samples.size() / static_cast<std::size_t>(samples_per_symbol); }

    /// Throws std::invalid_argument if the invariants do not hold
    /// (positive rates, length divisible by samples_per_symbol).
    void validate() const;
};

using BitSequence = std::vector<std::uint8_t>;

bool all_finite(const ComplexWaveform& w);
double mean_power_w(const ComplexWaveform& w);

// -- unit conversions ------------------------------------------------------

inline double db_to_linear(double x_db) { return std::pow(10.0, x_db / 10.0); }
inline double linear_to_db(double ratio) { return 10.0 * std::log10(ratio); }
inline double dbm_to_watts(double p_dbm) { return std::pow(10.0, (p_dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double p_w) { return 10.0 * std::log10(p_w) + 30.0; }

// -- PRBS ------------------------------------------------------------------

/// Maximal-length LFSR sequence of the given order (7, 15, 23 or 31),
/// truncated or cycled to n_bits. The initial register state is derived
/// from the seed (never all-zero), so the same (order, seed) pair always
/// yields the same bits. Unsupported orders throw std::invalid_argument.
BitSequence prbs_generate(int order, std::size_t n_bits, RngSeed seed);

/// Feedback tap mask for a supported PRBS order (exposed for tests).
std::uint64_t prbs_tap_mask(int order);

// -- AWGN ------------------------------------------------------------------

/// Adds circularly symmetric complex Gaussian noise with total variance
/// signal_power_ref_w / 10^(snr_db/10), split equally between I and Q.
/// snr_db = +infinity disables the noise. The input is left untouched.
ComplexWaveform awgn_add(const ComplexWaveform& w, double snr_db,
                         double signal_power_ref_w, RngSeed seed);

}  // namespace ogs

#endif
