#ifndef OGS_PAM4_HPP
#define OGS_PAM4_HPP

#include <array>
#include <limits>
#include <span>
#include <vector>

#include "ogs/constellation.hpp"
#include "ogs/signal.hpp"

namespace ogs {

/// PAM4 level definition with equally spaced optical POWER levels
/// P_k = (k/3) * peak_power and fields E_k = sqrt(P_k), matching square-law
/// photodetection. The field spacing E_{k+1}-E_k is strictly decreasing.
struct Pam4LevelMap {
    double peak_power_w = 0.055;
    BitLabeling labeling = BitLabeling::Gray;

    std::array<double, 4> level_powers_w() const {
        return {0.0, peak_power_w / 3.0, 2.0 * peak_power_w / 3.0, peak_power_w};
    }
    std::array<double, 4> level_fields() const;

    /// Average power over the four equiprobable levels: peak/2.
    double average_power_w() const { return peak_power_w / 2.0; }
};

struct TxConfig {
    double symbol_rate = 10e9;
    int samples_per_symbol = 2;
    double pam4_snr_db = std::numeric_limits<double>::infinity();  // +inf disables noise
    double edfa_gain_db = 0.0;
    RngSeed seed{1};
};

/// Two bits per level under the map's labeling; inverse of levels_to_bits.
std::vector<int> map_bits_to_levels(const BitSequence& bits, const Pam4LevelMap& map);
BitSequence levels_to_bits(std::span<const int> levels, const Pam4LevelMap& map);

/// NRZ rectangular waveform: field E_k held for samples_per_symbol samples,
/// zero imaginary part, then AWGN at cfg.pam4_snr_db referenced to the
/// equiprobable-level average power (peak/2).
ComplexWaveform synthesize_pam4(std::span<const int> levels, const TxConfig& cfg,
                                const Pam4LevelMap& map);

/// Field scaled by 10^(gain_db/20). Applied after noise injection, so noise
/// scales with the signal exactly as an amplifier following a noisy source.
ComplexWaveform apply_gain(const ComplexWaveform& w, double gain_db);

}  // namespace ogs

#endif
