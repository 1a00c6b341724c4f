#include "ogs/pam4.hpp"

#include <cmath>
#include <stdexcept>

namespace ogs {

std::array<double, 4> Pam4LevelMap::level_fields() const {
    const auto p = level_powers_w();
    return {std::sqrt(p[0]), std::sqrt(p[1]), std::sqrt(p[2]), std::sqrt(p[3])};
}

std::vector<int> map_bits_to_levels(const BitSequence& bits, const Pam4LevelMap& map) {
    if (bits.size() % 2 != 0) throw std::invalid_argument("map_bits_to_levels: bit count must be even");
    std::vector<int> levels(bits.size() / 2);
    for (std::size_t i = 0; i < levels.size(); ++i)
        levels[i] = level_of_bits(bits[2 * i], bits[2 * i + 1], map.labeling);
    return levels;
}

BitSequence levels_to_bits(std::span<const int> levels, const Pam4LevelMap& map) {
    BitSequence bits(2 * levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const auto b = bits_of_level(levels[i], map.labeling);
        bits[2 * i] = b[0];
        bits[2 * i + 1] = b[1];
    }
    return bits;
}

ComplexWaveform synthesize_pam4(std::span<const int> levels, const TxConfig& cfg,
                                const Pam4LevelMap& map) {
    if (!(map.peak_power_w > 0.0)) throw std::invalid_argument("synthesize_pam4: peak power must be > 0");
    if (cfg.samples_per_symbol < 1) throw std::invalid_argument("synthesize_pam4: samples_per_symbol must be >= 1");

    const auto fields = map.level_fields();
    ComplexWaveform w;
    w.samples_per_symbol = cfg.samples_per_symbol;
    w.symbol_rate = cfg.symbol_rate;
    w.samples.reserve(levels.size() * static_cast<std::size_t>(cfg.samples_per_symbol));
    for (const int k : levels) {
        if (k < 0 || k > 3) throw std::invalid_argument("synthesize_pam4: level out of range");
        const double e = fields[static_cast<std::size_t>(k)];
        for (int s = 0; s < cfg.samples_per_symbol; ++s) w.samples.emplace_back(e, 0.0);
    }
    return awgn_add(w, cfg.pam4_snr_db, map.average_power_w(), cfg.seed);
}

ComplexWaveform apply_gain(const ComplexWaveform& w, double gain_db) {
    const double g = std::pow(10.0, gain_db / 20.0);
    ComplexWaveform out = w;
    for (auto& s : out.samples) s *= g;
    return out;
}

}  // namespace ogs
