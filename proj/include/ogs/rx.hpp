#ifndef OGS_RX_HPP
#define OGS_RX_HPP

#include <optional>
#include <span>
#include <vector>

#include "ogs/constellation.hpp"
#include "ogs/signal.hpp"

namespace ogs {

/// Coherent-detection impairments. The linewidth lumps transmitter and LO
/// (the experiment shares one laser); rx_snr_db empty = receiver noise off.
struct RxImpairments {
    double linewidth_hz = 100e3;
    double freq_offset_hz = 0.0;
    std::optional<double> rx_snr_db;
};

/// Multiplies sample n by exp(j(2 pi df n / fs + theta[n])), theta a Wiener
/// process with per-sample increment variance 2 pi linewidth / fs, then adds
/// receiver AWGN (referenced to unit probe power) when enabled.
ComplexWaveform apply_rx_impairments(const ComplexWaveform& w, const RxImpairments& imp, RngSeed seed);

/// One value per symbol, taken at the mid-symbol sample (NRZ, no interpolation).
std::vector<ComplexSample> downsample(const ComplexWaveform& w);

struct FocResult {
    std::vector<ComplexSample> symbols;
    double estimated_offset_hz = 0.0;
};

/// Frequency-offset compensation via the m-th power method: raises symbols
/// to the m-th power, locates the magnitude-spectrum peak over the largest
/// power-of-two prefix, divides by m and derotates. Needs >= 1024 symbols;
/// throws on an all-zero input.
FocResult foc_estimate_and_correct(std::span<const ComplexSample> symbols, double symbol_rate,
                                   int m_power = 4);

struct CprConfig {
    double loop_gain = 0.01;  // in (0, 1]
    ShapedConstellation reference;
    double initial_phase_rad = 0.0;  // warm start, e.g. data-aided from a known prefix
};

struct CprResult {
    std::vector<ComplexSample> symbols;
    std::vector<double> phase_track;
};

/// Decision-directed first-order PLL: derotate by the current estimate,
/// hard-decide against the reference, advance the estimate by
/// loop_gain * angle(r * conj(decision)).
CprResult cpr_decision_directed(std::span<const ComplexSample> symbols, const CprConfig& cfg);

/// Data-aided resolution of any residual constant rotation (e.g. the m-th
/// power ambiguity): derotates by arg sum(r_i * conj(ref[level_i])) over the
/// known prefix.
std::vector<ComplexSample> align_phase_to_prefix(std::span<const ComplexSample> symbols,
                                                 std::span<const int> prefix_levels,
                                                 const ShapedConstellation& reference);

}  // namespace ogs

#endif
