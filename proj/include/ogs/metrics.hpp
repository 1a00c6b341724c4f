#ifndef OGS_METRICS_HPP
#define OGS_METRICS_HPP

#include <array>
#include <cstddef>
#include <span>

#include "ogs/mlp.hpp"
#include "ogs/signal.hpp"

namespace ogs {

struct BerReport {
    std::size_t bit_errors = 0;
    std::size_t total_bits = 0;
    double ber = 0.0;
    double ci_lo = 0.0;  // Wilson 95% interval
    double ci_hi = 0.0;
};

/// Exact error count with a Wilson 95% interval; throws on length mismatch.
BerReport ber_count(const BitSequence& decided, const BitSequence& truth);

struct GmiReport {
    double gmi_per_bit = 0.0;  // normalized, <= 1
    double llr_scale_used = 1.0;
};

/// Normalized GMI under bit-metric decoding:
///   max_{s>0} 1 - (1/N) sum log2(1 + exp(-s (1-2b) L))
/// with the scale found by golden-section search over log s in [1e-2, 1e2],
/// so any positive rescaling of the LLRs leaves the result unchanged.
GmiReport gmi_from_llrs(const LlrFrame& frame);

/// Saturated +-1 LLRs from hard decisions; feeding these to gmi_from_llrs
/// gives 1 - Hb(BER), the labeled hard-decision GMI diagnostic.
LlrFrame saturated_llrs(const BitSequence& decided, const BitSequence& truth);

struct PhaseStats {
    bool present = false;
    std::size_t count = 0;
    double circ_mean = 0.0;  // arg of the resultant
    double circ_std = 0.0;   // sqrt(-2 ln Rbar)
};

/// Circular statistics of symbol phase per transmitted level (0..3).
/// Levels absent from the data are reported absent, not as zero.
std::array<PhaseStats, 4> phase_stats_per_level(std::span<const ComplexSample> symbols,
                                                std::span<const int> true_levels);

}  // namespace ogs

#endif
