#include "ogs/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace ogs {

BerReport ber_count(const BitSequence& decided, const BitSequence& truth) {
    if (decided.size() != truth.size())
        throw std::invalid_argument("ber_count: length mismatch");
    if (decided.empty()) throw std::invalid_argument("ber_count: empty sequences");

    BerReport r;
    r.total_bits = decided.size();
    for (std::size_t i = 0; i < decided.size(); ++i)
        if ((decided[i] != 0) != (truth[i] != 0)) ++r.bit_errors;
    const double n = static_cast<double>(r.total_bits);
    const double p = static_cast<double>(r.bit_errors) / n;
    r.ber = p;

    const double z = 1.959963984540054;  // 95%
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    // at p = 0 (or 1) the bound is exactly the endpoint; avoid rounding dust
    r.ci_lo = r.bit_errors == 0 ? 0.0 : std::max(0.0, center - half);
    r.ci_hi = r.bit_errors == r.total_bits ? 1.0 : std::min(1.0, center + half);
    return r;
}

namespace {

// mean over bits of log2(1 + exp(-s (1-2b) L))
double gmi_penalty(const LlrFrame& f, double s) {
    constexpr double kLog2e = 1.4426950408889634;
    double acc = 0.0;
    for (std::size_t i = 0; i < f.llrs.size(); ++i) {
        const double t = -s * (f.truth_bits[i] ? -1.0 : 1.0) * f.llrs[i];
        acc += t > 35.0 ? t * kLog2e : std::log1p(std::exp(t)) * kLog2e;
    }
    return acc / static_cast<double>(f.llrs.size());
}

}  // namespace

GmiReport gmi_from_llrs(const LlrFrame& frame) {
    if (frame.llrs.empty()) throw std::invalid_argument("gmi_from_llrs: empty frame");
    if (frame.truth_bits.size() != frame.llrs.size())
        throw std::invalid_argument("gmi_from_llrs: ground-truth bits required");

    // golden-section maximization over log s; the objective is concave in s
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = std::log(1e-2), hi = std::log(1e2);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = gmi_penalty(frame, std::exp(x1)), f2 = gmi_penalty(frame, std::exp(x2));
    for (int it = 0; it < 80; ++it) {
        if (f1 <= f2) {  // minimize the penalty
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = gmi_penalty(frame, std::exp(x1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = gmi_penalty(frame, std::exp(x2));
        }
    }
    const double s = std::exp((lo + hi) / 2.0);
    GmiReport r;
    r.llr_scale_used = s;
    r.gmi_per_bit = 1.0 - gmi_penalty(frame, s);
    return r;
}

LlrFrame saturated_llrs(const BitSequence& decided, const BitSequence& truth) {
    if (decided.size() != truth.size())
        throw std::invalid_argument("saturated_llrs: length mismatch");
    LlrFrame f;
    f.llrs.resize(decided.size());
    f.truth_bits = truth;
    for (std::size_t i = 0; i < decided.size(); ++i) f.llrs[i] = decided[i] ? -1.0 : 1.0;
    return f;
}

std::array<PhaseStats, 4> phase_stats_per_level(std::span<const ComplexSample> symbols,
                                                std::span<const int> true_levels) {
    if (symbols.size() != true_levels.size())
        throw std::invalid_argument("phase_stats_per_level: length mismatch");

    std::array<std::complex<double>, 4> resultant{};
    std::array<std::size_t, 4> counts{};
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const int k = true_levels[i];
        if (k < 0 || k > 3) throw std::invalid_argument("phase_stats_per_level: level out of range");
        const double mag = std::abs(symbols[i]);
        if (mag > 0.0) resultant[static_cast<std::size_t>(k)] += symbols[i] / mag;
        ++counts[static_cast<std::size_t>(k)];
    }

    std::array<PhaseStats, 4> stats{};
    for (std::size_t k = 0; k < 4; ++k) {
        if (counts[k] == 0) continue;  // reported absent
        stats[k].present = true;
        stats[k].count = counts[k];
        const double rbar = std::abs(resultant[k]) / static_cast<double>(counts[k]);
        stats[k].circ_mean = std::arg(resultant[k]);
        stats[k].circ_std = rbar >= 1.0 ? 0.0 : std::sqrt(-2.0 * std::log(std::max(rbar, 1e-300)));
    }
    return stats;
}

}  // namespace ogs
