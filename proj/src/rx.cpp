#include "ogs/rx.hpp"

#include <cmath>
#include <stdexcept>

#include "ogs/fft.hpp"

namespace ogs {

ComplexWaveform apply_rx_impairments(const ComplexWaveform& w, const RxImpairments& imp, RngSeed seed) {
    if (imp.linewidth_hz < 0) throw std::invalid_argument("rx: linewidth must be >= 0");
    ComplexWaveform out = w;
    const double fs = w.sample_rate();

    if (imp.linewidth_hz > 0.0 || imp.freq_offset_hz != 0.0) {
        Rng rng(derive_seed(seed, "rx.phase"));
        const double inc_sd = std::sqrt(2.0 * M_PI * imp.linewidth_hz / fs);
        const double dphi = 2.0 * M_PI * imp.freq_offset_hz / fs;
        double theta = 0.0;
        for (std::size_t n = 0; n < out.samples.size(); ++n) {
            if (imp.linewidth_hz > 0.0) theta += inc_sd * rng.gaussian();
            const double phi = dphi * static_cast<double>(n) + theta;
            out.samples[n] *= ComplexSample{std::cos(phi), std::sin(phi)};
        }
    }
    if (imp.rx_snr_db) {
        // probe power is normalized to 1 by the gateway
        out = awgn_add(out, *imp.rx_snr_db, 1.0, derive_seed(seed, "rx.awgn"));
    }
    return out;
}

std::vector<ComplexSample> downsample(const ComplexWaveform& w) {
    w.validate();
    const auto sps = static_cast<std::size_t>(w.samples_per_symbol);
    std::vector<ComplexSample> symbols(w.symbol_count());
    const std::size_t mid = sps / 2;
    for (std::size_t i = 0; i < symbols.size(); ++i) symbols[i] = w.samples[i * sps + mid];
    return symbols;
}

FocResult foc_estimate_and_correct(std::span<const ComplexSample> symbols, double symbol_rate,
                                   int m_power) {
    if (symbols.size() < 1024) throw std::invalid_argument("foc: need at least 1024 symbols");
    if (m_power < 1) throw std::invalid_argument("foc: m_power must be >= 1");

    std::size_t n = 1;
    while (n * 2 <= symbols.size()) n *= 2;

    std::vector<std::complex<double>> spec(n);
    double energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::complex<double> v{1.0, 0.0};
        for (int p = 0; p < m_power; ++p) v *= symbols[i];
        spec[i] = v;
        energy += std::norm(v);
    }
    if (energy == 0.0) throw std::invalid_argument("foc: degenerate (all-zero) input");

    fft_radix2(spec);
    std::size_t peak = 0;
    double peak_mag = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = std::norm(spec[i]);
        if (m > peak_mag) {
            peak_mag = m;
            peak = i;
        }
    }
    // signed bin index, then /m to undo the power operation
    const double signed_bin = (peak <= n / 2) ? static_cast<double>(peak)
                                              : static_cast<double>(peak) - static_cast<double>(n);
    const double est_hz = signed_bin * symbol_rate / static_cast<double>(n) / m_power;

    FocResult res;
    res.estimated_offset_hz = est_hz;
    res.symbols.resize(symbols.size());
    const double dphi = -2.0 * M_PI * est_hz / symbol_rate;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const double phi = dphi * static_cast<double>(i);
        res.symbols[i] = symbols[i] * ComplexSample{std::cos(phi), std::sin(phi)};
    }
    return res;
}

CprResult cpr_decision_directed(std::span<const ComplexSample> symbols, const CprConfig& cfg) {
    if (!(cfg.loop_gain > 0.0) || cfg.loop_gain > 1.0)
        throw std::invalid_argument("cpr: loop_gain must be in (0, 1]");
    cfg.reference.validate();

    CprResult res;
    res.symbols.resize(symbols.size());
    res.phase_track.resize(symbols.size());
    double est = cfg.initial_phase_rad;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const ComplexSample r = symbols[i] * ComplexSample{std::cos(-est), std::sin(-est)};
        const int d = cfg.reference.nearest(r);
        const ComplexSample p = cfg.reference.points[static_cast<std::size_t>(d)];
        res.symbols[i] = r;
        res.phase_track[i] = est;
        est += cfg.loop_gain * std::arg(r * std::conj(p));
    }
    return res;
}

std::vector<ComplexSample> align_phase_to_prefix(std::span<const ComplexSample> symbols,
                                                 std::span<const int> prefix_levels,
                                                 const ShapedConstellation& reference) {
    if (prefix_levels.empty() || prefix_levels.size() > symbols.size())
        throw std::invalid_argument("align: prefix must be non-empty and within the frame");
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < prefix_levels.size(); ++i)
        acc += symbols[i] * std::conj(reference.points[static_cast<std::size_t>(prefix_levels[i])]);
    const double theta = std::arg(acc);
    std::vector<ComplexSample> out(symbols.size());
    const ComplexSample rot{std::cos(-theta), std::sin(-theta)};
    for (std::size_t i = 0; i < symbols.size(); ++i) out[i] = symbols[i] * rot;
    return out;
}

}  // namespace ogs
