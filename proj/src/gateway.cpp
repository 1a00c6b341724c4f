#include "ogs/gateway.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ogs {

FiberSpec hnlf_a() { return {2.5, 10.0, 0.57, 0.018, 1.07}; }
FiberSpec hnlf_b() { return {1.0, 10.0, 0.52, 0.016, 0.76}; }

FiberCascade default_cascade() { return {{hnlf_a(), hnlf_b()}, 0.0}; }

double effective_length_km(const FiberSpec& f) {
    if (f.loss_db_km < 0 || f.length_km < 0)
        throw std::invalid_argument("effective_length: loss and length must be >= 0");
    const double alpha = f.loss_db_km * std::numbers::ln10 / 10.0;  // 1/km
    if (alpha == 0.0) return f.length_km;
    return (1.0 - std::exp(-alpha * f.length_km)) / alpha;
}

double cascade_effective_length_km(const FiberCascade& c) {
    if (c.fibers.empty()) throw std::invalid_argument("cascade: no fibers");
    double total = 0.0;
    double preceding_loss_db = 0.0;
    for (std::size_t i = 0; i < c.fibers.size(); ++i) {
        if (i > 0) preceding_loss_db += c.extra_connection_loss_db;
        const double t = std::pow(10.0, -preceding_loss_db / 10.0);
        total += t * effective_length_km(c.fibers[i]);
        preceding_loss_db += c.fibers[i].loss_db_km * c.fibers[i].length_km;
    }
    return total;
}

double xpm_phase(double power_w, const XpmModelConfig& cfg, const FiberCascade& cascade) {
    if (power_w < 0.0) throw std::invalid_argument("xpm_phase: negative power");
    if (cfg.mode == XpmMode::Calibrated) {
        if (!(cfg.phase_scale_rad_per_w() > 0.0))
            throw std::invalid_argument("xpm_phase: calibrated phase scale must be > 0");
        return cfg.phase_scale_rad_per_w() * power_w;
    }
    const double gamma = cascade.fibers.empty() ? 0.0 : cascade.fibers.front().gamma_per_w_km;
    return 2.0 * gamma * cascade_effective_length_km(cascade) * power_w;
}

ComplexWaveform convert_pam4_to_qpsk(const ComplexWaveform& pam4, const XpmModelConfig& cfg,
                                     const FiberCascade& cascade) {
    // Precompute the rad/W slope once; the conversion itself is memoryless.
    const double scale = xpm_phase(1.0, cfg, cascade);
    ComplexWaveform out;
    out.samples_per_symbol = pam4.samples_per_symbol;
    out.symbol_rate = pam4.symbol_rate;
    out.samples.resize(pam4.samples.size());
    for (std::size_t i = 0; i < pam4.samples.size(); ++i) {
        const double phi = scale * std::norm(pam4.samples[i]);
        out.samples[i] = {std::cos(phi), std::sin(phi)};
    }
    return out;
}

ShapedConstellation reference_constellation(const XpmModelConfig& cfg, const FiberCascade& cascade,
                                            double peak_power_w, BitLabeling labeling) {
    if (!(peak_power_w > 0.0)) throw std::invalid_argument("reference_constellation: peak power must be > 0");
    ShapedConstellation c;
    c.peak_power_w = peak_power_w;
    c.mode = cfg.mode == XpmMode::Calibrated ? "calibrated" : "physical";
    for (int k = 0; k < 4; ++k) {
        const double phi = xpm_phase(peak_power_w * k / 3.0, cfg, cascade);
        c.points[static_cast<std::size_t>(k)] = {std::cos(phi), std::sin(phi)};
        c.labels[static_cast<std::size_t>(k)] = bits_of_level(k, labeling);
    }
    c.validate();
    return c;
}

}  // namespace ogs
