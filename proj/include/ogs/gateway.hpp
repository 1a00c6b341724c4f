#ifndef OGS_GATEWAY_HPP
#define OGS_GATEWAY_HPP

#include <vector>

#include "ogs/constellation.hpp"
#include "ogs/signal.hpp"

namespace ogs {

/// Physical parameters of one highly nonlinear fiber.
struct FiberSpec {
    double length_km = 0.0;
    double gamma_per_w_km = 0.0;       // nonlinearity
    double dispersion_ps_nm_km = 0.0;
    double slope_ps_nm_km2 = 0.0;
    double loss_db_km = 0.0;
};

/// The two HNLFs used by the gateway.
FiberSpec hnlf_a();  // 2.5 km, 10 /W/km, 0.57 ps/nm/km, 0.018 ps/nm/km^2, 1.07 dB/km
FiberSpec hnlf_b();  // 1.0 km, 10 /W/km, 0.52 ps/nm/km, 0.016 ps/nm/km^2, 0.76 dB/km

struct FiberCascade {
    std::vector<FiberSpec> fibers;
    double extra_connection_loss_db = 0.0;  // per splice between consecutive fibers
};

FiberCascade default_cascade();  // hnlf_a then hnlf_b, zero connection loss

/// L_eff = (1 - e^(-alpha L)) / alpha with alpha = loss * ln(10)/10 per km;
/// returns L in the lossless limit.
double effective_length_km(const FiberSpec& f);

/// Sum of per-fiber effective lengths, each weighted by the power
/// transmittance of everything before it (first fiber sees T = 1).
double cascade_effective_length_km(const FiberCascade& c);

enum class XpmMode { Calibrated, Physical };

/// Phase-conversion model. Calibrated mode (default) anchors the reference
/// power to the reference phase and scales linearly; physical mode evaluates
/// 2 * gamma * L_eff * P from the cascade parameters directly.
struct XpmModelConfig {
    XpmMode mode = XpmMode::Calibrated;
    double reference_power_w = 0.055;
    double reference_phase_rad = 1.5 * M_PI;

    double phase_scale_rad_per_w() const { return reference_phase_rad / reference_power_w; }
};

/// Probe phase shift induced by instantaneous pump power. Linear in power
/// in both modes; negative power throws.
double xpm_phase(double power_w, const XpmModelConfig& cfg, const FiberCascade& cascade);

/// Memoryless conversion: out[n] = exp(j * xpm_phase(|pam4[n]|^2)). The probe
/// is normalized to unit amplitude, so every output sample has |s| = 1.
ComplexWaveform convert_pam4_to_qpsk(const ComplexWaveform& pam4, const XpmModelConfig& cfg,
                                     const FiberCascade& cascade);

/// Noiseless image of the four PAM4 levels: unit points at phases
/// xpm_phase(k/3 * peak), k = 0..3, carrying the level's bit labels.
ShapedConstellation reference_constellation(const XpmModelConfig& cfg, const FiberCascade& cascade,
                                            double peak_power_w, BitLabeling labeling);

}  // namespace ogs

#endif
