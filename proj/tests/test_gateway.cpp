#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ogs/gateway.hpp"
#include "ogs/metrics.hpp"
#include "ogs/pam4.hpp"
#include "ogs/rx.hpp"

using namespace ogs;

namespace {

// independent evaluation of (1 - e^(-aL))/a used as the test oracle
double leff_oracle(double loss_db_km, double length_km) {
    const double a = loss_db_km * std::log(10.0) / 10.0;
    if (a == 0.0) return length_km;
    return (1.0 - std::exp(-a * length_km)) / a;
}

}  // namespace

TEST_CASE("effective length") {
    FiberSpec lossless{3.5, 10.0, 0.0, 0.0, 0.0};
    CHECK(effective_length_km(lossless) == 3.5);

    CHECK(effective_length_km(hnlf_a()) == doctest::Approx(leff_oracle(1.07, 2.5)).epsilon(1e-12));
    CHECK(effective_length_km(hnlf_a()) == doctest::Approx(1.866).epsilon(1e-3));
    CHECK(effective_length_km(hnlf_b()) == doctest::Approx(leff_oracle(0.76, 1.0)).epsilon(1e-12));
    CHECK(effective_length_km(hnlf_b()) == doctest::Approx(0.917).epsilon(1e-3));
}

TEST_CASE("cascade effective length") {
    FiberCascade single{{FiberSpec{2.0, 10.0, 0.0, 0.0, 0.0}}, 0.0};
    CHECK(cascade_effective_length_km(single) == 2.0);

    const double expected = leff_oracle(1.07, 2.5) + std::pow(10.0, -2.675 / 10.0) * leff_oracle(0.76, 1.0);
    CHECK(cascade_effective_length_km(default_cascade()) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(cascade_effective_length_km(default_cascade()) == doctest::Approx(2.362).epsilon(1e-3));

    FiberCascade dark = default_cascade();
    dark.extra_connection_loss_db = std::numeric_limits<double>::infinity();
    CHECK(cascade_effective_length_km(dark) == doctest::Approx(leff_oracle(1.07, 2.5)).epsilon(1e-12));

    CHECK_THROWS_AS(cascade_effective_length_km(FiberCascade{}), std::invalid_argument);
}

TEST_CASE("xpm phase in both modes") {
    const XpmModelConfig calib;
    const auto cascade = default_cascade();
    CHECK(xpm_phase(0.0, calib, cascade) == 0.0);
    CHECK(xpm_phase(0.055, calib, cascade) == doctest::Approx(1.5 * M_PI).epsilon(1e-12));
    CHECK(xpm_phase(0.0385, calib, cascade) == doctest::Approx(0.7 * 1.5 * M_PI).epsilon(1e-12));
    CHECK(xpm_phase(0.0385, calib, cascade) == doctest::Approx(3.299).epsilon(1e-3));

    XpmModelConfig phys;
    phys.mode = XpmMode::Physical;
    CHECK(xpm_phase(0.055, phys, cascade) ==
          doctest::Approx(2.0 * 10.0 * cascade_effective_length_km(cascade) * 0.055).epsilon(1e-12));
    CHECK(xpm_phase(0.055, phys, cascade) == doctest::Approx(2.598).epsilon(1e-3));

    CHECK_THROWS_AS(xpm_phase(-1e-9, calib, cascade), std::invalid_argument);
}

TEST_CASE("phase is linear in power") {
    const auto cascade = default_cascade();
    XpmModelConfig phys;
    phys.mode = XpmMode::Physical;
    for (const XpmModelConfig& cfg : {XpmModelConfig{}, phys}) {
        for (const double a : {0.0, 0.25, 0.7, 1.3, 5.0}) {
            for (const double p : {1e-4, 0.0385, 0.055}) {
                const double lhs = xpm_phase(a * p, cfg, cascade);
                const double rhs = a * xpm_phase(p, cfg, cascade);
                CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
            }
        }
    }
}

TEST_CASE("conversion emits a unit-modulus probe") {
    std::vector<int> levels{0, 1, 2, 3, 3, 0};
    Pam4LevelMap map;
    map.peak_power_w = 0.055;
    TxConfig txc;
    txc.pam4_snr_db = 20.0;
    txc.seed = RngSeed{2};
    const auto pam4 = synthesize_pam4(levels, txc, map);
    const auto probe = convert_pam4_to_qpsk(pam4, XpmModelConfig{}, default_cascade());
    for (const auto& s : probe.samples) CHECK(std::abs(std::abs(s) - 1.0) < 1e-12);
}

TEST_CASE("noiseless conversion lands on the ideal points") {
    Pam4LevelMap map;
    map.peak_power_w = 0.055;
    TxConfig txc;  // noise off
    const auto zeros = convert_pam4_to_qpsk(synthesize_pam4(std::vector<int>{0, 0}, txc, map),
                                            XpmModelConfig{}, default_cascade());
    for (const auto& s : zeros.samples) CHECK(std::abs(s - ComplexSample{1.0, 0.0}) < 1e-12);

    const auto threes = convert_pam4_to_qpsk(synthesize_pam4(std::vector<int>{3, 3}, txc, map),
                                             XpmModelConfig{}, default_cascade());
    for (const auto& s : threes.samples) CHECK(std::abs(s - ComplexSample{0.0, -1.0}) < 1e-12);
}

TEST_CASE("reference constellations at the sweep powers") {
    const auto cascade = default_cascade();
    const XpmModelConfig cfg;

    const auto at = [&](double peak_mw) {
        return reference_constellation(cfg, cascade, peak_mw * 1e-3, BitLabeling::Gray);
    };
    const auto expect_phases = [&](const ShapedConstellation& c, std::array<double, 4> phases) {
        for (int k = 0; k < 4; ++k) {
            const ComplexSample want{std::cos(phases[static_cast<std::size_t>(k)]), std::sin(phases[static_cast<std::size_t>(k)])};
            CHECK(std::abs(c.points[static_cast<std::size_t>(k)] - want) < 1e-9);
        }
    };
    expect_phases(at(55.0), {0.0, M_PI_2, M_PI, 1.5 * M_PI});
    expect_phases(at(38.5), {0.0, 0.35 * M_PI, 0.70 * M_PI, 1.05 * M_PI});
    expect_phases(at(60.5), {0.0, 0.55 * M_PI, 1.10 * M_PI, 1.65 * M_PI});

    CHECK(at(55.0).labels[3] == std::array<std::uint8_t, 2>{1, 0});
    CHECK_THROWS_AS(reference_constellation(cfg, cascade, 0.0, BitLabeling::Gray), std::invalid_argument);
}

TEST_CASE("intensity noise converts to phase noise growing as sqrt(k)") {
    std::vector<int> levels;
    for (int i = 0; i < 60000; ++i) levels.push_back(i % 4);
    Pam4LevelMap map;
    map.peak_power_w = 0.055;
    TxConfig txc;
    txc.pam4_snr_db = 20.0;
    txc.samples_per_symbol = 1;
    txc.seed = RngSeed{77};
    const auto probe = convert_pam4_to_qpsk(synthesize_pam4(levels, txc, map),
                                            XpmModelConfig{}, default_cascade());

    const auto stats = phase_stats_per_level(probe.samples, levels);
    REQUIRE(stats[1].present);
    CHECK(stats[1].circ_std < stats[2].circ_std);
    CHECK(stats[2].circ_std < stats[3].circ_std);
    // first-order expansion of |E_k + n|^2: sigma scales as sqrt(k)
    CHECK(stats[2].circ_std / stats[1].circ_std == doctest::Approx(std::sqrt(2.0)).epsilon(0.10));
    CHECK(stats[3].circ_std / stats[1].circ_std == doctest::Approx(std::sqrt(3.0)).epsilon(0.10));
    // level 0 picks up only the tiny |n|^2 term
    CHECK(stats[0].circ_std < 0.2 * stats[1].circ_std);
}
