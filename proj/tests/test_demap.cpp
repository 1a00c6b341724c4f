#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ogs/demap.hpp"
#include "ogs/gateway.hpp"
#include "ogs/metrics.hpp"
#include "oracles.hpp"

using namespace ogs;

TEST_CASE("hard decision on exact points and near boundaries") {
    const auto c = unshaped_qpsk();
    for (int k = 0; k < 4; ++k) {
        const auto bits = hard_decide(std::vector<ComplexSample>{c.points[static_cast<std::size_t>(k)]}, c);
        CHECK(bits[0] == c.labels[static_cast<std::size_t>(k)][0]);
        CHECK(bits[1] == c.labels[static_cast<std::size_t>(k)][1]);
    }
    // angle pi/4 + 0.1 belongs to the pi/2 point (label 01 under Gray)
    const double a = M_PI_4 + 0.1;
    const auto bits = hard_decide(std::vector<ComplexSample>{{std::cos(a), std::sin(a)}}, c);
    CHECK(bits[0] == 0);
    CHECK(bits[1] == 1);
    // exact tie breaks to the lowest point index
    CHECK(c.nearest({0.5, 0.5}) == 0);
}

TEST_CASE("hard decision matches the q-function on awgn qpsk") {
    const auto c = unshaped_qpsk();
    const std::size_t n = 500000;
    Rng data_rng(RngSeed{3});
    ComplexWaveform w;
    w.samples_per_symbol = 1;
    BitSequence truth;
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = data_rng.bounded(4);
        w.samples.push_back(c.points[k]);
        truth.push_back(c.labels[k][0]);
        truth.push_back(c.labels[k][1]);
    }
    const double esn0_db = 10.0;
    const auto noisy = awgn_add(w, esn0_db, 1.0, RngSeed{5});
    const auto rep = ber_count(hard_decide(noisy.samples, c), truth);

    const double p = oracles::q_function(std::sqrt(db_to_linear(esn0_db)));
    CHECK(p == doctest::Approx(7.83e-4).epsilon(1e-2));
    const double sd = std::sqrt(p * (1 - p) / static_cast<double>(2 * n));
    CHECK(std::abs(rep.ber - p) < 3.0 * sd);
}

TEST_CASE("affine fit recovers a complex channel") {
    const auto c = unshaped_qpsk();
    std::vector<ComplexSample> tx, rx;
    Rng rng(RngSeed{7});
    const ComplexSample ch = 0.5 * ComplexSample{std::cos(M_PI / 8), std::sin(M_PI / 8)};
    for (int i = 0; i < 256; ++i) {
        const auto p = c.points[rng.bounded(4)];
        tx.push_back(p);
        rx.push_back(ch * p);
    }
    SUBCASE("pilot-aided") {
        const auto fit = fit_affine(rx, tx);
        CHECK(std::abs(fit.a - 2.0 * ComplexSample{std::cos(-M_PI / 8), std::sin(-M_PI / 8)}) < 1e-9);
        CHECK(std::abs(fit.b) < 1e-9);
    }
    SUBCASE("decision-directed reaches the same fit when decisions are right") {
        const auto fit = fit_affine_decision_directed(rx, c, 3);
        CHECK(std::abs(fit.a - 2.0 * ComplexSample{std::cos(-M_PI / 8), std::sin(-M_PI / 8)}) < 1e-9);
        CHECK(std::abs(fit.b) < 1e-9);
    }
    SUBCASE("identity channel") {
        const auto fit = fit_affine(tx, tx);
        CHECK(std::abs(fit.a - ComplexSample{1, 0}) < 1e-12);
        CHECK(std::abs(fit.b) < 1e-12);
    }
}

TEST_CASE("the conventional equalizer cannot fix a shaped constellation") {
    // compressed fan {0, 0.35pi, 0.7pi, 1.05pi}: the shaping-unaware tap has
    // no way to tell levels 1 and 2 apart once both decide to the same point
    const auto shaped =
        reference_constellation(XpmModelConfig{}, default_cascade(), 0.0385, BitLabeling::Gray);
    std::vector<ComplexSample> syms;
    BitSequence truth;
    std::vector<int> levels;
    Rng rng(RngSeed{11});
    for (int i = 0; i < 4096; ++i) {
        const auto k = rng.bounded(4);
        levels.push_back(static_cast<int>(k));
        syms.push_back(shaped.points[k]);
        truth.push_back(shaped.labels[k][0]);
        truth.push_back(shaped.labels[k][1]);
    }
    const auto eq = linear_equalize(syms, std::span<const ComplexSample>(syms).first(256));
    const auto rep = ber_count(hard_decide(eq.symbols, unshaped_qpsk()), truth);
    CHECK(rep.ber > 0.1);
}

TEST_CASE("equalizer input validation") {
    std::vector<ComplexSample> syms(100, {1.0, 0.0});
    CHECK_THROWS_AS(linear_equalize(syms, std::span<const ComplexSample>(syms).first(32)),
                    std::invalid_argument);
    // zero-spread pilots are singular
    CHECK_THROWS_AS(fit_affine_decision_directed(syms, unshaped_qpsk(), 3), std::invalid_argument);
}
