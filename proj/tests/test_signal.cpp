#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ogs/signal.hpp"
#include "oracles.hpp"

using namespace ogs;

TEST_CASE("prbs7 has period 127 with 64 ones") {
    const auto bits = prbs_generate(7, 254, RngSeed{1});
    int ones = 0;
    for (int i = 0; i < 127; ++i) {
        CHECK(bits[static_cast<std::size_t>(i)] == bits[static_cast<std::size_t>(i + 127)]);
        ones += bits[static_cast<std::size_t>(i)];
    }
    CHECK(ones == 64);
    // and no shorter period
    bool shorter = false;
    for (int p = 1; p < 127 && !shorter; ++p) {
        bool repeats = true;
        for (int i = 0; i + p < 254 && repeats; ++i)
            repeats = bits[static_cast<std::size_t>(i)] == bits[static_cast<std::size_t>(i + p)];
        shorter = repeats;
    }
    CHECK_FALSE(shorter);
}

TEST_CASE("prbs is deterministic per (order, seed)") {
    CHECK(prbs_generate(7, 10, RngSeed{1}) == prbs_generate(7, 10, RngSeed{1}));
    CHECK(prbs_generate(7, 64, RngSeed{1}) != prbs_generate(7, 64, RngSeed{2}));
}

TEST_CASE("prbs rejects unsupported orders") {
    CHECK_THROWS_AS(prbs_generate(8, 10, RngSeed{1}), std::invalid_argument);
    CHECK_THROWS_AS(prbs_generate(0, 10, RngSeed{1}), std::invalid_argument);
}

TEST_CASE("prbs taps are maximal-length for every supported order") {
    for (const int order : {7, 15, 23, 31}) {
        // tap mask has bit t and bit 0 set for x^order + x^t + 1
        const std::uint64_t taps = prbs_tap_mask(order);
        const std::uint64_t poly = (1ULL << order) | taps;
        CAPTURE(order);
        CHECK(oracles::lfsr_is_maximal(poly, order));
    }
}

TEST_CASE("awgn with infinite snr is the identity") {
    ComplexWaveform w;
    w.samples = {{1.0, 0.0}, {0.5, -0.25}};
    const auto out = awgn_add(w, std::numeric_limits<double>::infinity(), 1.0, RngSeed{3});
    CHECK(out.samples == w.samples);
}

TEST_CASE("awgn variance calibration on a unit-power waveform") {
    ComplexWaveform w;
    w.samples.assign(1000000, {1.0, 0.0});
    const auto out = awgn_add(w, 20.0, 1.0, RngSeed{11});
    double var = 0.0;
    for (std::size_t i = 0; i < w.samples.size(); ++i) var += std::norm(out.samples[i] - w.samples[i]);
    var /= static_cast<double>(w.samples.size());
    CHECK(var == doctest::Approx(0.01).epsilon(0.03));
}

TEST_CASE("empirical snr tracks the request within 0.2 dB") {
    ComplexWaveform w;
    w.samples.assign(100000, {1.0, 0.0});
    for (const double snr : {5.0, 15.0, 25.0}) {
        const auto out = awgn_add(w, snr, 1.0, RngSeed{5});
        double nvar = 0.0;
        for (std::size_t i = 0; i < w.samples.size(); ++i)
            nvar += std::norm(out.samples[i] - w.samples[i]);
        nvar /= static_cast<double>(w.samples.size());
        const double measured = linear_to_db(1.0 / nvar);
        CHECK(std::abs(measured - snr) < 0.2);
    }
}

TEST_CASE("awgn is deterministic and rejects bad reference power") {
    ComplexWaveform w;
    w.samples.assign(64, {1.0, 0.0});
    const auto a = awgn_add(w, 10.0, 1.0, RngSeed{4});
    const auto b = awgn_add(w, 10.0, 1.0, RngSeed{4});
    CHECK(a.samples == b.samples);
    CHECK_THROWS_AS(awgn_add(w, 10.0, 0.0, RngSeed{4}), std::invalid_argument);
    CHECK_THROWS_AS(awgn_add(w, 10.0, -1.0, RngSeed{4}), std::invalid_argument);
}

TEST_CASE("unit conversions") {
    CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(dbm_to_watts(2.4) == doctest::Approx(1.738e-3).epsilon(1e-3));
    CHECK(db_to_linear(3.2) == doctest::Approx(2.089).epsilon(1e-3));
    for (const double x : {-7.5, 0.0, 3.2, 12.25}) {
        CHECK(linear_to_db(db_to_linear(x)) == doctest::Approx(x).epsilon(1e-12));
        CHECK(watts_to_dbm(dbm_to_watts(x)) == doctest::Approx(x).epsilon(1e-12));
    }
}

TEST_CASE("seed splitting gives independent, reproducible streams") {
    const auto a = derive_seed(RngSeed{42}, "tx.awgn");
    const auto b = derive_seed(RngSeed{42}, "rx.awgn");
    CHECK(a.value != b.value);
    CHECK(derive_seed(RngSeed{42}, "tx.awgn").value == a.value);
}

TEST_CASE("waveform validation") {
    ComplexWaveform w;
    w.samples.assign(5, {0.0, 0.0});
    w.samples_per_symbol = 2;
    CHECK_THROWS_AS(w.validate(), std::invalid_argument);
    w.samples.resize(6);
    CHECK_NOTHROW(w.validate());
    w.symbol_rate = 0.0;
    CHECK_THROWS_AS(w.validate(), std::invalid_argument);
}
