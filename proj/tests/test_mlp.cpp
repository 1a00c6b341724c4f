#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "ogs/metrics.hpp"
#include "ogs/mlp.hpp"

using namespace ogs;

namespace {

// two well-separated clusters labelled 00 and 11
void toy_clusters(std::size_t n, std::uint64_t seed, std::vector<ComplexSample>& syms,
                  BitSequence& bits) {
    Rng rng(RngSeed{seed});
    for (std::size_t i = 0; i < n; ++i) {
        const bool one = rng.bounded(2) != 0;
        const double cx = one ? -1.0 : 1.0;
        syms.push_back({cx + 0.1 * rng.gaussian(), cx + 0.1 * rng.gaussian()});
        bits.push_back(one);
        bits.push_back(one);
    }
}

MlpConfig small_cfg(int blocks = 2, int width = 6) {
    MlpConfig c;
    c.blocks = blocks;
    c.width = width;
    c.dropout = 0.0;
    return c;
}

std::vector<ComplexSample> gauss_symbols(std::size_t n, std::uint64_t seed) {
    Rng rng(RngSeed{seed});
    std::vector<ComplexSample> s(n);
    for (auto& v : s) v = {rng.gaussian(), rng.gaussian()};
    return s;
}

BitSequence random_bits(std::size_t n, std::uint64_t seed) {
    Rng rng(RngSeed{seed});
    BitSequence b(n);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng.bounded(2));
    return b;
}

}  // namespace

TEST_CASE("zero head means zero llrs") {
    auto m = mlp_init(small_cfg(), RngSeed{1});
    std::fill(m.head.w.begin(), m.head.w.end(), 0.0);
    std::fill(m.head.b.begin(), m.head.b.end(), 0.0);
    const auto f = mlp_forward(m, gauss_symbols(16, 2));
    for (const double l : f.llrs) CHECK(l == 0.0);
}

TEST_CASE("inference is deterministic") {
    auto m = mlp_init(MlpConfig{}, RngSeed{3});
    const auto syms = gauss_symbols(512, 4);
    const auto a = mlp_forward(m, syms);
    const auto b = mlp_forward(m, syms);
    CHECK(a.llrs == b.llrs);
}

TEST_CASE("llr thresholding and sign decisions agree") {
    auto m = mlp_init(MlpConfig{}, RngSeed{5});
    const auto f = mlp_forward(m, gauss_symbols(256, 6));
    const auto bits = llrs_to_bits(f);
    for (std::size_t i = 0; i < f.llrs.size(); ++i)
        CHECK(bits[i] == (f.llrs[i] >= 0.0 ? 0 : 1));
}

TEST_CASE("degenerate batch never yields non-finite outputs") {
    auto m = mlp_init(small_cfg(), RngSeed{7});
    std::vector<ComplexSample> same(32, {0.37, -0.12});
    BitSequence bits(64, 0);
    TrainConfig tc;
    tc.epochs = 1;
    tc.batch_size = 32;
    CHECK_NOTHROW(mlp_train(m, same, bits, tc));  // batch variance is exactly zero
    const auto f = mlp_forward(m, same);
    for (const double l : f.llrs) CHECK(std::isfinite(l));
}

TEST_CASE("non-finite inputs are rejected with the layer named") {
    auto m = mlp_init(small_cfg(), RngSeed{8});
    std::vector<ComplexSample> bad{{std::numeric_limits<double>::quiet_NaN(), 0.0}};
    CHECK_THROWS_WITH_AS(mlp_forward(m, bad), doctest::Contains("block 0"), std::runtime_error);
}

TEST_CASE("separable toy data trains to zero errors within 20 epochs") {
    std::vector<ComplexSample> syms;
    BitSequence bits;
    toy_clusters(2000, 11, syms, bits);

    auto m = mlp_init(small_cfg(2, 8), RngSeed{12});
    TrainConfig tc;
    tc.epochs = 20;
    tc.batch_size = 64;
    const auto curve = mlp_train(m, syms, bits, tc);
    CHECK(curve.train_loss.front() > curve.train_loss.back());

    const auto rep = ber_count(llrs_to_bits(mlp_forward(m, syms)), bits);
    CHECK(rep.ber == 0.0);
}

TEST_CASE("random labels carry no information") {
    const auto syms = gauss_symbols(4000, 13);
    const auto bits = random_bits(8000, 14);
    auto m = mlp_init(small_cfg(2, 8), RngSeed{15});
    TrainConfig tc;
    tc.epochs = 10;
    const auto held_syms = gauss_symbols(4000, 16);
    const auto held_bits = random_bits(8000, 17);
    mlp_train(m, syms, bits, tc, held_syms, held_bits);

    auto f = mlp_forward(m, held_syms);
    f.truth_bits = held_bits;
    CHECK(std::abs(gmi_from_llrs(f).gmi_per_bit) < 0.02);
}

TEST_CASE("gradient check: linear-only model is exact to 1e-7") {
    auto m = mlp_init(small_cfg(0, 1), RngSeed{19});  // no blocks: plain affine map
    const auto syms = gauss_symbols(32, 20);
    const auto bits = random_bits(64, 21);
    CHECK(mlp_gradient_check(m, syms, bits) < 1e-7);
}

TEST_CASE("gradient check: full block with batch-norm and relu") {
    auto m = mlp_init(small_cfg(2, 6), RngSeed{23});
    const auto syms = gauss_symbols(24, 24);
    const auto bits = random_bits(48, 25);
    CHECK(mlp_gradient_check(m, syms, bits) < 1e-4);
}

TEST_CASE("finite-difference error: plateau then roundoff") {
    auto m = mlp_init(small_cfg(1, 4), RngSeed{27});
    const auto syms = gauss_symbols(24, 28);
    const auto bits = random_bits(48, 29);
    const double e3 = mlp_gradient_check(m, syms, bits, 1e-3);
    const double e4 = mlp_gradient_check(m, syms, bits, 1e-4);
    const double e5 = mlp_gradient_check(m, syms, bits, 1e-5);
    const double e6 = mlp_gradient_check(m, syms, bits, 1e-6);
    // truncation shrinks from coarse steps, roundoff creeps back at tiny ones
    CHECK(std::min({e4, e5}) <= e3);
    CHECK(e6 >= std::min({e4, e5}));
    for (const double e : {e3, e4, e5, e6}) CHECK(e < 1e-3);
}

TEST_CASE("gradient check refuses oversized models") {
    auto m = mlp_init(MlpConfig{.blocks = 4, .width = 128}, RngSeed{31});
    const auto syms = gauss_symbols(8, 32);
    const auto bits = random_bits(16, 33);
    CHECK_THROWS_AS(mlp_gradient_check(m, syms, bits), std::invalid_argument);
}

TEST_CASE("adaptive-momentum trajectory is invariant to loss scaling") {
    std::vector<ComplexSample> syms;
    BitSequence bits;
    toy_clusters(640, 35, syms, bits);

    TrainConfig tc;
    tc.epochs = 1;
    tc.batch_size = 64;  // 10 update steps
    tc.epsilon = 1e-12;

    auto base = mlp_init(small_cfg(2, 6), RngSeed{36});
    auto scaled = base;
    mlp_train(base, syms, bits, tc);
    TrainConfig tc10 = tc;
    tc10.loss_scale = 10.0;
    mlp_train(scaled, syms, bits, tc10);

    double dist = 0.0;
    for (std::size_t b = 0; b < base.body.size(); ++b)
        for (std::size_t i = 0; i < base.body[b].lin.w.size(); ++i)
            dist = std::max(dist, std::abs(base.body[b].lin.w[i] - scaled.body[b].lin.w[i]));
    for (std::size_t i = 0; i < base.head.w.size(); ++i)
        dist = std::max(dist, std::abs(base.head.w[i] - scaled.head.w[i]));
    CHECK(dist < 1e-6);
}

TEST_CASE("training diverges loudly and restores the last finite state") {
    std::vector<ComplexSample> syms;
    BitSequence bits;
    toy_clusters(512, 37, syms, bits);
    auto m = mlp_init(small_cfg(1, 4), RngSeed{38});
    TrainConfig tc;
    tc.epochs = 5;
    tc.learning_rate = 1e280;
    CHECK_THROWS_AS(mlp_train(m, syms, bits, tc), TrainingDivergedError);
    for (const auto& blk : m.body)
        for (const double w : blk.lin.w) CHECK(std::isfinite(w));
    CHECK_NOTHROW(mlp_forward(m, syms));
}

TEST_CASE("save/load round-trips bit-exactly") {
    std::vector<ComplexSample> syms;
    BitSequence bits;
    toy_clusters(512, 41, syms, bits);
    auto m = mlp_init(small_cfg(2, 6), RngSeed{42});
    TrainConfig tc;
    tc.epochs = 3;
    mlp_train(m, syms, bits, tc);

    const std::string path = "test_model.bin";
    mlp_save(m, path);
    const auto loaded = mlp_load(path);
    std::remove(path.c_str());

    const auto a = mlp_forward(m, syms);
    const auto b = mlp_forward(loaded, syms);
    REQUIRE(a.llrs.size() == b.llrs.size());
    for (std::size_t i = 0; i < a.llrs.size(); ++i) CHECK(a.llrs[i] == b.llrs[i]);

    CHECK_THROWS_AS(mlp_load("does_not_exist.bin"), std::runtime_error);
}

TEST_CASE("paper-scale shapes: 120600 + 13400 bits split cleanly") {
    TrainConfig tc;
    CHECK(tc.train_bits == 120600);
    CHECK(tc.test_bits == 13400);
    CHECK(tc.train_bits / 2 == 60300);
    CHECK(tc.test_bits / 2 == 6700);
}
