// Test-only oracles, independent of the library implementations they check.
#ifndef OGS_TESTS_ORACLES_HPP
#define OGS_TESTS_ORACLES_HPP

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracles {

// ---- GF(2) polynomial arithmetic (LFSR maximality check) -------------------

// carry-less multiply of polynomials over GF(2), degrees < 32
inline std::uint64_t gf2_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r = 0;
    while (b) {
        if (b & 1ULL) r ^= a;
        a <<= 1;
        b >>= 1;
    }
    return r;
}

inline int gf2_degree(std::uint64_t p) {
    int d = -1;
    while (p) {
        ++d;
        p >>= 1;
    }
    return d;
}

inline std::uint64_t gf2_mod(std::uint64_t a, std::uint64_t p) {
    const int dp = gf2_degree(p);
    for (int d = gf2_degree(a); d >= dp; d = gf2_degree(a)) a ^= p << (d - dp);
    return a;
}

inline std::uint64_t gf2_mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return gf2_mod(gf2_mul(a, b), p);
}

inline std::uint64_t gf2_powmod(std::uint64_t base, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1;
    base = gf2_mod(base, p);
    while (e) {
        if (e & 1ULL) r = gf2_mulmod(r, base, p);
        base = gf2_mulmod(base, base, p);
        e >>= 1;
    }
    return r;
}

inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> f;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) {
            f.push_back(d);
            while (n % d == 0) n /= d;
        }
    if (n > 1) f.push_back(n);
    return f;
}

// true iff x has multiplicative order 2^r - 1 in GF(2)[x]/p(x), i.e. the LFSR
// with characteristic polynomial p is maximal-length
inline bool lfsr_is_maximal(std::uint64_t poly, int r) {
    const std::uint64_t n = (r == 63) ? ~0ULL : ((1ULL << r) - 1);
    if (gf2_powmod(2 /* = x */, n, poly) != 1) return false;
    for (const auto q : prime_factors(n))
        if (gf2_powmod(2, n / q, poly) == 1) return false;
    return true;
}

// ---- Gaussian tail --------------------------------------------------------

inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// ---- binary-input AWGN mutual information ----------------------------------
// X = +-1 equiprobable, Y = X + N(0, sigma^2); MI per bit via Simpson's rule:
//   C = 1 - E_{y|x=+1}[ log2(1 + exp(-2y/sigma^2)) ]
inline double biawgn_mi(double sigma) {
    const double s2 = sigma * sigma;
    const int n = 200001;  // odd
    const double lo = 1.0 - 14.0 * sigma, hi = 1.0 + 14.0 * sigma;
    const double h = (hi - lo) / (n - 1);
    auto f = [&](double y) {
        const double t = -2.0 * y / s2;
        const double lp = t > 35.0 ? t / std::log(2.0) : std::log1p(std::exp(t)) / std::log(2.0);
        const double pdf = std::exp(-(y - 1.0) * (y - 1.0) / (2.0 * s2)) / std::sqrt(2.0 * M_PI * s2);
        return pdf * lp;
    };
    double acc = f(lo) + f(hi);
    for (int i = 1; i < n - 1; ++i) acc += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return 1.0 - acc * h / 3.0;
}

}  // namespace oracles

#endif
