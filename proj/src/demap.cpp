#include "ogs/demap.hpp"

#include <cmath>
#include <stdexcept>

namespace ogs {

BitSequence hard_decide(std::span<const ComplexSample> symbols, const ShapedConstellation& c) {
    c.validate();
    BitSequence bits(2 * symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const auto& label = c.labels[static_cast<std::size_t>(c.nearest(symbols[i]))];
        bits[2 * i] = label[0];
        bits[2 * i + 1] = label[1];
    }
    return bits;
}

AffineFit fit_affine(std::span<const ComplexSample> pilots,
                     std::span<const ComplexSample> targets) {
    if (pilots.size() != targets.size() || pilots.empty())
        throw std::invalid_argument("fit_affine: pilot/target size mismatch");
    const auto n = static_cast<double>(pilots.size());
    std::complex<double> xm{0, 0}, tm{0, 0};
    for (std::size_t i = 0; i < pilots.size(); ++i) {
        xm += pilots[i];
        tm += targets[i];
    }
    xm /= n;
    tm /= n;
    std::complex<double> num{0, 0};
    double den = 0.0;
    for (std::size_t i = 0; i < pilots.size(); ++i) {
        const auto xc = pilots[i] - xm;
        num += (targets[i] - tm) * std::conj(xc);
        den += std::norm(xc);
    }
    if (den < 1e-30) throw std::invalid_argument("fit_affine: singular pilot matrix (zero spread)");
    AffineFit fit;
    fit.a = num / den;
    fit.b = tm - fit.a * xm;
    return fit;
}

AffineFit fit_affine_decision_directed(std::span<const ComplexSample> pilots,
                                       const ShapedConstellation& target, int rounds) {
    if (rounds < 1) throw std::invalid_argument("fit_affine_decision_directed: rounds must be >= 1");
    AffineFit fit;  // identity start
    std::vector<ComplexSample> paired(pilots.size());
    for (int r = 0; r < rounds; ++r) {
        for (std::size_t i = 0; i < pilots.size(); ++i) {
            const auto y = fit.a * pilots[i] + fit.b;
            paired[i] = target.points[static_cast<std::size_t>(target.nearest(y))];
        }
        fit = fit_affine(pilots, paired);
    }
    return fit;
}

std::vector<ComplexSample> apply_affine(std::span<const ComplexSample> symbols, const AffineFit& fit) {
    std::vector<ComplexSample> out(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) out[i] = fit.a * symbols[i] + fit.b;
    return out;
}

LinearEqResult linear_equalize(std::span<const ComplexSample> symbols,
                               std::span<const ComplexSample> pilots) {
    if (pilots.size() < 64) throw std::invalid_argument("linear_equalize: need at least 64 pilots");
    const auto fit = fit_affine_decision_directed(pilots, unshaped_qpsk(), 3);
    return {apply_affine(symbols, fit), fit};
}

}  // namespace ogs
