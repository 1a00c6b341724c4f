#ifndef OGS_DEMAP_HPP
#define OGS_DEMAP_HPP

#include <complex>
#include <span>
#include <vector>

#include "ogs/constellation.hpp"
#include "ogs/signal.hpp"

namespace ogs {

/// Nearest constellation point per symbol, emitting its 2-bit label.
BitSequence hard_decide(std::span<const ComplexSample> symbols, const ShapedConstellation& c);

struct AffineFit {
    std::complex<double> a{1.0, 0.0};
    std::complex<double> b{0.0, 0.0};
};

/// Least-squares fit of y = a*x + b mapping pilot inputs onto paired targets.
/// Throws on a degenerate (zero-spread) pilot set.
AffineFit fit_affine(std::span<const ComplexSample> pilots,
                     std::span<const ComplexSample> targets);

/// Conventional (shaping-unaware) single-tap equalizer: pairs each pilot with
/// its nearest point of the target constellation, fits y = a*x + b, and
/// re-pairs/re-fits for a few rounds. The equalizer can only learn what its
/// own decisions tell it, exactly like a decision-directed tap.
AffineFit fit_affine_decision_directed(std::span<const ComplexSample> pilots,
                                       const ShapedConstellation& target, int rounds = 3);

std::vector<ComplexSample> apply_affine(std::span<const ComplexSample> symbols, const AffineFit& fit);

struct LinearEqResult {
    std::vector<ComplexSample> symbols;
    AffineFit fit;
};

/// The "conventional linear equalization" baseline: decision-directed affine
/// LS against ideal unshaped QPSK on the pilot segment, applied to all
/// symbols. Follow with hard_decide(unshaped_qpsk()). Needs >= 64 pilots.
LinearEqResult linear_equalize(std::span<const ComplexSample> symbols,
                               std::span<const ComplexSample> pilots);

}  // namespace ogs

#endif
