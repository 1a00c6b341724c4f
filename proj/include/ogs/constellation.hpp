#ifndef OGS_CONSTELLATION_HPP
#define OGS_CONSTELLATION_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "ogs/signal.hpp"

namespace ogs {

/// Bit-pair to PAM4/QPSK level index mapping.
/// Gray (default): 00->0, 01->1, 11->2, 10->3. Natural: 00->0, 01->1, 10->2, 11->3.
enum class BitLabeling { Gray, Natural };

int level_of_bits(std::uint8_t b0, std::uint8_t b1, BitLabeling labeling);
std::array<std::uint8_t, 2> bits_of_level(int level, BitLabeling labeling);

/// Four reference points of a (possibly shaped) QPSK constellation with
/// their 2-bit labels. Point i is the noiseless image of PAM4 level i.
struct ShapedConstellation {
    std::array<ComplexSample, 4> points{};
    std::array<std::array<std::uint8_t, 2>, 4> labels{};
    double peak_power_w = 0.0;  // generator metadata
    std::string mode = "unshaped";

    /// Nearest point by Euclidean distance; ties break to the lowest index.
    int nearest(ComplexSample s) const;

    /// Throws std::invalid_argument on duplicate points or non-bijective labels.
    void validate() const;
};

/// Ideal unshaped QPSK: unit points at phases {0, pi/2, pi, 3pi/2}.
ShapedConstellation unshaped_qpsk(BitLabeling labeling = BitLabeling::Gray);

}  // namespace ogs

#endif
