#include "ogs/constellation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ogs {

int level_of_bits(std::uint8_t b0, std::uint8_t b1, BitLabeling labeling) {
    const int v = (b0 << 1) | b1;
    if (labeling == BitLabeling::Natural) return v;
    switch (v) {  // Gray: 00,01,11,10 -> 0,1,2,3
        case 0b00: return 0;
        case 0b01: return 1;
        case 0b11: return 2;
        default:   return 3;  // 0b10
    }
}

std::array<std::uint8_t, 2> bits_of_level(int level, BitLabeling labeling) {
    static constexpr std::array<std::array<std::uint8_t, 2>, 4> kGray{{{0, 0}, {0, 1}, {1, 1}, {1, 0}}};
    static constexpr std::array<std::array<std::uint8_t, 2>, 4> kNatural{{{0, 0}, {0, 1}, {1, 0}, {1, 1}}};
    if (level < 0 || level > 3) throw std::invalid_argument("bits_of_level: level out of range");
    return labeling == BitLabeling::Gray ? kGray[static_cast<std::size_t>(level)]
                                         : kNatural[static_cast<std::size_t>(level)];
}

int ShapedConstellation::nearest(ComplexSample s) const {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
        const double d = std::norm(s - points[static_cast<std::size_t>(i)]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

void ShapedConstellation::validate() const {
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (points[i] == points[j])
                throw std::invalid_argument("constellation: duplicate points");
    unsigned seen = 0;
    for (const auto& l : labels) seen |= 1u << ((l[0] << 1) | l[1]);
    if (seen != 0b1111u) throw std::invalid_argument("constellation: labels are not a bijection");
}

ShapedConstellation unshaped_qpsk(BitLabeling labeling) {
    ShapedConstellation c;
    c.mode = "unshaped";
    c.points = {ComplexSample{1.0, 0.0}, ComplexSample{0.0, 1.0}, ComplexSample{-1.0, 0.0},
                ComplexSample{0.0, -1.0}};
    for (int k = 0; k < 4; ++k) c.labels[static_cast<std::size_t>(k)] = bits_of_level(k, labeling);
    return c;
}

}  // namespace ogs
