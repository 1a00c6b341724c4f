#ifndef OGS_FFT_HPP
#define OGS_FFT_HPP

#include <complex>
#include <vector>

namespace ogs {

/// In-place iterative radix-2 FFT. Size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& x, bool inverse = false);

}  // namespace ogs

#endif
