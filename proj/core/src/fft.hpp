#pragma once

#include <complex>

#include "twmg/grid.hpp"

namespace twmg::detail {

enum class FftSign { Forward = -1, Inverse = +1 };

/// In-place unnormalized DFT on a grid whose sample n sits at coordinate
/// (n - N/2) along each axis:
///   out[m] = sum_n in[n] exp(sign * 2 pi i (n - N/2)(m - N/2) / N)
/// Thread-safe; plans are cached and executed through the new-array interface.
void centered_dft(Grid2D<std::complex<double>>& data, FftSign sign);

}  // namespace twmg::detail
