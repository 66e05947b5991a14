#pragma once

#include <span>

#include "paralab/common.hpp"

namespace paralab::fft {

/// In-place unnormalized radix-2 DFT of a power-of-two length vector:
///   sign = -1: a[k] <- sum_j a[j] e^{-2 pi i jk/N}
///   sign = +1: a[k] <- sum_j a[j] e^{+2 pi i jk/N}
void transform(std::span<complex> a, int sign);

/// Row-column transform of an n x n row-major array.
void transform_2d(std::span<complex> a, std::int64_t n, int sign);

}  // namespace paralab::fft
