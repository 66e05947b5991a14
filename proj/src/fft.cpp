#include "paralab/fft.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace paralab::fft {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

void transform(std::span<complex> a, int sign) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) throw contract_error("fft: length must be a power of two");
    if (n == 1) return;

    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    // Twiddles from direct trig calls; incremental recurrences drift too much
    // for the 1e-14 identity checks downstream.
    std::vector<complex> w(n / 2);
    const double base = double(sign) * 2.0 * std::numbers::pi / double(n);
    for (std::size_t j = 0; j < n / 2; ++j) w[j] = complex(std::cos(base * double(j)), std::sin(base * double(j)));

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t blk = 0; blk < n; blk += len) {
            for (std::size_t j = 0; j < len / 2; ++j) {
                const complex t = a[blk + j + len / 2] * w[j * stride];
                a[blk + j + len / 2] = a[blk + j] - t;
                a[blk + j] += t;
            }
        }
    }
}

void transform_2d(std::span<complex> a, std::int64_t n, int sign) {
    const std::size_t nn = std::size_t(n);
    if (a.size() != nn * nn) throw contract_error("fft: bad 2d buffer size");
    for (std::size_t r = 0; r < nn; ++r) transform(a.subspan(r * nn, nn), sign);
    std::vector<complex> col(nn);
    for (std::size_t c = 0; c < nn; ++c) {
        for (std::size_t r = 0; r < nn; ++r) col[r] = a[r * nn + c];
        transform(col, sign);
        for (std::size_t r = 0; r < nn; ++r) a[r * nn + c] = col[r];
    }
}

}  // namespace paralab::fft
