#include "paralab/random.hpp"

#include <cmath>
#include <numbers>

namespace paralab {

double GaussianSource::next() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller on [0,1) uniforms from the raw 64-bit stream.
    const double inv = 1.0 / 9007199254740992.0;  // 2^-53
    double u1 = double(rng_() >> 11) * inv;
    double u2 = double(rng_() >> 11) * inv;
    if (u1 <= 0.0) u1 = inv;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

SampledFunction random_band_limited(const TorusGrid& grid, std::uint64_t seed,
                                    const SampledFunction& band_mask) {
    if (band_mask.grid != grid || band_mask.domain != Domain::frequency)
        throw contract_error("random_band_limited: mask must be frequency-domain on the same grid");
    GaussianSource gauss(seed);
    SampledFunction coeffs(grid, Domain::frequency);
    for (std::size_t i = 0; i < coeffs.values.size(); ++i) {
        const complex z = gauss.next_complex();
        if (band_mask.values[i] != complex(0.0, 0.0)) coeffs.values[i] = z;
    }
    return fft_inverse(coeffs);
}

SampledFunction random_field(const TorusGrid& grid, std::uint64_t seed) {
    GaussianSource gauss(seed);
    SampledFunction coeffs(grid, Domain::frequency);
    for (complex& v : coeffs.values) v = gauss.next_complex();
    return fft_inverse(coeffs);
}

}  // namespace paralab
