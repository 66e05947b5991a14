#pragma once

#include <cstdint>
#include <random>

#include "paralab/grid.hpp"

namespace paralab {

/// Deterministic standard normal generator. mt19937_64 output is pinned by
/// the standard and Box-Muller avoids the unspecified std::normal_distribution
/// algorithm, so streams are reproducible across platforms.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

    double next();
    complex next_complex() {
        double re = next(), im = next();
        return complex(re, im);
    }

private:
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Random field with i.i.d. complex Gaussian Fourier coefficients on the
/// frequencies where band_mask is nonzero (flat spectrum inside the band).
/// band_mask is a frequency-domain function on the same grid; pass an
/// all-ones mask for a full-band field.
SampledFunction random_band_limited(const TorusGrid& grid, std::uint64_t seed,
                                    const SampledFunction& band_mask);

/// Full-band random field (every lattice frequency active).
SampledFunction random_field(const TorusGrid& grid, std::uint64_t seed);

}  // namespace paralab
