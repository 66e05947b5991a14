#pragma once

#include <cstdint>
#include <vector>

#include "paralab/common.hpp"

namespace paralab {

enum class Domain : std::uint8_t { space = 0, frequency = 1 };

/// Uniform periodic grid on the torus [-L/2, L/2)^dims.
///
/// Sample points per axis: x_i = -L/2 + i*h with h = L/N.
/// Frequency lattice per axis: (1/L) * {-N/2, ..., N/2-1}, stored in wrapped
/// DFT order (index i maps to integer frequency i for i < N/2, i - N
/// otherwise).
class TorusGrid {
public:
    TorusGrid(int dims, std::int64_t samples_per_axis, double period);

    int dims() const { return dims_; }
    std::int64_t samples_per_axis() const { return n_; }
    double period() const { return period_; }
    double spacing() const { return period_ / double(n_); }
    double nyquist() const { return double(n_) / (2.0 * period_); }

    /// Total number of samples, N^dims.
    std::size_t size() const;
    /// Quadrature weight of one sample, h^dims.
    double cell_measure() const;

    double coord(std::int64_t i) const { return -period_ / 2.0 + double(i) * spacing(); }
    std::int64_t freq_index(std::int64_t i) const { return i < n_ / 2 ? i : i - n_; }
    double frequency(std::int64_t i) const { return double(freq_index(i)) / period_; }
    /// Storage index of the integer frequency index k in [-N/2, N/2).
    std::int64_t freq_storage(std::int64_t k) const { return k >= 0 ? k : k + n_; }

    bool operator==(const TorusGrid& o) const {
        return dims_ == o.dims_ && n_ == o.n_ && period_ == o.period_;
    }
    bool operator!=(const TorusGrid& o) const { return !(*this == o); }

private:
    int dims_;
    std::int64_t n_;
    double period_;
};

/// Complex-valued function sampled on a TorusGrid, tagged by domain.
///
/// 2D storage is row-major with axis 0 (x1) outer: index = i0*N + i1.
/// Frequency-domain values follow the convention
///   fhat(xi) = (1/L^d) * sum_x f(x) e^{-2 pi i x.xi} h^d,
/// i.e. Fourier-series coefficients: f(x) = sum_xi fhat(xi) e^{2 pi i x.xi}.
struct SampledFunction {
    TorusGrid grid;
    Domain domain = Domain::space;
    std::vector<complex> values;

    SampledFunction(const TorusGrid& g, Domain d)
        : grid(g), domain(d), values(g.size(), complex(0.0, 0.0)) {}
    SampledFunction(const TorusGrid& g, Domain d, std::vector<complex> v);

    complex& at(std::int64_t i0) { return values[std::size_t(i0)]; }
    complex& at(std::int64_t i0, std::int64_t i1) {
        return values[std::size_t(i0) * std::size_t(grid.samples_per_axis()) + std::size_t(i1)];
    }
    const complex& at(std::int64_t i0) const { return values[std::size_t(i0)]; }
    const complex& at(std::int64_t i0, std::int64_t i1) const {
        return values[std::size_t(i0) * std::size_t(grid.samples_per_axis()) + std::size_t(i1)];
    }
};

/// Forward transform (space -> frequency) in the convention above.
SampledFunction fft_forward(const SampledFunction& f);
/// Inverse transform (frequency -> space): f(x) = sum_xi fhat(xi) e^{2 pi i x.xi}.
SampledFunction fft_inverse(const SampledFunction& f);

/// L^p norm by Riemann sum, (sum |f|^p h^d)^{1/p}; max over samples for p = inf.
/// Requires p > 1 (or infinity). With allow_quasinorm, any p > 1/2 is
/// accepted using the same formula.
double lp_norm(const SampledFunction& f, const LpExponent& p, bool allow_quasinorm = false);

/// Complex scalar L^2 inner product, conjugating the second argument:
/// sum f(x) conj(g(x)) h^d.
complex inner_product(const SampledFunction& f, const SampledFunction& g);

/// Plain (unconjugated) pairing sum f(x) g(x) h^d.
complex plain_pairing(const SampledFunction& f, const SampledFunction& g);

/// Approximate cutoff chi~_I(x) = (1 + dist(x, I)/|I|)^{-exponent};
/// equals 1 on I.
struct IntervalWeight {
    double center = 0.0;
    double length = 2.0;
    int exponent = 100;
};

double cutoff_weight(const IntervalWeight& w, double x);

/// One piece of the unit-cell partition: f restricted to the half-open unit
/// cell with integer corner (n0, n1) (n1 unused for 1D grids).
struct CellPiece {
    std::int64_t n0 = 0;
    std::int64_t n1 = 0;
    SampledFunction piece;
};

/// Splits f into pieces supported on the half-open unit cells
/// [n, n+1) x [m, m+1) tiling the torus. Each sample lands in exactly one
/// cell, so the pieces sum back to f without rounding.
/// Requires the period L to be a positive integer.
std::vector<CellPiece> cell_partition(const SampledFunction& f);

/// Flat binary serialization: uint64 dims, uint64 N, double L (little
/// endian), one domain tag byte, then interleaved re/im doubles row-major.
void save_binary(const SampledFunction& f, const std::string& path);
SampledFunction load_binary(const std::string& path);

}  // namespace paralab
