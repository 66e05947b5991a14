#pragma once

#include <array>
#include <optional>

#include "paralab/filterbank.hpp"
#include "paralab/grid.hpp"
#include "paralab/symbols.hpp"

namespace paralab {

/// Bilinear (and n-linear) multiplier evaluation
///   T(f1,...,fn)(x) = sum_{xi} m(xi) f1^(xi_1)...fn^(xi_n) e^{2 pi i x.(xi_1+...+xi_n)}
/// over the grid's frequency lattice. With the series-coefficient transform
/// convention no quadrature weight appears, so m = 1 gives the pointwise
/// product exactly.
///
/// Paths: axis-separable bi-parameter symbols use per-axis tables at any N;
/// generic bilinear symbols are tabulated on the full frequency-pair tensor,
/// which is refused (capacity_error) above `pair_tensor_budget` entries.
/// n >= 3 runs a direct tiny-size tuple enumeration under the same budget.
SampledFunction eval_multiplier(const SymbolSpec& m, const SampledFunction& f,
                                const SampledFunction& g);
SampledFunction eval_multiplier(const SymbolSpec& m,
                                const std::vector<const SampledFunction*>& inputs);

/// Entry budget for dense frequency tensors (pairs or n-tuples).
inline constexpr std::size_t pair_tensor_budget = std::size_t(1) << 26;

/// x-dependent bilinear evaluation by direct summation per output point,
///   T_a(f,g)(x) = sum_{xi,eta} a(x,xi,eta) f^(xi) g^(eta) e^{2 pi i x.(xi+eta)}.
/// Desk scale only: refuses grids where N^{3d} exceeds the budget. For
/// localized symbols the Fourier-series route through
/// restricted_symbol_coeffs covers larger grids.
SampledFunction eval_pseudodiff(const SymbolSpec& a, const SampledFunction& f,
                                const SampledFunction& g);

/// Smooth partition of unity on the torus by integer-centered cells:
/// phi'_n supported on [n-1, n+1], sum_n phi'_n = 1 exactly after
/// normalization by the (strictly positive) raw sum. The wide variants
/// phi~'_n equal 1 on [n-1, n+1] and are supported on [n-2, n+2].
class LocalizationPartition {
public:
    explicit LocalizationPartition(const TorusGrid& grid);

    const TorusGrid& grid() const { return grid_; }
    /// Integer cell centers tiling the torus (L of them).
    const std::vector<std::int64_t>& positions() const { return positions_; }

    double cell_value(std::int64_t n, double x) const;
    double wide_cell_value(std::int64_t n, double x) const;

    /// phi'_n sampled on the grid axis (axes share N and L).
    const std::vector<double>& cell_axis(std::int64_t n) const;

    /// T(f,g) * (phi'_n (x) phi''_m) for a 2D output; summing over all (n,m)
    /// returns the input.
    SampledFunction localize(const SampledFunction& t_output, std::int64_t n,
                             std::int64_t m) const;

private:
    TorusGrid grid_;
    std::vector<std::int64_t> positions_;
    std::vector<std::vector<double>> cell_samples_;  // per position
    double wrap(double t) const;
};

/// Fourier coefficients in x of the windowed symbol
///   a(x, xi, eta) phi~'_{n0}(x1) phi~''_{m0}(x2)
/// on the period-L torus: m_l(xi,eta) = sum_x a w(x) e^{-2 pi i x.l} h^2 for
/// l on the torus frequency lattice (stored by integer lattice index; the
/// physical frequency is index/L). The reconstruction
///   a w = (1/L^2) sum_l m_l e^{2 pi i x.l}
/// truncates to |l| <= l_max with error decreasing in l_max.
class RestrictedSymbolCoeffs {
public:
    /// Owns copies of the symbol and partition, so temporaries are safe.
    RestrictedSymbolCoeffs(SymbolSpec a, LocalizationPartition part, std::int64_t n0,
                           std::int64_t m0, double l_max);

    /// All lattice coefficients at fixed frequencies in one transform:
    /// result is frequency-domain over l (wrapped storage, values m_l).
    SampledFunction coeff_table(double xi1, double eta1, double xi2, double eta2) const;

    /// Single coefficient at physical frequency l = (l1, l2).
    complex coeff(double l1, double l2, double xi1, double eta1, double xi2,
                  double eta2) const;

    /// Truncated series sum_{|l|_inf <= l_max} (1/L^2) m_l e^{2 pi i x.l}
    /// at one point, for reconstruction probes.
    complex reconstruct(double x1, double x2, double xi1, double eta1, double xi2,
                        double eta2, double l_max) const;

    /// m_{l=0} as an evaluable x-independent symbol (the pipeline
    /// representative). Class Eq-39-style: inhomogeneous bi-parameter.
    SymbolSpec zero_coefficient_symbol() const;

    double l_max() const { return l_max_; }

private:
    SampledFunction windowed_slice(double xi1, double eta1, double xi2, double eta2) const;

    SymbolSpec a_;
    LocalizationPartition part_;
    std::int64_t n0_, m0_;
    double l_max_;
};

RestrictedSymbolCoeffs restricted_symbol_coeffs(const SymbolSpec& a,
                                                const LocalizationPartition& part,
                                                std::int64_t n0, std::int64_t m0,
                                                double l_max);

/// The sixteen bi-parameter paraproduct pieces of T_{m0}: part (t1,t2)
/// applies m0 times the (t1,t2) symbol-one mask. For inputs band-limited
/// inside supp phi^_{k_max} the parts sum to eval_multiplier(m0, f, g).
struct SixteenTermResult {
    std::array<SampledFunction, 16> parts;
    std::array<std::pair<BonyType, BonyType>, 16> types;
    bool inputs_band_limited = true;  // diagnostic; the identity is asserted only when true
};

SixteenTermResult sixteen_term_decomposition(const FilterBank& bank, const SymbolSpec& m0,
                                             const SampledFunction& f,
                                             const SampledFunction& g);

/// Trilinear pairing integral T(f,g)(x) h(x) dx as a Riemann sum of the
/// plain (unconjugated) product.
complex trilinear_form(const SampledFunction& t_output, const SampledFunction& h);

/// One plateau piece of a smooth window: value 1 on [lo - pad, hi + pad],
/// smoothstep transitions of width `rise` (sharpness sig_rise) on the left
/// and `fall` (sig_fall) on the right of the plateau.
struct WindowPiece {
    double lo = 0.0, hi = 0.0;
    double rise = 0.5, fall = 0.5;
    double sig_rise = 1.0, sig_fall = 1.0;
};

/// Smooth compactly supported 1D window assembled from plateau pieces.
/// Pairwise distinct edge widths keep the Fourier transform free of the
/// interference zeros an even window would have, which keeps the log-log
/// decay fits clean. Overlapping pieces merge.
class Window1D {
public:
    Window1D(std::vector<WindowPiece> pieces, double pad);

    double operator()(double t) const;

    struct Piece {
        double slo, plo, phi, shi;  // support lo, plateau lo, plateau hi, support hi
        double sig_l, sig_r;        // smoothstep sharpness per edge
    };
    const std::vector<Piece>& pieces() const { return pieces_; }

private:
    std::vector<Piece> pieces_;
};

/// Midpoint quadrature nodes over a window's support; weights fold in the
/// window value.
struct QuadratureNodes {
    std::vector<double> t;
    std::vector<double> w;
};
QuadratureNodes window_quadrature_nodes(const Window1D& w, double step);

/// sum over (u,v) node pairs of factor(scale*u, scale*v) e^{-2 pi i (p u + q v)}.
complex windowed_axis_transform(const std::function<double(double, double)>& factor,
                                double scale, const QuadratureNodes& nu,
                                const QuadratureNodes& nv, double p, double q);

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int n_lo = 2, n_hi = 16;
};

/// Least-squares fit of log10 |values[n]| against log10 n over n in
/// [n_lo, n_hi]; entries below `floor` are clamped to it.
DecayFit fit_log_decay(const std::vector<double>& values, int n_lo, int n_hi,
                       double floor = 1e-300);

/// Fourier coefficients of the rescaled windowed symbol
///   m0(2^k xi1, 2^l xi2, 2^k eta1, 2^l eta2) *
///   lambda'(xi1,eta1,gamma1) lambda''(xi2,eta2,gamma2)
/// over R^6 at integer frequencies (Fourier-transform values). The windows
/// are products of six 1D factors built from the mask supports with 1/8
/// padding, so the gamma integrals split off and the remaining 4D integral
/// is evaluated by tensor-factored quadrature (one 2D factor per axis when
/// the symbol is axis-separable).
struct CoeffTensor {
    int k = 1, l = 1;
    int n_max = 16;
    int box_max = 1;
    /// Dense box over (n1', n1'', n2', n2'', n3', n3''), each in
    /// [-box_max, box_max], row-major in that order.
    std::vector<complex> box;
    complex at(int n1p, int n1s, int n2p, int n2s, int n3p, int n3s) const;

    /// |C| along each coordinate direction, index 0..n_max; direction order
    /// (n1', n1'', n2', n2'', n3', n3'').
    std::array<std::vector<double>, 6> ray_abs;
    std::array<DecayFit, 6> ray_fits;

    complex center() const { return at(0, 0, 0, 0, 0, 0); }
};

struct CoeffTensorOptions {
    int box_max = 1;
    double base_resolution = 1.0 / 64.0;   // quadrature step, non-ray dimensions
    double ray_resolution = 1.0 / 128.0;   // quadrature step along the ray
    bool self_check = true;                // recompute center at doubled resolution
    double self_check_tol = 1e-3;
};

CoeffTensor coeff_tensor(const SymbolSpec& m0, int k, int l, int n_max,
                         const CoeffTensorOptions& opts = {});

/// The six 1D windows in variable order (xi1, eta1, gamma1, xi2, eta2,
/// gamma2) used by coeff_tensor.
std::array<Window1D, 6> coeff_tensor_windows();

}  // namespace paralab
