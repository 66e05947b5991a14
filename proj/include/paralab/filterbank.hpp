#pragma once

#include <array>
#include <map>
#include <vector>

#include "paralab/grid.hpp"

namespace paralab {

/// C-infinity smoothstep: 0 for t <= 0, 1 for t >= 1, built from
/// g(t) = exp(-sharpness/t) on t > 0. Monotone on [0,1].
double smoothstep(double t, double sharpness = 1.0);

enum class MotherKind { phi, psi, psi_tilde_sum, psi_prime };

struct ProfileInterval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Frequency profile of one mother bump: an evaluator with declared support
/// and plateau (value is 1 on the plateau, 0 outside the support, in [0,1]
/// everywhere). All profiles here are even.
class MotherProfile {
public:
    MotherProfile(MotherKind kind, double sharpness);

    MotherKind kind() const { return kind_; }
    double operator()(double xi) const;

    const std::vector<ProfileInterval>& support() const { return support_; }
    const std::vector<ProfileInterval>& plateau() const { return plateau_; }

private:
    MotherKind kind_;
    double sharpness_;
    std::vector<ProfileInterval> support_;
    std::vector<ProfileInterval> plateau_;
};

/// The full mother set {phi, psi, psi_tilde_sum, psi_prime} sharing one
/// transition sharpness.
std::array<MotherProfile, 4> build_mother_profiles(double transition_sharpness = 1.0);

enum class MaskKind { phi, psi, phi_tilde, psi_tilde, psi_prime };

enum class BonyType { lh, hl, hh, ll };

/// Dyadic frequency masks phi_k, psi_k, phi~_k, psi~_k, psi'_k on a grid,
/// with the inhomogeneous convention psi_{-1} = phi and all sums truncated
/// at k_max.
///
/// k_max defaults to the largest k with supp psi^_k inside the Nyquist band,
/// floor(log2(3N/(16L))); construction fails if that is negative.
class FilterBank {
public:
    explicit FilterBank(const TorusGrid& grid, double transition_sharpness = 1.0);
    FilterBank(const TorusGrid& grid, int k_max, double transition_sharpness);

    const TorusGrid& grid() const { return grid_; }
    int k_min() const { return -1; }
    int k_max() const { return k_max_; }

    /// Profile value at a physical 1D frequency.
    ///   phi:       phi^(xi/2^k),   k >= 0
    ///   psi:       phi^(xi/2^{k+1}) - phi^(xi/2^k) for k >= 0; phi^(xi) at k = -1
    ///   phi_tilde: phi^(xi/2^{k-1}), k >= 1
    ///   psi_tilde: sum of psi over |k'-k| <= 1, 0 <= k' <= k_max, k >= 0
    ///   psi_prime: psi'^(xi/2^k), k >= 0
    double mask_value(MaskKind kind, int k, double xi) const;

    /// Cached per-axis mask samples on the grid's frequency lattice
    /// (wrapped storage order).
    const std::vector<double>& mask(MaskKind kind, int k) const;

    /// Convolution against the mask kernel, realized as frequency-domain
    /// multiplication along `axis`. Input and output are space-domain.
    SampledFunction lp_project(const SampledFunction& f, int k, MaskKind kind,
                               int axis = 0) const;

    /// Multiplies frequency coefficients by phi^_{k_max} per axis; the result
    /// is band-limited inside supp phi^_{k_max}, where the truncated
    /// reconstruction identities are exact.
    SampledFunction band_limit(const SampledFunction& f) const;

    /// Indicator of { |xi| < (4/3) 2^{k_max} } per axis, frequency-domain.
    SampledFunction band_indicator() const;

    /// One axis factor of the Eq-42-style splitting of the constant symbol:
    ///   lh: sum_k phi~_k(u) psi_k(v)        hl: sum_k psi_k(u) phi~_k(v)
    ///   hh: sum_k psi_k(u) psi~_k(v)        ll: phi(u)psi(v)+psi(u)phi(v)+phi(u)phi(v)
    double axis_mask_value(BonyType t, double u, double v) const;

    const MotherProfile& mother(MotherKind kind) const;

private:
    void build_masks();
    void check_kind_range(MaskKind kind, int k) const;

    TorusGrid grid_;
    int k_max_;
    std::array<MotherProfile, 4> mothers_;
    // masks_[kind][k - k_min]
    std::array<std::vector<std::vector<double>>, 5> masks_;
};

struct BonyParts {
    SampledFunction lh, hl, hh, ll;
};

/// Bony paraproduct splitting of the pointwise product f*g on a 1D grid.
/// For inputs band-limited inside supp phi^_{k_max} the four parts sum to
/// f*g up to rounding.
BonyParts bony_decompose(const FilterBank& bank, const SampledFunction& f,
                         const SampledFunction& g);

/// One of the sixteen tensor masks splitting the constant symbol 1(xi, eta):
/// value = axis factor(type1) at (xi1, eta1) times axis factor(type2) at
/// (xi2, eta2).
struct SymbolOneMask {
    const FilterBank* bank = nullptr;
    BonyType axis1 = BonyType::lh;
    BonyType axis2 = BonyType::lh;

    double operator()(double xi1, double eta1, double xi2, double eta2) const {
        return bank->axis_mask_value(axis1, xi1, eta1) * bank->axis_mask_value(axis2, xi2, eta2);
    }
};

/// All sixteen masks in row-major (axis1, axis2) order over {lh, hl, hh, ll}.
std::array<SymbolOneMask, 16> symbol_one_masks(const FilterBank& bank);

}  // namespace paralab
