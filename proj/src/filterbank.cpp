#include "paralab/filterbank.hpp"

#include <algorithm>
#include <cmath>

#include "paralab/fft.hpp"

namespace paralab {

double smoothstep(double t, double sharpness) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-sharpness / t);
    const double b = std::exp(-sharpness / (1.0 - t));
    return a / (a + b);
}

namespace {

// phi^: 1 on [-3/4, 3/4], smoothstep transition, 0 outside [-4/3, 4/3].
double phi_profile(double xi, double sharpness) {
    const double a = std::abs(xi);
    constexpr double plateau = 0.75, edge = 4.0 / 3.0;
    if (a <= plateau) return 1.0;
    if (a >= edge) return 0.0;
    return smoothstep((edge - a) / (edge - plateau), sharpness);
}

// psi'^: 1 on +/-[1/12, 10/3], transitions to 0 outside +/-[1/16, 4].
double psi_prime_profile(double xi, double sharpness) {
    const double a = std::abs(xi);
    constexpr double lo_edge = 1.0 / 16.0, lo_plateau = 1.0 / 12.0;
    constexpr double hi_plateau = 10.0 / 3.0, hi_edge = 4.0;
    if (a <= lo_edge || a >= hi_edge) return 0.0;
    if (a < lo_plateau) return smoothstep((a - lo_edge) / (lo_plateau - lo_edge), sharpness);
    if (a > hi_plateau) return smoothstep((hi_edge - a) / (hi_edge - hi_plateau), sharpness);
    return 1.0;
}

}  // namespace

MotherProfile::MotherProfile(MotherKind kind, double sharpness)
    : kind_(kind), sharpness_(sharpness) {
    switch (kind) {
        case MotherKind::phi:
            support_ = {{-4.0 / 3.0, 4.0 / 3.0}};
            plateau_ = {{-0.75, 0.75}};
            break;
        case MotherKind::psi:
            support_ = {{-8.0 / 3.0, -0.75}, {0.75, 8.0 / 3.0}};
            plateau_ = {{-1.5, -4.0 / 3.0}, {4.0 / 3.0, 1.5}};
            break;
        case MotherKind::psi_tilde_sum:
            // interior form psi^(2u) + psi^(u) + psi^(u/2) = phi^(u/4) - phi^(2u)
            support_ = {{-16.0 / 3.0, -0.375}, {0.375, 16.0 / 3.0}};
            plateau_ = {{-3.0, -2.0 / 3.0}, {2.0 / 3.0, 3.0}};
            break;
        case MotherKind::psi_prime:
            support_ = {{-4.0, -1.0 / 16.0}, {1.0 / 16.0, 4.0}};
            plateau_ = {{-10.0 / 3.0, -1.0 / 12.0}, {1.0 / 12.0, 10.0 / 3.0}};
            break;
    }
}

double MotherProfile::operator()(double xi) const {
    switch (kind_) {
        case MotherKind::phi:
            return phi_profile(xi, sharpness_);
        case MotherKind::psi:
            return phi_profile(xi / 2.0, sharpness_) - phi_profile(xi, sharpness_);
        case MotherKind::psi_tilde_sum:
            return phi_profile(xi / 4.0, sharpness_) - phi_profile(2.0 * xi, sharpness_);
        case MotherKind::psi_prime:
            return psi_prime_profile(xi, sharpness_);
    }
    return 0.0;
}

std::array<MotherProfile, 4> build_mother_profiles(double transition_sharpness) {
    return {MotherProfile(MotherKind::phi, transition_sharpness),
            MotherProfile(MotherKind::psi, transition_sharpness),
            MotherProfile(MotherKind::psi_tilde_sum, transition_sharpness),
            MotherProfile(MotherKind::psi_prime, transition_sharpness)};
}

namespace {

int default_k_max(const TorusGrid& grid) {
    const double nyq = grid.nyquist();
    int k = -1;
    while ((8.0 / 3.0) * std::ldexp(1.0, k + 1) <= nyq * (1.0 + 1e-12)) ++k;
    return k;
}

}  // namespace

FilterBank::FilterBank(const TorusGrid& grid, double transition_sharpness)
    : FilterBank(grid, default_k_max(grid), transition_sharpness) {}

FilterBank::FilterBank(const TorusGrid& grid, int k_max, double transition_sharpness)
    : grid_(grid), k_max_(k_max), mothers_(build_mother_profiles(transition_sharpness)) {
    if (k_max_ < 0)
        throw config_error("FilterBank: grid too coarse, no dyadic scale fits the Nyquist band");
    if ((8.0 / 3.0) * std::ldexp(1.0, k_max_) > grid.nyquist() * (1.0 + 1e-12))
        throw config_error("FilterBank: supp psi^_{k_max} does not fit inside the Nyquist band");
    build_masks();
}

const MotherProfile& FilterBank::mother(MotherKind kind) const {
    return mothers_[std::size_t(kind)];
}

double FilterBank::mask_value(MaskKind kind, int k, double xi) const {
    const MotherProfile& phi = mothers_[std::size_t(MotherKind::phi)];
    switch (kind) {
        case MaskKind::phi:
            if (k < 0) throw contract_error("mask_value: phi needs k >= 0");
            return phi(xi / std::ldexp(1.0, k));
        case MaskKind::psi:
            if (k < -1) throw contract_error("mask_value: psi needs k >= -1");
            if (k == -1) return phi(xi);
            return phi(xi / std::ldexp(1.0, k + 1)) - phi(xi / std::ldexp(1.0, k));
        case MaskKind::phi_tilde:
            if (k < 1) throw contract_error("mask_value: phi_tilde needs k >= 1");
            return phi(xi / std::ldexp(1.0, k - 1));
        case MaskKind::psi_tilde: {
            if (k < 0) throw contract_error("mask_value: psi_tilde needs k >= 0");
            double acc = 0.0;
            for (int kk = std::max(0, k - 1); kk <= std::min(k + 1, k_max_); ++kk)
                acc += mask_value(MaskKind::psi, kk, xi);
            return acc;
        }
        case MaskKind::psi_prime:
            if (k < 0) throw contract_error("mask_value: psi_prime needs k >= 0");
            return mothers_[std::size_t(MotherKind::psi_prime)](xi / std::ldexp(1.0, k));
    }
    return 0.0;
}

void FilterBank::check_kind_range(MaskKind kind, int k) const {
    const int lo = (kind == MaskKind::psi) ? -1 : (kind == MaskKind::phi_tilde ? 1 : 0);
    // supp phi^_{k_max+1} still fits the band (its edge is (4/3) 2^{k_max+1}
    // = half the psi bound), so phi gets one extra cached scale.
    const int hi = (kind == MaskKind::phi) ? k_max_ + 1 : k_max_;
    if (k < lo || k > hi) throw contract_error("FilterBank: scale k out of range for this mask kind");
}

void FilterBank::build_masks() {
    const std::int64_t n = grid_.samples_per_axis();
    for (int kd = 0; kd < 5; ++kd) {
        const MaskKind kind = MaskKind(kd);
        const int lo = (kind == MaskKind::psi) ? -1 : (kind == MaskKind::phi_tilde ? 1 : 0);
        const int hi = (kind == MaskKind::phi) ? k_max_ + 1 : k_max_;
        masks_[std::size_t(kd)].assign(std::size_t(k_max_ + 3), {});
        for (int k = lo; k <= hi; ++k) {
            std::vector<double>& m = masks_[std::size_t(kd)][std::size_t(k + 1)];
            m.resize(std::size_t(n));
            for (std::int64_t s = 0; s < n; ++s)
                m[std::size_t(s)] = mask_value(kind, k, grid_.frequency(s));
        }
    }
}

const std::vector<double>& FilterBank::mask(MaskKind kind, int k) const {
    check_kind_range(kind, k);
    return masks_[std::size_t(kind)][std::size_t(k + 1)];
}

SampledFunction FilterBank::lp_project(const SampledFunction& f, int k, MaskKind kind,
                                       int axis) const {
    if (f.grid != grid_) throw contract_error("lp_project: grid mismatch");
    if (axis < 0 || axis >= grid_.dims()) throw contract_error("lp_project: bad axis");
    check_kind_range(kind, k);
    const std::vector<double>& m = mask(kind, k);
    SampledFunction fh = fft_forward(f);
    const std::int64_t n = grid_.samples_per_axis();
    if (grid_.dims() == 1) {
        for (std::int64_t s = 0; s < n; ++s) fh.at(s) *= m[std::size_t(s)];
    } else {
        for (std::int64_t s0 = 0; s0 < n; ++s0)
            for (std::int64_t s1 = 0; s1 < n; ++s1)
                fh.at(s0, s1) *= m[std::size_t(axis == 0 ? s0 : s1)];
    }
    return fft_inverse(fh);
}

SampledFunction FilterBank::band_limit(const SampledFunction& f) const {
    const std::vector<double>& m = mask(MaskKind::phi, k_max_);
    SampledFunction fh = (f.domain == Domain::space) ? fft_forward(f) : f;
    const std::int64_t n = grid_.samples_per_axis();
    if (grid_.dims() == 1) {
        for (std::int64_t s = 0; s < n; ++s) fh.at(s) *= m[std::size_t(s)];
    } else {
        for (std::int64_t s0 = 0; s0 < n; ++s0)
            for (std::int64_t s1 = 0; s1 < n; ++s1)
                fh.at(s0, s1) *= m[std::size_t(s0)] * m[std::size_t(s1)];
    }
    return fft_inverse(fh);
}

SampledFunction FilterBank::band_indicator() const {
    const double cut = (4.0 / 3.0) * std::ldexp(1.0, k_max_);
    SampledFunction mask(grid_, Domain::frequency);
    const std::int64_t n = grid_.samples_per_axis();
    if (grid_.dims() == 1) {
        for (std::int64_t s = 0; s < n; ++s)
            if (std::abs(grid_.frequency(s)) < cut) mask.at(s) = 1.0;
    } else {
        for (std::int64_t s0 = 0; s0 < n; ++s0)
            for (std::int64_t s1 = 0; s1 < n; ++s1)
                if (std::abs(grid_.frequency(s0)) < cut && std::abs(grid_.frequency(s1)) < cut)
                    mask.at(s0, s1) = 1.0;
    }
    return mask;
}

double FilterBank::axis_mask_value(BonyType t, double u, double v) const {
    double acc = 0.0;
    switch (t) {
        case BonyType::lh:
            for (int k = 1; k <= k_max_; ++k)
                acc += mask_value(MaskKind::phi_tilde, k, u) * mask_value(MaskKind::psi, k, v);
            return acc;
        case BonyType::hl:
            for (int k = 1; k <= k_max_; ++k)
                acc += mask_value(MaskKind::psi, k, u) * mask_value(MaskKind::phi_tilde, k, v);
            return acc;
        case BonyType::hh:
            for (int k = 0; k <= k_max_; ++k)
                acc += mask_value(MaskKind::psi, k, u) * mask_value(MaskKind::psi_tilde, k, v);
            return acc;
        case BonyType::ll: {
            const double pu = mask_value(MaskKind::phi, 0, u);
            const double pv = mask_value(MaskKind::phi, 0, v);
            const double su = mask_value(MaskKind::psi, 0, u);
            const double sv = mask_value(MaskKind::psi, 0, v);
            return pu * sv + su * pv + pu * pv;
        }
    }
    return acc;
}

BonyParts bony_decompose(const FilterBank& bank, const SampledFunction& f,
                         const SampledFunction& g) {
    if (f.grid != bank.grid() || g.grid != bank.grid())
        throw contract_error("bony_decompose: grid mismatch");
    if (bank.grid().dims() != 1)
        throw contract_error("bony_decompose: 1D functions only");

    const TorusGrid& grid = bank.grid();
    auto zero = [&] { return SampledFunction(grid, Domain::space); };
    BonyParts parts{zero(), zero(), zero(), zero()};

    auto mul_into = [&](SampledFunction& dst, const SampledFunction& a, const SampledFunction& b) {
        for (std::size_t i = 0; i < dst.values.size(); ++i) dst.values[i] += a.values[i] * b.values[i];
    };

    for (int k = 1; k <= bank.k_max(); ++k) {
        mul_into(parts.lh, bank.lp_project(f, k, MaskKind::phi_tilde), bank.lp_project(g, k, MaskKind::psi));
        mul_into(parts.hl, bank.lp_project(f, k, MaskKind::psi), bank.lp_project(g, k, MaskKind::phi_tilde));
    }
    for (int k = 0; k <= bank.k_max(); ++k)
        mul_into(parts.hh, bank.lp_project(f, k, MaskKind::psi), bank.lp_project(g, k, MaskKind::psi_tilde));

    const SampledFunction f_phi = bank.lp_project(f, 0, MaskKind::phi);
    const SampledFunction g_phi = bank.lp_project(g, 0, MaskKind::phi);
    const SampledFunction f_psi = bank.lp_project(f, 0, MaskKind::psi);
    const SampledFunction g_psi = bank.lp_project(g, 0, MaskKind::psi);
    mul_into(parts.ll, f_phi, g_psi);
    mul_into(parts.ll, f_psi, g_phi);
    mul_into(parts.ll, f_phi, g_phi);
    return parts;
}

std::array<SymbolOneMask, 16> symbol_one_masks(const FilterBank& bank) {
    std::array<SymbolOneMask, 16> out;
    const std::array<BonyType, 4> types{BonyType::lh, BonyType::hl, BonyType::hh, BonyType::ll};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            out[std::size_t(i * 4 + j)] = SymbolOneMask{&bank, types[std::size_t(i)], types[std::size_t(j)]};
    return out;
}

}  // namespace paralab
