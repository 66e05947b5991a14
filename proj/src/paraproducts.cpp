#include "paralab/paraproducts.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace paralab {

namespace {

int kind_min_mask_scale(MaskKind kind) {
    return kind == MaskKind::phi_tilde ? 1 : 0;
}

int kind_max_mask_scale(const FilterBank& bank, MaskKind kind) {
    return kind == MaskKind::phi ? bank.k_max() + 1 : bank.k_max();
}

// shift of one interval length in samples; must divide the grid exactly
std::int64_t samples_per_interval(const TorusGrid& g, int k) {
    const double step = double(g.samples_per_axis()) / (g.period() * std::ldexp(1.0, k));
    const std::int64_t s = std::int64_t(std::llround(step));
    if (s < 1 || std::abs(step - double(s)) > 1e-9) return 0;
    return s;
}

}  // namespace

BumpFamily::BumpFamily(const FilterBank& bank, FamilySpec spec) : bank_(&bank), spec_(spec) {
    const TorusGrid& g2 = bank.grid();
    const TorusGrid axis(1, g2.samples_per_axis(), g2.period());
    min_scale_ = std::max(0, kind_min_mask_scale(spec.kind) - spec.scale_offset);
    max_scale_ = kind_max_mask_scale(bank, spec.kind) - spec.scale_offset;
    for (int k = min_scale_; k <= max_scale_; ++k) {
        if (samples_per_interval(axis, k) == 0) {
            max_scale_ = k - 1;
            break;
        }
        SampledFunction mask_fn(axis, Domain::frequency);
        const std::vector<double>& mask = bank.mask(spec.kind, k + spec.scale_offset);
        for (std::size_t i = 0; i < mask.size(); ++i) mask_fn.values[i] = mask[i];
        SampledFunction kernel = fft_inverse(mask_fn);
        double norm2 = 0.0;
        for (const complex& v : kernel.values) norm2 += std::norm(v);
        norm2 = std::sqrt(norm2 * axis.cell_measure());
        if (norm2 == 0.0) throw contract_error("BumpFamily: mask vanishes on this grid");
        for (complex& v : kernel.values) v /= norm2;
        kernels_[k] = std::move(kernel.values);
    }
}

std::vector<complex> BumpFamily::bump(const DyadicInterval& I) const {
    auto it = kernels_.find(I.k);
    if (it == kernels_.end())
        throw contract_error("BumpFamily: interval scale exceeds the grid resolution or mask range");
    const std::vector<complex>& kernel = it->second;
    const std::int64_t n_samples = std::int64_t(kernel.size());
    const TorusGrid axis(1, n_samples, bank_->grid().period());
    const std::int64_t per = samples_per_interval(axis, I.k);
    std::int64_t shift = (I.n * per) % n_samples;
    if (shift < 0) shift += n_samples;
    std::vector<complex> out(kernel.size());
    // phi_I(x) = const * conj(kernel(a_I - x)); the kernel is even, so this
    // is the conjugated kernel rolled to the left endpoint a_I.
    for (std::int64_t i = 0; i < n_samples; ++i) {
        std::int64_t src = (i - shift) % n_samples;
        if (src < 0) src += n_samples;
        out[std::size_t(i)] = std::conj(kernel[std::size_t(src)]);
    }
    return out;
}

Lacunarity classify_lacunarity(const BumpFamily& family) {
    const TorusGrid& g2 = family.bank().grid();
    const TorusGrid axis(1, g2.samples_per_axis(), g2.period());
    bool all_lacunary = true, all_nonlacunary = true;
    for (int k = family.min_scale(); k <= family.max_scale(); ++k) {
        for (std::int64_t n : {std::int64_t(0), std::int64_t(1), std::int64_t(-3)}) {
            const DyadicInterval I{k, n};
            SampledFunction fn(axis, Domain::space, family.bump(I));
            SampledFunction hat = fft_forward(fn);
            double peak = 0.0;
            for (const complex& v : hat.values) peak = std::max(peak, std::abs(v));
            const double floor = 1e-12 * peak;
            const double inv_len = std::ldexp(1.0, k);
            bool annulus = true, ball = true;
            for (std::int64_t s = 0; s < axis.samples_per_axis(); ++s) {
                if (std::abs(hat.at(s)) <= floor) continue;
                const double xi = std::abs(axis.frequency(s));
                if (xi > 4.0 * inv_len + 1e-9) {
                    ball = false;
                    annulus = false;
                } else if (xi < 0.25 * inv_len - 1e-9) {
                    annulus = false;
                }
            }
            all_lacunary = all_lacunary && annulus;
            all_nonlacunary = all_nonlacunary && ball;
        }
    }
    if (all_lacunary) return Lacunarity::lacunary;
    if (all_nonlacunary) return Lacunarity::nonlacunary;
    return Lacunarity::neither;
}

LocalityClass classify_rectangle(const DyadicRectangle& r) {
    auto side = [](const DyadicInterval& I) {
        // exact integer comparisons: I = 2^-k [n, n+1] against +/-5
        const std::int64_t bound = std::int64_t(5) << I.k;
        const bool inside = I.n >= -bound && I.n + 1 <= bound;
        const bool outside = I.n + 1 <= -bound || I.n >= bound;
        if (!inside && !outside)
            throw contract_error("classify_rectangle: interval straddles the 5R00 boundary");
        return inside;
    };
    const bool i_in = side(r.I), j_in = side(r.J);
    if (i_in && j_in) return LocalityClass::main;
    if (!i_in && !j_in) return LocalityClass::error;
    if (i_in) return LocalityClass::hybrid_iii;
    return LocalityClass::hybrid_iv;
}

namespace {

struct AxisData {
    // distinct intervals per family slot, bump samples keyed by (k, n)
    std::map<std::pair<int, std::int64_t>, std::vector<complex>> bumps[3];
};

std::vector<std::size_t> canonical_order(const DiscreteParaproductSpec& spec,
                                         std::vector<LocalityClass>& classes) {
    classes.resize(spec.rectangles.size());
    for (std::size_t i = 0; i < spec.rectangles.size(); ++i)
        classes[i] = classify_rectangle(spec.rectangles[i]);
    std::vector<std::size_t> order(spec.rectangles.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const DyadicRectangle& ra = spec.rectangles[a];
        const DyadicRectangle& rb = spec.rectangles[b];
        return std::tuple(int(classes[a]), ra.I.k, ra.I.n, ra.J.k, ra.J.n) <
               std::tuple(int(classes[b]), rb.I.k, rb.I.n, rb.J.k, rb.J.n);
    });
    return order;
}

}  // namespace

SampledFunction eval_discrete_paraproduct(const DiscreteParaproductSpec& spec,
                                          const FilterBank& bank, const SampledFunction& f,
                                          const SampledFunction& g,
                                          const LocalizationPartition* part) {
    const TorusGrid& grid = bank.grid();
    if (grid.dims() != 2) throw contract_error("eval_discrete_paraproduct: 2D grids only");
    if (f.grid != grid || g.grid != grid)
        throw contract_error("eval_discrete_paraproduct: grid mismatch");
    if (f.domain != Domain::space || g.domain != Domain::space)
        throw contract_error("eval_discrete_paraproduct: space-domain inputs required");
    if (spec.rectangles.size() != spec.coefficients.size())
        throw contract_error("eval_discrete_paraproduct: coefficient count mismatch");
    if (spec.localized && part == nullptr)
        throw contract_error("eval_discrete_paraproduct: localized spec needs a partition");

    const std::int64_t n = grid.samples_per_axis();
    const double h = grid.spacing();

    SampledFunction out(grid, Domain::space);
    if (spec.rectangles.empty()) return out;

    BumpFamily fam1[3] = {BumpFamily(bank, spec.families_axis1[0]),
                          BumpFamily(bank, spec.families_axis1[1]),
                          BumpFamily(bank, spec.families_axis1[2])};
    BumpFamily fam2[3] = {BumpFamily(bank, spec.families_axis2[0]),
                          BumpFamily(bank, spec.families_axis2[1]),
                          BumpFamily(bank, spec.families_axis2[2])};

    std::vector<LocalityClass> classes;
    const std::vector<std::size_t> order = canonical_order(spec, classes);

    // bump samples per distinct interval and family slot
    AxisData ax1, ax2;
    for (const DyadicRectangle& r : spec.rectangles) {
        for (int j = 0; j < 3; ++j) {
            const auto key1 = std::make_pair(r.I.k, r.I.n);
            if (!ax1.bumps[j].count(key1)) ax1.bumps[j][key1] = fam1[j].bump(r.I);
            const auto key2 = std::make_pair(r.J.k, r.J.n);
            if (!ax2.bumps[j].count(key2)) ax2.bumps[j][key2] = fam2[j].bump(r.J);
        }
    }

    // partial inner products along axis 1: A_j[I][x2] = sum_x1 fn(x1,x2) conj(bump_I(x1)) h
    auto partials = [&](const SampledFunction& fn, int slot, const AxisData& ax) {
        std::map<std::pair<int, std::int64_t>, std::vector<complex>> res;
        for (const auto& [key, bump] : ax.bumps[slot]) {
            std::vector<complex> row(std::size_t(n), complex(0.0, 0.0));
            for (std::int64_t i0 = 0; i0 < n; ++i0) {
                const complex bv = std::conj(bump[std::size_t(i0)]);
                if (bv == complex(0.0, 0.0)) continue;
                const complex* frow = &fn.values[std::size_t(i0 * n)];
                for (std::int64_t i1 = 0; i1 < n; ++i1) row[std::size_t(i1)] += bv * frow[i1];
            }
            for (complex& v : row) v *= h;
            res[key] = std::move(row);
        }
        return res;
    };
    const auto a_f = partials(f, 0, ax1);
    const auto a_g = partials(g, 1, ax1);

    // four partial fields, one per locality class, combined in fixed order
    std::array<SampledFunction, 4> parts{SampledFunction(grid, Domain::space),
                                         SampledFunction(grid, Domain::space),
                                         SampledFunction(grid, Domain::space),
                                         SampledFunction(grid, Domain::space)};

    std::size_t pos = 0;
    while (pos < order.size()) {
        // run of rectangles sharing (class, I); accumulate their x2-profiles
        const std::size_t run_class = std::size_t(classes[order[pos]]);
        const DyadicInterval run_I = spec.rectangles[order[pos]].I;
        std::vector<complex> trow(std::size_t(n), complex(0.0, 0.0));
        std::size_t end = pos;
        while (end < order.size() && std::size_t(classes[order[end]]) == run_class &&
               spec.rectangles[order[end]].I == run_I) {
            const std::size_t ri = order[end];
            const DyadicRectangle& r = spec.rectangles[ri];
            const auto key1 = std::make_pair(r.I.k, r.I.n);
            const auto key2 = std::make_pair(r.J.k, r.J.n);
            const std::vector<complex>& af_row = a_f.at(key1);
            const std::vector<complex>& ag_row = a_g.at(key1);
            const std::vector<complex>& bump_f2 = ax2.bumps[0].at(key2);
            const std::vector<complex>& bump_g2 = ax2.bumps[1].at(key2);
            complex ip_f(0.0, 0.0), ip_g(0.0, 0.0);
            for (std::int64_t i1 = 0; i1 < n; ++i1) {
                ip_f += af_row[std::size_t(i1)] * std::conj(bump_f2[std::size_t(i1)]);
                ip_g += ag_row[std::size_t(i1)] * std::conj(bump_g2[std::size_t(i1)]);
            }
            ip_f *= h;
            ip_g *= h;
            const complex coef =
                spec.coefficients[ri] / std::sqrt(r.area()) * ip_f * ip_g;
            const std::vector<complex>& bump_out2 = ax2.bumps[2].at(key2);
            for (std::int64_t i1 = 0; i1 < n; ++i1)
                trow[std::size_t(i1)] += coef * bump_out2[std::size_t(i1)];
            ++end;
        }
        const std::vector<complex>& bump_out1 = ax1.bumps[2].at(std::make_pair(run_I.k, run_I.n));
        SampledFunction& dst = parts[run_class];
        for (std::int64_t i0 = 0; i0 < n; ++i0) {
            const complex bv = bump_out1[std::size_t(i0)];
            if (bv == complex(0.0, 0.0)) continue;
            for (std::int64_t i1 = 0; i1 < n; ++i1)
                dst.at(i0, i1) += bv * trow[std::size_t(i1)];
        }
        pos = end;
    }

    // The cutoff multiplies each class partial before the final combination;
    // distributing it afterwards would break the bitwise split/unsplit
    // agreement.
    if (spec.localized) {
        const std::vector<double>& cell = part->cell_axis(0);
        for (std::size_t c = 0; c < 4; ++c)
            for (std::int64_t i0 = 0; i0 < n; ++i0)
                for (std::int64_t i1 = 0; i1 < n; ++i1)
                    parts[c].at(i0, i1) *= cell[std::size_t(i0)] * cell[std::size_t(i1)];
    }
    for (std::size_t c = 0; c < 4; ++c)
        for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += parts[c].values[i];
    return out;
}

SampledFunction eval_discrete_paraproduct_1d(const DiscreteParaproductSpec& spec,
                                             const FilterBank& bank, const SampledFunction& f,
                                             const SampledFunction& g) {
    const TorusGrid& grid = bank.grid();
    if (grid.dims() != 1) throw contract_error("eval_discrete_paraproduct_1d: 1D grids only");
    if (f.grid != grid || g.grid != grid)
        throw contract_error("eval_discrete_paraproduct_1d: grid mismatch");
    if (spec.rectangles.size() != spec.coefficients.size())
        throw contract_error("eval_discrete_paraproduct_1d: coefficient count mismatch");

    BumpFamily fam[3] = {BumpFamily(bank, spec.families_axis1[0]),
                         BumpFamily(bank, spec.families_axis1[1]),
                         BumpFamily(bank, spec.families_axis1[2])};
    SampledFunction out(grid, Domain::space);
    const std::int64_t n = grid.samples_per_axis();
    const double h = grid.spacing();
    for (std::size_t ri = 0; ri < spec.rectangles.size(); ++ri) {
        const DyadicInterval I = spec.rectangles[ri].I;
        const std::vector<complex> b1 = fam[0].bump(I);
        const std::vector<complex> b2 = fam[1].bump(I);
        const std::vector<complex> b3 = fam[2].bump(I);
        complex ip_f(0.0, 0.0), ip_g(0.0, 0.0);
        for (std::int64_t i = 0; i < n; ++i) {
            ip_f += f.at(i) * std::conj(b1[std::size_t(i)]);
            ip_g += g.at(i) * std::conj(b2[std::size_t(i)]);
        }
        ip_f *= h;
        ip_g *= h;
        const complex coef = spec.coefficients[ri] / std::sqrt(I.length()) * ip_f * ip_g;
        for (std::int64_t i = 0; i < n; ++i) out.at(i) += coef * b3[std::size_t(i)];
    }
    return out;
}

SampledFunction eval_discrete_paraproduct_n(
    const std::vector<DyadicRectangle>& rectangles, const std::vector<complex>& coefficients,
    const std::vector<FamilySpec>& families_axis1, const std::vector<FamilySpec>& families_axis2,
    const FilterBank& bank, const std::vector<const SampledFunction*>& inputs) {
    const TorusGrid& grid = bank.grid();
    const std::size_t nin = inputs.size();
    if (families_axis1.size() != nin + 1)
        throw contract_error("eval_discrete_paraproduct_n: need n+1 families per axis");
    if (grid.dims() == 2 && families_axis2.size() != nin + 1)
        throw contract_error("eval_discrete_paraproduct_n: need n+1 families per axis");
    if (rectangles.size() != coefficients.size())
        throw contract_error("eval_discrete_paraproduct_n: coefficient count mismatch");
    for (const SampledFunction* fp : inputs)
        if (fp->grid != grid) throw contract_error("eval_discrete_paraproduct_n: grid mismatch");

    std::vector<BumpFamily> fam1, fam2;
    for (const FamilySpec& fs : families_axis1) fam1.emplace_back(bank, fs);
    if (grid.dims() == 2)
        for (const FamilySpec& fs : families_axis2) fam2.emplace_back(bank, fs);

    SampledFunction out(grid, Domain::space);
    const std::int64_t n = grid.samples_per_axis();
    const double h = grid.spacing();
    const double exponent = (double(nin) - 1.0) / 2.0;

    for (std::size_t ri = 0; ri < rectangles.size(); ++ri) {
        const DyadicRectangle& r = rectangles[ri];
        const double measure =
            grid.dims() == 1 ? r.I.length() : r.area();
        complex coef = coefficients[ri] * std::pow(measure, -exponent);
        if (grid.dims() == 1) {
            for (std::size_t j = 0; j < nin; ++j) {
                const std::vector<complex> b = fam1[j].bump(r.I);
                complex ip(0.0, 0.0);
                for (std::int64_t i = 0; i < n; ++i) ip += inputs[j]->at(i) * std::conj(b[std::size_t(i)]);
                coef *= ip * h;
            }
            const std::vector<complex> b3 = fam1[nin].bump(r.I);
            for (std::int64_t i = 0; i < n; ++i) out.at(i) += coef * b3[std::size_t(i)];
        } else {
            for (std::size_t j = 0; j < nin; ++j) {
                const std::vector<complex> b1 = fam1[j].bump(r.I);
                const std::vector<complex> b2 = fam2[j].bump(r.J);
                complex ip(0.0, 0.0);
                for (std::int64_t i0 = 0; i0 < n; ++i0) {
                    const complex bv = std::conj(b1[std::size_t(i0)]);
                    if (bv == complex(0.0, 0.0)) continue;
                    complex inner(0.0, 0.0);
                    for (std::int64_t i1 = 0; i1 < n; ++i1)
                        inner += inputs[j]->at(i0, i1) * std::conj(b2[std::size_t(i1)]);
                    ip += bv * inner;
                }
                coef *= ip * h * h;
            }
            const std::vector<complex> b1 = fam1[nin].bump(r.I);
            const std::vector<complex> b2 = fam2[nin].bump(r.J);
            for (std::int64_t i0 = 0; i0 < n; ++i0) {
                if (b1[std::size_t(i0)] == complex(0.0, 0.0)) continue;
                for (std::int64_t i1 = 0; i1 < n; ++i1)
                    out.at(i0, i1) += coef * b1[std::size_t(i0)] * b2[std::size_t(i1)];
            }
        }
    }
    return out;
}

FourWaySplit split_four_terms(const DiscreteParaproductSpec& spec) {
    if (!spec.localized)
        throw contract_error("split_four_terms: spec must carry the Eq-417 localization");
    for (const DyadicRectangle& r : spec.rectangles)
        if (r.I.k < 0 || r.J.k < 0)
            throw contract_error("split_four_terms: |I|, |J| <= 1 required");

    FourWaySplit split{spec, spec, spec, spec};
    DiscreteParaproductSpec* outs[4] = {&split.main, &split.error, &split.hybrid_iii,
                                        &split.hybrid_iv};
    const char* suffix[4] = {"_main", "_error", "_hybrid_iii", "_hybrid_iv"};
    for (int c = 0; c < 4; ++c) {
        outs[c]->rectangles.clear();
        outs[c]->coefficients.clear();
        outs[c]->name = spec.name + suffix[c];
    }
    for (std::size_t i = 0; i < spec.rectangles.size(); ++i) {
        const int c = int(classify_rectangle(spec.rectangles[i]));
        outs[c]->rectangles.push_back(spec.rectangles[i]);
        outs[c]->coefficients.push_back(spec.coefficients[i]);
    }
    return split;
}

namespace {

struct AxisTypeSpec {
    FamilySpec f, g, out;
    std::vector<int> scales(const PipelineOptions& opts, const FilterBank& bank) const;
    // support pieces for the windowed scale-constant integrals
    std::vector<WindowPiece> f_window, g_window;
};

AxisTypeSpec axis_type_spec(BonyType t) {
    const double b83 = 8.0 / 3.0, b43 = 4.0 / 3.0, b23 = 2.0 / 3.0;
    AxisTypeSpec s;
    switch (t) {
        case BonyType::lh:
            s.f = {MaskKind::phi_tilde, 0};
            s.g = {MaskKind::psi, 0};
            s.out = {MaskKind::psi_prime, 0};
            s.f_window = {{-b23, b23, 0.55, 0.8, 1.2, 1.0}};
            s.g_window = {{-b83, -0.75, 0.7, 0.66, 1.0, 1.0}, {0.75, b83, 0.66, 0.9, 1.0, 1.4}};
            break;
        case BonyType::hl:
            s.f = {MaskKind::psi, 0};
            s.g = {MaskKind::phi_tilde, 0};
            s.out = {MaskKind::psi_prime, 0};
            s.f_window = {{-b83, -0.75, 0.7, 0.66, 1.0, 1.0}, {0.75, b83, 0.66, 0.9, 1.0, 1.4}};
            s.g_window = {{-b23, b23, 0.55, 0.8, 1.2, 1.0}};
            break;
        case BonyType::hh:
            s.f = {MaskKind::psi, 0};
            s.g = {MaskKind::psi_tilde, 0};
            s.out = {MaskKind::psi_prime, 0};
            s.f_window = {{-b83, -0.75, 0.7, 0.66, 1.0, 1.0}, {0.75, b83, 0.66, 0.9, 1.0, 1.4}};
            s.g_window = {{-16.0 / 3.0, -0.375, 0.8, 0.4, 1.0, 1.0}, {0.375, 16.0 / 3.0, 0.4, 0.95, 1.0, 1.3}};
            break;
        case BonyType::ll:
            s.f = {MaskKind::phi, 0};
            s.g = {MaskKind::phi, 0};
            s.out = {MaskKind::phi, 2};
            s.f_window = {{-b43, b43, 0.6, 0.85, 1.1, 1.0}};
            s.g_window = {{-b43, b43, 0.75, 0.5, 1.0, 1.3}};
            break;
    }
    return s;
}

std::vector<int> AxisTypeSpec::scales(const PipelineOptions& opts, const FilterBank& bank) const {
    std::vector<int> out;
    if (f.kind == MaskKind::phi && f.scale_offset == 0 && g.kind == MaskKind::phi) {
        out.push_back(0);  // ll axis: |I| ~ 1 only
        return out;
    }
    const int lo = (f.kind == MaskKind::phi_tilde || g.kind == MaskKind::phi_tilde) ? 1 : 0;
    int hi = std::min(opts.max_scale, bank.k_max());
    for (int k = std::max(lo, f.kind == MaskKind::phi_tilde ? 1 : lo); k <= hi; ++k) out.push_back(k);
    return out;
}

}  // namespace

DiscreteParaproductSpec paraproduct_from_pipeline(int part_index, const SymbolSpec& m0,
                                                  const FilterBank& bank,
                                                  const PipelineOptions& opts) {
    if (part_index < 1 || part_index > 16)
        throw contract_error("paraproduct_from_pipeline: part index must be in 1..16");
    if (m0.x_dependent)
        throw contract_error("paraproduct_from_pipeline: symbol must be x-independent");
    const std::array<BonyType, 4> types{BonyType::lh, BonyType::hl, BonyType::hh, BonyType::ll};
    const BonyType t1 = types[std::size_t((part_index - 1) / 4)];
    const BonyType t2 = types[std::size_t((part_index - 1) % 4)];
    const AxisTypeSpec a1 = axis_type_spec(t1), a2 = axis_type_spec(t2);

    DiscreteParaproductSpec spec;
    const char* tn[] = {"lh", "hl", "hh", "ll"};
    spec.name = std::string("pipeline_") + tn[(part_index - 1) / 4] + "_" + tn[(part_index - 1) % 4] +
                "_" + m0.name;
    spec.families_axis1 = {a1.f, a1.g, a1.out};
    spec.families_axis2 = {a2.f, a2.g, a2.out};
    spec.localized = opts.localized;

    const std::vector<int> scales1 = a1.scales(opts, bank);
    const std::vector<int> scales2 = a2.scales(opts, bank);
    if (scales1.empty() || scales2.empty())
        throw config_error("paraproduct_from_pipeline: no realizable scales on this grid");

    // scale-pair constants: windowed integrals of the rescaled symbol,
    // factored per axis for separable symbols
    const double pad = 1.0 / 8.0;
    const Window1D wf1(a1.f_window, pad), wg1(a1.g_window, pad);
    const Window1D wf2(a2.f_window, pad), wg2(a2.g_window, pad);
    const QuadratureNodes nf1 = window_quadrature_nodes(wf1, opts.resolution);
    const QuadratureNodes ng1 = window_quadrature_nodes(wg1, opts.resolution);
    const QuadratureNodes nf2 = window_quadrature_nodes(wf2, opts.resolution);
    const QuadratureNodes ng2 = window_quadrature_nodes(wg2, opts.resolution);

    std::map<std::pair<int, int>, complex> scale_const;
    for (int k1 : scales1)
        for (int k2 : scales2) {
            const double s1 = std::ldexp(1.0, k1), s2 = std::ldexp(1.0, k2);
            complex c;
            if (m0.axis_separable) {
                c = windowed_axis_transform(m0.axis_factor1, s1, nf1, ng1, 0.0, 0.0) *
                    windowed_axis_transform(m0.axis_factor2, s2, nf2, ng2, 0.0, 0.0);
            } else {
                complex acc(0.0, 0.0);
                double freq[4];
                for (std::size_t i = 0; i < nf1.t.size(); ++i) {
                    freq[0] = s1 * nf1.t[i];
                    for (std::size_t j = 0; j < ng1.t.size(); ++j) {
                        freq[1] = s1 * ng1.t[j];
                        const double w01 = nf1.w[i] * ng1.w[j];
                        for (std::size_t p = 0; p < nf2.t.size(); ++p) {
                            freq[2] = s2 * nf2.t[p];
                            complex inner(0.0, 0.0);
                            for (std::size_t q = 0; q < ng2.t.size(); ++q) {
                                freq[3] = s2 * ng2.t[q];
                                inner += ng2.w[q] * m0.eval({}, std::span<const double>(freq, 4));
                            }
                            acc += w01 * nf2.w[p] * inner;
                        }
                    }
                }
                c = acc;
            }
            scale_const[{k1, k2}] = c;
        }
    double sup = 0.0;
    for (const auto& [key, c] : scale_const) sup = std::max(sup, std::abs(c));
    if (sup == 0.0) sup = 1.0;

    const double extent = std::min(opts.position_extent, bank.grid().period() / 2.0);
    for (int k1 : scales1)
        for (int k2 : scales2) {
            const complex c = scale_const[{k1, k2}] / sup;
            const std::int64_t lo1 = -std::int64_t(std::floor(extent * std::ldexp(1.0, k1)));
            const std::int64_t hi1 = std::int64_t(std::floor(extent * std::ldexp(1.0, k1))) - 1;
            const std::int64_t lo2 = -std::int64_t(std::floor(extent * std::ldexp(1.0, k2)));
            const std::int64_t hi2 = std::int64_t(std::floor(extent * std::ldexp(1.0, k2))) - 1;
            for (std::int64_t n1 = lo1; n1 <= hi1; ++n1)
                for (std::int64_t n2 = lo2; n2 <= hi2; ++n2) {
                    spec.rectangles.push_back({{k1, n1}, {k2, n2}});
                    spec.coefficients.push_back(c);
                }
        }
    return spec;
}

namespace {

const char* kind_name(MaskKind k) {
    switch (k) {
        case MaskKind::phi: return "phi";
        case MaskKind::psi: return "psi";
        case MaskKind::phi_tilde: return "phi_tilde";
        case MaskKind::psi_tilde: return "psi_tilde";
        case MaskKind::psi_prime: return "psi_prime";
    }
    return "?";
}

MaskKind kind_from_name(const std::string& s) {
    if (s == "phi") return MaskKind::phi;
    if (s == "psi") return MaskKind::psi;
    if (s == "phi_tilde") return MaskKind::phi_tilde;
    if (s == "psi_tilde") return MaskKind::psi_tilde;
    if (s == "psi_prime") return MaskKind::psi_prime;
    throw config_error("read_spec: unknown mask kind '" + s + "'");
}

}  // namespace

void write_spec(const DiscreteParaproductSpec& spec, std::ostream& os) {
    os << "paraproduct_spec v1\n";
    os << "name " << (spec.name.empty() ? "unnamed" : spec.name) << "\n";
    for (int axis = 0; axis < 2; ++axis) {
        const auto& fams = axis == 0 ? spec.families_axis1 : spec.families_axis2;
        os << "families_axis" << (axis + 1);
        for (const FamilySpec& fs : fams) os << " " << kind_name(fs.kind) << ":" << fs.scale_offset;
        os << "\n";
    }
    os << "localized " << (spec.localized ? 1 : 0) << "\n";
    os << "rectangles " << spec.rectangles.size() << "\n";
    os.precision(17);
    for (std::size_t i = 0; i < spec.rectangles.size(); ++i) {
        const DyadicRectangle& r = spec.rectangles[i];
        os << r.I.k << " " << r.I.n << " " << r.J.k << " " << r.J.n << " "
           << spec.coefficients[i].real() << " " << spec.coefficients[i].imag() << "\n";
    }
}

DiscreteParaproductSpec read_spec(std::istream& is) {
    DiscreteParaproductSpec spec;
    std::string line;
    if (!std::getline(is, line) || line != "paraproduct_spec v1")
        throw config_error("read_spec: bad magic line");
    auto expect_key = [&](const std::string& key) {
        if (!std::getline(is, line) || line.rfind(key, 0) != 0)
            throw config_error("read_spec: expected '" + key + "' line");
        return std::istringstream(line.substr(key.size()));
    };
    {
        auto ss = expect_key("name ");
        ss >> spec.name;
    }
    for (int axis = 0; axis < 2; ++axis) {
        auto ss = expect_key("families_axis" + std::to_string(axis + 1) + " ");
        auto& fams = axis == 0 ? spec.families_axis1 : spec.families_axis2;
        for (FamilySpec& fs : fams) {
            std::string token;
            ss >> token;
            const std::size_t colon = token.find(':');
            if (colon == std::string::npos) throw config_error("read_spec: bad family token");
            fs.kind = kind_from_name(token.substr(0, colon));
            fs.scale_offset = std::stoi(token.substr(colon + 1));
        }
    }
    {
        auto ss = expect_key("localized ");
        int v = 0;
        ss >> v;
        spec.localized = v != 0;
    }
    std::size_t count = 0;
    {
        auto ss = expect_key("rectangles ");
        ss >> count;
    }
    for (std::size_t i = 0; i < count; ++i) {
        if (!std::getline(is, line)) throw config_error("read_spec: truncated rectangle list");
        std::istringstream ss(line);
        DyadicRectangle r;
        double re = 0.0, im = 0.0;
        ss >> r.I.k >> r.I.n >> r.J.k >> r.J.n >> re >> im;
        if (!ss) throw config_error("read_spec: malformed rectangle line");
        spec.rectangles.push_back(r);
        spec.coefficients.push_back(complex(re, im));
    }
    return spec;
}

}  // namespace paralab
