#include "paralab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace paralab {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Centered copy: index c in [0,N) holds the coefficient of integer frequency
// c - N/2. Contiguous bands make the pair loops and their bounding boxes
// unit-stride.
std::vector<complex> to_centered(const SampledFunction& freq_fn) {
    const TorusGrid& g = freq_fn.grid;
    const std::int64_t n = g.samples_per_axis();
    std::vector<complex> out(freq_fn.values.size());
    if (g.dims() == 1) {
        for (std::int64_t c = 0; c < n; ++c)
            out[std::size_t(c)] = freq_fn.values[std::size_t(g.freq_storage(c - n / 2))];
    } else {
        for (std::int64_t c0 = 0; c0 < n; ++c0) {
            const std::int64_t s0 = g.freq_storage(c0 - n / 2);
            for (std::int64_t c1 = 0; c1 < n; ++c1)
                out[std::size_t(c0 * n + c1)] =
                    freq_fn.values[std::size_t(s0 * n + g.freq_storage(c1 - n / 2))];
        }
    }
    return out;
}

struct IndexBox {
    std::int64_t lo = 0, hi = -1;  // inclusive; empty when hi < lo
    bool empty() const { return hi < lo; }
};

// Coefficients at or below box_floor (relative to the peak) are treated as
// inactive when bounding the pair loops; a transform round trip leaves
// O(1e-16) residue on exact zeros, and without the floor band-limited
// inputs would lose all sparsity. The cutoff sits far below every stated
// operator tolerance.
constexpr double box_floor_rel = 1e-15;

double peak_abs(const std::vector<complex>& v) {
    double m = 0.0;
    for (const complex& z : v) m = std::max(m, std::abs(z));
    return m;
}

IndexBox row_box(const std::vector<complex>& centered, std::int64_t n, bool rows, double floor) {
    IndexBox b{n, -1};
    for (std::int64_t i = 0; i < n; ++i) {
        bool any = false;
        for (std::int64_t j = 0; j < n; ++j) {
            const complex& v = centered[std::size_t(rows ? i * n + j : j * n + i)];
            if (std::abs(v) > floor) {
                any = true;
                break;
            }
        }
        if (any) {
            b.lo = std::min(b.lo, i);
            b.hi = std::max(b.hi, i);
        }
    }
    return b;
}

IndexBox box_1d(const std::vector<complex>& centered, double floor) {
    IndexBox b{std::int64_t(centered.size()), -1};
    for (std::int64_t i = 0; i < std::int64_t(centered.size()); ++i)
        if (std::abs(centered[std::size_t(i)]) > floor) {
            b.lo = std::min(b.lo, i);
            b.hi = std::max(b.hi, i);
        }
    return b;
}

// Fold a raw frequency sum index back onto the lattice: integer frequency
// sigma aliases to sigma mod N in [-N/2, N/2).
std::int64_t fold_storage(std::int64_t sigma, std::int64_t n) {
    std::int64_t k = sigma % n;
    if (k < -n / 2) k += n;
    if (k >= n / 2) k -= n;
    return k >= 0 ? k : k + n;
}

void check_bilinear_inputs(const SymbolSpec& m, const SampledFunction& f,
                           const SampledFunction& g) {
    if (m.x_dependent) throw contract_error("eval_multiplier: symbol must be x-independent");
    if (m.arity != 2) throw contract_error("eval_multiplier: bilinear entry point needs arity 2");
    if (f.grid != g.grid) throw contract_error("eval_multiplier: inputs on different grids");
    if (f.domain != Domain::space || g.domain != Domain::space)
        throw contract_error("eval_multiplier: inputs must be space-domain");
    if (m.params != f.grid.dims())
        throw contract_error("eval_multiplier: symbol parameter count does not match grid dims");
}

SampledFunction bilinear_2d(const SymbolSpec& m, const SampledFunction& f,
                            const SampledFunction& g) {
    const TorusGrid& grid = f.grid;
    const std::int64_t n = grid.samples_per_axis();
    const double L = grid.period();

    const std::vector<complex> fc = to_centered(fft_forward(f));
    const std::vector<complex> gc = to_centered(fft_forward(g));
    const double f_floor = box_floor_rel * peak_abs(fc), g_floor = box_floor_rel * peak_abs(gc);
    const IndexBox f0 = row_box(fc, n, true, f_floor), f1 = row_box(fc, n, false, f_floor);
    const IndexBox g0 = row_box(gc, n, true, g_floor), g1 = row_box(gc, n, false, g_floor);

    SampledFunction out_hat(grid, Domain::frequency);
    if (f0.empty() || g0.empty()) return fft_inverse(out_hat);

    auto freq_of = [&](std::int64_t c) { return double(c - n / 2) / L; };

    const std::int64_t w = 2 * n - 1;
    std::vector<complex> raw(std::size_t(w * w), complex(0.0, 0.0));

    if (m.axis_separable) {
        // Per-axis tables; the symbols carry real factors.
        std::vector<double> m1(std::size_t(n * n)), m2(std::size_t(n * n));
        for (std::int64_t a = 0; a < n; ++a)
            for (std::int64_t b = 0; b < n; ++b) {
                m1[std::size_t(a * n + b)] = m.axis_factor1(freq_of(a), freq_of(b));
                m2[std::size_t(a * n + b)] = m.axis_factor2(freq_of(a), freq_of(b));
            }
        for (std::int64_t cf0 = f0.lo; cf0 <= f0.hi; ++cf0) {
            const complex* frow = &fc[std::size_t(cf0 * n)];
            for (std::int64_t cg0 = g0.lo; cg0 <= g0.hi; ++cg0) {
                const double w1 = m1[std::size_t(cf0 * n + cg0)];
                if (w1 == 0.0) continue;
                const complex* grow = &gc[std::size_t(cg0 * n)];
                complex* srow = &raw[std::size_t((cf0 + cg0) * w)];
                for (std::int64_t cf1 = f1.lo; cf1 <= f1.hi; ++cf1) {
                    const complex a = w1 * frow[cf1];
                    if (a == complex(0.0, 0.0)) continue;
                    const double* m2row = &m2[std::size_t(cf1 * n)];
                    complex* dst = srow + cf1;
                    for (std::int64_t cg1 = g1.lo; cg1 <= g1.hi; ++cg1)
                        dst[cg1] += a * (m2row[cg1] * grow[cg1]);
                }
            }
        }
    } else {
        // Generic path, symbol evaluated on the fly inside the pair loop.
        double freq[4];
        for (std::int64_t cf0 = f0.lo; cf0 <= f0.hi; ++cf0) {
            const complex* frow = &fc[std::size_t(cf0 * n)];
            freq[0] = freq_of(cf0);
            for (std::int64_t cg0 = g0.lo; cg0 <= g0.hi; ++cg0) {
                const complex* grow = &gc[std::size_t(cg0 * n)];
                complex* srow = &raw[std::size_t((cf0 + cg0) * w)];
                freq[1] = freq_of(cg0);
                for (std::int64_t cf1 = f1.lo; cf1 <= f1.hi; ++cf1) {
                    if (frow[cf1] == complex(0.0, 0.0)) continue;
                    freq[2] = freq_of(cf1);
                    complex* dst = srow + cf1;
                    for (std::int64_t cg1 = g1.lo; cg1 <= g1.hi; ++cg1) {
                        if (grow[cg1] == complex(0.0, 0.0)) continue;
                        freq[3] = freq_of(cg1);
                        const complex mv = m.eval({}, std::span<const double>(freq, 4));
                        dst[cg1] += mv * frow[cf1] * grow[cg1];
                    }
                }
            }
        }
    }

    for (std::int64_t r0 = 0; r0 < w; ++r0) {
        const std::int64_t s0 = fold_storage(r0 - n, n);
        for (std::int64_t r1 = 0; r1 < w; ++r1) {
            const complex& v = raw[std::size_t(r0 * w + r1)];
            if (v == complex(0.0, 0.0)) continue;
            out_hat.values[std::size_t(s0 * n + fold_storage(r1 - n, n))] += v;
        }
    }
    return fft_inverse(out_hat);
}

SampledFunction bilinear_1d(const SymbolSpec& m, const SampledFunction& f,
                            const SampledFunction& g) {
    const TorusGrid& grid = f.grid;
    const std::int64_t n = grid.samples_per_axis();
    const double L = grid.period();

    const std::vector<complex> fc = to_centered(fft_forward(f));
    const std::vector<complex> gc = to_centered(fft_forward(g));
    const IndexBox fb = box_1d(fc, box_floor_rel * peak_abs(fc));
    const IndexBox gb = box_1d(gc, box_floor_rel * peak_abs(gc));

    SampledFunction out_hat(grid, Domain::frequency);
    if (fb.empty() || gb.empty()) return fft_inverse(out_hat);

    std::vector<complex> raw(std::size_t(2 * n - 1), complex(0.0, 0.0));
    double freq[2];
    for (std::int64_t cf = fb.lo; cf <= fb.hi; ++cf) {
        if (fc[std::size_t(cf)] == complex(0.0, 0.0)) continue;
        freq[0] = double(cf - n / 2) / L;
        for (std::int64_t cg = gb.lo; cg <= gb.hi; ++cg) {
            if (gc[std::size_t(cg)] == complex(0.0, 0.0)) continue;
            freq[1] = double(cg - n / 2) / L;
            const complex mv = m.eval({}, std::span<const double>(freq, 2));
            raw[std::size_t(cf + cg)] += mv * fc[std::size_t(cf)] * gc[std::size_t(cg)];
        }
    }
    for (std::int64_t r = 0; r < 2 * n - 1; ++r) {
        if (raw[std::size_t(r)] == complex(0.0, 0.0)) continue;
        out_hat.values[std::size_t(fold_storage(r - n, n))] += raw[std::size_t(r)];
    }
    return fft_inverse(out_hat);
}

}  // namespace

SampledFunction eval_multiplier(const SymbolSpec& m, const SampledFunction& f,
                                const SampledFunction& g) {
    check_bilinear_inputs(m, f, g);
    return f.grid.dims() == 2 ? bilinear_2d(m, f, g) : bilinear_1d(m, f, g);
}

SampledFunction eval_multiplier(const SymbolSpec& m,
                                const std::vector<const SampledFunction*>& inputs) {
    if (m.x_dependent) throw contract_error("eval_multiplier: symbol must be x-independent");
    if (int(inputs.size()) != m.arity)
        throw contract_error("eval_multiplier: input count must match symbol arity");
    if (inputs.empty()) throw contract_error("eval_multiplier: no inputs");
    const TorusGrid grid = inputs[0]->grid;
    for (const SampledFunction* fp : inputs) {
        if (fp->grid != grid) throw contract_error("eval_multiplier: inputs on different grids");
        if (fp->domain != Domain::space)
            throw contract_error("eval_multiplier: inputs must be space-domain");
    }
    if (m.params != grid.dims())
        throw contract_error("eval_multiplier: symbol parameter count does not match grid dims");
    if (m.arity == 2) return eval_multiplier(m, *inputs[0], *inputs[1]);

    const int nin = m.arity;
    const int d = grid.dims();
    const std::int64_t n = grid.samples_per_axis();
    const double L = grid.period();

    double tuples = 1.0;
    for (int j = 0; j < nin; ++j) tuples *= std::pow(double(n), double(d));
    if (tuples > double(pair_tensor_budget))
        throw capacity_error("eval_multiplier: n-linear frequency tensor exceeds the evaluation budget");

    std::vector<std::vector<complex>> hats;
    for (const SampledFunction* fp : inputs) hats.push_back(to_centered(fft_forward(*fp)));

    // raw sum grid: per axis, sums of nin centered offsets
    const std::int64_t w = std::int64_t(nin) * (n - 1) + 1;
    std::vector<complex> raw(std::size_t(d == 1 ? w : w * w), complex(0.0, 0.0));

    std::vector<std::int64_t> idx(std::size_t(nin * d), 0);  // centered index per (input, axis)
    std::vector<double> freq(std::size_t(nin * d), 0.0);     // parameter-major blocks

    std::function<void(int, complex)> rec = [&](int j, complex prod) {
        if (prod == complex(0.0, 0.0)) return;
        if (j == nin) {
            const complex mv = m.eval({}, std::span<const double>(freq));
            if (mv == complex(0.0, 0.0)) return;
            std::int64_t r0 = 0, r1 = 0;
            for (int jj = 0; jj < nin; ++jj) {
                r0 += idx[std::size_t(jj * d)];
                if (d == 2) r1 += idx[std::size_t(jj * d + 1)];
            }
            raw[std::size_t(d == 1 ? r0 : r0 * w + r1)] += mv * prod;
            return;
        }
        const std::vector<complex>& hat = hats[std::size_t(j)];
        if (d == 1) {
            for (std::int64_t c = 0; c < n; ++c) {
                idx[std::size_t(j)] = c;
                freq[std::size_t(j)] = double(c - n / 2) / L;  // block 0, input j
                rec(j + 1, prod * hat[std::size_t(c)]);
            }
        } else {
            for (std::int64_t c0 = 0; c0 < n; ++c0)
                for (std::int64_t c1 = 0; c1 < n; ++c1) {
                    idx[std::size_t(j * 2)] = c0;
                    idx[std::size_t(j * 2 + 1)] = c1;
                    freq[std::size_t(j)] = double(c0 - n / 2) / L;          // block 0
                    freq[std::size_t(nin + j)] = double(c1 - n / 2) / L;    // block 1
                    rec(j + 1, prod * hat[std::size_t(c0 * n + c1)]);
                }
        }
    };
    rec(0, complex(1.0, 0.0));

    SampledFunction out_hat(grid, Domain::frequency);
    const std::int64_t shift = std::int64_t(nin) * (n / 2);
    if (d == 1) {
        for (std::int64_t r = 0; r < w; ++r)
            out_hat.values[std::size_t(fold_storage(r - shift, n))] += raw[std::size_t(r)];
    } else {
        for (std::int64_t r0 = 0; r0 < w; ++r0) {
            const std::int64_t s0 = fold_storage(r0 - shift, n);
            for (std::int64_t r1 = 0; r1 < w; ++r1)
                out_hat.values[std::size_t(s0 * n + fold_storage(r1 - shift, n))] +=
                    raw[std::size_t(r0 * w + r1)];
        }
    }
    return fft_inverse(out_hat);
}

SampledFunction eval_pseudodiff(const SymbolSpec& a, const SampledFunction& f,
                                const SampledFunction& g) {
    if (!a.x_dependent) {
        // plain multiplier; keep one entry point for both
        return eval_multiplier(a, f, g);
    }
    if (a.arity != 2 || a.params != 2)
        throw contract_error("eval_pseudodiff: bilinear bi-parameter symbols only");
    if (f.grid != g.grid) throw contract_error("eval_pseudodiff: inputs on different grids");
    if (f.grid.dims() != 2) throw contract_error("eval_pseudodiff: 2D grids only");
    if (f.domain != Domain::space || g.domain != Domain::space)
        throw contract_error("eval_pseudodiff: inputs must be space-domain");

    const TorusGrid& grid = f.grid;
    const std::int64_t n = grid.samples_per_axis();
    const double L = grid.period();
    const double work = std::pow(double(n), 6.0);
    if (work > double(std::size_t(1) << 28))
        throw capacity_error(
            "eval_pseudodiff: N^6 direct sum exceeds the desk-scale budget; use the "
            "Fourier-series factorization for localized symbols");

    const std::vector<complex> fc = to_centered(fft_forward(f));
    const std::vector<complex> gc = to_centered(fft_forward(g));
    const double f_floor = box_floor_rel * peak_abs(fc), g_floor = box_floor_rel * peak_abs(gc);
    const IndexBox f0 = row_box(fc, n, true, f_floor), f1 = row_box(fc, n, false, f_floor);
    const IndexBox g0 = row_box(gc, n, true, g_floor), g1 = row_box(gc, n, false, g_floor);

    SampledFunction out(grid, Domain::space);
    if (f0.empty() || g0.empty()) return out;

    // phase tables e^{2 pi i x sigma} per axis, indexed by raw sum index
    const std::int64_t w = 2 * n - 1;
    std::vector<complex> phase(std::size_t(n * w));
    for (std::int64_t j = 0; j < n; ++j) {
        const double x = grid.coord(j);
        for (std::int64_t r = 0; r < w; ++r) {
            const double sigma = double(r - n) / L;
            phase[std::size_t(j * w + r)] =
                complex(std::cos(two_pi * x * sigma), std::sin(two_pi * x * sigma));
        }
    }

    double xv[2], freq[4];
    for (std::int64_t j0 = 0; j0 < n; ++j0) {
        xv[0] = grid.coord(j0);
        for (std::int64_t j1 = 0; j1 < n; ++j1) {
            xv[1] = grid.coord(j1);
            complex acc(0.0, 0.0);
            for (std::int64_t cf0 = f0.lo; cf0 <= f0.hi; ++cf0) {
                freq[0] = double(cf0 - n / 2) / L;
                const complex* frow = &fc[std::size_t(cf0 * n)];
                for (std::int64_t cg0 = g0.lo; cg0 <= g0.hi; ++cg0) {
                    freq[1] = double(cg0 - n / 2) / L;
                    const complex* grow = &gc[std::size_t(cg0 * n)];
                    const complex p0 = phase[std::size_t(j0 * w + cf0 + cg0)];
                    for (std::int64_t cf1 = f1.lo; cf1 <= f1.hi; ++cf1) {
                        if (frow[cf1] == complex(0.0, 0.0)) continue;
                        freq[2] = double(cf1 - n / 2) / L;
                        const complex pf = p0 * frow[cf1];
                        for (std::int64_t cg1 = g1.lo; cg1 <= g1.hi; ++cg1) {
                            if (grow[cg1] == complex(0.0, 0.0)) continue;
                            freq[3] = double(cg1 - n / 2) / L;
                            const complex av =
                                a.eval(std::span<const double>(xv, 2), std::span<const double>(freq, 4));
                            acc += av * pf * grow[cg1] * phase[std::size_t(j1 * w + cf1 + cg1)];
                        }
                    }
                }
            }
            out.at(j0, j1) = acc;
        }
    }
    return out;
}

LocalizationPartition::LocalizationPartition(const TorusGrid& grid) : grid_(grid) {
    const double L = grid.period();
    const std::int64_t Li = std::int64_t(std::llround(L));
    if (std::abs(L - double(Li)) > 1e-12 || Li < 4)
        throw config_error("LocalizationPartition: period must be an integer >= 4");
    const std::int64_t lo = std::int64_t(std::ceil(-L / 2.0));
    for (std::int64_t c = 0; c < Li; ++c) positions_.push_back(lo + c);

    const std::int64_t n = grid.samples_per_axis();
    std::vector<double> denom(std::size_t(n), 0.0);
    auto raw = [&](double t) {
        const double a = std::abs(t);
        if (a <= 0.25) return 1.0;
        if (a >= 1.0) return 0.0;
        return smoothstep((1.0 - a) / 0.75);
    };
    cell_samples_.assign(positions_.size(), std::vector<double>(std::size_t(n), 0.0));
    for (std::size_t p = 0; p < positions_.size(); ++p)
        for (std::int64_t i = 0; i < n; ++i) {
            const double v = raw(wrap(grid.coord(i) - double(positions_[p])));
            cell_samples_[p][std::size_t(i)] = v;
            denom[std::size_t(i)] += v;
        }
    for (std::size_t p = 0; p < positions_.size(); ++p)
        for (std::int64_t i = 0; i < n; ++i) cell_samples_[p][std::size_t(i)] /= denom[std::size_t(i)];
}

double LocalizationPartition::wrap(double t) const {
    const double L = grid_.period();
    t = std::fmod(t + L / 2.0, L);
    if (t < 0.0) t += L;
    return t - L / 2.0;
}

double LocalizationPartition::cell_value(std::int64_t n, double x) const {
    auto raw = [&](double t) {
        const double a = std::abs(t);
        if (a <= 0.25) return 1.0;
        if (a >= 1.0) return 0.0;
        return smoothstep((1.0 - a) / 0.75);
    };
    double denom = 0.0;
    for (std::int64_t p : positions_) denom += raw(wrap(x - double(p)));
    return raw(wrap(x - double(n))) / denom;
}

double LocalizationPartition::wide_cell_value(std::int64_t n, double x) const {
    // 1 on [-1.02, 1.01] (covering supp phi'_n), supported in [-1.82, 1.61].
    // Mismatched edge widths and sharpness keep the transform clear of
    // interference zeros at the integer frequencies the restricted-symbol
    // decay fits sample, with a near-linear log-log profile.
    const double a = wrap(x - double(n));
    if (a >= -1.02 && a <= 1.01) return 1.0;
    if (a <= -1.82 || a >= 1.61) return 0.0;
    if (a < -1.02) return smoothstep((a + 1.82) / 0.8, 2.4);
    return smoothstep((1.61 - a) / 0.6, 1.0);
}

const std::vector<double>& LocalizationPartition::cell_axis(std::int64_t n) const {
    for (std::size_t p = 0; p < positions_.size(); ++p)
        if (positions_[p] == n) return cell_samples_[p];
    throw contract_error("LocalizationPartition: position not on the torus");
}

SampledFunction LocalizationPartition::localize(const SampledFunction& t_output, std::int64_t n,
                                                std::int64_t m) const {
    if (t_output.grid != grid_ || t_output.domain != Domain::space)
        throw contract_error("localize: output must be space-domain on the partition grid");
    if (grid_.dims() != 2) throw contract_error("localize: 2D outputs only");
    const std::vector<double>& cn = cell_axis(n);
    const std::vector<double>& cm = cell_axis(m);
    SampledFunction out(grid_, Domain::space);
    const std::int64_t nn = grid_.samples_per_axis();
    for (std::int64_t i0 = 0; i0 < nn; ++i0)
        for (std::int64_t i1 = 0; i1 < nn; ++i1)
            out.at(i0, i1) = t_output.at(i0, i1) * cn[std::size_t(i0)] * cm[std::size_t(i1)];
    return out;
}

RestrictedSymbolCoeffs::RestrictedSymbolCoeffs(SymbolSpec a, LocalizationPartition part,
                                               std::int64_t n0, std::int64_t m0, double l_max)
    : a_(std::move(a)), part_(std::move(part)), n0_(n0), m0_(m0), l_max_(l_max) {
    // x-independent symbols are legal input; the coefficients then factor as
    // m(xi,eta) times the window transform.
    if (a_.arity != 2 || a_.params != 2)
        throw contract_error("restricted_symbol_coeffs: bilinear bi-parameter symbols only");
    if (part_.grid().dims() != 2)
        throw contract_error("restricted_symbol_coeffs: 2D partition grid required");
    if (part_.grid().period() < 8.0)
        throw config_error("restricted_symbol_coeffs: period >= 8 required so the wide window fits");
}

SampledFunction RestrictedSymbolCoeffs::windowed_slice(double xi1, double eta1, double xi2,
                                                       double eta2) const {
    const TorusGrid& g = part_.grid();
    const std::int64_t n = g.samples_per_axis();
    SampledFunction slice(g, Domain::space);
    const double freq[4] = {xi1, eta1, xi2, eta2};
    std::vector<double> w1(static_cast<std::size_t>(n), 0.0);
    std::vector<double> w2(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
        w1[std::size_t(i)] = part_.wide_cell_value(n0_, g.coord(i));
        w2[std::size_t(i)] = part_.wide_cell_value(m0_, g.coord(i));
    }
    double xv[2];
    for (std::int64_t i0 = 0; i0 < n; ++i0) {
        if (w1[std::size_t(i0)] == 0.0) continue;
        xv[0] = g.coord(i0);
        for (std::int64_t i1 = 0; i1 < n; ++i1) {
            if (w2[std::size_t(i1)] == 0.0) continue;
            xv[1] = g.coord(i1);
                const complex av = a_.x_dependent
                                   ? a_.eval(std::span<const double>(xv, 2), std::span<const double>(freq, 4))
                                   : a_.eval({}, std::span<const double>(freq, 4));
            slice.at(i0, i1) = av * (w1[std::size_t(i0)] * w2[std::size_t(i1)]);
        }
    }
    return slice;
}

SampledFunction RestrictedSymbolCoeffs::coeff_table(double xi1, double eta1, double xi2,
                                                    double eta2) const {
    SampledFunction table = fft_forward(windowed_slice(xi1, eta1, xi2, eta2));
    const double L2 = part_.grid().period() * part_.grid().period();
    for (complex& v : table.values) v *= L2;  // m_l = L^2 * series coefficient
    return table;
}

complex RestrictedSymbolCoeffs::coeff(double l1, double l2, double xi1, double eta1, double xi2,
                                      double eta2) const {
    const TorusGrid& g = part_.grid();
    const double L = g.period();
    const std::int64_t k1 = std::int64_t(std::llround(l1 * L));
    const std::int64_t k2 = std::int64_t(std::llround(l2 * L));
    if (std::abs(l1 * L - double(k1)) > 1e-9 || std::abs(l2 * L - double(k2)) > 1e-9)
        throw contract_error("restricted_symbol_coeffs: l must lie on the torus frequency lattice");
    const std::int64_t n = g.samples_per_axis();
    if (k1 < -n / 2 || k1 >= n / 2 || k2 < -n / 2 || k2 >= n / 2)
        throw contract_error("restricted_symbol_coeffs: l outside the lattice");
    SampledFunction table = coeff_table(xi1, eta1, xi2, eta2);
    return table.values[std::size_t(g.freq_storage(k1) * n + g.freq_storage(k2))];
}

complex RestrictedSymbolCoeffs::reconstruct(double x1, double x2, double xi1, double eta1,
                                            double xi2, double eta2, double l_max) const {
    const TorusGrid& g = part_.grid();
    const double L = g.period();
    const std::int64_t n = g.samples_per_axis();
    SampledFunction table = coeff_table(xi1, eta1, xi2, eta2);
    const std::int64_t kmax = std::min<std::int64_t>(n / 2 - 1, std::int64_t(std::floor(l_max * L)));
    complex acc(0.0, 0.0);
    for (std::int64_t k1 = -kmax; k1 <= kmax; ++k1)
        for (std::int64_t k2 = -kmax; k2 <= kmax; ++k2) {
            const complex ml = table.values[std::size_t(g.freq_storage(k1) * n + g.freq_storage(k2))];
            const double ph = two_pi * (x1 * double(k1) + x2 * double(k2)) / L;
            acc += ml * complex(std::cos(ph), std::sin(ph));
        }
    return acc / (L * L);
}

SymbolSpec RestrictedSymbolCoeffs::zero_coefficient_symbol() const {
    SymbolSpec s;
    s.name = a_.name + "_l0";
    s.arity = 2;
    s.params = 2;
    s.x_dependent = false;
    s.claimed = {SymbolClassKind::inhomog_biparam, 4, a_.claimed.constant};
    const RestrictedSymbolCoeffs self = *this;
    s.eval = [self](std::span<const double>, std::span<const double> f) {
        SampledFunction slice = self.windowed_slice(f[0], f[1], f[2], f[3]);
        complex acc(0.0, 0.0);
        for (const complex& v : slice.values) acc += v;
        return acc * slice.grid.cell_measure();
    };
    return s;
}

RestrictedSymbolCoeffs restricted_symbol_coeffs(const SymbolSpec& a,
                                                const LocalizationPartition& part,
                                                std::int64_t n0, std::int64_t m0, double l_max) {
    return RestrictedSymbolCoeffs(a, part, n0, m0, l_max);
}

SixteenTermResult sixteen_term_decomposition(const FilterBank& bank, const SymbolSpec& m0,
                                             const SampledFunction& f, const SampledFunction& g) {
    if (m0.x_dependent)
        throw contract_error("sixteen_term_decomposition: symbol must be x-independent");
    if (f.grid != bank.grid() || g.grid != bank.grid())
        throw contract_error("sixteen_term_decomposition: grid mismatch");
    if (bank.grid().dims() != 2)
        throw contract_error("sixteen_term_decomposition: 2D grids only");

    SixteenTermResult result{.parts = {SampledFunction(f.grid, Domain::space),
                                       SampledFunction(f.grid, Domain::space),
                                       SampledFunction(f.grid, Domain::space),
                                       SampledFunction(f.grid, Domain::space),
                                       SampledFunction(f.grid, Domain::space),
                                       SampledFunction(f.grid, Domain::space),
                                       SampledFunction(f.grid, Domain::space),
                                       SampledFunction(f.grid, Domain::space),
                                       SampledFunction(f.grid, Domain::space),
                                       SampledFunction(f.grid, Domain::space),
                                       SampledFunction(f.grid, Domain::space),
                                       SampledFunction(f.grid, Domain::space),
                                       SampledFunction(f.grid, Domain::space),
                                       SampledFunction(f.grid, Domain::space),
                                       SampledFunction(f.grid, Domain::space),
                                       SampledFunction(f.grid, Domain::space)},
                             .types = {},
                             .inputs_band_limited = true};

    // band-limitation diagnostic: spectral mass outside supp phi^_{k_max}
    const double cut = (4.0 / 3.0) * std::ldexp(1.0, bank.k_max());
    for (const SampledFunction* fp : {&f, &g}) {
        SampledFunction hat = fft_forward(*fp);
        const TorusGrid& grid = hat.grid;
        double inside = 0.0, outside = 0.0;
        const std::int64_t n = grid.samples_per_axis();
        for (std::int64_t s0 = 0; s0 < n; ++s0)
            for (std::int64_t s1 = 0; s1 < n; ++s1) {
                const double mag = std::abs(hat.at(s0, s1));
                if (std::abs(grid.frequency(s0)) >= cut || std::abs(grid.frequency(s1)) >= cut)
                    outside = std::max(outside, mag);
                else
                    inside = std::max(inside, mag);
            }
        if (outside > 1e-12 * std::max(inside, 1e-300)) result.inputs_band_limited = false;
    }

    const std::array<BonyType, 4> types{BonyType::lh, BonyType::hl, BonyType::hh, BonyType::ll};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const BonyType t1 = types[std::size_t(i)], t2 = types[std::size_t(j)];
            SymbolSpec part;
            part.name = m0.name + "_part";
            part.arity = 2;
            part.params = 2;
            if (m0.axis_separable) {
                const FilterBank* bp = &bank;
                auto a1 = m0.axis_factor1, a2 = m0.axis_factor2;
                part.axis_factor1 = [bp, t1, a1](double u, double v) {
                    return a1(u, v) * bp->axis_mask_value(t1, u, v);
                };
                part.axis_factor2 = [bp, t2, a2](double u, double v) {
                    return a2(u, v) * bp->axis_mask_value(t2, u, v);
                };
                part.axis_separable = true;
                part.eval = [part_a1 = part.axis_factor1, part_a2 = part.axis_factor2](
                                std::span<const double>, std::span<const double> fr) {
                    return complex(part_a1(fr[0], fr[1]) * part_a2(fr[2], fr[3]), 0.0);
                };
            } else {
                const FilterBank* bp = &bank;
                auto base = m0.eval;
                part.eval = [bp, t1, t2, base](std::span<const double> x,
                                               std::span<const double> fr) {
                    return base(x, fr) * bp->axis_mask_value(t1, fr[0], fr[1]) *
                           bp->axis_mask_value(t2, fr[2], fr[3]);
                };
            }
            result.types[std::size_t(i * 4 + j)] = {t1, t2};
            result.parts[std::size_t(i * 4 + j)] = eval_multiplier(part, f, g);
        }
    return result;
}

complex trilinear_form(const SampledFunction& t_output, const SampledFunction& h) {
    if (t_output.domain != Domain::space || h.domain != Domain::space)
        throw contract_error("trilinear_form: space-domain inputs required");
    return plain_pairing(t_output, h);
}

}  // namespace paralab
