#include "paralab/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "paralab/filterbank.hpp"

namespace paralab {

bool class_is_homogeneous(SymbolClassKind kind) {
    return kind == SymbolClassKind::hormander_mikhlin ||
           kind == SymbolClassKind::marcinkiewicz_2param ||
           kind == SymbolClassKind::marcinkiewicz_dparam;
}

bool class_admits_x(SymbolClassKind kind) {
    return kind == SymbolClassKind::bilinear_bs0 || kind == SymbolClassKind::pseudo_biparam ||
           kind == SymbolClassKind::pseudo_dparam;
}

std::string class_name(SymbolClassKind kind) {
    switch (kind) {
        case SymbolClassKind::hormander_mikhlin: return "hormander_mikhlin";
        case SymbolClassKind::bilinear_bs0: return "bilinear_bs0";
        case SymbolClassKind::marcinkiewicz_2param: return "marcinkiewicz_2param";
        case SymbolClassKind::marcinkiewicz_dparam: return "marcinkiewicz_dparam";
        case SymbolClassKind::pseudo_biparam: return "pseudo_biparam";
        case SymbolClassKind::pseudo_dparam: return "pseudo_dparam";
        case SymbolClassKind::inhomog_biparam: return "inhomog_biparam";
    }
    return "?";
}

complex SymbolSpec::multiplier(double xi1, double eta1, double xi2, double eta2) const {
    if (x_dependent) throw contract_error("SymbolSpec::multiplier: symbol is x-dependent");
    const double freq[4] = {xi1, eta1, xi2, eta2};
    return eval({}, std::span<const double>(freq, 4));
}

namespace {

struct Stencil {
    int reach;                    // offsets -reach..reach
    std::vector<double> coeffs;   // length 2*reach+1, divided by h^order later
};

// 4th-order central difference stencils for derivative orders 0..4.
const Stencil& stencil(int order) {
    static const std::vector<Stencil> table = {
        {0, {1.0}},
        {2, {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12}},
        {2, {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12}},
        {3, {-1.0 / 8, 8.0 / 8, -13.0 / 8, 0.0, 13.0 / 8, -8.0 / 8, 1.0 / 8}},
        {3, {-1.0 / 6, 12.0 / 6, -39.0 / 6, 56.0 / 6, -39.0 / 6, 12.0 / 6, -1.0 / 6}},
    };
    return table[std::size_t(order)];
}

struct ActiveVar {
    bool is_x;
    int index;
    int order;
    double step;
};

complex tensor_fd(const SymbolSpec& s, std::vector<double>& x, std::vector<double>& freq,
                  const std::vector<ActiveVar>& active, std::size_t depth) {
    if (depth == active.size())
        return s.eval(std::span<const double>(x), std::span<const double>(freq));
    const ActiveVar& v = active[depth];
    const Stencil& st = stencil(v.order);
    double& coord = v.is_x ? x[std::size_t(v.index)] : freq[std::size_t(v.index)];
    const double base = coord;
    complex acc(0.0, 0.0);
    for (int off = -st.reach; off <= st.reach; ++off) {
        const double c = st.coeffs[std::size_t(off + st.reach)];
        if (c == 0.0) continue;
        coord = base + double(off) * v.step;
        acc += c * tensor_fd(s, x, freq, active, depth + 1);
    }
    coord = base;
    return acc / std::pow(v.step, double(v.order));
}

double block_norm(std::span<const double> freq, int block, int n) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += freq[std::size_t(block * n + j)] * freq[std::size_t(block * n + j)];
    return std::sqrt(acc);
}

double class_weight(const SymbolSpec& s, const std::vector<int>& freq_order,
                    std::span<const double> freq) {
    const int n = s.arity, d = s.params;
    int total = 0;
    for (int o : freq_order) total += o;
    switch (s.claimed.kind) {
        case SymbolClassKind::hormander_mikhlin: {
            double full = 0.0;
            for (double v : freq) full += v * v;
            return std::pow(std::sqrt(full), -double(total));
        }
        case SymbolClassKind::bilinear_bs0: {
            double sum = 1.0;
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int i = 0; i < d; ++i) acc += freq[std::size_t(i * n + j)] * freq[std::size_t(i * n + j)];
                sum += std::sqrt(acc);
            }
            return std::pow(sum, -double(total));
        }
        case SymbolClassKind::marcinkiewicz_2param:
        case SymbolClassKind::marcinkiewicz_dparam: {
            double w = 1.0;
            for (int i = 0; i < d; ++i) {
                int ti = 0;
                for (int j = 0; j < n; ++j) ti += freq_order[std::size_t(i * n + j)];
                if (ti) w *= std::pow(block_norm(freq, i, n), -double(ti));
            }
            return w;
        }
        case SymbolClassKind::pseudo_biparam:
        case SymbolClassKind::pseudo_dparam:
        case SymbolClassKind::inhomog_biparam: {
            double w = 1.0;
            for (int i = 0; i < d; ++i) {
                int ti = 0;
                for (int j = 0; j < n; ++j) ti += freq_order[std::size_t(i * n + j)];
                if (ti) w *= std::pow(1.0 + block_norm(freq, i, n), -double(ti));
            }
            return w;
        }
    }
    return 1.0;
}

// All multi-indices over `vars` variables with total order in [0, max_total].
void enumerate_indices(int vars, int max_total, std::vector<std::vector<int>>& out) {
    std::vector<int> cur(std::size_t(vars), 0);
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
        if (pos == vars) {
            out.push_back(cur);
            return;
        }
        for (int o = 0; o <= remaining; ++o) {
            cur[std::size_t(pos)] = o;
            rec(pos + 1, remaining - o);
        }
        cur[std::size_t(pos)] = 0;
    };
    rec(0, max_total);
}

}  // namespace

SymbolClassReport verify_symbol_class(const SymbolSpec& s, int sample_count, double fd_step) {
    const int n = s.arity, d = s.params;
    const int nfreq = s.freq_vars();
    const bool use_x = s.x_dependent && class_admits_x(s.claimed.kind);
    const int nx = use_x ? d : 0;

    SymbolClassReport report;
    report.constant = s.claimed.constant;
    report.step_warning = fd_step > 0.01;

    std::vector<std::vector<int>> indices;
    enumerate_indices(nx + nfreq, s.claimed.max_order, indices);

    // Sample points: log-uniform magnitudes per frequency variable,
    // uniform x in [-4, 4]; fixed seed so reports are reproducible.
    std::mt19937_64 rng(0x53594d42u);
    auto unit = [&] { return double(rng() >> 11) * (1.0 / 9007199254740992.0); };

    std::vector<std::vector<double>> xs, fs;
    for (int t = 0; t < sample_count; ++t) {
        std::vector<double> x(std::size_t(nx), 0.0);
        std::vector<double> freq(std::size_t(nfreq), 0.0);
        for (double& v : x) v = -4.0 + 8.0 * unit();
        for (double& v : freq) {
            const double mag = std::pow(10.0, -1.3 + (1.8 - (-1.3)) * unit());  // [0.05, ~63]
            v = (unit() < 0.5 ? -1.0 : 1.0) * mag;
        }
        if (class_is_homogeneous(s.claimed.kind) || s.singular_blocks) {
            bool inside_margin = false;
            for (int i = 0; i < d; ++i)
                if (block_norm(freq, i, n) < 0.25) inside_margin = true;
            if (inside_margin) {
                ++report.samples_skipped;
                continue;
            }
        }
        xs.push_back(std::move(x));
        fs.push_back(std::move(freq));
    }
    report.samples_used = int(xs.size());

    for (const auto& idx : indices) {
        MultiIndexRatio row;
        row.x_order.assign(idx.begin(), idx.begin() + nx);
        row.freq_order.assign(idx.begin() + nx, idx.end());

        for (std::size_t t = 0; t < xs.size(); ++t) {
            std::vector<double> x = xs[t], freq = fs[t];
            std::vector<ActiveVar> active;
            for (int v = 0; v < nx; ++v)
                if (idx[std::size_t(v)] > 0) active.push_back({true, v, idx[std::size_t(v)], fd_step});
            for (int v = 0; v < nfreq; ++v)
                if (idx[std::size_t(nx + v)] > 0) {
                    const double scale = 1.0 + block_norm(freq, v / n, n);
                    active.push_back({false, v, idx[std::size_t(nx + v)], fd_step * scale});
                }
            const complex der = tensor_fd(s, x, freq, active, 0);
            const double w = class_weight(s, row.freq_order, freq);
            const double ratio = std::abs(der) / w;
            if (ratio > row.max_ratio) {
                row.max_ratio = ratio;
                row.worst_point.clear();
                row.worst_point.insert(row.worst_point.end(), x.begin(), x.end());
                row.worst_point.insert(row.worst_point.end(), freq.begin(), freq.end());
            }
        }
        report.rows.push_back(std::move(row));
    }

    report.pass = true;
    for (const auto& row : report.rows) {
        if (row.max_ratio > report.constant) {
            report.pass = false;
            int total = 0;
            for (int o : row.x_order) total += o;
            for (int o : row.freq_order) total += o;
            if (report.first_failing_order < 0 || total < report.first_failing_order)
                report.first_failing_order = total;
        }
    }
    return report;
}

namespace {

double deg0_factor(double u, double v) {
    const double r2 = u * u + v * v;
    if (r2 == 0.0) return 0.0;  // singular lattice point convention
    return u * v / r2;
}

}  // namespace

std::vector<SymbolSpec> builtin_symbols() {
    std::vector<SymbolSpec> out;
    const MotherProfile phi(MotherKind::phi, 1.0);

    {
        SymbolSpec s;
        s.name = "identity";
        s.claimed = {SymbolClassKind::inhomog_biparam, 4, 1.25};
        s.eval = [](std::span<const double>, std::span<const double>) { return complex(1.0, 0.0); };
        s.axis_factor1 = [](double, double) { return 1.0; };
        s.axis_factor2 = [](double, double) { return 1.0; };
        s.axis_separable = true;
        out.push_back(s);
    }
    {
        // (xi1 eta1 / |(xi1,eta1)|^2) * (xi2 eta2 / |(xi2,eta2)|^2):
        // degree 0 homogeneous in each parameter block.
        SymbolSpec s;
        s.name = "marcinkiewicz_deg0";
        s.claimed = {SymbolClassKind::marcinkiewicz_2param, 4, 35.0};
        s.singular_blocks = true;
        s.eval = [](std::span<const double>, std::span<const double> f) {
            return complex(deg0_factor(f[0], f[1]) * deg0_factor(f[2], f[3]), 0.0);
        };
        s.axis_factor1 = deg0_factor;
        s.axis_factor2 = deg0_factor;
        s.axis_separable = true;
        out.push_back(s);
    }
    {
        // (xi1^2 - eta1^2)/|(xi1,eta1)|^2 per block: degree 0 homogeneous and
        // even, so its windowed Fourier data does not vanish identically.
        SymbolSpec s;
        s.name = "marcinkiewicz_even";
        s.claimed = {SymbolClassKind::marcinkiewicz_2param, 4, 60.0};
        s.singular_blocks = true;
        auto even_factor = [](double u, double v) {
            const double r2 = u * u + v * v;
            return r2 == 0.0 ? 0.0 : (u * u - v * v) / r2;
        };
        s.eval = [even_factor](std::span<const double>, std::span<const double> f) {
            return complex(even_factor(f[0], f[1]) * even_factor(f[2], f[3]), 0.0);
        };
        s.axis_factor1 = even_factor;
        s.axis_factor2 = even_factor;
        s.axis_separable = true;
        out.push_back(s);
    }
    {
        SymbolSpec s;
        s.name = "mikhlin_1d";
        s.arity = 2;
        s.params = 1;
        s.claimed = {SymbolClassKind::hormander_mikhlin, 4, 30.0};
        s.singular_blocks = true;
        s.eval = [](std::span<const double>, std::span<const double> f) {
            const double r = std::sqrt(f[0] * f[0] + f[1] * f[1]);
            return complex(r == 0.0 ? 0.0 : f[0] / r, 0.0);
        };
        out.push_back(s);
    }
    {
        // mikhlin_1d in the first pair, extended constantly in the second.
        SymbolSpec s;
        s.name = "mikhlin_first_pair";
        s.claimed = {SymbolClassKind::marcinkiewicz_2param, 4, 30.0};
        s.singular_blocks = true;
        s.eval = [](std::span<const double>, std::span<const double> f) {
            const double r = std::sqrt(f[0] * f[0] + f[1] * f[1]);
            return complex(r == 0.0 ? 0.0 : f[0] / r, 0.0);
        };
        s.axis_factor1 = [](double u, double v) {
            const double r = std::sqrt(u * u + v * v);
            return r == 0.0 ? 0.0 : u / r;
        };
        s.axis_factor2 = [](double, double) { return 1.0; };
        s.axis_separable = true;
        out.push_back(s);
    }
    {
        SymbolSpec s;
        s.name = "eq39_smooth";
        s.claimed = {SymbolClassKind::inhomog_biparam, 4, 80.0};
        s.eval = [](std::span<const double>, std::span<const double> f) {
            const double a = 1.0 / std::sqrt(1.0 + f[0] * f[0] + f[1] * f[1]);
            const double b = 1.0 / std::sqrt(1.0 + f[2] * f[2] + f[3] * f[3]);
            return complex(a * b, 0.0);
        };
        s.axis_factor1 = [](double u, double v) { return 1.0 / std::sqrt(1.0 + u * u + v * v); };
        s.axis_factor2 = [](double u, double v) { return 1.0 / std::sqrt(1.0 + u * u + v * v); };
        s.axis_separable = true;
        out.push_back(s);
    }
    {
        SymbolSpec s;
        s.name = "pseudo_sep";
        s.x_dependent = true;
        s.claimed = {SymbolClassKind::pseudo_biparam, 4, 7.0e5};
        // amplitude kept away from zero mean so the windowed x-transform is
        // dominated by its DC term (clean decay fits)
        s.eval = [phi](std::span<const double> x, std::span<const double> f) {
            const double theta = (0.8 + 0.6 * std::sin(x[0])) * (0.7 + 0.5 * std::cos(x[1]));
            return complex(theta * phi(f[0]) * phi(f[1]) * phi(f[2]) * phi(f[3]), 0.0);
        };
        out.push_back(s);
    }
    {
        SymbolSpec s;
        s.name = "pseudo_gauss";
        s.x_dependent = true;
        s.claimed = {SymbolClassKind::pseudo_biparam, 4, 80.0};
        s.eval = [](std::span<const double> x, std::span<const double> f) {
            const double amp = std::exp(-(x[0] * x[0] + x[1] * x[1]) / 4.0);
            const double a = 1.0 / std::sqrt(1.0 + f[0] * f[0] + f[1] * f[1]);
            const double b = 1.0 / std::sqrt(1.0 + f[2] * f[2] + f[3] * f[3]);
            return complex(amp * a * b, 0.0);
        };
        out.push_back(s);
    }
    {
        // Oscillation whose frequency-side phase varies on the block scale,
        // so x and frequency dependence cannot be factored apart.
        SymbolSpec s;
        s.name = "pseudo_nonsep";
        s.x_dependent = true;
        s.claimed = {SymbolClassKind::pseudo_biparam, 4, 30.0};
        s.eval = [](std::span<const double> x, std::span<const double> f) {
            const double r1 = 1.0 + f[0] * f[0] + f[1] * f[1];
            const double r2 = 1.0 + f[2] * f[2] + f[3] * f[3];
            const double a = 1.0 + 0.5 * std::sin(x[0]) * std::cos(0.5 * std::log(r1));
            const double b = 1.0 + 0.5 * std::sin(x[1]) * std::cos(0.5 * std::log(r2));
            return complex(a * b, 0.0);
        };
        out.push_back(s);
    }
    {
        // Bounded with decaying first derivatives, but the second derivative
        // of the chirp grows like the block norm squared.
        SymbolSpec s;
        s.name = "failing_chirp";
        s.claimed = {SymbolClassKind::inhomog_biparam, 4, 15.0};
        s.eval = [](std::span<const double>, std::span<const double> f) {
            const double rho = f[0] * f[0] + f[1] * f[1];
            return complex(std::sin(rho) / (1.0 + rho), 0.0);
        };
        out.push_back(s);
    }
    return out;
}

SymbolSpec builtin_symbol(const std::string& name) {
    for (SymbolSpec& s : builtin_symbols())
        if (s.name == name) return s;
    throw config_error("builtin_symbol: no catalog entry named '" + name + "'");
}

}  // namespace paralab
