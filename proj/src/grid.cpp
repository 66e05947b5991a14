#include "paralab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "paralab/fft.hpp"

namespace paralab {

namespace {

bool is_pow2(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

// (-1)^(sum of storage indices); equals e^{+/- pi i k} for the centered
// origin since N is even.
inline double parity(std::int64_t s) { return (s & 1) ? -1.0 : 1.0; }

}  // namespace

TorusGrid::TorusGrid(int dims, std::int64_t samples_per_axis, double period)
    : dims_(dims), n_(samples_per_axis), period_(period) {
    if (dims != 1 && dims != 2) throw config_error("TorusGrid: dims must be 1 or 2");
    if (!is_pow2(n_) || n_ < 8) throw config_error("TorusGrid: N must be a power of two >= 8");
    if (!(period_ > 0.0)) throw config_error("TorusGrid: period must be positive");
}

std::size_t TorusGrid::size() const {
    std::size_t s = std::size_t(n_);
    return dims_ == 1 ? s : s * s;
}

double TorusGrid::cell_measure() const {
    double h = spacing();
    return dims_ == 1 ? h : h * h;
}

SampledFunction::SampledFunction(const TorusGrid& g, Domain d, std::vector<complex> v)
    : grid(g), domain(d), values(std::move(v)) {
    if (values.size() != grid.size())
        throw contract_error("SampledFunction: values length must equal N^dims");
}

SampledFunction fft_forward(const SampledFunction& f) {
    if (f.domain != Domain::space)
        throw contract_error("fft_forward: input must be space-domain");
    const TorusGrid& g = f.grid;
    SampledFunction out(g, Domain::frequency, f.values);
    const std::int64_t n = g.samples_per_axis();
    if (g.dims() == 1) {
        fft::transform(out.values, -1);
        const double scale = 1.0 / double(n);
        for (std::int64_t s = 0; s < n; ++s) out.values[std::size_t(s)] *= parity(s) * scale;
    } else {
        fft::transform_2d(out.values, n, -1);
        const double scale = 1.0 / (double(n) * double(n));
        for (std::int64_t s0 = 0; s0 < n; ++s0)
            for (std::int64_t s1 = 0; s1 < n; ++s1)
                out.at(s0, s1) *= parity(s0 + s1) * scale;
    }
    return out;
}

SampledFunction fft_inverse(const SampledFunction& f) {
    if (f.domain != Domain::frequency)
        throw contract_error("fft_inverse: input must be frequency-domain");
    const TorusGrid& g = f.grid;
    SampledFunction out(g, Domain::space, f.values);
    const std::int64_t n = g.samples_per_axis();
    if (g.dims() == 1) {
        for (std::int64_t s = 0; s < n; ++s) out.values[std::size_t(s)] *= parity(s);
        fft::transform(out.values, +1);
    } else {
        for (std::int64_t s0 = 0; s0 < n; ++s0)
            for (std::int64_t s1 = 0; s1 < n; ++s1)
                out.at(s0, s1) *= parity(s0 + s1);
        fft::transform_2d(out.values, n, +1);
    }
    return out;
}

double lp_norm(const SampledFunction& f, const LpExponent& p, bool allow_quasinorm) {
    if (f.domain != Domain::space)
        throw contract_error("lp_norm: input must be space-domain");
    if (p.is_infinite()) {
        double m = 0.0;
        for (const complex& v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    const double pv = p.value();
    if (allow_quasinorm) {
        if (!(pv > 0.5)) throw contract_error("lp_norm: quasinorm exponent must exceed 1/2");
    } else if (!(pv > 1.0)) {
        throw contract_error("lp_norm: exponent must exceed 1 (use the quasinorm flag for r <= 1)");
    }
    double acc = 0.0;
    if (pv == 1.0) {
        for (const complex& v : f.values) acc += std::abs(v);
    } else if (pv == 2.0) {
        for (const complex& v : f.values) acc += std::norm(v);
    } else if (pv == 4.0) {
        for (const complex& v : f.values) acc += std::norm(v) * std::norm(v);
    } else {
        for (const complex& v : f.values) acc += std::pow(std::abs(v), pv);
    }
    return std::pow(acc * f.grid.cell_measure(), 1.0 / pv);
}

complex inner_product(const SampledFunction& f, const SampledFunction& g) {
    if (f.grid != g.grid || f.domain != g.domain)
        throw contract_error("inner_product: grid/domain mismatch");
    complex acc(0.0, 0.0);
    for (std::size_t i = 0; i < f.values.size(); ++i) acc += f.values[i] * std::conj(g.values[i]);
    return acc * f.grid.cell_measure();
}

complex plain_pairing(const SampledFunction& f, const SampledFunction& g) {
    if (f.grid != g.grid || f.domain != g.domain)
        throw contract_error("plain_pairing: grid/domain mismatch");
    complex acc(0.0, 0.0);
    for (std::size_t i = 0; i < f.values.size(); ++i) acc += f.values[i] * g.values[i];
    return acc * f.grid.cell_measure();
}

double cutoff_weight(const IntervalWeight& w, double x) {
    if (!(w.length > 0.0)) throw contract_error("cutoff_weight: interval length must be positive");
    const double dist = std::max(0.0, std::abs(x - w.center) - w.length / 2.0);
    return std::pow(1.0 + dist / w.length, -double(w.exponent));
}

std::vector<CellPiece> cell_partition(const SampledFunction& f) {
    if (f.domain != Domain::space)
        throw contract_error("cell_partition: input must be space-domain");
    const TorusGrid& g = f.grid;
    const double L = g.period();
    const std::int64_t Li = std::int64_t(std::llround(L));
    if (!(Li >= 1) || std::abs(L - double(Li)) > 1e-12)
        throw config_error("cell_partition: period must be a positive integer");

    const std::int64_t lo = std::int64_t(std::ceil(-L / 2.0));
    auto cell_of = [&](double x) {
        std::int64_t n = std::int64_t(std::floor(x));
        std::int64_t r = (n - lo) % Li;
        if (r < 0) r += Li;
        return lo + r;
    };

    const std::int64_t n = g.samples_per_axis();
    std::vector<CellPiece> pieces;
    if (g.dims() == 1) {
        pieces.reserve(std::size_t(Li));
        for (std::int64_t c = 0; c < Li; ++c)
            pieces.push_back({lo + c, 0, SampledFunction(g, Domain::space)});
        for (std::int64_t i = 0; i < n; ++i) {
            const std::int64_t c = cell_of(g.coord(i)) - lo;
            pieces[std::size_t(c)].piece.at(i) = f.at(i);
        }
    } else {
        pieces.reserve(std::size_t(Li * Li));
        for (std::int64_t c0 = 0; c0 < Li; ++c0)
            for (std::int64_t c1 = 0; c1 < Li; ++c1)
                pieces.push_back({lo + c0, lo + c1, SampledFunction(g, Domain::space)});
        std::vector<std::int64_t> cell_idx(static_cast<std::size_t>(n), 0);
        for (std::int64_t i = 0; i < n; ++i) cell_idx[std::size_t(i)] = cell_of(g.coord(i)) - lo;
        for (std::int64_t i0 = 0; i0 < n; ++i0)
            for (std::int64_t i1 = 0; i1 < n; ++i1) {
                const std::size_t c = std::size_t(cell_idx[std::size_t(i0)] * Li + cell_idx[std::size_t(i1)]);
                pieces[c].piece.at(i0, i1) = f.at(i0, i1);
            }
    }
    return pieces;
}

void save_binary(const SampledFunction& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw config_error("save_binary: cannot open " + path);
    const std::uint64_t dims = std::uint64_t(f.grid.dims());
    const std::uint64_t n = std::uint64_t(f.grid.samples_per_axis());
    const double L = f.grid.period();
    const std::uint8_t tag = std::uint8_t(f.domain);
    os.write(reinterpret_cast<const char*>(&dims), 8);
    os.write(reinterpret_cast<const char*>(&n), 8);
    os.write(reinterpret_cast<const char*>(&L), 8);
    os.write(reinterpret_cast<const char*>(&tag), 1);
    for (const complex& v : f.values) {
        const double re = v.real(), im = v.imag();
        os.write(reinterpret_cast<const char*>(&re), 8);
        os.write(reinterpret_cast<const char*>(&im), 8);
    }
    if (!os) throw config_error("save_binary: write failed for " + path);
}

SampledFunction load_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw config_error("load_binary: cannot open " + path);
    std::uint64_t dims = 0, n = 0;
    double L = 0.0;
    std::uint8_t tag = 0;
    is.read(reinterpret_cast<char*>(&dims), 8);
    is.read(reinterpret_cast<char*>(&n), 8);
    is.read(reinterpret_cast<char*>(&L), 8);
    is.read(reinterpret_cast<char*>(&tag), 1);
    if (!is || tag > 1) throw config_error("load_binary: malformed header in " + path);
    TorusGrid g(int(dims), std::int64_t(n), L);
    SampledFunction f(g, Domain(tag));
    for (complex& v : f.values) {
        double re = 0.0, im = 0.0;
        is.read(reinterpret_cast<char*>(&re), 8);
        is.read(reinterpret_cast<char*>(&im), 8);
        v = complex(re, im);
    }
    if (!is) throw config_error("load_binary: truncated payload in " + path);
    return f;
}

std::string LpExponent::str() const {
    if (inf_) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", value_);
    return buf;
}

}  // namespace paralab
