#include "paralab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "paralab/operators.hpp"

namespace paralab {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_exponent(const LpExponent& p) { return p.str(); }

}  // namespace

ExponentTriple make_triple(const LpExponent& p, const LpExponent& q) {
    auto check_exponent = [](const LpExponent& e) {
        if (!e.is_infinite() && !(e.value() > 1.0))
            throw config_error("exponent triple: p, q must exceed 1 (or be inf)");
    };
    check_exponent(p);
    check_exponent(q);
    const double inv = p.reciprocal() + q.reciprocal();
    if (!(inv > 0.0)) throw config_error("exponent triple: 1/p + 1/q must be positive");
    ExponentTriple t{p, q, 1.0 / inv};
    if (!(t.r > 0.5)) throw config_error("exponent triple: r must exceed 1/2");
    if (std::abs(1.0 / t.r - inv) > 1e-12) throw config_error("exponent triple: Hoelder scaling violated");
    return t;
}

std::vector<ExponentTriple> parse_triples(const std::string& text) {
    std::vector<ExponentTriple> out;
    std::stringstream ss(text);
    std::string item;
    auto parse_exp = [](const std::string& s) {
        if (s == "inf" || s == "Inf" || s == "INF") return LpExponent::infinity();
        return LpExponent(std::stod(s));
    };
    while (std::getline(ss, item, ';')) {
        if (item.empty()) continue;
        const std::size_t comma = item.find(',');
        if (comma == std::string::npos) throw config_error("triples: expected 'p,q' pairs");
        out.push_back(make_triple(parse_exp(item.substr(0, comma)), parse_exp(item.substr(comma + 1))));
    }
    if (out.empty()) throw config_error("triples: empty list");
    return out;
}

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    cfg.triples = {make_triple(LpExponent(2.0), LpExponent(2.0)),
                   make_triple(LpExponent(4.0), LpExponent(4.0)),
                   make_triple(LpExponent(2.0), LpExponent::infinity()),
                   make_triple(LpExponent(3.0), LpExponent(3.0))};
    return cfg;
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    try {
        if (key == "grid_n")
            cfg.grid_n = std::stoll(value);
        else if (key == "grid_l")
            cfg.grid_l = std::stod(value);
        else if (key == "k_max")
            cfg.k_max_override = std::stoi(value);
        else if (key == "smoothness_order")
            cfg.smoothness_order = std::stoi(value);
        else if (key == "symbol")
            cfg.symbol = value;
        else if (key == "triples")
            cfg.triples = parse_triples(value);
        else if (key == "trials")
            cfg.trials = std::stoi(value);
        else if (key == "seed")
            cfg.seed = std::stoull(value);
        else if (key == "out_dir")
            cfg.out_dir = value;
        else
            throw config_error("unknown config key '" + key + "'");
    } catch (const std::invalid_argument&) {
        throw config_error("bad value '" + value + "' for config key '" + key + "'");
    } catch (const std::out_of_range&) {
        throw config_error("out-of-range value '" + value + "' for config key '" + key + "'");
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw config_error("cannot open config file " + path);
    ExperimentConfig cfg = default_config();
    std::string line;
    while (std::getline(is, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::string key, value;
        std::istringstream ss(line);
        if (!(ss >> key)) continue;
        std::getline(ss, value);
        // tolerate "key = value"
        std::size_t start = value.find_first_not_of(" \t=");
        value = start == std::string::npos ? "" : value.substr(start);
        std::size_t end = value.find_last_not_of(" \t\r");
        value = end == std::string::npos ? "" : value.substr(0, end + 1);
        apply_config_entry(cfg, key, value);
    }
    validate_config(cfg);
    return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.grid_n < 8 || cfg.grid_n > 1024 || (cfg.grid_n & (cfg.grid_n - 1)) != 0)
        throw config_error("grid_n must be a power of two in [8, 1024]");
    if (!(cfg.grid_l > 0.0)) throw config_error("grid_l must be positive");
    if (cfg.trials < 1) throw config_error("trials must be positive");
    if (cfg.smoothness_order < 1 || cfg.smoothness_order > 4)
        throw config_error("smoothness_order must be in [1, 4]");
    if (cfg.triples.empty()) throw config_error("at least one exponent triple is required");
    for (const ExponentTriple& t : cfg.triples) make_triple(t.p, t.q);  // revalidate
}

namespace {

double max_abs(const SampledFunction& f) {
    double m = 0.0;
    for (const complex& v : f.values) m = std::max(m, std::abs(v));
    return m;
}

struct SuiteStatus {
    bool pass = true;
    void row(std::ostream& csv, std::ostream& log, const std::string& identity, std::int64_t n,
             double l, const std::string& param, double err, double tol, bool expected_fail = false) {
        std::string status;
        if (expected_fail) {
            status = err > tol ? "expected_fail" : "UNEXPECTED_PASS";
            if (err <= tol) pass = false;
        } else {
            status = err <= tol ? "pass" : "FAIL";
            if (err > tol) pass = false;
        }
        csv << identity << "," << n << "," << fmt(l) << "," << param << "," << fmt(err) << ","
            << fmt(tol) << "," << status << "\n";
        log << "  " << identity << " [" << param << "]: max_error=" << fmt(err) << " tol=" << fmt(tol)
            << " -> " << status << "\n";
    }
};

SampledFunction translated_localized_field(const TorusGrid& grid, const FilterBank& bank,
                                           std::uint64_t seed, double center_x) {
    // band-limited field, cut to a unit square at the requested center, then
    // re-band-limited so the evaluators keep their spectral sparsity
    SampledFunction f = random_band_limited(grid, seed, bank.band_indicator());
    const std::int64_t n = grid.samples_per_axis();
    for (std::int64_t i0 = 0; i0 < n; ++i0)
        for (std::int64_t i1 = 0; i1 < n; ++i1) {
            double dx = std::abs(grid.coord(i0) - center_x);
            dx = std::min(dx, grid.period() - dx);
            const double dy = std::abs(grid.coord(i1));
            const double win = (dx < 1.0 && dy < 1.0)
                                   ? smoothstep((1.0 - dx) / 0.5) * smoothstep((1.0 - dy) / 0.5)
                                   : 0.0;
            f.at(i0, i1) *= win;
        }
    return bank.band_limit(f);
}

double weighted_norm(const SampledFunction& f, const LpExponent& p) {
    // ||f * chi~_{R00}||_p with the (1 + dist/|I|)^{-100} cutoff per axis
    const IntervalWeight w{0.0, 2.0, 100};
    SampledFunction g = f;
    const std::int64_t n = f.grid.samples_per_axis();
    for (std::int64_t i0 = 0; i0 < n; ++i0) {
        const double w0 = cutoff_weight(w, f.grid.coord(i0));
        for (std::int64_t i1 = 0; i1 < n; ++i1)
            g.at(i0, i1) *= w0 * cutoff_weight(w, f.grid.coord(i1));
    }
    return lp_norm(g, p, true);
}

}  // namespace

int run_reconstruction_suite(const ExperimentConfig& cfg, std::ostream& csv, std::ostream& log) {
    csv << "identity,grid_n,grid_l,param,max_error,tolerance,status\n";
    SuiteStatus st;
    log << "reconstruction suite (N=" << cfg.grid_n << ", seed=" << cfg.seed << ")\n";

    // Littlewood-Paley telescoping at every grid frequency, all K <= k_max
    {
        TorusGrid g(1, cfg.grid_n, 1.0);
        FilterBank bank(g);
        double worst = 0.0;
        for (int K = -1; K <= bank.k_max(); ++K)
            for (std::int64_t s = 0; s < g.samples_per_axis(); ++s) {
                const double xi = g.frequency(s);
                double acc = 0.0;
                for (int k = -1; k <= K; ++k) acc += bank.mask_value(MaskKind::psi, k, xi);
                worst = std::max(worst, std::abs(acc - bank.mask_value(MaskKind::phi, K + 1, xi)));
            }
        st.row(csv, log, "lp_telescoping", cfg.grid_n, 1.0, "K<=" + std::to_string(bank.k_max()),
               worst, 1e-14);
    }

    // Bony reconstruction on band-limited pairs
    {
        TorusGrid g(1, cfg.grid_n, 1.0);
        FilterBank bank(g);
        SampledFunction ind = bank.band_indicator();
        const int trials = std::min(cfg.trials, 100);
        double worst = 0.0;
        for (int t = 0; t < trials; ++t) {
            SampledFunction f = random_band_limited(g, cfg.seed + 2 * std::uint64_t(t), ind);
            SampledFunction h = random_band_limited(g, cfg.seed + 2 * std::uint64_t(t) + 1, ind);
            BonyParts parts = bony_decompose(bank, f, h);
            double err = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < f.values.size(); ++i) {
                const complex prod = f.values[i] * h.values[i];
                const complex sum =
                    parts.lh.values[i] + parts.hl.values[i] + parts.hh.values[i] + parts.ll.values[i];
                err = std::max(err, std::abs(sum - prod));
                scale = std::max(scale, std::abs(prod));
            }
            worst = std::max(worst, err / scale);
        }
        st.row(csv, log, "bony_reconstruction", cfg.grid_n, 1.0, std::to_string(trials) + " trials",
               worst, 1e-8);
    }

    // expected-failure control: truncated bank, full-band inputs
    {
        TorusGrid g(1, cfg.grid_n, 1.0);
        FilterBank full(g);
        if (full.k_max() >= 2) {
            FilterBank truncated(g, full.k_max() - 2, 1.0);
            SampledFunction f = random_field(g, cfg.seed + 1001);
            SampledFunction h = random_field(g, cfg.seed + 1002);
            BonyParts parts = bony_decompose(truncated, f, h);
            double err = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < f.values.size(); ++i) {
                const complex prod = f.values[i] * h.values[i];
                const complex sum =
                    parts.lh.values[i] + parts.hl.values[i] + parts.hh.values[i] + parts.ll.values[i];
                err = std::max(err, std::abs(sum - prod));
                scale = std::max(scale, std::abs(prod));
            }
            st.row(csv, log, "bony_truncated_control", cfg.grid_n, 1.0, "k_max-2, full band",
                   err / scale, 1e-8, /*expected_fail=*/true);
        }
    }

    // localization partition of unity and operator tiling
    {
        TorusGrid g(2, std::min<std::int64_t>(cfg.grid_n, 64), 8.0);
        LocalizationPartition part(g);
        double pou = 0.0;
        for (std::int64_t i = 0; i < g.samples_per_axis(); ++i) {
            double acc = 0.0;
            for (std::int64_t n : part.positions()) acc += part.cell_axis(n)[std::size_t(i)];
            pou = std::max(pou, std::abs(acc - 1.0));
        }
        st.row(csv, log, "localization_partition_of_unity", g.samples_per_axis(), 8.0, "", pou, 1e-12);

        SymbolSpec id = builtin_symbol("identity");
        SampledFunction f = random_field(g, cfg.seed + 7);
        SampledFunction h = random_field(g, cfg.seed + 8);
        SampledFunction t = eval_multiplier(id, f, h);
        SampledFunction sum(g, Domain::space);
        for (std::int64_t n : part.positions())
            for (std::int64_t m : part.positions()) {
                SampledFunction piece = part.localize(t, n, m);
                for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += piece.values[i];
            }
        double err = 0.0;
        for (std::size_t i = 0; i < sum.values.size(); ++i)
            err = std::max(err, std::abs(sum.values[i] - t.values[i]));
        st.row(csv, log, "localization_tiling", g.samples_per_axis(), 8.0, "identity symbol",
               err / std::max(1e-300, max_abs(t)), 1e-12);
    }

    // the sixteen symbol-one masks sum to 1 in band
    {
        TorusGrid g(1, cfg.grid_n, 1.0);
        FilterBank bank(g);
        auto masks = symbol_one_masks(bank);
        const double cut = (3.0 / 4.0) * std::ldexp(1.0, bank.k_max() + 1);
        GaussianSource src(cfg.seed + 17);
        double worst = 0.0;
        for (int t = 0; t < 100; ++t) {
            double pt[4];
            for (double& c : pt) c = std::fmod(std::abs(src.next()), 1.0) * 2.0 * cut - cut;
            double sum = 0.0;
            for (const auto& m : masks) sum += m(pt[0], pt[1], pt[2], pt[3]);
            worst = std::max(worst, std::abs(sum - 1.0));
        }
        st.row(csv, log, "symbol_one_masks_sum", cfg.grid_n, 1.0, "100 points", worst, 1e-10);
    }

    // sixteen-term operator reconstruction at the operator grid
    {
        TorusGrid g(2, 32, 1.0);
        FilterBank bank(g);
        SampledFunction ind = bank.band_indicator();
        std::vector<std::string> names{"identity"};
        SymbolSpec chosen = builtin_symbol(cfg.symbol);
        names.push_back(chosen.x_dependent ? "eq39_smooth" : cfg.symbol);
        for (const std::string& name : names) {
            SymbolSpec m0 = builtin_symbol(name);
            double worst = 0.0;
            for (int t = 0; t < 20; ++t) {
                SampledFunction f = random_band_limited(g, cfg.seed + 100 + 2 * std::uint64_t(t), ind);
                SampledFunction h =
                    random_band_limited(g, cfg.seed + 101 + 2 * std::uint64_t(t), ind);
                SixteenTermResult r = sixteen_term_decomposition(bank, m0, f, h);
                SampledFunction total = eval_multiplier(m0, f, h);
                SampledFunction sum(g, Domain::space);
                for (const SampledFunction& p : r.parts)
                    for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += p.values[i];
                double err = 0.0;
                for (std::size_t i = 0; i < sum.values.size(); ++i)
                    err = std::max(err, std::abs(sum.values[i] - total.values[i]));
                worst = std::max(worst, err / std::max(1e-300, max_abs(total)));
            }
            st.row(csv, log, "sixteen_term_reconstruction", 32, 1.0, name, worst, 1e-6);
        }
    }

    log << (st.pass ? "reconstruction suite: PASS\n" : "reconstruction suite: FAIL\n");
    return st.pass ? exit_pass : exit_tolerance_failure;
}

namespace {

// embeds frequency coefficients of a coarse grid into a finer one with the
// same period; the represented trigonometric polynomial is unchanged
SampledFunction upsample_coefficients(const SampledFunction& coarse_hat, const TorusGrid& fine) {
    const TorusGrid& cg = coarse_hat.grid;
    SampledFunction out(fine, Domain::frequency);
    const std::int64_t cn = cg.samples_per_axis(), fn = fine.samples_per_axis();
    for (std::int64_t s0 = 0; s0 < cn; ++s0)
        for (std::int64_t s1 = 0; s1 < cn; ++s1) {
            const std::int64_t k0 = cg.freq_index(s0), k1 = cg.freq_index(s1);
            out.values[std::size_t(fine.freq_storage(k0) * fn + fine.freq_storage(k1))] =
                coarse_hat.values[std::size_t(s0 * cn + s1)];
        }
    return out;
}

}  // namespace

int run_norm_sweep(const ExperimentConfig& cfg, std::ostream& csv, std::ostream& log) {
    csv << "operator,p,q,r,N,trial_class,max_ratio\n";
    log << "norm sweep (N=" << cfg.grid_n << " and " << 2 * cfg.grid_n << ", trials=" << cfg.trials
        << ")\n";
    // period 4: the deepest pipeline scale then sits at half the coarse
    // Nyquist, so the |output| norm quadratures refine cleanly
    const double L = 4.0;
    const SymbolSpec identity = builtin_symbol("identity");
    const SymbolSpec marc = builtin_symbol("marcinkiewicz_deg0");
    SymbolSpec pipe_symbol = builtin_symbol(cfg.symbol);
    if (pipe_symbol.x_dependent) pipe_symbol = builtin_symbol("eq39_smooth");

    struct SizeContext {
        TorusGrid grid;
        FilterBank bank;
        LocalizationPartition part;
        DiscreteParaproductSpec lh_hl, lh_hl_grown, ll_ll, ll_ll_grown;
    };
    auto make_context = [&](std::int64_t n, int base_max_scale) {
        TorusGrid grid(2, n, L);
        FilterBank bank(grid);
        LocalizationPartition part(grid);
        PipelineOptions base_opts;
        base_opts.max_scale = base_max_scale;
        base_opts.position_extent = 2.0;
        PipelineOptions grown_opts = base_opts;
        grown_opts.max_scale = std::min(base_max_scale + 1, bank.k_max());
        grown_opts.position_extent = 4.0;
        DiscreteParaproductSpec a = paraproduct_from_pipeline(2, pipe_symbol, bank, base_opts);
        DiscreteParaproductSpec b = paraproduct_from_pipeline(2, pipe_symbol, bank, grown_opts);
        DiscreteParaproductSpec c = paraproduct_from_pipeline(16, pipe_symbol, bank, base_opts);
        DiscreteParaproductSpec d = paraproduct_from_pipeline(16, pipe_symbol, bank, grown_opts);
        return SizeContext{grid, std::move(bank), std::move(part), std::move(a), std::move(b),
                           std::move(c), std::move(d)};
    };

    // the base grid's dyadic range bounds the shared rectangle sets and the
    // shared input band, so the (N, 2N) rows compare the same functions and
    // the same operators under pure grid refinement
    const int base_k_max = FilterBank(TorusGrid(2, cfg.grid_n, L)).k_max();
    if (base_k_max < 1)
        throw config_error("run_norm_sweep: grid_n too small for the pipeline scales (need >= 64)");
    const int base_scale = std::max(1, base_k_max - 1);  // the grown set adds one scale
    SizeContext small = make_context(cfg.grid_n, base_scale);
    SizeContext big = make_context(2 * cfg.grid_n, base_scale);
    const SampledFunction band = small.bank.band_indicator();

    struct OperatorCase {
        std::string name;
        std::string trial_class;
        std::function<SampledFunction(const SizeContext&, const SampledFunction&,
                                      const SampledFunction&)>
            eval;
    };
    // numerators are the localized outputs T(f,g) phi'_0 (x) phi''_0: the
    // ratios realize the localized estimates, whose denominators carry the
    // chi~ weights
    std::vector<OperatorCase> ops;
    ops.push_back({"identity", "centered",
                   [&](const SizeContext& sc, const SampledFunction& f, const SampledFunction& g) {
                       return sc.part.localize(eval_multiplier(identity, f, g), 0, 0);
                   }});
    ops.push_back({"marcinkiewicz", "centered",
                   [&](const SizeContext& sc, const SampledFunction& f, const SampledFunction& g) {
                       return sc.part.localize(eval_multiplier(marc, f, g), 0, 0);
                   }});
    ops.push_back({"pipeline_lh_hl", "centered",
                   [&](const SizeContext& sc, const SampledFunction& f, const SampledFunction& g) {
                       return eval_discrete_paraproduct(sc.lh_hl, sc.bank, f, g, &sc.part);
                   }});
    ops.push_back({"pipeline_lh_hl", "grown_set",
                   [&](const SizeContext& sc, const SampledFunction& f, const SampledFunction& g) {
                       return eval_discrete_paraproduct(sc.lh_hl_grown, sc.bank, f, g, &sc.part);
                   }});
    ops.push_back({"pipeline_ll_ll", "centered",
                   [&](const SizeContext& sc, const SampledFunction& f, const SampledFunction& g) {
                       return eval_discrete_paraproduct(sc.ll_ll, sc.bank, f, g, &sc.part);
                   }});
    ops.push_back({"pipeline_ll_ll", "grown_set",
                   [&](const SizeContext& sc, const SampledFunction& f, const SampledFunction& g) {
                       return eval_discrete_paraproduct(sc.ll_ll_grown, sc.bank, f, g, &sc.part);
                   }});

    std::vector<std::vector<std::vector<double>>> max_ratio(
        2, std::vector<std::vector<double>>(ops.size(), std::vector<double>(cfg.triples.size(), 0.0)));

    for (int trial = 0; trial < cfg.trials; ++trial) {
        const std::uint64_t s = cfg.seed + 1000 * std::uint64_t(trial);
        // one coefficient draw per input, realized on both grids
        GaussianSource src_f(s + 1), src_g(s + 2);
        SampledFunction fhat(small.grid, Domain::frequency), ghat(small.grid, Domain::frequency);
        for (std::size_t i = 0; i < fhat.values.size(); ++i) {
            const complex zf = src_f.next_complex(), zg = src_g.next_complex();
            if (band.values[i] != complex(0.0, 0.0)) {
                fhat.values[i] = zf;
                ghat.values[i] = zg;
            }
        }
        const SampledFunction f_small = fft_inverse(fhat), g_small = fft_inverse(ghat);
        const SampledFunction f_big = fft_inverse(upsample_coefficients(fhat, big.grid));
        const SampledFunction g_big = fft_inverse(upsample_coefficients(ghat, big.grid));

        for (int size = 0; size < 2; ++size) {
            const SizeContext& sc = size == 0 ? small : big;
            const SampledFunction& f = size == 0 ? f_small : f_big;
            const SampledFunction& g = size == 0 ? g_small : g_big;
            std::vector<double> denom(cfg.triples.size(), 0.0);
            for (std::size_t ti = 0; ti < cfg.triples.size(); ++ti)
                denom[ti] = weighted_norm(f, cfg.triples[ti].p) * weighted_norm(g, cfg.triples[ti].q);
            for (std::size_t oi = 0; oi < ops.size(); ++oi) {
                SampledFunction t = ops[oi].eval(sc, f, g);
                for (std::size_t ti = 0; ti < cfg.triples.size(); ++ti) {
                    if (denom[ti] == 0.0) continue;
                    const double ratio = lp_norm(t, LpExponent(cfg.triples[ti].r), true) / denom[ti];
                    max_ratio[std::size_t(size)][oi][ti] =
                        std::max(max_ratio[std::size_t(size)][oi][ti], ratio);
                }
            }
        }
    }
    for (int size = 0; size < 2; ++size) {
        const std::int64_t n = size == 0 ? cfg.grid_n : 2 * cfg.grid_n;
        for (std::size_t oi = 0; oi < ops.size(); ++oi) {
            for (std::size_t ti = 0; ti < cfg.triples.size(); ++ti) {
                const ExponentTriple& tri = cfg.triples[ti];
                csv << ops[oi].name << "," << fmt_exponent(tri.p) << "," << fmt_exponent(tri.q)
                    << "," << fmt(tri.r) << "," << n << "," << ops[oi].trial_class << ","
                    << fmt(max_ratio[std::size_t(size)][oi][ti]) << "\n";
            }
            log << "  " << ops[oi].name << " (" << ops[oi].trial_class << ", N=" << n << ") done\n";
        }
    }

    // translated trials probing the chi~ weight compensation run on a
    // period-32 torus so distances up to 8 fit without wrap
    {
        TorusGrid wide_grid(2, std::max<std::int64_t>(cfg.grid_n, 256), 32.0);
        FilterBank wide_bank(wide_grid);
        LocalizationPartition wide_part(wide_grid);
        const int translated_trials = std::max(1, cfg.trials / 8);
        for (int dist = 0; dist <= 8; ++dist) {
            std::vector<double> tr_ratio(cfg.triples.size(), 0.0);
            for (int trial = 0; trial < translated_trials; ++trial) {
                const std::uint64_t s = cfg.seed + 77777 + 100 * std::uint64_t(trial) +
                                        std::uint64_t(dist);
                SampledFunction f = translated_localized_field(wide_grid, wide_bank, s + 1, double(dist));
                SampledFunction g = translated_localized_field(wide_grid, wide_bank, s + 2, double(dist));
                SampledFunction t = wide_part.localize(eval_multiplier(marc, f, g), 0, 0);
                for (std::size_t ti = 0; ti < cfg.triples.size(); ++ti) {
                    const ExponentTriple& tri = cfg.triples[ti];
                    const double denom = weighted_norm(f, tri.p) * weighted_norm(g, tri.q);
                    if (denom == 0.0) continue;
                    tr_ratio[ti] = std::max(tr_ratio[ti], lp_norm(t, LpExponent(tri.r), true) / denom);
                }
            }
            for (std::size_t ti = 0; ti < cfg.triples.size(); ++ti) {
                const ExponentTriple& tri = cfg.triples[ti];
                csv << "marcinkiewicz," << fmt_exponent(tri.p) << "," << fmt_exponent(tri.q) << ","
                    << fmt(tri.r) << "," << wide_grid.samples_per_axis() << ",translated_" << dist
                    << "," << fmt(tr_ratio[ti]) << "\n";
            }
        }
        log << "  translated trials done\n";
    }
    return exit_pass;
}

int run_decay_fits(const ExperimentConfig& cfg, std::ostream& csv, std::ostream& log) {
    csv << "quantity,direction,fitted_slope,r2\n";
    bool pass = true;
    auto emit = [&](const std::string& quantity, const std::string& direction, const DecayFit& fit) {
        csv << quantity << "," << direction << "," << fmt(fit.slope) << "," << fmt(fit.r2) << "\n";
        const bool ok = fit.slope <= -4.0 && fit.r2 >= 0.95;
        if (!ok) pass = false;
        log << "  " << quantity << " [" << direction << "]: slope=" << fmt(fit.slope)
            << " r2=" << fmt(fit.r2) << (ok ? "" : "  <-- below threshold") << "\n";
    };

    // m_l decay for the x-dependent catalog symbols, plus the x-independent
    // control whose slope must match the bare window transform
    {
        TorusGrid g(2, 512, 8.0);
        LocalizationPartition part(g);
        const std::vector<std::pair<double, double>> probes{{0.4, -0.9}, {1.3, 0.2}, {-0.7, 1.9}};
        for (const char* name : {"pseudo_sep", "pseudo_gauss", "pseudo_nonsep", "identity"}) {
            RestrictedSymbolCoeffs rc =
                restricted_symbol_coeffs(builtin_symbol(name), part, 0, 0, 16.0);
            std::vector<double> along_l1(17, 0.0), along_l2(17, 0.0);
            for (const auto& [a, b] : probes) {
                SampledFunction table = rc.coeff_table(a, b, -a, 0.5 * b);
                const std::int64_t n = g.samples_per_axis();
                for (int t = 0; t <= 16; ++t) {
                    const std::int64_t idx = std::int64_t(t) * std::int64_t(g.period());
                    for (std::int64_t sgn : {std::int64_t(1), std::int64_t(-1)}) {
                        const std::int64_t k = sgn * idx;
                        along_l1[std::size_t(t)] = std::max(
                            along_l1[std::size_t(t)],
                            std::abs(table.values[std::size_t(g.freq_storage(k) * n)]));
                        along_l2[std::size_t(t)] = std::max(
                            along_l2[std::size_t(t)],
                            std::abs(table.values[std::size_t(g.freq_storage(k))]));
                    }
                }
            }
            emit(std::string("m_l::") + name, "l1", fit_log_decay(along_l1, 2, 16));
            emit(std::string("m_l::") + name, "l2", fit_log_decay(along_l2, 2, 16));
        }

        // the bare window transform (separable control for the identity row)
        std::vector<double> window_vals(17, 0.0);
        const TorusGrid axis(1, 512, 8.0);
        for (int t = 0; t <= 16; ++t) {
            complex acc(0.0, 0.0);
            for (std::int64_t i = 0; i < axis.samples_per_axis(); ++i) {
                const double x = axis.coord(i);
                const double ph = -2.0 * std::numbers::pi * double(t) * x;
                acc += part.wide_cell_value(0, x) * complex(std::cos(ph), std::sin(ph));
            }
            window_vals[std::size_t(t)] = std::abs(acc) * axis.spacing();
        }
        emit("window_transform", "x1", fit_log_decay(window_vals, 2, 16));
    }

    // coefficient-tensor rays for the eq39-class catalog symbols
    {
        const char* dir_names[6] = {"n1p", "n1s", "n2p", "n2s", "n3p", "n3s"};
        std::vector<std::string> names{"identity", "eq39_smooth"};
        SymbolSpec chosen = builtin_symbol(cfg.symbol);
        if (!chosen.x_dependent && chosen.claimed.kind == SymbolClassKind::inhomog_biparam &&
            cfg.symbol != "identity" && cfg.symbol != "eq39_smooth")
            names.push_back(cfg.symbol);
        for (const std::string& name : names) {
            CoeffTensor ct = coeff_tensor(builtin_symbol(name), 1, 1, 16);
            for (int d = 0; d < 6; ++d)
                emit(std::string("coeff_tensor::") + name, dir_names[d], ct.ray_fits[std::size_t(d)]);
        }
    }

    log << (pass ? "decay fits: PASS\n" : "decay fits: FAIL\n");
    return pass ? exit_pass : exit_tolerance_failure;
}

int run_symbol_verification(const ExperimentConfig& cfg, std::ostream& csv, std::ostream& log) {
    csv << "symbol,multi_index,max_ratio,worst_point\n";
    bool pass = true;
    for (const SymbolSpec& s : builtin_symbols()) {
        SymbolSpec copy = s;
        copy.claimed.max_order = cfg.smoothness_order;
        SymbolClassReport report = verify_symbol_class(copy, 150, 0.005);
        for (const MultiIndexRatio& row : report.rows) {
            std::string idx;
            for (int o : row.x_order) idx += "x" + std::to_string(o);
            if (!row.x_order.empty()) idx += "|";
            for (int o : row.freq_order) idx += std::to_string(o);
            std::string pt;
            for (double v : row.worst_point) pt += (pt.empty() ? "" : ";") + fmt(v);
            csv << s.name << "," << idx << "," << fmt(row.max_ratio) << ",(" << pt << ")\n";
        }
        const bool expect_fail = s.name == "failing_chirp";
        bool ok;
        if (expect_fail)
            ok = !report.pass && report.first_failing_order == 2;
        else
            ok = report.pass;
        if (!ok) pass = false;
        log << "  " << s.name << " [" << class_name(s.claimed.kind)
            << "]: " << (report.pass ? "passes" : "fails at order " +
                                                      std::to_string(report.first_failing_order))
            << (ok ? "" : "  <-- unexpected") << "\n";
    }
    log << (pass ? "symbol verification: PASS\n" : "symbol verification: FAIL\n");
    return pass ? exit_pass : exit_tolerance_failure;
}

void write_mask_csv(const FilterBank& bank, MaskKind kind, int k, std::ostream& os) {
    os << "frequency,value\n";
    const TorusGrid& g = bank.grid();
    const std::vector<double>& m = bank.mask(kind, k);
    // ascending frequency order for plotting
    for (std::int64_t idx = -g.samples_per_axis() / 2; idx < g.samples_per_axis() / 2; ++idx) {
        const std::int64_t s = g.freq_storage(idx);
        os << fmt(double(idx) / g.period()) << "," << fmt(m[std::size_t(s)]) << "\n";
    }
}

}  // namespace paralab
