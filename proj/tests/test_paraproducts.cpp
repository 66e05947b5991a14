#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "paralab/paraproducts.hpp"
#include "paralab/random.hpp"

using namespace paralab;

namespace {

double max_abs(const SampledFunction& f) {
    double m = 0.0;
    for (const complex& v : f.values) m = std::max(m, std::abs(v));
    return m;
}

DiscreteParaproductSpec lh_hl_shell(bool localized) {
    DiscreteParaproductSpec spec;
    spec.name = "test_lh_hl";
    spec.families_axis1 = {FamilySpec{MaskKind::phi_tilde, 0}, FamilySpec{MaskKind::psi, 0},
                           FamilySpec{MaskKind::psi_prime, 0}};
    spec.families_axis2 = {FamilySpec{MaskKind::psi, 0}, FamilySpec{MaskKind::phi_tilde, 0},
                           FamilySpec{MaskKind::psi_prime, 0}};
    spec.localized = localized;
    return spec;
}

SampledFunction centered_bump(const TorusGrid& g, double radius, double x0 = 0.0, double y0 = 0.0) {
    SampledFunction f(g, Domain::space);
    for (std::int64_t i0 = 0; i0 < g.samples_per_axis(); ++i0)
        for (std::int64_t i1 = 0; i1 < g.samples_per_axis(); ++i1) {
            const double dx = g.coord(i0) - x0, dy = g.coord(i1) - y0;
            const double r2 = (dx * dx + dy * dy) / (radius * radius);
            f.at(i0, i1) = r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
        }
    return f;
}

}  // namespace

TEST_CASE("dyadic interval arithmetic") {
    DyadicInterval I{2, 5};  // [5/4, 6/4]
    CHECK(I.lo() == doctest::Approx(1.25));
    CHECK(I.hi() == doctest::Approx(1.5));
    CHECK(I.length() == doctest::Approx(0.25));
    DyadicRectangle r{I, {0, -1}};
    CHECK(r.area() == doctest::Approx(0.25));
}

TEST_CASE("locality classification of the split conditions") {
    CHECK(classify_rectangle({{0, 0}, {0, 0}}) == LocalityClass::main);          // [0,1]^2
    CHECK(classify_rectangle({{0, 8}, {0, 8}}) == LocalityClass::error);         // [8,9]^2
    CHECK(classify_rectangle({{0, 0}, {0, 8}}) == LocalityClass::hybrid_iii);    // [0,1] x [8,9]
    CHECK(classify_rectangle({{0, 8}, {0, 0}}) == LocalityClass::hybrid_iv);
    // closed containment at the +/-5 boundary: [4,5] is inside, [5,6] outside
    CHECK(classify_rectangle({{0, 4}, {0, 0}}) == LocalityClass::main);
    CHECK(classify_rectangle({{0, 5}, {0, 0}}) == LocalityClass::hybrid_iv);
    CHECK(classify_rectangle({{3, 39}, {0, -6}}) == LocalityClass::hybrid_iii);  // [39/8, 5] x [-6,-5]
}

TEST_CASE("four-way split is an exact partition over scales 0..3") {
    DiscreteParaproductSpec spec = lh_hl_shell(true);
    const double half = 16.0;
    for (int k = 0; k <= 3; ++k) {
        const std::int64_t lo = -std::int64_t(half * std::ldexp(1.0, k));
        for (std::int64_t n = lo; n < -lo; ++n)
            for (int l = 0; l <= 3; ++l) {
                // pair every I with a few J to keep the set spanning all classes
                const std::int64_t jlo = -std::int64_t(half * std::ldexp(1.0, l));
                for (std::int64_t m : {jlo, std::int64_t(0), -jlo - 1})
                    spec.rectangles.push_back({{k, n}, {l, m}});
            }
    }
    spec.coefficients.assign(spec.rectangles.size(), complex(1.0, 0.0));

    FourWaySplit split = split_four_terms(spec);
    const std::size_t total = split.main.rectangles.size() + split.error.rectangles.size() +
                              split.hybrid_iii.rectangles.size() + split.hybrid_iv.rectangles.size();
    CHECK(total == spec.rectangles.size());
    CHECK(split.main.rectangles.size() > 0);
    CHECK(split.error.rectangles.size() > 0);
    CHECK(split.hybrid_iii.rectangles.size() > 0);
    CHECK(split.hybrid_iv.rectangles.size() > 0);

    // pairwise disjoint: counts per class agree with direct classification
    std::size_t by_class[4] = {0, 0, 0, 0};
    for (const DyadicRectangle& r : spec.rectangles) ++by_class[std::size_t(classify_rectangle(r))];
    CHECK(by_class[0] == split.main.rectangles.size());
    CHECK(by_class[1] == split.error.rectangles.size());
    CHECK(by_class[2] == split.hybrid_iii.rectangles.size());
    CHECK(by_class[3] == split.hybrid_iv.rectangles.size());
    for (const DyadicRectangle& r : split.main.rectangles)
        CHECK(classify_rectangle(r) == LocalityClass::main);
    for (const DyadicRectangle& r : split.error.rectangles)
        CHECK(classify_rectangle(r) == LocalityClass::error);
}

TEST_CASE("summing the four split evaluations reproduces the unsplit output bitwise") {
    TorusGrid g(2, 256, 16.0);
    FilterBank bank(g);
    REQUIRE(bank.k_max() >= 1);
    LocalizationPartition part(g);

    DiscreteParaproductSpec spec = lh_hl_shell(true);
    GaussianSource coeffs(2024);
    for (int k : {1}) {
        const std::int64_t lo = -std::int64_t(8 * (1 << k));
        for (std::int64_t n = lo; n < -lo; ++n)
            for (std::int64_t m = lo; m < -lo; ++m) {
                spec.rectangles.push_back({{k, n}, {k, m}});
                complex c = coeffs.next_complex();
                spec.coefficients.push_back(c / std::max(1.0, std::abs(c)));
            }
    }

    SampledFunction f = random_field(g, 31), h = random_field(g, 32);
    SampledFunction whole = eval_discrete_paraproduct(spec, bank, f, h, &part);

    FourWaySplit split = split_four_terms(spec);
    SampledFunction sum(g, Domain::space);
    for (const DiscreteParaproductSpec* s :
         {&split.main, &split.error, &split.hybrid_iii, &split.hybrid_iv}) {
        SampledFunction piece = eval_discrete_paraproduct(*s, bank, f, h, &part);
        for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += piece.values[i];
    }
    for (std::size_t i = 0; i < sum.values.size(); ++i) {
        CHECK(sum.values[i].real() == whole.values[i].real());
        CHECK(sum.values[i].imag() == whole.values[i].imag());
    }
}

TEST_CASE("bumps are L2-normalized and adapted to their intervals") {
    TorusGrid g(2, 256, 16.0);
    FilterBank bank(g);
    const TorusGrid axis(1, 256, 16.0);
    for (MaskKind kind : {MaskKind::phi, MaskKind::psi, MaskKind::psi_prime}) {
        BumpFamily fam(bank, {kind, 0});
        for (int k = fam.min_scale(); k <= fam.max_scale(); ++k) {
            for (std::int64_t n : {std::int64_t(0), std::int64_t(5), std::int64_t(-9)}) {
                const DyadicInterval I{k, n};
                std::vector<complex> b = fam.bump(I);
                double norm2 = 0.0;
                for (const complex& v : b) norm2 += std::norm(v);
                norm2 = std::sqrt(norm2 * axis.cell_measure());
                CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-10));

                // adaptation: |phi_I^{(l)}| <= C_{l,a} |I|^{-l-1/2} (1+dist/|I|)^{-a}
                // for l <= 2, a <= 20. The constants are finite but grow
                // steeply with the decay order (the e^{-1/t} transitions put
                // the superpolynomial regime beyond the torus); bounds frozen
                // from measurement with headroom.
                const double h = axis.spacing();
                const double bound[3][3] = {{10, 1e6, 1e24}, {100, 1e6, 1e25}, {1e3, 1e6, 1e26}};
                auto at = [&](std::int64_t j) { return b[std::size_t(((j % 256) + 256) % 256)]; };
                for (int l = 0; l <= 2; ++l) {
                    int ai = 0;
                    for (double alpha : {2.0, 6.0, 20.0}) {
                        double worst = 0.0;
                        for (std::int64_t i = 0; i < 256; ++i) {
                            complex v;
                            if (l == 0) v = at(i);
                            else if (l == 1) v = (at(i + 1) - at(i - 1)) / (2 * h);
                            else v = (at(i + 1) - 2.0 * at(i) + at(i - 1)) / (h * h);
                            const double x = axis.coord(i);
                            double d = 0.0;
                            if (x < I.lo() || x > I.hi()) {
                                double dl = std::abs(x - I.lo()), dr = std::abs(x - I.hi());
                                dl = std::min(dl, 16.0 - dl);
                                dr = std::min(dr, 16.0 - dr);
                                d = std::min(dl, dr);
                            }
                            const double weight = std::pow(1.0 + d / I.length(), alpha);
                            worst = std::max(worst, std::abs(v) * std::pow(I.length(), l + 0.5) * weight);
                        }
                        INFO("l=" << l << " alpha=" << alpha);
                        CHECK(worst < bound[l][ai]);
                        ++ai;
                    }
                }
            }
        }
    }
}

TEST_CASE("lacunarity classification by generator") {
    TorusGrid g(2, 256, 8.0);
    FilterBank bank(g);
    CHECK(classify_lacunarity(BumpFamily(bank, {MaskKind::psi, 0})) == Lacunarity::lacunary);
    // psi' reaches down to |I|^{-1}/16, inside the Def-2.2 ball but below the
    // annulus floor, so the family is nonlacunary.
    CHECK(classify_lacunarity(BumpFamily(bank, {MaskKind::psi_prime, 0})) == Lacunarity::nonlacunary);
    CHECK(classify_lacunarity(BumpFamily(bank, {MaskKind::phi, 0})) == Lacunarity::nonlacunary);
    CHECK(classify_lacunarity(BumpFamily(bank, {MaskKind::phi_tilde, 0})) == Lacunarity::nonlacunary);
    // psi~ straddles both shapes: reaches past 4/|I| and down into the ball
    CHECK(classify_lacunarity(BumpFamily(bank, {MaskKind::psi_tilde, 0})) == Lacunarity::neither);
}

TEST_CASE("empty rectangle set evaluates to zero") {
    TorusGrid g(2, 64, 8.0);
    FilterBank bank(g);
    DiscreteParaproductSpec spec = lh_hl_shell(false);
    SampledFunction f = random_field(g, 1), h = random_field(g, 2);
    SampledFunction out = eval_discrete_paraproduct(spec, bank, f, h);
    CHECK(max_abs(out) == 0.0);
}

TEST_CASE("single-rectangle evaluation matches a direct inner-product computation") {
    TorusGrid g(2, 128, 8.0);
    FilterBank bank(g);
    DiscreteParaproductSpec spec = lh_hl_shell(false);
    const DyadicRectangle r{{1, 3}, {1, -2}};
    spec.rectangles.push_back(r);
    spec.coefficients.push_back(complex(0.7, -0.4));

    SampledFunction f = random_field(g, 51), h = random_field(g, 52);
    SampledFunction fast = eval_discrete_paraproduct(spec, bank, f, h);

    BumpFamily f1(bank, spec.families_axis1[0]), f2(bank, spec.families_axis1[1]),
        f3(bank, spec.families_axis1[2]);
    BumpFamily g1(bank, spec.families_axis2[0]), g2(bank, spec.families_axis2[1]),
        g3(bank, spec.families_axis2[2]);
    const auto bI1 = f1.bump(r.I), bI2 = f2.bump(r.I), bI3 = f3.bump(r.I);
    const auto bJ1 = g1.bump(r.J), bJ2 = g2.bump(r.J), bJ3 = g3.bump(r.J);
    complex ip_f(0, 0), ip_g(0, 0);
    const double h2 = g.cell_measure();
    for (std::int64_t i0 = 0; i0 < 128; ++i0)
        for (std::int64_t i1 = 0; i1 < 128; ++i1) {
            ip_f += f.at(i0, i1) * std::conj(bI1[std::size_t(i0)] * bJ1[std::size_t(i1)]) * h2;
            ip_g += h.at(i0, i1) * std::conj(bI2[std::size_t(i0)] * bJ2[std::size_t(i1)]) * h2;
        }
    const complex coef = spec.coefficients[0] / std::sqrt(r.area()) * ip_f * ip_g;
    double worst = 0.0;
    for (std::int64_t i0 = 0; i0 < 128; ++i0)
        for (std::int64_t i1 = 0; i1 < 128; ++i1)
            worst = std::max(worst, std::abs(fast.at(i0, i1) -
                                             coef * bI3[std::size_t(i0)] * bJ3[std::size_t(i1)]));
    CHECK(worst <= 1e-12 * std::max(1.0, std::abs(coef)));
}

TEST_CASE("bilinearity of the discrete paraproduct") {
    TorusGrid g(2, 128, 8.0);
    FilterBank bank(g);
    DiscreteParaproductSpec spec = lh_hl_shell(false);
    for (std::int64_t n : {-4, 0, 3})
        for (std::int64_t m : {-2, 1}) {
            spec.rectangles.push_back({{1, n}, {1, m}});
            spec.coefficients.push_back(complex(0.5, 0.3));
        }
    SampledFunction f1 = random_field(g, 61), f2 = random_field(g, 62), h = random_field(g, 63);
    const complex alpha(1.3, -0.2);
    SampledFunction combo(g, Domain::space);
    for (std::size_t i = 0; i < combo.values.size(); ++i)
        combo.values[i] = f1.values[i] + alpha * f2.values[i];
    SampledFunction lhs = eval_discrete_paraproduct(spec, bank, combo, h);
    SampledFunction t1 = eval_discrete_paraproduct(spec, bank, f1, h);
    SampledFunction t2 = eval_discrete_paraproduct(spec, bank, f2, h);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < lhs.values.size(); ++i) {
        worst = std::max(worst, std::abs(lhs.values[i] - t1.values[i] - alpha * t2.values[i]));
        scale = std::max(scale, std::abs(lhs.values[i]));
    }
    CHECK(worst <= 1e-12 * std::max(scale, 1e-6));
}

TEST_CASE("bump scale beyond the grid resolution raises a range error") {
    TorusGrid g(2, 64, 8.0);
    FilterBank bank(g);
    BumpFamily fam(bank, {MaskKind::psi, 0});
    CHECK_THROWS_AS(fam.bump({fam.max_scale() + 1, 0}), contract_error);
}

TEST_CASE("pipeline part (lh,hl): family classifications and coefficients") {
    TorusGrid g(2, 256, 8.0);
    FilterBank bank(g);
    SymbolSpec m0 = builtin_symbol("eq39_smooth");
    PipelineOptions opts;
    opts.position_extent = 2.0;
    DiscreteParaproductSpec spec = paraproduct_from_pipeline(2, m0, bank, opts);  // (lh, hl)

    CHECK(classify_lacunarity(BumpFamily(bank, spec.families_axis1[0])) == Lacunarity::nonlacunary);
    CHECK(classify_lacunarity(BumpFamily(bank, spec.families_axis1[1])) == Lacunarity::lacunary);
    // the psi'-generated output family is ball- but not annulus-contained
    CHECK(classify_lacunarity(BumpFamily(bank, spec.families_axis1[2])) == Lacunarity::nonlacunary);
    CHECK(classify_lacunarity(BumpFamily(bank, spec.families_axis2[0])) == Lacunarity::lacunary);
    CHECK(classify_lacunarity(BumpFamily(bank, spec.families_axis2[1])) == Lacunarity::nonlacunary);
    CHECK(classify_lacunarity(BumpFamily(bank, spec.families_axis2[2])) == Lacunarity::nonlacunary);

    // the textbook classical arrangement keeps two lacunary families per axis
    for (const FamilySpec& out_fam : {FamilySpec{MaskKind::psi, 0}}) {
        int lac = 0;
        for (const FamilySpec& fs :
             {spec.families_axis1[0], spec.families_axis1[1], out_fam})
            if (classify_lacunarity(BumpFamily(bank, fs)) == Lacunarity::lacunary) ++lac;
        CHECK(lac >= 2);
    }

    double sup = 0.0;
    for (const complex& c : spec.coefficients) sup = std::max(sup, std::abs(c));
    CHECK(sup == doctest::Approx(1.0).epsilon(1e-12));
    for (const DyadicRectangle& r : spec.rectangles) {
        CHECK(r.I.k >= 1);
        CHECK(r.J.k >= 1);
    }
}

TEST_CASE("pipeline part (ll,ll): both axes pinned at scale 0, nonlacunary families") {
    TorusGrid g(2, 256, 8.0);
    FilterBank bank(g);
    SymbolSpec m0 = builtin_symbol("identity");
    DiscreteParaproductSpec spec = paraproduct_from_pipeline(16, m0, bank);  // (ll, ll)
    for (const DyadicRectangle& r : spec.rectangles) {
        CHECK(r.I.k == 0);
        CHECK(r.J.k == 0);
    }
    int nonlacunary = 0;
    for (const FamilySpec& fs : spec.families_axis1)
        if (classify_lacunarity(BumpFamily(bank, fs)) == Lacunarity::nonlacunary) ++nonlacunary;
    CHECK(nonlacunary >= 2);
}

TEST_CASE("error-term contributions decay in the rectangle distance") {
    TorusGrid g(2, 512, 32.0);
    FilterBank bank(g);
    LocalizationPartition part(g);
    DiscreteParaproductSpec shell = lh_hl_shell(true);
    // scale-0 rectangles need scale-0-capable families on every slot
    shell.families_axis1 = {FamilySpec{MaskKind::psi, 0}, FamilySpec{MaskKind::psi, 0},
                            FamilySpec{MaskKind::psi_prime, 0}};
    shell.families_axis2 = shell.families_axis1;

    SampledFunction f = centered_bump(g, 0.8);
    SampledFunction h = centered_bump(g, 0.9);

    // one-rectangle contributions at increasing distance along each axis
    for (int axis = 0; axis < 2; ++axis) {
        std::vector<double> mags(13, 0.0);
        for (int d = 2; d <= 12; ++d) {
            DiscreteParaproductSpec one = shell;
            const std::int64_t n = std::int64_t(d);
            one.rectangles.push_back(axis == 0 ? DyadicRectangle{{0, n}, {0, 8}}
                                               : DyadicRectangle{{0, 8}, {0, n}});
            one.coefficients.push_back(complex(1.0, 0.0));
            SampledFunction out = eval_discrete_paraproduct(one, bank, f, h, &part);
            mags[std::size_t(d)] = max_abs(out);
        }
        DecayFit fit = fit_log_decay(mags, 2, 12, 1e-280);
        INFO("axis " << axis << " slope " << fit.slope);
        CHECK(fit.slope <= -4.0);
    }
}

TEST_CASE("spec serialization round trip") {
    DiscreteParaproductSpec spec = lh_hl_shell(true);
    spec.name = "roundtrip";
    spec.rectangles = {{{0, -3}, {2, 17}}, {{1, 0}, {0, 5}}};
    spec.coefficients = {complex(0.25, -1.0 / 3.0), complex(-0.5, 0.125)};
    std::stringstream ss;
    write_spec(spec, ss);
    DiscreteParaproductSpec back = read_spec(ss);
    CHECK(back.name == spec.name);
    CHECK(back.localized == spec.localized);
    REQUIRE(back.rectangles.size() == spec.rectangles.size());
    for (std::size_t i = 0; i < spec.rectangles.size(); ++i) {
        CHECK(back.rectangles[i] == spec.rectangles[i]);
        CHECK(back.coefficients[i].real() == spec.coefficients[i].real());
        CHECK(back.coefficients[i].imag() == spec.coefficients[i].imag());
    }
    for (int j = 0; j < 3; ++j) {
        CHECK(back.families_axis1[std::size_t(j)].kind == spec.families_axis1[std::size_t(j)].kind);
        CHECK(back.families_axis2[std::size_t(j)].kind == spec.families_axis2[std::size_t(j)].kind);
    }
}

TEST_CASE("n-linear discrete paraproduct reduces to the bilinear one for n=2") {
    TorusGrid g(2, 128, 8.0);
    FilterBank bank(g);
    DiscreteParaproductSpec spec = lh_hl_shell(false);
    for (std::int64_t n : {-2, 1})
        for (std::int64_t m : {0, 3}) {
            spec.rectangles.push_back({{1, n}, {1, m}});
            spec.coefficients.push_back(complex(0.3, 0.1));
        }
    SampledFunction f = random_field(g, 71), h = random_field(g, 72);
    SampledFunction a = eval_discrete_paraproduct(spec, bank, f, h);
    SampledFunction b = eval_discrete_paraproduct_n(
        spec.rectangles, spec.coefficients,
        {spec.families_axis1[0], spec.families_axis1[1], spec.families_axis1[2]},
        {spec.families_axis2[0], spec.families_axis2[1], spec.families_axis2[2]}, bank, {&f, &h});
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    CHECK(worst <= 1e-12 * std::max(1.0, max_abs(a)));
}

TEST_CASE("trilinear d-parameter paraproduct evaluates (Eq-26 shape)") {
    TorusGrid g(2, 128, 8.0);
    FilterBank bank(g);
    std::vector<DyadicRectangle> rects{{{1, 0}, {1, 0}}, {{1, -1}, {1, 2}}};
    std::vector<complex> coeffs{complex(1.0, 0.0), complex(0.0, 0.5)};
    std::vector<FamilySpec> fams{{MaskKind::phi_tilde, 0},
                                 {MaskKind::psi, 0},
                                 {MaskKind::psi, 0},
                                 {MaskKind::psi_prime, 0}};
    SampledFunction f1 = random_field(g, 81), f2 = random_field(g, 82), f3 = random_field(g, 83);
    SampledFunction out = eval_discrete_paraproduct_n(rects, coeffs, fams, fams, bank, {&f1, &f2, &f3});
    CHECK(max_abs(out) > 0.0);

    // weight check: one rectangle, compare |R|^{-(n-1)/2} = |R|^{-1} against
    // a direct computation
    std::vector<DyadicRectangle> one{rects[0]};
    std::vector<complex> c1{complex(1.0, 0.0)};
    SampledFunction direct = eval_discrete_paraproduct_n(one, c1, fams, fams, bank, {&f1, &f2, &f3});
    BumpFamily b1(bank, fams[0]), b2(bank, fams[1]), b3(bank, fams[2]), b4(bank, fams[3]);
    complex ip(1.0, 0.0);
    const double h2 = g.cell_measure();
    const SampledFunction* ins[3] = {&f1, &f2, &f3};
    const BumpFamily* bf[3] = {&b1, &b2, &b3};
    for (int j = 0; j < 3; ++j) {
        const auto bi = bf[j]->bump(one[0].I);
        const auto bj = bf[j]->bump(one[0].J);
        complex acc(0.0, 0.0);
        for (std::int64_t i0 = 0; i0 < 128; ++i0)
            for (std::int64_t i1 = 0; i1 < 128; ++i1)
                acc += ins[j]->at(i0, i1) * std::conj(bi[std::size_t(i0)] * bj[std::size_t(i1)]);
        ip *= acc * h2;
    }
    ip /= one[0].area();  // |R|^{-(3-1)/2}
    const auto oi = b4.bump(one[0].I);
    const auto oj = b4.bump(one[0].J);
    double worst = 0.0;
    for (std::int64_t i0 = 0; i0 < 128; ++i0)
        for (std::int64_t i1 = 0; i1 < 128; ++i1)
            worst = std::max(worst, std::abs(direct.at(i0, i1) -
                                             ip * oi[std::size_t(i0)] * oj[std::size_t(i1)]));
    CHECK(worst <= 1e-10 * std::max(1.0, std::abs(ip)));
}
