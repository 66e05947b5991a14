#pragma once

#include <array>
#include <iosfwd>
#include <map>

#include "paralab/operators.hpp"

namespace paralab {

/// Dyadic interval I = 2^{-k} [n, n+1] with k >= 0, so |I| = 2^{-k} <= 1.
struct DyadicInterval {
    int k = 0;
    std::int64_t n = 0;

    double lo() const { return std::ldexp(double(n), -k); }
    double hi() const { return std::ldexp(double(n) + 1, -k); }
    double length() const { return std::ldexp(1.0, -k); }

    bool operator==(const DyadicInterval& o) const { return k == o.k && n == o.n; }
};

struct DyadicRectangle {
    DyadicInterval I, J;
    double area() const { return I.length() * J.length(); }
    bool operator==(const DyadicRectangle& o) const { return I == o.I && J == o.J; }
};

enum class Lacunarity { lacunary, nonlacunary, neither };

/// Generator of one bump family: filter-bank mask kind at scale
/// (interval scale + offset). The ll-type synthesis window phi^(xi/2^{k+2})
/// is (phi, +2).
struct FamilySpec {
    MaskKind kind = MaskKind::phi;
    int scale_offset = 0;
};

/// L2-normalized bumps adapted to dyadic intervals, generated by translating
/// the (reflected, conjugated) mask kernel to the interval's left endpoint
/// and normalizing on the grid.
class BumpFamily {
public:
    BumpFamily(const FilterBank& bank, FamilySpec spec);

    const FilterBank& bank() const { return *bank_; }
    FamilySpec spec() const { return spec_; }

    /// Valid interval scales on this grid (mask range and shift alignment).
    int min_scale() const { return min_scale_; }
    int max_scale() const { return max_scale_; }

    /// Bump samples on the grid axis; throws contract_error for intervals
    /// outside the realizable scale range.
    std::vector<complex> bump(const DyadicInterval& I) const;

private:
    const FilterBank* bank_;
    FamilySpec spec_;
    int min_scale_, max_scale_;
    // per interval scale: L2-normalized kernel for the n = 0 interval
    std::map<int, std::vector<complex>> kernels_;
};

/// Measures supp of the bump transform (above a 1e-12 relative floor) for
/// sampled intervals across the family's scales and classifies per the
/// annulus / ball containments.
Lacunarity classify_lacunarity(const BumpFamily& family);

/// Locality of a rectangle relative to R00 = [-1,1]^2 with 5R00 = [-5,5]^2,
/// closed containments on both sides (dyadic endpoints may touch +/-5).
enum class LocalityClass { main, error, hybrid_iii, hybrid_iv };
LocalityClass classify_rectangle(const DyadicRectangle& r);

/// Discrete bi-parameter paraproduct specification (Eq-24/25/417 style):
/// rectangles, coefficients with |c_R| <= 1, one bump family triple per
/// axis, and an optional phi'_0 (x) phi''_0 localization cutoff.
struct DiscreteParaproductSpec {
    std::string name;
    std::vector<DyadicRectangle> rectangles;
    std::vector<complex> coefficients;
    std::array<FamilySpec, 3> families_axis1;
    std::array<FamilySpec, 3> families_axis2;
    bool localized = false;
};

/// Evaluates sum_R c_R |R|^{-1/2} <f, phi1_R> <g, phi2_R> phi3_R(x) (times
/// the localization cutoff when present). Inner products conjugate the bump.
///
/// Terms are accumulated per locality class in a canonical rectangle order
/// and the four partial fields are combined in a fixed order, so evaluating
/// the four split specs and summing them pointwise reproduces the unsplit
/// evaluation bitwise.
SampledFunction eval_discrete_paraproduct(const DiscreteParaproductSpec& spec,
                                          const FilterBank& bank, const SampledFunction& f,
                                          const SampledFunction& g,
                                          const LocalizationPartition* part = nullptr);

/// 1D variant (Eq. 24): only the I components and axis-1 families are used.
SampledFunction eval_discrete_paraproduct_1d(const DiscreteParaproductSpec& spec,
                                             const FilterBank& bank, const SampledFunction& f,
                                             const SampledFunction& g);

/// n-linear d-parameter variant (Eq. 26) on 1D or 2D grids: families.size()
/// must be inputs.size() + 1 per axis; the weight is |R|^{-(n-1)/2}.
SampledFunction eval_discrete_paraproduct_n(
    const std::vector<DyadicRectangle>& rectangles, const std::vector<complex>& coefficients,
    const std::vector<FamilySpec>& families_axis1, const std::vector<FamilySpec>& families_axis2,
    const FilterBank& bank, const std::vector<const SampledFunction*>& inputs);

struct FourWaySplit {
    DiscreteParaproductSpec main, error, hybrid_iii, hybrid_iv;
};

/// Partitions the rectangle set by locality class (Eq-511..515). Requires
/// |I|, |J| <= 1 and the Eq-417 localization flag.
FourWaySplit split_four_terms(const DiscreteParaproductSpec& spec);

struct PipelineOptions {
    /// Rectangle positions restricted to intervals inside
    /// [-position_extent, position_extent].
    double position_extent = 4.0;
    /// Highest dyadic scale for lacunary axes; clamped to the bank's k_max.
    int max_scale = 4;
    bool localized = true;
    /// Quadrature step for the scale-constant integrals.
    double resolution = 1.0 / 32.0;
};

/// Builds the discrete paraproduct spec for one of the sixteen parts
/// (row-major over {lh, hl, hh, ll} x {lh, hl, hh, ll}, index 1..16):
/// bump family triples per the part's type, ll axes pinned at scale 0, and
/// c_R given by the windowed symbol integrals per scale pair, normalized so
/// sup |c_R| = 1.
DiscreteParaproductSpec paraproduct_from_pipeline(int part_index, const SymbolSpec& m0,
                                                  const FilterBank& bank,
                                                  const PipelineOptions& opts = {});

/// Line-oriented text serialization: a header naming the bump families and
/// localization, then one rectangle per line (k_I, n_I, k_J, n_J, re, im).
void write_spec(const DiscreteParaproductSpec& spec, std::ostream& os);
DiscreteParaproductSpec read_spec(std::istream& is);

}  // namespace paralab
