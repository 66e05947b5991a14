#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "paralab/common.hpp"

namespace paralab {

/// Differential-inequality family a symbol claims to satisfy. The kind fixes
/// the right-hand-side weight: homogeneous block norms |.|^{-order} for the
/// multiplier conditions, inhomogeneous (1+|.|)^{-order} for the
/// pseudo-differential ones. x-derivatives, where the kind admits them, carry
/// no weight.
enum class SymbolClassKind {
    hormander_mikhlin,      // |xi|^{-|alpha|}, full frequency vector
    bilinear_bs0,           // (1+|xi|+|eta|)^{-|alpha|-|beta|}, grouped by input
    marcinkiewicz_2param,   // prod over the two parameter blocks, homogeneous
    marcinkiewicz_dparam,   // d-parameter homogeneous blocks
    pseudo_biparam,         // inhomogeneous blocks, x-dependence allowed
    pseudo_dparam,          // d-parameter inhomogeneous, x-dependence allowed
    inhomog_biparam,        // inhomogeneous blocks, x-independent
};

bool class_is_homogeneous(SymbolClassKind kind);
bool class_admits_x(SymbolClassKind kind);
std::string class_name(SymbolClassKind kind);

struct SymbolClass {
    SymbolClassKind kind = SymbolClassKind::inhomog_biparam;
    int max_order = 4;
    double constant = 1.0;
};

/// An n-linear, d-parameter multiplier or x-dependent symbol.
///
/// Frequency arguments are stored parameter-major: block i (i < d) gathers
/// the i-th coordinate of each of the n inputs, so for n = d = 2 the vector
/// reads (xi1, eta1, xi2, eta2).
///
/// Homogeneous catalog symbols return 0 at points lying exactly on their
/// singular planes; the choice only moves single lattice points in
/// downstream quadratures and is fixed for reproducibility.
struct SymbolSpec {
    std::string name;
    int arity = 2;   // n
    int params = 2;  // d
    bool x_dependent = false;
    SymbolClass claimed;
    /// Excluded frequency set: the block origins (xi_i, eta_i, ...) = 0.
    bool singular_blocks = false;

    std::function<complex(std::span<const double> x, std::span<const double> freq)> eval;

    /// Optional split m = axis1(xi1,eta1) * axis2(xi2,eta2) for bi-parameter
    /// x-independent symbols; evaluators use it to tabulate per-axis tables.
    std::function<double(double, double)> axis_factor1;
    std::function<double(double, double)> axis_factor2;
    bool axis_separable = false;

    int freq_vars() const { return arity * params; }

    complex operator()(std::span<const double> x, std::span<const double> freq) const {
        return eval(x, freq);
    }
    /// Bilinear bi-parameter shorthand (x-independent symbols).
    complex multiplier(double xi1, double eta1, double xi2, double eta2) const;
};

struct MultiIndexRatio {
    std::vector<int> x_order;     // per x variable (empty when class has no x)
    std::vector<int> freq_order;  // per frequency variable, parameter-major
    double max_ratio = 0.0;
    std::vector<double> worst_point;  // x vars then freq vars
};

struct SymbolClassReport {
    std::vector<MultiIndexRatio> rows;
    int samples_used = 0;
    int samples_skipped = 0;  // inside the singular margin
    bool step_warning = false;
    double constant = 0.0;
    bool pass = false;
    /// Smallest total derivative order whose ratio exceeds the constant
    /// (-1 when everything passes).
    int first_failing_order = -1;
};

/// Estimates every derivative up to total order claimed.max_order by
/// 4th-order central differences with per-block-scaled steps
/// (step_i = fd_step * (1 + |block_i|)), and reports
/// max |d^alpha s| / weight per multi-index. Sample points draw log-uniform
/// magnitudes per variable; for homogeneous classes, points with any block
/// norm below 1/4 are skipped and counted.
SymbolClassReport verify_symbol_class(const SymbolSpec& s, int sample_count, double fd_step);

/// Named built-in symbols: identity; the degree-0 Marcinkiewicz product;
/// a one-parameter Mikhlin ratio (and its bi-parameter extension); a smooth
/// inhomogeneous bi-parameter symbol; separable and non-separable x-dependent
/// symbols; and a deliberately failing one.
std::vector<SymbolSpec> builtin_symbols();

/// Catalog lookup by name; throws config_error when absent.
SymbolSpec builtin_symbol(const std::string& name);

}  // namespace paralab
