#pragma once

#include <iosfwd>
#include <optional>

#include "paralab/paraproducts.hpp"
#include "paralab/random.hpp"

namespace paralab {

/// Hoelder exponent triple with 1/r = 1/p + 1/q > 0; r may drop to (1/2, 1].
struct ExponentTriple {
    LpExponent p = LpExponent(2.0);
    LpExponent q = LpExponent(2.0);
    double r = 1.0;
};

/// Derives r and validates 1 < p,q <= inf, 1/r = 1/p + 1/q within 1e-12,
/// r > 1/2.
ExponentTriple make_triple(const LpExponent& p, const LpExponent& q);

struct ExperimentConfig {
    std::int64_t grid_n = 256;
    double grid_l = 8.0;
    int k_max_override = -1;  // negative: derive from the grid
    int smoothness_order = 4;
    std::string symbol = "eq39_smooth";
    std::vector<ExponentTriple> triples;  // defaults to (2,2),(4,4),(2,inf),(3,3)
    int trials = 200;
    std::uint64_t seed = 12345;
    std::string out_dir = ".";
};

ExperimentConfig default_config();

/// Flat key-value file ("key value" or "key = value" per line, '#' comments).
/// Keys: grid_n, grid_l, k_max, smoothness_order, symbol, triples, trials,
/// seed, out_dir.
ExperimentConfig load_config(const std::string& path);
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value);
void validate_config(const ExperimentConfig& cfg);

/// "p,q;p,q;..." with "inf" allowed.
std::vector<ExponentTriple> parse_triples(const std::string& text);

/// Exit codes shared by the harness entry points.
inline constexpr int exit_pass = 0;
inline constexpr int exit_tolerance_failure = 1;
inline constexpr int exit_config_error = 2;

/// Reconstruction identities (telescoping, Bony, localization, the sixteen
/// masks and the sixteen-term operator split), one CSV row per identity with
/// its max error and tolerance, plus a deliberately truncated
/// expected-failure control. Returns exit_pass iff every non-control row is
/// within tolerance.
int run_reconstruction_suite(const ExperimentConfig& cfg, std::ostream& csv, std::ostream& log);

/// Norm-ratio sweep: operators {identity, marcinkiewicz multiplier, pipeline
/// (lh,hl), pipeline (ll,ll)} x exponent triples x trial classes (centered
/// band-limited fields and translates at distances 1..8 probing the chi~
/// weights), at grid_n and 2*grid_n. Rows:
/// operator,p,q,r,N,trial_class,max_ratio.
int run_norm_sweep(const ExperimentConfig& cfg, std::ostream& csv, std::ostream& log);

/// Decay-fit suite: m_l coefficients of the x-dependent catalog symbols,
/// coefficient-tensor rays of the eq39-class ones, and the window-transform
/// control row. Rows: quantity,direction,fitted_slope,r2. Pass threshold:
/// slope <= -4 and r2 >= 0.95.
int run_decay_fits(const ExperimentConfig& cfg, std::ostream& csv, std::ostream& log);

/// Class verification for the whole catalog. Rows:
/// symbol,multi_index,max_ratio,worst_point (one file section per symbol).
/// Passes iff every symbol matches its expected verdict (the deliberately
/// failing one must fail at order 2).
int run_symbol_verification(const ExperimentConfig& cfg, std::ostream& csv, std::ostream& log);

/// Mask export helper (frequency, value) for plotting.
void write_mask_csv(const FilterBank& bank, MaskKind kind, int k, std::ostream& os);

}  // namespace paralab
