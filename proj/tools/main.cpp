#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "paralab/harness.hpp"
#include "paralab/operators.hpp"
#include "paralab/paraproducts.hpp"

using namespace paralab;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::int64_t grid_n = 0;
    double grid_l = 0.0;
    std::string triples;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "flat key-value config file");
    cmd->add_option("--out", flags.out_dir, "output directory for CSV files");
    cmd->add_option("--seed", flags.seed, "random seed")->each([&](const std::string&) {
        flags.seed_set = true;
    });
    cmd->add_option("--grid-n", flags.grid_n, "samples per axis (power of two)");
    cmd->add_option("--grid-l", flags.grid_l, "torus period");
    cmd->add_option("--triples", flags.triples, "exponent pairs \"p,q;p,q\", inf allowed");
}

ExperimentConfig resolve(const CommonFlags& flags) {
    ExperimentConfig cfg =
        flags.config_path.empty() ? default_config() : load_config(flags.config_path);
    if (flags.seed_set) cfg.seed = flags.seed;
    if (flags.grid_n > 0) cfg.grid_n = flags.grid_n;
    if (flags.grid_l > 0.0) cfg.grid_l = flags.grid_l;
    if (!flags.triples.empty()) cfg.triples = parse_triples(flags.triples);
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    validate_config(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    return cfg;
}

int run_to_csv(const ExperimentConfig& cfg, const std::string& filename,
               int (*runner)(const ExperimentConfig&, std::ostream&, std::ostream&)) {
    const std::string path = cfg.out_dir + "/" + filename;
    std::ofstream csv(path);
    if (!csv) {
        std::cerr << "cannot open " << path << " for writing\n";
        return exit_config_error;
    }
    const int code = runner(cfg, csv, std::cout);
    std::cout << "wrote " << path << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for bi-parameter multipliers and paraproducts on a sampled torus"};
    app.require_subcommand(1);

    CommonFlags flags;

    CLI::App* reconstruct = app.add_subcommand("reconstruct", "run the reconstruction identities");
    add_common(reconstruct, flags);

    CLI::App* norms = app.add_subcommand("norms", "run the Hoelder norm-ratio sweep");
    add_common(norms, flags);
    int norm_trials = 0;
    norms->add_option("--trials", norm_trials, "trials per operator and class");

    CLI::App* decay = app.add_subcommand("decay", "run the decay-exponent fits");
    add_common(decay, flags);

    CLI::App* symbols = app.add_subcommand("symbols", "symbol utilities");
    CLI::App* symbols_verify = symbols->add_subcommand("verify", "verify catalog symbol classes");
    add_common(symbols_verify, flags);

    CLI::App* paraproduct = app.add_subcommand("paraproduct", "paraproduct utilities");
    CLI::App* pp_eval = paraproduct->add_subcommand("eval", "evaluate a serialized spec");
    add_common(pp_eval, flags);
    std::string spec_path, f_path, g_path, out_path = "paraproduct_out.bin";
    pp_eval->add_option("--spec", spec_path, "spec file (text format)")->required();
    pp_eval->add_option("--f", f_path, "first input (binary SampledFunction)");
    pp_eval->add_option("--g", g_path, "second input (binary SampledFunction)");
    pp_eval->add_option("--output", out_path, "output path (binary SampledFunction)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (reconstruct->parsed()) {
            return run_to_csv(resolve(flags), "reconstruct.csv", run_reconstruction_suite);
        }
        if (norms->parsed()) {
            ExperimentConfig cfg = resolve(flags);
            if (norm_trials > 0) cfg.trials = norm_trials;
            return run_to_csv(cfg, "norms.csv", run_norm_sweep);
        }
        if (decay->parsed()) {
            return run_to_csv(resolve(flags), "decay.csv", run_decay_fits);
        }
        if (symbols_verify->parsed()) {
            return run_to_csv(resolve(flags), "symbols.csv", run_symbol_verification);
        }
        if (pp_eval->parsed()) {
            ExperimentConfig cfg = resolve(flags);
            std::ifstream spec_is(spec_path);
            if (!spec_is) throw config_error("cannot open spec file " + spec_path);
            DiscreteParaproductSpec spec = read_spec(spec_is);

            TorusGrid grid(2, cfg.grid_n, cfg.grid_l);
            FilterBank bank(grid);
            LocalizationPartition part(grid);
            SampledFunction f = f_path.empty()
                                    ? random_band_limited(grid, cfg.seed + 1, bank.band_indicator())
                                    : load_binary(f_path);
            SampledFunction g = g_path.empty()
                                    ? random_band_limited(grid, cfg.seed + 2, bank.band_indicator())
                                    : load_binary(g_path);
            SampledFunction out = eval_discrete_paraproduct(spec, bank, f, g, &part);
            save_binary(out, out_path);
            std::cout << "evaluated " << spec.rectangles.size() << " rectangles; ||out||_2 = "
                      << lp_norm(out, LpExponent(2.0)) << "; wrote " << out_path << "\n";
            return exit_pass;
        }
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_tolerance_failure;
    }
    return exit_config_error;
}
