// putbond: command-line front end for the puttable coupon bond pricer.
//
// Exit codes: 0 success, 1 domain or numerical error, 2 configuration or usage error.

#include <cstdint>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "putbond/commands.hpp"
#include "putbond/config.hpp"
#include "putbond/errors.hpp"

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitConfig = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Price a discrete-coupon bond with early redemption under a structural firm-value model"};
    app.set_version_flag("--version", "putbond 1.0.0");

    std::string command;
    std::string config_path;
    std::string engine = "analytic";
    std::string figure;
    std::string out_dir;
    std::uint64_t seed = 0;
    putbond::CommandOptions opts;

    app.add_option("command", command, "validate | boundaries | price | duration | spread | sweep | config")
        ->required()
        ->check(CLI::IsMember({"validate", "boundaries", "price", "duration", "spread", "sweep", "config"}));
    app.add_option("--config", config_path, "JSON run configuration (defaults to the basic three-year bond)")
        ->check(CLI::ExistingFile);
    app.add_option("--v", opts.V, "firm value")->capture_default_str();
    app.add_option("--t", opts.t, "valuation time in years")->capture_default_str();
    app.add_option("--engine", engine, "pricing engine for `price`")
        ->check(CLI::IsMember({"analytic", "fd", "both"}))
        ->capture_default_str();
    app.add_option("--figure", figure, "figure id for `sweep` (fig4 .. fig16)");
    auto* seed_opt = app.add_option("--seed", seed, "seed of the randomized lattice integrator");
    auto* out_opt = app.add_option("--out", out_dir, "output directory for CSV files");
    app.add_flag("--json", opts.json, "machine-readable JSON output");
    app.add_flag("--full-sensitivity", opts.full_sensitivity,
                 "also report the duration with boundaries re-solved under the rate bump");
    app.add_option("--t-step", opts.t_step, "time spacing of time sweeps")->capture_default_str();
    app.add_option("--v-step", opts.v_step, "firm-value spacing of firm-value sweeps")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    static const std::map<std::string, putbond::Engine> engines{
        {"analytic", putbond::Engine::Analytic}, {"fd", putbond::Engine::Fd}, {"both", putbond::Engine::Both}};
    opts.engine = engines.at(engine);
    if (*seed_opt) opts.seed = seed;
    if (*out_opt) opts.out_dir = out_dir;

    try {
        const putbond::RunConfig cfg = config_path.empty() ? putbond::RunConfig{} : putbond::load_config(config_path);
        if (command == "validate") putbond::cmd_validate(cfg, opts, std::cout);
        else if (command == "boundaries") putbond::cmd_boundaries(cfg, opts, std::cout);
        else if (command == "price") putbond::cmd_price(cfg, opts, std::cout);
        else if (command == "duration") putbond::cmd_duration(cfg, opts, std::cout);
        else if (command == "spread") putbond::cmd_spread(cfg, opts, std::cout);
        else if (command == "config") putbond::cmd_config(cfg, opts, std::cout);
        else if (command == "sweep") {
            if (figure.empty()) {
                std::cerr << "error: sweep needs --figure\n";
                return kExitConfig;
            }
            putbond::cmd_sweep(cfg, figure, opts, std::cout);
        }
    } catch (const putbond::Error& e) {
        std::cerr << "error [" << putbond::to_string(e.code()) << "]: " << e.what() << '\n';
        const bool config = e.code() == putbond::ErrorCode::ConfigError || e.code() == putbond::ErrorCode::UnknownFigure;
        return config ? kExitConfig : kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    }
    return 0;
}
