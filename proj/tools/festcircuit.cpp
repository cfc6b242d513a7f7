#include <cstdlib>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "festcircuit/config.hpp"
#include "festcircuit/pipeline.hpp"

namespace {

struct CliOptions {
    std::optional<std::filesystem::path> config_path;
    std::vector<int> period;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> repeats;
    std::optional<std::string> reference_country;
    std::optional<std::filesystem::path> out_dir;
    std::optional<std::size_t> workers;
};

festcircuit::RunConfig build_config(const CliOptions& options) {
    festcircuit::ConfigOverrides overrides;
    if (options.period.size() == 2) {
        overrides.period_start = options.period[0];
        overrides.period_end = options.period[1];
    }
    overrides.seed = options.seed;
    overrides.repeats = options.repeats;
    overrides.reference_country = options.reference_country;
    overrides.out_dir = options.out_dir;
    overrides.workers = options.workers;

    std::optional<std::filesystem::path> data_root;
    if (const char* env = std::getenv("FESTCIRCUIT_DATA_DIR")) data_root = env;
    return festcircuit::load_config(options.config_path, data_root, overrides);
}

int run_analyses(const CliOptions& options, const std::set<std::string>& analyses) {
    const auto config = build_config(options);
    festcircuit::pipeline::cmd_run(config, analyses, std::cout);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Film festival circuit analytics"};
    app.require_subcommand(1);
    app.fallthrough(); // flags may follow the subcommand name

    CliOptions options;
    app.add_option("--config", options.config_path, "JSON config file")
        ->check(CLI::ExistingFile);
    app.add_option("--period", options.period, "Analysis period, two years")
        ->expected(2);
    app.add_option("--seed", options.seed, "Bootstrap RNG seed");
    app.add_option("--repeats", options.repeats, "Bootstrap repeats");
    app.add_option("--reference-country", options.reference_country,
                   "Country code anchoring the distance covariate");
    app.add_option("--out-dir", options.out_dir, "Output directory");
    app.add_option("--workers", options.workers, "Worker thread count");

    auto* validate = app.add_subcommand("validate", "Check inputs and report dataset counts");
    auto* balance = app.add_subcommand("balance", "Representation balance reports");
    auto* fit = app.add_subcommand("fit", "Appearance regression and UIS correlation");
    auto* flows = app.add_subcommand("flows", "Flow matrix, trade balances, star networks");
    auto* diversity = app.add_subcommand("diversity", "Bootstrap diversity threshold sweeps");
    auto* all = app.add_subcommand("all", "Run every analysis");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            return festcircuit::pipeline::cmd_validate(build_config(options), std::cout);
        }
        if (balance->parsed()) return run_analyses(options, {"balance"});
        if (fit->parsed()) return run_analyses(options, {"fit"});
        if (flows->parsed()) return run_analyses(options, {"flows"});
        if (diversity->parsed()) return run_analyses(options, {"diversity"});
        if (all->parsed()) return run_analyses(options, {"balance", "fit", "flows", "diversity"});
    } catch (const std::exception& e) {
        std::cerr << "festcircuit: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
