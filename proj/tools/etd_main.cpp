// etd: far-field simulation, topological-derivative imaging and noise experiments for elastic media.

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>

#include "etd/commands.hpp"

namespace {

struct GlobalOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> threads;
};

void add_global_options(CLI::App* app, GlobalOptions& g) {
    app->add_option("--config", g.config, "configuration file (.ini or .json)");
    app->add_option("--seed", g.seed, "random seed, overrides run.seed");
    app->add_option("--out", g.out, "output directory, overrides run.out");
    app->add_option("--threads", g.threads, "worker threads (0 = hardware), overrides run.threads");
}

etd::ExperimentConfig resolve_config(const GlobalOptions& g) {
    etd::ExperimentConfig cfg = g.config.empty() ? etd::ExperimentConfig{} : etd::load_config(g.config);
    if (g.seed) cfg.seed = *g.seed;
    if (g.out) cfg.out = *g.out;
    if (g.threads) cfg.threads = *g.threads;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Elastic topological derivative imaging"};
    app.require_subcommand(1);
    GlobalOptions g;
    add_global_options(&app, g);
    app.fallthrough();

    auto* simulate = app.add_subcommand("simulate", "synthesize a far-field dataset");
    auto* image = app.add_subcommand("image", "imaging maps from a dataset");
    auto* kernels = app.add_subcommand("kernels", "resolution kernels about the grid center");
    auto* noise = app.add_subcommand("noise", "measurement and medium noise ensembles");
    auto* verify = app.add_subcommand("verify", "plane-wave superposition identity suite");
    std::string dataset;
    image->add_option("--dataset", dataset, "dataset prefix (default <out>/dataset)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? etd::kExitOk : etd::kExitValidation;
    }

    try {
        const etd::ExperimentConfig cfg = resolve_config(g);
        if (simulate->parsed()) return etd::cmd_simulate(cfg, std::cout);
        if (image->parsed()) return etd::cmd_image(cfg, dataset, std::cout);
        if (kernels->parsed()) return etd::cmd_kernels(cfg, std::cout);
        if (noise->parsed()) return etd::cmd_noise(cfg, std::cout);
        if (verify->parsed()) return etd::cmd_verify(cfg, std::cout);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return etd::kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return etd::kExitError;
    }
    return etd::kExitError;
}
