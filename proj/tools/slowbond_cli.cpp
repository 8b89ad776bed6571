#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "slowbond.h"

namespace {

struct CommonArgs {
    std::string config;
    std::string out = ".";
    std::uint64_t seed = 0;
    bool has_seed = false;
    int workers = 0;
    std::string regime;
    double beta = 0.0;
    bool has_beta = false;
    double alpha = 0.0;
    bool has_alpha = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config, "campaign config file")->required();
    cmd->add_option("--out", args.out, "output directory (default: current directory)");
    cmd->add_option("--seed", args.seed, "override the config seed")
        ->each([&](const std::string&) { args.has_seed = true; });
    cmd->add_option("--workers", args.workers,
                    "worker threads (default: SLOWBOND_WORKERS or 1)");
    cmd->add_option("--regime", args.regime, "override the regime: line, robin or neumann")
        ->check(CLI::IsMember({"line", "robin", "neumann"}));
    cmd->add_option("--beta", args.beta, "override the slowdown exponent beta")
        ->each([&](const std::string&) { args.has_beta = true; });
    cmd->add_option("--alpha", args.alpha, "override the slow-bond strength alpha")
        ->each([&](const std::string&) { args.has_alpha = true; });
}

int run(const std::string& command, const CommonArgs& args) {
    int workers = args.workers;
    if (workers <= 0) {
        const char* env = std::getenv("SLOWBOND_WORKERS");
        workers = env ? std::atoi(env) : 1;
        if (workers <= 0) workers = 1;
    }
    int exit_code = 0;
    const sb_status status = sb_campaign_run(
        command.c_str(), args.config.c_str(), args.out.c_str(),
        args.has_seed ? &args.seed : nullptr, workers,
        args.regime.empty() ? nullptr : args.regime.c_str(),
        args.has_beta ? &args.beta : nullptr, args.has_alpha ? &args.alpha : nullptr, &exit_code);
    if (status != SB_OK) {
        std::cerr << "slowbond-cli: " << sb_last_error() << "\n";
        return 2;
    }
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for the slow-bond exclusion process"};
    app.require_subcommand(1);

    CommonArgs args;
    const char* names[] = {"validate", "evolve", "simulate", "compare", "report"};
    const char* briefs[] = {
        "check battery functions and semigroup images against their regime class",
        "evaluate a semigroup image on a grid and write it as CSV",
        "sample the fluctuation field over replicas and write samples.csv",
        "confront sampled covariances with the OU oracle",
        "re-render a comparison table as a readable summary",
    };
    for (int i = 0; i < 5; ++i) add_common(app.add_subcommand(names[i], briefs[i]), args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    return run(app.get_subcommands().front()->get_name(), args);
}
