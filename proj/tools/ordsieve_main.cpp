// ordsieve: sieve estimation of latent and error distributions from pairs
// of order statistics, plus the diagnostic reproductions.
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 non-convergence
// (result still written), 5 estimation failure.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ordsieve/cli.hpp"
#include "ordsieve/io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"sieve estimation from order-statistic pairs"};
    app.require_subcommand(1);

    std::string config_path, data_path, out_path;
    std::int64_t seed_override = 0;
    bool seed_set = false;
    int jobs = 1;
    std::uint64_t ross_seed = 1;
    std::size_t ross_draws = 1000000;

    const auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed_override, "override the config seed")
            ->each([&](const std::string&) { seed_set = true; });
    };

    CLI::App* sim = app.add_subcommand("simulate", "draw a sample from the configured truth");
    sim->add_option("--config", config_path, "run configuration file")->required();
    sim->add_option("--out", out_path, "output CSV path")->required();
    add_seed(sim);

    CLI::App* est = app.add_subcommand("estimate", "fit the sieves to a data file");
    est->add_option("--config", config_path, "run configuration file")->required();
    est->add_option("--data", data_path, "input sample CSV")->required();
    est->add_option("--out", out_path, "output prefix (<out>.estimate.txt, <out>.curves.csv)")
        ->required();
    add_seed(est);

    CLI::App* mc = app.add_subcommand("montecarlo", "replication study");
    mc->add_option("--config", config_path, "run configuration file")->required();
    mc->add_option("--out", out_path, "output directory")->required();
    mc->add_option("--jobs", jobs, "concurrent replications")->check(CLI::PositiveNumber);
    add_seed(mc);

    CLI::App* ross = app.add_subcommand("rossberg", "spacing/cross-sum/ch.f.-ratio diagnostics");
    ross->add_option("--out", out_path, "output directory")->required();
    ross->add_option("--seed", ross_seed, "master seed");
    ross->add_option("--draws", ross_draws, "draws per sample")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (ross->parsed()) return ordsieve::cmd_rossberg(ross_seed, ross_draws, out_path);
        ordsieve::RunConfig rc =
            ordsieve::parse_run_config(ordsieve::KeyValueConfig::parse_file(config_path));
        if (seed_set) rc.seed = static_cast<std::uint64_t>(seed_override);
        if (sim->parsed()) return ordsieve::cmd_simulate(rc, out_path);
        if (est->parsed()) return ordsieve::cmd_estimate(rc, data_path, out_path);
        return ordsieve::cmd_montecarlo(rc, out_path, jobs);
    } catch (const ordsieve::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ordsieve::data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "estimation error: " << e.what() << "\n";
        return 5;
    }
}
