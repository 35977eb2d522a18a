// Command-line front end: storage arbitrage in two-settlement markets.
// Subcommands: synth, ingest, stats, train, forecast, backtest, sweep, report.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arb/commands.hpp"

namespace {

std::vector<std::string> split_csv_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"energy storage arbitrage in two-settlement markets"};
    app.require_subcommand(1);

    std::string config_path;
    std::string zone, modes, out_dir;
    std::uint64_t seed = 0;
    int jobs = 0;
    bool seed_set = false, jobs_set = false;

    app.add_option("--config", config_path, "TOML run configuration")->required();
    app.add_option("--zone", zone, "zone override");
    app.add_option("--modes", modes, "comma-separated participation modes");
    app.add_option("--seed", seed, "seed override")->each([&](const std::string&) { seed_set = true; });
    app.add_option("--jobs", jobs, "worker cap override")->each([&](const std::string&) { jobs_set = true; });
    app.add_option("--out", out_dir, "output directory override");

    const std::vector<std::string> names = {"synth", "ingest", "stats",    "train",
                                            "forecast", "backtest", "sweep", "report"};
    for (const auto& n : names) app.add_subcommand(n)->fallthrough();

    CLI11_PARSE(app, argc, argv);

    arb::CliOverrides overrides;
    if (!zone.empty()) overrides.zone = zone;
    if (!modes.empty()) overrides.modes = split_csv_list(modes);
    if (seed_set) overrides.seed = seed;
    if (jobs_set) overrides.jobs = jobs;
    if (!out_dir.empty()) overrides.out_dir = out_dir;

    try {
        arb::RunConfig cfg = arb::load_config(config_path, overrides);
        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "synth") return arb::cmd_synth(cfg, std::cout);
        if (sub == "ingest") return arb::cmd_ingest(cfg, std::cout);
        if (sub == "stats") return arb::cmd_stats(cfg, std::cout);
        if (sub == "train") return arb::cmd_train(cfg, std::cout);
        if (sub == "forecast") return arb::cmd_forecast(cfg, std::cout);
        if (sub == "backtest") return arb::cmd_backtest(cfg, std::cout);
        if (sub == "sweep") return arb::cmd_sweep(cfg, std::cout);
        if (sub == "report") return arb::cmd_report(cfg, std::cout);
        std::cerr << "unknown subcommand\n";
        return 2;
    } catch (const arb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const arb::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const arb::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
