// upmeta: uplink SINR meta distribution of a Poisson cellular network.
// Three analytic routes (dominant-interferer, beta approximation, Gil-Pelaez
// inversion) plus a Monte-Carlo network simulator for validation.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "upmeta/cli_commands.hpp"
#include "upmeta/run_config.hpp"

namespace {

upmeta::RunConfig load_config(const std::string& path) {
    if (path.empty()) return upmeta::RunConfig{};
    return upmeta::RunConfig::from_json_file(path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"uplink SINR meta distribution toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_csv;
    unsigned threads = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("-c,--config", config_path, "JSON configuration file");
        cmd->add_option("-o,--out", out_csv, "override the output CSV path");
        cmd->add_option("-j,--threads", threads, "worker threads (0 = all cores)");
    };

    CLI::App* meta = app.add_subcommand("meta", "evaluate the meta distribution grid");
    add_common(meta);

    CLI::App* validate =
        app.add_subcommand("validate", "compare analytic methods against the simulator");
    add_common(validate);

    CLI::App* moments = app.add_subcommand("moments", "tabulate success-probability moments");
    add_common(moments);
    std::vector<double> b_list = {0.0, 1.0, 2.0};
    moments->add_option("-b,--orders", b_list, "moment orders to tabulate");

    CLI11_PARSE(app, argc, argv);

    upmeta::RunConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return upmeta::kExitConfigError;
    }
    if (!out_csv.empty()) cfg.csv_path = out_csv;
    if (threads != 0) {
        cfg.threads = threads;
        cfg.sim.threads = threads;
        cfg.gil_pelaez.threads = threads;
    }

    if (meta->parsed()) return upmeta::cmd_meta(cfg, std::cerr);
    if (validate->parsed()) return upmeta::cmd_validate(cfg, std::cerr);
    if (moments->parsed()) return upmeta::cmd_moments(cfg, b_list, std::cerr);
    return upmeta::kExitConfigError;
}
