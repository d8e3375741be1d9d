// dymo-sim: scenario runs, parameter sweeps and estimator validation.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "dymo/error.hpp"
#include "dymo/harness.hpp"
#include "dymo/metrics.hpp"

namespace {

using dymo::harness::RunConfig;

struct Overrides {
    std::optional<std::string> config;
    std::vector<std::pair<std::string, std::string>> settings;
};

// Registers `--flag` that records `key = value` for later application.
void setting_flag(CLI::App& app, Overrides& ov, const std::string& flag, const std::string& key,
                  const std::string& help) {
    app.add_option_function<std::string>(
        flag, [&ov, key](const std::string& v) { ov.settings.emplace_back(key, v); }, help);
}

void bool_flag(CLI::App& app, Overrides& ov, const std::string& flag, const std::string& key,
               const std::string& help) {
    app.add_flag_callback(flag, [&ov, key] { ov.settings.emplace_back(key, "true"); }, help);
}

RunConfig resolve(const Overrides& ov) {
    RunConfig config;
    config.out_dir = dymo::harness::default_out_dir();
    if (ov.config) {
        dymo::harness::apply_config_file(config, *ov.config);
    }
    for (const auto& [key, value] : ov.settings) {
        try {
            dymo::harness::apply_setting(config, key, value);
        } catch (const dymo::ConfigError& e) {
            throw dymo::ConfigError(std::string("command line: ") + e.what());
        }
    }
    config.validate();
    return config;
}

int cmd_run(const Overrides& ov) {
    const RunConfig config = resolve(ov);
    const auto result = dymo::harness::run(config);
    dymo::harness::write_summary(std::cout, result);
    std::cerr << "artifacts written to " << config.out_dir.string() << '\n';
    return 0;
}

int cmd_validate(std::uint64_t seed, int runs) {
    const auto checks = dymo::harness::validate_estimators(seed, runs);
    bool ok = true;
    for (const auto& c : checks) {
        std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  (" << c.detail << ")\n";
        ok = ok && c.passed;
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multicast SNR-threshold estimation simulator"};
    app.require_subcommand(1);

    Overrides ov;
    CLI::App* run = app.add_subcommand("run", "simulate scenarios and write CSV artifacts");
    run->add_option_function<std::string>(
        "--config", [&ov](const std::string& v) { ov.config = v; },
        "key = value config file; flags override it");
    setting_flag(*run, ov, "--scenario", "scenario", "homogeneous | stadium | failure");
    setting_flag(*run, ov, "--m", "m", "number of UEs (default 20000)");
    setting_flag(*run, ov, "--p", "p", "QoS threshold (default 0.001)");
    setting_flag(*run, ov, "--r", "r", "reports per second (default 5)");
    setting_flag(*run, ov, "--duration", "duration", "reporting intervals (default 150)");
    setting_flag(*run, ov, "--seed", "seed", "base seed; instance k uses seed + k");
    setting_flag(*run, ov, "--instances", "instances", "instances per sweep point (default 1)");
    setting_flag(*run, ov, "--schemes", "schemes",
                 "comma list of dymo,optimal,uniform,order_stats_hist,order_stats_nohist");
    setting_flag(*run, ov, "--mcs-table", "mcs_table", "CSV mcs_index,min_snr_dB,spectral_efficiency");
    setting_flag(*run, ov, "--out", "out", "output directory (default $DYMO_OUT_DIR or dymo-out)");
    setting_flag(*run, ov, "--parallel", "parallel", "instances simulated at once (default 1)");
    setting_flag(*run, ov, "--L", "L", "per-interval SNR change bound in dB (default 5)");
    setting_flag(*run, ov, "--alpha", "alpha", "smoothing factor (default 0.5)");
    setting_flag(*run, ov, "--m-guess", "m_guess", "m | unknown | number: DyMo's first population guess");
    setting_flag(*run, ov, "--prior", "prior_probability", "first report probability when m is unknown");
    setting_flag(*run, ov, "--warmup", "warmup", "leading intervals left out of RMSE (default 5)");
    bool_flag(*run, ov, "--smooth-threshold", "smooth_threshold", "also smooth DyMo's s(t)");
    bool_flag(*run, ov, "--dump-traces", "dump_traces", "write heatmap, instruction and histogram dumps");
    std::vector<std::string> sweep;
    run->add_option("--sweep", sweep, "sweep <m|p|r> <comma list>")->expected(2);

    CLI::App* validate = app.add_subcommand("validate", "check the estimators numerically");
    std::uint64_t vseed = 1;
    int vruns = 500;
    validate->add_option("--seed", vseed, "seed of the Monte-Carlo study");
    validate->add_option("--runs", vruns, "Monte-Carlo runs per p")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            if (!sweep.empty()) {
                ov.settings.emplace_back("sweep_axis", sweep[0]);
                ov.settings.emplace_back("sweep_values", sweep[1]);
            }
            return cmd_run(ov);
        }
        return cmd_validate(vseed, vruns);
    } catch (const dymo::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
