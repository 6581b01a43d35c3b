// Command-line front end: reproducible rate experiments, bound evaluation
// and drift validation, with CSV output.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sdecoup/config.hpp"
#include "sdecoup/gaussian.hpp"

namespace {

using namespace sdecoup;

struct RatesArgs {
    std::string config_path;
    std::string output_path;  // empty: stdout
    std::optional<std::uint64_t> seed;
    std::optional<long> replications;
    std::optional<std::string> n_list;
    std::optional<int> threads;
};

void apply_overrides(const RatesArgs& args, ExperimentConfig& cfg) {
    if (args.seed) cfg.master_seed = *args.seed;
    if (args.replications) cfg.replications = *args.replications;
    if (args.threads) cfg.threads = *args.threads;
    if (args.n_list) {
        cfg.n_list.clear();
        std::istringstream is(*args.n_list);
        std::string item;
        while (std::getline(is, item, ',')) {
            try {
                cfg.n_list.push_back(std::stol(item));
            } catch (...) {
                throw ConfigError("--n-list: bad entry '" + item + "'");
            }
        }
    }
    cfg.validate();
}

void write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
    if (!out) throw std::runtime_error("failed writing output file: " + path);
}

int run_rates(const RatesArgs& args,
              const std::function<RateTable(const ExperimentConfig&)>& experiment) {
    LoadedConfig loaded = load_experiment_config(args.config_path);
    apply_overrides(args, loaded.experiment);
    const RateTable table = experiment(loaded.experiment);
    write_output(table.to_csv(), args.output_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled-noise simulation toolkit for SDEs with discontinuous drift"};
    app.require_subcommand(1);

    static std::function<int()> action;

    // ---- rates ----------------------------------------------------------
    auto* rates = app.add_subcommand("rates", "Monte Carlo error tables with log-log rate fits");
    rates->require_subcommand(1);
    static RatesArgs rates_args;
    const auto add_rates_sub = [&](const char* name, const char* help,
                                   RateTable (*fn)(const ExperimentConfig&)) {
        auto* sub = rates->add_subcommand(name, help);
        sub->add_option("--config", rates_args.config_path, "experiment config file")->required();
        sub->add_option("--output", rates_args.output_path, "output CSV path (default: stdout)");
        sub->add_option("--seed", rates_args.seed, "override master seed");
        sub->add_option("--replications", rates_args.replications, "override replication count");
        sub->add_option("--n-list", rates_args.n_list, "override n list (comma separated)");
        sub->add_option("--threads", rates_args.threads, "override worker thread count");
        sub->callback([fn]() { action = [fn]() { return run_rates(rates_args, fn); }; });
    };
    add_rates_sub("sde-lower", "distance of the two coupled-noise solutions at time one",
                  &coupled_sde_distance);
    add_rates_sub("scheme", "Euler error against a bridge-refined reference solution",
                  &scheme_error);
    add_rates_sub("occupation-lower", "distance of the occupation functionals of the coupled pair",
                  &coupled_occupation_distance);
    add_rates_sub("occupation-riemann", "Riemann-sum estimator error for the occupation functional",
                  &riemann_occupation_error);

    // ---- bounds ---------------------------------------------------------
    auto* bounds = app.add_subcommand("bounds", "closed-form bound evaluation");
    bounds->require_subcommand(1);

    auto* kappa_cmd = bounds->add_subcommand("kappa", "the bridge-pair covariance floor constant");
    static double kappa_tol = 1e-6;
    kappa_cmd->add_option("--tol", kappa_tol, "quadrature relative tolerance");
    kappa_cmd->callback([]() {
        action = []() {
            std::printf("kappa=%.12e\n", kappa(kappa_tol));
            return 0;
        };
    });

    auto* tong_cmd = bounds->add_subcommand("tong", "covariance lower bound for monotone transforms");
    static double tong_rho = 0.0;
    static std::string tong_spec, tong_spec_g;
    tong_cmd->add_option("--rho", tong_rho, "correlation in [0,1]")->required();
    tong_cmd->add_option("--spec", tong_spec, "drift file describing f")->required();
    tong_cmd->add_option("--g-spec", tong_spec_g, "drift file describing g (default: same as f)");
    tong_cmd->callback([]() {
        action = []() {
            const PiecewiseLipschitzFn f = load_drift_file(tong_spec);
            const PiecewiseLipschitzFn g =
                tong_spec_g.empty() ? load_drift_file(tong_spec) : load_drift_file(tong_spec_g);
            BivariateBoundInput in;
            in.rho = tong_rho;
            in.a_breaks = breaks_and_jumps(f);
            in.b_breaks = breaks_and_jumps(g);
            if (!(tong_rho >= 0.0 && tong_rho <= 1.0))
                throw ConfigError("--rho must lie in [0,1]");
            std::printf("tong=%.12e\n", tong_lower_bound(in));
            return 0;
        };
    });

    // ---- diag -----------------------------------------------------------
    auto* diag = app.add_subcommand("diag", "per-cell diagnostics");
    diag->require_subcommand(1);
    auto* cells_cmd = diag->add_subcommand("cells", "per-cell gap/integral moments of the coupled pair");
    static RatesArgs cells_args;
    static long cells_n = 16;
    cells_cmd->add_option("--config", cells_args.config_path, "experiment config file")->required();
    cells_cmd->add_option("--n", cells_n, "coarse cell count")->required();
    cells_cmd->add_option("--output", cells_args.output_path, "output CSV path (default: stdout)");
    cells_cmd->add_option("--seed", cells_args.seed, "override master seed");
    cells_cmd->add_option("--replications", cells_args.replications, "override replication count");
    cells_cmd->add_option("--threads", cells_args.threads, "override worker thread count");
    cells_cmd->callback([]() {
        action = []() {
            LoadedConfig loaded = load_experiment_config(cells_args.config_path);
            apply_overrides(cells_args, loaded.experiment);
            if (cells_n < 1) throw ConfigError("--n must be positive");
            const CellDiagnostics diag = cell_diagnostics(loaded.experiment, cells_n);
            write_output(diag.to_csv(), cells_args.output_path);
            return 0;
        };
    });

    // ---- validate-drift ---------------------------------------------------
    auto* vd = app.add_subcommand("validate-drift", "check the structural drift conditions");
    static std::string vd_spec;
    vd->add_option("--spec", vd_spec, "drift file")->required();
    vd->callback([]() {
        action = []() {
            const PiecewiseLipschitzFn f = load_drift_file(vd_spec);
            const ConditionReport rep = f.validate();
            const auto print = [](const char* name, const ConditionReport::Entry& e) {
                if (e.ok)
                    std::printf("(%s)=ok\n", name);
                else
                    std::printf("(%s)=fail %s\n", name, e.witness.c_str());
            };
            print("mu1", rep.mu1);
            print("mu2", rep.mu2);
            print("mu3", rep.mu3);
            print("mu4", rep.mu4);
            print("mu5", rep.mu5);
            return 0;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return action ? action() : 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
