#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "zener/convergence.hpp"

int main(int argc, char** argv)
{
    CLI::App app{ "viscoelastic wave experiments on mixed elements" };
    std::string config_path, experiment, out;
    int k = 0, nmax = 0;
    app.add_option("--config", config_path, "key=value configuration file");
    app.add_option("--experiment", experiment,
                   "convergence, locking or energy_decay");
    app.add_option("--k", k, "polynomial order, 1 or 2");
    app.add_option("--nmax", nmax, "finest mesh subdivision");
    app.add_option("--out", out, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        zener::RunConfig<double> cfg;
        if (!config_path.empty())
            cfg = zener::load_config<double>(config_path);
        if (!experiment.empty())
            cfg.experiment = experiment;
        if (k != 0)
            cfg.k = k;
        if (nmax != 0)
            cfg.n_max = nmax;
        if (!out.empty())
            cfg.out = out;
        zener::validate_config(cfg);

        bool pass = false;
        if (cfg.experiment == "convergence") {
            const auto rows = zener::run_convergence(cfg);
            const auto csv = zener::render_table(rows);
            zener::write_file(cfg.out, csv);
            std::cout << csv;
            pass = zener::convergence_pass(rows, cfg.k);
        } else if (cfg.experiment == "locking") {
            const auto result = zener::run_locking(cfg);
            const auto low_path = zener::suffixed_path(cfg.out, "low");
            const auto high_path = zener::suffixed_path(cfg.out, "high");
            zener::write_file(low_path, zener::render_table(result.low));
            zener::write_file(high_path, zener::render_table(result.high));
            std::cout << "lambda = " << cfg.lambda_low << " -> " << low_path << "\n"
                      << zener::render_table(result.low) << "lambda = "
                      << cfg.lambda_high << " -> " << high_path << "\n"
                      << zener::render_table(result.high);
            pass = zener::locking_pass(result);
        } else {
            const auto result = zener::run_energy_decay(cfg);
            zener::write_file(cfg.out, zener::render_energy(result.series));
            std::cout << "steps: " << cfg.steps
                      << "  max relative energy growth: " << result.max_growth
                      << "\n";
            pass = result.monotone;
        }

        if (!pass) {
            std::cerr << "acceptance windows not met\n";
            return 1;
        }
        std::cout << "pass\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
