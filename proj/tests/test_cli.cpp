#include <doctest.h>

#include <sstream>

#include "zener/convergence.hpp"

using namespace zener;

TEST_SUITE("cli")
{
    TEST_CASE("config parser reads every key")
    {
        std::istringstream in(
            "# comment line\n"
            "experiment = locking\n"
            "k = 1\n"
            "n_min = 4\n"
            "n_max = 16   # trailing comment\n"
            "T = 0.5\n"
            "dt_rule = fixed\n"
            "dt = 0.125\n"
            "mu = 3\n"
            "lambda = 150\n"
            "a = 2.5\n"
            "b = 2.0\n"
            "rho = 1.5\n"
            "omega = 0.25\n"
            "lambda_low = 10\n"
            "lambda_high = 1000\n"
            "n = 4\n"
            "steps = 50\n"
            "elastic_limit = 1\n"
            "seed = 99\n"
            "out = somewhere.csv\n");
        const auto cfg = parse_config<double>(in);
        CHECK(cfg.experiment == "locking");
        CHECK(cfg.k == 1);
        CHECK(cfg.n_min == 4);
        CHECK(cfg.n_max == 16);
        CHECK(cfg.final_time == 0.5);
        CHECK(cfg.dt_fixed);
        CHECK(cfg.dt == 0.125);
        CHECK(cfg.iso.mu == 3.0);
        CHECK(cfg.iso.lambda == 150.0);
        CHECK(cfg.iso.a == 2.5);
        CHECK(cfg.iso.b == 2.0);
        CHECK(cfg.rho == 1.5);
        CHECK(cfg.omega == 0.25);
        CHECK(cfg.lambda_low == 10.0);
        CHECK(cfg.lambda_high == 1000.0);
        CHECK(cfg.n == 4);
        CHECK(cfg.steps == 50);
        CHECK(cfg.elastic_limit);
        CHECK(cfg.seed == 99);
        CHECK(cfg.out == "somewhere.csv");
    }

    TEST_CASE("config parser rejects malformed input")
    {
        {
            std::istringstream in("k 2\n");
            CHECK_THROWS_AS(parse_config<double>(in), std::invalid_argument);
        }
        {
            std::istringstream in("unknown_key = 3\n");
            CHECK_THROWS_AS(parse_config<double>(in), std::invalid_argument);
        }
        {
            std::istringstream in("k = \n");
            CHECK_THROWS_AS(parse_config<double>(in), std::invalid_argument);
        }
        {
            std::istringstream in("dt_rule = sometimes\n");
            CHECK_THROWS_AS(parse_config<double>(in), std::invalid_argument);
        }
        {
            std::istringstream in("k = two\n");
            CHECK_THROWS_AS(parse_config<double>(in), std::invalid_argument);
        }
    }

    TEST_CASE("config validation enforces the invariants")
    {
        RunConfig<double> cfg;
        CHECK_NOTHROW(validate_config(cfg));

        RunConfig<double> bad = cfg;
        bad.k = 3;
        CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
        bad = cfg;
        bad.n_min = 12;
        CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
        bad = cfg;
        bad.n_min = 16;
        bad.n_max = 8;
        CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
        bad = cfg;
        bad.experiment = "mystery";
        CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
        bad = cfg;
        bad.iso.a = 1.0; // relaxed tensor must dominate
        CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
        bad = cfg;
        bad.dt_fixed = true;
        bad.dt = 0.0;
        CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    }

    TEST_CASE("table rendering matches the fixed format")
    {
        std::vector<ConvergenceRow<double>> rows(2);
        rows[0] = { 0.125, 1.06e-02, 0, 1.74e-02, 0, 2.57e+01, 0, false };
        rows[1] = { 0.0625, 2.44e-03, 2.12, 3.95e-03, 2.14, 6.48e+00, 1.99, true };
        const std::string csv = render_table(rows);
        CHECK(csv ==
              "h,e_p,r_p,e_r,r_r,e_accel,r_accel\n"
              "0.125,1.06e-02,,1.74e-02,,2.57e+01,\n"
              "0.0625,2.44e-03,2.12,3.95e-03,2.14,6.48e+00,1.99\n");
        CHECK(render_table(rows) == csv);
    }

    TEST_CASE("energy rendering matches the fixed format")
    {
        std::vector<EnergySample<double>> series;
        series.push_back({ 0, 0.0625, 1.5, 2e-13 });
        const std::string csv = render_energy(series);
        CHECK(csv == "step,time,energy,constraint_residual\n"
                     "0,0.0625,1.500000000000e+00,2.000e-13\n");
    }

    TEST_CASE("output path suffixes precede the extension")
    {
        CHECK(suffixed_path("table.csv", "low") == "table_low.csv");
        CHECK(suffixed_path("dir/table.csv", "high") == "dir/table_high.csv");
        CHECK(suffixed_path("noext", "low") == "noext_low");
        CHECK(suffixed_path("dot.dir/noext", "low") == "dot.dir/noext_low");
    }

    TEST_CASE("verdict windows")
    {
        std::vector<ConvergenceRow<double>> rows(2);
        rows[0] = { 0.125, 1e-2, 0, 1e-2, 0, 1e-1, 0, false };
        rows[1] = { 0.0625, 2.5e-3, 2.0, 2.5e-3, 2.0, 2.5e-2, 2.0, true };
        CHECK(convergence_pass(rows, 2));
        rows[1].r_accel = 1.5;
        CHECK_FALSE(convergence_pass(rows, 2));
        rows[1].r_accel = 2.0;
        rows[1].r_p = 1.0;
        CHECK_FALSE(convergence_pass(rows, 2));
        CHECK(convergence_pass(rows, 1));

        LockingResult<double> lock;
        lock.low = rows;
        lock.high = rows;
        lock.low[1].r_p = 2.0;
        lock.high[1].r_p = 2.0;
        CHECK(locking_pass(lock));
        lock.high[0].e_p = lock.low[0].e_p * 3.0; // blow-up across lambda
        CHECK_FALSE(locking_pass(lock));
    }

    TEST_CASE("small convergence sweep produces decreasing errors")
    {
        RunConfig<double> cfg;
        cfg.k = 1;
        cfg.n_min = 4;
        cfg.n_max = 8;
        cfg.final_time = 0.5;
        const auto rows = run_convergence(cfg);
        REQUIRE(rows.size() == 2);
        CHECK_FALSE(rows[0].has_rates);
        CHECK(rows[1].has_rates);
        CHECK(rows[0].e_p > 0.0);
        CHECK(rows[1].e_p < rows[0].e_p);
        CHECK(rows[1].e_r < rows[0].e_r);
        CHECK(rows[1].h == 0.125);

        // identical configuration reruns byte-identically
        const auto rows2 = run_convergence(cfg);
        CHECK(render_table(rows) == render_table(rows2));
    }

    TEST_CASE("energy decay driver verdicts")
    {
        RunConfig<double> cfg;
        cfg.experiment = "energy_decay";
        cfg.k = 1;
        cfg.n = 2;
        cfg.steps = 20;
        cfg.omega = 0.5;
        const auto result = run_energy_decay(cfg);
        CHECK(result.series.size() == 21);
        CHECK(result.monotone);
        CHECK(result.max_growth <= 1e-10);
        for (const auto& s : result.series)
            CHECK(s.constraint_residual < 1e-9);

        RunConfig<double> elastic = cfg;
        elastic.elastic_limit = true;
        const auto kept = run_energy_decay(elastic);
        CHECK(kept.monotone);
        const double e0 = kept.series.front().energy;
        for (const auto& s : kept.series)
            CHECK(std::abs(s.energy - e0) <= 1e-9 * e0);

        // deterministic for a fixed seed
        const auto again = run_energy_decay(cfg);
        CHECK(render_energy(result.series) == render_energy(again.series));
    }
}
