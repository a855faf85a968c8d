#include "doctest.h"

#include <cmath>
#include <sstream>

#include "blpp/estimators.hpp"
#include "blpp/random.hpp"

using namespace blpp;

TEST_CASE("exponent fit") {
    ExponentFit fit = fit_exponent({{1, 1}, {2, 8}, {4, 64}}, true);
    CHECK(fit.slope == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(fit.points_used == 3);
    CHECK(fit.r_squared == doctest::Approx(1.0));

    fit = fit_exponent({{1, 5}, {2, 5}, {4, 5}}, true);
    CHECK(fit.slope == doctest::Approx(0.0));

    // Noisy power law over four decades.
    std::vector<std::pair<double, double>> pairs;
    for (int i = 0; i < 16; ++i) {
        const double x = std::pow(10.0, -4.0 + i * 0.25);
        const double noise = 1.0 + 0.05 * std::cos(3.7 * i);
        pairs.emplace_back(x, std::pow(x, 1.5) * noise);
    }
    fit = fit_exponent(pairs, true);
    CHECK(std::abs(fit.slope - 1.5) < 0.1);

    CHECK_THROWS_AS(fit_exponent({{1, 1}}, true), ParameterError);
    CHECK_THROWS_AS(fit_exponent({{1, 0.0}, {2, 1.0}}, true), ParameterError);
    CHECK_THROWS_AS(fit_exponent({{1, 1.0}, {1, 2.0}}, true), ParameterError);
}

TEST_CASE("wilson interval") {
    const WilsonInterval w = wilson95(3, 1000);
    CHECK(w.lo > 0.0);
    CHECK(w.lo < 0.003);
    CHECK(w.hi > 0.003);
    CHECK(w.hi < 0.02);
    const WilsonInterval all = wilson95(1000, 1000);
    CHECK(all.hi == 1.0);
    CHECK_THROWS_AS(wilson95(0, 0), StatisticsError);
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
}

TEST_CASE("transversal statistic on injected environments") {
    const int n = 16;
    const double delta = experiment_delta(n, 1.0, 0.05);
    const GridSpec grid = experiment_grid(n, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, delta);
    const Environment ident =
        Environment::from_function(0, n, grid, [](int, double x) { return x; });
    // Leftmost geodesic keeps every jump at the start: mid deviation n/2.
    CHECK(transversal_fluctuation_stat(ident, n) ==
          doctest::Approx(n / 2.0).epsilon(0.05));
    const Environment zero =
        Environment::from_function(0, n, grid, [](int, double) { return 0.0; });
    CHECK(transversal_fluctuation_stat(zero, n) ==
          doctest::Approx(n / 2.0).epsilon(0.05));
}

TEST_CASE("experiment tables are deterministic and thread independent") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::transversal_fluctuation;
    cfg.master_seed = 5;
    cfg.replicate_count = 16;
    cfg.n_values = {12, 24};
    cfg.scaled_resolution = 0.05;
    cfg.threads = 1;
    const EstimateTable a = run_experiment(cfg);
    cfg.threads = 4;
    const EstimateTable b = run_experiment(cfg);
    REQUIRE(a.rows.size() == b.rows.size());
    for (size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].value == b.rows[i].value);
        CHECK(a.rows[i].statistic == b.rows[i].statistic);
    }
    // Medians of the absolute deviation grow with n.
    double med12 = 0, med24 = 0;
    for (const auto& row : a.rows) {
        if (row.statistic == "median_abs" && row.sweep_value == 12) med12 = row.value;
        if (row.statistic == "median_abs" && row.sweep_value == 24) med24 = row.value;
    }
    CHECK(med24 > 0.0);
    CHECK(med12 > 0.0);
}

TEST_CASE("replicate seeds are a documented mix") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::weight_sd;
    cfg.master_seed = 9;
    cfg.replicate_count = 8;
    cfg.n_values = {10};
    cfg.scaled_resolution = 0.05;
    const EstimateTable t = run_experiment(cfg);
    REQUIRE(!t.rows.empty());
    // Recompute the first sweep point by hand from the derived seeds.
    const double delta = experiment_delta(10, 1.0, 0.05);
    const GridSpec grid = experiment_grid(10, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, delta);
    std::vector<double> vals;
    for (uint64_t r = 0; r < 8; ++r) {
        const Environment env = Environment::generate(derive_seed(9, r), 0, 10, grid);
        const int g0 = static_cast<int>(std::llround((0.0 - grid.x0) / delta));
        const int gn = static_cast<int>(std::llround((10.0 - grid.x0) / delta));
        vals.push_back(last_passage(env, {g0, 0}, {gn, 10}) - 20.0);
    }
    CHECK(t.rows[0].statistic == "sd");
    CHECK(t.rows[0].value == doctest::Approx(sample_sd(vals)).epsilon(1e-12));
}

TEST_CASE("single-replicate runs produce single-sample tables") {
    for (ExperimentKind kind :
         {ExperimentKind::transversal_fluctuation, ExperimentKind::weight_sd,
          ExperimentKind::weight_difference, ExperimentKind::disjoint_rarity,
          ExperimentKind::near_poly_rarity, ExperimentKind::dev_reg_tail}) {
        ExperimentConfig cfg;
        cfg.kind = kind;
        cfg.master_seed = 4;
        cfg.replicate_count = 1;
        cfg.n_values = {10};
        cfg.n = 10;
        cfg.epsilon_values = {0.3};
        cfg.eta_values = {1.0};
        cfg.r_values = {1.0};
        cfg.scaled_resolution = 0.05;
        const EstimateTable t = run_experiment(cfg);
        CHECK(!t.rows.empty());
        for (const auto& row : t.rows) CHECK(row.count == 1);
    }
}

TEST_CASE("bad sweep points are rejected with notes") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::disjoint_rarity;
    cfg.master_seed = 1;
    cfg.replicate_count = 4;
    cfg.n = 10;
    cfg.epsilon_values = {-1.0, 0.3};
    cfg.scaled_resolution = 0.05;
    const EstimateTable t = run_experiment(cfg);
    CHECK(!t.notes.empty());
    CHECK(!t.rows.empty());

    cfg.epsilon_values = {};
    CHECK_THROWS_AS(run_experiment(cfg), ParameterError);
}

TEST_CASE("disjoint rarity frequencies fall as the interval shrinks") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::disjoint_rarity;
    cfg.master_seed = 77;
    cfg.replicate_count = 150;
    cfg.n = 24;
    cfg.k = 2;
    cfg.epsilon_values = {0.4, 0.1};
    cfg.scaled_resolution = 0.04;
    const EstimateTable t = run_experiment(cfg);
    double f_big = -1, f_small = -1;
    for (const auto& row : t.rows) {
        if (row.statistic != "freq") continue;
        if (row.sweep_value == 0.4) f_big = row.value;
        if (row.sweep_value == 0.1) f_small = row.value;
    }
    REQUIRE(f_big >= 0);
    REQUIRE(f_small >= 0);
    CHECK(f_big >= f_small);
    // Tolerance sensitivity rows exist and bracket the base frequency.
    for (const auto& row : t.rows) {
        if (row.sweep_value != 0.4) continue;
        if (row.statistic == "freq_tol0.1") CHECK(row.value <= f_big);
        if (row.statistic == "freq_tol10") CHECK(row.value >= f_big);
    }
}

TEST_CASE("near poly frequencies are monotone in eta") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::near_poly_rarity;
    cfg.master_seed = 31;
    cfg.replicate_count = 60;
    cfg.n = 24;
    cfg.k = 2;
    cfg.eta_values = {2.0, 1.0, 0.5};
    cfg.scaled_resolution = 0.04;
    const EstimateTable t = run_experiment(cfg);
    std::vector<double> freqs;
    for (const auto& row : t.rows)
        if (row.statistic == "freq") freqs.push_back(row.value);
    REQUIRE(freqs.size() == 3);
    CHECK(freqs[0] >= freqs[1]);
    CHECK(freqs[1] >= freqs[2]);
}

TEST_CASE("deviation tail frequencies are nonincreasing in r") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::dev_reg_tail;
    cfg.master_seed = 3;
    cfg.replicate_count = 50;
    cfg.n = 24;
    cfg.a = 0.5;
    cfg.r_values = {0.5, 1.0, 2.0};
    cfg.scaled_resolution = 0.04;
    const EstimateTable t = run_experiment(cfg);
    std::vector<double> freqs;
    for (const auto& row : t.rows)
        if (row.statistic == "exceed_freq") freqs.push_back(row.value);
    REQUIRE(freqs.size() == 3);
    CHECK(freqs[0] >= freqs[1]);
    CHECK(freqs[1] >= freqs[2]);
}

TEST_CASE("audit run produces a report") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::regularity_audit;
    cfg.master_seed = 8;
    cfg.replicate_count = 40;
    cfg.n = 16;
    cfg.audit_curves = 1;
    cfg.z_window = {0.0};
    cfg.s_grid = {1.0, 2.0};
    cfg.scaled_resolution = 0.05;
    const AuditRun run = run_audit(cfg);
    CHECK(run.report.sample_count == 40);
    CHECK(!run.table.rows.empty());
    CHECK(!run.table.notes.empty());
}

TEST_CASE("table csv and fit json formats") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::weight_sd;
    cfg.master_seed = 2;
    cfg.replicate_count = 8;
    cfg.n_values = {8, 16};
    cfg.scaled_resolution = 0.05;
    const EstimateTable t = run_experiment(cfg);
    std::ostringstream out;
    write_table_csv(out, t);
    CHECK(out.str().find("# blpp-table v1 kind=weight_sd") == 0);
    CHECK(out.str().find("sweep_name,sweep_value,statistic,value,count,lo95,hi95,delta") !=
          std::string::npos);

    const ExponentFit fit = fit_from_table(t, "sd");
    std::ostringstream fj;
    write_fit_json(fj, fit, "n", "sd");
    CHECK(fj.str().find("blpp-fit v1") != std::string::npos);
    CHECK(fj.str().find("slope") != std::string::npos);
}
