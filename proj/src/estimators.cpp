#include "blpp/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "json.hpp"

#include "blpp/parallel.hpp"
#include "blpp/random.hpp"

namespace blpp {

const char* experiment_kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::transversal_fluctuation: return "transversal_fluctuation";
        case ExperimentKind::weight_sd: return "weight_sd";
        case ExperimentKind::weight_difference: return "weight_difference";
        case ExperimentKind::disjoint_rarity: return "disjoint_rarity";
        case ExperimentKind::near_poly_rarity: return "near_poly_rarity";
        case ExperimentKind::dev_reg_tail: return "dev_reg_tail";
        case ExperimentKind::regularity_audit: return "regularity_audit";
    }
    throw ParameterError("unknown experiment kind");
}

ExperimentKind experiment_kind_from_name(const std::string& name) {
    for (ExperimentKind k :
         {ExperimentKind::transversal_fluctuation, ExperimentKind::weight_sd,
          ExperimentKind::weight_difference, ExperimentKind::disjoint_rarity,
          ExperimentKind::near_poly_rarity, ExperimentKind::dev_reg_tail,
          ExperimentKind::regularity_audit})
        if (name == experiment_kind_name(k)) return k;
    throw ParameterError("unknown experiment kind: " + name);
}

void ExperimentConfig::validate() const {
    if (replicate_count < 1) throw ParameterError("replicate_count must be >= 1");
    if (!(scaled_resolution > 0)) throw ParameterError("scaled_resolution must be > 0");
    if (endpoint_grid < 1) throw ParameterError("endpoint_grid must be >= 1");
    switch (kind) {
        case ExperimentKind::transversal_fluctuation:
        case ExperimentKind::weight_sd:
            if (n_values.empty()) throw ParameterError("n sweep must be nonempty");
            break;
        case ExperimentKind::weight_difference:
        case ExperimentKind::disjoint_rarity:
            if (epsilon_values.empty()) throw ParameterError("epsilon sweep must be nonempty");
            break;
        case ExperimentKind::near_poly_rarity:
            if (eta_values.empty()) throw ParameterError("eta sweep must be nonempty");
            break;
        case ExperimentKind::dev_reg_tail:
            if (r_values.empty()) throw ParameterError("r sweep must be nonempty");
            break;
        case ExperimentKind::regularity_audit:
            if (z_window.empty() || s_grid.empty())
                throw ParameterError("audit grids must be nonempty");
            break;
    }
}

double experiment_delta(int n, double t12, double scaled_resolution) {
    const double unit = 2.0 * two_thirds_power(n) * std::cbrt(t12) * std::cbrt(t12);
    return unit * scaled_resolution;
}

GridSpec experiment_grid(int n, double t1, double t2, double x_lo, double x_hi,
                         double y_lo, double y_hi, double delta) {
    const double n23 = 2.0 * two_thirds_power(n);
    const double col_lo = std::min(n * t1 + n23 * x_lo, n * t2 + n23 * y_lo);
    const double col_hi = std::max(n * t1 + n23 * x_hi, n * t2 + n23 * y_hi);
    GridSpec grid;
    grid.delta = delta;
    grid.x0 = std::floor(col_lo / delta) * delta - delta;
    grid.num_cells = static_cast<int>(std::ceil((col_hi - grid.x0) / delta)) + 1;
    grid.anchor_index = 0;
    return grid;
}

namespace {

unsigned resolve_threads(const ExperimentConfig& cfg) {
    return cfg.threads == 0 ? default_thread_count() : cfg.threads;
}

DpOptions dp_options(const ExperimentConfig& cfg, int n, double delta) {
    DpOptions opt;
    if (cfg.corridor_halfwidth) {
        const double cells = *cfg.corridor_halfwidth * 2.0 * two_thirds_power(n) / delta;
        opt.corridor_halfwidth_cells = std::max(2, static_cast<int>(std::ceil(cells)));
    }
    return opt;
}

EstimateRow mean_row(const std::string& sweep, double sv, const std::string& stat,
                     const std::vector<double>& samples, double delta) {
    EstimateRow row;
    row.sweep_name = sweep;
    row.sweep_value = sv;
    row.statistic = stat;
    row.value = mean(samples);
    row.count = samples.size();
    if (samples.size() >= 2) {
        const double se =
            sample_sd(samples) / std::sqrt(static_cast<double>(samples.size()));
        row.lo = row.value - 1.959963984540054 * se;
        row.hi = row.value + 1.959963984540054 * se;
    } else {
        row.lo = row.hi = row.value;
    }
    row.delta = delta;
    return row;
}

EstimateRow sd_row(const std::string& sweep, double sv, const std::string& stat,
                   const std::vector<double>& samples, double delta) {
    EstimateRow row;
    row.sweep_name = sweep;
    row.sweep_value = sv;
    row.statistic = stat;
    row.value = sample_sd(samples);
    row.count = samples.size();
    // Normal-theory interval for an sd; wide but honest at these counts.
    const double rel = 1.959963984540054 / std::sqrt(2.0 * (samples.size() - 1.0));
    row.lo = row.value * (1.0 - rel);
    row.hi = row.value * (1.0 + rel);
    row.delta = delta;
    return row;
}

EstimateRow freq_row(const std::string& sweep, double sv, const std::string& stat,
                     size_t hits, size_t trials, double delta) {
    EstimateRow row;
    row.sweep_name = sweep;
    row.sweep_value = sv;
    row.statistic = stat;
    row.value = static_cast<double>(hits) / static_cast<double>(trials);
    row.count = trials;
    const WilsonInterval w = wilson95(hits, trials);
    row.lo = w.lo;
    row.hi = w.hi;
    row.delta = delta;
    return row;
}

EstimateTable run_n_sweep(const ExperimentConfig& cfg, bool geometry) {
    EstimateTable table;
    table.kind = cfg.kind;
    const size_t reps = static_cast<size_t>(cfg.replicate_count);
    for (int n : cfg.n_values) {
        if (n < 2) {
            table.notes.push_back("n=" + std::to_string(n) + ": rejected, needs n >= 2");
            continue;
        }
        const double delta =
            cfg.delta_override ? *cfg.delta_override : experiment_delta(n, 1.0, cfg.scaled_resolution);
        const GridSpec grid = experiment_grid(n, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, delta);
        const DpOptions opt = dp_options(cfg, n, delta);

        std::vector<double> stat(reps);
        parallel_for(reps, resolve_threads(cfg), [&](size_t r) {
            const Environment env =
                Environment::generate(derive_seed(cfg.master_seed, r), 0, n, grid);
            if (geometry) {
                stat[r] = transversal_fluctuation_stat(env, n, opt);
            } else {
                const int g0 = static_cast<int>(std::llround((0.0 - grid.x0) / delta));
                const int gn = static_cast<int>(std::llround((n - grid.x0) / delta));
                stat[r] = last_passage(env, {g0, 0}, {gn, n}, opt) - 2.0 * n;
            }
        });
        if (reps >= 2) table.rows.push_back(sd_row("n", n, "sd", stat, delta));
        table.rows.push_back(mean_row("n", n, "mean", stat, delta));
        table.rows.push_back([&] {
            EstimateRow row;
            row.sweep_name = "n";
            row.sweep_value = n;
            row.statistic = "median_abs";
            std::vector<double> abs_stat(stat.size());
            for (size_t i = 0; i < stat.size(); ++i) abs_stat[i] = std::abs(stat[i]);
            row.value = median(abs_stat);
            row.count = stat.size();
            row.lo = row.hi = row.value;
            row.delta = delta;
            return row;
        }());
    }
    if (table.rows.empty()) throw StatisticsError("no feasible sweep point");
    return table;
}

EstimateTable run_weight_difference(const ExperimentConfig& cfg) {
    EstimateTable table;
    table.kind = cfg.kind;
    const size_t reps = static_cast<size_t>(cfg.replicate_count);
    const int n = cfg.n;
    for (double eps : cfg.epsilon_values) {
        if (!(eps > 0)) {
            table.notes.push_back("eps<=0 rejected");
            continue;
        }
        // Keep the endpoint grid resolvable inside the eps-interval.
        const double res = std::min(cfg.scaled_resolution,
                                    eps / (2.0 * std::max(2, cfg.endpoint_grid)));
        const double delta = cfg.delta_override ? *cfg.delta_override
                                                : experiment_delta(n, 1.0, res);
        const GridSpec grid =
            experiment_grid(n, 0.0, 1.0, -eps / 2, eps / 2, -eps / 2, eps / 2, delta);
        const DpOptions opt = dp_options(cfg, n, delta);
        const CompatibleTriple triple{n, 0.0, 1.0};
        const Interval I{-eps / 2, eps / 2};

        std::vector<double> sup(reps);
        parallel_for(reps, resolve_threads(cfg), [&](size_t r) {
            const Environment env =
                Environment::generate(derive_seed(cfg.master_seed, r), 0, n, grid);
            sup[r] = loc_wgt_sup(env, triple, I, I, cfg.endpoint_grid, opt);
        });
        table.rows.push_back(mean_row("eps", eps, "mean_sup_diff", sup, delta));
        if (reps >= 2) table.rows.push_back(sd_row("eps", eps, "sd_sup_diff", sup, delta));
    }
    if (table.rows.empty()) throw StatisticsError("no feasible sweep point");
    return table;
}

EstimateTable run_disjoint_rarity(const ExperimentConfig& cfg) {
    EstimateTable table;
    table.kind = cfg.kind;
    const size_t reps = static_cast<size_t>(cfg.replicate_count);
    const int n = cfg.n;
    const std::vector<double> tol_scales{0.1, 1.0, 10.0};

    for (double eps : cfg.epsilon_values) {
        if (!(eps > 0)) {
            table.notes.push_back("eps<=0 rejected");
            continue;
        }
        const double delta = cfg.delta_override ? *cfg.delta_override
                                                : experiment_delta(n, 1.0, cfg.scaled_resolution);
        const GridSpec grid = experiment_grid(n, 0.0, 1.0, -eps, eps, -eps, eps, delta);
        const DpOptions opt = dp_options(cfg, n, delta);
        const CompatibleTriple triple{n, 0.0, 1.0};
        const Interval I{-eps, eps};

        MaxDisjointOptions mopt;
        mopt.k_max = cfg.k;
        mopt.endpoint_grid = cfg.endpoint_grid;
        mopt.dp = opt;

        std::vector<uint8_t> hit_lo(reps), hit_mid(reps), hit_hi(reps);
        parallel_for(reps, resolve_threads(cfg), [&](size_t r) {
            const Environment env =
                Environment::generate(derive_seed(cfg.master_seed, r), 0, n, grid);
            const std::vector<bool> hits =
                disjoint_event_at_scales(env, triple, I, I, cfg.k, mopt, tol_scales);
            hit_lo[r] = hits[0];
            hit_mid[r] = hits[1];
            hit_hi[r] = hits[2];
        });
        const auto count = [](const std::vector<uint8_t>& v) {
            return static_cast<size_t>(std::count(v.begin(), v.end(), uint8_t(1)));
        };
        table.rows.push_back(freq_row("eps", eps, "freq", count(hit_mid), reps, delta));
        table.rows.push_back(freq_row("eps", eps, "freq_tol0.1", count(hit_lo), reps, delta));
        table.rows.push_back(freq_row("eps", eps, "freq_tol10", count(hit_hi), reps, delta));
    }
    if (table.rows.empty()) throw StatisticsError("no feasible sweep point");
    return table;
}

EstimateTable run_near_poly(const ExperimentConfig& cfg) {
    EstimateTable table;
    table.kind = cfg.kind;
    const size_t reps = static_cast<size_t>(cfg.replicate_count);
    const int n = cfg.n;
    const double delta = cfg.delta_override ? *cfg.delta_override
                                            : experiment_delta(n, 1.0, cfg.scaled_resolution);
    const GridSpec grid = experiment_grid(n, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, delta);
    const DpOptions opt = dp_options(cfg, n, delta);
    const CompatibleTriple triple{n, 0.0, 1.0};

    // One watermelon evaluation classifies the whole eta sweep.
    std::vector<double> gap(reps);
    parallel_for(reps, resolve_threads(cfg), [&](size_t r) {
        const Environment env =
            Environment::generate(derive_seed(cfg.master_seed, r), 0, n, grid);
        const std::vector<double> zero(static_cast<size_t>(cfg.k), 0.0);
        const double wk = multi_polymer_weight(env, triple, zero, zero, opt);
        const double w1 = polymer_weight(env, triple, 0.0, 0.0, nullptr, opt);
        gap[r] = cfg.k * w1 - wk; // >= 0 up to rounding
    });
    for (double eta : cfg.eta_values) {
        if (!(eta > 0)) {
            table.notes.push_back("eta<=0 rejected");
            continue;
        }
        size_t hits = 0;
        for (double g : gap)
            if (g <= eta) ++hits; // t12 = 1
        table.rows.push_back(freq_row("eta", eta, "freq", hits, reps, delta));
    }
    if (table.rows.empty()) throw StatisticsError("no feasible sweep point");
    return table;
}

EstimateTable run_dev_reg_tail(const ExperimentConfig& cfg) {
    EstimateTable table;
    table.kind = cfg.kind;
    const size_t reps = static_cast<size_t>(cfg.replicate_count);
    const int n = cfg.n;
    const double delta = cfg.delta_override ? *cfg.delta_override
                                            : experiment_delta(n, 1.0, cfg.scaled_resolution);
    const GridSpec grid = experiment_grid(n, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, delta);
    const DpOptions opt = dp_options(cfg, n, delta);
    const CompatibleTriple triple{n, 0.0, 1.0};

    const double mesh = cfg.a * n;
    if (std::abs(mesh - std::round(mesh)) > 1e-9)
        throw ParameterError("a*n must be an integer for the deviation statistic");

    std::vector<double> absdev(reps);
    parallel_for(reps, resolve_threads(cfg), [&](size_t r) {
        const Environment env =
            Environment::generate(derive_seed(cfg.master_seed, r), 0, n, grid);
        absdev[r] = std::abs(fluc_statistic(env, triple, 0.0, 0.0, cfg.a, opt));
    });
    for (double rv : cfg.r_values) {
        if (!(rv >= 0)) {
            table.notes.push_back("r<0 rejected");
            continue;
        }
        size_t exceed = 0;
        for (double d : absdev)
            if (d > rv) ++exceed;
        table.rows.push_back(freq_row("r", rv, "exceed_freq", exceed, reps, delta));
    }
    if (table.rows.empty()) throw StatisticsError("no feasible sweep point");
    return table;
}

} // namespace

AuditRun run_audit(const ExperimentConfig& cfg) {
    const int n = cfg.n;
    const double delta = cfg.delta_override ? *cfg.delta_override
                                            : experiment_delta(n, 1.0, cfg.scaled_resolution);
    double zmax = 0.0;
    for (double z : cfg.z_window) zmax = std::max(zmax, std::abs(z));
    const GridSpec grid = experiment_grid(n, 0.0, 1.0, 0.0, 0.0, -zmax, zmax, delta);
    const DpOptions opt = dp_options(cfg, n, delta);
    const CompatibleTriple triple{n, 0.0, 1.0};

    const size_t reps = static_cast<size_t>(cfg.replicate_count);
    std::vector<LineEnsemble> batch(reps);
    parallel_for(reps, resolve_threads(cfg), [&](size_t r) {
        const Environment env =
            Environment::generate(derive_seed(cfg.master_seed, r), 0, n, grid);
        const LineEnsemble fwd =
            forward_ensemble(env, triple, 0.0, cfg.audit_curves, cfg.z_window, opt);
        batch[r] = normalize_ensemble(fwd);
    });

    AuditRun run;
    run.report = regularity_report(batch, cfg.c_audit, cfg.C_audit, cfg.z_window,
                                   cfg.s_grid);
    run.table.kind = cfg.kind;
    for (const auto& cell : run.report.one_point) {
        EstimateRow lo = freq_row("s", cell.s, "lower_tail_freq@z=" + std::to_string(cell.z),
                                  static_cast<size_t>(std::llround(cell.lower_freq * reps)),
                                  reps, delta);
        EstimateRow hi = freq_row("s", cell.s, "upper_tail_freq@z=" + std::to_string(cell.z),
                                  static_cast<size_t>(std::llround(cell.upper_freq * reps)),
                                  reps, delta);
        run.table.rows.push_back(lo);
        run.table.rows.push_back(hi);
    }
    if (run.report.dominating_pair_found) {
        run.table.notes.push_back("dominating pair: c=" + std::to_string(run.report.dominating_c) +
                                  " C=" + std::to_string(run.report.dominating_C));
    } else {
        run.table.notes.push_back("no dominating pair on the default lattice");
    }
    return run;
}

EstimateTable run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    switch (cfg.kind) {
        case ExperimentKind::transversal_fluctuation: return run_n_sweep(cfg, true);
        case ExperimentKind::weight_sd: return run_n_sweep(cfg, false);
        case ExperimentKind::weight_difference: return run_weight_difference(cfg);
        case ExperimentKind::disjoint_rarity: return run_disjoint_rarity(cfg);
        case ExperimentKind::near_poly_rarity: return run_near_poly(cfg);
        case ExperimentKind::dev_reg_tail: return run_dev_reg_tail(cfg);
        case ExperimentKind::regularity_audit: return run_audit(cfg).table;
    }
    throw ParameterError("unknown experiment kind");
}

ExponentFit fit_from_table(const EstimateTable& table, const std::string& statistic) {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& row : table.rows)
        if (row.statistic == statistic && row.value > 0.0)
            pairs.emplace_back(row.sweep_value, row.value);
    return fit_exponent(pairs, true);
}

double transversal_fluctuation_stat(const Environment& env, int n, const DpOptions& opt) {
    if (n < 2) throw ParameterError("transversal statistic needs n >= 2");
    const GridSpec& grid = env.grid();
    const int g0 = static_cast<int>(std::llround((0.0 - grid.x0) / grid.delta));
    const int gn = static_cast<int>(std::llround((static_cast<double>(n) - grid.x0) / grid.delta));
    if (g0 < 0 || gn > grid.num_cells)
        throw ParameterError("window too small for the (0,0) to (n,n) geodesic");
    const Staircase s = geodesic(env, {g0, 0}, {gn, n}, TieRule::leftmost, opt);
    const int mid = n / 2;
    const double target = n / 2.0;
    const double a = grid.position(s.entry(mid));
    const double b = grid.position(s.exit(mid));
    // Farthest-point convention at the mid line.
    return std::max(std::abs(a - target), std::abs(b - target));
}

void write_table_csv(std::ostream& out, const EstimateTable& table) {
    out << "# blpp-table v1 kind=" << experiment_kind_name(table.kind) << '\n';
    out << "sweep_name,sweep_value,statistic,value,count,lo95,hi95,delta\n";
    out.precision(17);
    for (const auto& row : table.rows)
        out << row.sweep_name << ',' << row.sweep_value << ',' << row.statistic << ','
            << row.value << ',' << row.count << ',' << row.lo << ',' << row.hi << ','
            << row.delta << '\n';
    for (const auto& note : table.notes) out << "# note: " << note << '\n';
}

void write_fit_json(std::ostream& out, const ExponentFit& fit, const std::string& x_name,
                    const std::string& y_name) {
    nlohmann::json j;
    j["format"] = "blpp-fit v1";
    j["x"] = x_name;
    j["y"] = y_name;
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["slope_stderr"] = fit.slope_stderr;
    j["r_squared"] = fit.r_squared;
    j["points_used"] = fit.points_used;
    out << j.dump(2) << '\n';
}

} // namespace blpp
