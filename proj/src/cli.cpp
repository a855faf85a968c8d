#include "blpp/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "blpp/estimators.hpp"
#include "blpp/geometry.hpp"
#include "blpp/manifest.hpp"
#include "blpp/parallel.hpp"
#include "blpp/random.hpp"

namespace blpp {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw ParameterError("unknown key '" + it.key() + "' in " + where);
    }
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParameterError(std::string("config parse failure: ") + e.what());
    }
    return j;
}

ExperimentConfig experiment_config_from_json(const json& j) {
    reject_unknown_keys(
        j,
        {"kind", "master_seed", "replicate_count", "n_values", "n", "epsilon_values",
         "eta_values", "r_values", "a", "k", "scaled_resolution", "delta_override",
         "corridor_halfwidth", "endpoint_grid", "threads", "audit_curves", "z_window",
         "s_grid", "c_audit", "C_audit"},
        "experiment config");
    ExperimentConfig cfg;
    cfg.kind = experiment_kind_from_name(j.at("kind").get<std::string>());
    if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<uint64_t>();
    if (j.contains("replicate_count")) cfg.replicate_count = j["replicate_count"].get<int>();
    if (j.contains("n_values")) cfg.n_values = j["n_values"].get<std::vector<int>>();
    if (j.contains("n")) cfg.n = j["n"].get<int>();
    if (j.contains("epsilon_values"))
        cfg.epsilon_values = j["epsilon_values"].get<std::vector<double>>();
    if (j.contains("eta_values")) cfg.eta_values = j["eta_values"].get<std::vector<double>>();
    if (j.contains("r_values")) cfg.r_values = j["r_values"].get<std::vector<double>>();
    if (j.contains("a")) cfg.a = j["a"].get<double>();
    if (j.contains("k")) cfg.k = j["k"].get<int>();
    if (j.contains("scaled_resolution"))
        cfg.scaled_resolution = j["scaled_resolution"].get<double>();
    if (j.contains("delta_override")) cfg.delta_override = j["delta_override"].get<double>();
    if (j.contains("corridor_halfwidth"))
        cfg.corridor_halfwidth = j["corridor_halfwidth"].get<double>();
    if (j.contains("endpoint_grid")) cfg.endpoint_grid = j["endpoint_grid"].get<int>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<unsigned>();
    if (j.contains("audit_curves")) cfg.audit_curves = j["audit_curves"].get<int>();
    if (j.contains("z_window")) cfg.z_window = j["z_window"].get<std::vector<double>>();
    if (j.contains("s_grid")) cfg.s_grid = j["s_grid"].get<std::vector<double>>();
    if (j.contains("c_audit")) cfg.c_audit = j["c_audit"].get<double>();
    if (j.contains("C_audit")) cfg.C_audit = j["C_audit"].get<double>();
    return cfg;
}

json experiment_config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["kind"] = experiment_kind_name(cfg.kind);
    j["master_seed"] = cfg.master_seed;
    j["replicate_count"] = cfg.replicate_count;
    if (!cfg.n_values.empty()) j["n_values"] = cfg.n_values;
    j["n"] = cfg.n;
    if (!cfg.epsilon_values.empty()) j["epsilon_values"] = cfg.epsilon_values;
    if (!cfg.eta_values.empty()) j["eta_values"] = cfg.eta_values;
    if (!cfg.r_values.empty()) j["r_values"] = cfg.r_values;
    j["a"] = cfg.a;
    j["k"] = cfg.k;
    j["scaled_resolution"] = cfg.scaled_resolution;
    if (cfg.delta_override) j["delta_override"] = *cfg.delta_override;
    if (cfg.corridor_halfwidth) j["corridor_halfwidth"] = *cfg.corridor_halfwidth;
    j["endpoint_grid"] = cfg.endpoint_grid;
    j["threads"] = cfg.threads;
    j["audit_curves"] = cfg.audit_curves;
    j["z_window"] = cfg.z_window;
    j["s_grid"] = cfg.s_grid;
    j["c_audit"] = cfg.c_audit;
    j["C_audit"] = cfg.C_audit;
    return j;
}

struct ScaledEndpoint {
    double x = 0.0;
    double t = 0.0;
};

ScaledEndpoint parse_endpoint(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos)
        throw ParameterError("endpoint must be 'x,t': " + s);
    try {
        return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
    } catch (const std::exception&) {
        throw ParameterError("endpoint must be numeric 'x,t': " + s);
    }
}

Environment build_env_for(const CompatibleTriple& triple, uint64_t seed, double x_lo,
                          double x_hi, double y_lo, double y_hi, double resolution) {
    const double delta = experiment_delta(triple.n, triple.t12(), resolution);
    const GridSpec grid =
        experiment_grid(triple.n, triple.t1, triple.t2, x_lo, x_hi, y_lo, y_hi, delta);
    return Environment::generate(seed, triple.line1(), triple.line2(), grid);
}

int cmd_sample(const std::string& out_path, uint64_t seed, int line_min, int line_max,
               double x0, double delta, int cells, int anchor,
               const std::string& manifest_path, std::ostream& out) {
    RunManifest manifest;
    manifest.command = "sample";
    manifest.started_at = iso8601_utc_now();
    GridSpec grid{x0, delta, cells, anchor};
    const Environment env = Environment::generate(seed, line_min, line_max, grid);
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw ParameterError("cannot write environment: " + out_path);
    env.dump(f);
    f.close();
    manifest.finished_at = iso8601_utc_now();
    manifest.status.push_back("ok");
    manifest.add_output(out_path);
    json cfg{{"seed", seed},       {"line_min", line_min}, {"line_max", line_max},
             {"x0", x0},           {"delta", delta},       {"num_cells", cells},
             {"anchor", anchor},   {"out", out_path}};
    manifest.config_json = cfg.dump();
    if (!manifest_path.empty()) manifest.write(manifest_path);
    out << "wrote " << out_path << '\n';
    return 0;
}

int cmd_geodesic(uint64_t seed, int n, const std::string& from_s, const std::string& to_s,
                 double resolution, const std::string& tie_s, std::ostream& out) {
    const ScaledEndpoint from = parse_endpoint(from_s);
    const ScaledEndpoint to = parse_endpoint(to_s);
    const CompatibleTriple triple{n, from.t, to.t};
    triple.validate();
    const Environment env =
        build_env_for(triple, seed, from.x, from.x, to.x, to.x, resolution);
    const TieRule tie = (tie_s == "rightmost") ? TieRule::rightmost : TieRule::leftmost;

    SnapReport snap;
    const double wgt = polymer_weight(env, triple, from.x, to.x, &snap);
    const SnappedPoint a = snap_scaled(env, n, snap.x_used, triple.t1);
    const SnappedPoint b = snap_scaled(env, n, snap.y_used, triple.t2);
    const double m1 = last_passage(env, {a.g, a.line}, {b.g, b.line});
    const Staircase path = geodesic(env, {a.g, a.line}, {b.g, b.line}, tie);

    out.precision(17);
    out << "n " << n << "\nfrom " << snap.x_used << ',' << triple.t1 << "\nto "
        << snap.y_used << ',' << triple.t2 << "\ndelta " << env.grid().delta
        << "\nweight " << wgt << "\nenergy " << m1 << "\n";
    out << "jumps";
    for (int z : path.jumps) out << ' ' << z;
    out << "\n";
    return 0;
}

int cmd_multi(uint64_t seed, int n, double t1, double t2, const std::string& from_s,
              const std::string& to_s, double resolution, std::ostream& out) {
    std::vector<double> xs, ys;
    for (const std::string* s : {&from_s, &to_s}) {
        std::vector<double>& dst = (s == &from_s) ? xs : ys;
        std::stringstream ss(*s);
        std::string item;
        while (std::getline(ss, item, ','))
            dst.push_back(std::stod(item));
    }
    if (xs.empty() || xs.size() != ys.size())
        throw ParameterError("--from and --to need equally many coordinates");
    const CompatibleTriple triple{n, t1, t2};
    triple.validate();
    const auto [xlo, xhi] = std::minmax_element(xs.begin(), xs.end());
    const auto [ylo, yhi] = std::minmax_element(ys.begin(), ys.end());
    const Environment env =
        build_env_for(triple, seed, *xlo, *xhi, *ylo, *yhi, resolution);
    const double w = multi_polymer_weight(env, triple, xs, ys);
    out.precision(17);
    out << "k " << xs.size() << "\nweight " << w << "\ndelta " << env.grid().delta << '\n';
    return 0;
}

int cmd_ensemble(uint64_t seed, int n, double t1, double t2, double root, int kmax,
                 double z_lo, double z_hi, int z_count, const std::string& out_path,
                 const std::string& manifest_path, std::ostream& out) {
    const CompatibleTriple triple{n, t1, t2};
    triple.validate();
    if (z_count < 1) throw ParameterError("need at least one sample");
    std::vector<double> zs(static_cast<size_t>(z_count));
    for (int i = 0; i < z_count; ++i)
        zs[static_cast<size_t>(i)] =
            z_lo + (z_count == 1 ? 0.0 : (z_hi - z_lo) * i / (z_count - 1));
    const double squeeze = std::cbrt(triple.t12()) * std::cbrt(triple.t12());
    std::vector<double> ys(zs.size());
    for (size_t i = 0; i < zs.size(); ++i) ys[i] = root + squeeze * zs[i];

    RunManifest manifest;
    manifest.command = "ensemble";
    manifest.started_at = iso8601_utc_now();
    const Environment env = build_env_for(triple, seed, root, root,
                                          ys.front(), ys.back(), 0.01);
    const LineEnsemble ens = forward_ensemble(env, triple, root, kmax, ys);
    std::ofstream f(out_path);
    if (!f) throw ParameterError("cannot write ensemble CSV: " + out_path);
    write_ensemble_csv(f, ens);
    f.close();
    manifest.finished_at = iso8601_utc_now();
    manifest.status.push_back("ok");
    manifest.add_output(out_path);
    json cfg{{"seed", seed}, {"n", n},        {"t1", t1},           {"t2", t2},
             {"root", root}, {"kmax", kmax},  {"z_lo", z_lo},       {"z_hi", z_hi},
             {"z_count", z_count}, {"out", out_path}};
    manifest.config_json = cfg.dump();
    if (!manifest_path.empty()) manifest.write(manifest_path);
    out << "wrote " << out_path << '\n';
    return 0;
}

// Event batch: one indicator per (seed offset, event spec).
int cmd_events(const std::string& config_path, const std::string& out_path,
               const std::string& manifest_path, unsigned threads_override,
               std::ostream& out) {
    const json j = load_config(config_path);
    reject_unknown_keys(j,
                        {"event", "n", "t1", "t2", "k", "x", "y", "I", "J", "a", "r",
                         "eta", "eps", "K", "endpoint_grid", "master_seed", "replicates",
                         "scaled_resolution", "threads", "direction", "tuple"},
                        "event config");
    const std::string event = j.at("event").get<std::string>();
    const int n = j.at("n").get<int>();
    const double t1 = j.value("t1", 0.0);
    const double t2 = j.value("t2", 1.0);
    const uint64_t master = j.value("master_seed", uint64_t(1));
    const size_t reps = j.value("replicates", size_t(1));
    const double resolution = j.value("scaled_resolution", 0.01);
    const int epg = j.value("endpoint_grid", 5);
    const unsigned threads = threads_override != 0 ? threads_override
                                                   : j.value("threads", 0u);
    const CompatibleTriple triple{n, t1, t2};

    auto interval_of = [&](const char* key) {
        const auto& arr = j.at(key);
        if (!arr.is_array() || arr.size() != 2)
            throw ParameterError(std::string(key) + " must be [lo, hi]");
        return Interval{arr[0].get<double>(), arr[1].get<double>()};
    };

    RunManifest manifest;
    manifest.command = "events";
    manifest.started_at = iso8601_utc_now();

    std::vector<std::string> rows(reps);
    parallel_for(reps, threads == 0 ? default_thread_count() : threads, [&](size_t rep) {
        const uint64_t seed = derive_seed(master, rep);
        std::ostringstream line;
        line.precision(17);
        line << event << ',' << seed;
        int indicator = -1;
        if (event == "NearPoly") {
            const double x = j.at("x").get<double>();
            const double y = j.at("y").get<double>();
            const double eta = j.at("eta").get<double>();
            const Environment env = build_env_for(triple, seed, x, x, y, y, resolution);
            indicator = near_poly(env, triple, j.value("k", 2), x, y, eta);
            line << ",eta=" << eta;
        } else if (event == "MaxDisjtPoly") {
            const Interval I = interval_of("I");
            const Interval J = interval_of("J");
            const Environment env =
                build_env_for(triple, seed, I.lo, I.hi, J.lo, J.hi, resolution);
            MaxDisjointOptions mopt;
            mopt.k_max = j.value("k", 2);
            mopt.endpoint_grid = epg;
            indicator = max_disjoint(env, triple, I, J, mopt);
            line << ",k_max=" << mopt.k_max;
        } else if (event == "PolyDevReg") {
            const double x = j.at("x").get<double>();
            const double y = j.at("y").get<double>();
            const double a = j.at("a").get<double>();
            const double r = j.at("r").get<double>();
            const Environment env = build_env_for(triple, seed, x, x, y, y, resolution);
            indicator = poly_dev_reg(env, triple, x, y, a, r);
            line << ",a=" << a << ",r=" << r;
        } else if (event == "PolyWgtReg") {
            const Interval I = interval_of("I");
            const Interval J = interval_of("J");
            const double r = j.at("r").get<double>();
            const Environment env =
                build_env_for(triple, seed, I.lo, I.hi, J.lo, J.hi, resolution);
            indicator = poly_wgt_reg(env, triple, I, J, r, epg);
            line << ",r=" << r;
        } else if (event == "LocWgtReg") {
            const Interval I = interval_of("I");
            const Interval J = interval_of("J");
            const double r = j.at("r").get<double>();
            const Environment env =
                build_env_for(triple, seed, I.lo, I.hi, J.lo, J.hi, resolution);
            indicator = loc_wgt_reg(env, triple, I, J, r, epg);
            line << ",r=" << r;
        } else if (event == "ForBouqReg" || event == "BackBouqReg") {
            const double anchor = j.at(event == "ForBouqReg" ? "x" : "y").get<double>();
            const std::vector<double> tuple = j.at("tuple").get<std::vector<double>>();
            const double r = j.at("r").get<double>();
            double lo = anchor, hi = anchor;
            for (double v : tuple) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            const Environment env = build_env_for(triple, seed, lo, hi, lo, hi, resolution);
            const BouquetDirection dir = event == "ForBouqReg" ? BouquetDirection::forward
                                                               : BouquetDirection::backward;
            indicator = bouquet_reg(env, triple, dir, anchor, tuple, r);
            line << ",r=" << r;
        } else if (event == "FavSurCon") {
            const double x = j.at("x").get<double>();
            const double y = j.at("y").get<double>();
            const double eps = j.at("eps").get<double>();
            const double r = j.at("r").get<double>();
            const double eps32 = std::pow(eps, 1.5);
            const CompatibleTriple full{n, -eps32, 1.0 + eps32};
            const double w = (r + 1) * eps + 1.0;
            const Environment env = build_env_for(full, seed, x - w, x + w, y - w, y + w,
                                                  resolution);
            indicator = fav_sur_con(env, n, j.value("k", 2), x, y, eps, r, epg).value;
            line << ",eps=" << eps << ",r=" << r;
        } else if (event == "Fluc") {
            const double x = j.at("x").get<double>();
            const double y = j.at("y").get<double>();
            const double a = j.at("a").get<double>();
            std::vector<Interval> K;
            for (const auto& arr : j.at("K"))
                K.push_back({arr[0].get<double>(), arr[1].get<double>()});
            const Environment env = build_env_for(triple, seed, x, x, y, y, resolution);
            indicator = fluc(env, triple, x, y, a, K);
            line << ",a=" << a;
        } else {
            throw ParameterError("unknown event: " + event);
        }
        line << ',' << indicator;
        rows[rep] = line.str();
    });

    std::ofstream f(out_path);
    if (!f) throw ParameterError("cannot write events CSV: " + out_path);
    f << "# blpp-events v1\nevent,seed,params,indicator\n";
    for (const auto& row : rows) f << row << '\n';
    f.close();

    manifest.finished_at = iso8601_utc_now();
    manifest.status.push_back(event + ": " + std::to_string(reps) + " replicates");
    manifest.add_output(out_path);
    manifest.config_json = j.dump();
    if (!manifest_path.empty()) manifest.write(manifest_path);
    out << "wrote " << out_path << '\n';
    return 0;
}

int cmd_exponent(const std::string& config_path, const std::string& out_dir,
                 unsigned threads, std::ostream& out) {
    const json j = load_config(config_path);
    ExperimentConfig cfg = experiment_config_from_json(j);
    if (threads != 0) cfg.threads = threads;

    RunManifest manifest;
    manifest.command = "exponent";
    manifest.started_at = iso8601_utc_now();
    manifest.config_json = experiment_config_to_json(cfg).dump();

    const EstimateTable table = run_experiment(cfg);
    const std::string table_path = out_dir + "/table.csv";
    {
        std::ofstream f(table_path);
        if (!f) throw ParameterError("cannot write table: " + table_path);
        write_table_csv(f, table);
    }
    manifest.add_output(table_path);
    for (const auto& row : table.rows)
        manifest.status.push_back(row.sweep_name + "=" + std::to_string(row.sweep_value) +
                                  " " + row.statistic + ": ok");
    for (const auto& note : table.notes) manifest.status.push_back(note);

    // Fit target per experiment kind.
    std::string stat, xname;
    switch (cfg.kind) {
        case ExperimentKind::transversal_fluctuation:
        case ExperimentKind::weight_sd: stat = "sd"; xname = "n"; break;
        case ExperimentKind::weight_difference: stat = "mean_sup_diff"; xname = "eps"; break;
        case ExperimentKind::disjoint_rarity: stat = "freq"; xname = "eps"; break;
        case ExperimentKind::near_poly_rarity: stat = "freq"; xname = "eta"; break;
        default: break;
    }
    if (!stat.empty()) {
        const ExponentFit fit = fit_from_table(table, stat);
        const std::string fit_path = out_dir + "/fit.json";
        std::ofstream f(fit_path);
        if (!f) throw ParameterError("cannot write fit: " + fit_path);
        write_fit_json(f, fit, xname, stat);
        f.close();
        manifest.add_output(fit_path);
        out << "slope " << fit.slope << '\n';
    }
    manifest.finished_at = iso8601_utc_now();
    manifest.write(out_dir + "/manifest.json");
    out << "wrote " << table_path << '\n';
    return 0;
}

int cmd_audit(const std::string& config_path, const std::string& out_dir,
              unsigned threads, std::ostream& out) {
    const json j = load_config(config_path);
    ExperimentConfig cfg = experiment_config_from_json(j);
    cfg.kind = ExperimentKind::regularity_audit;
    if (threads != 0) cfg.threads = threads;

    RunManifest manifest;
    manifest.command = "audit";
    manifest.started_at = iso8601_utc_now();
    manifest.config_json = experiment_config_to_json(cfg).dump();

    const AuditRun run = run_audit(cfg);
    const std::string report_path = out_dir + "/report.json";
    {
        std::ofstream f(report_path);
        if (!f) throw ParameterError("cannot write report: " + report_path);
        write_report_json(f, run.report);
    }
    manifest.add_output(report_path);
    for (const auto& note : run.table.notes) manifest.status.push_back(note);
    manifest.finished_at = iso8601_utc_now();
    manifest.write(out_dir + "/manifest.json");
    out << "wrote " << report_path << '\n';
    out << (run.report.dominating_pair_found ? "dominating pair found"
                                             : "no dominating pair") << '\n';
    return 0;
}

} // namespace

int run_selftest(std::ostream& out) {
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        out << (ok ? "pass" : "FAIL") << "  " << name << '\n';
        if (!ok) ++failures;
    };

    // Determinism and extension stability of the environment.
    {
        GridSpec grid{0.0, 0.5, 12, 0};
        const Environment a = Environment::generate(7, 0, 3, grid);
        const Environment b = Environment::generate(7, 0, 3, grid);
        bool same = true;
        for (int l = 0; l <= 3; ++l)
            for (int g = 0; g <= 12; ++g)
                if (a.value(l, g) != b.value(l, g)) same = false;
        const Environment wide = Environment::generate(7, 0, 5, grid);
        for (int l = 0; l <= 3; ++l)
            for (int g = 0; g <= 12; ++g)
                if (a.value(l, g) != wide.value(l, g)) same = false;
        check("environment determinism + line extension", same);
    }

    // DP against the exhaustive oracle.
    {
        bool ok = true;
        for (int trial = 0; trial < 40 && ok; ++trial) {
            const uint64_t seed = derive_seed(99, static_cast<uint64_t>(trial));
            GridSpec grid{0.0, 1.0, 6, 0};
            const Environment env = Environment::generate(seed, 0, 2, grid);
            const int k = 1 + static_cast<int>(trial % 3);
            std::vector<int> xs, ys;
            for (int p = 0; p < k; ++p) {
                xs.push_back(p);
                ys.push_back(3 + p);
            }
            const double dp = multi_last_passage(env, xs, 0, ys, 2);
            const double bf = brute_force_multi(env, xs, 0, ys, 2);
            if (std::abs(dp - bf) > 1e-9 * (1.0 + std::abs(bf))) ok = false;
        }
        check("k-tuple DP matches the exhaustive oracle", ok);
    }

    // Meet/join energy exchange.
    {
        bool ok = true;
        GridSpec grid{0.0, 1.0, 8, 0};
        for (int trial = 0; trial < 50 && ok; ++trial) {
            const Environment env =
                Environment::generate(derive_seed(3, static_cast<uint64_t>(trial)), 0, 3, grid);
            const Staircase s1 = geodesic(env, {0, 0}, {5, 3}, TieRule::leftmost);
            const Staircase s2 = geodesic(env, {1, 0}, {7, 3}, TieRule::rightmost);
            const double lhs = staircase_energy(env, staircase_meet(s1, s2)) +
                               staircase_energy(env, staircase_join(s1, s2));
            const double rhs = staircase_energy(env, s1) + staircase_energy(env, s2);
            if (std::abs(lhs - rhs) > 1e-9 * (1.0 + std::abs(rhs))) ok = false;
        }
        check("meet/join energy exchange", ok);
    }

    // Splitting additivity and proper-weight identity.
    {
        bool ok = true;
        const CompatibleTriple triple{8, 0.0, 1.0};
        const double delta = experiment_delta(8, 1.0, 0.05);
        const GridSpec grid = experiment_grid(8, 0.0, 1.0, -0.5, 0.5, -0.5, 0.5, delta);
        for (int trial = 0; trial < 20 && ok; ++trial) {
            const Environment env =
                Environment::generate(derive_seed(11, static_cast<uint64_t>(trial)), 0, 8, grid);
            const auto [z1, z2] = split_polymer(env, triple, 0.0, 0.0, 0.5);
            const double whole = polymer_weight(env, triple, 0.0, 0.0);
            if (std::abs(z1.weight + z2.weight - whole) > 1e-9 * (1.0 + std::abs(whole)))
                ok = false;
            const double prop = proper_multi_weight_forward(env, triple, 0.0, {0.0});
            // Forward-proper single path: pin the last jump to the endpoint.
            const SnappedPoint sx = snap_scaled(env, 8, 0.0, 0.0);
            const SnappedPoint sy = snap_scaled(env, 8, 0.0, 1.0);
            const double pinned = last_passage(env, {sx.g, 0}, {sy.g, 7}) +
                                  0.0; // jump across the last line adds nothing
            const double direct = 0.70710678118654752440 / one_third_power(8) *
                                  (pinned - 2.0 * 8 - 2.0 * two_thirds_power(8) *
                                                          (sy.x_used - sx.x_used) + 1.0);
            if (std::abs(prop - direct) > 1e-9 * (1.0 + std::abs(direct))) ok = false;
        }
        check("split additivity + forward proper identity", ok);
    }

    // Ensemble partial sums reproduce watermelon weights.
    {
        bool ok = true;
        const CompatibleTriple triple{6, 0.0, 1.0};
        const double delta = experiment_delta(6, 1.0, 0.05);
        const GridSpec grid = experiment_grid(6, 0.0, 1.0, 0.0, 0.0, -1.0, 1.0, delta);
        const Environment env = Environment::generate(21, 0, 6, grid);
        const std::vector<double> samples{-0.5, 0.0, 0.5};
        const LineEnsemble ens = forward_ensemble(env, triple, 0.0, 2, samples);
        for (size_t s = 0; s < samples.size() && ok; ++s) {
            const std::vector<double> pair(2, ens.domain[s]);
            const double direct = multi_polymer_weight(env, triple,
                                                       std::vector<double>(2, 0.0), pair);
            const double sum = ens.value(1, s) + ens.value(2, s);
            if (std::abs(direct - sum) > 1e-9 * (1.0 + std::abs(direct))) ok = false;
        }
        check("ensemble sums equal watermelon weights", ok);
    }

    out << (failures == 0 ? "selftest ok" : "selftest FAILED") << '\n';
    return failures;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Brownian last passage percolation simulator"};
    app.require_subcommand(1);

    // sample
    auto* sample = app.add_subcommand("sample", "generate and dump an environment");
    uint64_t s_seed = 1;
    int s_lmin = 0, s_lmax = 0, s_cells = 10, s_anchor = 0;
    double s_x0 = 0.0, s_delta = 1.0;
    std::string s_out = "env.bin", s_manifest;
    sample->add_option("--seed", s_seed);
    sample->add_option("--line-min", s_lmin);
    sample->add_option("--line-max", s_lmax);
    sample->add_option("--x0", s_x0);
    sample->add_option("--delta", s_delta);
    sample->add_option("--cells", s_cells);
    sample->add_option("--anchor", s_anchor);
    sample->add_option("--out", s_out);
    sample->add_option("--manifest", s_manifest);

    // geodesic
    auto* geo = app.add_subcommand("geodesic", "polymer weight and path");
    uint64_t g_seed = 1;
    int g_n = 16;
    std::string g_from = "0,0", g_to = "0,1", g_tie = "leftmost";
    double g_res = 0.01;
    geo->add_option("--seed", g_seed);
    geo->add_option("--n", g_n);
    geo->add_option("--from", g_from);
    geo->add_option("--to", g_to);
    geo->add_option("--resolution", g_res);
    geo->add_option("--tie", g_tie);

    // multi
    auto* multi = app.add_subcommand("multi", "multi-polymer weight");
    uint64_t m_seed = 1;
    int m_n = 16;
    double m_t1 = 0.0, m_t2 = 1.0, m_res = 0.01;
    std::string m_from = "0,0", m_to = "0,0";
    multi->add_option("--seed", m_seed);
    multi->add_option("--n", m_n);
    multi->add_option("--t1", m_t1);
    multi->add_option("--t2", m_t2);
    multi->add_option("--from", m_from);
    multi->add_option("--to", m_to);
    multi->add_option("--resolution", m_res);

    // ensemble
    auto* ens = app.add_subcommand("ensemble", "emit a line ensemble CSV");
    uint64_t e_seed = 1;
    int e_n = 16, e_kmax = 2, e_count = 9;
    double e_t1 = 0.0, e_t2 = 1.0, e_root = 0.0, e_zlo = -2.0, e_zhi = 2.0;
    std::string e_out = "ensemble.csv", e_manifest;
    ens->add_option("--seed", e_seed);
    ens->add_option("--n", e_n);
    ens->add_option("--t1", e_t1);
    ens->add_option("--t2", e_t2);
    ens->add_option("--root", e_root);
    ens->add_option("--kmax", e_kmax);
    ens->add_option("--z-lo", e_zlo);
    ens->add_option("--z-hi", e_zhi);
    ens->add_option("--z-count", e_count);
    ens->add_option("--out", e_out);
    ens->add_option("--manifest", e_manifest);

    // events / exponent / audit
    auto* events = app.add_subcommand("events", "evaluate an event batch");
    std::string ev_config, ev_out = "events.csv", ev_manifest;
    unsigned ev_threads = 0;
    events->add_option("--config", ev_config)->required();
    events->add_option("--out", ev_out);
    events->add_option("--manifest", ev_manifest);
    events->add_option("--threads", ev_threads);

    auto* exponent = app.add_subcommand("exponent", "run an experiment and fit");
    std::string ex_config, ex_out = ".";
    unsigned ex_threads = 0;
    exponent->add_option("--config", ex_config)->required();
    exponent->add_option("--out", ex_out);
    exponent->add_option("--threads", ex_threads);

    auto* audit = app.add_subcommand("audit", "regularity audit");
    std::string au_config, au_out = ".";
    unsigned au_threads = 0;
    audit->add_option("--config", au_config)->required();
    audit->add_option("--out", au_out);
    audit->add_option("--threads", au_threads);

    auto* selftest = app.add_subcommand("selftest", "run the oracle suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "parameter error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (sample->parsed())
            return cmd_sample(s_out, s_seed, s_lmin, s_lmax, s_x0, s_delta, s_cells,
                              s_anchor, s_manifest, out);
        if (geo->parsed())
            return cmd_geodesic(g_seed, g_n, g_from, g_to, g_res, g_tie, out);
        if (multi->parsed())
            return cmd_multi(m_seed, m_n, m_t1, m_t2, m_from, m_to, m_res, out);
        if (ens->parsed())
            return cmd_ensemble(e_seed, e_n, e_t1, e_t2, e_root, e_kmax, e_zlo, e_zhi,
                                e_count, e_out, e_manifest, out);
        if (events->parsed())
            return cmd_events(ev_config, ev_out, ev_manifest, ev_threads, out);
        if (exponent->parsed()) return cmd_exponent(ex_config, ex_out, ex_threads, out);
        if (audit->parsed()) return cmd_audit(au_config, au_out, au_threads, out);
        if (selftest->parsed()) return run_selftest(out) == 0 ? 0 : 1;
    } catch (const ParameterError& e) {
        err << "parameter error: " << e.what() << '\n';
        return 2;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << '\n';
        return 3;
    } catch (const StatisticsError& e) {
        err << "statistics error: " << e.what() << '\n';
        return 4;
    }
    return 2;
}

} // namespace blpp
