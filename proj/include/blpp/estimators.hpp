#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "blpp/ensemble.hpp"
#include "blpp/events.hpp"
#include "blpp/stats.hpp"

namespace blpp {

enum class ExperimentKind {
    transversal_fluctuation,
    weight_sd,
    weight_difference,
    disjoint_rarity,
    near_poly_rarity,
    dev_reg_tail,
    regularity_audit,
};

const char* experiment_kind_name(ExperimentKind kind);
ExperimentKind experiment_kind_from_name(const std::string& name);

// Monte Carlo experiment description. Replicate r always runs on the
// environment seeded by derive_seed(master_seed, r); results are identical
// for any thread count.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::transversal_fluctuation;
    uint64_t master_seed = 1;
    int replicate_count = 100;

    std::vector<int> n_values;          // n sweep (transversal, weight_sd)
    int n = 100;                        // fixed n for the other kinds
    std::vector<double> epsilon_values; // weight_difference, disjoint_rarity
    std::vector<double> eta_values;     // near_poly_rarity
    std::vector<double> r_values;       // dev_reg_tail
    double a = 0.5;                     // dev_reg_tail lifetime fraction
    int k = 2;                          // path count for the rare events

    // Grid policy: delta = 2 n^{2/3} t12^{2/3} * scaled_resolution, so the
    // scaled resolution stays constant across an n sweep. Every output row
    // records the delta actually used.
    double scaled_resolution = 0.01;
    // Rare-event sweeps may pin delta from a reference epsilon instead, so
    // the grid does not change along the sweep.
    std::optional<double> delta_override;
    std::optional<double> corridor_halfwidth; // scaled units; off by default

    int endpoint_grid = 5;
    unsigned threads = 0; // 0 = hardware concurrency

    // regularity_audit parameters
    int audit_curves = 1;
    std::vector<double> z_window{0.0};
    std::vector<double> s_grid{1.0, 2.0, 3.0, 4.0};
    double c_audit = 0.05;
    double C_audit = 50.0;

    void validate() const;
};

struct EstimateRow {
    std::string sweep_name;  // "n", "eps", "eta", "r"
    double sweep_value = 0.0;
    std::string statistic;   // e.g. "sd", "freq", "freq_tol0.1"
    double value = 0.0;
    size_t count = 0;
    double lo = 0.0; // 95% interval (Wilson for frequencies)
    double hi = 0.0;
    double delta = 0.0; // grid step used at this sweep point
};

struct EstimateTable {
    ExperimentKind kind = ExperimentKind::transversal_fluctuation;
    std::vector<EstimateRow> rows;
    std::vector<std::string> notes; // rejected sweep points, with reasons
};

EstimateTable run_experiment(const ExperimentConfig& config);

// Audit runs also expose their full report.
struct AuditRun {
    RegularityReport report;
    EstimateTable table;
};
AuditRun run_audit(const ExperimentConfig& config);

// Log-log fit of `statistic` against the sweep variable.
ExponentFit fit_from_table(const EstimateTable& table, const std::string& statistic);

void write_table_csv(std::ostream& out, const EstimateTable& table);
void write_fit_json(std::ostream& out, const ExponentFit& fit,
                    const std::string& x_name, const std::string& y_name);

// Unscaled mid-height deviation |geodesic(t) - n/2| at line floor(n/2) of the
// geodesic from (0,0) to (n,n), farthest-point convention.
double transversal_fluctuation_stat(const Environment& env, int n,
                                    const DpOptions& opt = {});

// Grid builders used by the experiments and the CLI.
double experiment_delta(int n, double t12, double scaled_resolution);
GridSpec experiment_grid(int n, double t1, double t2, double x_lo, double x_hi,
                         double y_lo, double y_hi, double delta);

} // namespace blpp
