#pragma once

#include <iosfwd>
#include <vector>

#include "blpp/scaled.hpp"

namespace blpp {

enum class EnsembleKind { forward, backward, normalized_forward, normalized_backward };

// Ordered curves whose partial sums are watermelon weights: for the forward
// kind, sum_{i<=k} curve_i(y) = Wgt_{n,k}(x*1 -> y*1). Materialized on an
// explicit sample grid; immutable once built.
struct LineEnsemble {
    EnsembleKind kind = EnsembleKind::forward;
    CompatibleTriple triple;
    ScaledPoint root;
    int curve_count = 0;
    std::vector<double> domain; // scaled spatial samples (z after normalizing)
    std::vector<double> values; // curve-major: values[(curve-1)*domain.size()+s]

    double value(int curve, size_t sample) const; // curve is 1-based
    size_t samples() const { return domain.size(); }
};

// y_samples are requested scaled end coordinates; each is snapped to the grid
// and the snapped value recorded in the domain. k_max needs n*t12 + 1 curves
// or fewer.
LineEnsemble forward_ensemble(const Environment& env, const CompatibleTriple& triple,
                              double x, int k_max, const std::vector<double>& y_samples,
                              const DpOptions& opt = {});
LineEnsemble backward_ensemble(const Environment& env, const CompatibleTriple& triple,
                               double y, int k_max, const std::vector<double>& x_samples,
                               const DpOptions& opt = {});

// NrL(k, z) = t12^{-1/3} L(k, root + t12^{2/3} z). Input must be a scaled
// (not already normalized) ensemble.
LineEnsemble normalize_ensemble(const LineEnsemble& ensemble);

// The parabola Q(z) = 2^{-1/2} z^2 against which normalized curves are read.
double parabola_q(double z);

// CSV export: one "curve_index,z,value" row per sample.
void write_ensemble_csv(std::ostream& out, const LineEnsemble& ensemble);

// Empirical audit of the regular-ensemble conditions over a batch of
// normalized ensembles sharing a domain.
struct TailCell {
    double z = 0.0;
    double s = 0.0;
    double lower_freq = 0.0; // freq of NrL(1,z)+Q(z) <= -s
    double upper_freq = 0.0; // freq of NrL(1,z)+Q(z) >= s
    double bound = 0.0;      // C_audit * exp(-c_audit * s^{3/2})
};

struct CurveTailCell {
    int curve = 2;
    double z = 0.0;
    double s = 0.0;
    double freq = 0.0; // freq of NrL(curve,z)+Q(z) <= -s
};

struct RegularityReport {
    double c_audit = 0.0;
    double C_audit = 0.0;
    size_t sample_count = 0;
    std::vector<TailCell> one_point;          // Reg(2) / Reg(3) audit
    std::vector<CurveTailCell> lower_curves;  // pointwise curve lower bound
    std::vector<TailCell> interval_extrema;   // lower_freq: inf <= -s; upper_freq: sup >= s
    double collapse_freq = -1.0;              // linear-envelope exceedance; -1 if window too small
    // Smallest lattice pair dominating the observed one-point tails, if any.
    bool dominating_pair_found = false;
    double dominating_c = 0.0;
    double dominating_C = 0.0;
};

RegularityReport regularity_report(const std::vector<LineEnsemble>& normalized,
                                   double c_audit, double C_audit,
                                   const std::vector<double>& z_window,
                                   const std::vector<double>& s_grid);

void write_report_json(std::ostream& out, const RegularityReport& report);

} // namespace blpp
