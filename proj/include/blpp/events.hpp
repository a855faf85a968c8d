#pragma once

#include <optional>
#include <vector>

#include "blpp/scaled.hpp"

namespace blpp {

// Closed scaled-coordinate interval.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    void validate() const {
        if (hi < lo) throw ParameterError("interval must satisfy lo <= hi");
    }
};

// Discretize an interval into `points` snapped grid coordinates (duplicates
// after snapping are removed). Default density is 5 points per side.
std::vector<double> discretize_interval(const Environment& env, int n, double t,
                                        const Interval& iv, int points);

struct MaxDisjointOptions {
    int k_max = 2;
    int endpoint_grid = 5;
    double tol_scale = 1.0; // multiplies the 1e-9 * (1 + |M^k|) certificate slack
    DpOptions dp;
};

// Largest k <= k_max for which nondecreasing grid tuples u in I^k, v in J^k
// exist with M^k(u, v) >= sum_p M^1(u_p, v_p) - tol. Equality within tol
// certifies that each component of the maximizing tuple is itself a geodesic.
int max_disjoint(const Environment& env, const CompatibleTriple& triple,
                 const Interval& I, const Interval& J, const MaxDisjointOptions& opt);

// The certifying tuple at level k, lexicographically minimal over the
// concatenated (u, v) scan order, or nullopt when no certificate exists.
struct DisjointCertificate {
    std::vector<double> us;
    std::vector<double> vs;
    double slack = 0.0; // M^k - sum M^1 (always <= 0 up to rounding)
};
std::optional<DisjointCertificate> disjoint_certificate(
    const Environment& env, const CompatibleTriple& triple, const Interval& I,
    const Interval& J, int k, const MaxDisjointOptions& opt);

// One scan, classified against several certificate slacks at once (the
// tolerance-sensitivity report wants 0.1x, 1x and 10x). Entry s is true when
// some tuple satisfies M^k >= sum M^1 - scales[s] * 1e-9 * (1 + |M^k|).
std::vector<bool> disjoint_event_at_scales(const Environment& env,
                                           const CompatibleTriple& triple,
                                           const Interval& I, const Interval& J, int k,
                                           const MaxDisjointOptions& opt,
                                           const std::vector<double>& scales);

// Wgt_{n,k}(x*1 -> y*1) >= k * Wgt(x -> y) - t12^{1/3} * eta.
bool near_poly(const Environment& env, const CompatibleTriple& triple, int k,
               double x, double y, double eta, const DpOptions& opt = {});

// |rho((1-a)t1 + a*t2) - ell(...)| <= r * t12^{2/3} (a ^ (1-a))^{2/3}, the
// polymer taken between points or, in the interval form, as the leftmost and
// rightmost polymers of the corner endpoints.
bool poly_dev_reg(const Environment& env, const CompatibleTriple& triple, double x,
                  double y, double a, double r, const DpOptions& opt = {});
bool poly_dev_reg(const Environment& env, const CompatibleTriple& triple,
                  const Interval& I, const Interval& J, double a, double r,
                  const DpOptions& opt = {});

// |t12^{-1/3} Wgt + 2^{-1/2} t12^{-4/3} (v - u)^2| <= r over the rectangle of
// discretized endpoints.
bool poly_wgt_reg(const Environment& env, const CompatibleTriple& triple,
                  const Interval& I, const Interval& J, double r,
                  int endpoint_grid = 5, const DpOptions& opt = {});

// Lifetime [0,1]: sup |Wgt(x2 -> y2) - Wgt(x1 -> y1)| <= r * eps^{1/2} over
// endpoints in I and J, where eps = |I| = |J|.
bool loc_wgt_reg(const Environment& env, const CompatibleTriple& triple,
                 const Interval& I, const Interval& J, double r,
                 int endpoint_grid = 5, const DpOptions& opt = {});

// Returns the supremum itself (the statistic behind loc_wgt_reg).
double loc_wgt_sup(const Environment& env, const CompatibleTriple& triple,
                   const Interval& I, const Interval& J, int endpoint_grid = 5,
                   const DpOptions& opt = {});

enum class BouquetDirection { forward, backward };

// |(t12 - 1/n)^{-1/3} PropWgt + 2^{-1/2} sum_i (t12 - 1/n)^{-4/3} d_i^2| <= r
// with d_i = u_i + n^{-2/3}/2 - x (forward) or v_i - n^{-2/3}/2 - y (backward).
bool bouquet_reg(const Environment& env, const CompatibleTriple& triple,
                 BouquetDirection direction, double anchor,
                 const std::vector<double>& tuple, double r, const DpOptions& opt = {});

// Favourable surgical conditions: the conjunction of LocWgtReg on the widened
// intervals, PolyDevReg of the long polymer at times {0, 1}, the two bouquet
// regularity events at the certificate tuples, and two PolyWgtReg events with
// slack r^2. Lifetimes are [-eps^{3/2}, 0], [0, 1] and [1, 1 + eps^{3/2}];
// requires n * eps^{3/2} integral.
struct FavSurConResult {
    bool value = false;
    bool loc_wgt = false;
    bool dev_reg = false;
    bool forward_bouquet = false;
    bool backward_bouquet = false;
    bool wgt_reg_start = false;
    bool wgt_reg_end = false;
    bool certificate_found = false; // MaxDisjtPoly >= k on the endpoint grid
};
FavSurConResult fav_sur_con(const Environment& env, int n, int k, double x, double y,
                            double eps, double r, int endpoint_grid = 5,
                            const DpOptions& opt = {});

// Normalized midlife deviation statistic and the Fluc event X in K, where K
// is a union of closed intervals (+-inf allowed).
double fluc_statistic(const Environment& env, const CompatibleTriple& triple, double x,
                      double y, double a, const DpOptions& opt = {});
bool fluc(const Environment& env, const CompatibleTriple& triple, double x, double y,
          double a, const std::vector<Interval>& K, const DpOptions& opt = {});

} // namespace blpp
