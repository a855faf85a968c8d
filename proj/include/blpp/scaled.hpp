#pragma once

#include <utility>
#include <vector>

#include "blpp/lpp.hpp"

namespace blpp {

// Scaled time bookkeeping: lifetimes [t1, t2] with n*t1 and n*t2 integral, so
// scaled heights correspond to whole lines.
struct CompatibleTriple {
    int n = 1;
    double t1 = 0.0;
    double t2 = 1.0;

    void validate() const;
    double t12() const { return t2 - t1; }
    int line1() const; // n * t1 as an exact integer
    int line2() const;
    int steps() const { return line2() - line1(); } // n * t12
};

// Round a scaled time to a whole line; throws unless n*t is integral.
int scaled_time_to_line(int n, double t);

struct ScaledPoint {
    double x = 0.0;
    double t = 0.0;
};

struct UnscaledPoint {
    double v1 = 0.0; // spatial coordinate
    double v2 = 0.0; // height
};

double two_thirds_power(int n); // n^(2/3), via cbrt
double one_third_power(int n);  // n^(1/3)

// The scaling map (v1, v2) -> (2^-1 n^-2/3 (v1 - v2), v2 / n) and inverse.
ScaledPoint scale_point(int n, UnscaledPoint v);
UnscaledPoint unscale_point(int n, ScaledPoint p);

// Snap a scaled spatial coordinate at time t onto the environment grid.
// Ties round toward -inf. x_used is the scaled coordinate actually adopted.
struct SnappedPoint {
    int g = 0;
    int line = 0;
    double x_used = 0.0;
};
SnappedPoint snap_scaled(const Environment& env, int n, double x, double t);

// Scaled energy of a staircase under R_n (the staircase's own endpoints
// provide the centering terms).
double zigzag_weight(const Environment& env, int n, const Staircase& s);

// Zigzag: a staircase together with its scaled bookkeeping.
struct Zigzag {
    CompatibleTriple triple;
    Staircase staircase;
    double weight = 0.0;

    ScaledPoint start(const Environment& env) const;
    ScaledPoint end(const Environment& env) const;
};
Zigzag make_zigzag(const Environment& env, const CompatibleTriple& triple,
                   const Staircase& s);

struct SnapReport {
    double x_used = 0.0;
    double y_used = 0.0;
};

// Maximum weight of an n-zigzag from (x, t1) to (y, t2).
double polymer_weight(const Environment& env, const CompatibleTriple& triple,
                      double x, double y, SnapReport* snap = nullptr,
                      const DpOptions& opt = {});

// Maximum total weight of k horizontally separate zigzags moving
// consecutively from (xs[i], t1) to (ys[i], t2).
double multi_polymer_weight(const Environment& env, const CompatibleTriple& triple,
                            const std::vector<double>& xs, const std::vector<double>& ys,
                            const DpOptions& opt = {});

// Proper weights: the forward (resp. backward) variant restricts each zigzag
// to end (resp. begin) with a sloping segment. Both are evaluated through the
// lifetime-shortening identities
//   PropWgt_fwd  = Wgt_{n,k; (x 1, t1)}^{(u + n^{-2/3}/2, t2 - 1/n)}
//   PropWgt_back = Wgt_{n,k; (v - n^{-2/3}/2, t1 + 1/n)}^{(y 1, t2)} .
double proper_multi_weight_forward(const Environment& env, const CompatibleTriple& triple,
                                   double x, const std::vector<double>& us,
                                   const DpOptions& opt = {});
double proper_multi_weight_backward(const Environment& env, const CompatibleTriple& triple,
                                    const std::vector<double>& vs, double y,
                                    const DpOptions& opt = {});

// Interpolating segment value at time t.
double interpolant(double x, double t1, double y, double t2, double t);

// The polymer-as-function convention: among the horizontal segment of the
// polymer at height t, return the endpoint farthest from the interpolating
// segment; exact ties resolve to the rightmost candidate.
double polymer_at_time(const Environment& env, const CompatibleTriple& triple,
                       double x, double y, double t, TieRule tie = TieRule::leftmost,
                       const DpOptions& opt = {});

// Evaluate the convention on an already computed staircase.
double staircase_at_time(const Environment& env, const CompatibleTriple& triple,
                         const Staircase& s, double t, double ell_t);

// Split the polymer from (x,t1) to (y,t2) at interior time t into the two
// closed pieces through (rho(t), t).
std::pair<Zigzag, Zigzag> split_polymer(const Environment& env,
                                        const CompatibleTriple& triple, double x,
                                        double y, double t,
                                        TieRule tie = TieRule::leftmost,
                                        const DpOptions& opt = {});

// Set union of two abutting zigzags; weight is additive.
Zigzag concatenate(const Environment& env, const Zigzag& z1, const Zigzag& z2);

} // namespace blpp
