#pragma once

#include "blpp/scaled.hpp"

namespace blpp {

// Outcome of an order-relation test; on failure, `violation` pinpoints the
// first offending (line, grid index).
struct OrderWitness {
    bool strict = false;
    bool holds = false;
    bool has_violation = false;
    LatticePoint violation;
};

// Z1 precedes Z2 strictly: endpoints ordered and the two paths share no
// horizontal interval of positive length. (The defining sentence in the
// source material reads "x1 <= y1, x2 <= y2"; we read it as endpoint
// ordering between the two paths, x1 <= x2 and y1 <= y2, plus separateness.)
OrderWitness precedes_strict(const Zigzag& z1, const Zigzag& z2);

// Z2 lies on or to the right of Z1: every entry of Z2 sits at or right of
// the corresponding entry of Z1 on every line.
OrderWitness precedes_weak(const Zigzag& z1, const Zigzag& z2);

// Staircase-level variants (order logic is always grid-exact).
OrderWitness precedes_strict(const Staircase& s1, const Staircase& s2);
OrderWitness precedes_weak(const Staircase& s1, const Staircase& s2);

// Pointwise min and max of two staircases sharing a line range: the meet runs
// from the leftmost endpoints and stays leftmost; the join is symmetric. Both
// are composed only of segments of the inputs and satisfy
// E(meet) + E(join) = E(s1) + E(s2).
Staircase staircase_meet(const Staircase& s1, const Staircase& s2);
Staircase staircase_join(const Staircase& s1, const Staircase& s2);

// Computes the multi-geodesics of two componentwise-dominated endpoint
// systems on one environment and verifies componentwise weak precedence.
struct CouplingResult {
    bool holds = false;
    int component = -1; // first violating component when !holds
    OrderWitness witness;
};
CouplingResult monotone_coupling_check(const Environment& env, int line_i, int line_j,
                                       const std::vector<int>& us, const std::vector<int>& xs,
                                       const std::vector<int>& vs, const std::vector<int>& ys,
                                       const DpOptions& opt = {});

// Diagonal bouquet: component i is the i-th component of the watermelon
// multi-geodesic from x*1 to us[i]*1. Consecutive components are strictly
// separate, and the total weight lower-bounds the bouquet weight
// Wgt_{n,k}(x*1 -> us).
struct DiagonalBouquet {
    MultiStaircase paths;
    std::vector<double> component_weights;
    double total_weight = 0.0;
    bool separate = false;
    LatticePoint violation; // populated when !separate
};
DiagonalBouquet diagonal_bouquet(const Environment& env, const CompatibleTriple& triple,
                                 double x, const std::vector<double>& us,
                                 const DpOptions& opt = {});

} // namespace blpp
