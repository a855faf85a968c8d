#pragma once

#include <optional>
#include <vector>

#include "blpp/environment.hpp"

namespace blpp {

// A point of the unscaled lattice: grid index g on curve `line`.
struct LatticePoint {
    int g = 0;
    int line = 0;
};

enum class TieRule { leftmost, rightmost };

// Unscaled up-right path from (start.g, start.line) to (end.g, end.line).
// jumps[m - start.line - 1] is the grid index at which the path moves from
// line m-1 to line m; with the conventions entry(start.line) = start.g and
// exit(end.line) = end.g, the path occupies [entry(m), exit(m)] on line m.
struct Staircase {
    LatticePoint start;
    LatticePoint end;
    std::vector<int> jumps;

    void validate() const; // throws ParameterError on monotonicity violations
    int entry(int line) const;
    int exit(int line) const;
    int lines() const { return end.line - start.line; }
};

// Ordered k-tuple of pairwise horizontally separate staircases over a shared
// line range: exit_p(m) <= entry_{p+1}(m) on every line m.
struct MultiStaircase {
    std::vector<Staircase> paths;

    int k() const { return static_cast<int>(paths.size()); }
    void validate() const;
};

double staircase_energy(const Environment& env, const Staircase& s);

// Optional diagonal corridor for the sweep DPs. Positions on line m are
// restricted to the straight-line interpolation of the endpoint envelope
// widened by halfwidth_cells. Off by default; experiments that enable it
// record the width with their output.
struct DpOptions {
    std::optional<int> corridor_halfwidth_cells;
};

// Maximum staircase energy by line-sweep DP with a running prefix maximum,
// O((end.line - start.line + 1) * cells).
double last_passage(const Environment& env, LatticePoint from, LatticePoint to,
                    const DpOptions& opt = {});

// Value profile: best energies from `from` to every grid point of line
// end_line. Entries outside the reachable range are -inf.
std::vector<double> last_passage_profile(const Environment& env, LatticePoint from,
                                         int end_line, const DpOptions& opt = {});

Staircase geodesic(const Environment& env, LatticePoint from, LatticePoint to,
                   TieRule tie = TieRule::leftmost, const DpOptions& opt = {});

// Maximum k-tuple energy over ordered horizontally separate staircases from
// (xs, line_i) to (ys, line_j); xs and ys are nondecreasing grid indices.
double multi_last_passage(const Environment& env, const std::vector<int>& xs,
                          int line_i, const std::vector<int>& ys, int line_j,
                          const DpOptions& opt = {});

MultiStaircase multi_geodesic(const Environment& env, const std::vector<int>& xs,
                              int line_i, const std::vector<int>& ys, int line_j,
                              TieRule tie = TieRule::leftmost, const DpOptions& opt = {});

// Exhaustive oracle; enforced limits (<= 3 line steps, <= 8 cells, k <= 3).
double brute_force_multi(const Environment& env, const std::vector<int>& xs,
                         int line_i, const std::vector<int>& ys, int line_j);

// Final DP layer of the k-tuple sweep from a fixed start tuple: energies to
// every nondecreasing end tuple on line_j. Used to evaluate many end tuples
// (watermelon profiles, disjointness certificates) with one sweep.
class MultiEndTable {
public:
    MultiEndTable(const Environment& env, const std::vector<int>& xs, int line_i,
                  int line_j, const DpOptions& opt = {});

    // ys nondecreasing, within [lo, hi]; -inf when unreachable.
    double energy(const std::vector<int>& ys) const;
    int lo() const { return lo_; }
    int hi() const { return hi_; }
    int k() const { return k_; }

private:
    int k_;
    int lo_, hi_;
    std::vector<double> layer_; // dense, stride (hi-lo+1) per coordinate
};

} // namespace blpp
