#include "blpp/lpp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace blpp {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Per-line position bounds for the sweep DPs. Without a corridor this is the
// static envelope [lo, hi]; with one, a straight-line interpolation of the
// endpoint envelope widened by the requested half width.
struct LineBounds {
    int line_i, line_j;
    int global_lo, global_hi;
    int start_lo, start_hi, end_lo, end_hi;
    std::optional<int> halfwidth;

    std::pair<int, int> at(int m) const {
        if (!halfwidth) return {global_lo, global_hi};
        const double span = std::max(1, line_j - line_i);
        const double f = (m - line_i) / span;
        const double lo_c = start_lo + f * (end_lo - start_lo);
        const double hi_c = start_hi + f * (end_hi - start_hi);
        int lo = static_cast<int>(std::floor(lo_c)) - *halfwidth;
        int hi = static_cast<int>(std::ceil(hi_c)) + *halfwidth;
        lo = std::max(lo, global_lo);
        hi = std::min(hi, global_hi);
        return {lo, hi};
    }
};

LineBounds make_bounds(int line_i, int line_j, int start_lo, int start_hi,
                       int end_lo, int end_hi, const DpOptions& opt) {
    LineBounds b;
    b.line_i = line_i;
    b.line_j = line_j;
    b.global_lo = start_lo;
    b.global_hi = end_hi;
    b.start_lo = start_lo;
    b.start_hi = start_hi;
    b.end_lo = end_lo;
    b.end_hi = end_hi;
    b.halfwidth = opt.corridor_halfwidth_cells;
    return b;
}

void require_inside_grid(const Environment& env, LatticePoint p, const char* what) {
    if (p.line < env.line_min() || p.line > env.line_max())
        throw ParameterError(std::string(what) + ": line outside environment");
    if (p.g < 0 || p.g > env.grid().num_cells)
        throw ParameterError(std::string(what) + ": grid index outside environment");
}
} // namespace

void Staircase::validate() const {
    if (start.line > end.line)
        throw ParameterError("staircase must not descend");
    if (start.g > end.g)
        throw ParameterError("staircase must not move left");
    if (static_cast<int>(jumps.size()) != end.line - start.line)
        throw ParameterError("staircase has wrong jump count");
    int prev = start.g;
    for (int z : jumps) {
        if (z < prev)
            throw ParameterError("staircase jumps must be nondecreasing");
        prev = z;
    }
    if (end.g < prev)
        throw ParameterError("staircase end lies left of last jump");
}

int Staircase::entry(int line) const {
    if (line == start.line) return start.g;
    return jumps[static_cast<size_t>(line - start.line - 1)];
}

int Staircase::exit(int line) const {
    if (line == end.line) return end.g;
    return jumps[static_cast<size_t>(line - start.line)];
}

void MultiStaircase::validate() const {
    if (paths.empty()) throw ParameterError("empty staircase tuple");
    const int i = paths.front().start.line;
    const int j = paths.front().end.line;
    for (const auto& s : paths) {
        s.validate();
        if (s.start.line != i || s.end.line != j)
            throw ParameterError("staircase tuple must share its line range");
    }
    for (size_t p = 0; p + 1 < paths.size(); ++p)
        for (int m = i; m <= j; ++m)
            if (paths[p].exit(m) > paths[p + 1].entry(m))
                throw ParameterError("staircase tuple is not horizontally separate");
}

double staircase_energy(const Environment& env, const Staircase& s) {
    s.validate();
    require_inside_grid(env, s.start, "staircase");
    require_inside_grid(env, s.end, "staircase");
    double e = 0.0;
    for (int m = s.start.line; m <= s.end.line; ++m)
        e += env.value(m, s.exit(m)) - env.value(m, s.entry(m));
    return e;
}

// ---------------------------------------------------------------------------
// Single path sweep.

namespace {

// Rows of best energies from `from` up to each line; rows[m - from.line][g].
std::vector<std::vector<double>> sweep_rows(const Environment& env, LatticePoint from,
                                            int end_line, int end_lo, int end_hi,
                                            const DpOptions& opt) {
    require_inside_grid(env, from, "last_passage");
    if (end_line < from.line)
        throw InfeasibleError("end line below start line");
    if (end_line > env.line_max())
        throw ParameterError("end line outside environment");

    const LineBounds bounds =
        make_bounds(from.line, end_line, from.g, from.g, end_lo, end_hi, opt);
    const int W = env.grid().size();

    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<size_t>(end_line - from.line + 1));

    std::vector<double> cur(static_cast<size_t>(W), kNegInf);
    {
        auto [lo, hi] = bounds.at(from.line);
        const double* b = env.row(from.line);
        for (int g = std::max(lo, from.g); g <= hi; ++g)
            cur[g] = b[g] - b[from.g];
    }
    rows.push_back(cur);

    for (int m = from.line + 1; m <= end_line; ++m) {
        auto [lo, hi] = bounds.at(m);
        const double* b = env.row(m);
        std::vector<double> next(static_cast<size_t>(W), kNegInf);
        double carry = kNegInf; // max over h <= g of cur[h] - b[h]
        for (int g = std::max(0, std::min(lo, bounds.at(m - 1).first)); g <= hi; ++g) {
            if (cur[g] != kNegInf) carry = std::max(carry, cur[g] - b[g]);
            if (g >= lo && carry != kNegInf) next[g] = carry + b[g];
        }
        cur.swap(next);
        rows.push_back(cur);
    }
    return rows;
}

} // namespace

std::vector<double> last_passage_profile(const Environment& env, LatticePoint from,
                                         int end_line, const DpOptions& opt) {
    auto rows = sweep_rows(env, from, end_line, from.g, env.grid().num_cells, opt);
    return rows.back();
}

double last_passage(const Environment& env, LatticePoint from, LatticePoint to,
                    const DpOptions& opt) {
    require_inside_grid(env, to, "last_passage");
    if (to.g < from.g || to.line < from.line)
        throw InfeasibleError("end point not northeasterly of start point");
    auto rows = sweep_rows(env, from, to.line, to.g, to.g, opt);
    const double v = rows.back()[to.g];
    if (v == kNegInf) throw InfeasibleError("end point unreachable");
    return v;
}

Staircase geodesic(const Environment& env, LatticePoint from, LatticePoint to,
                   TieRule tie, const DpOptions& opt) {
    require_inside_grid(env, to, "geodesic");
    if (to.g < from.g || to.line < from.line)
        throw InfeasibleError("end point not northeasterly of start point");

    auto rows = sweep_rows(env, from, to.line, to.g, to.g, opt);
    if (rows.back()[to.g] == kNegInf)
        throw InfeasibleError("end point unreachable");

    Staircase s;
    s.start = from;
    s.end = to;
    s.jumps.assign(static_cast<size_t>(to.line - from.line), 0);

    int cur = to.g;
    for (int m = to.line; m > from.line; --m) {
        const double* b = env.row(m);
        const auto& prev = rows[static_cast<size_t>(m - 1 - from.line)];
        // The jump onto line m happened at the position h <= cur maximizing
        // prev[h] - B(m, h); ties break per rule.
        double best = kNegInf;
        for (int h = from.g; h <= cur; ++h)
            if (prev[h] != kNegInf) best = std::max(best, prev[h] - b[h]);
        int pick = -1;
        if (tie == TieRule::leftmost) {
            for (int h = from.g; h <= cur; ++h)
                if (prev[h] != kNegInf && prev[h] - b[h] == best) { pick = h; break; }
        } else {
            for (int h = cur; h >= from.g; --h)
                if (prev[h] != kNegInf && prev[h] - b[h] == best) { pick = h; break; }
        }
        s.jumps[static_cast<size_t>(m - 1 - from.line)] = pick;
        cur = pick;
    }
    return s;
}

// ---------------------------------------------------------------------------
// k-tuple sweep. Layers are dense arrays over [lo, hi]^k, indexed by the
// tuple of positions at which the paths enter the current line. One line
// transition is: subtract B(m, .) per coordinate, then for ascending
// coordinate p a prefix maximum over old position g_p in
// [new position of coordinate p-1, new position of coordinate p], then add
// B(m, .) back at the new positions. The cross constraint
// exit_p(m) <= entry_{p+1}(m) is exactly the lower bound of the window.

namespace {

struct MultiDp {
    const Environment& env;
    int k;
    int lo, hi, width;
    LineBounds bounds;
    std::vector<double> layer;
    size_t cells; // width^k

    MultiDp(const Environment& e, const std::vector<int>& xs, int line_i, int line_j,
            int end_lo, int end_hi, const DpOptions& opt, size_t max_bytes)
        : env(e), k(static_cast<int>(xs.size())),
          lo(0), hi(0), width(0),
          bounds(make_bounds(line_i, line_j, xs.front(), xs.back(), end_lo, end_hi, opt)) {
        if (k < 1) throw ParameterError("k must be at least 1");
        for (size_t p = 0; p + 1 < xs.size(); ++p)
            if (xs[p] > xs[p + 1]) throw ParameterError("start tuple must be nondecreasing");
        if (line_i < env.line_min() || line_j > env.line_max() || line_i > line_j)
            throw ParameterError("line range outside environment");
        for (int x : xs)
            if (x < 0 || x > env.grid().num_cells)
                throw ParameterError("start position outside grid");
        lo = xs.front();
        hi = end_hi;
        if (hi < lo) throw InfeasibleError("end envelope left of start tuple");
        width = hi - lo + 1;
        cells = 1;
        for (int p = 0; p < k; ++p) {
            if (cells > max_bytes / sizeof(double) / static_cast<size_t>(width))
                throw SizeError("k-tuple DP instance too large");
            cells *= static_cast<size_t>(width);
        }
        if (cells * sizeof(double) > max_bytes)
            throw SizeError("k-tuple DP instance too large");
        layer.assign(cells, kNegInf);
        size_t idx = 0;
        for (int p = 0; p < k; ++p) idx = idx * width + (xs[p] - lo);
        layer[idx] = 0.0;
    }

    // Advance the layer across line m (positions entering m -> exiting m).
    void step(int m) {
        const double* b = env.row(m);
        auto [clo, chi] = bounds.at(m);
        clo = std::max(clo, lo);
        chi = std::min(chi, hi);

        if (k == 2) {
            step_pair(b, clo, chi);
            return;
        }

        // Generic path: subtract B per coordinate, prefix passes, add B back.
        for (int axis = 0; axis < k; ++axis) axis_add(b, axis, -1.0);
        for (int axis = 0; axis < k; ++axis) prefix_pass(axis, clo, chi);
        for (int axis = 0; axis < k; ++axis) axis_add(b, axis, +1.0);
    }

    void axis_add(const double* b, int axis, double sign) {
        const size_t inner = stride(axis);
        const size_t outer = cells / (inner * width);
        for (size_t o = 0; o < outer; ++o) {
            double* base = layer.data() + o * inner * width;
            for (int g = 0; g < width; ++g) {
                const double add = sign * b[lo + g];
                double* run = base + static_cast<size_t>(g) * inner;
                for (size_t t = 0; t < inner; ++t)
                    if (run[t] != kNegInf) run[t] += add;
            }
        }
    }

    size_t stride(int axis) const {
        size_t s = 1;
        for (int a = k - 1; a > axis; --a) s *= static_cast<size_t>(width);
        return s;
    }

    // Prefix max along `axis`, windowed below by the (already replaced)
    // coordinate axis-1, masked to [clo, chi].
    void prefix_pass(int axis, int clo, int chi) {
        const size_t ax_stride = stride(axis);
        std::vector<size_t> odo(static_cast<size_t>(k), 0); // odometer over other axes
        const size_t slices = cells / static_cast<size_t>(width);
        for (size_t s = 0; s < slices; ++s) {
            // Decode slice id into coordinates of the non-axis dimensions.
            size_t rem = s;
            size_t base = 0;
            for (int a = k - 1; a >= 0; --a) {
                if (a == axis) continue;
                const size_t c = rem % static_cast<size_t>(width);
                rem /= static_cast<size_t>(width);
                base += c * stride(a);
                odo[a] = c;
            }
            const int from = (axis > 0) ? lo + static_cast<int>(odo[axis - 1]) : lo;
            double carry = kNegInf;
            for (int g = lo; g <= hi; ++g) {
                double* cell = layer.data() + base + static_cast<size_t>(g - lo) * ax_stride;
                if (g >= from && *cell != kNegInf && *cell > carry) carry = *cell;
                *cell = (g >= clo && g <= chi) ? carry : kNegInf;
            }
        }
    }

    // Fused fast path for k = 2.
    void step_pair(const double* b, int clo, int chi) {
        double* L = layer.data();
        std::vector<double> carry(static_cast<size_t>(width), kNegInf);
        for (int g1 = lo; g1 <= hi; ++g1) {
            double* row = L + static_cast<size_t>(g1 - lo) * width;
            const double b1 = b[g1];
            // carry[g2] = max over h <= g1 of V[h][g2] - B(h)
            for (int g2 = g1; g2 <= hi; ++g2) {
                const double v = row[g2 - lo];
                if (v != kNegInf) {
                    const double w = v - b1;
                    if (w > carry[g2 - lo]) carry[g2 - lo] = w;
                }
            }
            if (g1 < clo || g1 > chi) {
                std::fill(row, row + width, kNegInf);
                continue;
            }
            // run = max over g2 in [g1, e2] of carry[g2] - B(g2)
            double run = kNegInf;
            for (int e2 = lo; e2 <= hi; ++e2) {
                if (e2 >= g1) {
                    const double c = carry[e2 - lo];
                    if (c != kNegInf) {
                        const double w = c - b[e2];
                        if (w > run) run = w;
                    }
                }
                row[e2 - lo] = (e2 >= clo && e2 <= chi && e2 >= g1 && run != kNegInf)
                                   ? run + b1 + b[e2]
                                   : kNegInf;
            }
        }
    }

    double at(const std::vector<int>& tuple) const {
        size_t idx = 0;
        for (int p = 0; p < k; ++p) {
            if (tuple[p] < lo || tuple[p] > hi) return kNegInf;
            idx = idx * width + (tuple[p] - lo);
        }
        return layer[idx];
    }
};

void check_multi_args(const std::vector<int>& xs, const std::vector<int>& ys) {
    if (xs.empty() || xs.size() != ys.size())
        throw ParameterError("endpoint tuples must be nonempty and equally sized");
    for (size_t p = 0; p + 1 < ys.size(); ++p)
        if (ys[p] > ys[p + 1]) throw ParameterError("end tuple must be nondecreasing");
    for (size_t p = 0; p < xs.size(); ++p)
        if (ys[p] < xs[p]) throw InfeasibleError("path end lies left of its start");
}

constexpr size_t kValueDpMaxBytes = size_t(1) << 31;   // 2 GiB, one layer
constexpr size_t kTracedDpMaxBytes = size_t(3) << 28;  // ~0.8 GiB, all layers

} // namespace

double multi_last_passage(const Environment& env, const std::vector<int>& xs,
                          int line_i, const std::vector<int>& ys, int line_j,
                          const DpOptions& opt) {
    check_multi_args(xs, ys);
    if (xs.size() == 1) {
        return last_passage(env, {xs[0], line_i}, {ys[0], line_j}, opt);
    }
    MultiDp dp(env, xs, line_i, line_j, ys.front(), ys.back(), opt, kValueDpMaxBytes);
    for (int m = line_i; m <= line_j; ++m) dp.step(m);
    const double v = dp.at(ys);
    if (v == kNegInf) throw InfeasibleError("no horizontally separate tuple exists");
    return v;
}

MultiEndTable::MultiEndTable(const Environment& env, const std::vector<int>& xs,
                             int line_i, int line_j, const DpOptions& opt)
    : k_(static_cast<int>(xs.size())) {
    MultiDp dp(env, xs, line_i, line_j, xs.front(), env.grid().num_cells, opt,
               kValueDpMaxBytes);
    for (int m = line_i; m <= line_j; ++m) dp.step(m);
    lo_ = dp.lo;
    hi_ = dp.hi;
    layer_ = std::move(dp.layer);
}

double MultiEndTable::energy(const std::vector<int>& ys) const {
    if (static_cast<int>(ys.size()) != k_)
        throw ParameterError("end tuple has wrong arity");
    size_t idx = 0;
    const int width = hi_ - lo_ + 1;
    for (int p = 0; p < k_; ++p) {
        if (ys[p] < lo_ || ys[p] > hi_) return kNegInf;
        idx = idx * width + (ys[p] - lo_);
    }
    return layer_[idx];
}

MultiStaircase multi_geodesic(const Environment& env, const std::vector<int>& xs,
                              int line_i, const std::vector<int>& ys, int line_j,
                              TieRule tie, const DpOptions& opt) {
    check_multi_args(xs, ys);
    const int k = static_cast<int>(xs.size());

    // Forward pass, storing every layer for the backtrack.
    std::vector<std::vector<double>> layers;
    MultiDp dp(env, xs, line_i, line_j, ys.front(), ys.back(), opt,
               kTracedDpMaxBytes / static_cast<size_t>(line_j - line_i + 2));
    layers.push_back(dp.layer);
    for (int m = line_i; m <= line_j; ++m) {
        dp.step(m);
        layers.push_back(dp.layer);
    }
    if (dp.at(ys) == kNegInf)
        throw InfeasibleError("no horizontally separate tuple exists");

    const int lo = dp.lo, width = dp.width;
    auto value_at = [&](const std::vector<double>& layer, const std::vector<int>& t) {
        size_t idx = 0;
        for (int p = 0; p < k; ++p) idx = idx * width + (t[p] - lo);
        return layer[idx];
    };

    // Backtrack: at each line, scan the feasible box for the tuple attaining
    // the transition maximum, taking the lexicographically extreme one.
    std::vector<std::vector<int>> tuples(static_cast<size_t>(line_j - line_i + 2));
    tuples.back() = ys;
    for (int m = line_j; m >= line_i; --m) {
        const auto& here = tuples[static_cast<size_t>(m - line_i + 1)];
        const auto& prev_layer = layers[static_cast<size_t>(m - line_i)];
        const double* b = env.row(m);

        // Feasible old tuples: t[p] in [here[p-1], here[p]] (t[0] >= lo).
        std::vector<int> t(static_cast<size_t>(k));
        auto score = [&](const std::vector<int>& cand) {
            const double v = value_at(prev_layer, cand);
            if (v == kNegInf) return kNegInf;
            double w = v;
            for (int p = 0; p < k; ++p) w -= b[cand[p]];
            return w;
        };
        // Pass 1 finds the transition maximum, pass 2 the first attainer in
        // the tie rule's scan order; equality is exact because the same
        // floating point values are compared.
        double best = kNegInf;
        std::vector<int> chosen;
        bool done = false;
        const bool left = (tie == TieRule::leftmost);
        std::function<void(int, bool)> scan = [&](int p, bool picking) {
            if (done) return;
            const int lo_p = std::max(lo, (p == 0) ? lo : here[static_cast<size_t>(p - 1)]);
            const int hi_p = here[static_cast<size_t>(p)];
            for (int step = 0; step <= hi_p - lo_p && !done; ++step) {
                const int g = left ? lo_p + step : hi_p - step;
                t[static_cast<size_t>(p)] = g;
                if (p + 1 == k) {
                    const double w = score(t);
                    if (!picking) {
                        if (w > best) best = w;
                    } else if (w == best && w != kNegInf) {
                        chosen = t;
                        done = true;
                    }
                } else {
                    scan(p + 1, picking);
                }
            }
        };
        scan(0, false);
        scan(0, true);
        tuples[static_cast<size_t>(m - line_i)] = chosen;
    }

    MultiStaircase ms;
    ms.paths.resize(static_cast<size_t>(k));
    for (int p = 0; p < k; ++p) {
        Staircase& s = ms.paths[static_cast<size_t>(p)];
        s.start = {xs[static_cast<size_t>(p)], line_i};
        s.end = {ys[static_cast<size_t>(p)], line_j};
        s.jumps.resize(static_cast<size_t>(line_j - line_i));
        for (int m = line_i + 1; m <= line_j; ++m)
            s.jumps[static_cast<size_t>(m - line_i - 1)] =
                tuples[static_cast<size_t>(m - line_i)][static_cast<size_t>(p)];
    }
    ms.validate();
    return ms;
}

double brute_force_multi(const Environment& env, const std::vector<int>& xs,
                         int line_i, const std::vector<int>& ys, int line_j) {
    check_multi_args(xs, ys);
    const int k = static_cast<int>(xs.size());
    const int steps = line_j - line_i;
    if (steps > 3 || env.grid().num_cells > 8 || k > 3)
        throw SizeError("brute_force_multi instance too large");

    // All monotone jump vectors per path.
    std::vector<std::vector<std::vector<int>>> cand(static_cast<size_t>(k));
    for (int p = 0; p < k; ++p) {
        std::vector<int> jumps(static_cast<size_t>(steps));
        std::function<void(int, int)> gen = [&](int d, int from) {
            if (d == steps) {
                cand[static_cast<size_t>(p)].push_back(jumps);
                return;
            }
            for (int z = from; z <= ys[static_cast<size_t>(p)]; ++z) {
                jumps[static_cast<size_t>(d)] = z;
                gen(d + 1, z);
            }
        };
        gen(0, xs[static_cast<size_t>(p)]);
    }

    auto make = [&](int p, const std::vector<int>& jumps) {
        Staircase s;
        s.start = {xs[static_cast<size_t>(p)], line_i};
        s.end = {ys[static_cast<size_t>(p)], line_j};
        s.jumps = jumps;
        return s;
    };
    auto separate = [&](const Staircase& a, const Staircase& b) {
        for (int m = line_i; m <= line_j; ++m)
            if (a.exit(m) > b.entry(m)) return false;
        return true;
    };

    double best = kNegInf;
    std::vector<Staircase> chosen(static_cast<size_t>(k));
    std::function<void(int, double)> rec = [&](int p, double acc) {
        if (p == k) {
            best = std::max(best, acc);
            return;
        }
        for (const auto& jumps : cand[static_cast<size_t>(p)]) {
            Staircase s = make(p, jumps);
            if (p > 0 && !separate(chosen[static_cast<size_t>(p - 1)], s)) continue;
            chosen[static_cast<size_t>(p)] = s;
            rec(p + 1, acc + staircase_energy(env, s));
        }
    };
    rec(0, 0.0);
    if (best == kNegInf)
        throw InfeasibleError("no horizontally separate tuple exists");
    return best;
}

} // namespace blpp
