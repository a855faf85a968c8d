#include "blpp/geometry.hpp"

#include <algorithm>

namespace blpp {

namespace {
void require_shared_lifetime(const Staircase& s1, const Staircase& s2) {
    if (s1.start.line != s2.start.line || s1.end.line != s2.end.line)
        throw ParameterError("order relations need a shared line range");
}
} // namespace

OrderWitness precedes_strict(const Staircase& s1, const Staircase& s2) {
    require_shared_lifetime(s1, s2);
    OrderWitness w;
    w.strict = true;
    if (s1.start.g > s2.start.g) {
        w.has_violation = true;
        w.violation = s1.start;
        return w;
    }
    if (s1.end.g > s2.end.g) {
        w.has_violation = true;
        w.violation = s1.end;
        return w;
    }
    for (int m = s1.start.line; m <= s1.end.line; ++m) {
        // Shared horizontal interval of positive length on line m.
        const int lo = std::max(s1.entry(m), s2.entry(m));
        const int hi = std::min(s1.exit(m), s2.exit(m));
        if (hi > lo) {
            w.has_violation = true;
            w.violation = {lo, m};
            return w;
        }
    }
    w.holds = true;
    return w;
}

OrderWitness precedes_weak(const Staircase& s1, const Staircase& s2) {
    require_shared_lifetime(s1, s2);
    OrderWitness w;
    w.strict = false;
    for (int m = s1.start.line; m <= s1.end.line; ++m) {
        if (s2.entry(m) < s1.entry(m)) {
            w.has_violation = true;
            w.violation = {s2.entry(m), m};
            return w;
        }
    }
    if (s2.end.g < s1.end.g) {
        w.has_violation = true;
        w.violation = s2.end;
        return w;
    }
    w.holds = true;
    return w;
}

OrderWitness precedes_strict(const Zigzag& z1, const Zigzag& z2) {
    if (z1.triple.n != z2.triple.n)
        throw ParameterError("order relations need a shared scaling parameter");
    return precedes_strict(z1.staircase, z2.staircase);
}

OrderWitness precedes_weak(const Zigzag& z1, const Zigzag& z2) {
    if (z1.triple.n != z2.triple.n)
        throw ParameterError("order relations need a shared scaling parameter");
    return precedes_weak(z1.staircase, z2.staircase);
}

namespace {
Staircase pointwise(const Staircase& s1, const Staircase& s2, bool take_min) {
    require_shared_lifetime(s1, s2);
    Staircase out;
    auto pick = [take_min](int a, int b) { return take_min ? std::min(a, b) : std::max(a, b); };
    out.start = {pick(s1.start.g, s2.start.g), s1.start.line};
    out.end = {pick(s1.end.g, s2.end.g), s1.end.line};
    out.jumps.resize(s1.jumps.size());
    for (size_t i = 0; i < s1.jumps.size(); ++i)
        out.jumps[i] = pick(s1.jumps[i], s2.jumps[i]);
    out.validate();
    return out;
}
} // namespace

Staircase staircase_meet(const Staircase& s1, const Staircase& s2) {
    return pointwise(s1, s2, true);
}

Staircase staircase_join(const Staircase& s1, const Staircase& s2) {
    return pointwise(s1, s2, false);
}

CouplingResult monotone_coupling_check(const Environment& env, int line_i, int line_j,
                                       const std::vector<int>& us, const std::vector<int>& xs,
                                       const std::vector<int>& vs, const std::vector<int>& ys,
                                       const DpOptions& opt) {
    if (us.size() != xs.size() || vs.size() != ys.size() || us.size() != vs.size())
        throw ParameterError("endpoint systems must share their arity");
    for (size_t p = 0; p < us.size(); ++p)
        if (vs[p] < us[p] || ys[p] < xs[p])
            throw ParameterError("second endpoint system must dominate the first");

    const MultiStaircase low = multi_geodesic(env, us, line_i, xs, line_j,
                                              TieRule::leftmost, opt);
    const MultiStaircase high = multi_geodesic(env, vs, line_i, ys, line_j,
                                               TieRule::leftmost, opt);
    CouplingResult res;
    res.holds = true;
    for (size_t p = 0; p < us.size(); ++p) {
        const OrderWitness w = precedes_weak(low.paths[p], high.paths[p]);
        if (!w.holds) {
            res.holds = false;
            res.component = static_cast<int>(p);
            res.witness = w;
            return res;
        }
    }
    return res;
}

DiagonalBouquet diagonal_bouquet(const Environment& env, const CompatibleTriple& triple,
                                 double x, const std::vector<double>& us,
                                 const DpOptions& opt) {
    triple.validate();
    if (us.empty()) throw ParameterError("bouquet needs at least one end point");
    for (size_t p = 0; p + 1 < us.size(); ++p)
        if (us[p] > us[p + 1]) throw ParameterError("end tuple must be nondecreasing");

    const int k = static_cast<int>(us.size());
    const int li = triple.line1();
    const int lj = triple.line2();
    const SnappedPoint sx = snap_scaled(env, triple.n, x, triple.t1);

    DiagonalBouquet out;
    out.paths.paths.resize(static_cast<size_t>(k));
    out.component_weights.resize(static_cast<size_t>(k));

    for (int i = 0; i < k; ++i) {
        const SnappedPoint su = snap_scaled(env, triple.n, us[static_cast<size_t>(i)],
                                            triple.t2);
        const std::vector<int> starts(static_cast<size_t>(k), sx.g);
        const std::vector<int> ends(static_cast<size_t>(k), su.g);
        const MultiStaircase melon =
            multi_geodesic(env, starts, li, ends, lj, TieRule::leftmost, opt);
        out.paths.paths[static_cast<size_t>(i)] = melon.paths[static_cast<size_t>(i)];
        out.component_weights[static_cast<size_t>(i)] =
            zigzag_weight(env, triple.n, melon.paths[static_cast<size_t>(i)]);
    }
    for (double w : out.component_weights) out.total_weight += w;

    out.separate = true;
    for (int i = 0; i + 1 < k; ++i) {
        const Staircase& a = out.paths.paths[static_cast<size_t>(i)];
        const Staircase& b = out.paths.paths[static_cast<size_t>(i + 1)];
        for (int m = li; m <= lj; ++m) {
            if (a.exit(m) > b.entry(m)) {
                out.separate = false;
                out.violation = {a.exit(m), m};
                break;
            }
        }
        if (!out.separate) break;
    }
    return out;
}

} // namespace blpp
