#include "blpp/events.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace blpp {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_mesh(int n, double v, const char* what) {
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9 * std::max(1.0, std::abs(v)))
        throw ParameterError(std::string(what) + " violates the 1/n mesh");
    (void)n;
}

// Nondecreasing index tuples in [0, count), lexicographic scan order.
bool next_tuple(std::vector<int>& t, int count) {
    const int k = static_cast<int>(t.size());
    for (int p = k - 1; p >= 0; --p) {
        if (t[static_cast<size_t>(p)] + 1 < count) {
            const int v = t[static_cast<size_t>(p)] + 1;
            for (int q = p; q < k; ++q) t[static_cast<size_t>(q)] = v;
            return true;
        }
    }
    return false;
}
} // namespace

std::vector<double> discretize_interval(const Environment& env, int n, double t,
                                        const Interval& iv, int points) {
    iv.validate();
    if (points < 1) throw ParameterError("endpoint grid needs at least one point");
    std::vector<double> xs;
    std::vector<int> gs;
    const int count = (iv.width() == 0.0) ? 1 : points;
    for (int j = 0; j < count; ++j) {
        const double frac = (count == 1) ? 0.0 : static_cast<double>(j) / (count - 1);
        const double x = iv.lo + frac * iv.width();
        const SnappedPoint sp = snap_scaled(env, n, x, t);
        if (gs.empty() || gs.back() != sp.g) {
            gs.push_back(sp.g);
            xs.push_back(sp.x_used);
        }
    }
    if (xs.empty()) throw ParameterError("interval discretizes to no grid points");
    return xs;
}

namespace {
// Lexicographic scan over nondecreasing (u-tuple, v-tuple) pairs; the visitor
// sees (indices, slack, mk) for each feasible pair and returns true to stop.
template <typename Visitor>
void scan_disjoint_tuples(const Environment& env, const CompatibleTriple& triple,
                          const Interval& I, const Interval& J, int k,
                          const MaxDisjointOptions& opt, Visitor&& visit) {
    triple.validate();
    if (k < 1) throw ParameterError("k must be at least 1");

    const std::vector<double> us = discretize_interval(env, triple.n, triple.t1, I,
                                                       opt.endpoint_grid);
    const std::vector<double> vs = discretize_interval(env, triple.n, triple.t2, J,
                                                       opt.endpoint_grid);
    const int li = triple.line1();
    const int lj = triple.line2();

    std::vector<int> ug(us.size()), vg(vs.size());
    for (size_t i = 0; i < us.size(); ++i)
        ug[i] = snap_scaled(env, triple.n, us[i], triple.t1).g;
    for (size_t i = 0; i < vs.size(); ++i)
        vg[i] = snap_scaled(env, triple.n, vs[i], triple.t2).g;

    // Single-path energies for every endpoint pair, one sweep per start.
    std::vector<std::vector<double>> m1(us.size(), std::vector<double>(vs.size()));
    for (size_t i = 0; i < us.size(); ++i) {
        const std::vector<double> profile =
            last_passage_profile(env, {ug[i], li}, lj, opt.dp);
        for (size_t j = 0; j < vs.size(); ++j)
            m1[i][j] = profile[static_cast<size_t>(vg[j])];
    }

    std::vector<int> ui(static_cast<size_t>(k), 0);
    do {
        std::vector<int> starts(static_cast<size_t>(k));
        for (int p = 0; p < k; ++p)
            starts[static_cast<size_t>(p)] = ug[static_cast<size_t>(ui[static_cast<size_t>(p)])];
        const MultiEndTable table(env, starts, li, lj, opt.dp);

        std::vector<int> vi(static_cast<size_t>(k), 0);
        std::vector<int> ends(static_cast<size_t>(k));
        do {
            double sum_m1 = 0.0;
            bool feasible = true;
            for (int p = 0; p < k; ++p) {
                const double e = m1[static_cast<size_t>(ui[static_cast<size_t>(p)])]
                                   [static_cast<size_t>(vi[static_cast<size_t>(p)])];
                if (e == kNegInf) feasible = false;
                sum_m1 += e;
                ends[static_cast<size_t>(p)] = vg[static_cast<size_t>(vi[static_cast<size_t>(p)])];
            }
            if (!feasible) continue;
            const double mk = table.energy(ends);
            if (mk == kNegInf) continue;
            std::vector<double> u_coords, v_coords;
            u_coords.reserve(static_cast<size_t>(k));
            v_coords.reserve(static_cast<size_t>(k));
            for (int p = 0; p < k; ++p) {
                u_coords.push_back(us[static_cast<size_t>(ui[static_cast<size_t>(p)])]);
                v_coords.push_back(vs[static_cast<size_t>(vi[static_cast<size_t>(p)])]);
            }
            if (visit(u_coords, v_coords, mk - sum_m1, mk)) return;
        } while (next_tuple(vi, static_cast<int>(vs.size())));
    } while (next_tuple(ui, static_cast<int>(us.size())));
}
} // namespace

std::optional<DisjointCertificate> disjoint_certificate(
    const Environment& env, const CompatibleTriple& triple, const Interval& I,
    const Interval& J, int k, const MaxDisjointOptions& opt) {
    std::optional<DisjointCertificate> found;
    scan_disjoint_tuples(
        env, triple, I, J, k, opt,
        [&](const std::vector<double>& uc, const std::vector<double>& vc, double slack,
            double mk) {
            const double tol = opt.tol_scale * 1e-9 * (1.0 + std::abs(mk));
            if (slack >= -tol) {
                found = DisjointCertificate{uc, vc, slack};
                return true;
            }
            return false;
        });
    return found;
}

std::vector<bool> disjoint_event_at_scales(const Environment& env,
                                           const CompatibleTriple& triple,
                                           const Interval& I, const Interval& J, int k,
                                           const MaxDisjointOptions& opt,
                                           const std::vector<double>& scales) {
    if (scales.empty()) throw ParameterError("tolerance scale list must be nonempty");
    std::vector<bool> hit(scales.size(), false);
    scan_disjoint_tuples(
        env, triple, I, J, k, opt,
        [&](const std::vector<double>&, const std::vector<double>&, double slack,
            double mk) {
            const double unit = 1e-9 * (1.0 + std::abs(mk));
            bool all = true;
            for (size_t s = 0; s < scales.size(); ++s) {
                if (slack >= -scales[s] * unit) hit[s] = true;
                if (!hit[s]) all = false;
            }
            return all;
        });
    return hit;
}

int max_disjoint(const Environment& env, const CompatibleTriple& triple,
                 const Interval& I, const Interval& J, const MaxDisjointOptions& opt) {
    if (opt.k_max < 1) throw ParameterError("k_max must be at least 1");
    int best = 1;
    for (int k = 2; k <= opt.k_max; ++k) {
        if (!disjoint_certificate(env, triple, I, J, k, opt)) break;
        best = k;
    }
    return best;
}

bool near_poly(const Environment& env, const CompatibleTriple& triple, int k, double x,
               double y, double eta, const DpOptions& opt) {
    if (k < 1) throw ParameterError("k must be at least 1");
    if (eta < 0) throw ParameterError("eta must be nonnegative");
    const std::vector<double> xs(static_cast<size_t>(k), x);
    const std::vector<double> ys(static_cast<size_t>(k), y);
    const double wk = multi_polymer_weight(env, triple, xs, ys, opt);
    const double w1 = polymer_weight(env, triple, x, y, nullptr, opt);
    return wk >= k * w1 - std::cbrt(triple.t12()) * eta;
}

namespace {
// Deviation of the polymer at lifetime fraction a from the interpolating
// segment, in the (a ^ (1-a))^{2/3} t12^{2/3} units of the deviation events.
// Worst case over the leftmost and rightmost maximizers; ties toward the
// candidate of larger signed value.
double normalized_deviation(const Environment& env, const CompatibleTriple& triple,
                            double x, double y, double a, const DpOptions& opt) {
    triple.validate();
    if (!(a > 0.0 && a < 1.0)) throw ParameterError("a must lie in (0,1)");
    require_mesh(triple.n, a * triple.t12() * triple.n, "a*t12*n");
    const double t = (1.0 - a) * triple.t1 + a * triple.t2;

    const SnappedPoint sx = snap_scaled(env, triple.n, x, triple.t1);
    const SnappedPoint sy = snap_scaled(env, triple.n, y, triple.t2);
    const double ell_t = interpolant(sx.x_used, triple.t1, sy.x_used, triple.t2, t);

    double worst = 0.0;
    bool first = true;
    for (TieRule tie : {TieRule::leftmost, TieRule::rightmost}) {
        const Staircase s = geodesic(env, {sx.g, sx.line}, {sy.g, sy.line}, tie, opt);
        const double rho_t = staircase_at_time(env, triple, s, t, ell_t);
        const double dev = rho_t - ell_t;
        if (first || std::abs(dev) > std::abs(worst) ||
            (std::abs(dev) == std::abs(worst) && dev > worst)) {
            worst = dev;
            first = false;
        }
    }
    const double unit = std::cbrt(triple.t12()) * std::cbrt(triple.t12()) *
                        std::cbrt(std::min(a, 1.0 - a)) * std::cbrt(std::min(a, 1.0 - a));
    return worst / unit;
}
} // namespace

bool poly_dev_reg(const Environment& env, const CompatibleTriple& triple, double x,
                  double y, double a, double r, const DpOptions& opt) {
    if (r < 0) throw ParameterError("r must be nonnegative");
    return std::abs(normalized_deviation(env, triple, x, y, a, opt)) <= r;
}

bool poly_dev_reg(const Environment& env, const CompatibleTriple& triple,
                  const Interval& I, const Interval& J, double a, double r,
                  const DpOptions& opt) {
    I.validate();
    J.validate();
    if (r < 0) throw ParameterError("r must be nonnegative");
    // Extreme corner polymers stand in for the union over the rectangle.
    const bool left = std::abs(normalized_deviation(env, triple, I.lo, J.lo, a, opt)) <= r;
    const bool right = std::abs(normalized_deviation(env, triple, I.hi, J.hi, a, opt)) <= r;
    return left && right;
}

bool poly_wgt_reg(const Environment& env, const CompatibleTriple& triple,
                  const Interval& I, const Interval& J, double r, int endpoint_grid,
                  const DpOptions& opt) {
    triple.validate();
    if (r < 0) throw ParameterError("r must be nonnegative");
    const std::vector<double> us =
        discretize_interval(env, triple.n, triple.t1, I, endpoint_grid);
    const std::vector<double> vs =
        discretize_interval(env, triple.n, triple.t2, J, endpoint_grid);
    const double t12 = triple.t12();
    const double t13 = std::cbrt(t12);
    const double t43 = t12 * t13;
    const int li = triple.line1();
    const int lj = triple.line2();
    const double n13 = one_third_power(triple.n);
    const double n23 = two_thirds_power(triple.n);

    // Endpoint pairs with an empty zigzag set carry no weight and cannot
    // violate the bound; at small n*t12 the rectangle's corners may be such.
    size_t evaluated = 0;
    for (const double u : us) {
        const SnappedPoint su = snap_scaled(env, triple.n, u, triple.t1);
        const std::vector<double> profile = last_passage_profile(env, {su.g, li}, lj, opt);
        for (const double v : vs) {
            const SnappedPoint sv = snap_scaled(env, triple.n, v, triple.t2);
            const double m1 = profile[static_cast<size_t>(sv.g)];
            if (m1 == kNegInf) continue;
            ++evaluated;
            const double wgt = kInvSqrt2 / n13 *
                               (m1 - 2.0 * triple.steps() -
                                2.0 * n23 * (sv.x_used - su.x_used));
            const double d = sv.x_used - su.x_used;
            if (std::abs(wgt / t13 + kInvSqrt2 * d * d / t43) > r) return false;
        }
    }
    if (evaluated == 0) throw InfeasibleError("weight rectangle entirely infeasible");
    return true;
}

double loc_wgt_sup(const Environment& env, const CompatibleTriple& triple,
                   const Interval& I, const Interval& J, int endpoint_grid,
                   const DpOptions& opt) {
    triple.validate();
    if (std::abs(triple.t1) > 1e-12 || std::abs(triple.t2 - 1.0) > 1e-12)
        throw ParameterError("local weight regularity is defined over lifetime [0,1]");
    if (std::abs(I.width() - J.width()) > 1e-9 * std::max(1.0, I.width()))
        throw ParameterError("intervals must share their length");

    const std::vector<double> us = discretize_interval(env, triple.n, 0.0, I, endpoint_grid);
    const std::vector<double> vs = discretize_interval(env, triple.n, 1.0, J, endpoint_grid);
    const int li = triple.line1();
    const int lj = triple.line2();
    const double n13 = one_third_power(triple.n);
    const double n23 = two_thirds_power(triple.n);

    double wmax = -std::numeric_limits<double>::infinity();
    double wmin = std::numeric_limits<double>::infinity();
    size_t evaluated = 0;
    for (const double u : us) {
        const SnappedPoint su = snap_scaled(env, triple.n, u, 0.0);
        const std::vector<double> profile = last_passage_profile(env, {su.g, li}, lj, opt);
        for (const double v : vs) {
            const SnappedPoint sv = snap_scaled(env, triple.n, v, 1.0);
            const double m1 = profile[static_cast<size_t>(sv.g)];
            if (m1 == kNegInf) continue; // pair admits no zigzag
            ++evaluated;
            const double wgt = kInvSqrt2 / n13 *
                               (m1 - 2.0 * triple.steps() -
                                2.0 * n23 * (sv.x_used - su.x_used));
            wmax = std::max(wmax, wgt);
            wmin = std::min(wmin, wgt);
        }
    }
    if (evaluated == 0) throw InfeasibleError("weight rectangle entirely infeasible");
    return wmax - wmin;
}

bool loc_wgt_reg(const Environment& env, const CompatibleTriple& triple,
                 const Interval& I, const Interval& J, double r, int endpoint_grid,
                 const DpOptions& opt) {
    if (r < 0) throw ParameterError("r must be nonnegative");
    const double eps = I.width();
    if (!(eps > 0)) throw ParameterError("local weight regularity needs |I| > 0");
    return loc_wgt_sup(env, triple, I, J, endpoint_grid, opt) <= r * std::sqrt(eps);
}

bool bouquet_reg(const Environment& env, const CompatibleTriple& triple,
                 BouquetDirection direction, double anchor,
                 const std::vector<double>& tuple, double r, const DpOptions& opt) {
    triple.validate();
    if (r < 0) throw ParameterError("r must be nonnegative");
    if (tuple.empty()) throw ParameterError("bouquet tuple must be nonempty");

    const double lifetime = triple.t12() - 1.0 / triple.n;
    if (!(lifetime > 0)) throw InfeasibleError("proper weight needs n*t12 >= 2");
    const double l13 = std::cbrt(lifetime);
    const double l43 = lifetime * l13;
    const double shift = 0.5 / two_thirds_power(triple.n);

    double prop = 0.0;
    double parab = 0.0;
    if (direction == BouquetDirection::forward) {
        prop = proper_multi_weight_forward(env, triple, anchor, tuple, opt);
        for (const double u : tuple) {
            const double d = u + shift - anchor;
            parab += kInvSqrt2 * d * d / l43;
        }
    } else {
        prop = proper_multi_weight_backward(env, triple, tuple, anchor, opt);
        for (const double v : tuple) {
            const double d = v - shift - anchor;
            parab += kInvSqrt2 * d * d / l43;
        }
    }
    return std::abs(prop / l13 + parab) <= r;
}

FavSurConResult fav_sur_con(const Environment& env, int n, int k, double x, double y,
                            double eps, double r, int endpoint_grid,
                            const DpOptions& opt) {
    if (n < 1 || k < 1) throw ParameterError("n and k must be at least 1");
    if (!(eps > 0) || !(r > 0)) throw ParameterError("eps and r must be positive");
    const double eps32 = std::pow(eps, 1.5);
    require_mesh(n, n * eps32, "n*eps^{3/2}");

    const CompatibleTriple unit{n, 0.0, 1.0};
    const CompatibleTriple lower{n, -eps32, 0.0};
    const CompatibleTriple upper{n, 1.0, 1.0 + eps32};
    const CompatibleTriple full{n, -eps32, 1.0 + eps32};

    const Interval I{x - eps, x + eps};
    const Interval J{y - eps, y + eps};
    const Interval Iplus{x - (r + 1) * eps, x + (r + 1) * eps};
    const Interval Jplus{y - (r + 1) * eps, y + (r + 1) * eps};

    MaxDisjointOptions mopt;
    mopt.k_max = k;
    mopt.endpoint_grid = endpoint_grid;
    mopt.dp = opt;

    FavSurConResult res;
    std::vector<double> U(static_cast<size_t>(k));
    std::vector<double> V(static_cast<size_t>(k));
    if (auto cert = disjoint_certificate(env, unit, I, J, k, mopt)) {
        res.certificate_found = true;
        U = cert->us;
        V = cert->vs;
    } else {
        // No certified tuple: fall back to the lexicographically minimal
        // feasible one, the common left endpoints.
        const std::vector<double> us = discretize_interval(env, n, 0.0, I, endpoint_grid);
        const std::vector<double> vs = discretize_interval(env, n, 1.0, J, endpoint_grid);
        std::fill(U.begin(), U.end(), us.front());
        std::fill(V.begin(), V.end(), vs.front());
    }

    res.loc_wgt = loc_wgt_reg(env, unit, Iplus, Jplus, r, endpoint_grid, opt);
    const double a0 = eps32 / full.t12();
    res.dev_reg = poly_dev_reg(env, full, x, y, a0, r, opt) &&
                  poly_dev_reg(env, full, x, y, 1.0 - a0, r, opt);
    res.forward_bouquet = bouquet_reg(env, lower, BouquetDirection::forward, x, U, r, opt);
    res.backward_bouquet = bouquet_reg(env, upper, BouquetDirection::backward, y, V, r, opt);
    res.wgt_reg_start = poly_wgt_reg(env, lower, Interval{x, x}, Iplus, r * r,
                                     endpoint_grid, opt);
    res.wgt_reg_end = poly_wgt_reg(env, upper, Jplus, Interval{y, y}, r * r,
                                   endpoint_grid, opt);
    res.value = res.loc_wgt && res.dev_reg && res.forward_bouquet &&
                res.backward_bouquet && res.wgt_reg_start && res.wgt_reg_end;
    return res;
}

double fluc_statistic(const Environment& env, const CompatibleTriple& triple, double x,
                      double y, double a, const DpOptions& opt) {
    return normalized_deviation(env, triple, x, y, a, opt);
}

bool fluc(const Environment& env, const CompatibleTriple& triple, double x, double y,
          double a, const std::vector<Interval>& K, const DpOptions& opt) {
    const double X = fluc_statistic(env, triple, x, y, a, opt);
    for (const Interval& iv : K)
        if (X >= iv.lo && X <= iv.hi) return true;
    return false;
}

} // namespace blpp
