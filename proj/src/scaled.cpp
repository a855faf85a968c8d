#include "blpp/scaled.hpp"

#include <cmath>

namespace blpp {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

int integral_or_throw(double v, const char* what) {
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9 * std::max(1.0, std::abs(v)))
        throw ParameterError(std::string(what) + " must lie on the 1/n mesh");
    return static_cast<int>(r);
}
} // namespace

void CompatibleTriple::validate() const {
    if (n < 1) throw ParameterError("n must be at least 1");
    if (!(t1 < t2)) throw ParameterError("t1 must be below t2");
    (void)line1();
    (void)line2();
}

int CompatibleTriple::line1() const { return integral_or_throw(n * t1, "n*t1"); }
int CompatibleTriple::line2() const { return integral_or_throw(n * t2, "n*t2"); }

int scaled_time_to_line(int n, double t) {
    return integral_or_throw(n * t, "n*t");
}

double two_thirds_power(int n) {
    const double c = std::cbrt(static_cast<double>(n));
    return c * c;
}

double one_third_power(int n) { return std::cbrt(static_cast<double>(n)); }

ScaledPoint scale_point(int n, UnscaledPoint v) {
    if (n < 1) throw ParameterError("n must be at least 1");
    return {0.5 * (v.v1 - v.v2) / two_thirds_power(n), v.v2 / n};
}

UnscaledPoint unscale_point(int n, ScaledPoint p) {
    if (n < 1) throw ParameterError("n must be at least 1");
    const double v2 = p.t * n;
    return {v2 + 2.0 * two_thirds_power(n) * p.x, v2};
}

SnappedPoint snap_scaled(const Environment& env, int n, double x, double t) {
    const int line = scaled_time_to_line(n, t);
    if (line < env.line_min() || line > env.line_max())
        throw ParameterError("scaled time maps outside the environment's lines");
    const UnscaledPoint u = unscale_point(n, {x, t});
    const GridSpec& grid = env.grid();
    // Nearest grid index, exact halves rounding down.
    const double raw = (u.v1 - grid.x0) / grid.delta;
    int g = static_cast<int>(std::ceil(raw - 0.5));
    if (g < 0 || g > grid.num_cells)
        throw ParameterError("scaled coordinate maps outside the grid window");
    const double x_used = (grid.position(g) - static_cast<double>(line)) /
                          (2.0 * two_thirds_power(n));
    return {g, line, x_used};
}

double zigzag_weight(const Environment& env, int n, const Staircase& s) {
    const double energy = staircase_energy(env, s);
    const int lines = s.lines();
    const double dv1 = env.grid().position(s.end.g) - env.grid().position(s.start.g);
    // E - 2(j-i) - 2 n^{2/3} (y - x) with 2 n^{2/3}(y-x) = dv1 - (j-i).
    return kInvSqrt2 / one_third_power(n) * (energy - lines - dv1);
}

ScaledPoint Zigzag::start(const Environment& env) const {
    return scale_point(triple.n,
                       {env.grid().position(staircase.start.g),
                        static_cast<double>(staircase.start.line)});
}

ScaledPoint Zigzag::end(const Environment& env) const {
    return scale_point(triple.n, {env.grid().position(staircase.end.g),
                                  static_cast<double>(staircase.end.line)});
}

Zigzag make_zigzag(const Environment& env, const CompatibleTriple& triple,
                   const Staircase& s) {
    triple.validate();
    if (s.start.line != triple.line1() || s.end.line != triple.line2())
        throw ParameterError("staircase line range disagrees with the triple");
    return {triple, s, zigzag_weight(env, triple.n, s)};
}

namespace {
void require_feasible_pair(const CompatibleTriple& triple, double x, double y) {
    if (y < x - 0.5 * one_third_power(triple.n) * triple.t12())
        throw InfeasibleError("scaled end point lies southwesterly of the start");
}
} // namespace

double polymer_weight(const Environment& env, const CompatibleTriple& triple,
                      double x, double y, SnapReport* snap, const DpOptions& opt) {
    triple.validate();
    require_feasible_pair(triple, x, y);
    const SnappedPoint a = snap_scaled(env, triple.n, x, triple.t1);
    const SnappedPoint b = snap_scaled(env, triple.n, y, triple.t2);
    if (snap) *snap = {a.x_used, b.x_used};
    if (b.g < a.g) throw InfeasibleError("snapped end point left of snapped start");
    const double m1 = last_passage(env, {a.g, a.line}, {b.g, b.line}, opt);
    const double centering = 2.0 * triple.steps() +
                             2.0 * two_thirds_power(triple.n) * (b.x_used - a.x_used);
    return kInvSqrt2 / one_third_power(triple.n) * (m1 - centering);
}

double multi_polymer_weight(const Environment& env, const CompatibleTriple& triple,
                            const std::vector<double>& xs, const std::vector<double>& ys,
                            const DpOptions& opt) {
    triple.validate();
    if (xs.empty() || xs.size() != ys.size())
        throw ParameterError("endpoint tuples must be nonempty and equally sized");
    const int k = static_cast<int>(xs.size());
    std::vector<int> gx(xs.size()), gy(ys.size());
    double sum_displacement = 0.0;
    for (int p = 0; p < k; ++p) {
        require_feasible_pair(triple, xs[p], ys[p]);
        const SnappedPoint a = snap_scaled(env, triple.n, xs[p], triple.t1);
        const SnappedPoint b = snap_scaled(env, triple.n, ys[p], triple.t2);
        gx[p] = a.g;
        gy[p] = b.g;
        sum_displacement += b.x_used - a.x_used;
    }
    const double mk = multi_last_passage(env, gx, triple.line1(), gy, triple.line2(), opt);
    const double centering = 2.0 * k * triple.steps() +
                             2.0 * two_thirds_power(triple.n) * sum_displacement;
    return kInvSqrt2 / one_third_power(triple.n) * (mk - centering);
}

double proper_multi_weight_forward(const Environment& env, const CompatibleTriple& triple,
                                   double x, const std::vector<double>& us,
                                   const DpOptions& opt) {
    triple.validate();
    if (triple.steps() < 2)
        throw InfeasibleError("proper weight needs n*t12 >= 2");
    CompatibleTriple inner{triple.n, triple.t1, triple.t2 - 1.0 / triple.n};
    const double shift = 0.5 / two_thirds_power(triple.n);
    std::vector<double> xs(us.size(), x);
    std::vector<double> shifted(us);
    for (double& u : shifted) u += shift;
    return multi_polymer_weight(env, inner, xs, shifted, opt);
}

double proper_multi_weight_backward(const Environment& env, const CompatibleTriple& triple,
                                    const std::vector<double>& vs, double y,
                                    const DpOptions& opt) {
    triple.validate();
    if (triple.steps() < 2)
        throw InfeasibleError("proper weight needs n*t12 >= 2");
    CompatibleTriple inner{triple.n, triple.t1 + 1.0 / triple.n, triple.t2};
    const double shift = 0.5 / two_thirds_power(triple.n);
    std::vector<double> shifted(vs);
    for (double& v : shifted) v -= shift;
    std::vector<double> ys(vs.size(), y);
    return multi_polymer_weight(env, inner, shifted, ys, opt);
}

double interpolant(double x, double t1, double y, double t2, double t) {
    if (t < std::min(t1, t2) || t > std::max(t1, t2))
        throw ParameterError("interpolation time outside the lifetime");
    return ((t2 - t) * x + (t - t1) * y) / (t2 - t1);
}

double staircase_at_time(const Environment& env, const CompatibleTriple& triple,
                         const Staircase& s, double t, double ell_t) {
    const int line = scaled_time_to_line(triple.n, t);
    if (line < s.start.line || line > s.end.line)
        throw ParameterError("time outside the staircase lifetime");
    const double n23 = 2.0 * two_thirds_power(triple.n);
    const double left = (env.grid().position(s.entry(line)) - line) / n23;
    const double right = (env.grid().position(s.exit(line)) - line) / n23;
    const double dl = std::abs(left - ell_t);
    const double dr = std::abs(right - ell_t);
    if (dr > dl) return right;
    if (dl > dr) return left;
    return std::max(left, right); // exact tie: rightmost
}

double polymer_at_time(const Environment& env, const CompatibleTriple& triple,
                       double x, double y, double t, TieRule tie, const DpOptions& opt) {
    triple.validate();
    if (t < triple.t1 || t > triple.t2)
        throw ParameterError("time outside the polymer lifetime");
    require_feasible_pair(triple, x, y);
    const SnappedPoint a = snap_scaled(env, triple.n, x, triple.t1);
    const SnappedPoint b = snap_scaled(env, triple.n, y, triple.t2);
    // At the endpoints the function value is the endpoint itself; the
    // farthest-point convention only disambiguates interior times.
    if (t == triple.t1) return a.x_used;
    if (t == triple.t2) return b.x_used;
    const Staircase s = geodesic(env, {a.g, a.line}, {b.g, b.line}, tie, opt);
    const double ell_t = interpolant(a.x_used, triple.t1, b.x_used, triple.t2, t);
    return staircase_at_time(env, triple, s, t, ell_t);
}

std::pair<Zigzag, Zigzag> split_polymer(const Environment& env,
                                        const CompatibleTriple& triple, double x,
                                        double y, double t, TieRule tie,
                                        const DpOptions& opt) {
    triple.validate();
    if (!(t > triple.t1 && t < triple.t2))
        throw ParameterError("split time must be interior to the lifetime");
    const int line = scaled_time_to_line(triple.n, t);
    require_feasible_pair(triple, x, y);
    const SnappedPoint a = snap_scaled(env, triple.n, x, triple.t1);
    const SnappedPoint b = snap_scaled(env, triple.n, y, triple.t2);
    const Staircase s = geodesic(env, {a.g, a.line}, {b.g, b.line}, tie, opt);

    const double ell_t = interpolant(a.x_used, triple.t1, b.x_used, triple.t2, t);
    const double rho_t = staircase_at_time(env, triple, s, t, ell_t);
    // Recover the grid index of the chosen point on line `line`.
    const double n23 = 2.0 * two_thirds_power(triple.n);
    const double pos = rho_t * n23 + line;
    const int gz = static_cast<int>(std::llround((pos - env.grid().x0) / env.grid().delta));

    Staircase first;
    first.start = s.start;
    first.end = {gz, line};
    first.jumps.assign(s.jumps.begin(), s.jumps.begin() + (line - s.start.line));

    Staircase second;
    second.start = {gz, line};
    second.end = s.end;
    second.jumps.assign(s.jumps.begin() + (line - s.start.line), s.jumps.end());

    CompatibleTriple lower{triple.n, triple.t1, t};
    CompatibleTriple upper{triple.n, t, triple.t2};
    return {make_zigzag(env, lower, first), make_zigzag(env, upper, second)};
}

Zigzag concatenate(const Environment& env, const Zigzag& z1, const Zigzag& z2) {
    if (z1.triple.n != z2.triple.n)
        throw ParameterError("concatenation requires a shared scaling parameter");
    if (z1.staircase.end.line != z2.staircase.start.line ||
        z1.staircase.end.g != z2.staircase.start.g)
        throw ParameterError("end of the first zigzag must equal start of the second");

    Staircase merged;
    merged.start = z1.staircase.start;
    merged.end = z2.staircase.end;
    merged.jumps = z1.staircase.jumps;
    merged.jumps.insert(merged.jumps.end(), z2.staircase.jumps.begin(),
                        z2.staircase.jumps.end());
    CompatibleTriple triple{z1.triple.n, z1.triple.t1, z2.triple.t2};
    return make_zigzag(env, triple, merged);
}

} // namespace blpp
