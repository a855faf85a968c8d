#include "blpp/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "json.hpp"

namespace blpp {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
} // namespace

double LineEnsemble::value(int curve, size_t sample) const {
    if (curve < 1 || curve > curve_count)
        throw ParameterError("curve index out of range");
    if (sample >= domain.size())
        throw ParameterError("sample index out of range");
    return values[static_cast<size_t>(curve - 1) * domain.size() + sample];
}

double parabola_q(double z) { return kInvSqrt2 * z * z; }

namespace {

// Shared construction: watermelon weights from one root to every sample for
// k = 1..k_max, then successive differences.
LineEnsemble build_forward(const Environment& env, const CompatibleTriple& triple,
                           double x, int k_max, const std::vector<double>& y_samples,
                           const DpOptions& opt) {
    triple.validate();
    if (k_max < 1 || k_max > triple.steps() + 1)
        throw ParameterError("curve count must lie in [1, n*t12 + 1]");
    if (y_samples.empty()) throw ParameterError("ensemble needs at least one sample");

    const int li = triple.line1();
    const int lj = triple.line2();
    const SnappedPoint root = snap_scaled(env, triple.n, x, triple.t1);

    LineEnsemble ens;
    ens.kind = EnsembleKind::forward;
    ens.triple = triple;
    ens.root = {root.x_used, triple.t1};
    ens.curve_count = k_max;
    ens.domain.reserve(y_samples.size());

    std::vector<int> ends(y_samples.size());
    const double feas = root.x_used - 0.5 * one_third_power(triple.n) * triple.t12();
    for (size_t s = 0; s < y_samples.size(); ++s) {
        if (y_samples[s] < feas)
            throw InfeasibleError("ensemble sample outside the feasible range");
        const SnappedPoint sp = snap_scaled(env, triple.n, y_samples[s], triple.t2);
        ends[s] = sp.g;
        ens.domain.push_back(sp.x_used);
    }

    // Wgt_k at every sample, then curves as differences.
    std::vector<std::vector<double>> wgt(static_cast<size_t>(k_max));
    const double n13 = one_third_power(triple.n);
    const double n23 = two_thirds_power(triple.n);
    for (int k = 1; k <= k_max; ++k) {
        std::vector<double>& row = wgt[static_cast<size_t>(k - 1)];
        row.resize(y_samples.size());
        const std::vector<int> starts(static_cast<size_t>(k), root.g);
        if (k == 1) {
            const std::vector<double> profile =
                last_passage_profile(env, {root.g, li}, lj, opt);
            for (size_t s = 0; s < ends.size(); ++s) {
                const double m1 = profile[static_cast<size_t>(ends[s])];
                if (m1 == kNegInf)
                    throw InfeasibleError("ensemble sample unreachable");
                const double centering =
                    2.0 * triple.steps() + 2.0 * n23 * (ens.domain[s] - root.x_used);
                row[s] = kInvSqrt2 / n13 * (m1 - centering);
            }
        } else {
            const MultiEndTable table(env, starts, li, lj, opt);
            std::vector<int> tuple(static_cast<size_t>(k));
            for (size_t s = 0; s < ends.size(); ++s) {
                std::fill(tuple.begin(), tuple.end(), ends[s]);
                const double mk = table.energy(tuple);
                if (mk == kNegInf)
                    throw InfeasibleError("ensemble sample unreachable for this curve count");
                const double centering = 2.0 * k * triple.steps() +
                                         2.0 * n23 * k * (ens.domain[s] - root.x_used);
                row[s] = kInvSqrt2 / n13 * (mk - centering);
            }
        }
    }

    ens.values.resize(static_cast<size_t>(k_max) * y_samples.size());
    for (int k = 1; k <= k_max; ++k)
        for (size_t s = 0; s < y_samples.size(); ++s) {
            const double prev = (k == 1) ? 0.0 : wgt[static_cast<size_t>(k - 2)][s];
            ens.values[static_cast<size_t>(k - 1) * y_samples.size() + s] =
                wgt[static_cast<size_t>(k - 1)][s] - prev;
        }
    return ens;
}

} // namespace

LineEnsemble forward_ensemble(const Environment& env, const CompatibleTriple& triple,
                              double x, int k_max, const std::vector<double>& y_samples,
                              const DpOptions& opt) {
    return build_forward(env, triple, x, k_max, y_samples, opt);
}

LineEnsemble backward_ensemble(const Environment& env, const CompatibleTriple& triple,
                               double y, int k_max, const std::vector<double>& x_samples,
                               const DpOptions& opt) {
    // The energy-preserving half turn swaps the roles of the two roots:
    // the backward ensemble rooted at (y, t2) is the forward ensemble of the
    // rotated environment rooted at (-y, -t2), read at negated samples.
    triple.validate();
    const Environment rot = env.rotated();
    const CompatibleTriple rt{triple.n, -triple.t2, -triple.t1};
    std::vector<double> neg(x_samples.size());
    for (size_t i = 0; i < x_samples.size(); ++i)
        neg[i] = -x_samples[x_samples.size() - 1 - i];
    LineEnsemble fwd = forward_ensemble(rot, rt, -y, k_max, neg, opt);

    LineEnsemble ens;
    ens.kind = EnsembleKind::backward;
    ens.triple = triple;
    ens.root = {-fwd.root.x, triple.t2};
    ens.curve_count = k_max;
    ens.domain.resize(fwd.domain.size());
    ens.values.resize(fwd.values.size());
    const size_t m = fwd.domain.size();
    for (size_t i = 0; i < m; ++i)
        ens.domain[i] = -fwd.domain[m - 1 - i];
    for (int k = 1; k <= k_max; ++k)
        for (size_t i = 0; i < m; ++i)
            ens.values[static_cast<size_t>(k - 1) * m + i] =
                fwd.values[static_cast<size_t>(k - 1) * m + (m - 1 - i)];
    return ens;
}

LineEnsemble normalize_ensemble(const LineEnsemble& ensemble) {
    if (ensemble.kind != EnsembleKind::forward && ensemble.kind != EnsembleKind::backward)
        throw ParameterError("ensemble is already normalized");
    const double t12 = ensemble.triple.t12();
    const double stretch = std::cbrt(t12);

    LineEnsemble out;
    out.kind = ensemble.kind == EnsembleKind::forward ? EnsembleKind::normalized_forward
                                                      : EnsembleKind::normalized_backward;
    out.triple = ensemble.triple;
    out.root = ensemble.root;
    out.curve_count = ensemble.curve_count;
    out.domain.resize(ensemble.domain.size());
    const double squeeze = std::cbrt(t12) * std::cbrt(t12);
    for (size_t s = 0; s < ensemble.domain.size(); ++s)
        out.domain[s] = (ensemble.domain[s] - ensemble.root.x) / squeeze;
    out.values.resize(ensemble.values.size());
    for (size_t i = 0; i < ensemble.values.size(); ++i)
        out.values[i] = ensemble.values[i] / stretch;
    return out;
}

void write_ensemble_csv(std::ostream& out, const LineEnsemble& ensemble) {
    out << "# blpp-ensemble v1\n";
    out << "curve_index,z,value\n";
    out.precision(17);
    for (int k = 1; k <= ensemble.curve_count; ++k)
        for (size_t s = 0; s < ensemble.domain.size(); ++s)
            out << k << ',' << ensemble.domain[s] << ','
                << ensemble.value(k, s) << '\n';
}

namespace {
size_t nearest_sample(const std::vector<double>& domain, double z) {
    size_t best = 0;
    double dist = std::abs(domain[0] - z);
    for (size_t s = 1; s < domain.size(); ++s) {
        const double d = std::abs(domain[s] - z);
        if (d < dist) {
            dist = d;
            best = s;
        }
    }
    return best;
}
} // namespace

RegularityReport regularity_report(const std::vector<LineEnsemble>& normalized,
                                   double c_audit, double C_audit,
                                   const std::vector<double>& z_window,
                                   const std::vector<double>& s_grid) {
    if (normalized.size() < 30)
        throw StatisticsError("regularity audit needs at least 30 samples");
    if (z_window.empty() || s_grid.empty())
        throw ParameterError("audit needs nonempty z and s grids");
    for (const auto& ens : normalized)
        if (ens.kind != EnsembleKind::normalized_forward &&
            ens.kind != EnsembleKind::normalized_backward)
            throw ParameterError("audit expects normalized ensembles");

    const size_t count = normalized.size();
    RegularityReport rep;
    rep.c_audit = c_audit;
    rep.C_audit = C_audit;
    rep.sample_count = count;

    const auto& domain = normalized.front().domain;
    const int curves = normalized.front().curve_count;

    for (double z : z_window) {
        const size_t sz = nearest_sample(domain, z);
        const double q = parabola_q(domain[sz]);
        for (double s : s_grid) {
            TailCell cell;
            cell.z = domain[sz];
            cell.s = s;
            cell.bound = C_audit * std::exp(-c_audit * std::pow(s, 1.5));
            size_t lo = 0, hi = 0;
            for (const auto& ens : normalized) {
                const double v = ens.value(1, sz) + q;
                if (v <= -s) ++lo;
                if (v >= s) ++hi;
            }
            cell.lower_freq = static_cast<double>(lo) / count;
            cell.upper_freq = static_cast<double>(hi) / count;
            rep.one_point.push_back(cell);

            // Pointwise lower bound for curves of index >= 2.
            for (int k = 2; k <= curves; ++k) {
                CurveTailCell cc;
                cc.curve = k;
                cc.z = domain[sz];
                cc.s = s;
                size_t n = 0;
                for (const auto& ens : normalized)
                    if (ens.value(k, sz) + q <= -s) ++n;
                cc.freq = static_cast<double>(n) / count;
                rep.lower_curves.push_back(cc);
            }
        }
    }

    // Interval infimum / supremum over the z window.
    std::vector<size_t> window_samples;
    for (double z : z_window) window_samples.push_back(nearest_sample(domain, z));
    std::sort(window_samples.begin(), window_samples.end());
    window_samples.erase(std::unique(window_samples.begin(), window_samples.end()),
                         window_samples.end());
    for (double s : s_grid) {
        TailCell cell;
        cell.z = 0.0;
        cell.s = s;
        cell.bound = C_audit * std::exp(-c_audit * std::pow(s, 1.5));
        size_t lo = 0, hi = 0;
        for (const auto& ens : normalized) {
            double inf = std::numeric_limits<double>::infinity();
            double sup = -inf;
            for (size_t sz : window_samples) {
                const double v = ens.value(1, sz) + parabola_q(domain[sz]);
                inf = std::min(inf, v);
                sup = std::max(sup, v);
            }
            if (inf <= -s) ++lo;
            if (sup >= s) ++hi;
        }
        cell.lower_freq = static_cast<double>(lo) / count;
        cell.upper_freq = static_cast<double>(hi) / count;
        rep.interval_extrema.push_back(cell);
    }

    // Collapse near infinity: the even envelope with slope -5*2^{-3/2} eta N^{1/9}.
    {
        const double N = normalized.front().triple.steps() + 1;
        const double eta = std::min(c_audit, 1.0);
        const double edge = eta * std::pow(N, 1.0 / 9.0);
        const double slope = -5.0 * std::pow(2.0, -1.5) * edge;
        const double level = (-kInvSqrt2 + std::pow(2.0, -2.5)) * edge * edge;
        bool window_reaches = false;
        for (double z : domain)
            if (std::abs(z) > edge) window_reaches = true;
        if (window_reaches) {
            size_t nexc = 0;
            for (const auto& ens : normalized) {
                bool exceed = false;
                for (size_t s = 0; s < domain.size(); ++s) {
                    const double z = domain[s];
                    if (std::abs(z) <= edge) continue;
                    const double envline = level + slope * (std::abs(z) - edge);
                    if (ens.value(1, s) > envline) exceed = true;
                }
                if (exceed) ++nexc;
            }
            rep.collapse_freq = static_cast<double>(nexc) / count;
        }
    }

    // Search the default lattice for a pair dominating the one-point tails.
    const double cs[] = {0.5, 0.2, 0.1, 0.05, 0.02, 0.01};
    const double Cs[] = {1, 2, 5, 10, 20, 50, 100};
    for (double c : cs) {
        for (double C : Cs) {
            bool ok = true;
            for (const auto& cell : rep.one_point) {
                const double bound = C * std::exp(-c * std::pow(cell.s, 1.5));
                if (cell.lower_freq > bound || cell.upper_freq > bound) ok = false;
            }
            if (ok) {
                rep.dominating_pair_found = true;
                rep.dominating_c = c;
                rep.dominating_C = C;
                return rep;
            }
        }
    }
    return rep;
}

void write_report_json(std::ostream& out, const RegularityReport& rep) {
    nlohmann::json j;
    j["format"] = "blpp-audit v1";
    j["c_audit"] = rep.c_audit;
    j["C_audit"] = rep.C_audit;
    j["sample_count"] = rep.sample_count;
    auto& one = j["one_point"] = nlohmann::json::array();
    for (const auto& c : rep.one_point)
        one.push_back({{"z", c.z},
                       {"s", c.s},
                       {"lower_freq", c.lower_freq},
                       {"upper_freq", c.upper_freq},
                       {"bound", c.bound}});
    auto& lc = j["lower_curves"] = nlohmann::json::array();
    for (const auto& c : rep.lower_curves)
        lc.push_back({{"curve", c.curve}, {"z", c.z}, {"s", c.s}, {"freq", c.freq}});
    auto& ie = j["interval_extrema"] = nlohmann::json::array();
    for (const auto& c : rep.interval_extrema)
        ie.push_back({{"s", c.s},
                      {"inf_freq", c.lower_freq},
                      {"sup_freq", c.upper_freq},
                      {"bound", c.bound}});
    j["collapse_freq"] = rep.collapse_freq;
    j["dominating_pair_found"] = rep.dominating_pair_found;
    if (rep.dominating_pair_found) {
        j["dominating_c"] = rep.dominating_c;
        j["dominating_C"] = rep.dominating_C;
    }
    out << j.dump(2) << '\n';
}

} // namespace blpp
