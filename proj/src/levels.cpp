#include "nehari/levels.hpp"

#include "nehari/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nehari {

std::string to_string(LevelKind kind) { return kind == LevelKind::action_level ? "action" : "energy"; }

std::size_t LevelCurve::converged_count() const {
    return static_cast<std::size_t>(std::count(converged.begin(), converged.end(), true));
}

LevelCurve LevelCurve::converged_only() const {
    LevelCurve out;
    out.kind = kind;
    out.p = p;
    for (std::size_t i = 0; i < size(); ++i) {
        if (!converged[i]) continue;
        out.params.push_back(params[i]);
        out.values.push_back(values[i]);
        out.masses.push_back(masses[i]);
        out.converged.push_back(true);
        out.flags.push_back(flags[i]);
    }
    return out;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::size_t> converged_indices(const LevelCurve& curve) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (curve.converged[i]) idx.push_back(i);
    }
    return idx;
}

double value_scale(const LevelCurve& curve) {
    double scale = 1.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (curve.converged[i]) scale = std::max(scale, std::abs(curve.values[i]));
    }
    return scale;
}

std::vector<std::size_t> chord_violations(const std::vector<double>& x, const std::vector<double>& f,
                                          const std::vector<std::size_t>& idx, double tol) {
    std::vector<std::size_t> bad;
    for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
        const std::size_t a = idx[k - 1];
        const std::size_t i = idx[k];
        const std::size_t b = idx[k + 1];
        const double t = (x[i] - x[a]) / (x[b] - x[a]);
        const double chord = (1.0 - t) * f[a] + t * f[b];
        if (f[i] < chord - tol) bad.push_back(i);
    }
    return bad;
}

void add_flag(std::string& flags, const std::string& flag) {
    if (!flags.empty()) flags += ',';
    flags += flag;
}

void flag_all(LevelCurve& curve, const std::vector<std::size_t>& indices, const std::string& flag) {
    for (std::size_t i : indices) add_flag(curve.flags[i], flag);
}

LevelCurve curve_from_sweep(LevelKind kind, double p, const std::vector<SweepSample>& samples) {
    LevelCurve curve;
    curve.kind = kind;
    curve.p = p;
    for (const auto& s : samples) {
        curve.params.push_back(s.parameter);
        const bool have = s.state.has_value();
        curve.values.push_back(have ? (kind == LevelKind::action_level ? s.state->action_value : s.state->energy_value)
                                    : kNaN);
        curve.masses.push_back(have ? (kind == LevelKind::action_level ? s.state->mu : s.state->lambda) : kNaN);
        curve.converged.push_back(s.converged);
        std::string flags = s.error;
        if (s.error.empty() && !s.converged) flags = "NonConvergence";
        curve.flags.push_back(flags);
    }
    return curve;
}

void require_increasing(std::span<const double> x, const char* what) {
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1])) throw InvalidArgumentError(std::string(what) + " must be strictly increasing");
    }
}

// Piecewise-linear interpolant of (x, f) at t, t inside [x.front(), x.back()].
double interpolate(std::span<const double> x, std::span<const double> f, double t) {
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t j = static_cast<std::size_t>(it - x.begin());
    j = std::clamp<std::size_t>(j, 1, x.size() - 1);
    const double s = (t - x[j - 1]) / (x[j] - x[j - 1]);
    return (1.0 - s) * f[j - 1] + s * f[j];
}

// Maximizes g on [a, b] by golden-section search; returns (argmax, value).
template <typename G>
std::pair<double, double> golden_max(G&& g, double a, double b) {
    constexpr double r = 0.6180339887498949;
    double c = b - r * (b - a);
    double d = a + r * (b - a);
    double gc = g(c);
    double gd = g(d);
    for (int it = 0; it < 100 && (b - a) > 1e-14 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
        if (gc >= gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    return gc >= gd ? std::pair{c, gc} : std::pair{d, gd};
}

bool discrete_convex(std::span<const double> y, std::span<const double> v) {
    std::vector<double> slopes;
    for (std::size_t k = 0; k + 1 < y.size(); ++k) {
        if (!std::isfinite(v[k]) || !std::isfinite(v[k + 1])) return false;
        slopes.push_back((v[k + 1] - v[k]) / (y[k + 1] - y[k]));
    }
    double scale = 1.0;
    for (double s : slopes) scale = std::max(scale, std::abs(s));
    for (std::size_t k = 1; k < slopes.size(); ++k) {
        if (slopes[k] - slopes[k - 1] < -1e-10 * scale) return false;
    }
    return true;
}

}  // namespace

std::vector<std::size_t> audit_nonnegative(const LevelCurve& curve, double slack) {
    std::vector<std::size_t> bad;
    const double tol = slack * value_scale(curve);
    for (std::size_t i : converged_indices(curve)) {
        if (curve.values[i] < -tol) bad.push_back(i);
    }
    return bad;
}

std::vector<std::size_t> audit_nondecreasing(const LevelCurve& curve, double slack) {
    std::vector<std::size_t> bad;
    const double tol = slack * value_scale(curve);
    const auto idx = converged_indices(curve);
    for (std::size_t k = 1; k < idx.size(); ++k) {
        if (curve.values[idx[k]] < curve.values[idx[k - 1]] - tol) bad.push_back(idx[k]);
    }
    return bad;
}

std::vector<std::size_t> audit_concave(const LevelCurve& curve, double slack) {
    return chord_violations(curve.params, curve.values, converged_indices(curve), slack * value_scale(curve));
}

std::vector<std::size_t> audit_ratio_decreasing(const LevelCurve& curve) {
    std::vector<std::size_t> bad;
    const auto idx = converged_indices(curve);
    for (std::size_t k = 1; k < idx.size(); ++k) {
        const std::size_t a = idx[k - 1];
        const std::size_t b = idx[k];
        if (!(curve.values[b] / curve.params[b] < curve.values[a] / curve.params[a])) bad.push_back(b);
    }
    return bad;
}

std::vector<std::size_t> audit_h_concave(const LevelCurve& curve, double slack) {
    const double kappa = 0.5 - 1.0 / curve.p;
    std::vector<double> h(curve.size(), kNaN);
    double scale = 1.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (!curve.converged[i]) continue;
        h[i] = std::pow(std::max(curve.values[i], 0.0) / kappa, (curve.p - 2.0) / curve.p);
        scale = std::max(scale, std::abs(h[i]));
    }
    return chord_violations(curve.params, h, converged_indices(curve), slack * scale);
}

LevelCurve build_action_curve(const DomainPtr& domain, double p, std::span<const double> lambda_grid,
                              const SolverConfig& cfg, SweepOrder order) {
    LevelCurve curve =
        curve_from_sweep(LevelKind::action_level, p, continuation_sweep(domain, SolverKind::action, p, lambda_grid, cfg, order));
    flag_all(curve, audit_nonnegative(curve), "negative");
    flag_all(curve, audit_nondecreasing(curve), "decreasing");
    flag_all(curve, audit_h_concave(curve), "h_not_concave");
    return curve;
}

LevelCurve build_energy_curve(const DomainPtr& domain, double p, std::span<const double> mu_grid,
                              const SolverConfig& cfg) {
    LevelCurve curve =
        curve_from_sweep(LevelKind::energy_level, p, continuation_sweep(domain, SolverKind::energy, p, mu_grid, cfg));
    flag_all(curve, audit_concave(curve), "not_concave");
    flag_all(curve, audit_ratio_decreasing(curve), "ratio_not_decreasing");
    return curve;
}

Transform legendre_transform(std::span<const double> x, std::span<const double> f, std::span<const double> dual) {
    if (x.size() != f.size()) throw InvalidArgumentError("transform input lengths differ");
    if (x.size() < 3) throw InvalidArgumentError("Legendre transform needs at least 3 samples");
    require_increasing(x, "transform abscissae");

    Transform out;
    out.dual.assign(dual.begin(), dual.end());
    for (double y : dual) {
        std::size_t best = 0;
        double best_value = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double v = x[i] * y - f[i];
            if (v > best_value) {
                best_value = v;
                best = i;
            }
        }
        double argmax = x[best];
        const double lo = x[best == 0 ? 0 : best - 1];
        const double hi = x[std::min(best + 1, x.size() - 1)];
        const auto [t, value] = golden_max([&](double s) { return s * y - interpolate(x, f, s); }, lo, hi);
        if (value > best_value) {
            best_value = value;
            argmax = t;
        }
        out.values.push_back(best_value);
        out.argmax.push_back(argmax);
        out.boundary_attained.push_back(best == 0 || best == x.size() - 1);
    }
    out.convex = dual.size() < 3 || discrete_convex(dual, out.values);
    return out;
}

Transform legendre_transform(const LevelCurve& curve, std::span<const double> dual) {
    const LevelCurve c = curve.converged_only();
    return legendre_transform(c.params, c.values, dual);
}

std::vector<double> finite_difference_derivative(std::span<const double> x, std::span<const double> f) {
    const std::size_t n = x.size();
    if (n < 3 || f.size() != n) throw InvalidArgumentError("derivative needs at least 3 matching samples");
    std::vector<double> d(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hm = x[i] - x[i - 1];
        const double hp = x[i + 1] - x[i];
        d[i] = (hm * hm * f[i + 1] - hp * hp * f[i - 1] + (hp * hp - hm * hm) * f[i]) / (hm * hp * (hm + hp));
    }
    d[0] = (f[1] - f[0]) / (x[1] - x[0]);
    d[n - 1] = (f[n - 1] - f[n - 2]) / (x[n - 1] - x[n - 2]);
    return d;
}

DualityReport duality_report(const DomainPtr& domain, double p, std::span<const double> lambda_grid,
                             std::span<const double> mu_grid, const SolverConfig& cfg,
                             const DualityThresholds& thresholds) {
    require_increasing(lambda_grid, "lambda grid");
    require_increasing(mu_grid, "mu grid");
    if (!mu_grid.empty() && mu_grid.front() < 0.0) throw InvalidArgumentError("mu grid must be nonnegative");
    if (p >= critical_exponent(domain->dim())) {
        throw InvalidArgumentError("duality report needs an L2-subcritical exponent p < " +
                                   std::to_string(critical_exponent(domain->dim())));
    }

    DualityReport report;
    report.domain = domain->describe();
    report.p = p;
    report.thresholds = thresholds;
    report.action_curve = build_action_curve(domain, p, lambda_grid, cfg);
    if (report.action_curve.converged_count() < 3) {
        throw NonConvergenceError("fewer than 3 converged samples on the action curve");
    }

    std::vector<double> positive_mu;
    for (double mu : mu_grid) {
        if (mu > 0.0) positive_mu.push_back(mu);
    }
    report.energy_curve = build_energy_curve(domain, p, positive_mu, cfg);

    const LevelCurve action = report.action_curve.converged_only();
    const Transform transform = legendre_transform(action, mu_grid);
    report.transform_convex = transform.convex;

    const double scale = value_scale(report.action_curve);
    const double slack = thresholds.audit_slack * scale;
    bool any_included = false;
    bool all_energy_converged = true;
    std::size_t energy_index = 0;
    for (std::size_t j = 0; j < mu_grid.size(); ++j) {
        DualityRow row;
        row.mu = mu_grid[j];
        row.energy_via_transform = -transform.values[j];
        row.sup_attained_at = transform.argmax[j];
        row.boundary_attained = transform.boundary_attained[j];
        if (row.boundary_attained) add_flag(row.flags, "boundary_attained");
        row.action_bound = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < action.size(); ++i) {
            row.action_bound = std::min(row.action_bound, action.values[i] - action.params[i] * row.mu);
        }
        if (row.mu == 0.0) {
            row.energy_direct = 0.0;
            row.converged = true;
            row.excluded = true;
            add_flag(row.flags, "mu_zero");
        } else {
            const std::size_t k = energy_index++;
            row.converged = report.energy_curve.converged[k];
            row.energy_direct = report.energy_curve.values[k];
            if (!row.converged) {
                all_energy_converged = false;
                row.excluded = true;
                add_flag(row.flags, report.energy_curve.flags[k]);
            }
        }
        row.abs_err = std::abs(row.energy_direct - row.energy_via_transform);
        row.rel_err = row.abs_err / (1.0 + std::abs(row.energy_direct));
        if (!row.excluded) {
            any_included = true;
            report.max_duality_err = std::max(report.max_duality_err, row.rel_err);
            report.upper_bound_violation =
                std::max(report.upper_bound_violation, row.energy_direct - row.action_bound);
        }
        report.rows.push_back(std::move(row));
    }

    // Derivative table on the converged samples.
    const std::vector<double> derivative = finite_difference_derivative(action.params, action.values);
    for (std::size_t i = 0; i < action.size(); ++i) {
        DerivativeRow row;
        row.lambda = action.params[i];
        row.derivative = derivative[i];
        row.mass = action.masses[i];
        row.discrepancy = std::abs(row.derivative - row.mass) / std::max(row.mass, 1e-300);
        row.interior = i > 0 && i + 1 < action.size();
        if (row.interior) report.max_derivative_err = std::max(report.max_derivative_err, row.discrepancy);
        report.derivative_table.push_back(row);
    }

    for (std::size_t i = 0; i < action.size(); ++i) {
        for (std::size_t j = 0; j < mu_grid.size(); ++j) {
            const double gap = action.params[i] * mu_grid[j] - action.values[i] - transform.values[j];
            report.fenchel_young_violation = std::max(report.fenchel_young_violation, gap);
        }
    }
    if (mu_grid.size() >= 3) {
        const Transform twice = legendre_transform(mu_grid, transform.values, action.params);
        for (std::size_t i = 0; i < action.size(); ++i) {
            report.double_transform_violation =
                std::max(report.double_transform_violation, twice.values[i] - action.values[i]);
        }
    }

    report.duality_ok = any_included && all_energy_converged && report.max_duality_err <= thresholds.duality_rel;
    report.derivative_ok = action.size() >= 3 && report.max_derivative_err <= thresholds.derivative_rel;
    report.audits_ok = report.fenchel_young_violation <= slack && report.double_transform_violation <= slack &&
                       report.upper_bound_violation <= slack && report.transform_convex;
    return report;
}

nlohmann::json to_json(const DualityReport& report) {
    using nlohmann::json;
    const auto curve_json = [](const LevelCurve& c) {
        json rows = json::array();
        for (std::size_t i = 0; i < c.size(); ++i) {
            rows.push_back({{"abscissa", c.params[i]},
                            {"value", c.values[i]},
                            {c.kind == LevelKind::action_level ? "mass" : "multiplier", c.masses[i]},
                            {"converged", static_cast<bool>(c.converged[i])},
                            {"flags", c.flags[i]}});
        }
        return rows;
    };
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"mu", r.mu},
                        {"energy_direct", r.energy_direct},
                        {"energy_via_transform", r.energy_via_transform},
                        {"abs_err", r.abs_err},
                        {"rel_err", r.rel_err},
                        {"sup_attained_at", r.sup_attained_at},
                        {"boundary_attained", r.boundary_attained},
                        {"converged", r.converged},
                        {"excluded", r.excluded},
                        {"action_bound", r.action_bound},
                        {"flags", r.flags}});
    }
    json table = json::array();
    for (const auto& r : report.derivative_table) {
        table.push_back({{"lambda", r.lambda},
                         {"derivative", r.derivative},
                         {"mass", r.mass},
                         {"discrepancy", r.discrepancy},
                         {"interior", r.interior}});
    }
    return json{{"schema", "nehari-lab/duality/v1"},
                {"domain", report.domain},
                {"p", report.p},
                {"thresholds",
                 {{"duality_rel", report.thresholds.duality_rel},
                  {"derivative_rel", report.thresholds.derivative_rel},
                  {"audit_slack", report.thresholds.audit_slack}}},
                {"action_curve", curve_json(report.action_curve)},
                {"energy_curve", curve_json(report.energy_curve)},
                {"duality", rows},
                {"derivative_table", table},
                {"summary",
                 {{"max_duality_err", report.max_duality_err},
                  {"max_derivative_err", report.max_derivative_err},
                  {"fenchel_young_violation", report.fenchel_young_violation},
                  {"double_transform_violation", report.double_transform_violation},
                  {"upper_bound_violation", report.upper_bound_violation},
                  {"transform_convex", report.transform_convex},
                  {"duality_ok", report.duality_ok},
                  {"derivative_ok", report.derivative_ok},
                  {"audits_ok", report.audits_ok},
                  {"passed", report.passed()}}}};
}

MassJumpDiagnostic detect_mass_jumps(std::span<const double> lambda_grid, std::vector<double> left_mass,
                                     std::vector<double> right_mass, double threshold) {
    if (left_mass.size() != lambda_grid.size() || right_mass.size() != lambda_grid.size()) {
        throw InvalidArgumentError("mass arrays must match the lambda grid");
    }
    MassJumpDiagnostic out;
    out.lambda_grid.assign(lambda_grid.begin(), lambda_grid.end());
    out.threshold = threshold;
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        const double gap = std::abs(left_mass[i] - right_mass[i]);
        out.jump_detected.push_back(gap > threshold * std::max(1.0, right_mass[i]));
    }
    out.left_mass = std::move(left_mass);
    out.right_mass = std::move(right_mass);
    return out;
}

MassJumpDiagnostic mass_jump_scan(const DomainPtr& domain, double p, std::span<const double> lambda_grid,
                                  const SolverConfig& cfg, double threshold) {
    const auto masses = [&](SweepOrder order) {
        std::vector<double> m;
        for (const auto& s : continuation_sweep(domain, SolverKind::action, p, lambda_grid, cfg, order)) {
            m.push_back(s.converged ? s.state->mu : kNaN);
        }
        return m;
    };
    return detect_mass_jumps(lambda_grid, masses(SweepOrder::ascending), masses(SweepOrder::descending), threshold);
}

std::vector<std::size_t> audit_mass_monotone(const LevelCurve& curve, double slack) {
    std::vector<std::size_t> bad;
    const auto idx = converged_indices(curve);
    for (std::size_t k = 1; k < idx.size(); ++k) {
        if (curve.masses[idx[k]] < curve.masses[idx[k - 1]] - slack) bad.push_back(idx[k]);
    }
    return bad;
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
    if (count < 2 || !(lo > 0.0) || !(hi > lo)) throw InvalidArgumentError("geometric grid needs 0 < lo < hi, count >= 2");
    std::vector<double> g(count);
    const double ratio = std::log(hi / lo);
    for (std::size_t i = 0; i < count; ++i) {
        g[i] = lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
    if (count < 2 || !(hi > lo)) throw InvalidArgumentError("linear grid needs lo < hi, count >= 2");
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i) {
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    g.back() = hi;
    return g;
}

}  // namespace nehari
