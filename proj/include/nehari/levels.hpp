#pragma once

#include "nehari/solve.hpp"

#include "json.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace nehari {

enum class LevelKind { action_level, energy_level };

std::string to_string(LevelKind kind);

/// Sampled level function: J(lambda) on an action curve, E(mu) on an energy curve.
struct LevelCurve {
    LevelKind kind = LevelKind::action_level;
    double p = 0.0;
    std::vector<double> params;  ///< lambda or mu, strictly increasing
    std::vector<double> values;
    /// Half-mass of the minimizer (action curves) or extracted multiplier (energy curves).
    std::vector<double> masses;
    std::vector<bool> converged;
    /// Per-sample comma-separated flags; empty when clean. Solver failures
    /// carry their error name, audit failures the audit name.
    std::vector<std::string> flags;

    std::size_t size() const { return params.size(); }
    std::size_t converged_count() const;
    /// Converged samples only, in order.
    LevelCurve converged_only() const;
};

/// Indices where an audit fails. Every audit looks only at converged samples;
/// `slack` is relative to the largest |value| on the curve (at least 1).
std::vector<std::size_t> audit_nonnegative(const LevelCurve& curve, double slack = 1e-12);
std::vector<std::size_t> audit_nondecreasing(const LevelCurve& curve, double slack = 1e-12);
/// Chord test on consecutive triples: f(x_i) >= the chord value at x_i - slack.
std::vector<std::size_t> audit_concave(const LevelCurve& curve, double slack = 1e-6);
/// E(mu)/mu strictly decreasing on consecutive samples.
std::vector<std::size_t> audit_ratio_decreasing(const LevelCurve& curve);
/// h = (J/kappa)^{(p-2)/p} concave on consecutive triples.
std::vector<std::size_t> audit_h_concave(const LevelCurve& curve, double slack = 1e-6);

/// Continuation sweep over lambda; flags nonconverged samples and any sample
/// failing the nonnegativity, monotonicity or h-concavity audits.
LevelCurve build_action_curve(const DomainPtr& domain, double p, std::span<const double> lambda_grid,
                              const SolverConfig& cfg, SweepOrder order = SweepOrder::ascending);

/// Continuation sweep over mu; flags nonconverged samples (Divergence in the
/// critical regime) and failures of the concavity and E(mu)/mu audits.
LevelCurve build_energy_curve(const DomainPtr& domain, double p, std::span<const double> mu_grid,
                              const SolverConfig& cfg);

/// Sampled Legendre-Fenchel transform f*(y) = sup_x (x y - f(x)).
struct Transform {
    std::vector<double> dual;
    std::vector<double> values;
    std::vector<double> argmax;
    /// The supremum over the sampled range sits at its first or last sample,
    /// so the supremum over the real line may be larger (possibly infinite).
    std::vector<bool> boundary_attained;
    /// Discrete second differences of `values` are >= -1e-10 (scaled).
    bool convex = true;
};

/// Transform of the piecewise-linear interpolant of (x, f): the best sample
/// is refined by golden-section search over its two neighbouring intervals.
/// Throws InvalidArgumentError with fewer than 3 samples or unsorted x.
Transform legendre_transform(std::span<const double> x, std::span<const double> f, std::span<const double> dual);
/// Same, over the converged samples of a curve.
Transform legendre_transform(const LevelCurve& curve, std::span<const double> dual);

/// Central three-point derivative on a nonuniform grid, one-sided at the ends.
std::vector<double> finite_difference_derivative(std::span<const double> x, std::span<const double> f);

struct DerivativeRow {
    double lambda = 0.0;
    double derivative = 0.0;  ///< finite-difference J'(lambda)
    double mass = 0.0;        ///< mu of the minimizer
    double discrepancy = 0.0; ///< |derivative - mass| / max(mass, tiny)
    bool interior = false;    ///< endpoints are reported but not judged
};

struct DualityRow {
    double mu = 0.0;
    double energy_direct = 0.0;
    double energy_via_transform = 0.0;  ///< -J*(mu)
    double abs_err = 0.0;
    double rel_err = 0.0;  ///< abs_err / (1 + |energy_direct|)
    double sup_attained_at = 0.0;
    bool boundary_attained = false;
    bool converged = false;
    /// Excluded from pass/fail: mu = 0 rows and nonconverged energy solves.
    bool excluded = false;
    /// min over the lambda grid of J(lambda) - lambda mu, which bounds E(mu) from above.
    double action_bound = 0.0;
    std::string flags;
};

struct DualityThresholds {
    double duality_rel = 1e-2;
    double derivative_rel = 1e-2;
    double audit_slack = 1e-8;  ///< for the Fenchel-Young, double-transform and upper-bound audits
};

struct DualityReport {
    std::string domain;
    double p = 0.0;
    DualityThresholds thresholds;
    LevelCurve action_curve;
    LevelCurve energy_curve;
    std::vector<DualityRow> rows;
    std::vector<DerivativeRow> derivative_table;
    double max_duality_err = 0.0;     ///< over non-excluded rows
    double max_derivative_err = 0.0;  ///< over interior rows
    double fenchel_young_violation = 0.0;  ///< max of lambda mu - J - J*, clipped at 0
    double double_transform_violation = 0.0;  ///< max of J** - J, clipped at 0
    double upper_bound_violation = 0.0;  ///< max of E(mu) - min(J - lambda mu), clipped at 0
    bool transform_convex = true;
    /// Every mu > 0 energy solve converged and max_duality_err is within threshold.
    bool duality_ok = false;
    bool derivative_ok = false;
    bool audits_ok = false;

    bool passed() const { return duality_ok && derivative_ok && audits_ok; }
};

/// Builds both curves, transforms the action curve on the mu grid and
/// compares with the direct energy levels; tabulates J' against the minimizer
/// mass; audits Fenchel-Young, J** <= J and J(lambda) - lambda mu >= E(mu).
DualityReport duality_report(const DomainPtr& domain, double p, std::span<const double> lambda_grid,
                             std::span<const double> mu_grid, const SolverConfig& cfg,
                             const DualityThresholds& thresholds = {});

/// Schema "nehari-lab/duality/v1".
nlohmann::json to_json(const DualityReport& report);

struct MassJumpDiagnostic {
    std::vector<double> lambda_grid;
    std::vector<double> left_mass;   ///< continuation arriving from smaller lambda
    std::vector<double> right_mass;  ///< continuation arriving from larger lambda
    std::vector<bool> jump_detected;
    double threshold = 1e-2;
};

/// jump_detected[i] <=> |left - right| > threshold * max(1, right); NaN
/// masses (failed samples) never flag.
MassJumpDiagnostic detect_mass_jumps(std::span<const double> lambda_grid, std::vector<double> left_mass,
                                     std::vector<double> right_mass, double threshold = 1e-2);

/// Runs ascending and descending continuation and compares the masses the two
/// branches select. Purely diagnostic.
MassJumpDiagnostic mass_jump_scan(const DomainPtr& domain, double p, std::span<const double> lambda_grid,
                                  const SolverConfig& cfg, double threshold = 1e-2);

/// Indices i where mass[i] < mass[i-1] - slack on a jump-free curve.
std::vector<std::size_t> audit_mass_monotone(const LevelCurve& curve, double slack = 1e-8);

/// Geometric and uniform grids (count >= 2, endpoints included exactly).
std::vector<double> geometric_grid(double lo, double hi, std::size_t count);
std::vector<double> linear_grid(double lo, double hi, std::size_t count);

}  // namespace nehari
