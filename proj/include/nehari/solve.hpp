#pragma once

#include "nehari/functional.hpp"
#include "nehari/grid.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nehari {

enum class SolverKind { action, energy };
enum class StepRule { backtracking, bb };

std::string to_string(SolverKind kind);
std::string to_string(StepRule rule);
StepRule step_rule_from_string(const std::string& name);

struct SolverConfig {
    double tol = 1e-8;  ///< target for the Euler-Lagrange residual
    std::size_t max_iters = 50000;
    std::size_t n_starts = 1;
    StepRule step_rule = StepRule::bb;
    std::uint64_t seed = 0;
    /// Energy descent reports Divergence once ||grad u||^2 exceeds this.
    double divergence_threshold = 1e6;
    /// ... or once ||grad u||^2/||u||^2 exceeds this fraction of the largest
    /// eigenvalue of -Delta_h, i.e. the iterate concentrates at the grid scale.
    double collapse_fraction = 0.05;
    /// Finish every descent with Newton steps on the Euler-Lagrange system.
    bool newton_polish = true;
    /// Optional cached bottom of the spectrum; solve_action rejects
    /// lambda <= -lambda_omega without factorizing when it is set.
    std::optional<double> lambda_omega;

    void validate() const;
};

/// Converged (or best-effort) solution bundle.
struct GroundState {
    Field field;
    double p = 0.0;
    double lambda = 0.0;  ///< prescribed (action) or extracted multiplier (energy)
    double mu = 0.0;      ///< 1/2 ||u||_2^2
    double action_value = 0.0;
    double energy_value = 0.0;
    double residual = 0.0;
    SolverKind kind = SolverKind::action;
    bool converged = false;
    std::size_t iterations = 0;
    std::size_t start_index = 0;
    /// kappa h^{p/(p-2)} with h the L^p-sphere quotient of the field; equals
    /// action_value on the Nehari set. Only meaningful for action solves.
    double level_from_h = 0.0;

    ProblemParams params() const { return ProblemParams{p, lambda, mu}; }
};

/// Positive Gaussian bump used to start descent number `start_index`.
/// Start 0 sits at the barycenter with width min_extent/6; later starts
/// perturb center and width with a generator seeded from (seed, start_index).
Field initial_bump(const DomainPtr& domain, std::size_t start_index, std::uint64_t seed);

/// Action ground state at frequency lambda: minimizes
/// (||grad v||^2 + lambda ||v||^2) / ||v||_p^2 by preconditioned normalized
/// descent on the unit L^p sphere, then rescales onto the Nehari set.
///
/// Throws BelowSpectrumError (lambda <= -lambda_Omega), NonConvergenceError.
GroundState solve_action(const DomainPtr& domain, double p, double lambda, const SolverConfig& cfg,
                         const std::optional<Field>& initial = std::nullopt);

/// Energy ground state at half-mass mu by projected preconditioned descent on
/// the mass sphere. Throws DivergenceError when the energy is unbounded below
/// (critical or supercritical exponent above the critical mass), or
/// NonConvergenceError.
GroundState solve_energy(const DomainPtr& domain, double p, double mu, const SolverConfig& cfg,
                         const std::optional<Field>& initial = std::nullopt);

enum class SweepOrder { ascending, descending };

struct SweepSample {
    double parameter = 0.0;
    std::optional<GroundState> state;
    bool converged = false;
    bool warm_started = false;
    bool cold_fallback = false;
    std::string error;  ///< empty, "BelowSpectrum", "Divergence", "NonConvergence" or "Error"
    std::string message;
};

/// Solves along a strictly increasing parameter grid, warm-starting each
/// sample from its predecessor in the processing order and falling back to a
/// cold multi-start solve when the warm start fails. Failures are recorded
/// per sample; output order always matches the input grid.
std::vector<SweepSample> continuation_sweep(const DomainPtr& domain, SolverKind kind, double p,
                                            std::span<const double> grid, const SolverConfig& cfg,
                                            SweepOrder order = SweepOrder::ascending);

}  // namespace nehari
