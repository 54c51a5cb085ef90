#pragma once

#include "nehari/grid.hpp"

#include <cstddef>

namespace nehari {

/// Exponent and frequency/mass parameters of the stationary NLS problem
/// Delta u + |u|^{p-2} u = lambda u.
struct ProblemParams {
    double p = 4.0;
    double lambda = 0.0;  ///< frequency, read by action-side routines
    double mu = 0.0;      ///< half-mass 1/2 ||u||_2^2, read by energy-side routines

    double kappa() const { return 0.5 - 1.0 / p; }
    /// Throws InvalidArgumentError unless p > 2 and mu >= 0 (N <= 2, so 2* is infinite).
    void validate() const;
};

/// L^2-critical exponent 2 + 4/N.
double critical_exponent(std::size_t dim);

/// The three discrete quantities every functional is built from.
struct FieldNorms {
    double grad_sq = 0.0;  ///< -<Delta_h u, u>
    double mass_sq = 0.0;  ///< ||u||_2^2
    double lp_pow = 0.0;   ///< ||u||_p^p
};

FieldNorms compute_norms(const Field& u, double p);

/// Functional values from precomputed norms; the Field overloads below route
/// through these so every quantity shares one set of discrete definitions.
double action_from_norms(const FieldNorms& n, const ProblemParams& params);
double energy_from_norms(const FieldNorms& n, const ProblemParams& params);
double sigma_from_norms(const FieldNorms& n, const ProblemParams& params);
double multiplier_from_norms(const FieldNorms& n);

/// |u|^{p-2} u, pointwise.
Field nonlinearity(const Field& u, double p);

double action(const Field& u, const ProblemParams& params);
double energy(const Field& u, const ProblemParams& params);

/// L^2 gradients: -Delta u + lambda u - |u|^{p-2}u and -Delta u - |u|^{p-2}u.
Field action_gradient(const Field& u, const ProblemParams& params);
Field energy_gradient(const Field& u, const ProblemParams& params);

/// Scalar s > 0 with s*u on the Nehari set of frequency params.lambda.
/// Throws InvalidArgumentError for u = 0 and BelowSpectrumError when
/// ||grad u||^2 + lambda ||u||^2 <= 0.
double sigma(const Field& u, const ProblemParams& params);

/// Discrete L^2 norm of Delta u + |u|^{p-2}u - lambda u.
double el_residual(const Field& u, const ProblemParams& params);

/// Frequency making u satisfy the Nehari identity:
/// (||u||_p^p - ||grad u||^2) / ||u||_2^2.
double extract_multiplier(const Field& u, double p);

/// Gagliardo-Nirenberg quotient ||u||_p^p / (||u||_2^{p-alpha} ||grad u||_2^alpha),
/// alpha = N(p/2 - 1).
double gn_quotient(const Field& u, double p);

struct CriticalData {
    std::size_t dim = 1;
    double p = 0.0;
    double p_crit = 0.0;
    double K_p = 0.0;   ///< estimate (lower bound on the continuum constant)
    double mu_N = 0.0;  ///< 1/2 (p / (2 K_p))^{N/2}
    std::size_t iterations = 0;
};

/// mu_N from a Gagliardo-Nirenberg constant.
double critical_mass(double K_p, double p, std::size_t dim);

struct GnOptions {
    std::size_t max_iters = 20000;
    /// Stop once the dimensionless dual norm of the ascent gradient drops below this.
    double gradient_tol = 1e-9;
    /// Weight of the quadratic penalty on log(||grad u||^2/||u||^2) around the
    /// target scale.
    double scale_penalty = 1.0;
};

/// Rayleigh quotient ||grad u||^2/||u||^2 at which the ascent pins the profile:
/// the optimizer decays over about a twelfth of the smallest extent, but never
/// faster than ten mesh widths.
double gn_target_scale(const DiscreteDomain& domain, double p);

/// Maximizes the Gagliardo-Nirenberg quotient by preconditioned gradient
/// ascent with L^2 normalization.
///
/// The continuum quotient is invariant under dilations, but its lattice
/// version keeps increasing towards grid-scale spikes (a single-point spike
/// already gives 1/2 in 1D for p = 6). The ascent therefore adds a soft penalty
/// pinning ||grad u||^2/||u||^2 at gn_target_scale, which removes the dilation
/// drift without restricting the continuum supremum. The returned K_p is the
/// unpenalized quotient at the converged profile.
CriticalData estimate_gn_constant(const DomainPtr& domain, double p, const GnOptions& options = {});

}  // namespace nehari
