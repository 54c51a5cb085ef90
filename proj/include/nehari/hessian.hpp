#pragma once

#include "nehari/solve.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nehari {

enum class Constraint { nehari, mass };

std::string to_string(Constraint c);

/// Tangent space of the Nehari set (normal |u|^{p-2}u) or of the mass sphere
/// (normal u) at a ground state, with the L^2-orthogonal projector onto it.
class TangentBasis {
public:
    TangentBasis(const GroundState& base, Constraint constraint);

    Constraint constraint() const { return constraint_; }
    const GroundState& base() const { return base_; }
    const Field& normal() const { return normal_; }

    /// v - (<n, v> / <n, n>) n
    Field project(const Field& v) const;
    Eigen::VectorXd project(const Eigen::VectorXd& v) const;
    /// |<n, v>| <= rel_tol ||n|| ||v||
    bool contains(const Field& v, double rel_tol = 1e-10) const;

private:
    GroundState base_;
    Constraint constraint_;
    Field normal_;
    double normal_sq_;
};

/// v -> -Delta v + lambda v - (p-1)|u|^{p-2} v, the operator behind both forms.
Eigen::VectorXd second_form_operator(const GroundState& u, const Eigen::VectorXd& v);

/// <second_form_operator(v), v> without any tangency check.
double second_form_value(const GroundState& u, const Field& v);

/// Second derivative of the action along the Nehari set; v must lie in the
/// Nehari tangent space (InvalidArgumentError otherwise, 1e-10 relative).
double second_form_action(const GroundState& u, const Field& v);

/// Second derivative of the energy along the mass sphere, same integrand;
/// phi must be L^2-orthogonal to u.
double second_form_energy(const GroundState& u, const Field& phi);

struct TangentDecomposition {
    double alpha = 0.0;
    Field phi;
    /// |alpha + <|u|^{p-2}u, phi> / ||u||_p^p|, zero for an exact Nehari tangent.
    double alpha_defect = 0.0;
    bool alpha_consistent = false;  ///< alpha_defect <= 1e-10 (1 + |alpha|)
};

/// v = alpha u + phi with phi orthogonal to u. Throws InvalidArgumentError for u = 0.
TangentDecomposition decompose_tangent(const GroundState& u, const Field& v);

struct NormTerms {
    double lp_2p_minus_2 = 0.0;  ///< ||u||_{2p-2}^{2p-2}
    double mass_sq = 0.0;        ///< ||u||_2^2
    double lp_pow = 0.0;         ///< ||u||_p^p
};

/// ||u||_{2p-2}^{2p-2} ||u||_2^2 / ||u||_p^{2p}, with the terms it is built from.
double constant_c1(const GroundState& u, NormTerms* terms = nullptr);

struct EigResult {
    double value = 0.0;
    Field vector;
    std::size_t iterations = 0;
    double residual = 0.0;
};

/// Smallest eigenvalue of the projected second form on the tangent space,
/// relative to the L^2 inner product. Shift-and-invert iteration on the
/// bordered system [[A - s, n], [n^T, 0]] with s below the spectrum, followed
/// by Rayleigh-quotient refinement. Throws NonConvergenceError.
EigResult extremal_eigs(const GroundState& u, Constraint constraint, double tol = 1e-9,
                        std::size_t max_iters = 20000, std::uint64_t seed = 0);

struct SecondFormReport {
    double p = 0.0;
    double lambda = 0.0;
    double mu = 0.0;
    double state_residual = 0.0;
    SolverKind state_kind = SolverKind::action;
    std::size_t probes = 0;
    std::uint64_t seed = 0;
    double identity_max_rel_err = 0.0;
    double identity_tol = 1e-8;
    bool identity_ok = false;
    bool alpha_consistent = true;
    double min_eig_nehari = 0.0;
    double min_eig_mass = 0.0;
    double constant_C1 = 0.0;
    NormTerms c1_terms;
    double eigen_tol = 1e-6;
    bool eigen_inequality_ok = false;
    std::vector<std::string> warnings;

    bool passed() const { return identity_ok && eigen_inequality_ok; }
};

/// Checks J''v^2 = (p-2)(<|u|^{p-2}u, phi>)^2/||u||_p^p + E''phi^2 over
/// n_probes seeded random Nehari-tangent fields; fills the identity fields.
SecondFormReport verify_bind_identity(const GroundState& u, std::size_t n_probes, std::uint64_t seed);

/// Identity check plus extremal eigenvalues, C1 and the eigenvalue inequality
/// min_eig_nehari >= min_eig_mass / (1 + C1) - eigen_tol.
SecondFormReport second_form_report(const GroundState& u, std::size_t n_probes, std::uint64_t seed);

/// Schema "nehari-lab/hessian/v1".
nlohmann::json to_json(const SecondFormReport& report);

}  // namespace nehari
