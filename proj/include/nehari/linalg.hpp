#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>

namespace nehari {

using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct CgResult {
    std::size_t iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
    /// Set when a direction with non-positive curvature was met.
    bool indefinite = false;
};

/// Conjugate gradients for a symmetric positive definite operator, starting
/// from the content of x.
CgResult conjugate_gradient(const LinearOperator& apply, const Eigen::VectorXd& rhs,
                            Eigen::VectorXd& x, double rel_tol, std::size_t max_iters);

}  // namespace nehari
