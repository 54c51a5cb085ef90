#include "nehari/linalg.hpp"

#include <cmath>

namespace nehari {

CgResult conjugate_gradient(const LinearOperator& apply, const Eigen::VectorXd& rhs,
                            Eigen::VectorXd& x, double rel_tol, std::size_t max_iters) {
    CgResult result;
    const double rhs_norm = rhs.norm();
    if (rhs_norm == 0.0) {
        x.setZero();
        result.converged = true;
        return result;
    }
    Eigen::VectorXd r = rhs - apply(x);
    Eigen::VectorXd d = r;
    double rr = r.squaredNorm();
    for (std::size_t it = 0; it < max_iters; ++it) {
        result.relative_residual = std::sqrt(rr) / rhs_norm;
        if (result.relative_residual <= rel_tol) {
            result.converged = true;
            return result;
        }
        const Eigen::VectorXd ad = apply(d);
        const double curvature = d.dot(ad);
        if (!(curvature > 0.0)) {
            result.indefinite = true;
            return result;
        }
        const double step = rr / curvature;
        x += step * d;
        r -= step * ad;
        const double rr_next = r.squaredNorm();
        d = r + (rr_next / rr) * d;
        rr = rr_next;
        result.iterations = it + 1;
    }
    result.relative_residual = std::sqrt(rr) / rhs_norm;
    result.converged = result.relative_residual <= rel_tol;
    return result;
}

}  // namespace nehari
