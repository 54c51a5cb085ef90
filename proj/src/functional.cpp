#include "nehari/functional.hpp"

#include "nehari/errors.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace nehari {

void ProblemParams::validate() const {
    if (!(p > 2.0) || !std::isfinite(p)) {
        throw InvalidArgumentError("nonlinearity exponent must satisfy p > 2 (got " + std::to_string(p) + ")");
    }
    if (!(mu >= 0.0)) throw InvalidArgumentError("mass parameter mu must be nonnegative");
    if (!std::isfinite(lambda)) throw InvalidArgumentError("frequency must be finite");
}

double critical_exponent(std::size_t dim) { return 2.0 + 4.0 / static_cast<double>(dim); }

FieldNorms compute_norms(const Field& u, double p) {
    const double w = u.domain().weight();
    FieldNorms n;
    n.grad_sq = -w * laplacian_apply(u.domain(), u.values()).dot(u.values());
    n.mass_sq = w * u.values().squaredNorm();
    double acc = 0.0;
    for (double x : u.values()) acc += std::pow(std::abs(x), p);
    n.lp_pow = w * acc;
    return n;
}

Field nonlinearity(const Field& u, double p) {
    Eigen::VectorXd out(u.values().size());
    for (Eigen::Index k = 0; k < out.size(); ++k) {
        const double x = u.values()[k];
        out[k] = std::pow(std::abs(x), p - 2.0) * x;
    }
    return Field(u.domain_ptr(), std::move(out));
}

double action_from_norms(const FieldNorms& n, const ProblemParams& params) {
    return 0.5 * n.grad_sq + 0.5 * params.lambda * n.mass_sq - n.lp_pow / params.p;
}

double energy_from_norms(const FieldNorms& n, const ProblemParams& params) {
    return 0.5 * n.grad_sq - n.lp_pow / params.p;
}

double action(const Field& u, const ProblemParams& params) {
    return action_from_norms(compute_norms(u, params.p), params);
}

double energy(const Field& u, const ProblemParams& params) {
    return energy_from_norms(compute_norms(u, params.p), params);
}

Field action_gradient(const Field& u, const ProblemParams& params) {
    const Eigen::VectorXd lap = laplacian_apply(u.domain(), u.values());
    return Field(u.domain_ptr(), -lap + params.lambda * u.values() - nonlinearity(u, params.p).values());
}

Field energy_gradient(const Field& u, const ProblemParams& params) {
    const Eigen::VectorXd lap = laplacian_apply(u.domain(), u.values());
    return Field(u.domain_ptr(), -lap - nonlinearity(u, params.p).values());
}

double sigma_from_norms(const FieldNorms& n, const ProblemParams& params) {
    if (n.lp_pow == 0.0) throw InvalidArgumentError("cannot project the zero field onto the Nehari set");
    const double numerator = n.grad_sq + params.lambda * n.mass_sq;
    if (!(numerator > 0.0)) {
        throw BelowSpectrumError("||grad u||^2 + lambda ||u||^2 <= 0 at lambda = " +
                                 std::to_string(params.lambda) +
                                 ": the Nehari projection fails (lambda <= -lambda_Omega direction)");
    }
    return std::pow(numerator / n.lp_pow, 1.0 / (params.p - 2.0));
}

double sigma(const Field& u, const ProblemParams& params) {
    return sigma_from_norms(compute_norms(u, params.p), params);
}

double el_residual(const Field& u, const ProblemParams& params) {
    const Field g = action_gradient(u, params);
    return std::sqrt(u.domain().weight() * g.values().squaredNorm());
}

double multiplier_from_norms(const FieldNorms& n) {
    if (n.mass_sq == 0.0) throw InvalidArgumentError("cannot extract a multiplier from the zero field");
    return (n.lp_pow - n.grad_sq) / n.mass_sq;
}

double extract_multiplier(const Field& u, double p) { return multiplier_from_norms(compute_norms(u, p)); }

namespace {

double gn_alpha(double p, std::size_t dim) { return static_cast<double>(dim) * (p / 2.0 - 1.0); }

double quotient_from_norms(const FieldNorms& n, double p, double alpha) {
    return n.lp_pow / (std::pow(n.mass_sq, 0.5 * (p - alpha)) * std::pow(n.grad_sq, 0.5 * alpha));
}

}  // namespace

double gn_quotient(const Field& u, double p) {
    const FieldNorms n = compute_norms(u, p);
    if (n.mass_sq == 0.0) throw InvalidArgumentError("GN quotient of the zero field");
    return quotient_from_norms(n, p, gn_alpha(p, u.domain().dim()));
}

double critical_mass(double K_p, double p, std::size_t dim) {
    return 0.5 * std::pow(p / (2.0 * K_p), 0.5 * static_cast<double>(dim));
}

double gn_target_scale(const DiscreteDomain& domain, double p) {
    const auto n = static_cast<double>(domain.dim());
    // ||grad Q||^2 / ||Q||^2 for the optimizer of decay rate one, from the
    // Nehari and Pohozaev identities.
    const double unit_ratio = n * (1.0 / p - 0.5) / ((n - 2.0) / 2.0 - n / p);
    const double h_max = *std::max_element(domain.spacing().begin(), domain.spacing().end());
    const double rate = std::min(12.0 / domain.min_extent(), 1.0 / (10.0 * h_max));
    return rate * rate * unit_ratio;
}

CriticalData estimate_gn_constant(const DomainPtr& domain, double p, const GnOptions& options) {
    ProblemParams{p}.validate();
    const std::size_t dim = domain->dim();
    const double alpha = gn_alpha(p, dim);
    const double w = domain->weight();
    const double target = gn_target_scale(*domain, p);
    const double log_target = std::log(target);

    // Gaussian bump at the barycenter whose Rayleigh quotient N/(2 width^2)
    // equals the target scale.
    const std::vector<double> center = domain->barycenter();
    const double width = std::sqrt(static_cast<double>(dim) / (2.0 * target));
    Field u = Field::sample(domain, [&](auto x) {
        double r2 = 0.0;
        for (std::size_t a = 0; a < x.size(); ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
        return std::exp(-0.5 * r2 / (width * width));
    });
    u = u * (1.0 / std::sqrt(inner_l2(u, u)));

    Eigen::SparseMatrix<double> metric = negative_laplacian_matrix(*domain);
    metric.diagonal().array() += target;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> precond(metric);

    const auto objective = [&](const FieldNorms& n) {
        const double drift = std::log(n.grad_sq / n.mass_sq) - log_target;
        return std::log(quotient_from_norms(n, p, alpha)) - options.scale_penalty * drift * drift;
    };
    // L^2 gradient of the objective.
    const auto gradient = [&](const Field& v, const FieldNorms& n) -> Eigen::VectorXd {
        const Eigen::VectorXd neg_lap = -laplacian_apply(*domain, v.values());
        const double drift = std::log(n.grad_sq / n.mass_sq) - log_target;
        const double c = 2.0 * options.scale_penalty * drift;
        return p * nonlinearity(v, p).values() / n.lp_pow -
               (p - alpha - 2.0 * c) * v.values() / n.mass_sq - (alpha + 2.0 * c) * neg_lap / n.grad_sq;
    };

    FieldNorms norms = compute_norms(u, p);
    double value = objective(norms);
    double step = 1e-2 / target;

    for (std::size_t it = 1; it <= options.max_iters; ++it) {
        const Eigen::VectorXd g = gradient(u, norms);
        const Eigen::VectorXd direction = precond.solve(g);
        // Dual norm of the gradient, scaled to be dimensionless.
        const double gnorm = std::sqrt(w * std::abs(g.dot(direction)) * target);
        if (gnorm <= options.gradient_tol) {
            const double k = quotient_from_norms(norms, p, alpha);
            return {dim, p, critical_exponent(dim), k, critical_mass(k, p, dim), it};
        }
        bool improved = false;
        for (int attempt = 0; attempt < 80; ++attempt) {
            Eigen::VectorXd trial_values = u.values() + step * direction;
            trial_values /= std::sqrt(w * trial_values.squaredNorm());
            Field trial(domain, std::move(trial_values));
            const FieldNorms trial_norms = compute_norms(trial, p);
            const double trial_value = objective(trial_norms);
            if (trial_value > value) {
                u = std::move(trial);
                norms = trial_norms;
                value = trial_value;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) {
            // Stalled at working precision; accept only if already near stationary.
            if (gnorm <= 1e3 * options.gradient_tol) {
                const double k = quotient_from_norms(norms, p, alpha);
                return {dim, p, critical_exponent(dim), k, critical_mass(k, p, dim), it};
            }
            break;
        }
        step *= 1.5;
    }
    throw NonConvergenceError("Gagliardo-Nirenberg ascent did not converge within " +
                              std::to_string(options.max_iters) + " iterations");
}

}  // namespace nehari
