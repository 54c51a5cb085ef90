#include "nehari/hessian.hpp"

#include "nehari/errors.hpp"
#include "nehari/parallel.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <random>

namespace nehari {

namespace {

using Vec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

Vec potential(const GroundState& u) {
    const Vec& x = u.field.values();
    Vec out(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) out[k] = std::pow(std::abs(x[k]), u.p - 2.0);
    return out;
}

Field normal_of(const GroundState& u, Constraint c) {
    if (c == Constraint::mass) return u.field;
    return nonlinearity(u.field, u.p);
}

void require_tangent(const GroundState& u, Constraint c, const Field& v, const char* what) {
    require_same_domain(u.field, v);
    const TangentBasis basis(u, c);
    if (!basis.contains(v)) {
        throw InvalidArgumentError(std::string(what) + ": argument is not in the " + to_string(c) +
                                   " tangent space; project it first");
    }
}

// Bordered matrix [[A - shift, n], [n^T, 0]] for the tangent-restricted solve.
SpMat bordered(const GroundState& u, const Vec& normal, double shift) {
    const SpMat lap = negative_laplacian_matrix(u.field.domain());
    const Vec pot = potential(u);
    const auto n = lap.rows();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(lap.nonZeros() + 3 * n));
    for (int col = 0; col < lap.outerSize(); ++col) {
        for (SpMat::InnerIterator it(lap, col); it; ++it) {
            triplets.emplace_back(static_cast<int>(it.row()), col, it.value());
        }
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        const int i = static_cast<int>(k);
        triplets.emplace_back(i, i, u.lambda - (u.p - 1.0) * pot[k] - shift);
        triplets.emplace_back(i, static_cast<int>(n), normal[k]);
        triplets.emplace_back(static_cast<int>(n), i, normal[k]);
    }
    SpMat k(n + 1, n + 1);
    k.setFromTriplets(triplets.begin(), triplets.end());
    return k;
}

}  // namespace

std::string to_string(Constraint c) { return c == Constraint::nehari ? "nehari" : "mass"; }

TangentBasis::TangentBasis(const GroundState& base, Constraint constraint)
    : base_(base), constraint_(constraint), normal_(normal_of(base, constraint)), normal_sq_(0.0) {
    normal_sq_ = normal_.values().squaredNorm();
    if (normal_sq_ == 0.0) throw InvalidArgumentError("tangent space of the zero field");
}

Vec TangentBasis::project(const Vec& v) const {
    const Vec& n = normal_.values();
    return v - (n.dot(v) / normal_sq_) * n;
}

Field TangentBasis::project(const Field& v) const {
    require_same_domain(normal_, v);
    return Field(v.domain_ptr(), project(v.values()));
}

bool TangentBasis::contains(const Field& v, double rel_tol) const {
    const Vec& n = normal_.values();
    return std::abs(n.dot(v.values())) <= rel_tol * std::sqrt(normal_sq_) * v.values().norm();
}

Vec second_form_operator(const GroundState& u, const Vec& v) {
    const Vec pot = potential(u);
    return -laplacian_apply(u.field.domain(), v) + u.lambda * v - (u.p - 1.0) * pot.cwiseProduct(v);
}

double second_form_value(const GroundState& u, const Field& v) {
    require_same_domain(u.field, v);
    return v.domain().weight() * second_form_operator(u, v.values()).dot(v.values());
}

double second_form_action(const GroundState& u, const Field& v) {
    require_tangent(u, Constraint::nehari, v, "second_form_action");
    return second_form_value(u, v);
}

double second_form_energy(const GroundState& u, const Field& phi) {
    require_tangent(u, Constraint::mass, phi, "second_form_energy");
    return second_form_value(u, phi);
}

TangentDecomposition decompose_tangent(const GroundState& u, const Field& v) {
    require_same_domain(u.field, v);
    const double uu = inner_l2(u.field, u.field);
    if (uu == 0.0) throw InvalidArgumentError("cannot decompose against the zero field");
    const double alpha = inner_l2(u.field, v) / uu;
    Field phi = v - alpha * u.field;
    const double defect =
        std::abs(alpha + inner_l2(nonlinearity(u.field, u.p), phi) / norm_lp_pow(u.field, u.p));
    return TangentDecomposition{alpha, std::move(phi), defect, defect <= 1e-10 * (1.0 + std::abs(alpha))};
}

double constant_c1(const GroundState& u, NormTerms* terms) {
    NormTerms t;
    t.lp_2p_minus_2 = norm_lp_pow(u.field, 2.0 * u.p - 2.0);
    t.mass_sq = inner_l2(u.field, u.field);
    t.lp_pow = norm_lp_pow(u.field, u.p);
    if (terms) *terms = t;
    return t.lp_2p_minus_2 * t.mass_sq / (t.lp_pow * t.lp_pow);
}

EigResult extremal_eigs(const GroundState& u, Constraint constraint, double tol, std::size_t max_iters,
                        std::uint64_t seed) {
    const TangentBasis basis(u, constraint);
    const Vec& normal = basis.normal().values();
    const auto n = normal.size();

    // A >= lambda - (p-1) max|u|^{p-2} since -Delta_h is positive.
    const double floor = u.lambda - (u.p - 1.0) * potential(u).maxCoeff();
    const double shift = floor - 1.0;
    const double scale = std::max(1.0, std::abs(shift));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Vec x(n);
    for (auto& value : x) value = gauss(rng);
    x = basis.project(x);
    x.normalize();

    const auto rayleigh = [&](const Vec& y, double& theta) {
        const Vec ay = basis.project(second_form_operator(u, y));
        theta = y.dot(ay);
        return (ay - theta * y).norm();
    };
    const auto bordered_solve = [&](Eigen::SparseLU<SpMat>& lu, const Vec& rhs) {
        Vec full = Vec::Zero(n + 1);
        full.head(n) = rhs;
        return Vec(lu.solve(full).head(n));
    };

    Eigen::SparseLU<SpMat> lu;
    lu.compute(bordered(u, normal, shift));
    if (lu.info() != Eigen::Success) throw NonConvergenceError("bordered factorization failed");

    double theta = 0.0;
    double residual = rayleigh(x, theta);
    std::size_t it = 0;
    // Shifted inverse iteration until the eigenvector is separated enough for
    // Rayleigh-quotient refinement to stay on the lowest eigenvalue.
    const double handover = std::sqrt(tol) * scale;
    for (; it < max_iters && residual > handover; ++it) {
        x = basis.project(bordered_solve(lu, x));
        x.normalize();
        residual = rayleigh(x, theta);
    }
    if (residual > handover) {
        throw NonConvergenceError("tangent eigenvalue iteration stalled (residual " + std::to_string(residual) + ")");
    }
    for (int refine = 0; refine < 8 && residual > tol * scale; ++refine, ++it) {
        Eigen::SparseLU<SpMat> rq;
        rq.compute(bordered(u, normal, theta));
        if (rq.info() != Eigen::Success) break;
        Vec y = basis.project(bordered_solve(rq, x));
        if (!y.allFinite() || y.norm() == 0.0) break;
        y.normalize();
        double theta_y = 0.0;
        const double res_y = rayleigh(y, theta_y);
        if (!(res_y < residual)) break;
        x = std::move(y);
        theta = theta_y;
        residual = res_y;
    }
    // Polishing with the fixed shift once more keeps progress if the
    // refinement stopped early.
    for (; it < max_iters && residual > tol * scale; ++it) {
        x = basis.project(bordered_solve(lu, x));
        x.normalize();
        residual = rayleigh(x, theta);
    }
    if (residual > tol * scale) {
        throw NonConvergenceError("tangent eigenvalue iteration did not converge (residual " +
                                  std::to_string(residual) + ")");
    }
    return EigResult{theta, Field(u.field.domain_ptr(), x / std::sqrt(u.field.domain().weight())), it, residual};
}

SecondFormReport verify_bind_identity(const GroundState& u, std::size_t n_probes, std::uint64_t seed) {
    SecondFormReport report;
    report.p = u.p;
    report.lambda = u.lambda;
    report.mu = u.mu;
    report.state_residual = u.residual;
    report.state_kind = u.kind;
    report.probes = n_probes;
    report.seed = seed;
    if (u.residual > 1e-8) {
        report.warnings.push_back("state residual " + std::to_string(u.residual) +
                                  " exceeds 1e-8; the identity tolerance is not guaranteed");
    }

    const TangentBasis basis(u, Constraint::nehari);
    const Field nl = nonlinearity(u.field, u.p);
    const double lp = norm_lp_pow(u.field, u.p);
    std::vector<double> errors(n_probes, 0.0);
    std::vector<char> consistent(n_probes, 1);
    parallel_for(n_probes, [&](std::size_t k) {
        std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * (k + 1));
        std::normal_distribution<double> gauss;
        Vec raw(u.field.values().size());
        for (auto& value : raw) value = gauss(rng);
        const Field v = basis.project(Field(u.field.domain_ptr(), std::move(raw)));
        const TangentDecomposition dec = decompose_tangent(u, v);
        const double lhs = second_form_value(u, v);
        const double c = inner_l2(nl, dec.phi);
        const double rhs = (u.p - 2.0) * c * c / lp + second_form_value(u, dec.phi);
        errors[k] = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        consistent[k] = dec.alpha_consistent;
    });
    for (std::size_t k = 0; k < n_probes; ++k) {
        report.identity_max_rel_err = std::max(report.identity_max_rel_err, errors[k]);
        report.alpha_consistent = report.alpha_consistent && consistent[k];
    }
    report.identity_ok = n_probes > 0 && report.identity_max_rel_err <= report.identity_tol;
    return report;
}

SecondFormReport second_form_report(const GroundState& u, std::size_t n_probes, std::uint64_t seed) {
    SecondFormReport report = verify_bind_identity(u, n_probes, seed);
    report.min_eig_nehari = extremal_eigs(u, Constraint::nehari, 1e-9, 20000, seed).value;
    report.min_eig_mass = extremal_eigs(u, Constraint::mass, 1e-9, 20000, seed).value;
    report.constant_C1 = constant_c1(u, &report.c1_terms);
    report.eigen_inequality_ok =
        report.min_eig_nehari >= report.min_eig_mass / (1.0 + report.constant_C1) - report.eigen_tol;
    return report;
}

nlohmann::json to_json(const SecondFormReport& r) {
    return nlohmann::json{
        {"schema", "nehari-lab/hessian/v1"},
        {"state",
         {{"kind", to_string(r.state_kind)}, {"p", r.p}, {"lambda", r.lambda}, {"mu", r.mu}, {"residual", r.state_residual}}},
        {"identity",
         {{"probes", r.probes},
          {"seed", r.seed},
          {"max_rel_err", r.identity_max_rel_err},
          {"tolerance", r.identity_tol},
          {"alpha_consistent", r.alpha_consistent},
          {"ok", r.identity_ok}}},
        {"eigen",
         {{"min_eig_nehari", r.min_eig_nehari},
          {"min_eig_mass", r.min_eig_mass},
          {"constant_C1", r.constant_C1},
          {"c1_terms",
           {{"norm_2p_minus_2_pow", r.c1_terms.lp_2p_minus_2},
            {"mass_sq", r.c1_terms.mass_sq},
            {"norm_p_pow", r.c1_terms.lp_pow}}},
          {"bound", r.min_eig_mass / (1.0 + r.constant_C1)},
          {"tolerance", r.eigen_tol},
          {"ok", r.eigen_inequality_ok}}},
        {"warnings", r.warnings},
        {"passed", r.passed()}};
}

}  // namespace nehari
