#include "doctest.h"

#include "nehari/errors.hpp"
#include "nehari/hessian.hpp"
#include "test_support.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace nehari;

namespace {

struct Entry {
    const char* name;
    GroundState state;
};

// Coarse enough for dense oracles (at most 200 unknowns).
const std::vector<Entry>& catalogue() {
    static const std::vector<Entry> entries = [] {
        const SolverConfig cfg;
        const auto line = share(DiscreteDomain::interval(-8.0, 8.0, 150));
        const auto rect = share(DiscreteDomain::rectangle(6.0, 4.0, 15, 11));
        return std::vector<Entry>{
            {"interval p=4 action", solve_action(line, 4.0, 1.0, cfg)},
            {"interval p=3 action", solve_action(line, 3.0, 1.0, cfg)},
            {"interval p=4 energy", solve_energy(line, 4.0, 1.5, cfg)},
            {"rectangle p=3 action", solve_action(rect, 3.0, 1.0, cfg)},
            {"rectangle p=3 energy", solve_energy(rect, 3.0, 0.8, cfg)},
        };
    }();
    return entries;
}

Field unit_probe(const TangentBasis& basis, std::mt19937_64& rng) {
    Field v = basis.project(test::random_field(basis.base().field.domain_ptr(), rng));
    return v * (1.0 / std::sqrt(inner_l2(v, v)));
}

// Second derivative at 0 by central differences with one Richardson step.
template <typename F>
double second_derivative(F&& f, double t) {
    const double f0 = f(0.0);
    const auto d = [&](double s) { return (f(s) - 2.0 * f0 + f(-s)) / (s * s); };
    return (4.0 * d(0.5 * t) - d(t)) / 3.0;
}

double dense_min_eig(const GroundState& u, Constraint c) {
    const TangentBasis basis(u, c);
    const auto n = u.field.values().size();
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index j = 0; j < n; ++j) a.col(j) = second_form_operator(u, Eigen::VectorXd::Unit(n, j));
    const Eigen::MatrixXd normal = basis.normal().values().normalized();
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(normal).householderQ();
    const Eigen::MatrixXd z = q.rightCols(n - 1);
    const Eigen::MatrixXd restricted = z.transpose() * a * z;
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(restricted).eigenvalues()(0);
}

}  // namespace

TEST_CASE("tangent projectors") {
    std::mt19937_64 rng(1);
    for (const auto& e : catalogue()) {
        for (Constraint c : {Constraint::nehari, Constraint::mass}) {
            const TangentBasis basis(e.state, c);
            for (int trial = 0; trial < 5; ++trial) {
                const Field v = test::random_field(e.state.field.domain_ptr(), rng);
                const Field pv = basis.project(v);
                const double n_norm = std::sqrt(inner_l2(basis.normal(), basis.normal()));
                CHECK(std::abs(inner_l2(basis.normal(), pv)) <= 1e-12 * n_norm * std::sqrt(inner_l2(pv, pv)));
                CHECK((basis.project(pv) - pv).values().norm() <= 1e-12 * pv.values().norm());
                CHECK(basis.contains(pv));
                CHECK_FALSE(basis.contains(v));
            }
        }
    }
}

TEST_CASE("second forms: trivial cases and tangency checks") {
    const GroundState& u = catalogue()[0].state;
    const Field zero = Field::zeros(u.field.domain_ptr());
    CHECK(second_form_action(u, zero) == 0.0);
    CHECK(second_form_energy(u, zero) == 0.0);

    std::mt19937_64 rng(2);
    const TangentBasis nehari(u, Constraint::nehari);
    const TangentBasis mass(u, Constraint::mass);
    const Field v = unit_probe(nehari, rng);
    CHECK(second_form_action(u, 2.0 * v) == doctest::Approx(4.0 * second_form_action(u, v)).epsilon(1e-12));
    CHECK_THROWS_AS(second_form_action(u, u.field), InvalidArgumentError);
    CHECK_THROWS_AS(second_form_energy(u, u.field), InvalidArgumentError);
    CHECK_THROWS_AS(second_form_energy(u, v), InvalidArgumentError);

    // A vector orthogonal to both normals is valid for both forms.
    const Field raw = test::random_field(u.field.domain_ptr(), rng);
    Eigen::MatrixXd normals(raw.values().size(), 2);
    normals.col(0) = nehari.normal().values();
    normals.col(1) = mass.normal().values();
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(normals).householderQ();
    const Eigen::MatrixXd basis2 = q.leftCols(2);
    const Field both(u.field.domain_ptr(), raw.values() - basis2 * (basis2.transpose() * raw.values()));
    CHECK(second_form_action(u, both) == doctest::Approx(second_form_energy(u, both)).epsilon(1e-12));
}

TEST_CASE("action second form matches differences along the Nehari curve") {
    std::mt19937_64 rng(3);
    for (const auto& e : catalogue()) {
        const GroundState& u = e.state;
        const ProblemParams params = u.params();
        const TangentBasis basis(u, Constraint::nehari);
        for (int probe = 0; probe < 10; ++probe) {
            const Field v = unit_probe(basis, rng);
            const auto along = [&](double t) {
                const Field w = u.field + t * v;
                return action(sigma(w, params) * w, params);
            };
            const double fd = second_derivative(along, 1e-4);
            const double exact = second_form_action(u, v);
            INFO(e.name);
            CHECK(std::abs(fd - exact) <= 1e-4 * std::abs(exact));
        }
    }
}

TEST_CASE("energy second form matches differences along the mass sphere") {
    std::mt19937_64 rng(4);
    for (const auto& e : catalogue()) {
        const GroundState& u = e.state;
        const ProblemParams params = u.params();
        const TangentBasis basis(u, Constraint::mass);
        for (int probe = 0; probe < 10; ++probe) {
            const Field phi = unit_probe(basis, rng);
            const auto along = [&](double t) {
                const Field w = u.field + t * phi;
                return energy(std::sqrt(2.0 * u.mu / inner_l2(w, w)) * w, params);
            };
            const double fd = second_derivative(along, 1e-4);
            const double exact = second_form_energy(u, phi);
            INFO(e.name);
            CHECK(std::abs(fd - exact) <= 1e-4 * std::abs(exact));
        }
    }
}

TEST_CASE("tangent decomposition") {
    std::mt19937_64 rng(5);
    const GroundState& u = catalogue()[1].state;
    const TangentBasis nehari(u, Constraint::nehari);
    for (int trial = 0; trial < 10; ++trial) {
        const Field v = unit_probe(nehari, rng);
        const TangentDecomposition d = decompose_tangent(u, v);
        CHECK(((d.alpha * u.field + d.phi) - v).values().norm() <= 1e-14 * v.values().norm());
        CHECK(std::abs(inner_l2(d.phi, u.field)) <= 1e-12 * std::sqrt(inner_l2(d.phi, d.phi) * inner_l2(u.field, u.field)));
        CHECK(d.alpha_consistent);
        CHECK(d.alpha != 0.0);
    }
    // Input orthogonal to u: nothing to split off.
    const TangentBasis mass(u, Constraint::mass);
    const Field w = unit_probe(mass, rng);
    const TangentDecomposition d = decompose_tangent(u, w);
    CHECK(std::abs(d.alpha) <= 1e-14);
    CHECK((d.phi - w).values().norm() <= 1e-14 * w.values().norm());

    const GroundState zero_state{Field::zeros(u.field.domain_ptr())};
    CHECK_THROWS_AS(decompose_tangent(zero_state, w), InvalidArgumentError);
}

TEST_CASE("second forms are linked through the decomposition") {
    for (const auto& e : catalogue()) {
        const SecondFormReport r = verify_bind_identity(e.state, 50, 11);
        INFO(e.name);
        CHECK(r.identity_max_rel_err <= 1e-8);
        CHECK(r.identity_ok);
        CHECK(r.alpha_consistent);
        CHECK(r.warnings.empty());
    }
    // On vectors with alpha = 0 the identity reduces to equal forms, and both
    // sides are quadratic.
    const GroundState& u = catalogue()[0].state;
    std::mt19937_64 rng(6);
    const TangentBasis nehari(u, Constraint::nehari);
    const Field v = unit_probe(nehari, rng);
    const TangentDecomposition d = decompose_tangent(u, v);
    const TangentDecomposition d2 = decompose_tangent(u, 2.0 * v);
    CHECK(d2.alpha == doctest::Approx(2.0 * d.alpha));
    CHECK(second_form_value(u, d2.phi) == doctest::Approx(4.0 * second_form_value(u, d.phi)).epsilon(1e-12));
}

TEST_CASE("extremal eigenvalues against a dense oracle") {
    for (const auto& e : catalogue()) {
        INFO(e.name);
        const GroundState& u = e.state;
        for (Constraint c : {Constraint::nehari, Constraint::mass}) {
            const EigResult eig = extremal_eigs(u, c);
            const double oracle = dense_min_eig(u, c);
            CHECK(std::abs(eig.value - oracle) <= 1e-7 * std::max(1.0, std::abs(oracle)));
            CHECK(std::abs(inner_l2(eig.vector, eig.vector) - 1.0) <= 1e-12);
        }
        const SecondFormReport r = second_form_report(u, 10, 3);
        CHECK(r.min_eig_mass >= -1e-6);
        CHECK(r.eigen_inequality_ok);
        CHECK(r.min_eig_nehari >= r.min_eig_mass / (1.0 + r.constant_C1) - 1e-6);
    }
}

TEST_CASE("C1 from independently computed norms") {
    const GroundState& u = catalogue()[3].state;
    NormTerms terms;
    const double c1 = constant_c1(u, &terms);
    const double w = u.field.domain().weight();
    double a = 0.0;
    double m = 0.0;
    double lp = 0.0;
    for (double x : u.field.values()) {
        a += std::pow(std::abs(x), 2.0 * u.p - 2.0);
        m += x * x;
        lp += std::pow(std::abs(x), u.p);
    }
    CHECK(terms.lp_2p_minus_2 == doctest::Approx(w * a).epsilon(1e-13));
    CHECK(terms.mass_sq == doctest::Approx(w * m).epsilon(1e-13));
    CHECK(terms.lp_pow == doctest::Approx(w * lp).epsilon(1e-13));
    CHECK(c1 == doctest::Approx(w * a * w * m / (w * lp * w * lp)).epsilon(1e-12));
    CHECK(c1 >= 0.0);
    // Cauchy-Schwarz: (int |u|^p)^2 <= int |u|^{2p-2} int u^2.
    CHECK(c1 >= 1.0 - 1e-12);
}

TEST_CASE("report serialization and loose states") {
    const GroundState& u = catalogue()[0].state;
    const SecondFormReport r = second_form_report(u, 5, 1);
    const nlohmann::json j = to_json(r);
    CHECK(j["schema"] == "nehari-lab/hessian/v1");
    CHECK(j["passed"] == true);
    CHECK(j["eigen"]["constant_C1"] == r.constant_C1);
    CHECK(to_json(second_form_report(u, 5, 1)).dump() == j.dump());

    SolverConfig loose;
    loose.tol = 1e-2;
    loose.newton_polish = false;
    const GroundState rough = solve_action(u.field.domain_ptr(), 4.0, 1.0, loose);
    if (rough.residual > 1e-8) CHECK_FALSE(verify_bind_identity(rough, 5, 1).warnings.empty());
}
