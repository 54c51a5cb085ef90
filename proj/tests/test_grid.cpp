#include "doctest.h"

#include "nehari/errors.hpp"
#include "nehari/grid.hpp"
#include "test_support.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace nehari;
using std::numbers::pi;

TEST_CASE("domain construction enforces its invariants") {
    CHECK_THROWS_AS(DiscreteDomain::interval(0.0, 10), InvalidArgumentError);
    CHECK_THROWS_AS(DiscreteDomain::interval(1.0, 2), InvalidArgumentError);
    CHECK_THROWS_AS(DiscreteDomain(DomainKind::rectangle, {1.0}, {5}), InvalidArgumentError);

    const auto d = DiscreteDomain::rectangle(3.0, 2.0, 5, 3);
    CHECK(d.spacing()[0] == 3.0 / 6.0);
    CHECK(d.spacing()[1] == 2.0 / 4.0);
    CHECK(d.size() == 15);
    CHECK(d.weight() == doctest::Approx(0.25));
    // Boundary neighbors are reported as missing.
    CHECK(d.neighbor(0, 0, false) == -1);
    CHECK(d.neighbor(0, 1, false) == -1);
    CHECK(d.neighbor(0, 0, true) == 1);
    CHECK(d.neighbor(0, 1, true) == 5);

    const auto cyl = DiscreteDomain::truncated_cylinder(40.0, pi, 50, 10);
    CHECK(cyl.describe().find("truncation") != std::string::npos);
}

TEST_CASE("dumbbell mask keeps two squares and a channel") {
    const auto d = DiscreteDomain::dumbbell(2.0, 2.0, 0.5, 0.1);
    CHECK(d.masked());
    CHECK(d.kind() == DomainKind::rectangle);
    const auto full = DiscreteDomain::rectangle(6.0, 2.0, d.resolution()[0], d.resolution()[1]);
    CHECK(d.size() < full.size());
    CHECK(d.size() > 2 * 19 * 19);
}

TEST_CASE("laplacian stencil arithmetic") {
    const auto d = share(DiscreteDomain::interval(0.0, 4.0, 3));
    REQUIRE(d->spacing()[0] == 1.0);
    const Field u(d, Eigen::Vector3d(0.0, 1.0, 0.0));
    const Field lap = laplacian_apply(*d, u);
    CHECK(lap[0] == 1.0);
    CHECK(lap[1] == -2.0);
    CHECK(lap[2] == 1.0);

    const Field zero = Field::zeros(d);
    CHECK(laplacian_apply(*d, zero).values().norm() == 0.0);
}

TEST_CASE("laplacian of the first sine mode is second-order accurate") {
    const double length = 3.0;
    const double k2 = (pi / length) * (pi / length);
    double previous = 0.0;
    for (std::size_t n : {49u, 99u, 199u}) {
        const auto d = share(DiscreteDomain::interval(0.0, length, n));
        const Field u = Field::sample(d, [&](auto x) { return std::sin(pi * x[0] / length); });
        const Field lap = laplacian_apply(*d, u);
        const double err = (lap.values() + k2 * u.values()).lpNorm<Eigen::Infinity>();
        const double h = d->spacing()[0];
        // Leading truncation term: k^4 h^2 / 12.
        CHECK(err <= 1.01 * k2 * k2 * h * h / 12.0);
        if (previous > 0.0) CHECK(previous / err == doctest::Approx(4.0).epsilon(0.02));
        previous = err;
    }
}

TEST_CASE("laplacian rejects fields from another domain") {
    const auto a = share(DiscreteDomain::interval(1.0, 10));
    const auto b = share(DiscreteDomain::interval(1.0, 11));
    CHECK_THROWS_AS(laplacian_apply(*a, Field::zeros(b)), DomainMismatchError);
    CHECK_THROWS_AS(inner_l2(Field::zeros(a), Field::zeros(b)), DomainMismatchError);
}

TEST_CASE("inner product quadrature") {
    const std::size_t n = 63;
    const auto d = share(DiscreteDomain::interval(0.0, 1.0, n));
    const Field one = Field::constant(d, 1.0);
    CHECK(inner_l2(one, one) == doctest::Approx(static_cast<double>(n) / (n + 1)).epsilon(1e-15));
    CHECK(inner_l2(Field::zeros(d), one) == 0.0);

    // Orthogonality of the first two discrete sine modes, checked against a
    // long-double direct summation.
    const Field s1 = Field::sample(d, [](auto x) { return std::sin(pi * x[0]); });
    const Field s2 = Field::sample(d, [](auto x) { return std::sin(2 * pi * x[0]); });
    long double direct = 0.0L;
    for (std::size_t j = 1; j <= n; ++j) {
        const long double t = static_cast<long double>(j) / (n + 1);
        direct += std::sin(std::numbers::pi_v<long double> * t) *
                  std::sin(2 * std::numbers::pi_v<long double> * t);
    }
    CHECK(std::abs(static_cast<double>(direct / (n + 1))) <= 1e-12);
    CHECK(std::abs(inner_l2(s1, s2)) <= 1e-12);
}

TEST_CASE("L^p norms") {
    const std::size_t n = 99;
    const auto d = share(DiscreteDomain::interval(0.0, 1.0, n));
    const Field one = Field::constant(d, 1.0);
    CHECK(norm_lp(one, 4.0) == doctest::Approx(std::pow(static_cast<double>(n) / (n + 1), 0.25)).epsilon(1e-15));
    CHECK_THROWS_AS(norm_lp(one, 0.5), InvalidArgumentError);

    std::mt19937_64 rng(7);
    const Field u = test::random_field(d, rng);
    for (double p : {1.0, 2.5, 4.0, 6.0}) {
        CHECK(norm_lp(3.0 * u, p) == doctest::Approx(3.0 * norm_lp(u, p)).epsilon(1e-14));
    }

    // int (sqrt2 sech)^4 = 4 * 4/3 on the real line; truncation to [-20,20] is
    // far below the tolerance.
    const auto wide = share(DiscreteDomain::interval(-20.0, 20.0, 8000));
    const Field soliton = Field::sample(wide, [](auto x) { return std::sqrt(2.0) / std::cosh(x[0]); });
    const double oracle = test::simpson([](double x) { return 4.0 / std::pow(std::cosh(x), 4); }, -20.0, 20.0, 20000);
    CHECK(oracle == doctest::Approx(16.0 / 3.0).epsilon(1e-10));
    CHECK(std::abs(norm_lp_pow(soliton, 4.0) - 16.0 / 3.0) <= 1e-4);
}

TEST_CASE("laplacian is symmetric and bounded by the discrete Poincare constant") {
    std::mt19937_64 rng(11);
    const auto domains = {share(DiscreteDomain::interval(5.0, 40)),
                          share(DiscreteDomain::rectangle(2.0, 3.0, 12, 17)),
                          share(DiscreteDomain::dumbbell(1.0, 1.0, 0.3, 0.1))};
    for (const auto& d : domains) {
        const double lam = lambda_omega(*d, 1e-11);
        for (int trial = 0; trial < 20; ++trial) {
            const Field u = test::random_field(d, rng);
            const Field v = test::random_field(d, rng);
            const double uv = inner_l2(laplacian_apply(*d, u), v);
            const double vu = inner_l2(u, laplacian_apply(*d, v));
            CHECK(std::abs(uv - vu) <= 1e-10 * std::sqrt(inner_l2(u, u) * inner_l2(v, v)));
            CHECK(grad_sq(u) >= lam * inner_l2(u, u) * (1.0 - 1e-12));
        }
    }
}

TEST_CASE("lambda_omega on boxes") {
    SUBCASE("interval of length pi") {
        const auto d = DiscreteDomain::interval(0.0, pi, 200);
        const double h = d.spacing()[0];
        CHECK(std::abs(lambda_omega(d) - 1.0) <= h * h / 12.0 * 1.01);
        CHECK(lambda_omega(d) == doctest::Approx(lambda_omega_exact(d)).epsilon(1e-12));
    }
    SUBCASE("square of side pi") {
        const auto d = DiscreteDomain::rectangle({0.0, 0.0}, {pi, pi}, 40, 40);
        const double h = d.spacing()[0];
        CHECK(std::abs(lambda_omega(d) - 2.0) <= 2.0 * h * h / 12.0 * 1.01);
    }
    SUBCASE("long truncated cylinder approaches the cross-section eigenvalue") {
        const auto d = DiscreteDomain::truncated_cylinder(40.0, pi, 399, 15);
        const double expected = 1.0 + (pi / 40.0) * (pi / 40.0);
        const double h = d.spacing()[1];
        const double lam = lambda_omega(d);
        CHECK(std::abs(lam - expected) <= h * h / 12.0 * 1.05);
        CHECK(lam == doctest::Approx(lambda_omega_exact(d)).epsilon(1e-11));
        const auto longer = DiscreteDomain::truncated_cylinder(80.0, pi, 799, 15);
        CHECK(lambda_omega(longer) < lam);
    }
    CHECK_THROWS_AS(lambda_omega(DiscreteDomain::interval(1.0, 5), 0.0), InvalidArgumentError);
}

TEST_CASE("lambda_omega converges at second order") {
    const double length = 2.0;
    std::vector<double> errors;
    for (std::size_t n : {19u, 39u, 79u}) {
        errors.push_back(std::abs(lambda_omega(DiscreteDomain::interval(0.0, length, n), 1e-12) -
                                  (pi / length) * (pi / length)));
    }
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        const double order = std::log2(errors[i] / errors[i + 1]);
        CHECK(order >= 1.8);
        CHECK(order <= 2.2);
    }
}
