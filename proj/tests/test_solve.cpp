#include "doctest.h"

#include "nehari/errors.hpp"
#include "nehari/solve.hpp"
#include "test_support.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

using namespace nehari;

namespace {

DomainPtr long_interval() {
    static const DomainPtr d = share(DiscreteDomain::interval(-20.0, 20.0, 2000));
    return d;
}

// Soliton calculus for u'' + u^3 = lambda u on the line (p = 4, N = 1):
// J(lambda) = 4/3 lambda^{3/2}, mu_lambda = 2 sqrt(lambda), E(mu) = -mu^3/12.
double soliton_action(double lambda) { return 4.0 / 3.0 * std::pow(lambda, 1.5); }
double soliton_energy(double mu) { return -mu * mu * mu / 12.0; }

void check_invariants(const GroundState& gs, const SolverConfig& cfg) {
    CHECK(gs.converged);
    CHECK(gs.residual <= cfg.tol);
    CHECK(el_residual(gs.field, gs.params()) == doctest::Approx(gs.residual).epsilon(1e-12));
    CHECK(std::abs(gs.action_value - gs.energy_value - gs.lambda * gs.mu) <= 1e-10 * (1 + std::abs(gs.action_value)));
    Eigen::Index arg = 0;
    gs.field.values().cwiseAbs().maxCoeff(&arg);
    CHECK(gs.field.values()[arg] > 0.0);
}

}  // namespace

TEST_CASE("action ground state on a long interval matches the soliton") {
    const SolverConfig cfg;
    const GroundState gs = solve_action(long_interval(), 4.0, 1.0, cfg);
    check_invariants(gs, cfg);
    CHECK(std::abs(gs.action_value - 4.0 / 3.0) <= 2e-3);
    CHECK(std::abs(gs.mu - 2.0) <= 5e-3);
    CHECK(std::abs(gs.level_from_h - gs.action_value) <= 1e-8 * gs.action_value);

    const GroundState gs4 = solve_action(long_interval(), 4.0, 4.0, cfg);
    check_invariants(gs4, cfg);
    CHECK(std::abs(gs4.action_value - soliton_action(4.0)) <= 0.01 * soliton_action(4.0));
    CHECK(std::abs(gs4.level_from_h - gs4.action_value) <= 1e-8 * gs4.action_value);

    const GroundState gs2 = solve_action(long_interval(), 4.0, 2.0, cfg);
    CHECK(gs.action_value < gs2.action_value);
    CHECK(gs2.action_value < gs4.action_value);
}

TEST_CASE("energy ground state on a long interval matches the soliton") {
    const SolverConfig cfg;
    const GroundState gs = solve_energy(long_interval(), 4.0, 2.0, cfg);
    check_invariants(gs, cfg);
    CHECK(std::abs(gs.energy_value + 2.0 / 3.0) <= 2e-3);
    CHECK(std::abs(gs.lambda - 1.0) <= 2e-2);
    CHECK(gs.mu == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(gs.kind == SolverKind::energy);
}

TEST_CASE("energy level is concave in the mass") {
    const SolverConfig cfg;
    const double e1 = solve_energy(long_interval(), 4.0, 1.0, cfg).energy_value;
    const double e2 = solve_energy(long_interval(), 4.0, 2.0, cfg).energy_value;
    const double e3 = solve_energy(long_interval(), 4.0, 3.0, cfg).energy_value;
    CHECK(e2 >= 0.5 * (e1 + e3) - 1e-8);
    CHECK(std::abs(e3 - soliton_energy(3.0)) <= 0.01 * std::abs(soliton_energy(3.0)));
}

TEST_CASE("critical exponent: divergence above the critical mass") {
    const auto d = long_interval();
    const CriticalData crit = estimate_gn_constant(d, 6.0);
    const SolverConfig cfg;
    CHECK_THROWS_AS(solve_energy(d, 6.0, 1.5 * crit.mu_N, cfg), DivergenceError);
    try {
        solve_energy(d, 6.0, 1.5 * crit.mu_N, cfg);
    } catch (const DivergenceError& e) {
        CHECK(std::string(e.what()).find("critical mass") != std::string::npos);
    }
    const GroundState below = solve_energy(d, 6.0, 0.5 * crit.mu_N, cfg);
    check_invariants(below, cfg);
    CHECK(below.energy_value >= -1e-6);
}

TEST_CASE("supercritical exponent diverges at large mass") {
    const SolverConfig cfg;
    const auto d = share(DiscreteDomain::interval(-10.0, 10.0, 800));
    CHECK_THROWS_AS(solve_energy(d, 8.0, 3.0, cfg), DivergenceError);
    // At small mass on a bounded domain the descent settles in a local
    // minimum of positive energy; the infimum is still -infinity.
    const GroundState local = solve_energy(d, 8.0, 0.5, cfg);
    CHECK(local.energy_value > 0.0);
}

TEST_CASE("below the spectrum the action problem is rejected") {
    const auto d = share(DiscreteDomain::interval(0.0, 1.0, 200));
    SolverConfig cfg;
    CHECK_THROWS_AS(solve_action(d, 4.0, -15.0, cfg), BelowSpectrumError);
    // Just above -lambda_Omega the problem is still well posed.
    const double lo = lambda_omega(*d);
    CHECK_NOTHROW(solve_action(d, 4.0, -0.9 * lo, cfg));
    // A cached spectral bound is honored without factorizing.
    cfg.lambda_omega = 20.0;
    CHECK_THROWS_AS(solve_action(d, 4.0, -20.0, cfg), BelowSpectrumError);
}

TEST_CASE("argument validation") {
    SolverConfig cfg;
    const auto d = share(DiscreteDomain::interval(2.0, 40));
    CHECK_THROWS_AS(solve_energy(d, 4.0, 0.0, cfg), InvalidArgumentError);
    CHECK_THROWS_AS(solve_action(d, 2.0, 1.0, cfg), InvalidArgumentError);
    cfg.n_starts = 0;
    CHECK_THROWS_AS(solve_action(d, 4.0, 1.0, cfg), InvalidArgumentError);
    cfg = SolverConfig{};
    cfg.tol = 0.0;
    CHECK_THROWS_AS(solve_action(d, 4.0, 1.0, cfg), InvalidArgumentError);
    cfg = SolverConfig{};
    const auto other = share(DiscreteDomain::interval(3.0, 40));
    CHECK_THROWS_AS(solve_action(d, 4.0, 1.0, cfg, Field::zeros(other)), DomainMismatchError);
}

TEST_CASE("iteration budget exhaustion is reported as non-convergence") {
    SolverConfig cfg;
    cfg.max_iters = 2;
    cfg.newton_polish = false;
    CHECK_THROWS_AS(solve_action(long_interval(), 4.0, 1.0, cfg), NonConvergenceError);
}

TEST_CASE("backtracking and BB steps reach the same state") {
    SolverConfig bb;
    SolverConfig bt;
    bt.step_rule = StepRule::backtracking;
    const auto d = share(DiscreteDomain::interval(-10.0, 10.0, 600));
    const GroundState a = solve_action(d, 3.0, 1.5, bb);
    const GroundState b = solve_action(d, 3.0, 1.5, bt);
    check_invariants(b, bt);
    CHECK(std::abs(a.action_value - b.action_value) <= 1e-9 * a.action_value);
    CHECK((a.field - b.field).values().norm() <= 1e-6 * a.field.values().norm());
}

TEST_CASE("multi-start is deterministic across thread counts") {
    SolverConfig cfg;
    cfg.n_starts = 5;
    cfg.seed = 42;
    const auto d = share(DiscreteDomain::rectangle(4.0, 3.0, 31, 23));
    setenv("NEHARI_LAB_THREADS", "1", 1);
    const GroundState serial = solve_action(d, 3.0, 1.0, cfg);
    setenv("NEHARI_LAB_THREADS", "4", 1);
    const GroundState threaded = solve_action(d, 3.0, 1.0, cfg);
    const GroundState again = solve_action(d, 3.0, 1.0, cfg);
    unsetenv("NEHARI_LAB_THREADS");
    CHECK(serial.field.values() == threaded.field.values());
    CHECK(threaded.field.values() == again.field.values());
    CHECK(serial.start_index == threaded.start_index);
    CHECK(serial.iterations == threaded.iterations);
    check_invariants(serial, cfg);

    // Distinct starts really are distinct.
    const Field b0 = initial_bump(d, 0, 42);
    const Field b1 = initial_bump(d, 1, 42);
    const Field b1_other_seed = initial_bump(d, 1, 43);
    CHECK(b0.values() != b1.values());
    CHECK(b1.values() != b1_other_seed.values());
    CHECK(b1.values() == initial_bump(d, 1, 42).values());
}

TEST_CASE("functionals are invariant under a global sign flip") {
    const SolverConfig cfg;
    for (SolverKind kind : {SolverKind::action, SolverKind::energy}) {
        const auto d = share(DiscreteDomain::interval(-8.0, 8.0, 400));
        const GroundState gs =
            kind == SolverKind::action ? solve_action(d, 4.0, 1.0, cfg) : solve_energy(d, 4.0, 1.5, cfg);
        const Field flipped = -1.0 * gs.field;
        CHECK(action(flipped, gs.params()) == action(gs.field, gs.params()));
        CHECK(energy(flipped, gs.params()) == energy(gs.field, gs.params()));
        // A sign-flipped warm start returns the same sign-normalized state.
        const GroundState again = kind == SolverKind::action ? solve_action(d, 4.0, 1.0, cfg, flipped)
                                                             : solve_energy(d, 4.0, 1.5, cfg, flipped);
        CHECK((again.field - gs.field).values().norm() <= 1e-6 * gs.field.values().norm());
    }
}

TEST_CASE("energy ground states are action ground states at their multiplier") {
    const SolverConfig cfg;
    for (double mu : {1.0, 2.0, 3.0}) {
        const GroundState e = solve_energy(long_interval(), 4.0, mu, cfg);
        const GroundState a = solve_action(long_interval(), 4.0, e.lambda, cfg);
        CHECK(std::abs(a.mu - mu) <= 1e-2 * mu);
        CHECK(std::abs(a.action_value - e.action_value) <= 1e-3 * std::abs(e.action_value));
        // An action ground state does at least as well as any Nehari point,
        // the energy ground state included.
        CHECK(a.action_value <= e.action_value + 1e-10 * std::abs(e.action_value));
    }
}

TEST_CASE("action levels bound energy levels through the frequency") {
    // J(lambda) - lambda mu >= E(mu) for every pair.
    const SolverConfig cfg;
    const auto d = share(DiscreteDomain::interval(-12.0, 12.0, 1000));
    std::vector<GroundState> actions;
    for (double lambda : {0.3, 0.8, 1.5, 2.5}) actions.push_back(solve_action(d, 4.0, lambda, cfg));
    for (double mu : {0.7, 1.4, 2.1}) {
        const double e = solve_energy(d, 4.0, mu, cfg).energy_value;
        for (const auto& a : actions) CHECK(a.action_value - a.lambda * mu >= e - 1e-9);
    }
}

TEST_CASE("continuation sweeps") {
    const SolverConfig cfg;
    const auto d = long_interval();
    const std::vector<double> lambdas{0.5, 1.0, 1.5};
    const auto up = continuation_sweep(d, SolverKind::action, 4.0, lambdas, cfg);
    REQUIRE(up.size() == 3);
    for (std::size_t i = 0; i < up.size(); ++i) {
        CHECK(up[i].converged);
        CHECK(up[i].parameter == lambdas[i]);
        CHECK(up[i].warm_started == (i > 0));
    }
    CHECK(up[0].state->action_value < up[1].state->action_value);
    CHECK(up[1].state->action_value < up[2].state->action_value);

    const auto down = continuation_sweep(d, SolverKind::action, 4.0, lambdas, cfg, SweepOrder::descending);
    for (std::size_t i = 0; i < down.size(); ++i) {
        CHECK(down[i].parameter == lambdas[i]);
        CHECK(down[i].warm_started == (i < 2));
        CHECK(std::abs(down[i].state->action_value - up[i].state->action_value) <= 1e-9);
    }

    const std::vector<double> single{1.0};
    const auto one = continuation_sweep(d, SolverKind::action, 4.0, single, cfg);
    const GroundState direct = solve_action(d, 4.0, 1.0, cfg);
    CHECK(one[0].state->field.values() == direct.field.values());

    const std::vector<double> mus{1.0, 2.0, 3.0};
    const auto energy = continuation_sweep(d, SolverKind::energy, 4.0, mus, cfg);
    for (std::size_t i = 0; i < 3; ++i) {
        REQUIRE(energy[i].converged);
        CHECK(std::abs(energy[i].state->lambda - mus[i] * mus[i] / 4.0) <= 2e-2 * mus[i] * mus[i] / 4.0);
    }
    CHECK(energy[0].state->energy_value > energy[1].state->energy_value);
    CHECK(energy[1].state->energy_value > energy[2].state->energy_value);
    CHECK(energy[0].state->lambda < energy[1].state->lambda);

    const std::vector<double> unsorted{1.0, 0.5};
    CHECK_THROWS_AS(continuation_sweep(d, SolverKind::action, 4.0, unsorted, cfg), InvalidArgumentError);
}

TEST_CASE("sweep failures are recorded per sample") {
    const SolverConfig cfg;
    const auto d = share(DiscreteDomain::interval(0.0, 1.0, 100));
    const std::vector<double> lambdas{-15.0, 1.0};
    const auto samples = continuation_sweep(d, SolverKind::action, 4.0, lambdas, cfg);
    CHECK_FALSE(samples[0].converged);
    CHECK(samples[0].error == "BelowSpectrum");
    CHECK_FALSE(samples[0].state.has_value());
    CHECK(samples[1].converged);
    CHECK_FALSE(samples[1].warm_started);

    const auto crit_domain = share(DiscreteDomain::interval(-10.0, 10.0, 800));
    const std::vector<double> mus{0.3, 5.0};
    const auto energy = continuation_sweep(crit_domain, SolverKind::energy, 6.0, mus, cfg);
    CHECK(energy[0].converged);
    CHECK(energy[1].error == "Divergence");
}

TEST_CASE("two-dimensional and cylinder domains") {
    const SolverConfig cfg;
    const auto rect = share(DiscreteDomain::rectangle(6.0, 4.0, 47, 31));
    const GroundState a = solve_action(rect, 3.0, 1.0, cfg);
    check_invariants(a, cfg);
    CHECK(std::abs(a.level_from_h - a.action_value) <= 1e-8 * a.action_value);
    const GroundState e = solve_energy(rect, 3.0, a.mu, cfg);
    check_invariants(e, cfg);
    CHECK(std::abs(e.lambda - 1.0) <= 1e-3);

    const auto cyl = share(DiscreteDomain::truncated_cylinder(12.0, 3.0, 95, 23));
    const GroundState c = solve_action(cyl, 3.0, 0.5, cfg);
    check_invariants(c, cfg);
}
