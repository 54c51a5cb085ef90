#include "nehari/solve.hpp"

#include "nehari/errors.hpp"
#include "nehari/parallel.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <sstream>

namespace nehari {

std::string to_string(SolverKind kind) { return kind == SolverKind::action ? "action" : "energy"; }

std::string to_string(StepRule rule) { return rule == StepRule::bb ? "bb" : "backtracking"; }

StepRule step_rule_from_string(const std::string& name) {
    if (name == "bb") return StepRule::bb;
    if (name == "backtracking") return StepRule::backtracking;
    throw InvalidArgumentError("unknown step rule '" + name + "'");
}

void SolverConfig::validate() const {
    if (!(tol > 0.0)) throw InvalidArgumentError("solver tol must be positive");
    if (max_iters < 1) throw InvalidArgumentError("solver max_iters must be at least 1");
    if (n_starts < 1) throw InvalidArgumentError("solver n_starts must be at least 1");
    if (!(divergence_threshold > 0.0)) throw InvalidArgumentError("divergence_threshold must be positive");
    if (!(collapse_fraction > 0.0 && collapse_fraction <= 1.0)) {
        throw InvalidArgumentError("collapse_fraction must lie in (0, 1]");
    }
}

namespace {

using Vec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

// Relative EL residual below which descent hands over to Newton.
constexpr double kNewtonSwitch = 1e-3;
constexpr std::size_t kNewtonMaxSteps = 30;
// Newton steps longer than this fraction of ||u|| are treated as leaving the
// basin (typically a near-null translation mode) and rejected.
constexpr double kNewtonTrustRatio = 0.25;
constexpr std::size_t kNonmonotoneMemory = 8;

double lp_pow(const Vec& v, double p, double w) {
    double acc = 0.0;
    for (double x : v) acc += std::pow(std::abs(x), p);
    return w * acc;
}

Vec pointwise_nonlinearity(const Vec& v, double p) {
    Vec out(v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) out[k] = std::pow(std::abs(v[k]), p - 2.0) * v[k];
    return out;
}

Vec pointwise_potential(const Vec& v, double p) {
    Vec out(v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) out[k] = std::pow(std::abs(v[k]), p - 2.0);
    return out;
}

SpMat shifted_negative_laplacian(const DiscreteDomain& domain, double shift) {
    SpMat m = negative_laplacian_matrix(domain);
    m.diagonal().array() += shift;
    return m;
}

void sign_normalize(Vec& u) {
    Eigen::Index arg = 0;
    u.cwiseAbs().maxCoeff(&arg);
    if (u[arg] < 0.0) u = -u;
}

std::uint64_t mix_seed(std::uint64_t seed, std::size_t index) {
    return seed ^ (0x9E3779B97F4A7C15ULL * (index + 1));
}

struct StartOutcome {
    std::optional<Vec> field;
    std::size_t iterations = 0;
    bool converged = false;
    double residual = std::numeric_limits<double>::infinity();
    std::string error;  // "Divergence" or "NonConvergence" when no usable field
    std::string message;
};

std::string regime_message(std::size_t dim, double p, double mu) {
    std::ostringstream os;
    const double p_crit = critical_exponent(dim);
    os << "energy descent diverged at mu=" << mu << " (p=" << p << ", N=" << dim << ", L2-critical exponent "
       << p_crit << "): ";
    if (p > p_crit) {
        os << "L2-supercritical exponent, the energy level is -infinity for every mass";
    } else if (p == p_crit) {
        os << "L2-critical exponent, the energy level is -infinity above the critical mass mu_N";
    } else {
        os << "unexpected blow-up for a subcritical exponent; raise divergence_threshold or refine the grid";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Action side: minimize h(v) = <(-Delta + lambda) v, v> on ||v||_p = 1.
// ---------------------------------------------------------------------------

class ActionDescent {
public:
    ActionDescent(const DomainPtr& domain, double p, const SolverConfig& cfg, const SpMat& op,
                  const Eigen::SimplicialLDLT<SpMat>& precond)
        : p_(p), cfg_(cfg), op_(op), precond_(precond), w_(domain->weight()) {}

    StartOutcome run(Vec v) const {
        StartOutcome out;
        normalize(v);
        State s = evaluate(v);
        double tau = 0.25;
        std::deque<double> recent{s.h};
        std::optional<State> previous;
        bool newton_allowed = cfg_.newton_polish;

        for (std::size_t it = 0; it < cfg_.max_iters; ++it) {
            out.iterations = it;
            const double sig = std::pow(s.h, 1.0 / (p_ - 2.0));
            const double residual = 0.5 * sig * std::sqrt(w_) * s.grad.norm();
            const double scale = 0.5 * sig * std::sqrt(w_) * s.av.norm();
            if (!std::isfinite(residual)) break;
            if (residual <= cfg_.tol && !newton_allowed) {
                out.field = sig * s.v;
                out.converged = true;
                out.residual = residual;
                return out;
            }
            if (newton_allowed && residual <= kNewtonSwitch * scale) {
                Vec u = sig * s.v;
                std::size_t newton_steps = 0;
                double newton_residual = 0.0;
                if (newton(u, newton_steps, newton_residual)) {
                    out.iterations = it + newton_steps;
                    out.field = std::move(u);
                    out.residual = newton_residual;
                    out.converged = newton_residual <= cfg_.tol;
                    if (out.converged) return out;
                }
                newton_allowed = false;
                if (residual <= cfg_.tol) {
                    out.field = sig * s.v;
                    out.converged = true;
                    out.residual = residual;
                    return out;
                }
            }

            const double slope = w_ * s.grad.dot(s.dir);
            if (cfg_.step_rule == StepRule::bb && previous) {
                const Vec step = s.v - previous->v;
                const double sy = w_ * step.dot(s.grad - previous->grad);
                const double sas = w_ * step.dot(op_ * step);
                if (sy > 0.0 && sas > 0.0) tau = std::clamp(sas / sy, 1e-8, 1e8);
            }
            const double reference =
                cfg_.step_rule == StepRule::bb ? *std::max_element(recent.begin(), recent.end()) : s.h;
            bool accepted = false;
            for (int attempt = 0; attempt < 60; ++attempt) {
                Vec trial = s.v - tau * s.dir;
                normalize(trial);
                const double h_trial = w_ * trial.dot(op_ * trial);
                if (h_trial <= reference - 1e-4 * tau * slope) {
                    previous = std::move(s);
                    s = evaluate(std::move(trial));
                    accepted = true;
                    break;
                }
                tau *= 0.5;
            }
            if (!accepted) {
                // Line search stalled at working precision.
                out.field = sig * s.v;
                out.residual = residual;
                out.converged = residual <= cfg_.tol;
                return out;
            }
            if (cfg_.step_rule == StepRule::backtracking) tau *= 2.0;
            recent.push_back(s.h);
            if (recent.size() > kNonmonotoneMemory) recent.pop_front();
        }
        out.iterations = cfg_.max_iters;
        const double sig = std::pow(s.h, 1.0 / (p_ - 2.0));
        out.field = sig * s.v;
        out.residual = 0.5 * sig * std::sqrt(w_) * s.grad.norm();
        out.converged = out.residual <= cfg_.tol;
        return out;
    }

private:
    struct State {
        Vec v;
        Vec av;
        double h = 0.0;
        Vec grad;  // L^2 gradient of h(v)/||v||_p^2 at ||v||_p = 1
        Vec dir;   // preconditioned gradient
    };

    void normalize(Vec& v) const { v /= std::pow(lp_pow(v, p_, w_), 1.0 / p_); }

    State evaluate(Vec v) const {
        State s;
        s.av = op_ * v;
        s.h = w_ * v.dot(s.av);
        s.grad = 2.0 * (s.av - s.h * pointwise_nonlinearity(v, p_));
        s.dir = precond_.solve(s.grad);
        s.v = std::move(v);
        return s;
    }

    double action_of(const Vec& u) const {
        return 0.5 * w_ * u.dot(op_ * u) - lp_pow(u, p_, w_) / p_;
    }

    // Newton on -Delta u + lambda u - |u|^{p-2}u = 0. Returns false (leaving u
    // untouched) when a step leaves the trust region or raises the action.
    bool newton(Vec& u, std::size_t& steps, double& residual) const {
        const double start_action = action_of(u);
        Vec x = u;
        Vec f = op_ * x - pointwise_nonlinearity(x, p_);
        double res = std::sqrt(w_) * f.norm();
        for (steps = 0; steps < kNewtonMaxSteps; ++steps) {
            SpMat jac = op_;
            jac.diagonal() -= (p_ - 1.0) * pointwise_potential(x, p_);
            Eigen::SparseLU<SpMat> lu;
            lu.compute(jac);
            if (lu.info() != Eigen::Success) return false;
            const Vec delta = lu.solve(-f);
            if (!delta.allFinite() || delta.norm() > kNewtonTrustRatio * x.norm()) return false;
            const Vec x_next = x + delta;
            const Vec f_next = op_ * x_next - pointwise_nonlinearity(x_next, p_);
            const double res_next = std::sqrt(w_) * f_next.norm();
            if (!(res_next < res)) break;
            x = x_next;
            f = f_next;
            res = res_next;
        }
        if (action_of(x) > start_action + 1e-8 * std::abs(start_action)) return false;
        u = std::move(x);
        residual = res;
        return true;
    }

    double p_;
    const SolverConfig& cfg_;
    const SpMat& op_;
    const Eigen::SimplicialLDLT<SpMat>& precond_;
    double w_;
};

// ---------------------------------------------------------------------------
// Energy side: minimize E on the sphere 1/2 ||u||^2 = mu.
// ---------------------------------------------------------------------------

class EnergyDescent {
public:
    EnergyDescent(const DomainPtr& domain, double p, double mu, const SolverConfig& cfg)
        : domain_(domain),
          p_(p),
          mu_(mu),
          cfg_(cfg),
          w_(domain->weight()),
          neg_lap_(negative_laplacian_matrix(*domain)),
          // Concentration at the grid scale only signals an unbounded energy for
          // critical and supercritical exponents; coarse subcritical grids can
          // have well-resolved minimizers with a large Rayleigh quotient.
          grid_ceiling_(p >= critical_exponent(domain->dim()) ? domain->max_eigenvalue_bound()
                                                              : std::numeric_limits<double>::infinity()) {}

    StartOutcome run(Vec u) const {
        StartOutcome out;
        rescale(u);
        double shift = std::max(multiplier(u), 0.0);
        Eigen::SimplicialLDLT<SpMat> precond(shifted_negative_laplacian(*domain_, shift));
        std::size_t last_refactor = 0;

        State s = evaluate(std::move(u), precond);
        double tau = 1.0;
        std::deque<double> recent{s.energy};
        std::optional<State> previous;
        bool newton_allowed = cfg_.newton_polish;

        for (std::size_t it = 0; it < cfg_.max_iters; ++it) {
            out.iterations = it;
            if (!s.v.allFinite() || s.grad_sq > cfg_.divergence_threshold ||
                s.grad_sq / s.mass_sq > cfg_.collapse_fraction * grid_ceiling_) {
                out.error = "Divergence";
                out.message = regime_message(domain_->dim(), p_, mu_);
                return out;
            }
            const double scale = std::sqrt(w_) * s.lap.norm() + 1e-300;
            if (s.residual <= cfg_.tol && !newton_allowed) {
                out.field = s.v;
                out.converged = true;
                out.residual = s.residual;
                return out;
            }
            if (newton_allowed && s.residual <= kNewtonSwitch * scale) {
                Vec x = s.v;
                std::size_t steps = 0;
                double residual = 0.0;
                if (newton(x, s.lambda, steps, residual)) {
                    out.iterations = it + steps;
                    out.field = std::move(x);
                    out.residual = residual;
                    out.converged = residual <= cfg_.tol;
                    if (out.converged) return out;
                }
                newton_allowed = false;
                if (s.residual <= cfg_.tol) {
                    out.field = s.v;
                    out.converged = true;
                    out.residual = s.residual;
                    return out;
                }
            }

            // Keep the preconditioner shift near the current multiplier.
            const double wanted = std::max(s.lambda, 0.0);
            if (it - last_refactor >= 50 && std::abs(wanted - shift) > 0.25 * std::max(shift, 1e-2)) {
                shift = wanted;
                precond.compute(shifted_negative_laplacian(*domain_, shift));
                s = evaluate(std::move(s.v), precond);
                previous.reset();
                last_refactor = it;
            }

            const double slope = w_ * s.projected.dot(s.dir);
            if (cfg_.step_rule == StepRule::bb && previous) {
                const Vec step = s.v - previous->v;
                const double sy = w_ * step.dot(s.projected - previous->projected);
                const Vec metric_step = neg_lap_ * step + shift * step;
                const double sms = w_ * step.dot(metric_step);
                if (sy > 0.0 && sms > 0.0) tau = std::clamp(sms / sy, 1e-8, 1e8);
            }
            const double reference =
                cfg_.step_rule == StepRule::bb ? *std::max_element(recent.begin(), recent.end()) : s.energy;
            bool accepted = false;
            for (int attempt = 0; attempt < 60; ++attempt) {
                Vec trial = s.v - tau * s.dir;
                rescale(trial);
                const double e_trial = energy_of(trial);
                if (e_trial <= reference - 1e-4 * tau * slope) {
                    previous = std::move(s);
                    s = evaluate(std::move(trial), precond);
                    accepted = true;
                    break;
                }
                tau *= 0.5;
            }
            if (!accepted) {
                out.field = s.v;
                out.residual = s.residual;
                out.converged = s.residual <= cfg_.tol;
                return out;
            }
            if (cfg_.step_rule == StepRule::backtracking) tau *= 2.0;
            recent.push_back(s.energy);
            if (recent.size() > kNonmonotoneMemory) recent.pop_front();
        }
        out.iterations = cfg_.max_iters;
        out.field = s.v;
        out.residual = s.residual;
        out.converged = s.residual <= cfg_.tol;
        return out;
    }

private:
    struct State {
        Vec v;
        Vec lap;  // -Delta v
        double grad_sq = 0.0;
        double mass_sq = 0.0;
        double energy = 0.0;
        double lambda = 0.0;
        double residual = 0.0;
        Vec projected;  // energy gradient minus its preconditioned normal part
        Vec dir;        // preconditioned projected gradient, L^2-orthogonal to v
    };

    void rescale(Vec& u) const { u *= std::sqrt(2.0 * mu_ / (w_ * u.squaredNorm())); }

    double multiplier(const Vec& u) const {
        const double g = w_ * u.dot(neg_lap_ * u);
        return (lp_pow(u, p_, w_) - g) / (w_ * u.squaredNorm());
    }

    double energy_of(const Vec& u) const { return 0.5 * w_ * u.dot(neg_lap_ * u) - lp_pow(u, p_, w_) / p_; }

    State evaluate(Vec v, const Eigen::SimplicialLDLT<SpMat>& precond) const {
        State s;
        s.lap = neg_lap_ * v;
        s.grad_sq = w_ * v.dot(s.lap);
        s.mass_sq = w_ * v.squaredNorm();
        const double lp = lp_pow(v, p_, w_);
        s.energy = 0.5 * s.grad_sq - lp / p_;
        s.lambda = (lp - s.grad_sq) / s.mass_sq;
        const Vec grad = s.lap - pointwise_nonlinearity(v, p_);
        s.residual = std::sqrt(w_) * (grad + s.lambda * v).norm();
        const Vec pg = precond.solve(grad);
        const Vec pu = precond.solve(v);
        const double beta = v.dot(pg) / v.dot(pu);
        s.dir = pg - beta * pu;
        s.projected = grad - beta * v;
        s.v = std::move(v);
        return s;
    }

    // Newton on the bordered system for (u, lambda):
    //   -Delta u + lambda u - |u|^{p-2}u = 0,  1/2 ||u||^2 = mu.
    bool newton(Vec& u, double lambda, std::size_t& steps, double& residual) const {
        const double start_energy = energy_of(u);
        const auto n = u.size();
        Vec x = u;
        double lam = lambda;
        const auto eval = [&](const Vec& y, double l, Vec& f, double& g) {
            f = neg_lap_ * y + l * y - pointwise_nonlinearity(y, p_);
            g = 0.5 * w_ * y.squaredNorm() - mu_;
        };
        Vec f;
        double g = 0.0;
        eval(x, lam, f, g);
        double res = std::sqrt(w_) * f.norm();
        for (steps = 0; steps < kNewtonMaxSteps; ++steps) {
            std::vector<Eigen::Triplet<double>> triplets;
            triplets.reserve(static_cast<std::size_t>(neg_lap_.nonZeros() + 3 * n));
            const Vec pot = pointwise_potential(x, p_);
            for (int col = 0; col < neg_lap_.outerSize(); ++col) {
                for (SpMat::InnerIterator entry(neg_lap_, col); entry; ++entry) {
                    triplets.emplace_back(static_cast<int>(entry.row()), col, entry.value());
                }
            }
            for (Eigen::Index k = 0; k < n; ++k) {
                const int i = static_cast<int>(k);
                triplets.emplace_back(i, i, lam - (p_ - 1.0) * pot[k]);
                triplets.emplace_back(i, static_cast<int>(n), x[k]);
                triplets.emplace_back(static_cast<int>(n), i, w_ * x[k]);
            }
            SpMat jac(n + 1, n + 1);
            jac.setFromTriplets(triplets.begin(), triplets.end());
            Eigen::SparseLU<SpMat> lu;
            lu.compute(jac);
            if (lu.info() != Eigen::Success) return false;
            Vec rhs(n + 1);
            rhs.head(n) = -f;
            rhs[n] = -g;
            const Vec delta = lu.solve(rhs);
            if (!delta.allFinite() || delta.head(n).norm() > kNewtonTrustRatio * x.norm()) return false;
            const Vec x_next = x + delta.head(n);
            const double lam_next = lam + delta[n];
            Vec f_next;
            double g_next = 0.0;
            eval(x_next, lam_next, f_next, g_next);
            const double res_next = std::sqrt(w_) * f_next.norm();
            if (!(res_next < res)) break;
            x = x_next;
            lam = lam_next;
            f = std::move(f_next);
            g = g_next;
            res = res_next;
        }
        rescale(x);
        if (energy_of(x) > start_energy + 1e-8 * std::abs(start_energy)) return false;
        const Vec final_f = neg_lap_ * x + multiplier(x) * x - pointwise_nonlinearity(x, p_);
        u = std::move(x);
        residual = std::sqrt(w_) * final_f.norm();
        return true;
    }

    const DomainPtr& domain_;
    double p_;
    double mu_;
    const SolverConfig& cfg_;
    double w_;
    SpMat neg_lap_;
    double grid_ceiling_;
};

GroundState package(const DomainPtr& domain, double p, double lambda, SolverKind kind, Vec u,
                    const StartOutcome& outcome, std::size_t start_index) {
    sign_normalize(u);
    Field field(domain, std::move(u));
    if (kind == SolverKind::action) {
        // Newton lands on the Nehari set only up to the residual; project exactly.
        field = sigma(field, ProblemParams{p, lambda}) * field;
    }
    const FieldNorms n = compute_norms(field, p);
    if (kind == SolverKind::energy) lambda = multiplier_from_norms(n);
    const ProblemParams params{p, lambda, 0.5 * n.mass_sq};
    GroundState gs{field};
    gs.p = p;
    gs.lambda = lambda;
    gs.mu = 0.5 * n.mass_sq;
    gs.action_value = action_from_norms(n, params);
    gs.energy_value = energy_from_norms(n, params);
    gs.residual = el_residual(field, params);
    gs.kind = kind;
    gs.iterations = outcome.iterations;
    gs.start_index = start_index;
    const double h_value = (n.grad_sq + lambda * n.mass_sq) / std::pow(n.lp_pow, 2.0 / p);
    gs.level_from_h = h_value > 0.0 ? params.kappa() * std::pow(h_value, p / (p - 2.0)) : 0.0;
    return gs;
}

template <typename RunStart>
GroundState best_of_starts(const DomainPtr& domain, double p, double lambda, SolverKind kind,
                           const SolverConfig& cfg, const std::optional<Field>& initial, RunStart&& run_start) {
    const std::size_t starts = initial ? 1 : cfg.n_starts;
    std::vector<StartOutcome> outcomes(starts);
    parallel_for(starts, [&](std::size_t k) {
        Vec init = initial ? initial->values() : initial_bump(domain, k, cfg.seed).values();
        outcomes[k] = run_start(std::move(init));
    });

    std::optional<GroundState> best;
    double best_value = std::numeric_limits<double>::infinity();
    std::optional<GroundState> fallback;
    for (std::size_t k = 0; k < starts; ++k) {
        const StartOutcome& o = outcomes[k];
        if (!o.field) continue;
        GroundState gs = package(domain, p, lambda, kind, *o.field, o, k);
        gs.converged = gs.residual <= cfg.tol;
        if (!gs.converged) {
            if (!fallback || gs.residual < fallback->residual) fallback = std::move(gs);
            continue;
        }
        const double value = kind == SolverKind::action ? gs.action_value : gs.energy_value;
        if (!best || value < best_value - 1e-12 * std::max(1.0, std::abs(best_value))) {
            best_value = value;
            best = std::move(gs);
        }
    }
    if (best) return *best;

    for (const auto& o : outcomes) {
        if (o.error == "Divergence") throw DivergenceError(o.message);
    }
    std::ostringstream os;
    os << to_string(kind) << " solver did not reach tol=" << cfg.tol;
    if (fallback) os << " (best residual " << fallback->residual << " after " << fallback->iterations << " iterations)";
    throw NonConvergenceError(os.str());
}

}  // namespace

Field initial_bump(const DomainPtr& domain, std::size_t start_index, std::uint64_t seed) {
    std::vector<double> center = domain->barycenter();
    double width = domain->min_extent() / 6.0;
    if (start_index > 0) {
        std::mt19937_64 rng(mix_seed(seed, start_index));
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        for (std::size_t a = 0; a < center.size(); ++a) center[a] += unit(rng) * domain->extents()[a] / 6.0;
        width *= 1.0 + 0.5 * unit(rng);
    }
    return Field::sample(domain, [&](auto x) {
        double r2 = 0.0;
        for (std::size_t a = 0; a < x.size(); ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
        return std::exp(-0.5 * r2 / (width * width));
    });
}

GroundState solve_action(const DomainPtr& domain, double p, double lambda, const SolverConfig& cfg,
                         const std::optional<Field>& initial) {
    ProblemParams{p, lambda}.validate();
    cfg.validate();
    if (initial && initial->domain() != *domain) throw DomainMismatchError("initial guess lives on another domain");
    if (cfg.lambda_omega && lambda <= -*cfg.lambda_omega) {
        throw BelowSpectrumError("lambda=" + std::to_string(lambda) + " <= -lambda_Omega=" +
                                 std::to_string(-*cfg.lambda_omega) + ": no action ground state");
    }

    const SpMat op = shifted_negative_laplacian(*domain, lambda);
    Eigen::SimplicialLDLT<SpMat> precond(op);
    // LDL^T is a congruence, so -Delta_h + lambda is positive definite exactly
    // when every pivot is positive (lambda > -lambda_Omega at the discrete level).
    if (precond.info() != Eigen::Success || (precond.vectorD().array() <= 0.0).any()) {
        throw BelowSpectrumError("lambda=" + std::to_string(lambda) +
                                 " is at or below -lambda_Omega of the discrete Laplacian: no action ground state");
    }

    const ActionDescent descent(domain, p, cfg, op, precond);
    return best_of_starts(domain, p, lambda, SolverKind::action, cfg, initial,
                          [&](Vec init) { return descent.run(std::move(init)); });
}

GroundState solve_energy(const DomainPtr& domain, double p, double mu, const SolverConfig& cfg,
                         const std::optional<Field>& initial) {
    ProblemParams{p, 0.0, mu}.validate();
    cfg.validate();
    if (!(mu > 0.0)) throw InvalidArgumentError("energy ground states need mu > 0");
    if (initial && initial->domain() != *domain) throw DomainMismatchError("initial guess lives on another domain");

    const EnergyDescent descent(domain, p, mu, cfg);
    return best_of_starts(domain, p, 0.0, SolverKind::energy, cfg, initial,
                          [&](Vec init) { return descent.run(std::move(init)); });
}

std::vector<SweepSample> continuation_sweep(const DomainPtr& domain, SolverKind kind, double p,
                                            std::span<const double> grid, const SolverConfig& cfg,
                                            SweepOrder order) {
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw InvalidArgumentError("sweep grid must be strictly increasing");
    }
    std::vector<SweepSample> samples(grid.size());
    std::optional<Field> warm;
    const auto solve_one = [&](double value, const std::optional<Field>& init) {
        return kind == SolverKind::action ? solve_action(domain, p, value, cfg, init)
                                          : solve_energy(domain, p, value, cfg, init);
    };

    for (std::size_t step = 0; step < grid.size(); ++step) {
        const std::size_t i = order == SweepOrder::ascending ? step : grid.size() - 1 - step;
        SweepSample& sample = samples[i];
        sample.parameter = grid[i];
        if (warm) {
            try {
                sample.state = solve_one(grid[i], warm);
                sample.warm_started = true;
            } catch (const Error&) {
                sample.state.reset();
            }
        }
        if (!sample.state) {
            try {
                sample.state = solve_one(grid[i], std::nullopt);
                sample.cold_fallback = warm.has_value();
            } catch (const BelowSpectrumError& e) {
                sample.error = "BelowSpectrum";
                sample.message = e.what();
            } catch (const DivergenceError& e) {
                sample.error = "Divergence";
                sample.message = e.what();
            } catch (const NonConvergenceError& e) {
                sample.error = "NonConvergence";
                sample.message = e.what();
            } catch (const Error& e) {
                sample.error = "Error";
                sample.message = e.what();
            }
        }
        sample.converged = sample.state && sample.state->converged;
        if (sample.converged) warm = sample.state->field;
    }
    return samples;
}

}  // namespace nehari
