#include "nehari/cli.hpp"

#include "nehari/config.hpp"
#include "nehari/errors.hpp"
#include "nehari/functional.hpp"
#include "nehari/hessian.hpp"
#include "nehari/io.hpp"
#include "nehari/levels.hpp"
#include "nehari/solve.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>

namespace nehari {

namespace {

namespace fs = std::filesystem;

void row(std::ostream& out, const std::string& label, const std::string& value) {
    out << std::left << std::setw(22) << label << value << '\n';
}

void row(std::ostream& out, const std::string& label, double value) { row(out, label, format_double(value)); }

std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

SolverKind parse_kind(const CommandArgs& args, const char* command, bool optional) {
    if (args.positional.empty()) {
        if (optional) return SolverKind::action;
        throw ConfigError(std::string(command) + " needs 'action' or 'energy'");
    }
    if (args.positional.size() > 1) throw ConfigError("unexpected argument '" + args.positional[1] + "'");
    const std::string& k = args.positional.front();
    if (k == "action") return SolverKind::action;
    if (k == "energy") return SolverKind::energy;
    throw ConfigError(std::string(command) + ": expected 'action' or 'energy', got '" + k + "'");
}

void no_positional(const CommandArgs& args) {
    if (!args.positional.empty()) throw ConfigError("unexpected argument '" + args.positional.front() + "'");
}

double single_lambda(const RunConfig& cfg) {
    if (cfg.lambda_grid) throw ConfigError("this command takes problem.lambda, not problem.lambda_grid");
    return cfg.lambda.value_or(1.0);
}

double single_mu(const RunConfig& cfg) {
    if (cfg.mu_grid) throw ConfigError("this command takes problem.mu, not problem.mu_grid");
    return cfg.mu.value_or(1.0);
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text_file(path, j.dump(2) + "\n"); }

GroundState solve_single(const DomainPtr& domain, SolverKind kind, double p, const RunConfig& cfg) {
    return kind == SolverKind::action ? solve_action(domain, p, single_lambda(cfg), cfg.solver)
                                      : solve_energy(domain, p, single_mu(cfg), cfg.solver);
}

void print_state(std::ostream& out, const GroundState& s) {
    row(out, "lambda", s.lambda);
    row(out, "mu", s.mu);
    row(out, "J", s.action_value);
    row(out, "E", s.energy_value);
    row(out, "residual", s.residual);
    row(out, "iterations", std::to_string(s.iterations));
}

nlohmann::json state_json(const GroundState& s) {
    return {{"kind", to_string(s.kind)},
            {"p", s.p},
            {"lambda", s.lambda},
            {"mu", s.mu},
            {"action", s.action_value},
            {"energy", s.energy_value},
            {"residual", s.residual},
            {"iterations", s.iterations},
            {"converged", s.converged}};
}

int cmd_solve(const CommandArgs& args, std::ostream& out, std::ostream&) {
    const SolverKind kind = parse_kind(args, "solve", false);
    const RunConfig cfg = make_run_config(merge_config(args));
    const DomainPtr domain = build_domain(cfg);
    ensure_writable_directory(cfg.output_directory);
    const double p = cfg.p.value_or(4.0);

    const GroundState s = solve_single(domain, kind, p, cfg);
    const fs::path field_path = cfg.output_directory / ("solve_" + to_string(kind) + ".field");
    write_field(field_path, s);
    if (cfg.wants("json")) {
        nlohmann::json j = state_json(s);
        j["schema"] = "nehari-lab/solve/v1";
        j["domain"] = domain_to_json(*domain);
        j.erase("iterations");
        write_json(cfg.output_directory / ("solve_" + to_string(kind) + ".json"), j);
    }

    row(out, "kind", to_string(kind));
    row(out, "domain", domain->describe());
    row(out, "p", p);
    print_state(out, s);
    row(out, "field", field_path.string());
    return exit_ok;
}

void write_curve(const RunConfig& cfg, const LevelCurve& curve, const std::string& stem, const std::string& title) {
    if (cfg.wants("csv")) write_text_file(cfg.output_directory / (stem + ".csv"), curve_csv(curve));
    if (cfg.wants("svg")) write_text_file(cfg.output_directory / (stem + ".svg"), curve_svg(curve, title));
}

void print_curve(std::ostream& out, const LevelCurve& curve) {
    const bool action_side = curve.kind == LevelKind::action_level;
    out << std::left << std::setw(24) << (action_side ? "lambda" : "mu") << std::setw(24)
        << (action_side ? "J" : "E") << std::setw(24) << (action_side ? "mu" : "lambda") << "flags\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
        out << std::setw(24) << format_double(curve.params[i]) << std::setw(24) << format_double(curve.values[i])
            << std::setw(24) << format_double(curve.masses[i]) << curve.flags[i] << '\n';
    }
}

int cmd_sweep(const CommandArgs& args, std::ostream& out, std::ostream& err) {
    const SolverKind kind = parse_kind(args, "sweep", false);
    const RunConfig cfg = make_run_config(merge_config(args));
    const DomainPtr domain = build_domain(cfg);
    ensure_writable_directory(cfg.output_directory);
    const double p = cfg.p.value_or(4.0);

    LevelCurve curve;
    if (kind == SolverKind::action) {
        if (cfg.lambda) throw ConfigError("sweep takes problem.lambda_grid (or lambda_min/max/count), not problem.lambda");
        const std::vector<double> grid = cfg.action_grid();
        curve = build_action_curve(domain, p, grid, cfg.solver);
    } else {
        if (cfg.mu) throw ConfigError("sweep takes problem.mu_grid, not problem.mu");
        const std::vector<double> grid = cfg.energy_grid();
        curve = build_energy_curve(domain, p, grid, cfg.solver);
    }

    const std::string stem = "sweep_" + to_string(kind);
    write_curve(cfg, curve, stem, (kind == SolverKind::action ? "action level, p = " : "energy level, p = ") +
                                      format_double(p));
    print_curve(out, curve);
    if (curve.converged_count() == 0) {
        err << "sweep: no sample converged\n";
        return exit_nonconvergence;
    }
    const std::size_t flagged = static_cast<std::size_t>(
        std::count_if(curve.flags.begin(), curve.flags.end(), [](const std::string& f) { return !f.empty(); }));
    if (flagged) err << "sweep: " << flagged << " of " << curve.size() << " samples flagged\n";
    return exit_ok;
}

int cmd_duality(const CommandArgs& args, std::ostream& out, std::ostream& err) {
    no_positional(args);
    const RunConfig cfg = make_run_config(merge_config(args));
    if (cfg.lambda || cfg.mu) throw ConfigError("duality takes grids, not single lambda or mu values");
    const DomainPtr domain = build_domain(cfg);
    ensure_writable_directory(cfg.output_directory);
    const double p = cfg.p.value_or(4.0);

    const std::vector<double> lambdas = cfg.action_grid();
    const std::vector<double> mus = cfg.energy_grid();
    const DualityReport r = duality_report(domain, p, lambdas, mus, cfg.solver, cfg.duality);

    if (cfg.wants("json")) write_json(cfg.output_directory / "duality.json", to_json(r));
    write_curve(cfg, r.action_curve, "duality_action", "action level, p = " + format_double(p));
    write_curve(cfg, r.energy_curve, "duality_energy", "energy level, p = " + format_double(p));

    out << std::left << std::setw(24) << "mu" << std::setw(24) << "E direct" << std::setw(24) << "-J*(mu)"
        << "rel err\n";
    for (const auto& d : r.rows) {
        out << std::setw(24) << format_double(d.mu) << std::setw(24) << format_double(d.energy_direct)
            << std::setw(24) << format_double(d.energy_via_transform) << format_double(d.rel_err)
            << (d.flags.empty() ? "" : "  [" + d.flags + "]") << '\n';
    }
    row(out, "max duality error", r.max_duality_err);
    row(out, "max dJ/dlambda error", r.max_derivative_err);
    row(out, "duality", pass_fail(r.duality_ok));
    row(out, "derivative", pass_fail(r.derivative_ok));
    row(out, "audits", pass_fail(r.audits_ok));
    if (r.passed()) return exit_ok;

    if (!r.duality_ok) {
        err << "duality: max relative error " << format_double(r.max_duality_err) << " against threshold "
            << format_double(r.thresholds.duality_rel)
            << " (discretization error dominates on coarse grids; refine domain.resolution or widen the lambda range)\n";
    }
    if (!r.derivative_ok) {
        err << "duality: finite-difference dJ/dlambda misses the minimizer mass by "
            << format_double(r.max_derivative_err) << " (threshold " << format_double(r.thresholds.derivative_rel)
            << "); refine the lambda grid\n";
    }
    if (!r.audits_ok) err << "duality: Fenchel-Young, double-transform or upper-bound audit failed\n";
    return exit_verification;
}

int cmd_hessian(const CommandArgs& args, std::ostream& out, std::ostream& err) {
    const SolverKind kind = parse_kind(args, "hessian", true);
    const RunConfig cfg = make_run_config(merge_config(args));
    const DomainPtr domain = build_domain(cfg);
    ensure_writable_directory(cfg.output_directory);
    const double p = cfg.p.value_or(4.0);
    if (cfg.solver.tol > 1e-8) {
        err << "warning: solver.tol " << format_double(cfg.solver.tol)
            << " exceeds 1e-8; the identity tolerance is not guaranteed\n";
    }

    const GroundState s = solve_single(domain, kind, p, cfg);
    const SecondFormReport r = second_form_report(s, cfg.hessian_probes, cfg.solver.seed);
    for (const auto& w : r.warnings) err << "warning: " << w << '\n';
    if (cfg.wants("json")) write_json(cfg.output_directory / "hessian.json", to_json(r));

    row(out, "kind", to_string(kind));
    row(out, "domain", domain->describe());
    row(out, "p", p);
    print_state(out, s);
    row(out, "identity max rel err", r.identity_max_rel_err);
    row(out, "identity", pass_fail(r.identity_ok));
    row(out, "alpha consistent", pass_fail(r.alpha_consistent));
    row(out, "min eig (Nehari)", r.min_eig_nehari);
    row(out, "min eig (mass)", r.min_eig_mass);
    row(out, "C1", r.constant_C1);
    row(out, "eigen inequality", pass_fail(r.eigen_inequality_ok));
    return r.passed() ? exit_ok : exit_verification;
}

int cmd_gn_constant(const CommandArgs& args, std::ostream& out, std::ostream&) {
    no_positional(args);
    const RunConfig cfg = make_run_config(merge_config(args));
    const DomainPtr domain = build_domain(cfg);
    ensure_writable_directory(cfg.output_directory);
    const double p = cfg.p.value_or(critical_exponent(domain->dim()));

    const CriticalData c = estimate_gn_constant(domain, p, cfg.gn);
    if (cfg.wants("json")) {
        write_json(cfg.output_directory / "gn_constant.json",
                   {{"schema", "nehari-lab/gn-constant/v1"},
                    {"domain", domain_to_json(*domain)},
                    {"dim", c.dim},
                    {"p", c.p},
                    {"p_critical", c.p_crit},
                    {"K_p", c.K_p},
                    {"mu_N", c.mu_N}});
    }
    row(out, "domain", domain->describe());
    row(out, "p", c.p);
    row(out, "critical exponent", c.p_crit);
    row(out, "K_p (lower bound)", c.K_p);
    row(out, "mu_N", c.mu_N);
    row(out, "iterations", std::to_string(c.iterations));
    return exit_ok;
}

// Halves every mesh width: n interior points become 2n + 1.
RunConfig refined(RunConfig cfg) {
    for (auto& n : cfg.resolution) n = 2 * n + 1;
    cfg.dumbbell.h *= 0.5;
    return cfg;
}

int cmd_lambda_omega(const CommandArgs& args, std::ostream& out, std::ostream&) {
    no_positional(args);
    RunConfig cfg = make_run_config(merge_config(args));
    DomainPtr domain = build_domain(cfg);
    ensure_writable_directory(cfg.output_directory);

    std::optional<double> continuum;
    if (!domain->masked()) {
        double v = 0.0;
        for (double l : domain->extents()) v += std::numbers::pi * std::numbers::pi / (l * l);
        continuum = v;
    }

    nlohmann::json levels = nlohmann::json::array();
    std::vector<double> errors;
    out << std::left << std::setw(28) << "resolution" << std::setw(24) << "lambda_Omega" << "observed order\n";
    for (std::size_t level = 0; level <= cfg.lambda_omega_refinements; ++level) {
        if (level) {
            cfg = refined(cfg);
            domain = build_domain(cfg);
        }
        const double value = lambda_omega(*domain, cfg.lambda_omega_tol);
        nlohmann::json entry{{"resolution", domain->resolution()}, {"lambda_omega", value}};
        std::string order;
        if (continuum) {
            errors.push_back(std::abs(value - *continuum));
            entry["error"] = errors.back();
            if (errors.size() > 1) {
                const double q = std::log2(errors[errors.size() - 2] / errors.back());
                entry["observed_order"] = q;
                order = format_double(q);
            }
        }
        std::string res;
        for (std::size_t a = 0; a < domain->resolution().size(); ++a) {
            res += (a ? "x" : "") + std::to_string(domain->resolution()[a]);
        }
        out << std::setw(28) << res << std::setw(24) << format_double(value) << order << '\n';
        levels.push_back(std::move(entry));
    }
    if (continuum) row(out, "continuum value", *continuum);

    if (cfg.wants("json")) {
        nlohmann::json j{{"schema", "nehari-lab/lambda-omega/v1"}, {"kind", cfg.domain_kind}, {"levels", levels}};
        if (continuum) j["continuum"] = *continuum;
        write_json(cfg.output_directory / "lambda_omega.json", j);
    }
    return exit_ok;
}

using Command = std::function<int(const CommandArgs&, std::ostream&, std::ostream&)>;

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Action and energy ground states of the stationary NLS equation, with duality and "
                 "second-variation checks.\nOptions are `--section.key value` pairs (or --config FILE); "
                 "flags override the file.",
                 "nehari-lab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "nehari-lab 1.0.0");

    const std::vector<std::tuple<std::string, std::string, Command>> commands{
        {"solve", "solve action|energy: one ground state, field dump and summary", cmd_solve},
        {"sweep", "sweep action|energy: level curve over a parameter grid (CSV, SVG)", cmd_sweep},
        {"duality", "compare E(mu) with the transform of J(lambda); JSON report", cmd_duality},
        {"hessian", "hessian [action|energy]: second-form identity and eigenvalue inequality", cmd_hessian},
        {"gn-constant", "Gagliardo-Nirenberg constant and critical mass estimate", cmd_gn_constant},
        {"lambda-omega", "bottom of the discrete Dirichlet spectrum", cmd_lambda_omega},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, help, cmd] : commands) {
        CLI::App* s = app.add_subcommand(name, help);
        s->prefix_command();
        subs.push_back(s);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_config;
    }

    for (std::size_t i = 0; i < subs.size(); ++i) {
        if (!subs[i]->parsed()) continue;
        const std::string& name = std::get<0>(commands[i]);
        try {
            return std::get<2>(commands[i])(parse_command_args(subs[i]->remaining()), out, err);
        } catch (const ConfigError& e) {
            err << name << ": config error: " << e.what() << '\n';
            return exit_config;
        } catch (const InvalidArgumentError& e) {
            err << name << ": invalid argument: " << e.what() << '\n';
            return exit_config;
        } catch (const DomainMismatchError& e) {
            err << name << ": " << e.what() << '\n';
            return exit_config;
        } catch (const NonConvergenceError& e) {
            err << name << ": NonConvergence: " << e.what() << '\n';
            return exit_nonconvergence;
        } catch (const BelowSpectrumError& e) {
            err << name << ": BelowSpectrum: " << e.what() << '\n';
            return exit_regime;
        } catch (const DivergenceError& e) {
            err << name << ": Divergence: " << e.what() << '\n';
            return exit_regime;
        } catch (const std::exception& e) {
            err << name << ": error: " << e.what() << '\n';
            return exit_internal;
        }
    }
    return exit_internal;
}

}  // namespace nehari
