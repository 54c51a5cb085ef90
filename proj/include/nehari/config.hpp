#pragma once

#include "nehari/levels.hpp"
#include "nehari/solve.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nehari {

/// Flat dotted keys ("solver.tol") to raw values, sorted by key.
using KeyValues = std::map<std::string, std::string>;

/// Parses `key = value` lines. `#` starts a comment, blank lines are skipped
/// and a `[section]` line prefixes the following keys with `section.`.
/// Throws ConfigError naming `origin` and the line on malformed input.
KeyValues parse_config_text(std::string_view text, const std::string& origin = "<config>");
KeyValues load_config_file(const std::filesystem::path& path);

struct CommandArgs {
    std::vector<std::string> positional;
    KeyValues overrides;  ///< canonical keys, later flags win
    std::optional<std::string> config_path;
};

/// Splits `--key value` / `--key=value` pairs from positional words.
/// Short aliases (--p, --lambda, --mu, --lambda-grid, --mu-grid, --resolution,
/// --kind, --extents, --tol, --seed, --out) map onto their dotted keys.
CommandArgs parse_command_args(const std::vector<std::string>& args);

/// File values overlaid by flags.
KeyValues merge_config(const CommandArgs& args);

/// Locale-independent number parsing; lists are `[a, b]`, `a, b` or a single value.
double parse_number(const std::string& text, const std::string& key);
std::vector<double> parse_number_list(const std::string& text, const std::string& key);

struct DumbbellSpec {
    double side = 2.0;
    double channel_length = 1.0;
    double channel_width = 0.5;
    double h = 0.1;
};

struct RunConfig {
    std::string domain_kind = "interval";
    std::vector<double> extents{40.0};
    std::vector<std::size_t> resolution{2000};
    std::vector<double> origin;  ///< empty: centered interval/rectangle, 0 for cylinders
    DumbbellSpec dumbbell;

    std::optional<double> p;  ///< commands pick their own default when unset
    std::optional<double> lambda;
    std::optional<double> mu;
    std::optional<std::vector<double>> lambda_grid;
    std::optional<std::vector<double>> mu_grid;
    double lambda_min = 0.1;
    double lambda_max = 6.0;
    std::size_t lambda_count = 60;
    std::string lambda_spacing = "geometric";

    SolverConfig solver;

    std::filesystem::path output_directory = "nehari-out";
    std::vector<std::string> formats{"csv", "json", "svg"};

    DualityThresholds duality;
    std::size_t hessian_probes = 50;
    double jump_threshold = 1e-2;
    GnOptions gn;
    double lambda_omega_tol = 1e-10;
    /// Extra solves with the mesh width halved each time (n -> 2n + 1).
    std::size_t lambda_omega_refinements = 0;

    bool wants(const std::string& format) const;
    /// Explicit lambda_grid, or the generated one from lambda_min/max/count/spacing.
    std::vector<double> action_grid() const;
    std::vector<double> energy_grid() const;
};

/// Typed view of a merged key map. Throws ConfigError on unknown keys,
/// unparsable values, unsorted grids, and lambda given together with lambda_grid
/// (or mu with mu_grid).
RunConfig make_run_config(const KeyValues& values);

DomainPtr build_domain(const RunConfig& cfg);

/// Creates the directory if needed and checks that a file can be created in it;
/// throws ConfigError otherwise.
void ensure_writable_directory(const std::filesystem::path& dir);

}  // namespace nehari
