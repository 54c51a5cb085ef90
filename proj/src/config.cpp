#include "nehari/config.hpp"

#include "nehari/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace nehari {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

const std::map<std::string, std::string>& aliases() {
    static const std::map<std::string, std::string> table{
        {"p", "problem.p"},
        {"lambda", "problem.lambda"},
        {"mu", "problem.mu"},
        {"lambda-grid", "problem.lambda_grid"},
        {"mu-grid", "problem.mu_grid"},
        {"resolution", "domain.resolution"},
        {"kind", "domain.kind"},
        {"extents", "domain.extents"},
        {"tol", "solver.tol"},
        {"seed", "solver.seed"},
        {"out", "output.directory"},
    };
    return table;
}

std::string canonical_key(const std::string& flag) {
    const auto it = aliases().find(flag);
    return it == aliases().end() ? flag : it->second;
}

std::size_t parse_count(const std::string& text, const std::string& key) {
    const double x = parse_number(text, key);
    if (!(x >= 0) || x != std::floor(x) || x > 1e15) {
        throw ConfigError(key + ": expected a nonnegative integer, got '" + text + "'");
    }
    return static_cast<std::size_t>(x);
}

bool parse_bool(const std::string& text, const std::string& key) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<std::string> parse_word_list(std::string text) {
    text = trim(text);
    if (!text.empty() && text.front() == '[' && text.back() == ']') text = text.substr(1, text.size() - 2);
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void require_ascending(const std::vector<double>& grid, const std::string& key) {
    if (grid.empty()) throw ConfigError(key + " is empty");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw ConfigError(key + " must be sorted strictly ascending");
    }
}

}  // namespace

KeyValues parse_config_text(std::string_view text, const std::string& origin) {
    KeyValues out;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        std::string_view raw = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto where = origin + ":" + std::to_string(line_no);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.front() == '[' && line.back() == ']') {
                section = trim(std::string_view(line).substr(1, line.size() - 2));
                continue;
            }
            throw ConfigError(where + ": expected 'key = value'");
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": missing key");
        out[section.empty() ? key : section + "." + key] = value;
    }
    return out;
}

KeyValues load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string());
}

CommandArgs parse_command_args(const std::vector<std::string>& args) {
    CommandArgs out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.size() < 3 || a.rfind("--", 0) != 0) {
            out.positional.push_back(a);
            continue;
        }
        std::string name = a.substr(2);
        std::string value;
        if (const auto eq = name.find('='); eq != std::string::npos) {
            value = name.substr(eq + 1);
            name = name.substr(0, eq);
        } else {
            if (i + 1 >= args.size()) throw ConfigError("flag --" + name + " needs a value");
            value = args[++i];
        }
        if (name == "config") {
            out.config_path = value;
        } else {
            out.overrides[canonical_key(name)] = value;
        }
    }
    return out;
}

KeyValues merge_config(const CommandArgs& args) {
    KeyValues merged;
    if (args.config_path) merged = load_config_file(*args.config_path);
    for (const auto& [key, value] : args.overrides) merged[key] = value;
    return merged;
}

double parse_number(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    double x = 0.0;
    const char* first = t.data();
    if (!t.empty() && t.front() == '+') ++first;
    const auto r = std::from_chars(first, t.data() + t.size(), x);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size() || !std::isfinite(x)) {
        throw ConfigError(key + ": expected a number, got '" + text + "'");
    }
    return x;
}

std::vector<double> parse_number_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    for (const auto& item : parse_word_list(text)) out.push_back(parse_number(item, key));
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

bool RunConfig::wants(const std::string& format) const {
    return std::find(formats.begin(), formats.end(), format) != formats.end();
}

std::vector<double> RunConfig::action_grid() const {
    if (lambda_grid) return *lambda_grid;
    return lambda_spacing == "linear" ? linear_grid(lambda_min, lambda_max, lambda_count)
                                      : geometric_grid(lambda_min, lambda_max, lambda_count);
}

std::vector<double> RunConfig::energy_grid() const {
    return mu_grid ? *mu_grid : std::vector<double>{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
}

RunConfig make_run_config(const KeyValues& values) {
    RunConfig c;
    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> setters{
        {"domain.kind", [&](auto& k, auto& v) { c.domain_kind = v; (void)k; }},
        {"domain.extents", [&](auto& k, auto& v) { c.extents = parse_number_list(v, k); }},
        {"domain.resolution",
         [&](auto& k, auto& v) {
             c.resolution.clear();
             for (const auto& w : parse_word_list(v)) c.resolution.push_back(parse_count(w, k));
         }},
        {"domain.origin", [&](auto& k, auto& v) { c.origin = parse_number_list(v, k); }},
        {"domain.side", [&](auto& k, auto& v) { c.dumbbell.side = parse_number(v, k); }},
        {"domain.channel_length", [&](auto& k, auto& v) { c.dumbbell.channel_length = parse_number(v, k); }},
        {"domain.channel_width", [&](auto& k, auto& v) { c.dumbbell.channel_width = parse_number(v, k); }},
        {"domain.h", [&](auto& k, auto& v) { c.dumbbell.h = parse_number(v, k); }},
        {"problem.p", [&](auto& k, auto& v) { c.p = parse_number(v, k); }},
        {"problem.lambda", [&](auto& k, auto& v) { c.lambda = parse_number(v, k); }},
        {"problem.mu", [&](auto& k, auto& v) { c.mu = parse_number(v, k); }},
        {"problem.lambda_grid", [&](auto& k, auto& v) { c.lambda_grid = parse_number_list(v, k); }},
        {"problem.mu_grid", [&](auto& k, auto& v) { c.mu_grid = parse_number_list(v, k); }},
        {"problem.lambda_min", [&](auto& k, auto& v) { c.lambda_min = parse_number(v, k); }},
        {"problem.lambda_max", [&](auto& k, auto& v) { c.lambda_max = parse_number(v, k); }},
        {"problem.lambda_count", [&](auto& k, auto& v) { c.lambda_count = parse_count(v, k); }},
        {"problem.lambda_spacing", [&](auto& k, auto& v) {
             if (v != "geometric" && v != "linear") throw ConfigError(k + ": expected geometric or linear");
             c.lambda_spacing = v;
         }},
        {"solver.tol", [&](auto& k, auto& v) { c.solver.tol = parse_number(v, k); }},
        {"solver.max_iters", [&](auto& k, auto& v) { c.solver.max_iters = parse_count(v, k); }},
        {"solver.n_starts", [&](auto& k, auto& v) { c.solver.n_starts = parse_count(v, k); }},
        {"solver.seed", [&](auto& k, auto& v) { c.solver.seed = parse_count(v, k); }},
        {"solver.step_rule", [&](auto& k, auto& v) {
             try {
                 c.solver.step_rule = step_rule_from_string(v);
             } catch (const Error& e) {
                 throw ConfigError(k + ": " + e.what());
             }
         }},
        {"solver.divergence_threshold", [&](auto& k, auto& v) { c.solver.divergence_threshold = parse_number(v, k); }},
        {"solver.collapse_fraction", [&](auto& k, auto& v) { c.solver.collapse_fraction = parse_number(v, k); }},
        {"solver.newton_polish", [&](auto& k, auto& v) { c.solver.newton_polish = parse_bool(v, k); }},
        {"output.directory", [&](auto&, auto& v) { c.output_directory = v; }},
        {"output.formats", [&](auto& k, auto& v) {
             c.formats = parse_word_list(v);
             for (const auto& f : c.formats) {
                 if (f != "csv" && f != "json" && f != "svg") throw ConfigError(k + ": unknown format '" + f + "'");
             }
         }},
        {"duality.threshold", [&](auto& k, auto& v) { c.duality.duality_rel = parse_number(v, k); }},
        {"duality.derivative_threshold", [&](auto& k, auto& v) { c.duality.derivative_rel = parse_number(v, k); }},
        {"duality.audit_slack", [&](auto& k, auto& v) { c.duality.audit_slack = parse_number(v, k); }},
        {"hessian.probes", [&](auto& k, auto& v) { c.hessian_probes = parse_count(v, k); }},
        {"levels.jump_threshold", [&](auto& k, auto& v) { c.jump_threshold = parse_number(v, k); }},
        {"gn.max_iters", [&](auto& k, auto& v) { c.gn.max_iters = parse_count(v, k); }},
        {"gn.gradient_tol", [&](auto& k, auto& v) { c.gn.gradient_tol = parse_number(v, k); }},
        {"lambda_omega.tol", [&](auto& k, auto& v) { c.lambda_omega_tol = parse_number(v, k); }},
        {"lambda_omega.refinements", [&](auto& k, auto& v) { c.lambda_omega_refinements = parse_count(v, k); }},
    };

    for (const auto& [key, value] : values) {
        const auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
        it->second(key, value);
    }

    if (c.lambda && c.lambda_grid) throw ConfigError("give either problem.lambda or problem.lambda_grid, not both");
    if (c.mu && c.mu_grid) throw ConfigError("give either problem.mu or problem.mu_grid, not both");
    if (c.lambda_grid) require_ascending(*c.lambda_grid, "problem.lambda_grid");
    if (c.mu_grid) require_ascending(*c.mu_grid, "problem.mu_grid");
    if (!c.lambda_grid) {
        if (c.lambda_count < 2 || !(c.lambda_max > c.lambda_min)) {
            throw ConfigError("problem.lambda_min/max/count describe an empty grid");
        }
        if (c.lambda_spacing == "geometric" && !(c.lambda_min > 0)) {
            throw ConfigError("a geometric lambda grid needs problem.lambda_min > 0");
        }
    }
    if (c.p && !(*c.p > 2.0)) throw ConfigError("problem.p must exceed 2");
    if (c.formats.empty()) throw ConfigError("output.formats is empty");
    try {
        c.solver.validate();
    } catch (const InvalidArgumentError& e) {
        throw ConfigError(e.what());
    }
    return c;
}

DomainPtr build_domain(const RunConfig& c) {
    try {
        if (c.domain_kind == "dumbbell") {
            const auto& d = c.dumbbell;
            return share(DiscreteDomain::dumbbell(d.side, d.channel_length, d.channel_width, d.h));
        }
        return make_domain(domain_kind_from_string(c.domain_kind), c.extents, c.resolution, c.origin);
    } catch (const InvalidArgumentError& e) {
        throw ConfigError(std::string("domain: ") + e.what());
    }
}

void ensure_writable_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw ConfigError("output directory " + dir.string() + " cannot be created");
    }
    const auto probe = dir / ".nehari-write-probe";
    {
        std::ofstream out(probe, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("output directory " + dir.string() + " is not writable");
    }
    std::filesystem::remove(probe, ec);
}

}  // namespace nehari
