#include "nehari/io.hpp"

#include "nehari/errors.hpp"
#include "nehari/functional.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <locale>
#include <sstream>

namespace nehari {

namespace {

constexpr const char* field_magic = "NEHARI-FIELD 1";

std::uint64_t to_little(std::uint64_t bits) {
    if constexpr (std::endian::native == std::endian::little) return bits;
    std::uint64_t out = 0;
    for (int b = 0; b < 8; ++b) out |= ((bits >> (8 * b)) & 0xFFu) << (8 * (7 - b));
    return out;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Fixed 6-significant-digit labels; coordinates use two decimals.
std::string short_number(double x) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 6);
    return std::string(buf, r.ptr);
}

std::string coord(double x) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, 2);
    return std::string(buf, r.ptr);
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

nlohmann::json domain_to_json(const DiscreteDomain& d) {
    nlohmann::json j{{"kind", to_string(d.kind())},
                     {"extents", d.extents()},
                     {"resolution", d.resolution()},
                     {"origin", d.origin()}};
    if (d.masked()) {
        std::string bits;
        bits.reserve(d.mask().size());
        for (bool b : d.mask()) bits += b ? '1' : '0';
        j["mask"] = bits;
    }
    return j;
}

DiscreteDomain domain_from_json(const nlohmann::json& j) {
    try {
        std::vector<bool> mask;
        if (j.contains("mask")) {
            for (char c : j.at("mask").get<std::string>()) mask.push_back(c == '1');
        }
        return DiscreteDomain(domain_kind_from_string(j.at("kind").get<std::string>()),
                              j.at("extents").get<std::vector<double>>(),
                              j.at("resolution").get<std::vector<std::size_t>>(),
                              j.at("origin").get<std::vector<double>>(), std::move(mask));
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed domain description: ") + e.what());
    }
}

void write_field(const std::filesystem::path& path, const GroundState& state) {
    const Eigen::VectorXd& v = state.field.values();
    const nlohmann::json header{{"domain", domain_to_json(state.field.domain())},
                                {"p", state.p},
                                {"lambda", state.lambda},
                                {"mu", state.mu},
                                {"residual", state.residual},
                                {"kind", to_string(state.kind)},
                                {"converged", state.converged},
                                {"iterations", state.iterations},
                                {"byte_order", "little"},
                                {"count", v.size()}};
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << field_magic << '\n' << header.dump() << '\n';
    for (double x : v) {
        const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(x));
        char raw[8];
        std::memcpy(raw, &bits, 8);
        out.write(raw, 8);
    }
    if (!out) throw Error("failed writing " + path.string());
}

GroundState read_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::string magic;
    std::string header_line;
    if (!std::getline(in, magic) || magic != field_magic) throw Error(path.string() + " is not a field dump");
    if (!std::getline(in, header_line)) throw Error(path.string() + ": missing header");

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_line);
    } catch (const nlohmann::json::exception& e) {
        throw Error(path.string() + ": bad header: " + e.what());
    }
    const DomainPtr domain = share(domain_from_json(header.at("domain")));
    const auto count = header.at("count").get<std::size_t>();
    if (count != domain->size()) throw Error(path.string() + ": value count does not match the domain");

    Eigen::VectorXd values(static_cast<Eigen::Index>(count));
    for (auto& x : values) {
        char raw[8];
        if (!in.read(raw, 8)) throw Error(path.string() + ": truncated data");
        std::uint64_t bits = 0;
        std::memcpy(&bits, raw, 8);
        x = std::bit_cast<double>(to_little(bits));
    }

    GroundState s{Field(domain, std::move(values))};
    s.p = header.at("p").get<double>();
    s.lambda = header.at("lambda").get<double>();
    s.residual = header.at("residual").get<double>();
    s.kind = header.at("kind").get<std::string>() == "energy" ? SolverKind::energy : SolverKind::action;
    s.converged = header.value("converged", false);
    s.iterations = header.value("iterations", std::size_t{0});
    s.mu = 0.5 * inner_l2(s.field, s.field);
    const ProblemParams params = s.params();
    s.action_value = action(s.field, params);
    s.energy_value = energy(s.field, params);
    return s;
}

std::string curve_csv(const LevelCurve& curve) {
    std::string out = "kind,abscissa,value,mass_or_multiplier,converged,flags\n";
    const std::string kind = to_string(curve.kind);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        out += kind + ',' + format_double(curve.params[i]) + ',' + format_double(curve.values[i]) + ',' +
               format_double(curve.masses[i]) + ',' + (curve.converged[i] ? "true" : "false") + ',' +
               csv_quote(curve.flags[i]) + '\n';
    }
    return out;
}

std::string curve_svg(const LevelCurve& curve, const std::string& title) {
    constexpr double width = 640.0;
    constexpr double height = 400.0;
    constexpr double left = 70.0;
    constexpr double right = 20.0;
    constexpr double top = 40.0;
    constexpr double bottom = 50.0;

    double x_lo = std::numeric_limits<double>::infinity();
    double x_hi = -x_lo;
    double y_lo = x_lo;
    double y_hi = -x_lo;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        x_lo = std::min(x_lo, curve.params[i]);
        x_hi = std::max(x_hi, curve.params[i]);
        if (curve.converged[i] && std::isfinite(curve.values[i])) {
            y_lo = std::min(y_lo, curve.values[i]);
            y_hi = std::max(y_hi, curve.values[i]);
        }
    }
    if (!std::isfinite(x_lo)) x_lo = 0.0, x_hi = 1.0;
    if (!std::isfinite(y_lo)) y_lo = 0.0, y_hi = 1.0;
    if (x_hi == x_lo) x_lo -= 0.5, x_hi += 0.5;
    if (y_hi == y_lo) y_lo -= 0.5, y_hi += 0.5;

    const auto sx = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * (width - left - right); };
    const auto sy = [&](double y) { return height - bottom - (y - y_lo) / (y_hi - y_lo) * (height - top - bottom); };

    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
       << xml_escape(title) << "</text>\n";
    // Axes with end labels.
    os << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
       << height - bottom << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
       << "\" stroke=\"black\"/>\n";
    const auto label = [&](double x, double y, const char* anchor, const std::string& text) {
        os << "<text x=\"" << coord(x) << "\" y=\"" << coord(y) << "\" text-anchor=\"" << anchor
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(text) << "</text>\n";
    };
    label(left, height - bottom + 16, "middle", short_number(x_lo));
    label(width - right, height - bottom + 16, "middle", short_number(x_hi));
    label(left - 6, height - bottom, "end", short_number(y_lo));
    label(left - 6, top + 4, "end", short_number(y_hi));
    const bool action_side = curve.kind == LevelKind::action_level;
    label((left + width - right) / 2, height - 12, "middle", action_side ? "lambda" : "mu");
    label(14, top - 10, "start", action_side ? "J(lambda)" : "E(mu)");

    os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (!curve.converged[i] || !std::isfinite(curve.values[i])) continue;
        os << (first ? "" : " ") << coord(sx(curve.params[i])) << ',' << coord(sy(curve.values[i]));
        first = false;
    }
    os << "\"/>\n";

    // Flagged samples: circles at the value, crosses on the axis when there is none.
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (curve.flags[i].empty()) continue;
        const double x = sx(curve.params[i]);
        if (curve.converged[i] && std::isfinite(curve.values[i])) {
            os << "<circle cx=\"" << coord(x) << "\" cy=\"" << coord(sy(curve.values[i]))
               << "\" r=\"4\" fill=\"none\" stroke=\"crimson\"><title>" << xml_escape(curve.flags[i])
               << "</title></circle>\n";
        } else {
            const double y = height - bottom;
            os << "<path d=\"M" << coord(x - 4) << ',' << coord(y - 4) << " L" << coord(x + 4) << ','
               << coord(y + 4) << " M" << coord(x - 4) << ',' << coord(y + 4) << " L" << coord(x + 4) << ','
               << coord(y - 4) << "\" stroke=\"crimson\"><title>" << xml_escape(curve.flags[i])
               << "</title></path>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw Error("failed writing " + path.string());
}

}  // namespace nehari
