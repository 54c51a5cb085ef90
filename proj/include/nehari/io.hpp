#pragma once

#include "nehari/levels.hpp"
#include "nehari/solve.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace nehari {

/// 17 significant digits with a '.' decimal point, independent of the locale.
/// Non-finite values print as nan, inf and -inf.
std::string format_double(double x);

/// Exact description of a grid (extents, resolution, origin and mask).
nlohmann::json domain_to_json(const DiscreteDomain& domain);
DiscreteDomain domain_from_json(const nlohmann::json& j);

/// Field dump layout: the line "NEHARI-FIELD 1", one line of JSON header
/// (domain, p, lambda, mu, residual, kind, count), then `count` little-endian
/// float64 values.
void write_field(const std::filesystem::path& path, const GroundState& state);

/// Reloads a dump. The values are bit-identical to the ones written; action
/// and energy values are recomputed from them. Throws Error on malformed input.
GroundState read_field(const std::filesystem::path& path);

/// Columns kind, abscissa, value, mass_or_multiplier, converged, flags.
std::string curve_csv(const LevelCurve& curve);

/// Standalone SVG plot of the converged samples with flagged samples marked.
std::string curve_svg(const LevelCurve& curve, const std::string& title);

/// Writes `content` verbatim; throws Error when the file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace nehari
