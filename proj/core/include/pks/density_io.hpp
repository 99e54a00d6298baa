#pragma once

#include "pks/moments.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace pks {

/// Parses a density document. Two shapes are accepted:
///
///   {"grid": {"L": 4.0, "nx": 64, "ny": 64, "values": [... row-major, x fastest ...]}}
///   {"analytic": [{"type": "ball", "center": [0, 0], "radius": 0.5, "amplitude": 2.0},
///                 {"type": "gaussian", "center": [1, 0], "std": 0.3, "mass": 4.0}]}
///
/// Throws DomainError on malformed input.
Density parse_density_json(std::string_view text);

Density load_density(const std::filesystem::path& path);

/// Serialises back to the same document shape.
std::string density_to_json(const Density& density);

}  // namespace pks
