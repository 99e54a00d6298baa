#pragma once

#include "pks/simulator.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>

namespace pks {

/// Parses a simulation config. Every field is optional and defaults to SimConfig{}:
///
///   {"grid": {"L": 5.0, "nx": 128, "ny": 128}, "alpha": 1.0, "dt0": 1e-3,
///    "t_end": 1.0, "cfl_safety": 0.5, "blowup_density_factor": 1000.0,
///    "dt_min": 1e-8, "sample_interval": 0.0}
///
/// Unknown keys are rejected. The result is validated.
SimConfig parse_sim_config(std::string_view text);
SimConfig load_sim_config(const std::filesystem::path& path);
std::string sim_config_to_json(const SimConfig& config);

/// Header line then one row per sample: t,mass,I,V,Vprime_fd,max_density.
void write_trace_csv(const SimTrace& trace, std::ostream& out);

}  // namespace pks
