#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "rqbe/solver.hpp"

namespace rqbe::io {

// Flat "key = value" text. '#' starts a comment, blank lines are ignored.
// Required: stats, a, c, pmax, n, ntheta, nphi, dt, t_end.
// Optional: offgrid (weighted|plain), spatial (none|torus1d), nx,
// output_every, conservation_fix (on|off), perturbation
// (none|bump|wave|random), amplitude, center (x,y,z), width, seed.
// Unknown, duplicate or malformed keys throw Error(Config) naming the key
// and line; the result is validated.
SimulationConfig parse_config(std::string_view text, std::string_view origin = "<config>");
SimulationConfig load_config(const std::filesystem::path& path);

// Every key in canonical order with shortest round-trip numbers; parsing the
// echo gives back the same configuration.
std::string format_config(const SimulationConfig& cfg);

const char* to_string(OffgridMode m);

}  // namespace rqbe::io
