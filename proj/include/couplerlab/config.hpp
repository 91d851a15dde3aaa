#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "couplerlab/system.hpp"

namespace couplerlab {

// Flagship four-mode registration (qa, c1, c2, qb) with the production
// parameter set; coupler modes parked at the activated operating point.
SystemSpec reference_spec();

// JSON document with top-level keys modes / couplings / options; units are
// encoded in the key names (freq_ghz, g_mhz, ...).
SystemSpec parse_system(const nlohmann::json& j);
nlohmann::json system_to_json(const SystemSpec& spec);
SystemSpec load_system(const std::string& path);

// Compact sorted-key serialization, the hashing preimage for manifests
std::string canonical_system_json(const SystemSpec& spec);
std::uint64_t fnv1a64(const std::string& bytes);

// Dotted parameter paths: "modes.<label>.freq_ghz", "modes.<label>.anharm_ghz",
// "couplings.<a>:<b>.g_mhz"
void set_parameter(SystemSpec& spec, const std::string& path, double value);
double get_parameter(const SystemSpec& spec, const std::string& path);

}  // namespace couplerlab
