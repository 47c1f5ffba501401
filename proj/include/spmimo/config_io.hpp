#ifndef SPMIMO_CONFIG_IO_HPP
#define SPMIMO_CONFIG_IO_HPP

#include <cstdint>
#include <string>

#include <yaml-cpp/yaml.h>

#include "spmimo/core_types.hpp"

namespace spmimo {

// YAML layout:
//
//   system:
//     M: 100
//     omega_db: 130        # any field may be given in dB with a _db suffix
//     noise_total_w: 1e-13 # sigma2 * bandwidth, divided by bandwidth on load
//     snr_db: -6           # sets rho = sigma2 * 10^(snr_db/10)
//   power_model:
//     a_rate_total_w: 2.3e-2  # a_rate * bandwidth
//
// Missing fields keep the defaults.
struct ConfigBundle {
  SystemConfig system = default_config();
  PowerModel power = default_power_model();

  bool operator==(const ConfigBundle&) const = default;
};

// Overlays the keys present in `node` onto `base`. Throws ConfigError with the
// offending line on unknown keys or malformed values.
ConfigBundle parse_config(const YAML::Node& node, ConfigBundle base = {});
ConfigBundle load_config(const std::string& path);
ConfigBundle load_config_string(const std::string& text);

// Canonical text form. Doubles are written in shortest round-trip form so
// load_config_string(to_yaml(b)) == b bit for bit.
std::string to_yaml(const ConfigBundle& b);

std::uint64_t fnv1a64(const std::string& text);
std::string config_hash(const ConfigBundle& b);

}  // namespace spmimo

#endif
