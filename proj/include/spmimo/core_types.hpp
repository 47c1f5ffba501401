#ifndef SPMIMO_CORE_TYPES_HPP
#define SPMIMO_CORE_TYPES_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace spmimo {

// Scalar parameters of one uplink system. Powers are per symbol (W), omega is
// the linear pathloss at 1 km, density is in BS/km^2.
struct SystemConfig {
  int M = 100;
  int K = 10;
  int tau_c = 200;
  int tau_p = 10;
  double delta = 0.5;
  double rho = 1.25e-21;
  double sigma2 = 5e-21;
  double alpha = 3.76;
  double omega = 1e13;
  double density = 100.0;
  double bandwidth = 2e7;

  double rho_p_rp() const { return rho; }
  double rho_d_rp() const { return rho; }
  double rho_p_sp() const { return delta * rho; }
  double rho_d_sp() const { return (1.0 - delta) * rho; }
  double snr() const { return rho / sigma2; }

  bool operator==(const SystemConfig&) const = default;
};

// Circuit power constants for the energy-efficiency model.
struct PowerModel {
  double eta = 0.39;
  double c0 = 10.0;
  double c1 = 0.1;
  double d0 = 0.1;
  double a_rate = 2.3e-2 / 2e7;  // W per bit/s
  double flops_per_watt = 12.8e9;

  bool operator==(const PowerModel&) const = default;
};

enum class Scheme { RP, SP_NoSub, SP_EstSub, SP_PerfSub };

const char* to_string(Scheme s);
Scheme scheme_from_string(std::string_view name);
bool is_superimposed(Scheme s);

struct SinrBreakdown {
  double coherent_gain = 0.0;
  double pilot_contamination = 0.0;
  double extra_coherent = 0.0;
  double non_coherent = 0.0;
  double noise_term = 0.0;
  double sinr = 0.0;

  double denominator() const {
    return pilot_contamination + extra_coherent + non_coherent + noise_term;
  }
  // Recomputes sinr from the components.
  void finalize();
};

struct RateResult {
  double rate_bps = 0.0;
  double prelog = 0.0;
  SinrBreakdown sinr;
  Scheme scheme = Scheme::RP;
};

struct Violation {
  std::string field;
  std::string message;
};

std::vector<Violation> validate(const SystemConfig& cfg);
std::vector<Violation> validate(const PowerModel& pm);

// Throws ConfigError listing every violation when the config is invalid.
void require_valid(const SystemConfig& cfg);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a formula is evaluated at a point where it is undefined.
class DegenerateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Default system (SNR = -6 dB, K = 10, tau_c = 200).
SystemConfig default_config();
PowerModel default_power_model();

double db_to_linear(double db);
double linear_to_db(double lin);

}  // namespace spmimo

#endif
