#ifndef SPMIMO_VALIDATION_HPP
#define SPMIMO_VALIDATION_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace spmimo {

struct CheckResult {
  std::string name;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

struct ValidationOptions {
  std::uint64_t seed = 20240611;
  int threads = 1;
  std::function<void(const std::string&)> progress;
};

// Every oracle comparison and cross-module invariant, at desk scale.
ValidationReport validate_suite(const ValidationOptions& opt = {});
std::string validation_report_json(const ValidationReport& r);

}  // namespace spmimo

#endif
