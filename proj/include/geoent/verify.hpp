#pragma once

// Self-check suites run by `geoent verify`.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "geoent/io.hpp"

namespace geoent {

struct CheckResult {
  std::string suite;
  std::string check;
  int q = 0;
  int p = -1;  // -1 when the check has no excitation count
  double residual = 0;
  double tolerance = 0;
  bool pass = false;
};

io::json to_json(const CheckResult& c);

inline constexpr int kVerifyMaxQubits = 12;

extern const std::vector<std::string> kVerifySuites;  // gradient, hessian, eigen, schmidt, all

/// Runs `suite` for every q up to qmax, reporting each check through `sink`.
/// Returns true iff every check passed.
bool run_verify(const std::string& suite, int qmax, const std::function<void(const CheckResult&)>& sink,
                std::uint64_t seed = 42);

}  // namespace geoent
