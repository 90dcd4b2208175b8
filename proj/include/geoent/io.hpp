#pragma once

// State files and spectrum JSON. Doubles are written with the shortest
// decimal that round-trips.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "geoent/hessian.hpp"
#include "geoent/states.hpp"

namespace geoent::io {

using json = nlohmann::json;

inline constexpr double kDefaultNormTol = 1e-9;

/// {"q": int, "coeffs": [2^q reals]}, MSB-first. Rejects a norm off 1 by more
/// than normTol, then renormalizes exactly.
TargetState parse_state(const json& j, double normTol = kDefaultNormTol);
TargetState load_state(const std::filesystem::path& path, double normTol = kDefaultNormTol);
json state_to_json(const TargetState& state);

struct SpectrumSummary {
  std::vector<double> eigenvalues;
  int zeroModes = 0;
  Classification classification = Classification::DegenerateNeedsHigherOrder;

  bool operator==(const SpectrumSummary&) const = default;
};

SpectrumSummary summarize(const SpectrumReport<double>& r);
json spectrum_to_json(const SpectrumSummary& s);
SpectrumSummary spectrum_from_json(const json& j);

std::vector<double> to_std(const VectorX<double>& v);

/// Shortest round-trip decimal, e.g. "0.5555555555555556".
std::string format_double(double v);

}  // namespace geoent::io
