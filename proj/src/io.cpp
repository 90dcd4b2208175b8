#include "geoent/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace geoent::io {

TargetState parse_state(const json& j, double normTol) {
  if (!(normTol >= 0)) throw DomainError("norm tolerance must be non-negative");
  if (!j.is_object()) throw DomainError("state file must hold a JSON object");
  if (!j.contains("q") || !j["q"].is_number_integer()) throw DomainError("state file needs an integer \"q\"");
  if (!j.contains("coeffs") || !j["coeffs"].is_array()) throw DomainError("state file needs a \"coeffs\" array");
  const int q = j["q"].get<int>();
  check_qubit_count(q);
  const auto& arr = j["coeffs"];
  const auto dim = static_cast<std::size_t>(basis_dim(q));
  if (arr.size() != dim)
    throw DomainError("coeffs has " + std::to_string(arr.size()) + " entries, q=" + std::to_string(q) + " needs " +
                      std::to_string(dim));
  VectorX<double> c(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    if (!arr[i].is_number()) throw DomainError("coeffs[" + std::to_string(i) + "] is not a number");
    c(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  }
  if (!c.allFinite()) throw DomainError("coeffs contain non-finite values");
  const double norm = c.norm();
  if (std::abs(norm - 1.0) > normTol)
    throw DomainError("state norm " + format_double(norm) + " deviates from 1 by more than " + format_double(normTol));
  return TargetState(q, c / norm);
}

TargetState load_state(const std::filesystem::path& path, double normTol) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open state file '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw DomainError("malformed state file '" + path.string() + "': " + e.what());
  }
  return parse_state(j, normTol);
}

json state_to_json(const TargetState& state) {
  return {{"q", state.qubits()}, {"coeffs", to_std(state.coeffs())}};
}

SpectrumSummary summarize(const SpectrumReport<double>& r) {
  return {to_std(r.eigenvalues), r.zeroModes, r.classification};
}

json spectrum_to_json(const SpectrumSummary& s) {
  return {{"eigenvalues", s.eigenvalues}, {"zeroModes", s.zeroModes}, {"classification", to_string(s.classification)}};
}

SpectrumSummary spectrum_from_json(const json& j) {
  SpectrumSummary s;
  s.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
  s.zeroModes = j.at("zeroModes").get<int>();
  s.classification = classification_from_string(j.at("classification").get<std::string>());
  return s;
}

std::vector<double> to_std(const VectorX<double>& v) { return {v.data(), v.data() + v.size()}; }

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

}  // namespace geoent::io
