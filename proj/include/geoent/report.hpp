#pragma once

// Analysis reports and family sweeps behind the command-line tool.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geoent/io.hpp"
#include "geoent/optimize.hpp"

namespace geoent {

inline constexpr const char* kReportSchema = "geoent/1";

struct TargetDescriptor {
  std::string kind;  // "dicke" | "ring" | "file"
  int q = 0;
  std::optional<int> p;

  bool operator==(const TargetDescriptor&) const = default;
};

struct AnalyzeOptions {
  int starts = 16;
  std::uint64_t seed = kDefaultSeed;
  int threads = 1;
  double gradTol = 1e-9;
  double zeroTol = kDefaultZeroTol;
  double normTol = io::kDefaultNormTol;
  double agreementTol = 1e-8;  // symmetric value counts as the minimum if within this of the numeric one
};

/// Closed-form symmetric stationary point, when the target has one.
struct SymmetricStationary {
  std::string family;             // "dicke" | "ring"
  double dsq = 0;
  double gradMaxNorm = 0;
  std::vector<double> params;     // (alpha0, alpha1) on every qubit
  std::vector<double> familySpectrum;  // e1..e4 from the closed forms
  io::SpectrumSummary spectrum;   // numeric Hessian at the symmetric point

  bool operator==(const SymmetricStationary&) const = default;
};

struct BestNumeric {
  double dsq = 0;
  double gradMaxNorm = 0;
  int iters = 0;
  int convergedStarts = 0;

  bool operator==(const BestNumeric&) const = default;
};

struct Agreement {
  std::optional<double> dcSquared;  // |symmetric - numeric|, both sources present
  double criticalResidual = 0;      // |D^2 - (1 - prod N)| at the reported extremum
  double gradMaxNorm = 0;

  bool operator==(const Agreement&) const = default;
};

struct Tolerances {
  double gradTol = 0;
  double zeroTol = 0;
  double normTol = 0;
  double agreementTol = 0;

  bool operator==(const Tolerances&) const = default;
};

struct AnalysisReport {
  TargetDescriptor target;
  double dcSquared = 0;
  double dNSquared = 0;    // 2 dcSquared
  double cosThetaCSq = 0;
  std::vector<double> params;  // gauge-fixed extremum
  io::SpectrumSummary spectrum;
  std::string provenance;  // "analytic" | "numeric" | "both"
  Agreement agreement;
  BestNumeric bestNumeric;
  std::optional<SymmetricStationary> symmetricStationary;
  std::uint64_t seed = kDefaultSeed;
  int starts = 0;
  Tolerances tolerances;

  bool operator==(const AnalysisReport&) const = default;
};

io::json to_json(const AnalysisReport& r);
AnalysisReport report_from_json(const io::json& j);

/// Multistart on every target; the closed-form point too for Dicke (3 <= q,
/// 1 <= p <= q-1) and ring (q >= 3) targets. The reported extremum is the
/// symmetric point when it is within agreementTol of the best numeric value,
/// otherwise the numeric one.
AnalysisReport analyze(const TargetState& target, const TargetDescriptor& desc, const AnalyzeOptions& opts);

struct SweepRow {
  std::string family;
  int q = 0;
  int p = 0;
  double dcSquared = 0;
  double tau = 0;
  double e1 = 0, e2 = 0, e3 = 0, e4 = 0;
  double e3OverTau = 0;
  double numericMinEigenvalue = 0;
  Classification classification = Classification::DegenerateNeedsHigherOrder;

  bool operator==(const SweepRow&) const = default;
};

/// family,q,p,dcSquared,tau,e1,e2,e3,e4,e3_over_tau,numericMinEigenvalue,classification
extern const std::vector<std::string> kSweepColumns;

/// One row per (q,p) for q in [qLo, qHi]; empty when qLo > qHi. Ring rows
/// carry p = 2 and the uniform-block e1..e4; classification always comes from
/// the numeric Hessian at the symmetric point.
std::vector<SweepRow> sweep(const std::string& family, int qLo, int qHi, int threads = 1);

std::string sweep_csv(const std::vector<SweepRow>& rows);
io::json sweep_json(const std::string& family, const std::vector<SweepRow>& rows);
std::vector<SweepRow> sweep_rows_from_csv(const std::string& csv);
std::vector<SweepRow> sweep_rows_from_json(const io::json& j);

}  // namespace geoent
