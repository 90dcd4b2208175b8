#include "geoent/report.hpp"

#include <atomic>
#include <sstream>
#include <thread>

#include "geoent/symmetric.hpp"

namespace geoent {

namespace {

using io::json;

json opt_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json symmetric_to_json(const SymmetricStationary& s) {
  return {{"family", s.family},
          {"dsq", s.dsq},
          {"gradMaxNorm", s.gradMaxNorm},
          {"params", s.params},
          {"familySpectrum", s.familySpectrum},
          {"spectrum", io::spectrum_to_json(s.spectrum)}};
}

SymmetricStationary symmetric_from_json(const json& j) {
  SymmetricStationary s;
  s.family = j.at("family").get<std::string>();
  s.dsq = j.at("dsq").get<double>();
  s.gradMaxNorm = j.at("gradMaxNorm").get<double>();
  s.params = j.at("params").get<std::vector<double>>();
  s.familySpectrum = j.at("familySpectrum").get<std::vector<double>>();
  s.spectrum = io::spectrum_from_json(j.at("spectrum"));
  return s;
}

struct SymmetricPoint {
  SymmetricStationary summary;
  ProductParams params;
};

std::optional<SymmetricPoint> symmetric_point(const TargetState& target, const TargetDescriptor& desc,
                                              double zeroTol) {
  const int q = desc.q;
  std::optional<SymmetricParams> sp;
  std::vector<double> family;
  if (desc.kind == "dicke" && desc.p && q >= 3 && *desc.p >= 1 && *desc.p <= q - 1) {
    const auto sol = solve_dicke<double>(q, *desc.p);
    sp = sol.params();
    family = {sol.spectrum.e1, sol.spectrum.e2, sol.spectrum.e3, sol.spectrum.e4};
  } else if (desc.kind == "ring" && q >= 3) {
    const auto sol = solve_ring<double>(q);
    sp = sol.params();
    family = {sol.uniformBlockSpectrum.e1, sol.uniformBlockSpectrum.e2, sol.uniformBlockSpectrum.e3, sol.uniformBlockSpectrum.e4};
  }
  if (!sp) return std::nullopt;

  const ProductParams params = embed_symmetric(*sp);
  const DistanceReport<double> d = distance_sq(target, params);
  SymmetricStationary s;
  s.family = desc.kind;
  s.dsq = d.dsq;
  s.gradMaxNorm = d.grad.cwiseAbs().maxCoeff();
  s.params = io::to_std(params.flat());
  s.familySpectrum = std::move(family);
  s.spectrum = io::summarize(eig_symmetric(build_hessian(target, params), params, zeroTol));
  return SymmetricPoint{std::move(s), params};
}

}  // namespace

io::json to_json(const AnalysisReport& r) {
  return {{"schema", kReportSchema},
          {"target", {{"kind", r.target.kind}, {"q", r.target.q}, {"p", r.target.p ? json(*r.target.p) : json(nullptr)}}},
          {"dcSquared", r.dcSquared},
          {"dNSquared", r.dNSquared},
          {"cosThetaCSq", r.cosThetaCSq},
          {"extremum", {{"params", r.params}}},
          {"spectrum", io::spectrum_to_json(r.spectrum)},
          {"provenance", r.provenance},
          {"agreement",
           {{"dcSquared", opt_to_json(r.agreement.dcSquared)},
            {"criticalResidual", r.agreement.criticalResidual},
            {"gradMaxNorm", r.agreement.gradMaxNorm}}},
          {"bestNumeric",
           {{"dsq", r.bestNumeric.dsq},
            {"gradMaxNorm", r.bestNumeric.gradMaxNorm},
            {"iters", r.bestNumeric.iters},
            {"convergedStarts", r.bestNumeric.convergedStarts}}},
          {"symmetricStationary", r.symmetricStationary ? symmetric_to_json(*r.symmetricStationary) : json(nullptr)},
          {"seed", r.seed},
          {"starts", r.starts},
          {"tolerances",
           {{"gradTol", r.tolerances.gradTol},
            {"zeroTol", r.tolerances.zeroTol},
            {"normTol", r.tolerances.normTol},
            {"agreementTol", r.tolerances.agreementTol}}}};
}

AnalysisReport report_from_json(const io::json& j) {
  if (j.at("schema").get<std::string>() != kReportSchema)
    throw DomainError("unsupported report schema '" + j.at("schema").get<std::string>() + "'");
  AnalysisReport r;
  const json& t = j.at("target");
  r.target.kind = t.at("kind").get<std::string>();
  r.target.q = t.at("q").get<int>();
  if (!t.at("p").is_null()) r.target.p = t.at("p").get<int>();
  r.dcSquared = j.at("dcSquared").get<double>();
  r.dNSquared = j.at("dNSquared").get<double>();
  r.cosThetaCSq = j.at("cosThetaCSq").get<double>();
  r.params = j.at("extremum").at("params").get<std::vector<double>>();
  r.spectrum = io::spectrum_from_json(j.at("spectrum"));
  r.provenance = j.at("provenance").get<std::string>();
  const json& a = j.at("agreement");
  r.agreement.dcSquared = opt_from_json(a.at("dcSquared"));
  r.agreement.criticalResidual = a.at("criticalResidual").get<double>();
  r.agreement.gradMaxNorm = a.at("gradMaxNorm").get<double>();
  const json& b = j.at("bestNumeric");
  r.bestNumeric.dsq = b.at("dsq").get<double>();
  r.bestNumeric.gradMaxNorm = b.at("gradMaxNorm").get<double>();
  r.bestNumeric.iters = b.at("iters").get<int>();
  r.bestNumeric.convergedStarts = b.at("convergedStarts").get<int>();
  if (!j.at("symmetricStationary").is_null()) r.symmetricStationary = symmetric_from_json(j.at("symmetricStationary"));
  r.seed = j.at("seed").get<std::uint64_t>();
  r.starts = j.at("starts").get<int>();
  const json& tol = j.at("tolerances");
  r.tolerances = {tol.at("gradTol").get<double>(), tol.at("zeroTol").get<double>(), tol.at("normTol").get<double>(),
                  tol.at("agreementTol").get<double>()};
  return r;
}

AnalysisReport analyze(const TargetState& target, const TargetDescriptor& desc, const AnalyzeOptions& opts) {
  if (desc.q != target.qubits()) throw DomainError("descriptor qubit count does not match the target");
  OptimOptions oo;
  oo.gradTol = opts.gradTol;
  oo.threads = opts.threads;
  oo.seedList = seed_range(static_cast<std::size_t>(std::max(opts.starts, 0)), opts.seed);

  const auto runs = multistart_runs(target, opts.starts, oo);
  const Extremum<double>* best = nullptr;
  int converged = 0;
  for (const auto& r : runs) {
    if (!r || !r->converged) continue;
    ++converged;
    if (best == nullptr || r->dsq < best->dsq) best = &*r;
  }
  if (best == nullptr) throw NumericalError("none of the " + std::to_string(opts.starts) + " multistart runs converged");

  AnalysisReport rep;
  rep.target = desc;
  rep.seed = opts.seed;
  rep.starts = opts.starts;
  rep.tolerances = {opts.gradTol, opts.zeroTol, opts.normTol, opts.agreementTol};
  rep.bestNumeric = {best->dsq, best->gradNorm, best->iters, converged};

  const auto sym = symmetric_point(target, desc, opts.zeroTol);
  ProductParams extremum = best->params;
  rep.provenance = "numeric";
  if (sym) {
    rep.symmetricStationary = sym->summary;
    rep.agreement.dcSquared = std::abs(sym->summary.dsq - best->dsq);
    if (sym->summary.dsq <= best->dsq + opts.agreementTol) {
      extremum = gauge_fix(sym->params);
      rep.provenance = "both";
    }
  }

  const CriticalIdentities<double> ci = critical_identities(target, extremum, opts.gradTol);
  rep.dcSquared = distance_value(target, extremum);
  rep.dNSquared = ci.dNsq;
  rep.cosThetaCSq = ci.cosThetaC * ci.cosThetaC;
  rep.params = io::to_std(extremum.flat());
  rep.spectrum = io::summarize(eig_symmetric(build_hessian(target, extremum), extremum, opts.zeroTol));
  rep.agreement.criticalResidual = ci.cdResidual;
  rep.agreement.gradMaxNorm = ci.gradMaxNorm;
  return rep;
}

const std::vector<std::string> kSweepColumns = {"family", "q",  "p",  "dcSquared",   "tau",
                                                "e1",     "e2", "e3", "e4",          "e3_over_tau",
                                                "numericMinEigenvalue", "classification"};

std::vector<SweepRow> sweep(const std::string& family, int qLo, int qHi, int threads) {
  if (family != "dicke" && family != "ring") throw DomainError("unknown family '" + family + "'");
  if (qLo > qHi) return {};
  if (qLo < 3) throw DomainError("sweep needs q >= 3, got " + std::to_string(qLo));
  check_qubit_count(qHi);

  std::vector<std::pair<int, int>> jobs;
  for (int q = qLo; q <= qHi; ++q) {
    if (family == "ring")
      jobs.emplace_back(q, 2);
    else
      for (int p = 1; p <= q - 1; ++p) jobs.emplace_back(q, p);
  }

  std::vector<SweepRow> rows(jobs.size());
  auto fill = [&](std::size_t k) {
    const auto [q, p] = jobs[k];
    SweepRow& row = rows[k];
    row.family = family;
    row.q = q;
    row.p = p;
    std::optional<SymmetricParams> sp;
    TargetState target = family == "ring" ? make_ring(q) : make_dicke(q, p);
    FamilySpectrum<double> e{};
    if (family == "ring") {
      const auto sol = solve_ring<double>(q);
      row.dcSquared = sol.dsq;
      row.tau = sol.tau;
      e = sol.uniformBlockSpectrum;
      sp = sol.params();
    } else {
      const auto sol = solve_dicke<double>(q, p);
      row.dcSquared = sol.dcSquared;
      row.tau = sol.tau;
      e = sol.spectrum;
      sp = sol.params();
    }
    row.e1 = e.e1;
    row.e2 = e.e2;
    row.e3 = e.e3;
    row.e4 = e.e4;
    row.e3OverTau = e.e3 / row.tau;
    const ProductParams params = embed_symmetric(*sp);
    const auto spec = eig_symmetric(build_hessian(target, params), params);
    row.numericMinEigenvalue = spec.eigenvalues(0);
    row.classification = spec.classification;
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) fill(k);
  };
  const int n = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < kSweepColumns.size(); ++i) out << (i ? "," : "") << kSweepColumns[i];
  out << '\n';
  using io::format_double;
  for (const auto& r : rows) {
    out << r.family << ',' << r.q << ',' << r.p << ',' << format_double(r.dcSquared) << ',' << format_double(r.tau)
        << ',' << format_double(r.e1) << ',' << format_double(r.e2) << ',' << format_double(r.e3) << ','
        << format_double(r.e4) << ',' << format_double(r.e3OverTau) << ',' << format_double(r.numericMinEigenvalue)
        << ',' << to_string(r.classification) << '\n';
  }
  return out.str();
}

io::json sweep_json(const std::string& family, const std::vector<SweepRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back({{"family", r.family},
                   {"q", r.q},
                   {"p", r.p},
                   {"dcSquared", r.dcSquared},
                   {"tau", r.tau},
                   {"e1", r.e1},
                   {"e2", r.e2},
                   {"e3", r.e3},
                   {"e4", r.e4},
                   {"e3_over_tau", r.e3OverTau},
                   {"numericMinEigenvalue", r.numericMinEigenvalue},
                   {"classification", to_string(r.classification)}});
  return {{"schema", kReportSchema}, {"family", family}, {"columns", kSweepColumns}, {"rows", arr}};
}

std::vector<SweepRow> sweep_rows_from_json(const io::json& j) {
  std::vector<SweepRow> rows;
  for (const auto& r : j.at("rows")) {
    SweepRow row;
    row.family = r.at("family").get<std::string>();
    row.q = r.at("q").get<int>();
    row.p = r.at("p").get<int>();
    row.dcSquared = r.at("dcSquared").get<double>();
    row.tau = r.at("tau").get<double>();
    row.e1 = r.at("e1").get<double>();
    row.e2 = r.at("e2").get<double>();
    row.e3 = r.at("e3").get<double>();
    row.e4 = r.at("e4").get<double>();
    row.e3OverTau = r.at("e3_over_tau").get<double>();
    row.numericMinEigenvalue = r.at("numericMinEigenvalue").get<double>();
    row.classification = classification_from_string(r.at("classification").get<std::string>());
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SweepRow> sweep_rows_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::vector<SweepRow> rows;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    if (cells.size() != kSweepColumns.size()) throw DomainError("CSV row has " + std::to_string(cells.size()) + " cells");
    if (header) {
      if (cells != kSweepColumns) throw DomainError("unexpected CSV header");
      header = false;
      continue;
    }
    SweepRow r;
    r.family = cells[0];
    r.q = std::stoi(cells[1]);
    r.p = std::stoi(cells[2]);
    double* numeric[] = {&r.dcSquared, &r.tau, &r.e1, &r.e2, &r.e3, &r.e4, &r.e3OverTau, &r.numericMinEigenvalue};
    for (std::size_t k = 0; k < std::size(numeric); ++k) *numeric[k] = std::stod(cells[3 + k]);
    r.classification = classification_from_string(cells[11]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace geoent
