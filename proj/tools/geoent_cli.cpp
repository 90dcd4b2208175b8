// geoent: geometric entanglement analysis from the command line.
//
//   geoent analyze (--dicke q,p | --ring q | --state FILE) [--out FILE] [--seed N] [--starts N] [--norm-tol X]
//   geoent verify  --suite {gradient|hessian|eigen|schmidt|all} --qmax N
//   geoent sweep   --family {dicke|ring} --qrange A:B [--format json|csv]
//
// Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 numerical failure.
// GEOENT_THREADS caps the worker count (default: hardware concurrency).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "geoent/report.hpp"
#include "geoent/verify.hpp"

namespace {

using geoent::io::json;

constexpr int kExitOk = 0;
constexpr int kExitVerify = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

int fail(int code, const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}, {"exitCode", code}}.dump() << '\n';
  return code;
}

int thread_cap() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("GEOENT_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) n = std::min(n, cap);
    } catch (const std::exception&) {
      throw geoent::DomainError(std::string("GEOENT_THREADS is not an integer: '") + env + "'");
    }
  }
  return n;
}

std::pair<int, int> parse_pair(const std::string& text, char sep, const std::string& flag) {
  const auto pos = text.find(sep);
  try {
    if (pos == std::string::npos) throw std::invalid_argument("separator");
    std::size_t used1 = 0, used2 = 0;
    const std::string a = text.substr(0, pos), b = text.substr(pos + 1);
    const int x = std::stoi(a, &used1), y = std::stoi(b, &used2);
    if (used1 != a.size() || used2 != b.size()) throw std::invalid_argument("trailing");
    return {x, y};
  } catch (const std::exception&) {
    throw geoent::DomainError(flag + " expects A" + sep + "B, got '" + text + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric entanglement of pure multi-qubit states"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "Closest product state, Hessian spectrum, closed-form cross-check");
  std::string dicke, stateFile, outFile;
  int ring = 0;
  geoent::AnalyzeOptions aopts;
  auto* dickeOpt = analyze->add_option("--dicke", dicke, "Dicke target q,p");
  auto* ringOpt = analyze->add_option("--ring", ring, "ring target on q qubits");
  auto* stateOpt = analyze->add_option("--state", stateFile, "state file {\"q\":..,\"coeffs\":[..]}");
  dickeOpt->excludes(ringOpt)->excludes(stateOpt);
  ringOpt->excludes(stateOpt);
  analyze->add_option("--out", outFile, "write the report here instead of stdout");
  analyze->add_option("--seed", aopts.seed, "base seed for multistart")->capture_default_str();
  analyze->add_option("--starts", aopts.starts, "number of multistart runs")->capture_default_str()->check(CLI::PositiveNumber);
  analyze->add_option("--norm-tol", aopts.normTol, "state-file norm tolerance")->capture_default_str()->check(CLI::NonNegativeNumber);

  auto* verify = app.add_subcommand("verify", "Run the self-check suites");
  std::string suite = "all";
  int qmax = 4;
  verify->add_option("--suite", suite, "suite name")->capture_default_str()->check(CLI::IsMember(geoent::kVerifySuites));
  verify->add_option("--qmax", qmax, "largest qubit count")->capture_default_str();

  auto* sweepCmd = app.add_subcommand("sweep", "Closed-form values and spectra over a range of q");
  std::string family, qrange, format = "json";
  sweepCmd->add_option("--family", family, "dicke or ring")->required()->check(CLI::IsMember({"dicke", "ring"}));
  sweepCmd->add_option("--qrange", qrange, "inclusive range A:B")->required();
  sweepCmd->add_option("--format", format, "json or csv")->capture_default_str()->check(CLI::IsMember({"json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kExitUsage, "usage", e.what());
  }

  try {
    if (*analyze) {
      const int sources = (*dickeOpt ? 1 : 0) + (*ringOpt ? 1 : 0) + (*stateOpt ? 1 : 0);
      if (sources != 1) return fail(kExitUsage, "usage", "analyze needs exactly one of --dicke, --ring, --state");
      aopts.threads = thread_cap();
      geoent::TargetDescriptor desc;
      std::optional<geoent::TargetState> target;
      if (*dickeOpt) {
        const auto [q, p] = parse_pair(dicke, ',', "--dicke");
        target = geoent::make_dicke(q, p);
        desc = {"dicke", q, p};
      } else if (*ringOpt) {
        target = geoent::make_ring(ring);
        desc = {"ring", ring, std::nullopt};
      } else {
        target = geoent::io::load_state(stateFile, aopts.normTol);
        desc = {"file", target->qubits(), std::nullopt};
      }
      const std::string text = geoent::to_json(geoent::analyze(*target, desc, aopts)).dump(2) + "\n";
      if (outFile.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(outFile);
        if (!out) return fail(kExitUsage, "io", "cannot write '" + outFile + "'");
        out << text;
      }
      return kExitOk;
    }
    if (*verify) {
      const bool ok = geoent::run_verify(suite, qmax, [](const geoent::CheckResult& c) {
        std::cout << geoent::to_json(c).dump() << '\n';
      });
      std::cout << json{{"summary", ok ? "pass" : "fail"}, {"suite", suite}, {"qmax", qmax}}.dump() << '\n';
      return ok ? kExitOk : kExitVerify;
    }
    if (*sweepCmd) {
      const auto [lo, hi] = parse_pair(qrange, ':', "--qrange");
      const auto rows = geoent::sweep(family, lo, hi, thread_cap());
      if (format == "csv")
        std::cout << geoent::sweep_csv(rows);
      else
        std::cout << geoent::sweep_json(family, rows).dump(2) << '\n';
      return kExitOk;
    }
  } catch (const geoent::NumericalError& e) {
    return fail(kExitNumerical, "numerical", e.what());
  } catch (const std::domain_error& e) {
    return fail(kExitUsage, "domain", e.what());
  } catch (const std::exception& e) {
    return fail(kExitNumerical, "internal", e.what());
  }
  return kExitUsage;
}
