#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args, bool mergeStderr = false) {
  const std::string cmd = std::string(GEOENT_CLI) + " " + args + (mergeStderr ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);)
    if (!l.empty()) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("analyze --dicke 3,1") {
  const Run r = run("analyze --dicke 3,1");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["schema"] == "geoent/1");
  CHECK(std::abs(j["dcSquared"].get<double>() - 5.0 / 9) <= 1e-8);
  CHECK(j["spectrum"]["classification"] == "local-minimum");
  CHECK(j["spectrum"]["zeroModes"] == 2);
  CHECK(j["seed"] == 42);
}

TEST_CASE("analyze --ring 6") {
  const Run r = run("analyze --ring 6");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["symmetricStationary"]["spectrum"]["classification"] == "saddle");
  CHECK(j["bestNumeric"]["dsq"].get<double>() < j["symmetricStationary"]["dsq"].get<double>());
}

TEST_CASE("analyze --state with a Bell pair, written to --out") {
  const std::string state = temp_file("geoent_cli_bell.json", R"({"q": 2, "coeffs": [0.7071067811865476, 0, 0, 0.7071067811865476]})");
  const std::string out = (std::filesystem::temp_directory_path() / "geoent_cli_report.json").string();
  std::filesystem::remove(out);
  const Run r = run("analyze --state " + state + " --out " + out);
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(out);
  const json j = json::parse(in);
  CHECK(std::abs(j["dcSquared"].get<double>() - 0.5) <= 1e-8);
  CHECK(j["target"]["kind"] == "file");
}

TEST_CASE("analyze is reproducible and honours --seed") {
  const Run a = run("analyze --ring 5 --starts 6 --seed 7");
  const Run b = run("analyze --ring 5 --starts 6 --seed 7");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(json::parse(a.out)["seed"] == 7);
  const Run serial = run("analyze --ring 5 --starts 6 --seed 7");
  const std::string cmd = std::string("GEOENT_THREADS=1 ") + GEOENT_CLI + " analyze --ring 5 --starts 6 --seed 7";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  pclose(pipe);
  CHECK(out == serial.out);
}

TEST_CASE("analyze usage and input errors") {
  CHECK(run("analyze").code == 2);
  CHECK(run("analyze --dicke 3,1 --ring 4").code == 2);
  CHECK(run("analyze --dicke 3").code == 2);
  CHECK(run("analyze --ring 2").code == 2);
  CHECK(run("analyze --dicke 25,1").code == 2);
  const std::string bad = temp_file("geoent_cli_bad.json", R"({"q": 2, "coeffs": [1, 0, 0]})");
  const Run r = run("analyze --state " + bad, true);
  CHECK(r.code == 2);
  const json err = json::parse(r.out);
  CHECK(err.contains("error"));
  CHECK(err["exitCode"] == 2);
  const std::string off = temp_file("geoent_cli_off.json", R"({"q": 2, "coeffs": [1.001, 0, 0, 0]})");
  CHECK(run("analyze --state " + off).code == 2);
  CHECK(run("analyze --state " + off + " --norm-tol 0.01").code == 0);
  CHECK(run("frobnicate").code == 2);
}

TEST_CASE("verify suites exit 0 and stream JSON lines") {
  for (const char* args : {"verify --suite eigen --qmax 8", "verify --suite gradient --qmax 4"}) {
    const Run r = run(args);
    CHECK(r.code == 0);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() > 1);
    for (std::size_t k = 0; k + 1 < ls.size(); ++k) CHECK(json::parse(ls[k])["pass"] == true);
    CHECK(json::parse(ls.back())["summary"] == "pass");
  }
  const auto start = std::chrono::steady_clock::now();
  CHECK(run("verify --suite all --qmax 3").code == 0);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(10));
  CHECK(run("verify --suite all --qmax 13").code == 2);
  CHECK(run("verify --suite nope --qmax 3").code == 2);
}

TEST_CASE("sweep output") {
  const Run csv = run("sweep --family dicke --qrange 3:6 --format csv");
  REQUIRE(csv.code == 0);
  const auto ls = lines(csv.out);
  CHECK(ls.front() == "family,q,p,dcSquared,tau,e1,e2,e3,e4,e3_over_tau,numericMinEigenvalue,classification");
  CHECK(ls.size() == 1 + 14);
  for (std::size_t k = 1; k < ls.size(); ++k) {
    std::vector<std::string> cells;
    std::istringstream in(ls[k]);
    for (std::string c; std::getline(in, c, ',');) cells.push_back(c);
    const int q = std::stoi(cells[1]);
    CHECK(std::stod(cells[9]) == doctest::Approx(1 - 1.0 / (q - 1)).epsilon(1e-14));
  }

  const Run js = run("sweep --family ring --qrange 3:8");
  REQUIRE(js.code == 0);
  const json j = json::parse(js.out);
  for (const auto& row : j["rows"]) {
    if (row["q"].get<int>() <= 5)
      CHECK(row["e4"].get<double>() > 0);
    else
      CHECK(row["e4"].get<double>() < 0);
  }

  const Run empty = run("sweep --family dicke --qrange 5:4 --format csv");
  CHECK(empty.code == 0);
  CHECK(lines(empty.out).size() == 1);
  CHECK(run("sweep --family dicke --qrange 2:4").code == 2);
  CHECK(run("sweep --family dicke --qrange 3-4").code == 2);
  CHECK(run("sweep --family ghz --qrange 3:4").code == 2);
}

TEST_CASE("sweep JSON and CSV agree digit for digit") {
  const json j = json::parse(run("sweep --family ring --qrange 3:7").out);
  const auto ls = lines(run("sweep --family ring --qrange 3:7 --format csv").out);
  REQUIRE(ls.size() == j["rows"].size() + 1);
  for (std::size_t k = 0; k < j["rows"].size(); ++k) {
    std::vector<std::string> cells;
    std::istringstream in(ls[k + 1]);
    for (std::string c; std::getline(in, c, ',');) cells.push_back(c);
    const auto& row = j["rows"][k];
    CHECK(std::stod(cells[3]) == row["dcSquared"].get<double>());
    CHECK(std::stod(cells[8]) == row["e4"].get<double>());
    CHECK(std::stod(cells[10]) == row["numericMinEigenvalue"].get<double>());
  }
}
