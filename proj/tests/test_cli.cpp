#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "twofluid/app.hpp"

using namespace twofluid;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::current_path() / ("test_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

const char* kSmallRun = R"([grid]
n = 32
[time]
t_end = 0.01
snapshot_interval = 0.005
)";

}  // namespace

TEST_CASE("closure table shape and values") {
  ClosureTableSpec spec;
  spec.steps = 4;
  std::ostringstream out, err;
  CHECK(cmd_closure_table(spec, out, err) == kExitOk);
  const auto rows = lines(out.str());
  CHECK(rows.size() == 1 + 25);
  CHECK(rows.front() == "R,Q,Z,alpha,rho_minus,p,vacuum");
  CHECK(rows[1] == "0,0,0,0,0,0,1");

  ClosureTableSpec one;
  one.r_min = one.r_max = 1.0;
  one.q_min = one.q_max = 2.0;
  one.steps = 1;
  std::ostringstream o1;
  CHECK(cmd_closure_table(one, o1, err) == kExitOk);
  std::istringstream row(lines(o1.str())[1]);
  std::vector<double> v;
  for (std::string cell; std::getline(row, cell, ',');) v.push_back(std::stod(cell));
  CHECK(v[2] == Approx(2.0).epsilon(1e-13));
  CHECK(v[3] == Approx(0.5).epsilon(1e-13));
  CHECK(v[4] == Approx(4.0).epsilon(1e-13));
  CHECK(v[5] == Approx(8.0).epsilon(1e-13));
  CHECK(v[6] == 0.0);
}

TEST_CASE("closure table with R fixed at zero has a zero alpha column") {
  ClosureTableSpec spec;
  spec.r_max = 0.0;
  spec.steps = 5;
  std::ostringstream out, err;
  CHECK(cmd_closure_table(spec, out, err) == kExitOk);
  const auto rows = lines(out.str());
  REQUIRE(rows.size() == 37);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    std::istringstream row(rows[k]);
    std::vector<std::string> c;
    for (std::string cell; std::getline(row, cell, ',');) c.push_back(cell);
    CHECK(c[3] == "0");
    CHECK(c[6] == (c[1] == "0" ? "1" : "0"));
  }
}

TEST_CASE("closure table rejects bad ranges") {
  ClosureTableSpec spec;
  spec.r_min = 2.0;
  spec.r_max = 1.0;
  std::ostringstream out, err;
  CHECK(cmd_closure_table(spec, out, err) == kExitConfigError);
  spec = {};
  spec.gamma_minus = 1.0;
  CHECK(cmd_closure_table(spec, out, err) == kExitConfigError);
}

TEST_CASE("validate reports errors and warnings") {
  TempDir dir("validate");
  std::ostringstream out, err;
  CHECK(cmd_validate(dir.file("ok.ini", "[physics]\ngamma_plus = 3\n"), out, err) == kExitOk);
  CHECK(err.str().empty());
  CHECK(out.str().find("[physics]") != std::string::npos);
  std::ostringstream out2, err2;
  CHECK(cmd_validate(dir.file("warn.ini", "[physics]\ngamma_plus = 1.5\n"), out2, err2) == kExitOk);
  CHECK(err2.str().find("warning:") != std::string::npos);
  std::ostringstream out3, err3;
  CHECK(cmd_validate(dir.file("bad.ini", "[physics]\ngamma_minus = 1\n"), out3, err3) ==
        kExitConfigError);
  CHECK(err3.str().find("physics.gamma_minus") != std::string::npos);
  CHECK(cmd_validate((dir.path / "missing.ini").string(), out3, err3) == kExitConfigError);
}

TEST_CASE("run with t_end zero writes the initial snapshot and a report") {
  TempDir dir("run0");
  const std::string cfg = dir.file("c.ini", "[grid]\nn = 16\n[time]\nt_end = 0\n");
  std::ostringstream log;
  CHECK(cmd_run(cfg, (dir.path / "out").string(), false, log) == kExitOk);
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir.path / "out")) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  CHECK(names == std::vector<std::string>{"report.json", "snapshot_00000.csv"});
  const auto j = nlohmann::json::parse(slurp(dir.path / "out" / "report.json"));
  CHECK(j["steps"] == 0);
  CHECK(j["snapshots"].size() == 1);
  CHECK(lines(slurp(dir.path / "out" / "snapshot_00000.csv")).size() == 17);
}

TEST_CASE("repeated runs are byte identical") {
  TempDir dir("twin");
  const std::string cfg = dir.file("c.ini", kSmallRun);
  std::ostringstream log;
  REQUIRE(cmd_run(cfg, (dir.path / "a").string(), false, log) == kExitOk);
  REQUIRE(cmd_run(cfg, (dir.path / "b").string(), false, log) == kExitOk);
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir.path / "a")) {
    CHECK(slurp(e.path()) == slurp(dir.path / "b" / e.path().filename()));
    ++files;
  }
  CHECK(files == 4);
  const auto j = nlohmann::json::parse(slurp(dir.path / "a" / "report.json"));
  CHECK(j["energy"]["audit"]["passed"] == true);
  CHECK(j["conservation"]["drift_R"].get<double>() < 1e-13);
}

TEST_CASE("runtime failures leave a failure record") {
  TempDir dir("fail");
  const std::string cfg =
      dir.file("c.ini", std::string(kSmallRun) + "[solver]\nclosure_max_iter = 1\n");
  std::ostringstream log;
  CHECK(cmd_run(cfg, (dir.path / "out").string(), true, log) == kExitRuntimeFailure);
  const auto j = nlohmann::json::parse(slurp(dir.path / "out" / "failure.json"));
  CHECK(j["error"] == "MaxIterExceeded");
  CHECK(j.contains("cell"));
  CHECK(j["time"] == 0.0);
}

TEST_CASE("run with a bad config exits with the config code") {
  TempDir dir("badrun");
  std::ostringstream log;
  CHECK(cmd_run(dir.file("c.ini", "[grid]\nn = two\n"), (dir.path / "out").string(), false, log) ==
        kExitConfigError);
}

TEST_CASE("compare of twins sits at the noise floor") {
  TempDir dir("compare");
  const std::string cfg = dir.file("c.ini", kSmallRun);
  std::ostringstream log;
  CHECK(cmd_compare(cfg, std::nullopt, RefMode::Twin, 4, (dir.path / "out").string(), false, log) ==
        kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir.path / "out" / "verify.json"));
  CHECK(j["max_E_total"] == 0.0);
  CHECK(j["gronwall"]["at_noise_floor"] == true);
  CHECK(j["gronwall"]["identical_data"] == true);
  const auto rows = lines(slurp(dir.path / "out" / "re_report.csv"));
  CHECK(rows.front() == "t,E_kin,E_alpha,E_breg_plus,E_breg_minus,E_total,D");
  CHECK(rows.size() == 4);
}

TEST_CASE("mms command exit codes") {
  TempDir dir("mms");
  const std::string cfg =
      dir.file("c.ini", "[grid]\nn = 16\n[initial]\npreset = mms\n[time]\nt_end = 0.05\n");
  std::ostringstream out, err;
  CHECK(cmd_mms(cfg, 2, out, err) == kExitConfigError);
  std::ostringstream good;
  CHECK(cmd_mms(cfg, 3, good, err) == kExitOk);
  const auto rows = lines(good.str());
  REQUIRE(rows.size() == 5);
  CHECK(rows.back().rfind("min_order,", 0) == 0);
  CHECK(rows.back().substr(rows.back().size() - 5) == ",pass");

  const std::string bad = dir.file(
      "d.ini",
      "[grid]\nn = 16\n[initial]\npreset = mms\n[time]\nt_end = 0.05\n[solver]\nflux_sign_defect = true\n");
  std::ostringstream fail;
  CHECK(cmd_mms(bad, 3, fail, err) == kExitVerificationFailure);
  CHECK(lines(fail.str()).back().substr(lines(fail.str()).back().size() - 5) == ",fail");
}

TEST_CASE("ref mode names") {
  CHECK(parse_ref_mode("fine") == RefMode::Fine);
  CHECK(std::string(to_string(RefMode::Mms)) == "mms");
  CHECK_THROWS_AS(parse_ref_mode("coarse"), Error);
}
