#include "cli.hpp"
#include "lluv/sweep_io.hpp"
#include <catch_amalgamated.hpp>
#include <filesystem>
#include <sstream>

using namespace lluv;
using namespace lluv::tools;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  std::vector<char*> argv;
  static std::string prog = "lluv";
  argv.push_back(prog.data());
  for (auto& a : args)
    argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string tmp(const std::string& name) {
  const auto d = fs::temp_directory_path() / "lluv_test_cli" / name;
  fs::remove_all(d);
  return d.string();
}

}  // namespace

TEST_CASE("bessel prints the closed form") {
  const Run r = invoke({"bessel", "--set", "beta=1", "--out", tmp("bessel")});
  CHECK(r.code == kOk);
  CHECK(r.out.find("x1 = 4.49340945790906") != std::string::npos);
  CHECK(r.out.find("mu = ") != std::string::npos);
  CHECK(r.out.find("R = ") != std::string::npos);
  CHECK(r.out.find("F = 4.96461") != std::string::npos);
  CHECK(fs::exists(fs::path(tmp("bessel_x")).parent_path()));
}

TEST_CASE("config errors exit with 2") {
  const std::string dir = tmp("bad");
  fs::create_directories(dir);
  const std::string cfg = dir + "/bad.conf";
  write_text(cfg, "alpha = 1\nlambda = 0.5\n");
  const Run r = invoke({"energy", "--config", cfg, "--out", dir});
  CHECK(r.code == kConfigError);
  CHECK(r.err.find("line 2") != std::string::npos);
  CHECK(invoke({"energy", "--set", "bogus=1", "--out", dir}).code == kConfigError);
  CHECK(invoke({"frobnicate"}).code == kConfigError);
  CHECK(invoke({}).code == kConfigError);
  CHECK(invoke({"energy", "--config", dir + "/missing.conf"}).code == kConfigError);
}

TEST_CASE("check and oracle suites pass on defaults") {
  const std::string dir = tmp("suites");
  const Run c = invoke({"check", "--out", dir});
  CHECK(c.code == kOk);
  CHECK(c.out.find("FAIL") == std::string::npos);
  CHECK(c.out.find("x_subadditive  100/100") != std::string::npos);
  CHECK(fs::exists(dir + "/check_report.txt"));
  const Run o = invoke({"oracle", "--out", dir});
  CHECK(o.code == kOk);
  CHECK(fs::exists(dir + "/oracle_report.txt"));
}

TEST_CASE("minimize-ll writes reproducible files") {
  const std::vector<std::string> common{"--set", "n_radial=4", "--set", "n_angular=4", "--set",
                                        "basis_size=6"};
  auto go = [&](const std::string& dir) {
    std::vector<std::string> a{"minimize-ll", "--out", dir};
    a.insert(a.end(), common.begin(), common.end());
    return invoke(a);
  };
  const std::string d1 = tmp("ll1"), d2 = tmp("ll2");
  const Run a = go(d1), b = go(d2);
  CHECK(a.code == kOk);
  CHECK(a.out == b.out);
  for (const char* f : {"/ll_profile.csv", "/ll_history.csv", "/effective_config.txt"})
    CHECK(read_text(d1 + f) == read_text(d2 + f));
}

TEST_CASE("sweep writes table, summary and config echo") {
  const std::string dir = tmp("sweep");
  const Run r = invoke({"sweep", "--out", dir, "--seed", "3", "--workers", "1", "--set",
                        "n_radial=4", "--set", "n_angular=4", "--set", "basis_size=6", "--set",
                        "lambdas=4,8", "--set", "f_grid_cells=400"});
  CHECK(r.code == kOk);
  const auto recs = read_records(dir + "/records.csv");
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].seed == 3);
  CHECK(fs::exists(dir + "/summary.json"));
  const RunConfig echo = parse_config(read_text(dir + "/effective_config.txt"));
  CHECK(echo.seed == 3);
  CHECK(echo.lambdas == std::vector<double>{4.0, 8.0});
  CHECK(r.err.find("point alpha=1") != std::string::npos);
}
