#pragma once
#include "lluv/asymptotics.hpp"
#include "lluv/fock_oracle.hpp"
#include <cstdint>
#include <string>
#include <vector>

namespace lluv {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunConfig {
  // [model]
  double alpha = 1.0;
  double lambda = 4.0;
  double sigma = 0.0;
  double beta = 1.0;  // F-side coupling (minimize-f, bessel)
  // [shell]
  int n_radial = kDefaultRadialOrder;
  int n_angular = kDefaultAngularOrder;
  // [optimizer]
  int basis_size = 12;
  int max_iterations = 40;
  double tolerance = 1e-7;
  std::string method = "gradient";  // gradient | simplex
  double reference_extent = 8.0;
  int f_grid_cells = 2000;
  int f_max_iterations = 20000;
  double f_tolerance = 1e-11;
  // [sweep]
  std::vector<double> alphas;   // defaults to {alpha}
  std::vector<double> lambdas;  // defaults to {lambda}
  std::string side = "upper";   // upper | lower
  std::vector<double> ladder;   // localization rungs; empty = derived from the schedule
  bool record_runtime = false;
  std::uint64_t seed = 0;

  bool operator==(const RunConfig&) const = default;

  ShellConfig shell() const { return {n_radial, n_angular}; }
  LLConfig optimizer() const;
  FMinConfig f_config() const;
  ScheduleSide schedule_side() const;
  // alphas x lambdas, alpha-major
  std::vector<std::pair<double, double>> grid() const;
};

// Flat `key = value` lines, optional [model] [shell] [optimizer] [sweep]
// headers, `#` comments.  Lists are comma separated.  Keys may appear at top
// level or in their own section.  overrides ("key=value") replace file
// entries and are validated the same way.  alpha and lambda are required.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
RunConfig read_config(const std::string& path, const std::vector<std::string>& overrides = {});
// Effective config in the input syntax; parse_config(write_config(c)) == c.
std::string write_config(const RunConfig& cfg);

// Comma separated, fixed column order, 17 significant digits.
std::string records_to_string(const std::vector<SweepRecord>& records);
std::vector<SweepRecord> records_from_string(const std::string& text);
void write_records(const std::vector<SweepRecord>& records, const std::string& path);
std::vector<SweepRecord> read_records(const std::string& path);

// JSON document with fits, the convention adjudication and the tool version.
std::string summary_json(const ExponentReport& report, const RunConfig& cfg);

// Regression instances for the brute-force oracle.
struct FockFixture {
  std::string name;
  QuadraticBlocks blocks;
  int truncation = 10;  // total occupation cap
  double expected = 0.0;
  double tolerance = 1e-8;

  bool operator==(const FockFixture& o) const;
};

std::vector<FockFixture> fixtures_from_string(const std::string& text);
std::string fixtures_to_string(const std::vector<FockFixture>& fixtures);
std::vector<FockFixture> read_fixtures(const std::string& path);

// Throws InvalidInput when the file cannot be written.
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

// 17 significant digits
std::string format_double(double x);

}  // namespace lluv
