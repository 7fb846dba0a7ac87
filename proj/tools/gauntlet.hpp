#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace lluv::tools {

struct PropertyCount {
  std::string name;
  std::string statement;
  int trials = 0;
  int violations = 0;
  double worst_margin = 0.0;  // smallest slack seen; negative means violated
  std::vector<std::string> counterexamples;
};

struct SuiteReport {
  std::vector<PropertyCount> items;
  double seconds = 0.0;
  bool ok() const;
  std::string text() const;
};

// Randomized operator inequalities and identities, `trials` seeded cases each.
SuiteReport run_gauntlet(std::uint64_t seed, int trials = 100);

// Brute-force Fock-space checks against closed forms.
SuiteReport run_fock_oracles(std::uint64_t seed);

}  // namespace lluv::tools
