#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "stochorder/json_io.hpp"

namespace stochorder {

/// Claim values: verdict strings, numbers (infinities allowed), or flags.
using ClaimValue = std::variant<bool, double, std::string>;

struct Claim {
  std::string description;
  ClaimValue expected;
  ClaimValue computed;
  bool pass = false;
  double tolerance = 0.0;  // absolute, for numeric claims
  std::string note;

  friend bool operator==(const Claim&, const Claim&) = default;
};

struct ScenarioReport {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<Claim> claims;
  bool overall = false;

  friend bool operator==(const ScenarioReport&, const ScenarioReport&) = default;
};

struct GalleryConfig {
  QuadConfig quad;
  std::uint64_t seed = 20240917;
  /// Adds the stochastic-dominance cross-check against the independent sum
  /// to example5_pareto_dcx.
  bool external_crosscheck = false;
};

const std::vector<std::string>& scenario_names();

/// Throws UnknownScenario for names outside scenario_names().
ScenarioReport run_scenario(const std::string& name, const GalleryConfig& cfg = {});

io::Json to_json(const ScenarioReport& r);
/// Inverse of to_json; throws InvalidArgument on schema mismatch.
ScenarioReport report_from_json(const io::Json& j);

}  // namespace stochorder
