#pragma once

// Module invariants as seeded property suites, shared by the unit tests and
// the acceptance runner.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gen.hpp"

namespace hsdoa::testing {

/// Returns a failure description, or nothing when the case holds.
using PropertyFn = std::function<std::optional<std::string>(Gen&)>;

struct Property {
  std::string name;
  std::string module;
  PropertyFn check;
};

struct PropertyOutcome {
  std::string name;
  int cases = 0;
  int failures = 0;
  std::string first_failure;  ///< "case <i>: <message>"
};

const std::vector<Property>& property_suites();

PropertyOutcome run_property(const Property& p, int cases, std::uint64_t seed = 20240601);

}  // namespace hsdoa::testing
