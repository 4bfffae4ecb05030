// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Registered invariant checks, each comparing the implementation against an
// independent oracle (finite differences, exhaustive enumeration or closed
// form) at double precision.

#ifndef SMDN_PROPERTY_SUITE_HPP_
#define SMDN_PROPERTY_SUITE_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace smdn {

struct CaseResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
  double seconds = 0.0;
};

struct SuiteResult {
  std::vector<CaseResult> cases;

  int failures() const;
};

struct OracleCase {
  std::string name;
  std::uint64_t seed = 0;
  std::string oracle;
  double tolerance = 0.0;
  /// Returns the measured value; the case passes when `passes(measured)`.
  std::function<double()> measure;
  std::function<bool(double)> passes;
};

const std::vector<OracleCase>& registered_cases();

/// Runs every case whose name contains `filter` (all when empty). Prints one
/// line per case to `text` when given.
SuiteResult run_suite(const std::string& filter = "", std::ostream* text = nullptr);

std::string suite_json(const SuiteResult& result);

}  // namespace smdn

#endif  // SMDN_PROPERTY_SUITE_HPP_
