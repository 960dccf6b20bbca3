// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace milac {

// Outcome of one fixed-seed verification suite.
struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;  // first failing check, empty when passed
  double seconds = 0.0;
  int checks = 0;
};

struct SelftestReport {
  std::vector<SuiteResult> suites;

  bool all_passed() const;
  // One "PASS/FAIL name (checks, seconds)" line per suite plus a footer.
  std::string summary() const;
};

// Runs every suite with fixed seeds. `inject_fault` names a suite whose
// observed values are perturbed before checking, so that suite must fail;
// empty runs everything honestly. Unknown names raise ContractViolation.
SelftestReport run_selftest(const std::string& inject_fault = "");

std::vector<std::string> selftest_suite_names();

}  // namespace milac
