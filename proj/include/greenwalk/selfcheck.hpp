#pragma once

#include <functional>
#include <string>
#include <vector>

namespace greenwalk {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct Check {
  std::string name;
  std::function<CheckResult()> fn;
};

/**
 * Curated golden checks: the worked examples and identities that must hold
 * on any machine this builds on. The same registry backs the `selftest` CLI
 * command and a unit test, so the shipped binary can re-certify itself.
 */
const std::vector<Check>& selfcheck_registry();

std::vector<CheckResult> run_selfchecks(const std::string& filter = "");

} // namespace greenwalk
