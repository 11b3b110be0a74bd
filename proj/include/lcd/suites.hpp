#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "lcd/numerics.hpp"

namespace lcd {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;  // one line of the numbers behind the verdict
  double seconds = 0.0;
  nlohmann::json data = nlohmann::json::object();
};

// Runs acceptance criterion 1..10. `quick` shrinks sample counts for the smoke suite; the
// verdict then speaks only for the reduced run.
CriterionResult run_criterion(int id, std::uint64_t seed = 1, bool quick = false);

struct SuiteReport {
  std::string name;
  std::vector<CriterionResult> results;
  bool pass = false;
  double seconds = 0.0;
};

std::vector<std::string> suite_names();
// smoke, curvature, needles, transport, inequalities, full; throws DomainError otherwise.
std::vector<int> suite_members(const std::string& name);
SuiteReport run_suite(const std::string& name, std::uint64_t seed = 1);

}  // namespace lcd
