#pragma once

#include <functional>
#include <string>
#include <vector>

#include "levy/errors.hpp"
#include "levy/io.hpp"

namespace levy {

/// One named sub-check of a criterion.
struct Check {
  std::string name;
  Verdict verdict = Verdict::fail;
  std::string detail;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  Verdict verdict = Verdict::fail;
  std::vector<Check> checks;
  double seconds = 0;
  Json data = Json::object();
};

struct SuiteOptions {
  int workers = 0;  ///< 0: LEVYTK_WORKERS or 1
};

/// Criterion ids in a named preset: "all" (1..10) or "polynomial" (1, 6, 7, 8, 9, 10).
std::vector<int> preset_criteria(const std::string& preset);
std::string criterion_title(int id);

CriterionResult run_criterion(int id, const SuiteOptions& opt = {});
/// Runs the criteria in order; `on_result` sees each result as soon as it is available.
std::vector<CriterionResult> run_suite(const std::vector<int>& ids, const SuiteOptions& opt = {},
                                       const std::function<void(const CriterionResult&)>& on_result = {});

/// "AC3 PASS  title  (1.2 s)  first failing check or summary".
std::string format_line(const CriterionResult& r);
Json to_json(const CriterionResult& r);

/// pass only if every check passes; any fail makes it fail; otherwise inconclusive.
Verdict combine(const std::vector<Check>& checks);

}  // namespace levy
