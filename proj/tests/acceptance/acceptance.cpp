// Runs the acceptance criteria and prints one line per criterion.
#include <cstdio>
#include <set>

#include <CLI11.hpp>

#include "levy/suite.hpp"

int main(int argc, char** argv) {
  CLI::App app{"levytk acceptance criteria"};
  std::string preset = "all";
  std::vector<int> only, allow;
  std::string json_out;
  int workers = 0;
  app.add_option("--preset", preset, "all | polynomial");
  app.add_option("--only", only, "criterion ids to run")->delimiter(',');
  app.add_option("--allow-fail", allow, "criteria whose failure is reported but does not fail the run")->delimiter(',');
  app.add_option("--json", json_out, "write the full results here");
  app.add_option("--workers", workers, "Monte Carlo workers (0: LEVYTK_WORKERS or 1)");
  CLI11_PARSE(app, argc, argv);

  std::vector<int> ids;
  try {
    ids = only.empty() ? levy::preset_criteria(preset) : only;
    for (int id : ids) levy::criterion_title(id);
  } catch (const levy::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  std::set<int> allowed(allow.begin(), allow.end());
  levy::SuiteOptions opt;
  opt.workers = workers;
  auto results = levy::run_suite(ids, opt, [](const levy::CriterionResult& r) {
    std::printf("%s\n", levy::format_line(r).c_str());
    std::fflush(stdout);
  });

  int failed = 0, inconclusive = 0, excused = 0;
  levy::Json all = levy::Json::array();
  for (auto& r : results) {
    all.push_back(levy::to_json(r));
    if (r.verdict == levy::Verdict::fail) (allowed.count(r.id) ? excused : failed)++;
    if (r.verdict == levy::Verdict::inconclusive) inconclusive++;
  }
  std::printf("summary: %zu criteria, %zu pass, %d fail (%d allowed), %d inconclusive\n", results.size(),
              results.size() - failed - excused - inconclusive, failed + excused, excused, inconclusive);
  if (!json_out.empty()) levy::write_file(json_out, all.dump(2) + "\n");
  if (failed) return 1;
  if (inconclusive) return 3;
  return 0;
}
