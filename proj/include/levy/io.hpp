#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "levy/decay.hpp"
#include "levy/density.hpp"
#include "levy/mc.hpp"
#include "levy/model.hpp"
#include "levy/params.hpp"
#include "levy/potential.hpp"
#include "levy/spectral.hpp"

namespace levy {

using Json = nlohmann::json;

inline constexpr const char* kVersion = "0.4.0";

/// Parses a file; syntax errors become ConfigError with an empty pointer.
Json load_json_file(const std::string& path);
Json parse_json(const std::string& text);

/// {dimension, diffusion, scale, profile:{family, params}, comparability, closed_form:{kind, alpha|mass}}
/// or {preset: {name, ...}}. Errors carry the JSON pointer of the offending field.
LevyModel model_from_json(const Json& j, const std::string& at = "");
Json model_to_json(const LevyModel& m);

/// {kind, ...parameters}; kind in well, coulomb, yukawa, poschl_teller, morse, confining_power, table, free.
Potential potential_from_json(const Json& j, const std::string& at = "");
Json potential_to_json(const Potential& v);

Grid1D grid_from_json(const Json& j, const std::string& at = "");
PathConfig path_config_from_json(const Json& j, const std::string& at = "");
Json path_config_to_json(const PathConfig& c);

/// Inputs of the admissibility report beyond the model.
struct ConditionsConfig {
  K3Constants k3;
  std::optional<double> c4;
  ConditionOptions options;
};
ConditionsConfig conditions_from_json(const Json& j, const std::string& at = "/conditions");

/// Everything a run needs; `raw` is the validated document as given, echoed into every report.
struct ExperimentConfig {
  Json raw;
  std::optional<LevyModel> model;
  std::optional<Potential> potential;
  Grid1D grid{128, 1 << 14};
  SolverOptions solver;
  int states = 1;
  PathConfig mc;
  std::vector<Window> windows;
  FitSpec fit;
  /// Hitting-time estimates: starting points, ball radius and Laplace parameters.
  std::vector<double> from = {8, 16, 32};
  double radius = 1.0;
  std::vector<double> eta = {1.0};
  double cap = 25.0;
  ConditionsConfig conditions;
  std::string output_dir = "levytk_out";
};
/// `base_dir` resolves "model"/"potential" given as file paths.
ExperimentConfig experiment_from_json(const Json& j, const std::string& base_dir = ".");

/// Hex CRC-32 of a canonical dump (keys sorted, compact).
std::string config_hash(const Json& j);

Json to_json(const SpectrumResult& r);
Json to_json(const K1Result& r);
Json to_json(const K3Bound& r);
Json to_json(const JumpParingAudit& r);
Json to_json(const HIngredients& r);
Json to_json(const Eta0Result& r);
Json to_json(const Cond1Result& r);
Json to_json(const SmallnessReport& r);
Json to_json(const SubexpProbe& r);
Json to_json(const ConditionReport& r);
Json to_json(const HittingEstimate& r);
Json to_json(const RatioStats& r);
Json to_json(const FitResult& r);
Json to_json(const RegimeResult& r);
Json to_json(const LowerBoundCertificate& r);
Json to_json(const OverlayReport& r);
Json to_json(const DecayReport& r);
Json to_json(const DominationReport& r);
Json to_json(const std::vector<SmallevRow>& rows);

/// Column-oriented CSV table; numbers written with 17 significant digits.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
  void add(const std::string& name, std::vector<double> values);
  std::size_t rows() const;
  std::string csv() const;
  void write(const std::string& path) const;
  /// Column by header name; throws ConfigError when absent.
  const std::vector<double>& column(const std::string& name) const;
};
/// Numeric CSV with a header line.
Table read_csv(const std::string& path);

/// Overlay series of a decay analysis on the window: x, phi, C nu, phi/nu and the fitted curve.
Table overlay_table(const LevyModel& m, const std::vector<double>& x, const std::vector<double>& phi, Window w,
                    const FitResult& fit);

struct Series {
  std::string name;
  std::vector<double> x, y;
};
/// Minimal SVG line chart; identical inputs give identical bytes.
std::string svg_chart(const std::vector<Series>& series, bool log_x, bool log_y, const std::string& title = "");

/// Reproducibility record of one run.
class RunManifest {
 public:
  explicit RunManifest(const Json& config);
  void stage(const std::string& name, double seconds);
  void verdict(const std::string& name, Verdict v);
  /// Registers an emitted file and records its size and CRC-32.
  void file(const std::string& path);
  /// Writes text to `path` and registers it.
  void emit(const std::string& path, const std::string& text);
  Json to_json() const;
  Verdict overall() const;

 private:
  std::string hash_;
  std::vector<std::pair<std::string, double>> stages_;
  std::vector<std::pair<std::string, Verdict>> verdicts_;
  struct Entry {
    std::string path;
    std::uintmax_t bytes = 0;
    std::string crc32;
  };
  std::vector<Entry> files_;
};

/// CRC-32 of a byte string as 8 lowercase hex digits.
std::string crc32_hex(const std::string& bytes);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

/// Exit status for a verdict: 0 pass, 1 fail, 3 inconclusive.
int exit_code(Verdict v);

}  // namespace levy
