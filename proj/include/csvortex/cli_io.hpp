#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "csvortex/grid.hpp"
#include "csvortex/metric.hpp"
#include "csvortex/observables.hpp"
#include "csvortex/radial_oracle.hpp"
#include "csvortex/solver.hpp"
#include "csvortex/vortex.hpp"

namespace csvortex {

inline constexpr const char* kToolVersion = "1.0.0";

struct OutputSettings {
  std::string directory = ".";
  std::string report = "report.json";
  bool dump_fields = false;
  bool heatmap = false;
  std::optional<DecayWindow> decay_window;
  /// Compare with the radial oracle when the configuration allows it.
  bool oracle = true;

  bool operator==(const OutputSettings&) const = default;
};

struct RunConfiguration {
  ConformalFactor metric;
  std::vector<VortexSite> vortices;
  double mu = 1.0;
  GridSpec grid;
  SolveSettings solver;
  OutputSettings outputs;

  VortexConfiguration vortex_configuration() const { return VortexConfiguration(vortices, mu); }
  bool operator==(const RunConfiguration&) const = default;
};

/// Parses and validates a JSON configuration, filling in defaults. Unknown
/// keys are rejected. Throws ConfigError with the offending field path.
RunConfiguration parse_config(std::string_view text);
RunConfiguration load_config(const std::filesystem::path& path);
/// Full configuration with every default spelled out.
nlohmann::json to_json(const RunConfiguration& config);

/// Node counts N, (N+1)/2, ... down to the smallest one >= 129, coarse to fine.
std::vector<int> default_continuation(int nodes);

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double limit = 0.0;
  std::string detail;
};

struct RunReport {
  RunConfiguration config;
  SolveReport solve;
  std::optional<RadialProfile> oracle_profile;
  std::optional<OracleComparison> oracle;
  std::string oracle_error;
  std::vector<CheckResult> checks;
  double oracle_time = 0.0;
  double total_time = 0.0;

  bool passed() const;
};

/// Solves, evaluates observables, runs the radial oracle when the
/// configuration is a single vortex at the origin on a radial metric, and
/// evaluates the per-run invariant checks.
RunReport run(const RunConfiguration& config);

/// Report with numbers rounded to 12 significant digits. Wall-clock values
/// are confined to the "timing" member.
nlohmann::json report_to_json(const RunReport& report);

/// Writes the JSON report and any requested CSV dumps and SVG heatmaps into
/// config.outputs.directory. Returns the written paths. Throws IoError.
std::vector<std::filesystem::path> emit(const RunReport& report);

/// Per-run checks plus μ-robustness (μ = 4, 9) and, for n = 0, triviality.
struct VerifySummary {
  RunReport base;
  std::vector<CheckResult> checks;
  bool passed() const;
};
VerifySummary verify(const RunConfiguration& config);
void print_checks(const std::vector<CheckResult>& checks, std::ostream& out);

/// Human-readable rendering of a JSON report.
void print_report(const nlohmann::json& report, std::ostream& out);

/// Heatmap of g as a standalone SVG, downsampled to at most 128² cells.
void write_heatmap_svg(const ScalarGrid& g, const std::string& title, std::ostream& out);

double round_significant(double v, int digits = 12);

}  // namespace csvortex
