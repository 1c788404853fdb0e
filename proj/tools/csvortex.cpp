#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "csvortex/cli_io.hpp"
#include "csvortex/errors.hpp"
#include "csvortex/parallel.hpp"

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2 };

int do_solve(const std::string& config_path, bool dump, bool heatmap, const std::string& out_dir) {
  csvortex::RunConfiguration config = csvortex::load_config(config_path);
  if (dump) config.outputs.dump_fields = true;
  if (heatmap) config.outputs.heatmap = true;
  if (!out_dir.empty()) config.outputs.directory = out_dir;
  const csvortex::RunReport report = csvortex::run(config);
  for (const auto& path : csvortex::emit(report)) std::cerr << "wrote " << path.string() << "\n";
  csvortex::print_report(csvortex::report_to_json(report), std::cout);
  return report.passed() ? kOk : kCheckFailed;
}

int do_verify(const std::string& config_path) {
  const csvortex::RunConfiguration config = csvortex::load_config(config_path);
  const csvortex::VerifySummary summary = csvortex::verify(config);
  csvortex::print_checks(summary.checks, std::cout);
  std::cout << (summary.passed() ? "all checks passed\n" : "some checks failed\n");
  return summary.passed() ? kOk : kCheckFailed;
}

int do_oracle(const csvortex::RadialProblem& problem, const std::string& out_path) {
  const csvortex::RadialProfile profile = csvortex::solve_radial(problem);
  if (out_path.empty() || out_path == "-") {
    csvortex::write_profile_csv(profile, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) throw csvortex::IoError("cannot open " + out_path + " for writing");
    csvortex::write_profile_csv(profile, out);
    if (!out) throw csvortex::IoError("failed writing " + out_path);
  }
  const double flux = csvortex::radial_flux(profile);
  const double n = problem.multiplicity;
  std::fprintf(stderr, "flux %.12g (2pi n = %.12g), energy %.12g, refinement change %.3g\n", flux,
               2 * std::numbers::pi * n, csvortex::radial_energy(profile), profile.refinement_change);
  return kOk;
}

int do_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw csvortex::IoError("cannot read " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw csvortex::ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  csvortex::print_report(j, std::cout);
  return j.value("passed", false) ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-dual Chern-Simons vortices on conformally flat metrics"};
  app.require_subcommand(1);
  int workers = 0;
  app.add_option("--workers", workers, "worker threads (default: CSVORTEX_WORKERS or all cores)")
      ->check(CLI::PositiveNumber);
  app.set_version_flag("--version", csvortex::kToolVersion);

  std::string config_path, out_dir;
  bool dump = false, heatmap = false;
  auto* solve = app.add_subcommand("solve", "solve one configuration and write the report");
  solve->add_option("--config", config_path, "JSON configuration")->required();
  solve->add_flag("--dump-fields", dump, "write u, w and B CSV dumps");
  solve->add_flag("--heatmap", heatmap, "write SVG heatmaps of w and B");
  solve->add_option("--out", out_dir, "output directory (overrides outputs.directory)");

  auto* verify = app.add_subcommand("verify", "run the invariant suite and print a pass/fail table");
  verify->add_option("--config", config_path, "JSON configuration")->required();

  csvortex::RadialProblem problem;
  std::string metric = "flat", oracle_out;
  double amplitude = 1.0, sigma = 2.0, exponent = 0.5;
  auto* oracle = app.add_subcommand("oracle", "solve the radial reduction and emit r,u,w,Bfield CSV");
  oracle->add_option("--n", problem.multiplicity, "vortex multiplicity at the origin")->capture_default_str();
  oracle->add_option("--metric", metric, "flat, gaussian_bump or power_growth")
      ->check(CLI::IsMember({"flat", "gaussian_bump", "power_growth"}))
      ->capture_default_str();
  oracle->add_option("--amplitude", amplitude, "gaussian_bump amplitude")->capture_default_str();
  oracle->add_option("--sigma", sigma, "gaussian_bump width")->capture_default_str();
  oracle->add_option("--exponent", exponent, "power_growth exponent")->capture_default_str();
  oracle->add_option("--rmax", problem.r_max, "outer radius")->capture_default_str();
  oracle->add_option("--mu", problem.mu, "regulator")->capture_default_str();
  oracle->add_option("--nodes", problem.nodes, "mesh intervals")->capture_default_str();
  oracle->add_option("--out", oracle_out, "CSV path (default stdout)");

  std::string report_path;
  auto* report = app.add_subcommand("report", "pretty-print an existing JSON report");
  report->add_option("path", report_path, "report file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (workers > 0) csvortex::set_worker_count(workers);
    if (*solve) return do_solve(config_path, dump, heatmap, out_dir);
    if (*verify) return do_verify(config_path);
    if (*oracle) {
      if (metric == "gaussian_bump")
        problem.metric = csvortex::ConformalFactor::gaussian_bump(amplitude, sigma);
      else if (metric == "power_growth")
        problem.metric = csvortex::ConformalFactor::power_growth(exponent);
      return do_oracle(problem, oracle_out);
    }
    if (*report) return do_report(report_path);
  } catch (const csvortex::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kUsage;
  } catch (const csvortex::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kUsage;
  } catch (const csvortex::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
