#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "csvortex/cli_io.hpp"
#include "csvortex/errors.hpp"

using namespace csvortex;
namespace fs = std::filesystem;

namespace {

std::string error_path(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("csvortex_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("minimal configuration gets every default") {
  const RunConfiguration c = parse_config(R"({"vortices":[{"x":0,"y":0,"n":1}]})");
  CHECK(c.mu == 1.0);
  CHECK(c.grid.half_width == 16.0);
  CHECK(c.grid.nodes == 513);
  CHECK(c.solver.method == SolveMethod::both);
  CHECK(c.solver.residual_tol == 1e-10);
  CHECK(c.solver.max_iterations == 200);
  CHECK(c.solver.continuation == std::vector<int>{129, 257, 513});
  CHECK(c.metric == ConformalFactor::flat());
  CHECK(c.outputs.report == "report.json");
  CHECK_FALSE(c.outputs.dump_fields);
  CHECK(c.vortices.size() == 1);
}

TEST_CASE("default ladders") {
  CHECK(default_continuation(513) == std::vector<int>{129, 257, 513});
  CHECK(default_continuation(129) == std::vector<int>{129});
  CHECK(default_continuation(65) == std::vector<int>{65});
  CHECK(default_continuation(1025) == std::vector<int>{129, 257, 513, 1025});
  CHECK(default_continuation(301) == std::vector<int>{151, 301});
}

TEST_CASE("schema errors name the field") {
  CHECK(error_path(R"({"mu":-1,"vortices":[{"x":0,"y":0,"n":1}]})") == "mu");
  CHECK(error_path(R"({"vortices":[{"x":20,"y":0,"n":1}]})") == "vortices[0]");
  CHECK(error_path(R"({"vortices":[{"x":0,"y":0,"n":1}],"extra":true})") == "extra");
  CHECK(error_path(R"({"vortices":[{"x":0,"y":0,"n":1}],"solver":{"tolerance":1}})") == "solver.tolerance");
  CHECK(error_path(R"({"vortices":[{"x":0,"y":0,"n":1}],"grid":{"nodes":"big"}})") == "grid.nodes");
  CHECK(error_path(R"({"vortices":[{"x":0,"y":0,"n":1}],"grid":{"nodes":512}})") == "grid.nodes");
  CHECK(error_path(R"({"vortices":[{"x":0,"y":0,"n":0}]})") == "vortices[0].n");
  CHECK(error_path(R"({"vortices":[{"x":0,"n":1}]})") == "vortices[0]");
  CHECK(error_path(R"({"vortices":[{"x":0,"y":0,"z":0}]})") == "vortices[0].z");
  CHECK(error_path(R"({"metric":{"family":"sphere"},"vortices":[]})") == "metric.family");
  CHECK(error_path(R"({"metric":{"family":"gaussian_bump","sigma":-2},"vortices":[]})") == "metric.sigma");
  CHECK(error_path(R"({"metric":{"family":"flat","sigma":2},"vortices":[]})") == "metric.sigma");
  CHECK(error_path(R"({"solver":{"method":"cg"},"vortices":[]})") == "solver.method");
  CHECK(error_path(R"({"solver":{"continuation":[129,513]},"grid":{"nodes":257},"vortices":[]})") ==
        "solver.continuation");
  CHECK(error_path(R"({"outputs":{"decay_window":{"r_min":5}},"vortices":[]})") == "outputs.decay_window");
  CHECK(error_path(R"({})") == "vortices");
  CHECK(error_path(R"([1,2])") == "(root)");
  CHECK(error_path("{not json") == "");
  CHECK(error_path(R"({"metric":{"family":"radial_table","radii":[0,5],"values":[1,1]},"vortices":[]})") == "metric");
}

TEST_CASE("configuration round trip") {
  const char* docs[] = {
      R"({"vortices":[{"x":0,"y":0,"n":1}]})",
      R"({"metric":{"family":"gaussian_bump","amplitude":1,"sigma":2,"center":{"x":0.5,"y":-1}},
          "vortices":[{"x":1.3,"y":-0.7,"n":1},{"x":-0.9,"y":1.1,"n":2}],"mu":4,
          "grid":{"half_width":12,"nodes":257},
          "solver":{"method":"newton","residual_tol":1e-9,"continuation":[257]},
          "outputs":{"directory":"out","report":"r.json","dump_fields":true,"heatmap":true,
                     "decay_window":{"r_min":5,"r_max":9.5},"oracle":false}})",
      R"({"metric":{"family":"power_growth","exponent":0.5},"vortices":[]})",
      R"({"metric":{"family":"radial_table","radii":[0,10,30],"values":[2,1.5,1]},"vortices":[]})",
  };
  for (const char* doc : docs) {
    const RunConfiguration c = parse_config(doc);
    const RunConfiguration again = parse_config(to_json(c).dump());
    CHECK(again == c);
    CHECK(to_json(again) == to_json(c));
  }
}

TEST_CASE("rounding to significant digits") {
  CHECK(round_significant(3.14159265358979) == 3.14159265359);
  CHECK(round_significant(-1.23456789012345e-7) == -1.23456789012e-7);
  CHECK(round_significant(0.0) == 0.0);
}

TEST_CASE("run, report and emit") {
  const fs::path dir = scratch("run");
  const std::string text = R"({"vortices":[{"x":0,"y":0,"n":1}],"grid":{"nodes":257},
      "solver":{"method":"both"},
      "outputs":{"directory":")" + dir.string() + R"(","dump_fields":true,"heatmap":true}})";
  const RunConfiguration c = parse_config(text);
  const RunReport r = run(c);
  CHECK(r.passed());
  REQUIRE(r.oracle);
  CHECK(r.oracle->sup_deviation <= 1e-2);
  const nlohmann::json j = report_to_json(r);
  CHECK(j["passed"] == true);
  CHECK(j["observables"]["flux"].get<double>() == doctest::Approx(6.283185).epsilon(1e-3));
  CHECK(j.contains("timing"));
  CHECK(nlohmann::json::parse(j.dump()) == j);

  // Same configuration, same report apart from timing.
  nlohmann::json a = j, b = report_to_json(run(c));
  a.erase("timing");
  b.erase("timing");
  CHECK(a.dump() == b.dump());

  const auto written = emit(r);
  CHECK(written.size() == 7);
  for (const auto& p : written) CHECK(fs::file_size(p) > 0);
  std::ifstream in(dir / "report.json");
  const nlohmann::json back = nlohmann::json::parse(in);
  CHECK(back == nlohmann::json::parse(j.dump(2)));
  std::ifstream svg(dir / "w.svg");
  std::string first;
  std::getline(svg, first);
  CHECK(first.rfind("<svg", 0) == 0);
  std::ostringstream pretty;
  print_report(back, pretty);
  CHECK(pretty.str().find("flux") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("unreachable output directory") {
  const fs::path blocker = scratch("blocker");
  std::ofstream(blocker) << "file";
  RunConfiguration c = parse_config(R"({"vortices":[],"grid":{"nodes":65}})");
  c.outputs.directory = (blocker / "sub").string();
  const RunReport r = run(c);
  CHECK_THROWS_AS(emit(r), IoError);
  fs::remove(blocker);
}

TEST_CASE("zero vortices") {
  const RunConfiguration c = parse_config(R"({"vortices":[],"grid":{"nodes":129}})");
  const VerifySummary v = verify(c);
  CHECK(v.passed());
  CHECK(v.base.solve.field.u.max_abs() == 0.0);
  CHECK(v.checks.back().name == "trivial_solution");
  const nlohmann::json j = report_to_json(v.base);
  CHECK(j["observables"]["flux"] == 0.0);
  CHECK(j["observables"]["energy"] == 0.0);
}

TEST_CASE("verify flags a domain that is too small") {
  const RunConfiguration c = parse_config(R"({"vortices":[{"x":0,"y":0,"n":1}],"grid":{"half_width":4,"nodes":129}})");
  const VerifySummary v = verify(c);
  CHECK_FALSE(v.passed());
  bool decay_failed = false;
  for (const CheckResult& k : v.checks)
    if (k.name == "decay_fit") decay_failed = !k.passed;
  CHECK(decay_failed);
  std::ostringstream table;
  print_checks(v.checks, table);
  CHECK(table.str().find("FAIL") != std::string::npos);
}
