#include "csvortex/cli_io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "csvortex/errors.hpp"

namespace csvortex {

using json = nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string type_name(const json& j) { return j.type_name(); }

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known = known || it.key() == k;
    if (!known) throw ConfigError(join(path, it.key()), "unknown key");
  }
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object, got " + type_name(j));
  return j;
}

double number(const json& obj, const char* key, const std::string& path, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key), "expected a number, got " + type_name(v));
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(join(path, key), "must be finite");
  return d;
}

int integer(const json& obj, const char* key, const std::string& path, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(join(path, key), "expected an integer, got " + type_name(v));
  const auto i = v.get<long long>();
  if (i < -1000000000LL || i > 1000000000LL) throw ConfigError(join(path, key), "out of range");
  return static_cast<int>(i);
}

bool boolean(const json& obj, const char* key, const std::string& path, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(join(path, key), "expected true or false, got " + type_name(v));
  return v.get<bool>();
}

std::string string(const json& obj, const char* key, const std::string& path, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(join(path, key), "expected a string, got " + type_name(v));
  return v.get<std::string>();
}

std::vector<double> number_array(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) throw ConfigError(join(path, key), "required");
  const json& v = obj.at(key);
  if (!v.is_array()) throw ConfigError(join(path, key), "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(join(path, key) + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

ConformalFactor parse_metric(const json& j) {
  require_object(j, "metric");
  const std::string family = string(j, "family", "metric", "flat");
  if (family == "flat") {
    reject_unknown(j, "metric", {"family"});
    return ConformalFactor::flat();
  }
  if (family == "gaussian_bump") {
    reject_unknown(j, "metric", {"family", "amplitude", "sigma", "center"});
    Point c{};
    if (j.contains("center")) {
      const json& cj = require_object(j.at("center"), "metric.center");
      reject_unknown(cj, "metric.center", {"x", "y"});
      c = {number(cj, "x", "metric.center", 0.0), number(cj, "y", "metric.center", 0.0)};
    }
    return ConformalFactor::gaussian_bump(number(j, "amplitude", "metric", 1.0), number(j, "sigma", "metric", 2.0), c);
  }
  if (family == "power_growth") {
    reject_unknown(j, "metric", {"family", "exponent"});
    return ConformalFactor::power_growth(number(j, "exponent", "metric", 0.5));
  }
  if (family == "radial_table") {
    reject_unknown(j, "metric", {"family", "radii", "values"});
    return ConformalFactor::radial_table(number_array(j, "radii", "metric"), number_array(j, "values", "metric"));
  }
  throw ConfigError("metric.family",
                    "unknown family \"" + family + "\" (flat, gaussian_bump, power_growth, radial_table)");
}

json metric_to_json(const ConformalFactor& cf) {
  json j;
  j["family"] = cf.family_name();
  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, GaussianBumpFamily>) {
          j["amplitude"] = f.amplitude;
          j["sigma"] = f.sigma;
          j["center"] = {{"x", f.center.x}, {"y", f.center.y}};
        } else if constexpr (std::is_same_v<F, PowerGrowthFamily>) {
          j["exponent"] = f.exponent;
        } else if constexpr (std::is_same_v<F, RadialTableFamily>) {
          j["radii"] = f.radii();
          j["values"] = f.values();
        }
      },
      cf.family());
  return j;
}

std::vector<VortexSite> parse_vortices(const json& doc) {
  if (!doc.contains("vortices")) throw ConfigError("vortices", "required (use [] for no vortices)");
  const json& v = doc.at("vortices");
  if (!v.is_array()) throw ConfigError("vortices", "expected an array");
  std::vector<VortexSite> sites;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::string path = "vortices[" + std::to_string(k) + "]";
    require_object(v[k], path);
    reject_unknown(v[k], path, {"x", "y", "n"});
    if (!v[k].contains("x") || !v[k].contains("y")) throw ConfigError(path, "needs both x and y");
    sites.push_back({{number(v[k], "x", path, 0.0), number(v[k], "y", path, 0.0)}, integer(v[k], "n", path, 1)});
  }
  return sites;
}

std::string method_name(SolveMethod m) { return to_string(m); }

json rounded(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round_significant(v);
}

json rounded(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(rounded(x));
  return a;
}

json method_to_json(const MethodResult& m) {
  json j;
  j["converged"] = m.converged;
  j["iterations"] = m.iterations;
  j["residual"] = rounded(m.residual);
  j["energy"] = rounded(m.energy);
  j["message"] = m.message;
  json levels = json::array();
  for (const LevelRecord& l : m.levels)
    levels.push_back({{"nodes", l.nodes}, {"iterations", l.iterations}, {"residual", rounded(l.residual)},
                      {"converged", l.converged}});
  j["levels"] = levels;
  if (!m.energy_history.empty()) j["energy_history"] = rounded(m.energy_history);
  return j;
}

CheckResult check_at_most(std::string name, double value, double limit, std::string detail = {}) {
  return {std::move(name), value <= limit, value, limit, std::move(detail)};
}

std::vector<CheckResult> run_checks(const RunReport& r) {
  std::vector<CheckResult> checks;
  const ObservableSet& o = r.solve.observables;
  const int n = r.solve.field.vortices.total_vorticity();
  const double pi = std::numbers::pi;

  checks.push_back(check_at_most("converged", r.solve.residual, r.config.solver.residual_tol,
                                 r.solve.converged ? "" : r.solve.message));
  checks.back().passed = r.solve.converged;
  if (r.solve.agreement)
    checks.push_back(check_at_most("methods_agree", *r.solve.agreement, r.config.solver.agreement_tol));
  if (n > 0) {
    checks.push_back(check_at_most("flux_quantization", std::fabs(o.flux - 2 * pi * n) / (2 * pi * n), 0.01));
    checks.push_back(check_at_most("bps_energy", std::fabs(o.energy - pi * n) / (pi * n), 0.02));
  } else {
    checks.push_back(check_at_most("flux_quantization", std::fabs(o.flux), 1e-12));
    checks.push_back(check_at_most("bps_energy", std::fabs(o.energy), 1e-12));
  }
  checks.push_back(check_at_most("max_principle", o.w_max, 1e-8));
  checks.push_back(check_at_most("a0_range", std::max(-o.a0_min, o.a0_max - 0.5), 1e-8));
  const double spin_scale = std::max(std::fabs(o.spin.by_parts), 1e-12);
  checks.push_back(check_at_most("spin_agreement", std::fabs(o.spin.direct - o.spin.by_parts) / spin_scale, 1e-3));
  if (n > 0) {
    checks.push_back(check_at_most("curl_consistency", o.curl_deviation, 1e-2));
    CheckResult winding{"lattice_winding", o.lattice_winding == n, static_cast<double>(o.lattice_winding),
                        static_cast<double>(n), ""};
    checks.push_back(winding);
    if (const auto b_inf = r.config.metric.asymptotic_value()) {
      const double rate = std::sqrt(*b_inf);
      if (o.decay) {
        const double dev = std::fabs(o.decay->b_fit - rate) / rate;
        CheckResult c = check_at_most("decay_fit", dev, 0.05);
        c.passed = c.passed && o.decay->sign_bound_holds;
        char detail[96];
        std::snprintf(detail, sizeof detail, "b_fit = %.6g, sign bound %s", o.decay->b_fit,
                      o.decay->sign_bound_holds ? "holds" : "violated");
        c.detail = detail;
        checks.push_back(c);
      } else {
        checks.push_back({"decay_fit", false, NAN, 0.05, o.decay_error});
      }
    }
  }
  if (r.oracle) {
    checks.push_back(check_at_most("oracle_equivalence", r.oracle->sup_deviation, 5e-3));
  } else if (!r.oracle_error.empty()) {
    checks.push_back({"oracle_equivalence", false, NAN, 5e-3, r.oracle_error});
  }
  return checks;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

bool single_vortex_at_origin(const VortexConfiguration& vc) {
  return vc.sites().size() == 1 && vc.sites()[0].location == Point{0.0, 0.0};
}

}  // namespace

double round_significant(double v, int digits) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

std::vector<int> default_continuation(int nodes) {
  std::vector<int> ladder{nodes};
  while (true) {
    const int coarser = (ladder.front() + 1) / 2;
    if (coarser < 129 || coarser % 2 == 0) break;
    ladder.insert(ladder.begin(), coarser);
  }
  return ladder;
}

RunConfiguration parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  require_object(doc, "(root)");
  reject_unknown(doc, "", {"metric", "vortices", "mu", "grid", "solver", "outputs"});

  RunConfiguration c;
  if (doc.contains("metric")) c.metric = parse_metric(doc.at("metric"));
  c.vortices = parse_vortices(doc);
  c.mu = number(doc, "mu", "", 1.0);

  if (doc.contains("grid")) {
    const json& g = require_object(doc.at("grid"), "grid");
    reject_unknown(g, "grid", {"half_width", "nodes"});
    c.grid.half_width = number(g, "half_width", "grid", c.grid.half_width);
    c.grid.nodes = integer(g, "nodes", "grid", c.grid.nodes);
  }
  c.grid.validate();

  if (doc.contains("solver")) {
    const json& s = require_object(doc.at("solver"), "solver");
    reject_unknown(s, "solver",
                   {"method", "residual_tol", "max_iterations", "max_gradient_steps", "continuation", "backtrack",
                    "armijo", "agreement_tol"});
    SolveSettings& st = c.solver;
    st.method = parse_solve_method(string(s, "method", "solver", to_string(st.method)));
    st.residual_tol = number(s, "residual_tol", "solver", st.residual_tol);
    st.max_iterations = integer(s, "max_iterations", "solver", st.max_iterations);
    st.max_gradient_steps = integer(s, "max_gradient_steps", "solver", st.max_gradient_steps);
    st.backtrack = number(s, "backtrack", "solver", st.backtrack);
    st.armijo = number(s, "armijo", "solver", st.armijo);
    st.agreement_tol = number(s, "agreement_tol", "solver", st.agreement_tol);
    if (s.contains("continuation")) {
      const json& ladder = s.at("continuation");
      if (!ladder.is_array()) throw ConfigError("solver.continuation", "expected an array of node counts");
      for (std::size_t k = 0; k < ladder.size(); ++k) {
        if (!ladder[k].is_number_integer())
          throw ConfigError("solver.continuation[" + std::to_string(k) + "]", "expected an integer");
        st.continuation.push_back(ladder[k].get<int>());
      }
    }
  }
  if (c.solver.continuation.empty()) c.solver.continuation = default_continuation(c.grid.nodes);
  c.solver.validate(c.grid.nodes);

  if (doc.contains("outputs")) {
    const json& o = require_object(doc.at("outputs"), "outputs");
    reject_unknown(o, "outputs", {"directory", "report", "dump_fields", "heatmap", "decay_window", "oracle"});
    OutputSettings& out = c.outputs;
    out.directory = string(o, "directory", "outputs", out.directory);
    out.report = string(o, "report", "outputs", out.report);
    if (out.directory.empty()) throw ConfigError("outputs.directory", "must not be empty");
    if (out.report.empty()) throw ConfigError("outputs.report", "must not be empty");
    out.dump_fields = boolean(o, "dump_fields", "outputs", out.dump_fields);
    out.heatmap = boolean(o, "heatmap", "outputs", out.heatmap);
    out.oracle = boolean(o, "oracle", "outputs", out.oracle);
    if (o.contains("decay_window") && !o.at("decay_window").is_null()) {
      const json& w = require_object(o.at("decay_window"), "outputs.decay_window");
      reject_unknown(w, "outputs.decay_window", {"r_min", "r_max"});
      if (!w.contains("r_min") || !w.contains("r_max"))
        throw ConfigError("outputs.decay_window", "needs r_min and r_max");
      DecayWindow dw{number(w, "r_min", "outputs.decay_window", 0.0), number(w, "r_max", "outputs.decay_window", 0.0)};
      if (!(dw.r_min >= 0.0 && dw.r_max > dw.r_min))
        throw ConfigError("outputs.decay_window", "need 0 <= r_min < r_max");
      out.decay_window = dw;
    }
  }

  const VortexConfiguration vc = c.vortex_configuration();
  for (int nodes : c.solver.continuation) require_clear_nodes({c.grid.half_width, nodes}, vc);
  try {
    (void)c.metric.certify_bounds(c.grid.half_width);
  } catch (const RangeError& e) {
    throw ConfigError("metric", e.what());
  }
  return c;
}

RunConfiguration load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read configuration " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

json to_json(const RunConfiguration& c) {
  json j;
  j["metric"] = metric_to_json(c.metric);
  json sites = json::array();
  for (const VortexSite& s : c.vortices) sites.push_back({{"x", s.location.x}, {"y", s.location.y}, {"n", s.multiplicity}});
  j["vortices"] = sites;
  j["mu"] = c.mu;
  j["grid"] = {{"half_width", c.grid.half_width}, {"nodes", c.grid.nodes}};
  const SolveSettings& s = c.solver;
  j["solver"] = {{"method", method_name(s.method)},
                 {"residual_tol", s.residual_tol},
                 {"max_iterations", s.max_iterations},
                 {"max_gradient_steps", s.max_gradient_steps},
                 {"continuation", s.continuation},
                 {"backtrack", s.backtrack},
                 {"armijo", s.armijo},
                 {"agreement_tol", s.agreement_tol}};
  json out = {{"directory", c.outputs.directory},
              {"report", c.outputs.report},
              {"dump_fields", c.outputs.dump_fields},
              {"heatmap", c.outputs.heatmap},
              {"oracle", c.outputs.oracle}};
  if (c.outputs.decay_window)
    out["decay_window"] = {{"r_min", c.outputs.decay_window->r_min}, {"r_max", c.outputs.decay_window->r_max}};
  j["outputs"] = out;
  return j;
}

bool RunReport::passed() const {
  for (const CheckResult& c : checks)
    if (!c.passed) return false;
  return solve.converged;
}

RunReport run(const RunConfiguration& config) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport r;
  r.config = config;
  const VortexConfiguration vc = config.vortex_configuration();
  ObservableOptions options;
  options.decay_window = config.outputs.decay_window;
  r.solve = solve(vc, config.metric, config.grid, config.solver, options);

  if (config.outputs.oracle && single_vortex_at_origin(vc) && config.metric.is_radial()) {
    const auto t1 = std::chrono::steady_clock::now();
    RadialProblem p;
    p.multiplicity = vc.total_vorticity();
    p.mu = vc.mu();
    p.metric = config.metric;
    if (const auto* table = std::get_if<RadialTableFamily>(&config.metric.family()))
      p.r_max = std::min(p.r_max, table->max_radius());
    try {
      r.oracle_profile = solve_radial(p);
      r.oracle = compare_with_2d(*r.oracle_profile, r.solve.field);
    } catch (const Error& e) {
      r.oracle_error = e.what();
    }
    r.oracle_time = seconds_since(t1);
  }
  r.checks = run_checks(r);
  r.total_time = seconds_since(t0);
  return r;
}

json report_to_json(const RunReport& r) {
  json j;
  j["tool"] = {{"name", "csvortex"}, {"version", kToolVersion}};
  j["config"] = to_json(r.config);

  const SolveReport& s = r.solve;
  json sj;
  sj["converged"] = s.converged;
  sj["message"] = s.message;
  sj["iterations"] = s.iterations;
  sj["residual"] = rounded(s.residual);
  sj["energy_functional"] = rounded(s.energy);
  if (s.newton) sj["newton"] = method_to_json(*s.newton);
  if (s.minimize) sj["minimize"] = method_to_json(*s.minimize);
  if (s.agreement) sj["agreement"] = rounded(*s.agreement);
  sj["methods_agree"] = s.methods_agree;
  sj["u_max_abs"] = rounded(s.field.u.max_abs());
  j["solve"] = sj;

  const ObservableSet& o = s.observables;
  json oj;
  oj["total_vorticity"] = s.field.vortices.total_vorticity();
  oj["flux"] = rounded(o.flux);
  oj["energy"] = rounded(o.energy);
  oj["spin"] = {{"direct", rounded(o.spin.direct)}, {"by_parts", rounded(o.spin.by_parts)}};
  if (o.decay) {
    oj["decay"] = {{"a_fit", rounded(o.decay->a_fit)},
                   {"b_fit", rounded(o.decay->b_fit)},
                   {"a_least_squares", rounded(o.decay->a_least_squares)},
                   {"window", {rounded(o.decay->window.r_min), rounded(o.decay->window.r_max)}},
                   {"sign_bound_holds", o.decay->sign_bound_holds}};
  } else if (!o.decay_error.empty()) {
    oj["decay_error"] = o.decay_error;
  }
  oj["w_max"] = rounded(o.w_max);
  oj["a0_core_values"] = rounded(o.a0_core_values);
  oj["a0_min"] = rounded(o.a0_min);
  oj["a0_max"] = rounded(o.a0_max);
  oj["bfield_max"] = rounded(o.bfield_max);
  oj["curl_deviation"] = rounded(o.curl_deviation);
  oj["circulation"] = rounded(o.circulation);
  oj["lattice_winding"] = o.lattice_winding;
  oj["self_duality_residual"] = rounded(o.self_duality_residual);
  j["observables"] = oj;

  if (r.oracle) {
    j["oracle"] = {{"sup_deviation", rounded(r.oracle->sup_deviation)},
                   {"l2_deviation", rounded(r.oracle->l2_deviation)},
                   {"radius", rounded(r.oracle->radius)},
                   {"samples", r.oracle->samples},
                   {"flux", rounded(radial_flux(*r.oracle_profile))},
                   {"energy", rounded(radial_energy(*r.oracle_profile))},
                   {"refinement_change", rounded(r.oracle_profile->refinement_change)}};
  } else if (!r.oracle_error.empty()) {
    j["oracle"] = {{"error", r.oracle_error}};
  }

  json checks = json::array();
  for (const CheckResult& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"value", rounded(c.value)},
                      {"limit", rounded(c.limit)},
                      {"detail", c.detail}});
  j["checks"] = checks;
  j["passed"] = r.passed();

  json timing = {{"total", r.total_time}, {"solve", s.wall_time}, {"oracle", r.oracle_time}};
  if (s.newton) timing["newton"] = s.newton->wall_time;
  if (s.minimize) timing["minimize"] = s.minimize->wall_time;
  j["timing"] = timing;
  return j;
}

std::vector<std::filesystem::path> emit(const RunReport& r) {
  namespace fs = std::filesystem;
  const fs::path dir = r.config.outputs.directory;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());

  std::vector<fs::path> written;
  const fs::path report_path = dir / r.config.outputs.report;
  write_file(report_path, report_to_json(r).dump(2) + "\n");
  written.push_back(report_path);

  const ScalarGrid bfield = magnetic_field(r.solve.field.w);
  if (r.config.outputs.dump_fields) {
    const std::pair<const char*, const ScalarGrid*> fields[] = {
        {"u.csv", &r.solve.field.u}, {"w.csv", &r.solve.field.w}, {"bfield.csv", &bfield}};
    for (const auto& [name, grid] : fields) {
      std::ostringstream ss;
      write_csv(*grid, ss);
      write_file(dir / name, ss.str());
      written.push_back(dir / name);
    }
    if (r.oracle_profile) {
      std::ostringstream ss;
      write_profile_csv(*r.oracle_profile, ss);
      write_file(dir / "oracle_profile.csv", ss.str());
      written.push_back(dir / "oracle_profile.csv");
    }
  }
  if (r.config.outputs.heatmap) {
    std::ostringstream w_svg, b_svg;
    write_heatmap_svg(r.solve.field.w, "w", w_svg);
    write_heatmap_svg(bfield, "magnetic field", b_svg);
    write_file(dir / "w.svg", w_svg.str());
    write_file(dir / "bfield.svg", b_svg.str());
    written.push_back(dir / "w.svg");
    written.push_back(dir / "bfield.svg");
  }
  return written;
}

bool VerifySummary::passed() const {
  for (const CheckResult& c : checks)
    if (!c.passed) return false;
  return true;
}

VerifySummary verify(const RunConfiguration& config) {
  VerifySummary v;
  v.base = run(config);
  v.checks = v.base.checks;
  const VortexConfiguration vc = config.vortex_configuration();
  const ObservableSet& o = v.base.solve.observables;
  if (vc.empty()) {
    const double size = std::max({v.base.solve.field.u.max_abs(), std::fabs(o.flux), std::fabs(o.energy),
                                  std::fabs(o.spin.direct), std::fabs(o.spin.by_parts), o.bfield_max,
                                  std::fabs(o.circulation)});
    v.checks.push_back(check_at_most("trivial_solution", size, 1e-8));
    return v;
  }
  double worst = 0.0;
  std::string detail;
  for (double mu : {4.0, 9.0}) {
    try {
      const SolveReport other = solve(vc.with_mu(mu), config.metric, config.grid, config.solver);
      if (!other.converged) detail += "mu=" + std::to_string(mu) + " did not converge; ";
      worst = std::max(worst, sup_distance(other.field.w, v.base.solve.field.w));
    } catch (const Error& e) {
      detail += e.what();
      worst = NAN;
    }
  }
  CheckResult robust = check_at_most("mu_robustness", worst, 5e-3, detail);
  robust.passed = robust.passed && detail.empty();
  v.checks.push_back(robust);
  return v;
}

void print_checks(const std::vector<CheckResult>& checks, std::ostream& out) {
  char line[256];
  std::snprintf(line, sizeof line, "%-20s %-6s %14s %12s  %s\n", "check", "result", "value", "limit", "detail");
  out << line;
  for (const CheckResult& c : checks) {
    std::snprintf(line, sizeof line, "%-20s %-6s %14.6g %12.3g  %s\n", c.name.c_str(), c.passed ? "PASS" : "FAIL",
                  c.value, c.limit, c.detail.c_str());
    out << line;
  }
}

void print_report(const json& j, std::ostream& out) {
  auto num = [](const json& v) -> std::string {
    if (!v.is_number()) return v.is_null() ? "n/a" : v.dump();
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v.get<double>());
    return buf;
  };
  if (!j.is_object() || !j.contains("solve") || !j.contains("observables"))
    throw ConfigError("", "not a csvortex report");
  const json& cfg = j.value("config", json::object());
  out << "csvortex report";
  if (j.contains("tool")) out << " (version " << j["tool"].value("version", "?") << ")";
  out << "\n";
  if (cfg.contains("metric")) out << "  metric        " << cfg["metric"].value("family", "?") << "\n";
  if (cfg.contains("vortices")) out << "  vortices      " << cfg["vortices"].size() << " site(s), mu = " << num(cfg["mu"]) << "\n";
  if (cfg.contains("grid"))
    out << "  grid          L = " << num(cfg["grid"]["half_width"]) << ", N = " << num(cfg["grid"]["nodes"]) << "\n";
  const json& s = j["solve"];
  out << "  converged     " << (s.value("converged", false) ? "yes" : "no");
  if (!s.value("message", std::string()).empty()) out << " (" << s["message"].get<std::string>() << ")";
  out << "\n  residual      " << num(s["residual"]) << "\n";
  if (s.contains("agreement")) out << "  agreement     " << num(s["agreement"]) << "\n";
  const json& o = j["observables"];
  out << "  n             " << num(o["total_vorticity"]) << "\n";
  out << "  flux          " << num(o["flux"]) << "\n";
  out << "  energy        " << num(o["energy"]) << "\n";
  out << "  spin          " << num(o["spin"]["direct"]) << " (by parts " << num(o["spin"]["by_parts"]) << ")\n";
  out << "  w_max         " << num(o["w_max"]) << "\n";
  if (o.contains("decay"))
    out << "  decay         a = " << num(o["decay"]["a_fit"]) << ", b = " << num(o["decay"]["b_fit"]) << "\n";
  if (o.contains("decay_error")) out << "  decay         " << o["decay_error"].get<std::string>() << "\n";
  if (j.contains("oracle")) {
    const json& r = j["oracle"];
    if (r.contains("error"))
      out << "  oracle        " << r["error"].get<std::string>() << "\n";
    else
      out << "  oracle        sup deviation " << num(r["sup_deviation"]) << "\n";
  }
  if (j.contains("checks")) {
    out << "\n";
    std::vector<CheckResult> checks;
    for (const json& c : j["checks"])
      checks.push_back({c.value("name", ""), c.value("passed", false),
                        c["value"].is_number() ? c["value"].get<double>() : NAN,
                        c["limit"].is_number() ? c["limit"].get<double>() : NAN, c.value("detail", "")});
    print_checks(checks, out);
  }
}

}  // namespace csvortex
