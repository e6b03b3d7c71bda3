#include "slabres/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "slabres/anomaly.hpp"
#include "slabres/error.hpp"
#include "slabres/fitter.hpp"
#include "slabres/io.hpp"
#include "slabres/modes.hpp"
#include "slabres/scatter.hpp"
#include "slabres/structure.hpp"

namespace slabres {

namespace {

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw UsageError("not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

std::pair<double, double> parse_window(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw UsageError("window must be lo:hi (got '" + text + "')");
  const double lo = parse_number(parts[0]);
  const double hi = parse_number(parts[1]);
  if (!(lo < hi)) throw UsageError("window must satisfy lo < hi");
  return {lo, hi};
}

std::string join_results(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

// Hash of the parsed option values that determine the data (paths and worker counts do
// not), plus the configuration documents they point to.
std::uint64_t canonical_hash(const CLI::App& sub) {
  std::map<std::string, std::string> items;
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_name(false, true);
    if (opt->count() == 0 || name == "--out" || name == "--svg" || name == "--threads" ||
        name == "--help" || name == "-h,--help") {
      continue;
    }
    items[name] = join_results(opt->results());
  }
  std::string text = sub.get_name();
  for (const auto& [k, v] : items) {
    text += '\n' + k + '=' + v;
    if (k == "--config" || k == "--model") {
      std::ifstream in(v);
      std::ostringstream ss;
      ss << in.rdbuf();
      text += '\n' + ss.str();
    }
  }
  return fnv1a(text);
}

struct Common {
  std::string config;
  int nx = 128;
  int nz = 128;
  std::string out;
  std::string svg;
  bool allow_outside = false;
  int threads = std::max(1u, std::thread::hardware_concurrency());
};

void add_common(CLI::App* sub, Common& c, bool with_config = true) {
  if (with_config) sub->add_option("--config", c.config, "structure document (JSON)");
  sub->add_option("--nx", c.nx, "cells in x")->capture_default_str();
  sub->add_option("--nz", c.nz, "cells in z")->capture_default_str();
  sub->add_option("--out", c.out, "output file");
  sub->add_option("--svg", c.svg, "SVG plot file");
  sub->add_flag("--allow-outside", c.allow_outside, "permit points outside the diamond");
  sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

SlabStructure require_structure(const Common& c) {
  if (c.config.empty()) throw UsageError("--config is required");
  return load_config_file(c.config);
}

nlohmann::json cjson(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

class Runner {
 public:
  explicit Runner(CommandOutcome& out) : out_(out) {}

  void emit(const std::string& path, const std::string& content) {
    write_atomic(path, content);
    out_.artifacts.push_back(path);
  }
  void say(const std::string& line) { out_.log += line + '\n'; }

 private:
  CommandOutcome& out_;
};

// ---- solve -----------------------------------------------------------------------

struct SolveArgs {
  Common c;
  double kappa = 0.0;
  double omega = 0.0;
  std::string side = "left";
};

void do_solve(const SolveArgs& a, const std::string& header, Runner& r) {
  const SlabStructure s = require_structure(a.c);
  if (a.side != "left" && a.side != "right") throw UsageError("--side must be left or right");
  SolverOptions opts;
  opts.allow_outside = a.c.allow_outside;
  const auto sol = solve_scattering(s, a.kappa, a.omega, a.side == "left" ? Side::left : Side::right,
                                    a.c.nx, a.c.nz, opts);
  nlohmann::json doc{{"kappa", a.kappa},
                     {"omega", a.omega},
                     {"side", a.side},
                     {"nx", a.c.nx},
                     {"nz", a.c.nz},
                     {"R", cjson(sol.R)},
                     {"T", cjson(sol.T)},
                     {"transmittance", sol.transmittance()},
                     {"energy_defect", sol.energy_defect},
                     {"least_squares", sol.least_squares}};
  if (sol.least_squares) r.say("warning: singular factorization, least-squares field used");
  if (!a.c.out.empty()) {
    r.emit(a.c.out, json_document(doc, header));
  } else {
    r.say(doc.dump(2));
  }
}

// ---- sweep -----------------------------------------------------------------------

struct SweepArgs {
  Common c;
  std::string kappa;
  std::string omega;
};

void do_sweep(const SweepArgs& a, const std::string& header, Runner& r) {
  const SlabStructure s = require_structure(a.c);
  SweepOptions opts;
  opts.solver.allow_outside = a.c.allow_outside;
  opts.threads = a.c.threads;
  const auto kappas = parse_grid(a.kappa);
  const auto omegas = parse_grid(a.omega);
  const SweepTable table = transmittance_sweep(s, kappas, omegas, a.c.nx, a.c.nz, opts);
  const std::string csv = sweep_csv(table, header);
  if (!a.c.out.empty()) {
    r.emit(a.c.out, csv);
  } else {
    r.say(csv);
  }
  if (!a.c.svg.empty()) {
    std::vector<Polyline> lines;
    for (const auto& row : table) {
      const std::string label = "kappa=" + format_double(row.kappa);
      if (lines.empty() || lines.back().label != label) lines.push_back({label, {}});
      lines.back().points.emplace_back(row.omega, row.transmittance);
    }
    r.emit(a.c.svg, svg_plot(lines, "omega", "|T|^2", std::nan("")));
  }
  std::size_t fallback = std::count_if(table.begin(), table.end(),
                                       [](const SweepRow& row) { return row.least_squares; });
  if (fallback) r.say("warning: " + std::to_string(fallback) + " point(s) used least squares");
}

// ---- modes -----------------------------------------------------------------------

struct ModesArgs {
  Common c;
  double kappa = 0.0;
  std::string window = "0.45:0.8";
  int scan = 200;
};

void do_modes(const ModesArgs& a, const std::string& header, Runner& r) {
  const SlabStructure s = require_structure(a.c);
  const auto [lo, hi] = parse_window(a.window);
  ModeSearchOptions opts;
  opts.scan_points = a.scan;
  const auto modes = find_guided_modes(s, a.kappa, lo, hi, a.c.nx, a.c.nz, opts);
  auto list = nlohmann::json::array();
  for (const auto& m : modes) {
    list.push_back({{"kappa0", a.kappa},
                    {"omega0", m.omega0},
                    {"residual", m.residual},
                    {"omega_root", cjson(m.omega_root)}});
    r.say("guided mode at omega0 = " + format_double(m.omega0) +
          " (residual " + format_double(m.residual) + ")");
  }
  if (modes.empty()) r.say("no guided modes in the window");
  nlohmann::json doc{{"kappa0", a.kappa}, {"window", {lo, hi}}, {"nx", a.c.nx}, {"nz", a.c.nz},
                     {"modes", list}};
  if (!a.c.out.empty()) r.emit(a.c.out, json_document(doc, header));
}

// ---- trace -----------------------------------------------------------------------

struct TraceArgs {
  Common c;
  double kappa0 = 0.0;
  double omega0 = 0.0;
  std::string offsets = "-0.02,-0.01,0.01,0.02";
};

nlohmann::json mode_report(const DispersionTrace& trace, const std::optional<DispersionFit>& fit) {
  auto samples = nlohmann::json::array();
  double residual = 0.0;
  for (const auto& s : trace.samples) {
    samples.push_back({s.kappa, s.omega_root.real(), s.omega_root.imag()});
    residual = std::max(residual, s.residual);
  }
  nlohmann::json doc{{"kappa0", trace.kappa0}, {"omega0", trace.omega0}, {"residual", residual}};
  if (fit) {
    doc["ell1"] = fit->ell1;
    doc["ell2"] = cjson(fit->ell2);
    doc["fit_residual"] = fit->residual;
  } else {
    doc["ell1"] = nullptr;
    doc["ell2"] = nullptr;
  }
  doc["samples"] = samples;
  doc["complete"] = trace.complete;
  if (!trace.complete) doc["failure"] = trace.failure;
  return doc;
}

void do_trace(const TraceArgs& a, const std::string& header, Runner& r) {
  const SlabStructure s = require_structure(a.c);
  if (!a.c.allow_outside && !in_diamond(a.kappa0, a.omega0, s.ambient())) {
    throw OutsideDiamondError("(kappa0, omega0) is outside the diamond");
  }
  const auto trace = trace_dispersion(s, a.kappa0, a.omega0, parse_grid(a.offsets), a.c.nx, a.c.nz);
  std::optional<DispersionFit> fit;
  try {
    fit = dispersion_coefficients(trace);
  } catch (const UsageError& e) {
    r.say(std::string("warning: ") + e.what());
  }
  const auto doc = mode_report(trace, fit);
  if (!a.c.out.empty()) {
    r.emit(a.c.out, json_document(doc, header));
  } else {
    r.say(doc.dump(2));
  }
  if (!trace.complete) throw NumericalError("dispersion trace incomplete: " + trace.failure);
}

// ---- model -----------------------------------------------------------------------

struct ModelArgs {
  Common c;
  std::string model_path;
  std::string save_model;
  std::string family = "generic";
  std::string ell1 = "0";
  std::string r2 = "2";
  std::string t2 = "1";
  double r0 = 0.6;
  double t0 = 0.8;
  double gamma = 0.0;
  std::string r1_1, r1_2;
  double r2_1 = 0.0, r2_2 = 0.0;
  int sign = 1;
  std::string direction = "full_transmission";
  std::string ktilde = "0";
  std::string wtilde = "-0.005:0.005:1001";
};

std::vector<std::string> two_values(const std::string& text, const char* flag) {
  auto parts = split(text, ',');
  if (parts.size() != 2) {
    throw UsageError(std::string(flag) + " needs two comma-separated values for the degenerate family");
  }
  return parts;
}

AnomalyModel model_from_flags(const ModelArgs& a) {
  if (a.family == "generic") {
    return make_generic_model(parse_number(a.ell1), parse_complex(a.r2), parse_complex(a.t2), a.r0,
                              a.t0, a.gamma);
  }
  if (a.family == "full_background") {
    if (a.r1_1.empty() || a.r1_2.empty()) throw UsageError("--r1-1 and --r1-2 are required");
    Background dir;
    if (a.direction == "full_transmission") {
      dir = Background::full_transmission;
    } else if (a.direction == "full_reflection") {
      dir = Background::full_reflection;
    } else {
      throw UsageError("--direction must be full_transmission or full_reflection");
    }
    return make_full_background_model(parse_number(a.ell1), parse_complex(a.r1_1),
                                      parse_complex(a.r1_2), a.r2_1, a.r2_2, parse_number(a.t2),
                                      a.r0, a.t0, a.gamma, a.sign, dir);
  }
  if (a.family == "degenerate") {
    const auto l = two_values(a.ell1, "--ell1");
    const auto r = two_values(a.r2, "--r2");
    const auto t = two_values(a.t2, "--t2");
    return make_degenerate_model({parse_number(l[0]), parse_complex(r[0]), parse_complex(t[0])},
                                 {parse_number(l[1]), parse_complex(r[1]), parse_complex(t[1])},
                                 a.r0, a.t0, a.gamma);
  }
  throw UsageError("--family must be generic, full_background or degenerate");
}

void do_model(const ModelArgs& a, const std::string& header, Runner& r) {
  AnomalyModel model = a.model_path.empty() ? model_from_flags(a)
                                            : model_from_json(read_json_file(a.model_path));
  const ValidationReport rep = validate_model(model);
  if (!rep.ok()) {
    for (const auto& c : rep.checks) {
      if (!c.passed && c.enforced) r.say("constraint failed: " + c.id);
    }
    throw ConfigError("anomaly model violates its coefficient constraints");
  }
  const auto ks = parse_grid(a.ktilde);
  const auto ws = parse_grid(a.wtilde);
  const auto rows = figure_data(model, ks, ws);
  const std::string csv = figure_csv(rows, header);
  if (!a.c.out.empty()) {
    r.emit(a.c.out, csv);
  } else {
    r.say(csv);
  }
  if (!a.save_model.empty()) r.emit(a.save_model, json_document(model_to_json(model), header));
  if (!a.c.svg.empty()) {
    std::vector<Polyline> lines;
    for (const auto& row : rows) {
      const std::string label = "ktilde=" + format_double(row.ktilde);
      if (lines.empty() || lines.back().label != label) lines.push_back({label, {}});
      lines.back().points.emplace_back(row.wtilde, row.transmittance);
    }
    r.emit(a.c.svg, svg_plot(lines, "omega - omega0", "|T|^2", 0.0));
  }
}

// ---- fit -------------------------------------------------------------------------

struct FitArgs {
  Common c;
  double kappa0 = 0.0;
  double omega0 = 0.0;
  std::string offsets = "-0.02,-0.01,0.01,0.015,0.02,0.03";
  double curve_step = 0.005;
  int curve_steps = 10;
};

void do_fit(const FitArgs& a, const std::string& header, Runner& r) {
  const SlabStructure s = require_structure(a.c);
  const Medium amb = s.ambient();
  if (!in_diamond(a.kappa0, a.omega0, amb)) {
    throw OutsideDiamondError("(kappa0, omega0) is outside the diamond");
  }
  const auto offsets = parse_grid(a.offsets);
  const DispersionTrace trace = trace_dispersion(s, a.kappa0, a.omega0, offsets, a.c.nx, a.c.nz);
  if (!trace.complete) throw NumericalError("dispersion trace incomplete: " + trace.failure);
  const double omega0 = trace.omega0;

  std::vector<DispersionSample> roots;
  for (const auto& smp : trace.samples) {
    if (smp.kappa != a.kappa0) roots.push_back(smp);
  }
  ScatteringSolver solver(s, a.c.nx, a.c.nz);
  std::vector<ExtremalPoint> points(roots.size());
  parallel_for(static_cast<int>(roots.size()), a.c.threads, [&](int i) {
    points[i] = solver_extrema(solver, roots[i].kappa, roots[i].omega_root);
  });
  const AnomalyFit fit = fit_anomaly(points, a.kappa0, omega0, [&](double w) {
    return solver.solve(a.kappa0, w).transmittance();
  });
  const double exponent = width_exponent(points, a.kappa0);

  nlohmann::json terminations;
  const ExtremalPoint* start = nullptr;
  for (const auto& p : points) {
    if (p.kappa > a.kappa0 && (!start || p.kappa < start->kappa)) start = &p;
  }
  if (start && a.curve_steps > 0) {
    CurveOptions copts;
    copts.max_steps = a.curve_steps;
    copts.kappa0 = a.kappa0;
    for (Extremum which : {Extremum::total_T, Extremum::total_R}) {
      const auto curve = trace_extremal_curve(solver, which, *start, a.curve_step, copts);
      terminations[which == Extremum::total_T ? "total_T" : "total_R"] =
          termination_name(curve.reason);
    }
  } else {
    terminations = {{"total_T", "not_run"}, {"total_R", "not_run"}};
  }

  auto extrema = nlohmann::json::array();
  for (const auto& p : points) {
    extrema.push_back({{"kappa", p.kappa},
                       {"omega_T1", p.omega_T1},
                       {"omega_T0", p.omega_T0},
                       {"Tmax", p.Tmax},
                       {"Tmin", p.Tmin}});
  }
  nlohmann::json doc{{"kappa0", a.kappa0},
                     {"omega0", omega0},
                     {"ell1", fit.ell1_hat},
                     {"r2", fit.r2_hat},
                     {"t2", fit.t2_hat},
                     {"r0", fit.r0_hat},
                     {"t0", fit.t0_hat},
                     {"residual", fit.residual},
                     {"width_exponent", exponent},
                     {"curve_termination", terminations},
                     {"extrema", extrema}};
  if (!a.c.out.empty()) {
    r.emit(a.c.out, json_document(doc, header));
  } else {
    r.say(doc.dump(2));
  }
  if (!a.c.svg.empty()) {
    std::vector<ExtremalPoint> sorted = points;
    std::sort(sorted.begin(), sorted.end(),
              [](const ExtremalPoint& x, const ExtremalPoint& y) { return x.kappa < y.kappa; });
    Polyline t1{"total transmission", {}}, t0{"total reflection", {}};
    for (const auto& p : sorted) {
      t1.points.emplace_back(p.kappa, p.omega_T1);
      t0.points.emplace_back(p.kappa, p.omega_T0);
    }
    r.emit(a.c.svg, svg_plot({t1, t0}, "kappa", "omega", a.kappa0));
  }
}

// ---- validate --------------------------------------------------------------------

struct ValidateArgs {
  Common c;
  std::string model_path;
};

bool do_validate(const ValidateArgs& a, const std::string& header, Runner& r) {
  if (a.model_path.empty() && a.c.config.empty()) {
    throw UsageError("validate needs --model and/or --config");
  }
  nlohmann::json doc;
  bool ok = true;
  if (!a.model_path.empty()) {
    const AnomalyModel model = model_from_json(read_json_file(a.model_path));
    const ValidationReport rep = validate_model(model);
    auto checks = nlohmann::json::array();
    for (const auto& c : rep.checks) {
      checks.push_back({{"id", c.id}, {"passed", c.passed}, {"residual", c.residual},
                        {"enforced", c.enforced}});
      r.say(std::string(c.passed ? "pass  " : (c.enforced ? "FAIL  " : "note  ")) + c.id +
            "  (residual " + format_double(c.residual) + ")");
    }
    doc["model"] = {{"family", family_name(model)}, {"checks", checks}, {"ok", rep.ok()}};
    ok = ok && rep.ok();
  }
  if (!a.c.config.empty()) {
    const SlabStructure s = load_config_file(a.c.config);
    const SymmetryReport sym = check_symmetries(s);
    doc["structure"] = {{"valid", true},
                        {"z_symmetric", sym.z_symmetric},
                        {"x_symmetric", sym.x_symmetric}};
    r.say(std::string("structure valid; z_symmetric=") + (sym.z_symmetric ? "true" : "false") +
          " x_symmetric=" + (sym.x_symmetric ? "true" : "false"));
  }
  if (!a.c.out.empty()) r.emit(a.c.out, json_document(doc, header));
  return ok;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  if (text.empty()) return {};
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError("range must be lo:hi:count (got '" + text + "')");
    const double lo = parse_number(parts[0]);
    const double hi = parse_number(parts[1]);
    const double count_d = parse_number(parts[2]);
    const long count = std::lround(count_d);
    if (count_d != static_cast<double>(count) || count < 0) {
      throw UsageError("range count must be a nonnegative integer");
    }
    std::vector<double> out;
    out.reserve(count);
    if (count == 1) return {lo};
    for (long i = 0; i < count; ++i) {
      out.push_back(i + 1 == count ? hi : lo + (hi - lo) * static_cast<double>(i) / (count - 1));
    }
    return out;
  }
  std::vector<double> out;
  for (const auto& p : split(text, ',')) out.push_back(parse_number(p));
  return out;
}

std::complex<double> parse_complex(const std::string& text) {
  if (text.empty()) throw UsageError("empty complex number");
  if (text.back() != 'i') return {parse_number(text), 0.0};
  const std::string body = text.substr(0, text.size() - 1);
  // Split at the last sign that is not part of an exponent or the leading sign.
  for (std::size_t pos = body.size(); pos-- > 1;) {
    const char c = body[pos];
    if ((c == '+' || c == '-') && body[pos - 1] != 'e' && body[pos - 1] != 'E') {
      const std::string im = body.substr(pos);
      return {parse_number(body.substr(0, pos)),
              im == "+" ? 1.0 : im == "-" ? -1.0 : parse_number(im)};
    }
  }
  if (body.empty() || body == "+") return {0.0, 1.0};
  if (body == "-") return {0.0, -1.0};
  return {0.0, parse_number(body)};
}

CommandOutcome run(const std::vector<std::string>& args) {
  CommandOutcome outcome;
  Runner runner(outcome);

  CLI::App app{"Scattering, guided modes and transmission anomalies of periodic slabs", "slabres"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  SolveArgs solve;
  auto* s_solve = app.add_subcommand("solve", "solve one scattering problem");
  add_common(s_solve, solve.c);
  s_solve->add_option("--kappa", solve.kappa)->required();
  s_solve->add_option("--omega", solve.omega)->required();
  s_solve->add_option("--side", solve.side, "left or right incidence")->capture_default_str();

  SweepArgs sweep;
  auto* s_sweep = app.add_subcommand("sweep", "transmittance over a (kappa, omega) grid");
  add_common(s_sweep, sweep.c);
  s_sweep->add_option("--kappa", sweep.kappa, "list or lo:hi:count")->required();
  s_sweep->add_option("--omega", sweep.omega, "list or lo:hi:count")->required();

  ModesArgs modes;
  auto* s_modes = app.add_subcommand("modes", "find embedded guided modes");
  add_common(s_modes, modes.c);
  s_modes->add_option("--kappa", modes.kappa)->capture_default_str();
  s_modes->add_option("--window", modes.window, "lo:hi")->capture_default_str();
  s_modes->add_option("--scan", modes.scan, "coarse scan points")->capture_default_str();

  TraceArgs trace;
  auto* s_trace = app.add_subcommand("trace", "trace the complex dispersion root");
  add_common(s_trace, trace.c);
  s_trace->add_option("--kappa0", trace.kappa0)->required();
  s_trace->add_option("--omega0", trace.omega0)->required();
  s_trace->add_option("--offsets", trace.offsets, "kappa offsets")->capture_default_str();

  ModelArgs model;
  auto* s_model = app.add_subcommand("model", "evaluate a truncated anomaly model");
  add_common(s_model, model.c, false);
  s_model->add_option("--model", model.model_path, "model document (JSON)");
  s_model->add_option("--save-model", model.save_model, "write the validated model as JSON");
  s_model->add_option("--family", model.family)->capture_default_str();
  s_model->add_option("--ell1", model.ell1)->capture_default_str();
  s_model->add_option("--r2", model.r2)->capture_default_str();
  s_model->add_option("--t2", model.t2)->capture_default_str();
  s_model->add_option("--r0", model.r0)->capture_default_str();
  s_model->add_option("--t0", model.t0)->capture_default_str();
  s_model->add_option("--gamma", model.gamma)->capture_default_str();
  s_model->add_option("--r1-1", model.r1_1);
  s_model->add_option("--r1-2", model.r1_2);
  s_model->add_option("--r2-1", model.r2_1);
  s_model->add_option("--r2-2", model.r2_2);
  s_model->add_option("--sign", model.sign)->capture_default_str();
  s_model->add_option("--direction", model.direction)->capture_default_str();
  s_model->add_option("--ktilde", model.ktilde)->capture_default_str();
  s_model->add_option("--wtilde", model.wtilde)->capture_default_str();

  FitArgs fit;
  auto* s_fit = app.add_subcommand("fit", "fit anomaly coefficients from solver extrema");
  add_common(s_fit, fit.c);
  s_fit->add_option("--kappa0", fit.kappa0)->required();
  s_fit->add_option("--omega0", fit.omega0)->required();
  s_fit->add_option("--offsets", fit.offsets)->capture_default_str();
  s_fit->add_option("--curve-step", fit.curve_step)->capture_default_str();
  s_fit->add_option("--curve-steps", fit.curve_steps)->capture_default_str();

  ValidateArgs validate;
  auto* s_validate = app.add_subcommand("validate", "check model constraints and structure");
  add_common(s_validate, validate.c);
  s_validate->add_option("--model", validate.model_path, "model document (JSON)");

  std::vector<std::string> argv_store{"slabres"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    outcome.log = app.help();
    return outcome;
  } catch (const CLI::CallForVersion&) {
    outcome.log = std::string(kVersion) + '\n';
    return outcome;
  } catch (const CLI::ParseError& e) {
    outcome.exit_code = static_cast<int>(ErrorKind::usage);
    outcome.log = std::string("usage error: ") + e.what() + '\n';
    return outcome;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string header = provenance_line(sub->get_name(), canonical_hash(*sub));
  try {
    if (sub == s_solve) do_solve(solve, header, runner);
    if (sub == s_sweep) do_sweep(sweep, header, runner);
    if (sub == s_modes) do_modes(modes, header, runner);
    if (sub == s_trace) do_trace(trace, header, runner);
    if (sub == s_model) do_model(model, header, runner);
    if (sub == s_fit) do_fit(fit, header, runner);
    if (sub == s_validate && !do_validate(validate, header, runner)) {
      outcome.exit_code = static_cast<int>(ErrorKind::config);
    }
  } catch (const Error& e) {
    outcome.exit_code = static_cast<int>(e.kind());
    runner.say(std::string("error: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    outcome.exit_code = static_cast<int>(ErrorKind::config);
    runner.say(std::string("error: ") + e.what());
  } catch (const std::exception& e) {
    outcome.exit_code = static_cast<int>(ErrorKind::numerical);
    runner.say(std::string("error: ") + e.what());
  }
  return outcome;
}

}  // namespace slabres
