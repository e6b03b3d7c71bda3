#include "slabres/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slabres/error.hpp"

namespace slabres {

namespace {

const cplx kI(0.0, 1.0);
constexpr double kRelTol = 1e-12;

bool is_real(cplx z) { return z.imag() == 0.0; }

bool same(cplx a, cplx b) {
  return std::abs(a - b) <= kRelTol * std::max({1.0, std::abs(a), std::abs(b)});
}

enum class Alternative { distinct_reals, equal_nonreal, invalid_equal_reals, invalid_mixed };

Alternative classify(cplx r2, cplx t2) {
  if (same(r2, t2)) return is_real(r2) && is_real(t2) ? Alternative::invalid_equal_reals
                                                      : Alternative::equal_nonreal;
  if (is_real(r2) && is_real(t2)) return Alternative::distinct_reals;
  return Alternative::invalid_mixed;
}

// ell2 from the unitarity relations of a simple-zero triple (ell, a, b):
//   Re ell2 = r0^2 Re r2 + t0^2 Re t2,  |ell2|^2 = r0^2 |r2|^2 + t0^2 |t2|^2,  Im ell2 >= 0.
cplx simple_ell2(cplx r2, cplx t2, double r0, double t0) {
  if (same(r2, t2)) return {r2.real(), std::abs(r2.imag())};
  return {r0 * r0 * r2.real() + t0 * t0 * t2.real(), r0 * std::abs(t0) * std::abs(t2 - r2)};
}

cplx full_background_ell2(double ell1, cplx r1_1, cplx r1_2, double t2, double r0) {
  return {t2, r0 * std::abs(r1_1 - ell1) * std::abs(r1_2 - ell1)};
}

void require(bool ok, const std::string& clause) {
  if (!ok) throw ConfigError("anomaly model rejected: " + clause);
}

void check_alternative(cplx r2, cplx t2, const std::string& lemma) {
  switch (classify(r2, t2)) {
    case Alternative::distinct_reals:
    case Alternative::equal_nonreal:
      return;
    case Alternative::invalid_equal_reals:
      throw ConfigError("anomaly model rejected: " + lemma +
                        ": r2 and t2 cannot be identical real numbers");
    case Alternative::invalid_mixed:
      throw ConfigError("anomaly model rejected: " + lemma +
                        ": r2 and t2 must be distinct reals or equal non-real numbers");
  }
}

double poly_tail(double k, const std::vector<double>& high) {
  double acc = 0.0;
  double kn = k * k * k;
  for (double c : high) {
    acc += c * kn;
    kn *= k;
  }
  return acc;
}

cplx factor(double w, double k, cplx c1, cplx c2) { return w + c1 * k + c2 * k * k; }

double real_root(double k, cplx c1, cplx c2, const char* what) {
  if (!is_real(c1) || !is_real(c2)) {
    throw NumericalError(std::string("no real zero curve; transmittance continuous (") + what +
                         " has non-real coefficients)");
  }
  return -c1.real() * k - c2.real() * k * k;
}

ConstraintCheck check(std::string id, bool passed, double residual, bool enforced = true) {
  return {std::move(id), passed, residual, enforced};
}

ConstraintCheck alternative_check(const std::string& id, cplx r2, cplx t2) {
  const Alternative alt = classify(r2, t2);
  const bool ok = alt == Alternative::distinct_reals || alt == Alternative::equal_nonreal;
  double residual = 0.0;
  if (alt == Alternative::invalid_equal_reals) residual = 1.0;
  if (alt == Alternative::invalid_mixed) residual = std::abs(r2.imag()) + std::abs(t2.imag());
  return check(id, ok, residual);
}

void simple_identity_checks(std::vector<ConstraintCheck>& out, const std::string& prefix, cplx ell2,
                            cplx r2, cplx t2, double r0, double t0) {
  const double re = ell2.real() - (r0 * r0 * r2.real() + t0 * t0 * t2.real());
  const double scale = std::max({1.0, std::abs(r2), std::abs(t2)});
  out.push_back(check(prefix + "Re(ell2) = r0^2 Re(r2) + t0^2 Re(t2)",
                      std::abs(re) <= kRelTol * scale, std::abs(re)));
  const double mod = std::norm(ell2) - (r0 * r0 * std::norm(r2) + t0 * t0 * std::norm(t2));
  out.push_back(check(prefix + "|ell2|^2 = r0^2 |r2|^2 + t0^2 |t2|^2",
                      std::abs(mod) <= kRelTol * scale * scale, std::abs(mod)));
}

struct GenericVisitor {
  double k, w;
  ModelValues operator()(const GenericAnomalyModel& m) const {
    const cplx phase = std::polar(1.0, m.gamma);
    const cplx ell = factor(w, k, m.ell1, m.ell2) + poly_tail(k, m.ell_high);
    const cplx fa = factor(w, k, m.ell1, m.r2) + poly_tail(k, m.r_high);
    const cplx fb = factor(w, k, m.ell1, m.t2) + poly_tail(k, m.t_high);
    return {ell, fa * m.r0 * phase, fb * kI * m.t0 * phase};
  }
  ModelValues operator()(const FullBackgroundModel& m) const {
    const cplx phase = std::polar(1.0, m.gamma);
    const cplx ell = factor(w, k, m.ell1, m.ell2);
    const cplx pair = factor(w, k, m.r1_1, m.r2_1) * factor(w, k, m.r1_2, m.r2_2);
    const cplx single = factor(w, k, m.ell1, m.t2);
    const cplx turn = static_cast<double>(m.sign) * kI;
    if (m.direction == Background::full_transmission) {
      return {ell, pair * m.r0 * phase, single * turn * m.t0 * phase};
    }
    return {ell, single * m.t0 * phase, pair * turn * m.r0 * phase};
  }
  ModelValues operator()(const DegenerateModel& m) const {
    const cplx phase = std::polar(1.0, m.gamma);
    const auto& b1 = m.branch[0];
    const auto& b2 = m.branch[1];
    const cplx ell = factor(w, k, b1.ell1, b1.ell2) * factor(w, k, b2.ell1, b2.ell2);
    const cplx fa = factor(w, k, b1.ell1, b1.r2) * factor(w, k, b2.ell1, b2.r2);
    const cplx fb = factor(w, k, b1.ell1, b1.t2) * factor(w, k, b2.ell1, b2.t2);
    return {ell, fa * m.r0 * phase, fb * kI * m.t0 * phase};
  }
};

}  // namespace

GenericAnomalyModel make_generic_model(double ell1, cplx r2, cplx t2, double r0, double t0,
                                       double gamma) {
  require(std::isfinite(ell1) && std::isfinite(gamma), "coefficients must be finite");
  require(std::abs(r0 * r0 + t0 * t0 - 1.0) <= kRelTol, "Lemma 3.3(i): r0^2 + t0^2 = 1");
  require(r0 > 0.0 && r0 < 1.0, "0 < r0 < 1");
  require(t0 != 0.0 && std::abs(t0) < 1.0, "0 < |t0| < 1");
  check_alternative(r2, t2, "Lemma 3.4");
  GenericAnomalyModel m;
  m.ell1 = ell1;
  m.r2 = r2;
  m.t2 = t2;
  m.r0 = r0;
  m.t0 = t0;
  m.gamma = gamma;
  m.ell2 = simple_ell2(r2, t2, r0, t0);
  return m;
}

FullBackgroundModel make_full_background_model(double ell1, cplx r1_1, cplx r1_2, double r2_1,
                                               double r2_2, double t2, double r0, double t0,
                                               double gamma, int sign, Background direction) {
  require(std::abs(t0 - 1.0) <= kRelTol, "Lemma 4.2(i): t0 = 1");
  require(sign == 1 || sign == -1, "Lemma 4.2(ii): leading constant of b is +/- i e^{i gamma}");
  const cplx sum = r1_1 + r1_2;
  const cplx prod = r1_1 * r1_2;
  require(std::abs(sum.imag()) <= kRelTol * std::max(1.0, std::abs(sum)) &&
              std::abs(prod.imag()) <= kRelTol * std::max(1.0, std::abs(prod)),
          "Lemma 4.2(iii): r1_1 + r1_2 and r1_1 * r1_2 are real");
  require(r0 > 0.0, "r0 > 0");
  FullBackgroundModel m;
  m.ell1 = ell1;
  m.r1_1 = r1_1;
  m.r1_2 = r1_2;
  m.r2_1 = r2_1;
  m.r2_2 = r2_2;
  m.t2 = t2;
  m.r0 = r0;
  m.t0 = t0;
  m.gamma = gamma;
  m.sign = sign;
  m.direction = direction;
  m.ell2 = full_background_ell2(ell1, r1_1, r1_2, t2, r0);
  return m;
}

DegenerateModel make_degenerate_model(DegenerateBranchInput first, DegenerateBranchInput second,
                                      double r0, double t0, double gamma) {
  require(first.ell1 != second.ell1, "Lemma 4.4: ell1 coefficients must be distinct");
  require(r0 > 0.0 && r0 < 1.0, "0 < r0 < 1");
  require(t0 != 0.0 && std::abs(t0) < 1.0, "0 < |t0| < 1");
  require(std::abs(r0 * r0 + t0 * t0 - 1.0) <= kRelTol, "r0^2 + t0^2 = 1");
  check_alternative(first.r2, first.t2, "Lemma 4.4 (branch 1)");
  check_alternative(second.r2, second.t2, "Lemma 4.4 (branch 2)");
  DegenerateModel m;
  m.r0 = r0;
  m.t0 = t0;
  m.gamma = gamma;
  const DegenerateBranchInput in[2] = {first, second};
  for (int i = 0; i < 2; ++i) {
    m.branch[i].ell1 = in[i].ell1;
    m.branch[i].r2 = in[i].r2;
    m.branch[i].t2 = in[i].t2;
    m.branch[i].ell2 = simple_ell2(in[i].r2, in[i].t2, r0, t0);
  }
  return m;
}

ModelValues model_eval(const AnomalyModel& model, double ktilde, double wtilde) {
  return std::visit(GenericVisitor{ktilde, wtilde}, model);
}

double model_transmittance(const AnomalyModel& model, double ktilde, double wtilde) {
  const ModelValues v = model_eval(model, ktilde, wtilde);
  const double na = std::norm(v.a);
  const double nb = std::norm(v.b);
  if (na + nb == 0.0) {
    throw NumericalError("discontinuity point: a = b = 0, transmittance undefined");
  }
  return nb / (na + nb);
}

ZeroCurves zero_curves(const AnomalyModel& model, double k) {
  ZeroCurves out;
  if (const auto* g = std::get_if<GenericAnomalyModel>(&model)) {
    out.omega_a.push_back(real_root(k, g->ell1, g->r2, "r2") - poly_tail(k, g->r_high));
    out.omega_b.push_back(real_root(k, g->ell1, g->t2, "t2") - poly_tail(k, g->t_high));
  } else if (const auto* f = std::get_if<FullBackgroundModel>(&model)) {
    std::vector<double> pair{real_root(k, f->r1_1, f->r2_1, "r1_1"),
                             real_root(k, f->r1_2, f->r2_2, "r1_2")};
    std::vector<double> single{real_root(k, f->ell1, f->t2, "t2")};
    if (f->direction == Background::full_transmission) {
      out.omega_a = pair;
      out.omega_b = single;
    } else {
      out.omega_a = single;
      out.omega_b = pair;
    }
  } else {
    const auto& d = std::get<DegenerateModel>(model);
    for (const auto& br : d.branch) {
      out.omega_a.push_back(real_root(k, br.ell1, br.r2, "r2"));
      out.omega_b.push_back(real_root(k, br.ell1, br.t2, "t2"));
    }
  }
  return out;
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ConstraintCheck& c) { return c.passed || !c.enforced; });
}

ValidationReport validate_model(const AnomalyModel& model) {
  ValidationReport rep;
  auto& out = rep.checks;
  if (const auto* g = std::get_if<GenericAnomalyModel>(&model)) {
    const double unit = std::abs(g->r0 * g->r0 + g->t0 * g->t0 - 1.0);
    out.push_back(check("Lemma 3.3(i): r0^2 + t0^2 = 1", unit <= kRelTol, unit));
    out.push_back(check("range: 0 < r0 < 1", g->r0 > 0.0 && g->r0 < 1.0, 0.0));
    out.push_back(check("range: 0 < |t0| < 1", g->t0 != 0.0 && std::abs(g->t0) < 1.0, 0.0));
    out.push_back(check("Lemma 3.3(ii): ell1 real", std::isfinite(g->ell1), 0.0));
    out.push_back(check("Lemma 3.3(iii): Im(ell2) >= 0", g->ell2.imag() >= 0.0,
                        std::max(0.0, -g->ell2.imag())));
    out.push_back(alternative_check("Lemma 3.4: r2, t2 distinct reals or equal non-real", g->r2,
                                    g->t2));
    simple_identity_checks(out, "Lemma 3.3 identity: ", g->ell2, g->r2, g->t2, g->r0, g->t0);
  } else if (const auto* f = std::get_if<FullBackgroundModel>(&model)) {
    const double t0_res = std::abs(f->t0 - 1.0);
    out.push_back(check("Lemma 4.2(i): t0 = 1", t0_res <= kRelTol, t0_res));
    out.push_back(check("Lemma 4.2(i): Im(ell2) >= 0", f->ell2.imag() >= 0.0,
                        std::max(0.0, -f->ell2.imag())));
    out.push_back(check("Lemma 4.2(ii): b constant is +/- i e^{i gamma}",
                        f->sign == 1 || f->sign == -1, 0.0));
    const cplx sum = f->r1_1 + f->r1_2;
    const cplx prod = f->r1_1 * f->r1_2;
    const double im = std::abs(sum.imag()) + std::abs(prod.imag());
    out.push_back(check("Lemma 4.2(iii): r1 sum and product real",
                        im <= kRelTol * std::max({1.0, std::abs(sum), std::abs(prod)}), im));
    const double gap = std::abs(f->r1_1 - f->ell1) * std::abs(f->r1_2 - f->ell1);
    if (gap != 0.0) {
      const double re = std::abs(f->ell2.real() - f->t2);
      out.push_back(check("Lemma 4.2 alternative (i): t2 = Re(ell2)", re <= kRelTol, re));
      const double mod = std::abs(std::abs(f->ell2.imag()) - f->r0 * gap);
      out.push_back(check("Lemma 4.2 alternative (i): |Im(ell2)| = r0 |r1_1 - ell1| |r1_2 - ell1|",
                          mod <= kRelTol * std::max(1.0, f->r0 * gap), mod));
    } else {
      const double re = std::abs(f->ell2.real() - f->t2);
      out.push_back(check("Lemma 4.2 alternative (ii): Re(ell2) = Re(t2)", re <= kRelTol, re));
    }
    out.push_back(check("range: r0 > 0", f->r0 > 0.0, 0.0));
    // Conjectured ordering; reported only.
    const bool between = is_real(f->r1_1) && is_real(f->r1_2) &&
                         std::min(f->r1_1.real(), f->r1_2.real()) <= f->ell1 &&
                         f->ell1 <= std::max(f->r1_1.real(), f->r1_2.real());
    out.push_back(check("conjecture: t1 = ell1 lies between r1_1 and r1_2", between, 0.0, false));
  } else {
    const auto& d = std::get<DegenerateModel>(model);
    out.push_back(check("Lemma 4.4: ell1 coefficients real and distinct",
                        d.branch[0].ell1 != d.branch[1].ell1, 0.0));
    const double unit = std::abs(d.r0 * d.r0 + d.t0 * d.t0 - 1.0);
    out.push_back(check("unitarity: r0^2 + t0^2 = 1", unit <= kRelTol, unit));
    out.push_back(check("range: 0 < r0 < 1", d.r0 > 0.0 && d.r0 < 1.0, 0.0));
    out.push_back(check("range: 0 < |t0| < 1", d.t0 != 0.0 && std::abs(d.t0) < 1.0, 0.0));
    for (int i = 0; i < 2; ++i) {
      const auto& br = d.branch[i];
      const std::string tag = " (branch " + std::to_string(i + 1) + ")";
      out.push_back(check("Lemma 4.4: Im(ell2) >= 0" + tag, br.ell2.imag() >= 0.0,
                          std::max(0.0, -br.ell2.imag())));
      out.push_back(alternative_check("Lemma 4.4: r2, t2 distinct reals or equal non-real" + tag,
                                      br.r2, br.t2));
    }
  }
  return rep;
}

std::vector<FigureRow> figure_data(const AnomalyModel& model, const std::vector<double>& ktildes,
                                   const std::vector<double>& wtildes) {
  std::vector<FigureRow> rows;
  rows.reserve(ktildes.size() * wtildes.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double k : ktildes) {
    for (double w : wtildes) {
      const ModelValues v = model_eval(model, k, w);
      FigureRow row{k, w, cplx(nan, nan), cplx(nan, nan), nan, nan};
      const double na = std::norm(v.a);
      const double nb = std::norm(v.b);
      if (na + nb > 0.0) row.transmittance = nb / (na + nb);
      const double nl = std::norm(v.ell);
      if (nl > 0.0) {
        row.R = v.a / v.ell;
        row.T = v.b / v.ell;
        row.energy_defect = std::abs(na + nb - nl) / nl;
      }
      rows.push_back(row);
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const FigureRow& a, const FigureRow& b) {
    return a.ktilde != b.ktilde ? a.ktilde < b.ktilde : a.wtilde < b.wtilde;
  });
  return rows;
}

std::string family_name(const AnomalyModel& model) {
  switch (model.index()) {
    case 0:
      return "generic";
    case 1:
      return "full_background";
    default:
      return "degenerate";
  }
}

namespace {

nlohmann::json complex_json(cplx z) {
  if (z.imag() == 0.0) return z.real();
  return nlohmann::json::array({z.real(), z.imag()});
}

cplx complex_from(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError("expected a number or a [re, im] pair");
}

cplx complex_at(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) throw ConfigError(std::string("missing model coefficient '") + key + "'");
  return complex_from(doc.at(key));
}

double real_at(const nlohmann::json& doc, const char* key) {
  const cplx z = complex_at(doc, key);
  if (z.imag() != 0.0) throw ConfigError(std::string("coefficient '") + key + "' must be real");
  return z.real();
}

}  // namespace

nlohmann::json model_to_json(const AnomalyModel& model) {
  nlohmann::json doc;
  doc["family"] = family_name(model);
  if (const auto* g = std::get_if<GenericAnomalyModel>(&model)) {
    doc["ell1"] = g->ell1;
    doc["r2"] = complex_json(g->r2);
    doc["t2"] = complex_json(g->t2);
    doc["r0"] = g->r0;
    doc["t0"] = g->t0;
    doc["gamma"] = g->gamma;
    doc["ell2"] = nlohmann::json::array({g->ell2.real(), g->ell2.imag()});
    if (!g->r_high.empty()) doc["r_high"] = g->r_high;
    if (!g->t_high.empty()) doc["t_high"] = g->t_high;
    if (!g->ell_high.empty()) doc["ell_high"] = g->ell_high;
  } else if (const auto* f = std::get_if<FullBackgroundModel>(&model)) {
    doc["ell1"] = f->ell1;
    doc["r1_1"] = complex_json(f->r1_1);
    doc["r1_2"] = complex_json(f->r1_2);
    doc["r2_1"] = f->r2_1;
    doc["r2_2"] = f->r2_2;
    doc["t2"] = f->t2;
    doc["r0"] = f->r0;
    doc["t0"] = f->t0;
    doc["gamma"] = f->gamma;
    doc["sign"] = f->sign;
    doc["direction"] =
        f->direction == Background::full_transmission ? "full_transmission" : "full_reflection";
    doc["ell2"] = nlohmann::json::array({f->ell2.real(), f->ell2.imag()});
  } else {
    const auto& d = std::get<DegenerateModel>(model);
    auto branches = nlohmann::json::array();
    for (const auto& br : d.branch) {
      branches.push_back({{"ell1", br.ell1},
                          {"r2", complex_json(br.r2)},
                          {"t2", complex_json(br.t2)},
                          {"ell2", nlohmann::json::array({br.ell2.real(), br.ell2.imag()})}});
    }
    doc["branches"] = branches;
    doc["r0"] = d.r0;
    doc["t0"] = d.t0;
    doc["gamma"] = d.gamma;
  }
  return doc;
}

// Reads coefficients without enforcing the lemmas, so that invalid models can still be
// reported by validate_model. A stored ell2 overrides the derived value.
AnomalyModel model_from_json(const nlohmann::json& doc) {
  try {
    const std::string family = doc.at("family").get<std::string>();
    const double gamma = doc.value("gamma", 0.0);
    if (family == "generic") {
      GenericAnomalyModel m;
      m.ell1 = real_at(doc, "ell1");
      m.r2 = complex_at(doc, "r2");
      m.t2 = complex_at(doc, "t2");
      m.r0 = real_at(doc, "r0");
      m.t0 = real_at(doc, "t0");
      m.gamma = gamma;
      m.ell2 = doc.contains("ell2") ? complex_at(doc, "ell2") : simple_ell2(m.r2, m.t2, m.r0, m.t0);
      if (doc.contains("r_high")) m.r_high = doc.at("r_high").get<std::vector<double>>();
      if (doc.contains("t_high")) m.t_high = doc.at("t_high").get<std::vector<double>>();
      if (doc.contains("ell_high")) m.ell_high = doc.at("ell_high").get<std::vector<double>>();
      return m;
    }
    if (family == "full_background") {
      FullBackgroundModel m;
      m.ell1 = real_at(doc, "ell1");
      m.r1_1 = complex_at(doc, "r1_1");
      m.r1_2 = complex_at(doc, "r1_2");
      m.r2_1 = real_at(doc, "r2_1");
      m.r2_2 = real_at(doc, "r2_2");
      m.t2 = real_at(doc, "t2");
      m.r0 = real_at(doc, "r0");
      m.t0 = doc.contains("t0") ? real_at(doc, "t0") : 1.0;
      m.gamma = gamma;
      m.sign = doc.value("sign", 1);
      const std::string dir = doc.value("direction", std::string("full_transmission"));
      if (dir == "full_transmission") {
        m.direction = Background::full_transmission;
      } else if (dir == "full_reflection") {
        m.direction = Background::full_reflection;
      } else {
        throw ConfigError("unknown background direction '" + dir + "'");
      }
      m.ell2 = doc.contains("ell2") ? complex_at(doc, "ell2")
                                    : full_background_ell2(m.ell1, m.r1_1, m.r1_2, m.t2, m.r0);
      return m;
    }
    if (family == "degenerate") {
      DegenerateModel m;
      m.r0 = real_at(doc, "r0");
      m.t0 = real_at(doc, "t0");
      m.gamma = gamma;
      const auto& branches = doc.at("branches");
      if (!branches.is_array() || branches.size() != 2) {
        throw ConfigError("degenerate model needs exactly two branches");
      }
      for (int i = 0; i < 2; ++i) {
        const auto& b = branches[i];
        m.branch[i].ell1 = real_at(b, "ell1");
        m.branch[i].r2 = complex_at(b, "r2");
        m.branch[i].t2 = complex_at(b, "t2");
        m.branch[i].ell2 = b.contains("ell2")
                               ? complex_at(b, "ell2")
                               : simple_ell2(m.branch[i].r2, m.branch[i].t2, m.r0, m.t0);
      }
      return m;
    }
    throw ConfigError("unknown model family '" + family + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed model document: ") + e.what());
  }
}

}  // namespace slabres
