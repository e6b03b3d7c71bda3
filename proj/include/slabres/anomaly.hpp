#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "slabres/harmonics.hpp"

namespace slabres {

// Truncated Weierstrass factors of ell, a, b near a guided-mode pair, in the local
// variables ktilde = kappa - kappa0 and wtilde = omega - omega0.

// Single simple zero of ell, a and b.
struct GenericAnomalyModel {
  double ell1 = 0.0;
  cplx r2;  // distinct reals, or r2 == t2 non-real
  cplx t2;
  double r0 = 0.0;
  double t0 = 0.0;
  double gamma = 0.0;
  cplx ell2;  // derived
  // Optional coefficients of ktilde^n, n = 3, 4, ... (index 0 holds n = 3).
  std::vector<double> r_high;
  std::vector<double> t_high;
  std::vector<double> ell_high;
};

enum class Background { full_transmission, full_reflection };

// One of a, b has a double zero in wtilde (two linear-root factors); the other and ell
// have a simple zero. For full_transmission the pair belongs to a and the single factor
// to b; full_reflection swaps the roles. r0 is the constant of the pair factor and t0 the
// constant of the single factor (t0 = 1 by the theory).
struct FullBackgroundModel {
  double ell1 = 0.0;
  cplx r1_1;
  cplx r1_2;
  double r2_1 = 0.0;
  double r2_2 = 0.0;
  double t2 = 0.0;
  double r0 = 0.0;
  double t0 = 1.0;
  double gamma = 0.0;
  int sign = 1;  // the +/- of b's constant +/- i t0 e^{i gamma}
  Background direction = Background::full_transmission;
  cplx ell2;  // derived
};

// ell, a, b each a product of two simple-root factors.
struct DegenerateModel {
  struct Branch {
    double ell1 = 0.0;
    cplx r2;
    cplx t2;
    cplx ell2;  // derived
  };
  Branch branch[2];
  double r0 = 0.0;
  double t0 = 0.0;
  double gamma = 0.0;
};

using AnomalyModel = std::variant<GenericAnomalyModel, FullBackgroundModel, DegenerateModel>;

// Constructors validate the coefficient relations and derive ell2; violations throw
// ConfigError naming the failed clause.
GenericAnomalyModel make_generic_model(double ell1, cplx r2, cplx t2, double r0, double t0,
                                       double gamma = 0.0);
FullBackgroundModel make_full_background_model(double ell1, cplx r1_1, cplx r1_2, double r2_1,
                                               double r2_2, double t2, double r0, double t0 = 1.0,
                                               double gamma = 0.0, int sign = 1,
                                               Background direction =
                                                   Background::full_transmission);
struct DegenerateBranchInput {
  double ell1;
  cplx r2;
  cplx t2;
};
DegenerateModel make_degenerate_model(DegenerateBranchInput first, DegenerateBranchInput second,
                                      double r0, double t0, double gamma = 0.0);

struct ModelValues {
  cplx ell;
  cplx a;
  cplx b;
};

ModelValues model_eval(const AnomalyModel& model, double ktilde, double wtilde);

// |b|^2 / (|a|^2 + |b|^2); throws NumericalError at the discontinuity point a = b = 0.
double model_transmittance(const AnomalyModel& model, double ktilde, double wtilde);

struct ZeroCurves {
  std::vector<double> omega_a;  // total transmission (a = 0)
  std::vector<double> omega_b;  // total reflection (b = 0)
};

// Throws NumericalError when the relevant branch coefficients are not real.
ZeroCurves zero_curves(const AnomalyModel& model, double ktilde);

struct ConstraintCheck {
  std::string id;
  bool passed = false;
  double residual = 0.0;
  bool enforced = true;  // false for conjectured relations that are only reported
};

struct ValidationReport {
  std::vector<ConstraintCheck> checks;
  bool ok() const;
};

ValidationReport validate_model(const AnomalyModel& model);

struct FigureRow {
  double ktilde = 0.0;
  double wtilde = 0.0;
  cplx R;  // a / ell of the truncated model
  cplx T;  // b / ell
  double transmittance = 0.0;  // NaN at the discontinuity point
  double energy_defect = 0.0;  // | |a|^2 + |b|^2 - |ell|^2 | / |ell|^2 (truncation defect)
};

// One row per (ktilde, wtilde), sorted by ktilde then wtilde.
std::vector<FigureRow> figure_data(const AnomalyModel& model, const std::vector<double>& ktildes,
                                   const std::vector<double>& wtildes);

std::string family_name(const AnomalyModel& model);

nlohmann::json model_to_json(const AnomalyModel& model);
AnomalyModel model_from_json(const nlohmann::json& doc);

}  // namespace slabres
