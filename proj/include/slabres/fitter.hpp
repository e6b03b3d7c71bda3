#pragma once

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "slabres/harmonics.hpp"

namespace slabres {

class ScatteringSolver;

// Transmittance together with its complement. Supplying the reflectance separately lets
// the maximum of |T|^2 be polished as a minimum of |R|^2 without cancellation in 1 - |T|^2.
struct TransmissionSample {
  double transmittance = 0.0;
  double reflectance = 0.0;
};

using TransmissionFn = std::function<TransmissionSample(double omega)>;

struct ExtremaOptions {
  int samples = 41;  // coarse samples across the bracket before polishing
  double relative_tolerance = 1e-12;  // frequency tolerance relative to the bracket width
};

struct ExtremalPoint {
  double kappa = 0.0;
  double omega_T1 = 0.0;  // |T|^2 maximum
  double omega_T0 = 0.0;  // |T|^2 minimum
  double Tmax = 0.0;
  double Tmin = 0.0;
  int polish_iterations = 0;
};

// Finds the interior maximum and minimum of |T|^2 on [lo, hi]; the returned point has
// kappa = 0 (callers fill it in). Throws NumericalError("no interior extremum").
ExtremalPoint locate_extrema(const TransmissionFn& f, double lo, double hi,
                             const ExtremaOptions& options = {});
ExtremalPoint locate_extrema(const std::function<double(double)>& transmittance, double lo,
                             double hi, const ExtremaOptions& options = {});

// Starts from [center - halfwidth, center + halfwidth] and doubles the window (at most
// `expansions` times) until both extrema are interior.
ExtremalPoint locate_extrema_expanding(const TransmissionFn& f, double center, double halfwidth,
                                       int expansions = 4, const ExtremaOptions& options = {});

// Extremal point of a scattering solver at one kappa; the search window is centred on
// Re(omega_root) with half-width `scale` * |Im(omega_root)|.
ExtremalPoint solver_extrema(const ScatteringSolver& solver, double kappa, cplx omega_root,
                             double scale = 6.0, const ExtremaOptions& options = {});

struct AnomalyFit {
  double kappa0 = 0.0;
  double omega0 = 0.0;
  double ell1_hat = 0.0;
  double r2_hat = 0.0;
  double t2_hat = 0.0;
  double r0_hat = 0.0;
  double t0_hat = 0.0;
  double residual = 0.0;
};

// Joint least squares of
//   omega_T1 = omega0 - ell1 kt - r2 kt^2,   omega_T0 = omega0 - ell1 kt - t2 kt^2
// with a shared ell1. When `plateau` (transmittance at kappa0 as a function of omega) is
// given, t0^2 is the mean of |T|^2 at omega0 +/- 10 |t2 - r2| kt_max^2 and r0^2 = 1 - t0^2;
// otherwise r0_hat and t0_hat are NaN.
AnomalyFit fit_anomaly(const std::vector<ExtremalPoint>& points, double kappa0, double omega0,
                       const std::function<double(double)>& plateau = {});

enum class Extremum { total_T, total_R };

struct QuadraticCurve {
  double c0 = 0.0;  // value at kappa0
  double c1 = 0.0;  // slope at kappa0
  double c2 = 0.0;
  double residual = 0.0;
};

// Unconstrained quadratic through one family of extremal frequencies, in kt = kappa - kappa0.
QuadraticCurve fit_curve(const std::vector<ExtremalPoint>& points, double kappa0, Extremum which);

// Least-squares slope of log|omega_T1 - omega_T0| against log|kt|.
double width_exponent(const std::vector<ExtremalPoint>& points, double kappa0);

enum class Termination { hit_diamond_boundary, vertical_tangent_detected, step_failure, step_limit };

std::string termination_name(Termination t);

struct ExtremalCurve {
  Extremum which = Extremum::total_T;
  std::vector<std::pair<double, double>> points;  // (kappa, omega)
  Termination reason = Termination::step_limit;
};

using TransmissionField = std::function<TransmissionSample(double kappa, double omega)>;
using RegionTest = std::function<bool(double kappa, double omega)>;

struct CurveOptions {
  int max_steps = 400;
  int max_halvings = 5;
  double vertical_slope = 1e3;
  // Corrector accepts a point when the minimized objective (|T|^2 for total_R, |R|^2 for
  // total_T) is at most this value.
  double accept_level = 0.05;
  // Half-width of the corrector search along the normal. 0 selects 0.45 |omega_T1 -
  // omega_T0| of the start point.
  double corrector_halfwidth = 0.0;
  // When finite, the corrector half-width grows like ((kappa - kappa0) / (kappa_start -
  // kappa0))^2, following the quadratic opening of the anomaly.
  double kappa0 = std::numeric_limits<double>::quiet_NaN();
  int corrector_samples = 9;
};

// Pseudo-arclength continuation of the total-transmission (total_T) or total-reflection
// (total_R) curve in the (kappa, omega) plane. The sign of `step` sets the direction in kappa.
ExtremalCurve trace_extremal_curve(const TransmissionField& field, const RegionTest& inside,
                                   Extremum which, const ExtremalPoint& start, double step,
                                   const CurveOptions& options = {});

ExtremalCurve trace_extremal_curve(const ScatteringSolver& solver, Extremum which,
                                   const ExtremalPoint& start, double step,
                                   const CurveOptions& options = {});

}  // namespace slabres
