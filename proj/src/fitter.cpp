#include "slabres/fitter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "slabres/error.hpp"
#include "slabres/scatter.hpp"

namespace slabres {

namespace {

// Golden-section search for a minimum of f on [a, b]; stops when the bracket is below tol.
double golden_min(const std::function<double(double)>& f, double a, double b, double tol,
                  int& iterations) {
  const double inv_phi = 1.0 / std::numbers::phi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol && iterations < 400) {
    ++iterations;
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

NumericalError no_extremum() {
  return NumericalError("no interior extremum in the bracket");
}

}  // namespace

ExtremalPoint locate_extrema(const TransmissionFn& f, double lo, double hi,
                             const ExtremaOptions& options) {
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw UsageError("extremum bracket must satisfy lo < hi");
  }
  const int n = std::max(5, options.samples);
  std::vector<double> x(n), t(n), r(n);
  for (int i = 0; i < n; ++i) {
    x[i] = lo + (hi - lo) * i / (n - 1);
    const TransmissionSample s = f(x[i]);
    t[i] = s.transmittance;
    r[i] = s.reflectance;
  }
  const auto imax = static_cast<int>(std::min_element(r.begin(), r.end()) - r.begin());
  const auto imin = static_cast<int>(std::min_element(t.begin(), t.end()) - t.begin());
  const double spread = *std::max_element(t.begin(), t.end()) - t[imin];
  if (!(spread > 1e-14) || imax == 0 || imax == n - 1 || imin == 0 || imin == n - 1) {
    throw no_extremum();
  }
  const double tol = options.relative_tolerance * (hi - lo);
  ExtremalPoint p;
  p.omega_T1 = golden_min([&](double w) { return f(w).reflectance; }, x[imax - 1], x[imax + 1],
                          tol, p.polish_iterations);
  p.omega_T0 = golden_min([&](double w) { return f(w).transmittance; }, x[imin - 1], x[imin + 1],
                          tol, p.polish_iterations);
  p.Tmax = f(p.omega_T1).transmittance;
  p.Tmin = f(p.omega_T0).transmittance;
  return p;
}

ExtremalPoint locate_extrema(const std::function<double(double)>& transmittance, double lo,
                             double hi, const ExtremaOptions& options) {
  return locate_extrema(
      [&](double w) {
        const double t = transmittance(w);
        return TransmissionSample{t, 1.0 - t};
      },
      lo, hi, options);
}

ExtremalPoint locate_extrema_expanding(const TransmissionFn& f, double center, double halfwidth,
                                       int expansions, const ExtremaOptions& options) {
  if (!(halfwidth > 0.0)) throw UsageError("extremum search half-width must be positive");
  for (int k = 0;; ++k) {
    try {
      return locate_extrema(f, center - halfwidth, center + halfwidth, options);
    } catch (const NumericalError&) {
      if (k >= expansions) throw;
      halfwidth *= 2.0;
    }
  }
}

ExtremalPoint solver_extrema(const ScatteringSolver& solver, double kappa, cplx omega_root,
                             double scale, const ExtremaOptions& options) {
  const double halfwidth = scale * std::abs(omega_root.imag());
  if (!(halfwidth > 0.0)) {
    throw UsageError("root has no imaginary part; no anomaly width to bracket");
  }
  ExtremalPoint p = locate_extrema_expanding(
      [&](double w) {
        const auto sol = solver.solve(kappa, w);
        return TransmissionSample{std::norm(sol.T), std::norm(sol.R)};
      },
      omega_root.real(), halfwidth, 4, options);
  p.kappa = kappa;
  return p;
}

AnomalyFit fit_anomaly(const std::vector<ExtremalPoint>& points, double kappa0, double omega0,
                       const std::function<double(double)>& plateau) {
  std::vector<double> distinct;
  for (const auto& p : points) {
    const double kt = p.kappa - kappa0;
    if (kt != 0.0 && std::find(distinct.begin(), distinct.end(), kt) == distinct.end()) {
      distinct.push_back(kt);
    }
  }
  if (distinct.size() < 2) {
    throw UsageError("underdetermined fit: need extremal points at two or more kappa != kappa0");
  }
  const auto rows = static_cast<Eigen::Index>(2 * points.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, 3);
  Eigen::VectorXd rhs(rows);
  double kt_max = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double kt = points[i].kappa - kappa0;
    kt_max = std::max(kt_max, std::abs(kt));
    const auto r = static_cast<Eigen::Index>(2 * i);
    a(r, 0) = -kt;
    a(r, 1) = -kt * kt;
    rhs[r] = points[i].omega_T1 - omega0;
    a(r + 1, 0) = -kt;
    a(r + 1, 2) = -kt * kt;
    rhs[r + 1] = points[i].omega_T0 - omega0;
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(rhs);
  AnomalyFit fit;
  fit.kappa0 = kappa0;
  fit.omega0 = omega0;
  fit.ell1_hat = c[0];
  fit.r2_hat = c[1];
  fit.t2_hat = c[2];
  fit.residual = (a * c - rhs).norm();
  fit.r0_hat = fit.t0_hat = std::numeric_limits<double>::quiet_NaN();
  if (plateau) {
    const double offset = 10.0 * std::abs(fit.t2_hat - fit.r2_hat) * kt_max * kt_max;
    const double t0sq = 0.5 * (plateau(omega0 - offset) + plateau(omega0 + offset));
    fit.t0_hat = std::sqrt(std::clamp(t0sq, 0.0, 1.0));
    fit.r0_hat = std::sqrt(std::clamp(1.0 - t0sq, 0.0, 1.0));
  }
  return fit;
}

QuadraticCurve fit_curve(const std::vector<ExtremalPoint>& points, double kappa0, Extremum which) {
  if (points.size() < 3) throw UsageError("underdetermined curve fit: need three or more points");
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double kt = points[i].kappa - kappa0;
    a(i, 0) = 1.0;
    a(i, 1) = kt;
    a(i, 2) = kt * kt;
    rhs[i] = which == Extremum::total_T ? points[i].omega_T1 : points[i].omega_T0;
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(rhs);
  return {c[0], c[1], c[2], (a * c - rhs).norm()};
}

double width_exponent(const std::vector<ExtremalPoint>& points, double kappa0) {
  std::vector<double> lx, ly;
  for (const auto& p : points) {
    const double kt = std::abs(p.kappa - kappa0);
    const double w = std::abs(p.omega_T1 - p.omega_T0);
    if (kt > 0.0 && w > 0.0) {
      lx.push_back(std::log(kt));
      ly.push_back(std::log(w));
    }
  }
  if (lx.size() < 2) throw UsageError("width exponent needs two or more nonzero widths");
  const auto n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (!(sxx > 0.0)) throw UsageError("width exponent needs two or more distinct |kappa offsets|");
  return sxy / sxx;
}

std::string termination_name(Termination t) {
  switch (t) {
    case Termination::hit_diamond_boundary:
      return "hit_diamond_boundary";
    case Termination::vertical_tangent_detected:
      return "vertical_tangent_detected";
    case Termination::step_failure:
      return "step_failure";
    case Termination::step_limit:
      return "step_limit";
  }
  return "unknown";
}

namespace {

struct Vec2 {
  double k = 0.0;
  double w = 0.0;
};

Vec2 operator+(Vec2 a, Vec2 b) { return {a.k + b.k, a.w + b.w}; }
Vec2 operator-(Vec2 a, Vec2 b) { return {a.k - b.k, a.w - b.w}; }
Vec2 operator*(double s, Vec2 a) { return {s * a.k, s * a.w}; }
double norm(Vec2 a) { return std::hypot(a.k, a.w); }
Vec2 unit(Vec2 a) { return (1.0 / norm(a)) * a; }

// Quadratic through three (s, point) pairs: value and derivative at s.
void lagrange3(const double s[3], const Vec2 p[3], double at, Vec2& value, Vec2& derivative) {
  value = {};
  derivative = {};
  for (int i = 0; i < 3; ++i) {
    double li = 1.0;
    double dli = 0.0;
    for (int j = 0; j < 3; ++j) {
      if (j == i) continue;
      double term = 1.0 / (s[i] - s[j]);
      double prod = term;
      for (int m = 0; m < 3; ++m) {
        if (m == i || m == j) continue;
        prod *= (at - s[m]) / (s[i] - s[m]);
      }
      dli += prod;
      li *= (at - s[j]) / (s[i] - s[j]);
    }
    value = value + li * p[i];
    derivative = derivative + dli * p[i];
  }
}

}  // namespace

ExtremalCurve trace_extremal_curve(const TransmissionField& field, const RegionTest& inside,
                                   Extremum which, const ExtremalPoint& start, double step,
                                   const CurveOptions& options) {
  if (!(step != 0.0) || !std::isfinite(step)) throw UsageError("continuation step must be nonzero");
  const auto objective = [&](Vec2 p) {
    const TransmissionSample s = field(p.k, p.w);
    return which == Extremum::total_R ? s.transmittance : s.reflectance;
  };
  const double hw0 = options.corrector_halfwidth > 0.0
                         ? options.corrector_halfwidth
                         : 0.45 * std::abs(start.omega_T1 - start.omega_T0);
  if (!(hw0 > 0.0)) throw UsageError("corrector half-width is zero; extremal frequencies coincide");

  ExtremalCurve curve;
  curve.which = which;
  std::vector<Vec2> pts{{start.kappa, which == Extremum::total_T ? start.omega_T1 : start.omega_T0}};
  std::vector<double> arc{0.0};
  curve.points.emplace_back(pts[0].k, pts[0].w);
  if (!inside(pts[0].k, pts[0].w)) {
    curve.reason = Termination::hit_diamond_boundary;
    return curve;
  }

  const double h_max = std::abs(step);
  double h = h_max;
  Vec2 tangent{step > 0.0 ? 1.0 : -1.0, 0.0};
  const double k_ref = start.kappa - (std::isfinite(options.kappa0) ? options.kappa0 : 0.0);

  for (int n = 0; n < options.max_steps; ++n) {
    bool accepted = false;
    Vec2 next;
    for (int halving = 0; halving <= options.max_halvings && !accepted; ++halving, h *= 0.5) {
      const std::size_t m = pts.size();
      Vec2 predicted;
      if (m >= 3) {
        const double s[3] = {arc[m - 3], arc[m - 2], arc[m - 1]};
        const Vec2 p[3] = {pts[m - 3], pts[m - 2], pts[m - 1]};
        Vec2 d;
        lagrange3(s, p, arc[m - 1] + h, predicted, d);
      } else {
        predicted = pts.back() + h * tangent;
      }
      if (!inside(predicted.k, predicted.w)) {
        curve.reason = Termination::hit_diamond_boundary;
        return curve;
      }
      double hw = hw0;
      if (std::isfinite(options.kappa0) && k_ref != 0.0) {
        const double g = (predicted.k - options.kappa0) / k_ref;
        hw *= std::max(g * g, 1e-2);
      }
      const Vec2 normal{-tangent.w, tangent.k};
      const int ns = std::max(5, options.corrector_samples);
      std::vector<double> sv(ns), fv(ns);
      for (int i = 0; i < ns; ++i) {
        sv[i] = -hw + 2.0 * hw * i / (ns - 1);
        const Vec2 q = predicted + sv[i] * normal;
        fv[i] = inside(q.k, q.w) ? objective(q) : std::numeric_limits<double>::infinity();
      }
      const auto j = static_cast<int>(std::min_element(fv.begin(), fv.end()) - fv.begin());
      if (j == 0 || j == ns - 1 || !std::isfinite(fv[j])) continue;
      int iters = 0;
      const double s_best = golden_min([&](double s) { return objective(predicted + s * normal); },
                                       sv[j - 1], sv[j + 1], 1e-9 * hw, iters);
      const Vec2 q = predicted + s_best * normal;
      if (!inside(q.k, q.w)) {
        curve.reason = Termination::hit_diamond_boundary;
        return curve;
      }
      if (objective(q) <= options.accept_level) {
        next = q;
        accepted = true;
      }
    }
    if (!accepted) {
      curve.reason = Termination::step_failure;
      return curve;
    }
    h = std::min(h_max, 4.0 * h);  // undo the trailing halving and allow regrowth
    arc.push_back(arc.back() + norm(next - pts.back()));
    pts.push_back(next);
    curve.points.emplace_back(next.k, next.w);

    Vec2 t_new;
    const std::size_t m = pts.size();
    if (m >= 3) {
      const double s[3] = {arc[m - 3], arc[m - 2], arc[m - 1]};
      const Vec2 p[3] = {pts[m - 3], pts[m - 2], pts[m - 1]};
      Vec2 v;
      lagrange3(s, p, arc[m - 1], v, t_new);
    } else {
      t_new = pts[m - 1] - pts[m - 2];
    }
    if (!(norm(t_new) > 0.0)) {
      curve.reason = Termination::step_failure;
      return curve;
    }
    t_new = unit(t_new);
    if (t_new.k * tangent.k + t_new.w * tangent.w < 0.0) t_new = -1.0 * t_new;
    tangent = t_new;
    if (std::abs(tangent.w) > options.vertical_slope * std::abs(tangent.k)) {
      curve.reason = Termination::vertical_tangent_detected;
      return curve;
    }
  }
  curve.reason = Termination::step_limit;
  return curve;
}

ExtremalCurve trace_extremal_curve(const ScatteringSolver& solver, Extremum which,
                                   const ExtremalPoint& start, double step,
                                   const CurveOptions& options) {
  const Medium ambient = solver.assembler().structure().ambient();
  return trace_extremal_curve(
      [&](double k, double w) {
        const auto sol = solver.solve(k, w);
        return TransmissionSample{std::norm(sol.T), std::norm(sol.R)};
      },
      [&](double k, double w) { return in_diamond(k, w, ambient); }, which, start, step, options);
}

}  // namespace slabres
