#include <doctest.h>

#include <cmath>
#include <numbers>

#include "slabres/anomaly.hpp"
#include "slabres/error.hpp"
#include "slabres/fitter.hpp"
#include "slabres/modes.hpp"
#include "slabres/scatter.hpp"

using namespace slabres;

namespace {

// Extremal points of a generic model placed at (kappa0, omega0) = (0.1, 0.6).
constexpr double kK0 = 0.1;
constexpr double kW0 = 0.6;

std::vector<ExtremalPoint> synthetic(const GenericAnomalyModel& m, const std::vector<double>& kts) {
  std::vector<ExtremalPoint> out;
  for (double kt : kts) {
    const ZeroCurves z = zero_curves(m, kt);
    out.push_back({kK0 + kt, kW0 + z.omega_a[0], kW0 + z.omega_b[0], 1.0, 0.0, 0});
  }
  return out;
}

std::function<double(double)> plateau(const GenericAnomalyModel& m) {
  return [m](double w) { return model_transmittance(m, 0.0, w - kW0); };
}

}  // namespace

TEST_CASE("extrema of an exact model") {
  const AnomalyModel m = make_generic_model(0.0, 2.0, 1.0, 0.6, 0.8);
  const auto f = [&](double w) {
    const double t = model_transmittance(m, 0.02, w);
    return TransmissionSample{t, 1.0 - t};
  };
  const ExtremalPoint p = locate_extrema(f, -0.002, 0.001);
  CHECK(std::abs(p.omega_T0 + 0.0004) < 1e-10);
  CHECK(std::abs(p.omega_T1 + 0.0008) < 1e-10);
  CHECK(p.Tmax == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.Tmin < 1e-12);

  CHECK_THROWS_WITH_AS(locate_extrema([](double) { return 0.5; }, 0.0, 1.0),
                       doctest::Contains("no interior extremum"), NumericalError);
  CHECK_THROWS_AS(locate_extrema([](double) { return 0.5; }, 1.0, 0.0), UsageError);
  // Expanding search finds extrema outside the initial bracket.
  const ExtremalPoint q = locate_extrema_expanding(f, 0.0, 0.0002);
  CHECK(std::abs(q.omega_T0 + 0.0004) < 1e-10);
}

TEST_CASE("fit round trip") {
  const auto m = make_generic_model(0.0, 2.0, 1.0, 0.6, 0.8);
  const auto pts = synthetic(m, {-0.02, -0.01, 0.01, 0.02});
  const AnomalyFit fit = fit_anomaly(pts, kK0, kW0, plateau(m));
  CHECK(std::abs(fit.ell1_hat) < 1e-6);
  CHECK(std::abs(fit.r2_hat - 2.0) < 1e-6);
  CHECK(std::abs(fit.t2_hat - 1.0) < 1e-6);
  CHECK(std::abs(fit.r0_hat - 0.6) < 1e-6);
  CHECK(std::abs(fit.t0_hat - 0.8) < 1e-6);

  const auto shifted = make_generic_model(0.9, -1.5, 0.5, 0.8, 0.6);
  const AnomalyFit f2 = fit_anomaly(synthetic(shifted, {0.01, 0.02, 0.03}), kK0, kW0);
  CHECK(std::abs(f2.ell1_hat - 0.9) < 1e-6);
  CHECK(std::abs(f2.r2_hat + 1.5) < 1e-6);
  CHECK(std::isnan(f2.r0_hat));

  CHECK_THROWS_AS(fit_anomaly(synthetic(m, {0.01}), kK0, kW0), UsageError);
}

TEST_CASE("quadratic curves meet tangentially") {
  const auto m = make_generic_model(0.4, 2.0, 1.0, 0.6, 0.8);
  const auto pts = synthetic(m, {-0.02, -0.01, 0.01, 0.02});
  const QuadraticCurve t = fit_curve(pts, kK0, Extremum::total_T);
  const QuadraticCurve r = fit_curve(pts, kK0, Extremum::total_R);
  CHECK(std::abs(t.c0 - r.c0) < 1e-6);
  CHECK(std::abs(t.c1 - r.c1) < 1e-6);
  CHECK(std::abs(t.c2 - r.c2) > 0.5);
  CHECK(width_exponent(pts, kK0) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("curve tracing on an exact model") {
  const auto m = make_generic_model(0.0, 2.0, 1.0, 0.6, 0.8);
  const TransmissionField field = [&](double k, double w) {
    const double t = model_transmittance(m, k - kK0, w - kW0);
    return TransmissionSample{t, 1.0 - t};
  };
  const RegionTest inside = [](double k, double w) {
    return in_diamond(k, w, Medium{});
  };
  const ExtremalPoint start = synthetic(m, {0.01})[0];
  CurveOptions opts;
  opts.kappa0 = kK0;
  const ExtremalCurve c = trace_extremal_curve(field, inside, Extremum::total_R, start, 0.02, opts);
  CHECK(c.reason == Termination::hit_diamond_boundary);
  for (const auto& [k, w] : c.points) {
    const double kt = k - kK0;
    CHECK(std::abs(w - (kW0 - kt * kt)) < 1e-7);
  }
  CHECK(c.points.size() > 5);
  CHECK_THROWS_AS(trace_extremal_curve(field, inside, Extremum::total_T, start, 0.0), UsageError);
  CHECK(termination_name(Termination::vertical_tangent_detected) == "vertical_tangent_detected");
}

TEST_CASE("rod extrema and inward total-reflection curve") {
  const SlabStructure rod = rod_structure(std::numbers::pi / 2, 10.0);
  const ScatteringSolver solver(rod, 64, 64);
  const PencilEigensolver eig(rod, 64, 64);
  const DispersionTrace trace = trace_dispersion(eig, 0.0, 0.5039, {0.01, 0.02});
  REQUIRE(trace.complete);
  std::vector<ExtremalPoint> pts;
  for (const auto& s : trace.samples) pts.push_back(solver_extrema(solver, s.kappa, s.omega_root));
  for (const auto& p : pts) {
    CHECK(p.Tmax >= 0.99);
    CHECK(p.Tmin <= 0.01);
  }
  const double ratio = std::abs(pts[1].omega_T1 - pts[1].omega_T0) /
                       std::abs(pts[0].omega_T1 - pts[0].omega_T0);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.2));

  const AnomalyFit fit = fit_anomaly(pts, 0.0, trace.omega0);
  CHECK(fit.r2_hat != doctest::Approx(fit.t2_hat));
  CurveOptions opts;
  opts.kappa0 = 0.0;
  opts.max_steps = 4;
  const ExtremalCurve c = trace_extremal_curve(solver, Extremum::total_R, pts[0], -0.004, opts);
  REQUIRE(c.points.size() >= 4);
  double prev = -1.0;
  bool crossed = false;
  for (const auto& [k, w] : c.points) {
    const double predicted = trace.omega0 - fit.ell1_hat * k - fit.t2_hat * k * k;
    CHECK(std::abs(w - predicted) < 2e-6);
    if (k <= 0.0) crossed = true;
    if (k > 0.0) {
      CHECK(w > prev);  // omega rises toward omega0 as kappa decreases
      prev = w;
    }
  }
  CHECK(crossed);
}
