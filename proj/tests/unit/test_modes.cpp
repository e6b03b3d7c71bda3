#include <doctest.h>

#include <cmath>
#include <numbers>

#include "slabres/error.hpp"
#include "slabres/modes.hpp"

using namespace slabres;

namespace {

constexpr double kPi = std::numbers::pi;

// Guided mode of the 64 x 64 rod near the lower reference frequency.
const GuidedMode& rod_mode() {
  static const GuidedMode mode = [] {
    const PencilEigensolver solver(rod_structure(kPi / 2, 10.0), 64, 64);
    auto m = refine_guided_mode(solver, 0.0, 0.5039);
    REQUIRE(m.has_value());
    return *m;
  }();
  return mode;
}

}  // namespace

TEST_CASE("homogeneous slab has no small eigenvalue") {
  const EigenPoint p = smallest_eigenpair(homogeneous_structure(2.0), 0.0, 0.5, 32, 32);
  CHECK(std::abs(p.ell) >= 0.1);
  CHECK(p.residual <= 1e-8);
  CHECK(p.vector.norm() == doctest::Approx(1.0));
}

TEST_CASE("eigenpair residual is what it claims") {
  const SlabStructure rod = rod_structure(kPi / 2, 10.0);
  const PencilEigensolver solver(rod, 16, 16);
  const EigenPoint p = solver.smallest(0.03, cplx(0.55, -0.002));
  const DiscreteSystem sys = solver.assembler().assemble(0.03, cplx(0.55, -0.002));
  const Pencil pen = pencil_matrices(sys);
  const Eigen::VectorXcd r = pen.P * p.vector - p.ell * (pen.Q * p.vector);
  CHECK(r.norm() / p.vector.norm() == doctest::Approx(p.residual).epsilon(1e-6));
  CHECK(p.residual <= 1e-8);

  // Against a dense generalized eigensolve of Q^-1 P.
  const Eigen::MatrixXcd dense =
      Eigen::MatrixXcd(pen.Q).partialPivLu().solve(Eigen::MatrixXcd(pen.P));
  const Eigen::VectorXcd ev = dense.eigenvalues();
  double smallest = 1e300;
  for (const auto& v : ev) smallest = std::min(smallest, std::abs(v));
  CHECK(std::abs(p.ell) == doctest::Approx(smallest).epsilon(1e-8));
}

TEST_CASE("ell vanishes at the rod guided mode") {
  const GuidedMode& m = rod_mode();
  CHECK(m.omega0 == doctest::Approx(0.5039).epsilon(0.02));
  const SlabStructure rod = rod_structure(kPi / 2, 10.0);
  const double at_mode = std::abs(smallest_eigenpair(rod, 0.0, m.omega0, 64, 64).ell);
  const double floor = std::abs(smallest_eigenpair(rod, 0.0, 0.6, 64, 64).ell);
  CHECK(at_mode < 1e-3 * floor);

  // The zero set does not depend on the inner product defining Q.
  EigenOptions other;
  other.mass_factor = 3.0;
  const PencilEigensolver solver(rod, 64, 64);
  CHECK(std::abs(solver.smallest(0.0, m.omega0, other).ell) < 1e-3 * floor);
}

TEST_CASE("analytic derivative of ell matches finite differences") {
  const PencilEigensolver solver(rod_structure(kPi / 2, 10.0), 16, 16);
  const EllDerivative d = solver.with_derivative(0.02, cplx(0.52, -0.001));
  CHECK(d.analytic);
  const cplx fd = solver.finite_difference_derivative(0.02, cplx(0.52, -0.001), {}, d.point.vector);
  CHECK(std::abs(d.dell_domega - fd) < 1e-5 * std::abs(fd));
}

TEST_CASE("no guided modes in a homogeneous slab") {
  ModeSearchOptions opts;
  opts.scan_points = 30;
  CHECK(find_guided_modes(homogeneous_structure(2.0), 0.0, 0.45, 0.8, 16, 16, opts).empty());
  CHECK_THROWS_AS(find_guided_modes(homogeneous_structure(2.0), 0.0, 0.45, 1.2, 16, 16, opts),
                  OutsideDiamondError);
}

TEST_CASE("dispersion trace of the rod") {
  const PencilEigensolver solver(rod_structure(kPi / 2, 10.0), 64, 64);
  const GuidedMode& m = rod_mode();
  const DispersionTrace t = trace_dispersion(solver, 0.0, m.omega0, {-0.02, -0.01, 0.0, 0.01, 0.02});
  REQUIRE(t.complete);
  REQUIRE(t.samples.size() == 5);
  for (const auto& s : t.samples) {
    CHECK(s.omega_root.imag() <= 1e-8);
    if (s.kappa == 0.0) CHECK(std::abs(s.omega_root - m.omega0) < 1e-9);
  }
  const DispersionFit fit = dispersion_coefficients(t);
  CHECK(std::abs(fit.ell1) <= 1e-4);
  CHECK(fit.ell2.imag() > 0.0);
  // Symmetric structure: the root is even in kappa.
  CHECK(std::abs(t.samples.front().omega_root - t.samples.back().omega_root) < 1e-9);
}

TEST_CASE("dispersion coefficients of an exact quadratic") {
  DispersionTrace t;
  t.kappa0 = 0.1;
  t.omega0 = 0.6;
  const double ell1 = 0.9;
  const cplx ell2(0.1, 0.48);
  for (double kt : {-0.02, -0.01, 0.01, 0.02}) {
    t.samples.push_back({t.kappa0 + kt, t.omega0 - ell1 * kt - ell2 * kt * kt, 0.0});
  }
  const DispersionFit fit = dispersion_coefficients(t);
  CHECK(std::abs(fit.ell1 - ell1) < 1e-10);
  CHECK(std::abs(fit.ell2 - ell2) < 1e-10);

  DispersionTrace thin = t;
  thin.samples.resize(1);
  CHECK_THROWS_AS(dispersion_coefficients(thin), UsageError);
}
