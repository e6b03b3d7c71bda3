#include <doctest.h>

#include <cmath>

#include "slabres/error.hpp"
#include "slabres/harmonics.hpp"

using namespace slabres;

namespace {
const Medium kVacuum{1.0, 1.0};
bool near(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol; }
}  // namespace

TEST_CASE("eta values") {
  CHECK(near(eta(0, 0.0, 0.5, kVacuum), 0.5, 1e-15));
  CHECK(near(eta(1, 0.0, 0.5, kVacuum), cplx(0.0, std::sqrt(0.75)), 1e-15));
  // sqrt(0.5039^2 - 0.02^2) = sqrt(0.25391521 - 0.0004) = sqrt(0.25351521), from high-precision evaluation
  CHECK(near(eta(0, 0.02, 0.5039, kVacuum), 0.5035029394154517, 1e-13));
  CHECK(near(eta(-1, 0.3, 0.5, kVacuum), cplx(0.0, std::sqrt(0.49 - 0.25)), 1e-15));
  CHECK_THROWS_AS(eta(0, 0.5, 0.5, kVacuum), NumericalError);
}

TEST_CASE("eta derivatives") {
  const auto d0 = eta_derivatives(0, 0.0, 0.5, kVacuum);
  CHECK(near(d0.d_omega, 1.0, 1e-15));
  CHECK(near(d0.d_kappa, 0.0, 1e-15));
  const auto d1 = eta_derivatives(1, 0.0, 0.5, kVacuum);
  CHECK(near(d1.d_kappa, cplx(0.0, 1.0 / std::sqrt(0.75)), 1e-12));

  // Against central differences at a complex point.
  const cplx k(0.13, 0.02), w(0.61, -0.03);
  const double h = 1e-6;
  for (int m : {-2, 0, 1}) {
    const auto d = eta_derivatives(m, k, w, kVacuum);
    const cplx fw = (eta(m, k, w + h, kVacuum) - eta(m, k, w - h, kVacuum)) / (2 * h);
    const cplx fk = (eta(m, k + h, w, kVacuum) - eta(m, k - h, w, kVacuum)) / (2 * h);
    CHECK(near(d.d_omega, fw, 1e-8));
    CHECK(near(d.d_kappa, fk, 1e-8));
  }
}

TEST_CASE("continuity from the upper half plane") {
  for (int m : {-1, 0, 1, 3}) {
    for (double w : {0.2, 0.5, 0.9}) {
      const cplx above = eta(m, 0.13, cplx(w, 1e-8), kVacuum);
      CHECK(near(above, eta(m, 0.13, w, kVacuum), 1e-6));
    }
  }
}

TEST_CASE("branch signs on the real axis") {
  CHECK(branch_sqrt(4.0) == cplx(2.0, 0.0));
  CHECK(near(branch_sqrt(-4.0), cplx(0.0, 2.0), 1e-15));
  const auto h = harmonic(0, 0.1, 0.5, kVacuum);
  CHECK(h.propagating);
  CHECK_FALSE(harmonic(1, 0.1, 0.5, kVacuum).propagating);
}

TEST_CASE("diamond membership") {
  CHECK(in_diamond(0.02, 0.5039, kVacuum));
  CHECK_FALSE(in_diamond(0.02, 0.98, kVacuum));
  CHECK_FALSE(in_diamond(0.6, 0.7, kVacuum));
  CHECK_FALSE(in_diamond(0.2, 0.1, kVacuum));
  CHECK(in_diamond(-0.2, 0.5, kVacuum));
  // Refractive ambient rescales the frequency axis.
  CHECK_FALSE(in_diamond(0.0, 0.6, Medium{4.0, 1.0}));
  CHECK(in_diamond(0.0, 0.4, Medium{4.0, 1.0}));
}

TEST_CASE("DtN action") {
  auto out = dtn_apply({{0, 1.0}}, 0.0, 0.5, 4, kVacuum);
  CHECK(near(out.at(0), cplx(0.0, -0.5), 1e-15));
  out = dtn_apply({{1, 1.0}}, 0.0, 0.5, 4, kVacuum);
  CHECK(near(out.at(1), std::sqrt(0.75), 1e-15));
  out = dtn_apply({{-2, 0.0}, {0, 0.0}, {3, 0.0}}, 0.1, 0.5, 4, kVacuum);
  for (const auto& [m, v] : out) CHECK(v == cplx(0.0));
  CHECK_THROWS_AS(dtn_apply({{5, 1.0}}, 0.0, 0.5, 4, kVacuum), UsageError);
}
