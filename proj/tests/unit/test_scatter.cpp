#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles/transfer_matrix.hpp"
#include "slabres/error.hpp"
#include "slabres/scatter.hpp"

using namespace slabres;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("homogeneous slab passes the incident wave unchanged") {
  const SlabStructure s = homogeneous_structure(2.0);
  const ScatteringSolver solver(s, 32, 32);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uk(-0.45, 0.45), uw(0.0, 1.0);
  for (int n = 0; n < 6; ++n) {
    double k, w;
    do {
      k = uk(rng);
      w = uw(rng);
    } while (!in_diamond(k, w, s.ambient()));
    for (Side side : {Side::left, Side::right}) {
      const auto sol = solver.solve(k, w, side);
      CHECK(std::abs(sol.T - 1.0) < 1e-8);
      CHECK(std::abs(sol.R) < 1e-8);
    }
  }
  const Eigen::Matrix2cd smat = reduced_smatrix(s, 0.1, 0.4, 32, 32);
  CHECK(std::abs(smat(0, 1)) < 1e-8);
  CHECK(std::abs(smat(1, 0)) < 1e-8);
  CHECK(std::abs(std::abs(smat(0, 0)) - 1.0) < 1e-8);
}

TEST_CASE("layer against the transfer-matrix oracle") {
  const SlabStructure layer = layer_structure(1.0, 4.0, 1.0);
  const auto sol = solve_scattering(layer, 0.0, 0.6, Side::left, 128, 128);
  const auto ref = oracle::transfer_matrix({{-1.0, 1.0, 4.0, 1.0}}, 1.0, 1.0, 0.0, 0.6);
  CHECK(std::abs(sol.transmittance() - std::norm(ref.T)) < 1e-4);
  CHECK(std::abs(std::norm(sol.R) - std::norm(ref.R)) < 1e-4);

  // Oblique incidence, thicker exterior.
  const SlabStructure wide = layer_structure(1.0, 4.0, 2.0);
  const auto ob = solve_scattering(wide, 0.2, 0.5, Side::left, 16, 256);
  const auto ob_ref = oracle::transfer_matrix({{-1.0, 1.0, 4.0, 1.0}}, 1.0, 1.0, 0.2, 0.5);
  CHECK(std::abs(ob.transmittance() - std::norm(ob_ref.T)) < 1e-3);
}

TEST_CASE("oracle sanity") {
  // A layer of ambient material is transparent.
  const auto r = oracle::transfer_matrix({{-1.0, 1.0, 1.0, 1.0}}, 1.0, 1.0, 0.1, 0.4);
  CHECK(std::abs(r.T - 1.0) < 1e-14);
  CHECK(std::abs(r.R) < 1e-14);
  // Half-wave layer: n d = pi / omega gives full transmission.
  const auto hw = oracle::transfer_matrix({{0.0, kPi / (2.0 * 0.5), 4.0, 1.0}}, 1.0, 1.0, 0.0, 0.5);
  CHECK(std::norm(hw.T) == doctest::Approx(1.0).epsilon(1e-13));
  // Splitting a layer changes nothing.
  const auto one = oracle::transfer_matrix({{-1.0, 1.0, 3.0, 1.5}}, 1.0, 1.0, 0.1, 0.7);
  const auto two =
      oracle::transfer_matrix({{-1.0, 0.3, 3.0, 1.5}, {0.3, 1.0, 3.0, 1.5}}, 1.0, 1.0, 0.1, 0.7);
  CHECK(std::abs(one.T - two.T) < 1e-13);
  CHECK(std::norm(one.T) + std::norm(one.R) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("energy identity and unitarity on the rod") {
  const SlabStructure rod = rod_structure(kPi / 2, 10.0);
  const ScatteringSolver solver(rod, 32, 32);
  for (double w : {0.1, 0.35, 0.5, 0.7}) {
    CHECK(solver.solve(0.05, w).energy_defect < 1e-10);
  }
  const Eigen::Matrix2cd smat = reduced_smatrix(rod, 0.02, 0.49, 64, 64);
  const Eigen::Matrix2cd defect = smat.adjoint() * smat - Eigen::Matrix2cd::Identity();
  CHECK(defect.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("mirror symmetry of left and right incidence") {
  const SlabStructure rod = rod_structure(kPi / 2, 10.0);
  const ScatteringSolver solver(rod, 32, 32);
  const auto l = solver.solve(0.07, 0.6, Side::left);
  const auto r = solver.solve(0.07, 0.6, Side::right);
  CHECK(std::abs(l.T - r.T) < 1e-10);
  CHECK(std::abs(l.R - r.R) < 1e-10);

  const SlabStructure off(2.0, Medium{}, {Inclusion{Disk{0.0, 0.5, 1.0}, Medium{6.0, 1.0}}});
  CHECK_THROWS_AS(reduced_smatrix(off, 0.1, 0.5, 16, 16), ConfigError);
}

TEST_CASE("outside the diamond") {
  const SlabStructure rod = rod_structure(kPi / 2, 10.0);
  CHECK_THROWS_AS(solve_scattering(rod, 0.6, 0.7, Side::left, 16, 16), OutsideDiamondError);
  CHECK_THROWS_AS(solve_scattering(rod, 0.0, 1.2, Side::left, 16, 16), OutsideDiamondError);
}

TEST_CASE("least-squares fallback agrees with the direct solve") {
  const SlabStructure rod = rod_structure(kPi / 2, 10.0);
  SolverOptions ls;
  ls.force_least_squares = true;
  const auto a = solve_scattering(rod, 0.1, 0.4, Side::left, 16, 16);
  const auto b = solve_scattering(rod, 0.1, 0.4, Side::left, 16, 16, ls);
  CHECK(b.least_squares);
  CHECK_FALSE(a.least_squares);
  CHECK(std::abs(a.T - b.T) < 1e-5);
}

TEST_CASE("sweep ordering and determinism") {
  const SlabStructure rod = rod_structure(kPi / 2, 10.0);
  SweepOptions one, many;
  many.threads = 3;
  const std::vector<double> ws{0.6, 0.2, 0.4, 0.3, 0.5};
  const SweepTable t1 = transmittance_sweep(rod, {0.0}, ws, 16, 16, one);
  REQUIRE(t1.size() == 5);
  CHECK(std::is_sorted(t1.begin(), t1.end(),
                       [](const SweepRow& a, const SweepRow& b) { return a.omega < b.omega; }));
  const SweepTable t3 = transmittance_sweep(rod, {0.1, 0.0}, ws, 16, 16, many);
  REQUIRE(t3.size() == 10);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(t3[i].kappa == 0.0);
    CHECK(t3[i].T == t1[i].T);  // bitwise
  }
  CHECK(transmittance_sweep(rod, {0.0}, {}, 16, 16).empty());
}

TEST_CASE("rod anomaly near the guided mode") {
  const SlabStructure rod = rod_structure(kPi / 2, 10.0);
  std::vector<double> ws;
  for (int i = 0; i <= 60; ++i) ws.push_back(0.5035 + 0.0015 * i / 60.0);
  const SweepTable t = transmittance_sweep(rod, {0.02}, ws, 64, 64);
  double tmax = 0.0, tmin = 1.0;
  for (const auto& row : t) {
    tmax = std::max(tmax, row.transmittance);
    tmin = std::min(tmin, row.transmittance);
  }
  CHECK(tmax > 0.9);
  CHECK(tmin < 0.1);
}
