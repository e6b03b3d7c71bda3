#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "slabres/assembly.hpp"

namespace slabres {

struct ScatteringSolution {
  double kappa = 0.0;
  double omega = 0.0;
  Side side = Side::left;
  cplx R;
  cplx T;
  Eigen::VectorXcd field;
  double energy_defect = 0.0;
  // Set when the factorization was singular (or forced) and the field came from the
  // regularized normal equations instead.
  bool least_squares = false;
  double rcond = 0.0;

  double transmittance() const { return std::norm(T); }
};

struct SolverOptions {
  AssemblyOptions assembly;
  bool allow_outside = false;
  bool force_least_squares = false;
};

// Reuses the volume matrices of one structure and mesh across many (kappa, omega) solves.
// Const member functions are safe to call concurrently.
class ScatteringSolver {
 public:
  ScatteringSolver(const SlabStructure& s, int nx, int nz, SolverOptions options = {});

  const FormAssembler& assembler() const { return assembler_; }
  const SolverOptions& options() const { return options_; }

  ScatteringSolution solve(double kappa, double omega, Side side = Side::left) const;

 private:
  SolverOptions options_;
  FormAssembler assembler_;
};

ScatteringSolution solve_scattering(const SlabStructure& s, double kappa, double omega, Side side,
                                    int nx, int nz, SolverOptions options = {});

// [[T, R], [R, T]] from one left-incidence solve. Requires a z-symmetric structure.
Eigen::Matrix2cd reduced_smatrix(const SlabStructure& s, double kappa, double omega, int nx,
                                 int nz, SolverOptions options = {});

struct SweepRow {
  double kappa = 0.0;
  double omega = 0.0;
  cplx R;
  cplx T;
  double transmittance = 0.0;
  double energy_defect = 0.0;
  bool least_squares = false;
};

using SweepTable = std::vector<SweepRow>;

struct SweepOptions {
  SolverOptions solver;
  int threads = 1;
};

// Rows come back sorted by (kappa, omega) whatever the thread schedule.
SweepTable transmittance_sweep(const SlabStructure& s, const std::vector<double>& kappas,
                               const std::vector<double>& omegas, int nx, int nz,
                               SweepOptions options = {});

SweepTable transmittance_sweep(const ScatteringSolver& solver, const std::vector<double>& kappas,
                               const std::vector<double>& omegas, int threads = 1);

// Runs fn(i) for i in [0, count) on up to `threads` workers. The first exception thrown
// by any task is rethrown after all workers stop.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace slabres
