#include "slabres/scatter.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "slabres/error.hpp"
#include "slabres/sparse_lu.hpp"

namespace slabres {

namespace {

const cplx kI(0.0, 1.0);

// Below this reciprocal pivot ratio the factorization is treated as singular.
constexpr double kSingularRcond = 1e-15;

double max_abs_row_sum(const SparseComplex& a) {
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(a.rows());
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseComplex::InnerIterator it(a, k); it; ++it) sums[it.row()] += std::abs(it.value());
  }
  return sums.size() ? sums.maxCoeff() : 0.0;
}

// Tikhonov-regularized normal equations (P^H P + tau I) x = P^H p.
Eigen::VectorXcd least_squares_solve(const SparseComplex& p_mat, const SparseComplex& h,
                                     const Eigen::VectorXcd& rhs) {
  const double norm_h = max_abs_row_sum(h);
  const double tau = 1e-12 * norm_h * norm_h;
  const SparseComplex ph = p_mat.adjoint();
  SparseComplex normal = ph * p_mat;
  SparseComplex shift(normal.rows(), normal.cols());
  shift.setIdentity();
  normal += tau * shift;
  SparseLU lu(normal);
  if (lu.singular()) throw NumericalError("regularized normal equations are singular");
  return lu.solve(ph * rhs);
}

void check_point(const SlabStructure& s, double kappa, double omega, bool allow_outside) {
  if (!std::isfinite(kappa) || !std::isfinite(omega)) {
    throw UsageError("kappa and omega must be finite");
  }
  if (!allow_outside && !in_diamond(kappa, omega, s.ambient())) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "(kappa, omega) = (" << kappa << ", " << omega
        << ") is outside the single-propagating-order diamond";
    throw OutsideDiamondError(msg.str());
  }
}

}  // namespace

ScatteringSolver::ScatteringSolver(const SlabStructure& s, int nx, int nz, SolverOptions options)
    : options_(options), assembler_(s, build_mesh(s, nx, nz), options.assembly) {}

ScatteringSolution ScatteringSolver::solve(double kappa, double omega, Side side) const {
  const SlabStructure& s = assembler_.structure();
  check_point(s, kappa, omega, options_.allow_outside);
  const Mesh& mesh = assembler_.mesh();

  const DiscreteSystem sys = assembler_.assemble(kappa, omega);
  const Pencil pencil = pencil_matrices(sys);
  const Eigen::VectorXcd rhs = assembler_.source(sys.dtn, side);

  ScatteringSolution out;
  out.kappa = kappa;
  out.omega = omega;
  out.side = side;
  bool fallback = options_.force_least_squares;
  if (!fallback) {
    SparseLU lu(pencil.P);
    out.rcond = lu.rcond();
    if (lu.singular() || !(lu.rcond() > kSingularRcond)) {
      fallback = true;
    } else {
      out.field = lu.solve(rhs);
      if (!out.field.allFinite()) fallback = true;
    }
  }
  if (fallback) {
    out.field = least_squares_solve(pencil.P, sys.H, rhs);
    out.least_squares = true;
  }

  // Incident and outgoing waves share the exterior propagation constant of the
  // boundary symbol, so the extraction matches the energy flux of the discrete problem.
  const cplx phase = std::exp(-kI * sys.dtn.zeta0 * mesh.L);
  const cplx near = trace_mean(mesh, out.field, side == Side::right);
  const cplx far = trace_mean(mesh, out.field, side == Side::left);
  out.R = (near - phase) * phase;
  out.T = far * phase;
  out.energy_defect = std::abs(std::norm(out.R) + std::norm(out.T) - 1.0);
  return out;
}

ScatteringSolution solve_scattering(const SlabStructure& s, double kappa, double omega, Side side,
                                    int nx, int nz, SolverOptions options) {
  check_point(s, kappa, omega, options.allow_outside);
  return ScatteringSolver(s, nx, nz, options).solve(kappa, omega, side);
}

Eigen::Matrix2cd reduced_smatrix(const SlabStructure& s, double kappa, double omega, int nx,
                                 int nz, SolverOptions options) {
  if (!check_symmetries(s).z_symmetric) {
    throw ConfigError("reduced scattering matrix needs a structure symmetric in z");
  }
  const auto sol = solve_scattering(s, kappa, omega, Side::left, nx, nz, options);
  Eigen::Matrix2cd m;
  m << sol.T, sol.R, sol.R, sol.T;
  return m;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  const int workers = std::max(1, std::min(threads, count));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

SweepTable transmittance_sweep(const ScatteringSolver& solver, const std::vector<double>& kappas,
                               const std::vector<double>& omegas, int threads) {
  const auto& s = solver.assembler().structure();
  for (double k : kappas) {
    for (double w : omegas) check_point(s, k, w, solver.options().allow_outside);
  }
  SweepTable table(kappas.size() * omegas.size());
  const int nw = static_cast<int>(omegas.size());
  parallel_for(static_cast<int>(table.size()), threads, [&](int idx) {
    const double k = kappas[idx / nw];
    const double w = omegas[idx % nw];
    const auto sol = solver.solve(k, w, Side::left);
    table[idx] = SweepRow{k, w, sol.R, sol.T, sol.transmittance(), sol.energy_defect,
                          sol.least_squares};
  });
  std::stable_sort(table.begin(), table.end(), [](const SweepRow& a, const SweepRow& b) {
    return a.kappa != b.kappa ? a.kappa < b.kappa : a.omega < b.omega;
  });
  return table;
}

SweepTable transmittance_sweep(const SlabStructure& s, const std::vector<double>& kappas,
                               const std::vector<double>& omegas, int nx, int nz,
                               SweepOptions options) {
  for (double k : kappas) {
    for (double w : omegas) check_point(s, k, w, options.solver.allow_outside);
  }
  ScatteringSolver solver(s, nx, nz, options.solver);
  return transmittance_sweep(solver, kappas, omegas, options.threads);
}

}  // namespace slabres
