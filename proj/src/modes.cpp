#include "slabres/modes.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "slabres/error.hpp"
#include "slabres/sparse_lu.hpp"

namespace slabres {

namespace {

struct Workspace {
  DiscreteSystem sys;
  SparseComplex P;
  SparseComplex Q;
  SparseLU lu;
  double norm_p;
};

double max_abs_row_sum(const SparseComplex& a) {
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(a.rows());
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseComplex::InnerIterator it(a, k); it; ++it) sums[it.row()] += std::abs(it.value());
  }
  return sums.size() ? sums.maxCoeff() : 0.0;
}

Workspace make_workspace(const FormAssembler& assembler, cplx kappa, cplx omega,
                         double mass_factor) {
  DiscreteSystem sys = assembler.assemble(kappa, omega);
  const SparseComplex b = sys.B.cast<cplx>();
  SparseComplex p = sys.H - (omega * omega) * b;
  SparseComplex q = sys.H + mass_factor * b;
  SparseLU lu(p);
  if (lu.singular()) {
    throw NumericalError("scattering operator is exactly singular; ell = 0 to working precision");
  }
  const double norm_p = max_abs_row_sum(p);
  return {std::move(sys), std::move(p), std::move(q), std::move(lu), norm_p};
}

Eigen::VectorXcd default_start(Eigen::Index n) {
  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = u(rng);
    v[i] = cplx(re, u(rng));
  }
  return v.normalized();
}

Eigen::VectorXcd start_vector(Eigen::Index n, const Eigen::VectorXcd* start) {
  if (!start || start->size() != n || !(start->norm() > 0.0)) return default_start(n);
  // A small random admixture keeps every eigendirection present in the Krylov space.
  Eigen::VectorXcd v = start->normalized() + 1e-3 * default_start(n);
  return v.normalized();
}

// Rayleigh-type estimate minimizing ||P x - ell Q x|| over ell.
cplx pencil_value(const SparseComplex& p, const SparseComplex& q, const Eigen::VectorXcd& x,
                  double* residual) {
  const Eigen::VectorXcd px = p * x;
  const Eigen::VectorXcd qx = q * x;
  const double qq = qx.squaredNorm();
  const cplx ell = qq > 0.0 ? qx.dot(px) / qq : cplx(0.0);
  if (residual) *residual = (px - ell * qx).norm() / x.norm();
  return ell;
}

struct RitzResult {
  Eigen::VectorXcd x;
  cplx ell;
  double residual = 0.0;
  int applications = 0;
  bool converged = false;
};

// Restarted Arnoldi for the dominant eigenvalue theta of op = P^-1 Q (or its adjoint);
// the pencil eigenvalue is 1 / theta. `residual_of` returns the true pencil residual.
template <class Op, class Residual>
RitzResult dominant_ritz(Op op, Residual residual_of, Eigen::VectorXcd x, int krylov, int budget,
                         double tol, double norm_p) {
  const Eigen::Index n = x.size();
  RitzResult best;
  best.residual = std::numeric_limits<double>::infinity();
  int used = 0;
  const int m = std::max(2, krylov);
  while (used < budget) {
    const int dim = std::min(m, budget - used);
    Eigen::MatrixXcd v(n, dim + 1);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim + 1, dim);
    v.col(0) = x;
    Eigen::VectorXcd y;
    int built = 0;
    for (int j = 0; j < dim; ++j) {
      Eigen::VectorXcd w = op(v.col(j));
      ++used;
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= j; ++i) {
          const cplx c = v.col(i).dot(w);
          h(i, j) += c;
          w -= c * v.col(i);
        }
      }
      const double beta = w.norm();
      h(j + 1, j) = beta;
      built = j + 1;

      Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h.topLeftCorner(built, built));
      Eigen::Index k = 0;
      es.eigenvalues().cwiseAbs().maxCoeff(&k);
      const cplx theta = es.eigenvalues()[k];
      y = es.eigenvectors().col(k).normalized();
      const double estimate = beta * std::abs(y[built - 1]);
      const bool breakdown = beta <= 1e-14 * std::abs(theta);
      // ||P x - ell Q x|| = |ell| ||P (A x - theta x)|| <= |ell| ||P|| * estimate.
      if (breakdown || estimate * norm_p <= tol * std::abs(theta) || j == dim - 1) {
        Eigen::VectorXcd ritz = v.leftCols(built) * y;
        ritz.normalize();
        double res = 0.0;
        const cplx ell = residual_of(ritz, &res);
        if (res < best.residual) {
          best.x = ritz;
          best.ell = ell;
          best.residual = res;
        }
        if (res <= tol) {
          best.applications = used;
          best.converged = true;
          return best;
        }
        if (breakdown) break;
      }
      v.col(j + 1) = w / beta;
    }
    x = v.leftCols(built) * y;
    x.normalize();
  }
  best.applications = used;
  return best;
}

}  // namespace

PencilEigensolver::PencilEigensolver(const SlabStructure& s, int nx, int nz,
                                     AssemblyOptions options)
    : assembler_(s, build_mesh(s, nx, nz), options) {}

EigenPoint PencilEigensolver::smallest(cplx kappa, cplx omega, const EigenOptions& options,
                                       const Eigen::VectorXcd* start) const {
  const Workspace ws = make_workspace(assembler_, kappa, omega, options.mass_factor);
  const auto op = [&](const Eigen::VectorXcd& v) { return ws.lu.solve(ws.Q * v); };
  const auto res = [&](const Eigen::VectorXcd& x, double* r) {
    return pencil_value(ws.P, ws.Q, x, r);
  };
  const RitzResult rr =
      dominant_ritz(op, res, start_vector(ws.P.rows(), start), options.krylov_dim,
                    options.max_iterations, options.tolerance, ws.norm_p);
  if (!rr.converged) {
    throw NumericalError("pencil eigensolver did not converge after " +
                         std::to_string(rr.applications) + " iterations (residual " +
                         std::to_string(rr.residual) + ")");
  }
  return EigenPoint{kappa, omega, rr.ell, rr.x, rr.residual, rr.applications};
}

cplx PencilEigensolver::finite_difference_derivative(cplx kappa, cplx omega,
                                                     const EigenOptions& options,
                                                     const Eigen::VectorXcd& start) const {
  const double h = 1e-6 * std::max(1.0, std::abs(omega));
  const cplx up = smallest(kappa, omega + h, options, &start).ell;
  const cplx down = smallest(kappa, omega - h, options, &start).ell;
  return (up - down) / (2.0 * h);
}

EllDerivative PencilEigensolver::with_derivative(cplx kappa, cplx omega,
                                                 const EigenOptions& options,
                                                 const Eigen::VectorXcd* start) const {
  const Workspace ws = make_workspace(assembler_, kappa, omega, options.mass_factor);
  const auto op = [&](const Eigen::VectorXcd& v) { return ws.lu.solve(ws.Q * v); };
  const auto res = [&](const Eigen::VectorXcd& x, double* r) {
    return pencil_value(ws.P, ws.Q, x, r);
  };
  const RitzResult right =
      dominant_ritz(op, res, start_vector(ws.P.rows(), start), options.krylov_dim,
                    options.max_iterations, options.tolerance, ws.norm_p);
  if (!right.converged) {
    throw NumericalError("pencil eigensolver did not converge after " +
                         std::to_string(right.applications) + " iterations (residual " +
                         std::to_string(right.residual) + ")");
  }
  EllDerivative out;
  out.point = EigenPoint{kappa, omega, right.ell, right.x, right.residual, right.applications};

  // Left eigenvector: P^H y = conj(ell) Q^H y.
  const SparseComplex ph = ws.P.adjoint();
  const SparseComplex qh = ws.Q.adjoint();
  const auto op_adj = [&](const Eigen::VectorXcd& v) { return ws.lu.solve_adjoint(qh * v); };
  const auto res_adj = [&](const Eigen::VectorXcd& y, double* r) {
    const Eigen::VectorXcd py = ph * y;
    const Eigen::VectorXcd qy = qh * y;
    const cplx ell_bar = std::conj(right.ell);
    if (r) *r = (py - ell_bar * qy).norm() / y.norm();
    return right.ell;
  };
  const RitzResult left = dominant_ritz(op_adj, res_adj, right.x, options.krylov_dim,
                                        options.max_iterations, options.tolerance, ws.norm_p);
  const Eigen::VectorXcd& x = right.x;
  if (left.converged) {
    const Eigen::VectorXcd& y = left.x;
    const SparseComplex b = ws.sys.B.cast<cplx>();
    const Eigen::VectorXcd dpx = ws.sys.dH_domega * x - (2.0 * omega) * (b * x);
    const Eigen::VectorXcd dqx = ws.sys.dH_domega * x;
    const cplx denom = y.dot(ws.Q * x);
    if (std::abs(denom) > 1e-12 * (ws.Q * x).norm()) {
      out.dell_domega = y.dot(dpx - right.ell * dqx) / denom;
      out.analytic = true;
      return out;
    }
  }
  out.dell_domega = finite_difference_derivative(kappa, omega, options, x);
  out.analytic = false;
  return out;
}

EigenPoint smallest_eigenpair(const SlabStructure& s, cplx kappa, cplx omega, int nx, int nz,
                              EigenOptions options) {
  return PencilEigensolver(s, nx, nz).smallest(kappa, omega, options);
}

RootResult newton_root(const PencilEigensolver& solver, double kappa, cplx omega_start,
                       const EigenOptions& options, const Eigen::VectorXcd* start,
                       int max_steps) {
  EigenOptions opts = options;
  opts.tolerance = std::min(options.tolerance, 1e-10);
  RootResult out;
  cplx omega = omega_start;
  Eigen::VectorXcd x = start ? *start : Eigen::VectorXcd();
  try {
    for (int step = 0; step < max_steps; ++step) {
      const EllDerivative d = solver.with_derivative(kappa, omega, opts, x.size() ? &x : nullptr);
      out.newton_steps = step + 1;
      x = d.point.vector;
      if (d.dell_domega == cplx(0.0)) {
        out.message = "vanishing derivative d ell / d omega";
        return out;
      }
      const cplx delta = d.point.ell / d.dell_domega;
      omega -= delta;
      if (!std::isfinite(omega.real()) || !std::isfinite(omega.imag()) || omega.real() <= 0.0) {
        out.message = "Newton iteration left the positive-frequency half plane";
        return out;
      }
      if (std::abs(delta) <= 1e-11 * std::abs(omega)) {
        out.point = solver.smallest(kappa, omega, opts, &x);
        out.omega = omega;
        out.converged = true;
        return out;
      }
    }
  } catch (const NumericalError& e) {
    out.message = e.what();
    return out;
  }
  out.message = "Newton iteration did not converge in " + std::to_string(max_steps) + " steps";
  return out;
}

std::vector<ScanPoint> scan_smallest_eigenvalue(const PencilEigensolver& solver, double kappa,
                                                const std::vector<double>& omegas,
                                                const ModeSearchOptions& options) {
  EigenOptions eig = options.eigen;
  eig.tolerance = options.scan_tolerance;
  std::vector<ScanPoint> out;
  out.reserve(omegas.size());
  Eigen::VectorXcd x;
  for (double w : omegas) {
    const EigenPoint p = solver.smallest(kappa, w, eig, x.size() ? &x : nullptr);
    x = p.vector;
    out.push_back({w, std::abs(p.ell)});
  }
  return out;
}

std::vector<GuidedMode> find_guided_modes(const PencilEigensolver& solver, double kappa0, double lo,
                                          double hi, const ModeSearchOptions& options) {
  const Medium& amb = solver.assembler().structure().ambient();
  if (!(lo < hi)) throw UsageError("frequency window must satisfy lo < hi");
  if (!in_diamond(kappa0, lo, amb) || !in_diamond(kappa0, hi, amb)) {
    throw OutsideDiamondError("frequency window leaves the diamond at kappa0");
  }
  const int n = std::max(3, options.scan_points);
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = lo + (hi - lo) * i / (n - 1);
  const auto scan = scan_smallest_eigenvalue(solver, kappa0, grid, options);

  std::vector<GuidedMode> modes;
  for (int i = 1; i + 1 < n; ++i) {
    if (!(scan[i].abs_ell < scan[i - 1].abs_ell && scan[i].abs_ell <= scan[i + 1].abs_ell)) {
      continue;
    }
    if (auto mode = refine_guided_mode(solver, kappa0, scan[i].omega, options)) {
      if (mode->omega0 <= lo || mode->omega0 >= hi) continue;
      const bool duplicate = std::any_of(modes.begin(), modes.end(), [&](const GuidedMode& m) {
        return std::abs(m.omega0 - mode->omega0) <= 1e-6 * mode->omega0;
      });
      if (!duplicate) modes.push_back(*mode);
    }
  }
  std::sort(modes.begin(), modes.end(),
            [](const GuidedMode& a, const GuidedMode& b) { return a.omega0 < b.omega0; });
  return modes;
}

std::vector<GuidedMode> find_guided_modes(const SlabStructure& s, double kappa0, double lo,
                                          double hi, int nx, int nz, ModeSearchOptions options) {
  const Medium& amb = s.ambient();
  if (!in_diamond(kappa0, lo, amb) || !in_diamond(kappa0, hi, amb)) {
    throw OutsideDiamondError("frequency window leaves the diamond at kappa0");
  }
  return find_guided_modes(PencilEigensolver(s, nx, nz, options.assembly), kappa0, lo, hi,
                           options);
}

std::optional<GuidedMode> refine_guided_mode(const PencilEigensolver& solver, double kappa0,
                                             double omega_guess,
                                             const ModeSearchOptions& options) {
  const RootResult root = newton_root(solver, kappa0, omega_guess, options.eigen);
  if (!root.converged) return std::nullopt;
  if (std::abs(root.omega.imag()) > options.imag_tolerance * std::abs(root.omega)) {
    return std::nullopt;
  }
  if (root.point.residual > options.eigen.tolerance) return std::nullopt;
  return GuidedMode{root.omega.real(), root.point.residual, root.omega, root.point.ell};
}

DispersionTrace trace_dispersion(const PencilEigensolver& solver, double kappa0, double omega0,
                                 const std::vector<double>& kappa_offsets,
                                 const EigenOptions& options) {
  DispersionTrace trace;
  trace.kappa0 = kappa0;
  trace.omega0 = omega0;
  std::vector<double> up, down;
  bool want_anchor = false;
  for (double k : kappa_offsets) {
    if (k > 0.0) up.push_back(k);
    else if (k < 0.0) down.push_back(k);
    else want_anchor = true;
  }
  std::sort(up.begin(), up.end());
  std::sort(down.begin(), down.end(), std::greater<>());
  up.erase(std::unique(up.begin(), up.end()), up.end());
  down.erase(std::unique(down.begin(), down.end()), down.end());

  const RootResult anchor = newton_root(solver, kappa0, omega0, options);
  if (!anchor.converged) {
    trace.complete = false;
    trace.failure = "anchor root at kappa0: " + anchor.message;
    return trace;
  }
  trace.omega0 = anchor.omega.real();  // the caller's value is only a starting guess
  if (want_anchor) {
    trace.samples.push_back({kappa0, anchor.omega, anchor.point.residual});
  }

  for (const auto* side : {&up, &down}) {
    double k_prev = 0.0;
    cplx w_prev = anchor.omega;
    cplx slope = 0.0;
    Eigen::VectorXcd x = anchor.point.vector;
    for (double kt : *side) {
      // Linear predictor from the last two roots on this side.
      const cplx guess = w_prev + slope * (kt - k_prev);
      const RootResult r = newton_root(solver, kappa0 + kt, guess, options, &x);
      if (!r.converged) {
        trace.complete = false;
        if (trace.failure.empty()) {
          trace.failure = "Newton continuation failed at kappa offset " + std::to_string(kt) +
                          ": " + r.message;
        }
        break;
      }
      trace.samples.push_back({kappa0 + kt, r.omega, r.point.residual});
      slope = (r.omega - w_prev) / (kt - k_prev);
      k_prev = kt;
      w_prev = r.omega;
      x = r.point.vector;
    }
  }
  std::sort(trace.samples.begin(), trace.samples.end(),
            [](const DispersionSample& a, const DispersionSample& b) { return a.kappa < b.kappa; });
  return trace;
}

DispersionTrace trace_dispersion(const SlabStructure& s, double kappa0, double omega0,
                                 const std::vector<double>& kappa_offsets, int nx, int nz,
                                 EigenOptions options) {
  return trace_dispersion(PencilEigensolver(s, nx, nz), kappa0, omega0, kappa_offsets, options);
}

DispersionFit dispersion_coefficients(const DispersionTrace& trace) {
  std::vector<const DispersionSample*> rows;
  std::vector<double> distinct;
  for (const auto& s : trace.samples) {
    const double kt = s.kappa - trace.kappa0;
    rows.push_back(&s);
    if (kt != 0.0 && std::find(distinct.begin(), distinct.end(), kt) == distinct.end()) {
      distinct.push_back(kt);
    }
  }
  if (distinct.size() < 2) {
    throw UsageError("underdetermined trace: need at least two distinct nonzero kappa offsets");
  }
  Eigen::MatrixXcd a(rows.size(), 2);
  Eigen::VectorXcd rhs(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double kt = rows[i]->kappa - trace.kappa0;
    a(i, 0) = -kt;
    a(i, 1) = -kt * kt;
    rhs[i] = rows[i]->omega_root - trace.omega0;
  }
  const Eigen::VectorXcd c = a.colPivHouseholderQr().solve(rhs);
  DispersionFit fit;
  fit.ell1_complex = c[0];
  fit.ell1 = c[0].real();
  fit.ell2 = c[1];
  fit.residual = (a * c - rhs).norm();
  return fit;
}

}  // namespace slabres
