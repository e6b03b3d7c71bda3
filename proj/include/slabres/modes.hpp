#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slabres/assembly.hpp"

namespace slabres {

struct EigenPoint {
  cplx kappa;
  cplx omega;
  cplx ell;  // pencil eigenvalue of smallest magnitude
  Eigen::VectorXcd vector;  // unit norm
  double residual = 0.0;    // ||P x - ell Q x|| / ||x||
  int iterations = 0;       // operator applications spent
};

struct EigenOptions {
  int max_iterations = 200;
  double tolerance = 1e-8;
  int krylov_dim = 20;
  // Q = H + mass_factor * B. Only the zero set of the pencil is independent of this.
  double mass_factor = 1.0;
};

struct EllDerivative {
  EigenPoint point;
  cplx dell_domega;
  bool analytic = true;  // false when the finite-difference fallback was used
};

// Smallest-magnitude eigenpairs of P x = ell Q x with P = H - omega^2 B, Q = H + B,
// by shift-invert Arnoldi at shift 0.
class PencilEigensolver {
 public:
  PencilEigensolver(const SlabStructure& s, int nx, int nz, AssemblyOptions options = {});

  const FormAssembler& assembler() const { return assembler_; }

  // `start` warm-starts the iteration (e.g. the eigenvector of a nearby point).
  EigenPoint smallest(cplx kappa, cplx omega, const EigenOptions& options = {},
                      const Eigen::VectorXcd* start = nullptr) const;

  // d ell / d omega by first-order perturbation with the left eigenvector; falls back
  // to central differences at relative step 1e-6.
  EllDerivative with_derivative(cplx kappa, cplx omega, const EigenOptions& options = {},
                                const Eigen::VectorXcd* start = nullptr) const;

  cplx finite_difference_derivative(cplx kappa, cplx omega, const EigenOptions& options,
                                    const Eigen::VectorXcd& start) const;

 private:
  FormAssembler assembler_;
};

EigenPoint smallest_eigenpair(const SlabStructure& s, cplx kappa, cplx omega, int nx, int nz,
                              EigenOptions options = {});

struct RootResult {
  bool converged = false;
  cplx omega;
  EigenPoint point;
  int newton_steps = 0;
  std::string message;
};

// Complex Newton on ell(kappa, .) = 0 starting at omega_start.
RootResult newton_root(const PencilEigensolver& solver, double kappa, cplx omega_start,
                       const EigenOptions& options = {}, const Eigen::VectorXcd* start = nullptr,
                       int max_steps = 40);

struct GuidedMode {
  double omega0 = 0.0;
  double residual = 0.0;
  cplx omega_root;
  cplx ell;
};

struct ModeSearchOptions {
  int scan_points = 200;
  double scan_tolerance = 1e-6;  // eigen-residual target during the coarse scan
  double imag_tolerance = 1e-6;  // accept |Im omega_root| <= imag_tolerance * |omega_root|
  EigenOptions eigen;
  AssemblyOptions assembly;
};

struct ScanPoint {
  double omega = 0.0;
  double abs_ell = 0.0;
};

std::vector<ScanPoint> scan_smallest_eigenvalue(const PencilEigensolver& solver, double kappa,
                                                const std::vector<double>& omegas,
                                                const ModeSearchOptions& options = {});

std::vector<GuidedMode> find_guided_modes(const SlabStructure& s, double kappa0, double lo,
                                          double hi, int nx, int nz,
                                          ModeSearchOptions options = {});

std::vector<GuidedMode> find_guided_modes(const PencilEigensolver& solver, double kappa0, double lo,
                                          double hi, const ModeSearchOptions& options = {});

// Newton-polishes a known mode frequency on another mesh (no scan).
std::optional<GuidedMode> refine_guided_mode(const PencilEigensolver& solver, double kappa0,
                                             double omega_guess,
                                             const ModeSearchOptions& options = {});

struct DispersionSample {
  double kappa = 0.0;
  cplx omega_root;
  double residual = 0.0;
};

struct DispersionTrace {
  double kappa0 = 0.0;
  double omega0 = 0.0;
  std::vector<DispersionSample> samples;  // sorted by kappa
  bool complete = true;
  std::string failure;  // first continuation failure, if any
};

DispersionTrace trace_dispersion(const PencilEigensolver& solver, double kappa0, double omega0,
                                 const std::vector<double>& kappa_offsets,
                                 const EigenOptions& options = {});

DispersionTrace trace_dispersion(const SlabStructure& s, double kappa0, double omega0,
                                 const std::vector<double>& kappa_offsets, int nx, int nz,
                                 EigenOptions options = {});

struct DispersionFit {
  double ell1 = 0.0;
  cplx ell1_complex;
  cplx ell2;
  double residual = 0.0;
};

// Least squares for omega_root - omega0 = -ell1 kt - ell2 kt^2 over the trace.
DispersionFit dispersion_coefficients(const DispersionTrace& trace);

}  // namespace slabres
