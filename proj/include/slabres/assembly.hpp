#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "slabres/harmonics.hpp"
#include "slabres/structure.hpp"

namespace slabres {

using SparseComplex = Eigen::SparseMatrix<cplx>;
using SparseReal = Eigen::SparseMatrix<double>;

enum class Side { left, right };

// Uniform rectangular grid on [-pi, pi] x [-L, L]. Columns x = -pi and x = pi are
// identified, so there are nx distinct node columns and nz + 1 node rows.
struct Mesh {
  int nx = 0;
  int nz = 0;
  double L = 0.0;

  double hx() const { return kPeriod / nx; }
  double hz() const { return 2.0 * L / nz; }
  int node_count() const { return nx * (nz + 1); }
  int node(int i, int k) const { return k * nx + ((i % nx) + nx) % nx; }
  double x(int i) const;
  double z(int k) const { return -L + k * hz(); }
};

Mesh build_mesh(const SlabStructure& s, int nx, int nz);

// Multiplier applied to each trace harmonic on the artificial boundaries.
//  - continuum: -i eta_m, the exact exterior Dirichlet-to-Neumann symbol.
//  - discrete:  the transparent-boundary symbol of the same bilinear grid continued
//    into the homogeneous exterior. It tends to -i eta_m as the mesh is refined and
//    makes plane waves exact discrete solutions in a homogeneous medium.
enum class BoundarySymbol { discrete, continuum };

struct AssemblyOptions {
  int truncation = -1;  // highest |m| kept on the trace; -1 selects default_truncation(nx)
  BoundarySymbol symbol = BoundarySymbol::discrete;
};

struct DtnMeta {
  int truncation = 0;
  BoundarySymbol symbol = BoundarySymbol::discrete;
  std::vector<cplx> eta;        // eta_m, stored at index m + truncation
  std::vector<cplx> symbol_m;   // boundary multiplier sigma_m (continuum: -i eta_m)
  std::vector<cplx> symbol_dw;  // d sigma_m / d omega
  // z-propagation constant of the exterior m = 0 wave used for the incident field and
  // for reading off R and T (eta_0 for the continuum symbol).
  cplx zeta0;
  cplx zeta0_dw;
  // Flux factor of the m = 0 wave; -2i * flux0 * exp(-i zeta0 L) is the boundary source density.
  cplx flux0;

  cplx multiplier(int m) const { return symbol_m[m + truncation]; }
};

// Discretized forms at one (kappa, omega):
//   H = K(kappa) + Q(kappa, omega)  (volume form plus Dirichlet-to-Neumann boundary form)
//   B = mass matrix weighted by eps.
// Row i is the test function phi_i, column j the trial function phi_j.
struct DiscreteSystem {
  cplx kappa;
  cplx omega;
  SparseComplex H;
  SparseReal B;
  SparseComplex dH_domega;  // boundary-only
  DtnMeta dtn;
};

// Caches the (kappa, omega)-independent volume matrices of one structure on one mesh.
class FormAssembler {
 public:
  FormAssembler(const SlabStructure& s, const Mesh& mesh, AssemblyOptions options = {});

  const Mesh& mesh() const { return mesh_; }
  const SlabStructure& structure() const { return structure_; }
  const AssemblyOptions& options() const { return options_; }
  int truncation() const { return truncation_; }

  DtnMeta boundary_symbol(cplx kappa, cplx omega) const;

  // K(kappa) = S + i kappa G + kappa^2 M_mu.
  SparseComplex volume_form(cplx kappa) const;
  SparseComplex boundary_form(const std::vector<cplx>& symbol) const;

  DiscreteSystem assemble(cplx kappa, cplx omega) const;

  // Right-hand side for a unit plane wave incident from the given side.
  Eigen::VectorXcd source(const DtnMeta& dtn, Side side) const;

  const SparseReal& mass() const { return mass_eps_; }
  const SparseReal& stiffness() const { return stiffness_; }
  const SparseReal& skew() const { return skew_; }
  const SparseReal& mass_mu() const { return mass_mu_; }

 private:
  SlabStructure structure_;
  Mesh mesh_;
  AssemblyOptions options_;
  int truncation_;
  SparseReal stiffness_;  // int mu^-1 grad phi_j . grad phi_i
  SparseReal skew_;       // int mu^-1 (phi_j d_x phi_i - d_x phi_j phi_i)
  SparseReal mass_mu_;    // int mu^-1 phi_j phi_i
  SparseReal mass_eps_;   // int eps phi_j phi_i
};

DiscreteSystem assemble_forms(const Mesh& mesh, const SlabStructure& s, cplx kappa, cplx omega,
                              AssemblyOptions options = {});

Eigen::VectorXcd assemble_source(const Mesh& mesh, const SlabStructure& s, cplx kappa, cplx omega,
                                 Side side, AssemblyOptions options = {});

// Zeroth discrete Fourier coefficient of the nodal trace on z = -L (bottom) or z = +L (top).
cplx trace_mean(const Mesh& mesh, const Eigen::VectorXcd& field, bool top);

// Discrete Fourier coefficients u_m, |m| <= truncation, of a nodal trace.
std::vector<cplx> trace_coefficients(const Mesh& mesh, const Eigen::VectorXcd& field, bool top,
                                     int truncation);

// Scattering pencil: P = H - omega^2 B (scattering operator), Q = H + B (coercive part).
struct Pencil {
  SparseComplex P;
  SparseComplex Q;
};

Pencil pencil_matrices(const DiscreteSystem& sys);

}  // namespace slabres
