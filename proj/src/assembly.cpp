#include "slabres/assembly.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "slabres/error.hpp"

namespace slabres {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

using Triplets = std::vector<Eigen::Triplet<double>>;

struct ElementMatrices {
  std::array<std::array<double, 4>, 4> stiffness{};
  std::array<std::array<double, 4>, 4> skew{};
  std::array<std::array<double, 4>, 4> mass_mu{};
  std::array<std::array<double, 4>, 4> mass_eps{};
};

// Bilinear shape functions on the reference square, ordered (0,0), (1,0), (1,1), (0,1).
void shape(double xi, double zeta, std::array<double, 4>& phi, std::array<double, 4>& dxi,
           std::array<double, 4>& dzeta) {
  phi = {(1 - xi) * (1 - zeta), xi * (1 - zeta), xi * zeta, (1 - xi) * zeta};
  dxi = {-(1 - zeta), 1 - zeta, zeta, -zeta};
  dzeta = {-(1 - xi), -xi, xi, 1 - xi};
}

ElementMatrices element_matrices(const SlabStructure& s, double x0, double z0, double hx,
                                 double hz) {
  static const double g = 0.5 / std::sqrt(3.0);
  static const std::array<double, 2> pts{0.5 - g, 0.5 + g};
  const double w = 0.25 * hx * hz;
  ElementMatrices e;
  std::array<double, 4> phi{}, dxi{}, dzeta{};
  for (double xi : pts) {
    for (double zeta : pts) {
      const Medium m = s.material_at(x0 + xi * hx, z0 + zeta * hz);
      const double inv_mu = 1.0 / m.mu;
      shape(xi, zeta, phi, dxi, dzeta);
      for (int a = 0; a < 4; ++a) {
        const double ax = dxi[a] / hx;
        const double az = dzeta[a] / hz;
        for (int b = a; b < 4; ++b) {
          const double bx = dxi[b] / hx;
          const double bz = dzeta[b] / hz;
          const double st = w * inv_mu * (ax * bx + az * bz);
          const double mm = w * inv_mu * phi[a] * phi[b];
          const double me = w * m.eps * phi[a] * phi[b];
          // row a (test), column b (trial): phi_b d_x phi_a - d_x phi_b phi_a
          const double sk = w * inv_mu * (phi[b] * ax - bx * phi[a]);
          e.stiffness[a][b] += st;
          e.mass_mu[a][b] += mm;
          e.mass_eps[a][b] += me;
          e.skew[a][b] += sk;
        }
      }
    }
  }
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < a; ++b) {
      e.stiffness[a][b] = e.stiffness[b][a];
      e.mass_mu[a][b] = e.mass_mu[b][a];
      e.mass_eps[a][b] = e.mass_eps[b][a];
      e.skew[a][b] = -e.skew[b][a];
    }
    e.skew[a][a] = 0.0;
  }
  return e;
}

struct TraceSymbol {
  cplx sigma;
  cplx sigma_dw;
  cplx lambda;
  cplx lambda_dw;
  cplx eta2;
};

// Transparent-boundary symbol of the bilinear grid for one trace harmonic. The exterior
// field of harmonic m obeys the three-term recurrence of the 1D linear-element operator
// K_z - eta_h^2 M_z; its outgoing solution decays (or propagates) as lambda^n.
TraceSymbol discrete_symbol(int m, cplx kappa, cplx omega, const Medium& ambient, double hx,
                            double hz) {
  const double theta = m * hx;
  const double c = std::cos(theta);
  const double sn = std::sin(theta);
  const double mass_ratio = (2.0 + c) / 3.0;
  const cplx x_ratio =
      6.0 * (1.0 - c) / (hx * hx * (2.0 + c)) + 6.0 * kappa * sn / (hx * (2.0 + c)) + kappa * kappa;
  const double n2 = ambient.eps * ambient.mu;
  const cplx eta2 = n2 * omega * omega - x_ratio;
  if (eta2 == cplx(0.0)) {
    throw NumericalError("grazing order m=" + std::to_string(m) + " on the discrete boundary");
  }
  const cplx s = eta2 * hz * hz;
  const cplx qa = 6.0 + s;
  const cplx qb = 4.0 * s - 12.0;
  const cplx root = std::sqrt(12.0 * s * (s - 12.0));
  // Stable pair of roots with product one.
  const cplx q = -0.5 * (qb + (std::real(std::conj(qb) * root) >= 0.0 ? root : -root));
  const cplx target = std::exp(kI * branch_sqrt(eta2) * hz);
  cplx lambda = qa / q;
  if (qa != cplx(0.0)) {
    const cplx other = q / qa;
    if (std::abs(other - target) < std::abs(lambda - target)) lambda = other;
  }
  const cplx d = (1.0 - lambda) / hz - eta2 * (hz / 6.0) * (2.0 + lambda);

  const cplx eta2_dw = 2.0 * n2 * omega;
  const cplx s_dw = eta2_dw * hz * hz;
  const cplx f_lambda = 2.0 * qa * lambda + qb;
  const cplx f_s = lambda * lambda + 4.0 * lambda + 1.0;
  const cplx lambda_dw = -f_s * s_dw / f_lambda;
  const cplx d_dw = -lambda_dw / hz - (hz / 6.0) * (eta2_dw * (2.0 + lambda) + eta2 * lambda_dw);
  return {mass_ratio * d, mass_ratio * d_dw, lambda, lambda_dw, eta2};
}

}  // namespace

double Mesh::x(int i) const { return -kPi + i * hx(); }

Mesh build_mesh(const SlabStructure& s, int nx, int nz) {
  if (nx < 8 || nx % 2 != 0) {
    throw UsageError("invalid resolution: nx must be even and >= 8 (got " + std::to_string(nx) +
                     ")");
  }
  if (nz < 8) {
    throw UsageError("invalid resolution: nz must be >= 8 (got " + std::to_string(nz) + ")");
  }
  return Mesh{nx, nz, s.half_height()};
}

FormAssembler::FormAssembler(const SlabStructure& s, const Mesh& mesh, AssemblyOptions options)
    : structure_(s), mesh_(mesh), options_(options) {
  if (mesh_.L != s.half_height()) throw UsageError("mesh does not match the structure strip");
  truncation_ = options_.truncation < 0 ? default_truncation(mesh_.nx) : options_.truncation;
  if (truncation_ > mesh_.nx / 2) {
    throw UsageError("truncation order exceeds the trace Nyquist limit");
  }

  const int n = mesh_.node_count();
  const double hx = mesh_.hx();
  const double hz = mesh_.hz();
  Triplets st, sk, mm, me;
  const std::size_t est = static_cast<std::size_t>(16) * mesh_.nx * mesh_.nz;
  st.reserve(est);
  sk.reserve(est);
  mm.reserve(est);
  me.reserve(est);
  for (int k = 0; k < mesh_.nz; ++k) {
    for (int i = 0; i < mesh_.nx; ++i) {
      const std::array<int, 4> nodes{mesh_.node(i, k), mesh_.node(i + 1, k),
                                     mesh_.node(i + 1, k + 1), mesh_.node(i, k + 1)};
      const auto e = element_matrices(structure_, mesh_.x(i), mesh_.z(k), hx, hz);
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          st.emplace_back(nodes[a], nodes[b], e.stiffness[a][b]);
          sk.emplace_back(nodes[a], nodes[b], e.skew[a][b]);
          mm.emplace_back(nodes[a], nodes[b], e.mass_mu[a][b]);
          me.emplace_back(nodes[a], nodes[b], e.mass_eps[a][b]);
        }
      }
    }
  }
  stiffness_.resize(n, n);
  skew_.resize(n, n);
  mass_mu_.resize(n, n);
  mass_eps_.resize(n, n);
  stiffness_.setFromTriplets(st.begin(), st.end());
  skew_.setFromTriplets(sk.begin(), sk.end());
  mass_mu_.setFromTriplets(mm.begin(), mm.end());
  mass_eps_.setFromTriplets(me.begin(), me.end());
}

DtnMeta FormAssembler::boundary_symbol(cplx kappa, cplx omega) const {
  const Medium& amb = structure_.ambient();
  DtnMeta meta;
  meta.truncation = truncation_;
  meta.symbol = options_.symbol;
  const int count = 2 * truncation_ + 1;
  meta.eta.resize(count);
  meta.symbol_m.resize(count);
  meta.symbol_dw.resize(count);
  for (int m = -truncation_; m <= truncation_; ++m) {
    const int idx = m + truncation_;
    meta.eta[idx] = eta(m, kappa, omega, amb);
    if (options_.symbol == BoundarySymbol::continuum) {
      meta.symbol_m[idx] = -kI * meta.eta[idx];
      meta.symbol_dw[idx] = -kI * eta_derivatives(m, kappa, omega, amb).d_omega;
    } else {
      const auto sym = discrete_symbol(m, kappa, omega, amb, mesh_.hx(), mesh_.hz());
      meta.symbol_m[idx] = sym.sigma;
      meta.symbol_dw[idx] = sym.sigma_dw;
    }
  }
  if (options_.symbol == BoundarySymbol::continuum) {
    meta.zeta0 = meta.eta[truncation_];
    meta.zeta0_dw = eta_derivatives(0, kappa, omega, amb).d_omega;
    meta.flux0 = meta.zeta0;
  } else {
    const double hz = mesh_.hz();
    const auto sym = discrete_symbol(0, kappa, omega, amb, mesh_.hx(), hz);
    meta.zeta0 = -kI * std::log(sym.lambda) / hz;
    meta.zeta0_dw = -kI * sym.lambda_dw / (sym.lambda * hz);
    meta.flux0 = (1.0 / hz + sym.eta2 * hz / 6.0) * (1.0 / sym.lambda - sym.lambda) * (0.5 * kI);
  }
  return meta;
}

SparseComplex FormAssembler::volume_form(cplx kappa) const {
  SparseComplex k = stiffness_.cast<cplx>();
  k += (kI * kappa) * skew_.cast<cplx>();
  k += (kappa * kappa) * mass_mu_.cast<cplx>();
  return k;
}

SparseComplex FormAssembler::boundary_form(const std::vector<cplx>& symbol) const {
  const int nx = mesh_.nx;
  const double hx = mesh_.hx();
  const double scale = kPeriod / (structure_.ambient().mu * nx * static_cast<double>(nx));
  // Circulant kernel: Q_ij = scale * sum_m sigma_m exp(i m (x_i - x_j)).
  std::vector<cplx> kernel(nx, cplx(0.0));
  for (int d = 0; d < nx; ++d) {
    cplx acc(0.0);
    for (int m = -truncation_; m <= truncation_; ++m) {
      const double phase = static_cast<double>((static_cast<long>(m) * d) % nx) * hx;
      acc += symbol[m + truncation_] * std::polar(1.0, phase);
    }
    kernel[d] = scale * acc;
  }
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(2 * static_cast<std::size_t>(nx) * nx);
  for (int k : {0, mesh_.nz}) {
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < nx; ++j) {
        trip.emplace_back(mesh_.node(i, k), mesh_.node(j, k), kernel[((i - j) % nx + nx) % nx]);
      }
    }
  }
  SparseComplex q(mesh_.node_count(), mesh_.node_count());
  q.setFromTriplets(trip.begin(), trip.end());
  return q;
}

DiscreteSystem FormAssembler::assemble(cplx kappa, cplx omega) const {
  DiscreteSystem sys;
  sys.kappa = kappa;
  sys.omega = omega;
  sys.dtn = boundary_symbol(kappa, omega);
  sys.H = volume_form(kappa) + boundary_form(sys.dtn.symbol_m);
  sys.B = mass_eps_;
  sys.dH_domega = boundary_form(sys.dtn.symbol_dw);
  return sys;
}

Eigen::VectorXcd FormAssembler::source(const DtnMeta& dtn, Side side) const {
  const double L = mesh_.L;
  const cplx density =
      -2.0 * kI * dtn.flux0 * std::exp(-kI * dtn.zeta0 * L) / structure_.ambient().mu;
  Eigen::VectorXcd p = Eigen::VectorXcd::Zero(mesh_.node_count());
  const int k = side == Side::left ? 0 : mesh_.nz;
  for (int i = 0; i < mesh_.nx; ++i) p[mesh_.node(i, k)] = mesh_.hx() * density;
  return p;
}

DiscreteSystem assemble_forms(const Mesh& mesh, const SlabStructure& s, cplx kappa, cplx omega,
                              AssemblyOptions options) {
  return FormAssembler(s, mesh, options).assemble(kappa, omega);
}

Eigen::VectorXcd assemble_source(const Mesh& mesh, const SlabStructure& s, cplx kappa, cplx omega,
                                 Side side, AssemblyOptions options) {
  if (kappa.imag() != 0.0 || omega.imag() != 0.0 ||
      !in_diamond(kappa.real(), omega.real(), s.ambient())) {
    throw OutsideDiamondError("plane-wave source requires (kappa, omega) inside the diamond");
  }
  FormAssembler assembler(s, mesh, options);
  return assembler.source(assembler.boundary_symbol(kappa, omega), side);
}

cplx trace_mean(const Mesh& mesh, const Eigen::VectorXcd& field, bool top) {
  const int k = top ? mesh.nz : 0;
  cplx acc(0.0);
  for (int i = 0; i < mesh.nx; ++i) acc += field[mesh.node(i, k)];
  return acc / static_cast<double>(mesh.nx);
}

std::vector<cplx> trace_coefficients(const Mesh& mesh, const Eigen::VectorXcd& field, bool top,
                                     int truncation) {
  const int k = top ? mesh.nz : 0;
  std::vector<cplx> out(2 * truncation + 1, cplx(0.0));
  for (int m = -truncation; m <= truncation; ++m) {
    cplx acc(0.0);
    for (int i = 0; i < mesh.nx; ++i) {
      const double phase = -static_cast<double>((static_cast<long>(m) * i) % mesh.nx) * mesh.hx();
      acc += field[mesh.node(i, k)] * std::polar(1.0, phase);
    }
    out[m + truncation] = acc / static_cast<double>(mesh.nx);
  }
  return out;
}

Pencil pencil_matrices(const DiscreteSystem& sys) {
  const SparseComplex b = sys.B.cast<cplx>();
  return {sys.H - (sys.omega * sys.omega) * b, sys.H + b};
}

}  // namespace slabres
