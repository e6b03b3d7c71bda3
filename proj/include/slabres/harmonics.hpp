#pragma once

#include <complex>
#include <map>

#include "slabres/structure.hpp"

namespace slabres {

using cplx = std::complex<double>;

// Square root with the branch cut on the negative imaginary axis of the radicand:
// sqrt(w) = sqrt(|w|) exp(i theta / 2) with theta = arg(w) in (-pi/2, 3pi/2].
// Positive radicands map to positive roots and negative ones to i*sqrt(|w|).
cplx branch_sqrt(cplx w);

// Radicand eps0*mu0*omega^2 - (m + kappa)^2 of the order-m exponent.
cplx eta_squared(int m, cplx kappa, cplx omega, const Medium& ambient);

// z-exponent of the m-th diffraction order outside the slab. Throws NumericalError
// ("grazing order") when the radicand vanishes.
cplx eta(int m, cplx kappa, cplx omega, const Medium& ambient);

struct EtaDerivatives {
  cplx d_omega;
  cplx d_kappa;
};

EtaDerivatives eta_derivatives(int m, cplx kappa, cplx omega, const Medium& ambient);

struct HarmonicExponent {
  int m = 0;
  cplx eta;
  bool propagating = false;
};

HarmonicExponent harmonic(int m, double kappa, double omega, const Medium& ambient);

// Region of real (kappa, omega) with exactly one propagating order (m = 0).
bool in_diamond(double kappa, double omega, const Medium& ambient);

// Harmonics up to (but excluding) the Nyquist order of an nx-point periodic trace.
constexpr int default_truncation(int nx) { return nx / 2 - 1; }

// Exterior Dirichlet-to-Neumann action on trace Fourier coefficients:
// coefficient m maps to -i * eta_m * f_m.
std::map<int, cplx> dtn_apply(const std::map<int, cplx>& trace_coeffs, cplx kappa, cplx omega,
                              int truncation, const Medium& ambient);

}  // namespace slabres
