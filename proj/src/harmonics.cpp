#include "slabres/harmonics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "slabres/error.hpp"

namespace slabres {

cplx branch_sqrt(cplx w) {
  double theta = std::arg(w);
  if (theta <= -std::numbers::pi / 2) theta += 2.0 * std::numbers::pi;
  return std::polar(std::sqrt(std::abs(w)), 0.5 * theta);
}

cplx eta_squared(int m, cplx kappa, cplx omega, const Medium& ambient) {
  const cplx q = static_cast<double>(m) + kappa;
  return ambient.eps * ambient.mu * omega * omega - q * q;
}

cplx eta(int m, cplx kappa, cplx omega, const Medium& ambient) {
  const cplx w = eta_squared(m, kappa, omega, ambient);
  if (w == cplx(0.0)) {
    throw NumericalError("grazing order m=" + std::to_string(m) + ": eta_m^2 vanishes");
  }
  return branch_sqrt(w);
}

EtaDerivatives eta_derivatives(int m, cplx kappa, cplx omega, const Medium& ambient) {
  const cplx e = eta(m, kappa, omega, ambient);
  return {ambient.eps * ambient.mu * omega / e, -(static_cast<double>(m) + kappa) / e};
}

HarmonicExponent harmonic(int m, double kappa, double omega, const Medium& ambient) {
  const cplx e = eta(m, kappa, omega, ambient);
  return {m, e, eta_squared(m, kappa, omega, ambient).real() > 0.0};
}

bool in_diamond(double kappa, double omega, const Medium& ambient) {
  const double k = std::abs(kappa);
  const double w = omega * std::sqrt(ambient.eps * ambient.mu);
  return k < 0.5 && k < w && w < 1.0 - k;
}

std::map<int, cplx> dtn_apply(const std::map<int, cplx>& trace_coeffs, cplx kappa, cplx omega,
                              int truncation, const Medium& ambient) {
  std::map<int, cplx> out;
  for (const auto& [m, f] : trace_coeffs) {
    if (std::abs(m) > truncation) {
      throw UsageError("trace coefficient of order " + std::to_string(m) +
                       " exceeds truncation " + std::to_string(truncation));
    }
    out[m] = cplx(0.0, -1.0) * eta(m, kappa, omega, ambient) * f;
  }
  return out;
}

}  // namespace slabres
