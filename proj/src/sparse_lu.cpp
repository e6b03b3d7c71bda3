#include "slabres/sparse_lu.hpp"

#include <string>
#include <vector>

#include <umfpack.h>

#include "slabres/error.hpp"

namespace slabres {

struct SparseLU::Impl {
  // Column-compressed copy in UMFPACK's packed-complex layout.
  std::vector<SuiteSparse_long> ap, ai;
  std::vector<double> ax;
  void* numeric = nullptr;
  double rcond = 0.0;
  bool singular = false;
  SuiteSparse_long n = 0;

  ~Impl() {
    if (numeric) umfpack_zl_free_numeric(&numeric);
  }

  Eigen::VectorXcd solve(const Eigen::VectorXcd& b, int mode) const {
    if (b.size() != n) throw UsageError("right-hand side has the wrong dimension");
    Eigen::VectorXcd x(n);
    double info[UMFPACK_INFO];
    const int status = umfpack_zl_solve(mode, ap.data(), ai.data(), ax.data(), nullptr,
                                        reinterpret_cast<double*>(x.data()), nullptr,
                                        reinterpret_cast<const double*>(b.data()), nullptr,
                                        numeric, nullptr, info);
    if (status != UMFPACK_OK && status != UMFPACK_WARNING_singular_matrix) {
      throw NumericalError("sparse solve failed (UMFPACK status " + std::to_string(status) + ")");
    }
    return x;
  }
};

SparseLU::SparseLU(const Eigen::SparseMatrix<cplx>& a) : impl_(std::make_unique<Impl>()) {
  if (a.rows() != a.cols()) throw UsageError("sparse LU needs a square matrix");
  Eigen::SparseMatrix<cplx> m = a;
  m.makeCompressed();
  auto& d = *impl_;
  d.n = m.rows();
  d.ap.assign(m.outerIndexPtr(), m.outerIndexPtr() + m.cols() + 1);
  d.ai.assign(m.innerIndexPtr(), m.innerIndexPtr() + m.nonZeros());
  d.ax.resize(2 * static_cast<std::size_t>(m.nonZeros()));
  for (Eigen::Index k = 0; k < m.nonZeros(); ++k) {
    d.ax[2 * k] = m.valuePtr()[k].real();
    d.ax[2 * k + 1] = m.valuePtr()[k].imag();
  }

  double control[UMFPACK_CONTROL];
  double info[UMFPACK_INFO];
  umfpack_zl_defaults(control);
  void* symbolic = nullptr;
  int status = umfpack_zl_symbolic(d.n, d.n, d.ap.data(), d.ai.data(), d.ax.data(), nullptr,
                                   &symbolic, control, info);
  if (status != UMFPACK_OK) {
    throw NumericalError("sparse symbolic analysis failed (UMFPACK status " +
                         std::to_string(status) + ")");
  }
  status = umfpack_zl_numeric(d.ap.data(), d.ai.data(), d.ax.data(), nullptr, symbolic,
                              &d.numeric, control, info);
  umfpack_zl_free_symbolic(&symbolic);
  if (status == UMFPACK_WARNING_singular_matrix) {
    d.singular = true;
  } else if (status != UMFPACK_OK) {
    throw NumericalError("sparse factorization failed (UMFPACK status " + std::to_string(status) +
                         ")");
  }
  d.rcond = d.singular ? 0.0 : info[UMFPACK_RCOND];
}

SparseLU::~SparseLU() = default;
SparseLU::SparseLU(SparseLU&&) noexcept = default;
SparseLU& SparseLU::operator=(SparseLU&&) noexcept = default;

bool SparseLU::singular() const { return impl_->singular; }
double SparseLU::rcond() const { return impl_->rcond; }

Eigen::VectorXcd SparseLU::solve(const Eigen::VectorXcd& b) const {
  return impl_->solve(b, UMFPACK_A);
}

Eigen::VectorXcd SparseLU::solve_adjoint(const Eigen::VectorXcd& b) const {
  return impl_->solve(b, UMFPACK_At);
}

}  // namespace slabres
