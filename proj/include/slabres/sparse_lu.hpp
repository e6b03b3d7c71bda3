#pragma once

#include <memory>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "slabres/harmonics.hpp"

namespace slabres {

// Sparse LU of a complex square matrix backed by UMFPACK. Unlike Eigen's UmfPackLU
// wrapper it also solves with the conjugate transpose, which the eigenvalue
// perturbation formulas need for left eigenvectors.
class SparseLU {
 public:
  explicit SparseLU(const Eigen::SparseMatrix<cplx>& a);
  ~SparseLU();
  SparseLU(SparseLU&&) noexcept;
  SparseLU& operator=(SparseLU&&) noexcept;
  SparseLU(const SparseLU&) = delete;
  SparseLU& operator=(const SparseLU&) = delete;

  bool singular() const;
  // Reciprocal condition estimate from the factorization diagonal (cheap, crude).
  double rcond() const;

  Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const;
  // Solves A^H x = b.
  Eigen::VectorXcd solve_adjoint(const Eigen::VectorXcd& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace slabres
