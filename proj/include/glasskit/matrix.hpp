#pragma once

#include <cstdint>
#include <vector>

#include "glasskit/errors.hpp"
#include "glasskit/model.hpp"

namespace glasskit {

/// Dense square matrix, row-major.  Small (n <= 16) in the bound modules, up
/// to O(10^3) for the simulator's disorder decomposition.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int n, double fill = 0.0)
      : n_(n), a_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), fill) {
    if (n < 0) throw DomainError("Matrix: negative dimension");
  }

  static Matrix identity(int n) {
    Matrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int n() const { return n_; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }

 private:
  int n_ = 0;
  std::vector<double> a_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
double trace(const Matrix& a);
double max_abs(const Matrix& a);
double max_asymmetry(const Matrix& a);

/// Eigendecomposition of a symmetric matrix: M = O^T diag(eigenvalues) O with
/// eigenvalues ascending and O orthogonal (rows are eigenvectors).
struct SymmetricEigen {
  std::vector<double> eigenvalues;
  Matrix rotation;
};

/// Serial cyclic Jacobi (deterministic row-major sweep order).  Reference
/// implementation; used for all small-matrix work.
/// Throws NonSymmetricError if asymmetry exceeds tol::sym, NoConvergenceError
/// past the sweep budget.
SymmetricEigen sym_eigen(const Matrix& m);

/// Round-robin phased Jacobi: rotations of each round act on disjoint index
/// pairs, applied as a row phase then a column phase, so the rounds are
/// data-parallel (OpenMP) and the result is bit-identical for any thread
/// count.  Same contract as sym_eigen.
SymmetricEigen sym_eigen_rr(const Matrix& m);

double min_eigenvalue(const Matrix& m);

/// true iff the smallest eigenvalue is >= -tolerance.
bool psd_check(const Matrix& m, double tolerance = tol::psd);

/// log det of a positive definite matrix; DomainError if any eigenvalue <= 0.
double logdet_pd(const Matrix& m);

/// Inverse of a symmetric positive definite matrix via its eigensystem.
Matrix inverse_spd(const Matrix& m);

/// Symmetric replica-overlap constraint matrix: unit diagonal, entries in
/// [-1, 1], nonnegative definite within tol::psd.  Replica counts above 16
/// are out of scope.
class OverlapMatrix {
 public:
  explicit OverlapMatrix(Matrix entries);

  int n() const { return entries_.n(); }
  const Matrix& entries() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

}  // namespace glasskit
