#include "glasskit/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace glasskit {

Matrix operator+(const Matrix& a, const Matrix& b) {
  Matrix r(a.n());
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < a.n(); ++j) r(i, j) = a(i, j) + b(i, j);
  return r;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  Matrix r(a.n());
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < a.n(); ++j) r(i, j) = a(i, j) - b(i, j);
  return r;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix r(a.n());
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < a.n(); ++j) r(i, j) = s * a(i, j);
  return r;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  const int n = a.n();
  Matrix r(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double aik = a(i, k);
      for (int j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

Matrix transpose(const Matrix& a) {
  Matrix r(a.n());
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < a.n(); ++j) r(i, j) = a(j, i);
  return r;
}

double trace(const Matrix& a) {
  double t = 0.0;
  for (int i = 0; i < a.n(); ++i) t += a(i, i);
  return t;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < a.n(); ++j) m = std::max(m, std::abs(a(i, j)));
  return m;
}

double max_asymmetry(const Matrix& a) {
  double m = 0.0;
  for (int i = 0; i < a.n(); ++i)
    for (int j = i + 1; j < a.n(); ++j) m = std::max(m, std::abs(a(i, j) - a(j, i)));
  return m;
}

namespace {

// Choose (c, s) so that J^T A J annihilates entry (p, q); smaller-angle root,
// |theta| <= pi/4 (Golub & Van Loan sym.schur2).
inline void schur2(double app, double aqq, double apq, double& c, double& s, double& t) {
  const double tau = (aqq - app) / (2.0 * apq);
  t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                   : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
  c = 1.0 / std::sqrt(1.0 + t * t);
  s = t * c;
}

double fro_norm(const Matrix& a) {
  double acc = 0.0;
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < a.n(); ++j) acc += a(i, j) * a(i, j);
  return std::sqrt(acc);
}

double off_norm(const Matrix& a) {
  double acc = 0.0;
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < a.n(); ++j)
      if (i != j) acc += a(i, j) * a(i, j);
  return std::sqrt(acc);
}

void require_symmetric(const Matrix& m) {
  if (m.n() == 0) throw DomainError("sym_eigen: empty matrix");
  if (max_asymmetry(m) > tol::sym)
    throw NonSymmetricError("sym_eigen: asymmetry exceeds tolerance");
}

// Sort ascending; ties keep rotation output order.  V holds eigenvectors as
// columns (input = V diag V^T), returned rotation is O = V^T row-permuted.
SymmetricEigen collect(const Matrix& a, const Matrix& v) {
  const int n = a.n();
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int i, int j) { return a(i, i) < a(j, j); });
  SymmetricEigen e;
  e.eigenvalues.resize(n);
  e.rotation = Matrix(n);
  for (int r = 0; r < n; ++r) {
    e.eigenvalues[r] = a(idx[r], idx[r]);
    for (int k = 0; k < n; ++k) e.rotation(r, k) = v(k, idx[r]);
  }
  return e;
}

}  // namespace

SymmetricEigen sym_eigen(const Matrix& m) {
  require_symmetric(m);
  const int n = m.n();
  Matrix a = m;
  // symmetrize exactly so the sweep acts on one consistent value per pair
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));
  Matrix v = Matrix::identity(n);
  if (n == 1) return collect(a, v);

  const double scale = std::max(fro_norm(a), 1e-300);
  const double target = 1e-14 * scale;
  const int max_sweeps = 40;
  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (off_norm(a) <= target) {
      converged = true;
      break;
    }
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-18 * scale) continue;
        double c, s, t;
        schur2(a(p, p), a(q, q), apq, c, s, t);
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = a(p, k) = c * akp - s * akq;
          a(k, q) = a(q, k) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }
  if (!converged && off_norm(a) > target)
    throw NoConvergenceError("sym_eigen: sweep budget exceeded");
  return collect(a, v);
}

namespace {

struct Rotation {
  int p, q;
  double c, s;
};

}  // namespace

SymmetricEigen sym_eigen_rr(const Matrix& m) {
  require_symmetric(m);
  const int n = m.n();
  Matrix a = m;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));
  Matrix v = Matrix::identity(n);
  if (n == 1) return collect(a, v);

  const double scale = std::max(fro_norm(a), 1e-300);
  const double target = 1e-14 * scale;
  const int players = n + (n & 1);  // round-robin slots; last one is a bye for odd n
  const int max_sweeps = 60;
  std::vector<int> arr(players);
  std::vector<Rotation> rots;
  rots.reserve(players / 2);

  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (off_norm(a) <= target) {
      converged = true;
      break;
    }
    std::iota(arr.begin(), arr.end(), 0);
    for (int round = 0; round < players - 1; ++round) {
      rots.clear();
      for (int i = 0; i < players / 2; ++i) {
        int p = arr[i], q = arr[players - 1 - i];
        if (p >= n || q >= n) continue;
        if (p > q) std::swap(p, q);
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-18 * scale) continue;
        Rotation r{p, q, 0.0, 0.0};
        double t;
        schur2(a(p, p), a(q, q), apq, r.c, r.s, t);
        rots.push_back(r);
      }
      const int nr = static_cast<int>(rots.size());
      // row phase: A <- J^T A; each rotation owns rows (p, q)
#pragma omp parallel for schedule(static)
      for (int r = 0; r < nr; ++r) {
        const auto [p, q, c, s] = rots[r];
        for (int k = 0; k < n; ++k) {
          const double x = a(p, k), y = a(q, k);
          a(p, k) = c * x - s * y;
          a(q, k) = s * x + c * y;
        }
      }
      // column phase: A <- A J; each rotation owns columns (p, q)
#pragma omp parallel for schedule(static)
      for (int r = 0; r < nr; ++r) {
        const auto [p, q, c, s] = rots[r];
        for (int k = 0; k < n; ++k) {
          const double x = a(k, p), y = a(k, q);
          a(k, p) = c * x - s * y;
          a(k, q) = s * x + c * y;
        }
      }
#pragma omp parallel for schedule(static)
      for (int r = 0; r < nr; ++r) {
        const auto [p, q, c, s] = rots[r];
        for (int k = 0; k < n; ++k) {
          const double x = v(k, p), y = v(k, q);
          v(k, p) = c * x - s * y;
          v(k, q) = s * x + c * y;
        }
      }
      // rotate all slots but the first
      const int last = arr[players - 1];
      for (int i = players - 1; i >= 2; --i) arr[i] = arr[i - 1];
      arr[1] = last;
    }
  }
  if (!converged && off_norm(a) > target)
    throw NoConvergenceError("sym_eigen_rr: sweep budget exceeded");
  // phased rotations leave small symmetric residue off the diagonal
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));
  return collect(a, v);
}

double min_eigenvalue(const Matrix& m) {
  const auto e = sym_eigen(m);
  return e.eigenvalues.front();
}

bool psd_check(const Matrix& m, double tolerance) {
  return min_eigenvalue(m) >= -tolerance;
}

double logdet_pd(const Matrix& m) {
  const auto e = sym_eigen(m);
  double acc = 0.0;
  for (double w : e.eigenvalues) {
    if (w <= 0.0) throw DomainError("logdet_pd: matrix not positive definite");
    acc += std::log(w);
  }
  return acc;
}

Matrix inverse_spd(const Matrix& m) {
  const auto e = sym_eigen(m);
  const int n = m.n();
  for (double w : e.eigenvalues)
    if (w <= 0.0) throw DomainError("inverse_spd: matrix not positive definite");
  Matrix r(n);
  // M^{-1} = O^T diag(1/w) O
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k)
        acc += e.rotation(k, i) * e.rotation(k, j) / e.eigenvalues[k];
      r(i, j) = r(j, i) = acc;
    }
  return r;
}

OverlapMatrix::OverlapMatrix(Matrix entries) : entries_(std::move(entries)) {
  const int n = entries_.n();
  if (n < 1) throw DomainError("OverlapMatrix: need n >= 1");
  if (n > 16) throw DomainError("OverlapMatrix: replica counts above 16 are unsupported");
  if (max_asymmetry(entries_) > tol::sym)
    throw DomainError("OverlapMatrix: not symmetric");
  for (int i = 0; i < n; ++i) {
    if (std::abs(entries_(i, i) - 1.0) > tol::sym)
      throw DomainError("OverlapMatrix: diagonal must be 1");
    for (int j = 0; j < n; ++j)
      if (std::abs(entries_(i, j)) > 1.0 + tol::sym)
        throw DomainError("OverlapMatrix: entries must lie in [-1, 1]");
  }
  if (!psd_check(entries_))
    throw DomainError("OverlapMatrix: not nonnegative definite");
}

}  // namespace glasskit
