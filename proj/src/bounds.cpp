#include "glasskit/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "glasskit/parisi.hpp"
#include "optimize.hpp"

namespace glasskit::bounds {

namespace {

double entry_xi_prime(int p, double v) { return std::pow(v, p - 1); }
double entry_theta(int p, double v) { return (1.0 - 1.0 / p) * std::pow(v, p); }

// hat matrix: beta_j beta_j' xi'(entry)
Matrix hat(int p, const Matrix& q, const std::vector<double>& betas) {
  const int n = q.n();
  Matrix r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = betas[i] * betas[j] * entry_xi_prime(p, q(i, j));
  return r;
}

struct CriticalPair {
  parisi::PspinCritical c1, c2;
  double b1, b2;  // 1/(1-q_j)
};

CriticalPair critical_pair(const ModelSpec& m1, const ModelSpec& m2) {
  if (m1.p != m2.p) throw DomainError("coupled p-spin bound: models must share p");
  CriticalPair cp{parisi::pspin_critical(m1), parisi::pspin_critical(m2), 0.0, 0.0};
  cp.b1 = 1.0 / (1.0 - cp.c1.q);
  cp.b2 = 1.0 / (1.0 - cp.c2.q);
  return cp;
}

double checked_log(double v, const char* what) {
  if (!(v > 0.0)) throw DomainError(std::string("nonpositive log argument in ") + what);
  return std::log(v);
}

}  // namespace

double guerra_bound(const BoundInput& input) {
  const int n = input.Q.n();
  const int k = static_cast<int>(input.m.size());
  if (k < 1) throw DomainError("guerra_bound: k must be >= 1");
  if (static_cast<int>(input.betas.size()) != n || static_cast<int>(input.hs.size()) != n)
    throw DomainError("guerra_bound: betas/hs must have n entries");
  if (static_cast<int>(input.Qseq.size()) != k)
    throw DomainError("guerra_bound: Qseq must hold Q^1..Q^k");
  for (double b : input.betas)
    if (!(b > 0.0)) throw DomainError("guerra_bound: betas must be positive");
  for (int l = 0; l < k; ++l) {
    if (input.Qseq[l].n() != n) throw DomainError("guerra_bound: Q^l dimension mismatch");
    if (max_asymmetry(input.Qseq[l]) > tol::sym)
      throw DomainError("guerra_bound: Q^l not symmetric");
  }
  if (input.A.n() != n) throw DomainError("guerra_bound: A dimension mismatch");
  for (int l = 0; l + 1 < k; ++l)
    if (!(input.m[l] < input.m[l + 1]))
      throw DomainError("guerra_bound: m must be strictly increasing");
  if (std::abs(input.m.back() - 1.0) > 1e-12)
    throw DomainError("guerra_bound: m_k = 1 required");

  // sequence 0 = Q^0, Q^1, ..., Q^k, Q^{k+1} = Q
  std::vector<Matrix> seq;
  seq.reserve(k + 2);
  seq.push_back(Matrix(n));
  for (const auto& q : input.Qseq) seq.push_back(q);
  seq.push_back(input.Q.entries());

  std::vector<Matrix> deltas;
  deltas.reserve(k + 1);
  for (int l = 0; l <= k; ++l) {
    Matrix d = hat(input.p, seq[l + 1], input.betas) - hat(input.p, seq[l], input.betas);
    if (!psd_check(d)) throw DomainError("guerra_bound: Delta_l not nonnegative definite");
    deltas.push_back(std::move(d));
  }

  // A_{k+1} = A, A_l = A_{l+1} - m_l Delta_l
  std::vector<Matrix> as(k + 2, Matrix(n));
  as[k + 1] = input.A;
  for (int l = k; l >= 1; --l) as[l] = as[l + 1] - input.m[l - 1] * deltas[l];
  std::vector<double> logdets(k + 2);
  for (int l = 1; l <= k + 1; ++l) {
    if (!(min_eigenvalue(as[l]) > 0.0))
      throw DomainError("guerra_bound: A_l not positive definite");
    logdets[l] = logdet_pd(as[l]);
  }

  const Matrix a1inv = inverse_spd(as[1]);
  double hquad = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) hquad += input.hs[i] * a1inv(i, j) * input.hs[j];

  double val = trace(matmul(input.A, input.Q.entries())) - n + hquad +
               trace(matmul(a1inv, deltas[0])) - logdets[k + 1];
  for (int l = 1; l <= k; ++l) val += (logdets[l + 1] - logdets[l]) / input.m[l - 1];
  for (int l = 1; l <= k; ++l) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        acc += input.betas[i] * input.betas[j] *
               (entry_theta(input.p, seq[l + 1](i, j)) - entry_theta(input.p, seq[l](i, j)));
    val -= input.m[l - 1] * acc;
  }
  return 0.5 * val;
}

double f_theorem1(double r) {
  if (!(r > 0.0)) throw DomainError("f_theorem1: r must be positive");
  return (r < 1.0) ? std::log(r) + 0.5 * r * r : 2.0 * r - 1.5;
}

double tau(double a) {
  if (!(a > 0.0)) throw DomainError("tau: a must be positive");
  return 0.5 * (a - 1.0 - std::log(a));
}

double psi_t(double beta, int n, double t) {
  if (!(beta > 1.0)) throw DomainError("psi_t: beta must exceed 1");
  return 0.5 * n * (3.0 * beta - 2.0 - std::log(beta) - t * (beta - 0.5));
}

ExclusionVerdict bound_theorem1(const OverlapMatrix& Q, const std::vector<double>& betas) {
  const int n = Q.n();
  if (static_cast<int>(betas.size()) != n)
    throw DomainError("bound_theorem1: betas must have n entries");
  for (double b : betas)
    if (!(b > 1.0)) throw DomainError("bound_theorem1: all betas must exceed 1");

  Matrix qt(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) qt(i, j) = std::sqrt(betas[i] * betas[j]) * Q(i, j);
  const auto eig = sym_eigen(qt);

  ExclusionVerdict v;
  v.margin_used = tol::exclusion_margin;
  v.trivial_sum = 0.0;
  for (double b : betas) v.trivial_sum += parisi::p2_closed_form(b);
  double bound = 0.0;
  bool degenerate = false;
  for (int j = 0; j < n; ++j) {
    if (eig.eigenvalues[j] <= 0.0) {
      degenerate = true;  // f -> -inf as r -> 0+
      continue;
    }
    bound += 0.5 * (f_theorem1(eig.eigenvalues[j]) - std::log(betas[j]));
  }
  v.bound = degenerate ? -std::numeric_limits<double>::infinity() : bound;
  v.excluded = degenerate || eig.eigenvalues.front() < 1.0 - v.margin_used;
  return v;
}

ExclusionVerdict ultrametricity_verdict(double beta) {
  if (!(beta > 1.0)) throw DomainError("ultrametricity_verdict: beta must exceed 1");
  const double q = 1.0 - 1.0 / beta;
  if (1.0 - 2.0 * q <= 0.0) {  // beta >= 2: the configuration is not realizable
    ExclusionVerdict v;
    v.bound = -std::numeric_limits<double>::infinity();
    v.trivial_sum = 3.0 * parisi::p2_closed_form(beta);
    v.excluded = true;
    v.margin_used = tol::exclusion_margin;
    v.reason = "not PSD";
    return v;
  }
  Matrix m(3, 0.0);
  m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
  m(0, 1) = m(1, 0) = q;
  m(0, 2) = m(2, 0) = q;
  m(1, 2) = m(2, 1) = -q;
  return bound_theorem1(OverlapMatrix(m), {beta, beta, beta});
}

double chaos_u0(const ModelSpec& m1, const ModelSpec& m2) {
  if (m1.p != 2 || m2.p != 2) throw DomainError("chaos_u0: p = 2 only");
  const auto s1 = parisi::solve_q_2spin(m1);
  const auto s2 = parisi::solve_q_2spin(m2);
  if (s1.trivial || s2.trivial)
    throw DomainError("chaos_u0: both models must be in the nontrivial phase");
  if (m1.h == 0.0 && m2.h == 0.0)
    throw BothFieldsZeroError("chaos_u0: undefined when both fields vanish");
  if (m1.h == 0.0 || m2.h == 0.0) return 0.0;
  const double prod = (1.0 - s1.q) * (1.0 - s2.q);
  const double den = 1.0 - m1.beta * m2.beta * prod;
  if (!(den > 0.0)) throw DomainError("chaos_u0: denominator not positive");
  return m1.h * m2.h * prod / den;
}

bool chaos_u0_in_window(const ModelSpec& m1, const ModelSpec& m2) {
  const double u0 = chaos_u0(m1, m2);
  const double q1 = parisi::solve_q_2spin(m1).q;
  const double q2 = parisi::solve_q_2spin(m2).q;
  return std::abs(u0) <= std::sqrt(q1 * q2) + 1e-12;
}

double coupled_field_bound_U(const ModelSpec& m1, const ModelSpec& m2, double u, double a1,
                             double a2, double lambda) {
  if (m1.p != 2 || m2.p != 2) throw DomainError("coupled_field_bound_U: p = 2 only");
  const double q1 = parisi::solve_q_2spin(m1).q;
  const double q2 = parisi::solve_q_2spin(m2).q;
  if (std::abs(u) > std::sqrt(q1 * q2) + 1e-12)
    throw DomainError("coupled_field_bound_U: |u| must not exceed sqrt(q1 q2)");
  const double det = a1 * a2 - lambda * lambda;
  if (!(det > 0.0)) throw DomainError("coupled_field_bound_U: a1 a2 - lambda^2 must be positive");
  const double b1 = m1.beta, b2 = m2.beta, h1 = m1.h, h2 = m2.h;
  return 0.5 * b1 * b1 * (1.0 - q1) * (1.0 - q1) + 0.5 * b2 * b2 * (1.0 - q2) * (1.0 - q2) +
         a1 + a2 - 2.0 + 2.0 * lambda * u - std::log(det) +
         (a2 * (b1 * b1 * q1 + h1 * h1) + a1 * (b2 * b2 * q2 + h2 * h2) -
          2.0 * (b1 * b2 * u + h1 * h2) * lambda) /
             det;
}

double coupled_field_dlambda(const ModelSpec& m1, const ModelSpec& m2, double u, double a1,
                             double a2, double lambda, double step) {
  return (coupled_field_bound_U(m1, m2, u, a1, a2, lambda + step) -
          coupled_field_bound_U(m1, m2, u, a1, a2, lambda - step)) /
         (2.0 * step);
}

double pspin_m0(const ModelSpec& m1, const ModelSpec& m2) {
  const CriticalPair cp = critical_pair(m1, m2);
  return 1.0 / (1.0 / cp.c1.m + 1.0 / cp.c2.m);
}

double pspin_coupled_U(const ModelSpec& m1, const ModelSpec& m2, double c, double m) {
  if (!(c >= 0.0 && c <= 1.0)) throw DomainError("pspin_coupled_U: c must lie in [0, 1]");
  if (!(m > 0.0)) throw DomainError("pspin_coupled_U: m must be positive");
  const CriticalPair cp = critical_pair(m1, m2);
  const int p = m1.p;
  const double q1 = cp.c1.q, q2 = cp.c2.q, mm1 = cp.c1.m, mm2 = cp.c2.m;
  const double bb1 = cp.b1, bb2 = cp.b2;
  const double be1 = m1.beta, be2 = m2.beta;
  const double cp1 = std::pow(c, p - 1), cpp = std::pow(c, p);

  double head = 0.0;
  head += -be1 * be1 * (theta(m1, 1.0) - theta(m1, q1)) +
          be1 * be1 * (xi_prime(m1, 1.0) - xi_prime(m1, q1)) + bb1 - 1.0 - std::log(bb1);
  head += -be2 * be2 * (theta(m2, 1.0) - theta(m2, q2)) +
          be2 * be2 * (xi_prime(m2, 1.0) - xi_prime(m2, q2)) + bb2 - 1.0 - std::log(bb2);

  const double cross_theta = entry_theta(p, std::sqrt(q1 * q2));
  const double block_i =
      -(mm1 * be1 * be1 * theta(m1, q1) + mm2 * be2 * be2 * theta(m2, q2)) * (1.0 - cpp) -
      m * (be1 * be1 * theta(m1, q1) + be2 * be2 * theta(m2, q2) + 2.0 * be1 * be2 * cross_theta) *
          cpp;

  const double den1 = bb1 - mm1 * be1 * be1 * xi_prime(m1, q1) * (1.0 - cp1);
  const double den2 = bb2 - mm2 * be2 * be2 * xi_prime(m2, q2) * (1.0 - cp1);
  const double s = be1 * be1 * xi_prime(m1, q1) * cp1 / den1 +
                   be2 * be2 * xi_prime(m2, q2) * cp1 / den2;
  const double block_ii =
      -checked_log(1.0 - mm1 * be1 * be1 * xi_prime(m1, q1) * (1.0 - cp1) / bb1,
                   "pspin_coupled_U") /
          mm1 -
      checked_log(1.0 - mm2 * be2 * be2 * xi_prime(m2, q2) * (1.0 - cp1) / bb2,
                  "pspin_coupled_U") /
          mm2 -
      checked_log(1.0 - m * s, "pspin_coupled_U") / m;

  return head + block_i + block_ii;
}

double pspin_coupled_U_reduced(const ModelSpec& m1, const ModelSpec& m2, double c, double m) {
  if (!(c >= 0.0 && c <= 1.0)) throw DomainError("pspin_coupled_U_reduced: c must lie in [0, 1]");
  if (!(m > 0.0)) throw DomainError("pspin_coupled_U_reduced: m must be positive");
  const CriticalPair cp = critical_pair(m1, m2);
  const int p = m1.p;
  const double del = cp.c1.delta, gam = cp.c1.gamma;  // depend on p only
  const double inv_sum = 1.0 / cp.c1.m + 1.0 / cp.c2.m;
  const double cp1 = std::pow(c, p - 1), cpp = std::pow(c, p);

  double head = 0.0;
  for (const auto* side : {&cp.c1, &cp.c2}) {
    const ModelSpec& md = (side == &cp.c1) ? m1 : m2;
    const double q = side->q, b = 1.0 / (1.0 - q), be = md.beta;
    head += -be * be * (theta(md, 1.0) - theta(md, q)) +
            be * be * (xi_prime(md, 1.0) - xi_prime(md, q)) + b - 1.0 - std::log(b);
  }
  const double block_i = -inv_sum * gam * (1.0 - cpp) - m * inv_sum * inv_sum * gam * cpp;
  const double base = 1.0 - del * (1.0 - cp1);
  const double block_ii =
      -inv_sum * checked_log(base, "pspin_coupled_U_reduced") -
      checked_log(1.0 - m * inv_sum * del * cp1 / base, "pspin_coupled_U_reduced") / m;
  return head + block_i + block_ii;
}

double pspin_dc(const ModelSpec& m1, const ModelSpec& m2, double c) {
  if (!(c >= 0.0 && c <= 1.0)) throw DomainError("pspin_dc: c must lie in [0, 1]");
  const CriticalPair cp = critical_pair(m1, m2);
  const int p = m1.p;
  const double x = cp.c1.x, gam = cp.c1.gamma;
  const double m0 = 1.0 / (1.0 / cp.c1.m + 1.0 / cp.c2.m);
  const double cp1 = std::pow(c, p - 1), cpp = std::pow(c, p);
  return (-gam * cpp - std::log1p(x * cp1) + x * cp1) / (m0 * m0);
}

double pspin_tail_U(const ModelSpec& model, double u, double n_param, double a) {
  const parisi::PspinCritical c = parisi::pspin_critical(model);
  const double q = c.q, m = c.m;
  if (!(u > q && u <= 1.0)) throw DomainError("pspin_tail_U: need q < u <= 1");
  if (!(n_param >= m - 1e-9 && n_param <= 2.0 + 1e-9))
    throw DomainError("pspin_tail_U: need m <= n <= 2");
  const double b2 = model.beta * model.beta;
  const double gap = b2 * (xi_prime(model, u) - xi_prime(model, q));
  const double a_mid = a - n_param * gap;
  const double a_low = a_mid - m * b2 * xi_prime(model, q);
  if (!(a > 0.0)) throw DomainError("pspin_tail_U: a must be positive");
  return -b2 * (theta(model, 1.0) - theta(model, u)) -
         n_param * b2 * (theta(model, u) - theta(model, q)) - m * b2 * theta(model, q) +
         b2 * (xi_prime(model, 1.0) - xi_prime(model, u)) + a - 1.0 - std::log(a) -
         checked_log(a_mid / a, "pspin_tail_U") / n_param -
         checked_log(a_low / a_mid, "pspin_tail_U") / m;
}

double pspin_tail_a0(const ModelSpec& model, double u) {
  const parisi::PspinCritical c = parisi::pspin_critical(model);
  const double b2 = model.beta * model.beta;
  return 1.0 / (1.0 - c.q) + b2 * (xi_prime(model, u) - xi_prime(model, c.q));
}

double pspin_tail_d(const ModelSpec& model, double u) {
  const parisi::PspinCritical c = parisi::pspin_critical(model);
  const double q = c.q, m = c.m;
  if (!(u >= q && u <= 1.0)) throw DomainError("pspin_tail_d: need q <= u <= 1");
  const double b2 = model.beta * model.beta;
  const double g = b2 * (xi_prime(model, u) - xi_prime(model, q)) * (1.0 - q);
  const double denom = 1.0 - m * b2 * xi_prime(model, q) * (1.0 - q);
  return -b2 * (theta(model, u) - theta(model, q)) + (1.0 - 1.0 / m) * g +
         (g / m) / denom - std::log1p(g);
}

Lemma4Result lemma4_value(const Matrix& Q, const Matrix& Delta0) {
  const int n = Q.n();
  if (Delta0.n() != n) throw DomainError("lemma4_value: dimension mismatch");
  if (max_asymmetry(Q) > tol::sym || max_asymmetry(Delta0) > tol::sym)
    throw DomainError("lemma4_value: inputs must be symmetric");
  if (!(min_eigenvalue(Q) > 0.0)) throw DomainError("lemma4_value: Q must be positive definite");
  if (!psd_check(Delta0)) throw DomainError("lemma4_value: Delta0 must be nonnegative definite");

  auto objective = [&](const Matrix& a) -> double {
    if (!(min_eigenvalue(a) > 0.0)) return std::numeric_limits<double>::infinity();
    const Matrix ai = inverse_spd(a);
    return 0.5 * (trace(matmul(a, Q)) + trace(matmul(ai, Delta0)) - n - logdet_pd(a));
  };
  // gradient of the objective is (Q - A^{-1} - A^{-1} Delta0 A^{-1})/2
  auto residual = [&](const Matrix& a) {
    const Matrix ai = inverse_spd(a);
    return Q - ai - matmul(ai, matmul(Delta0, ai));
  };

  const Matrix qinv = inverse_spd(Q);
  Matrix a = qinv;
  double fa = objective(a);
  const double target = 1e-11;
  bool converged = false;
  for (int it = 0; it < tol::iter_budget; ++it) {
    const Matrix res = residual(a);
    if (max_abs(res) <= target) {
      converged = true;
      break;
    }
    // fixed-point proposal A <- sym(Q^{-1} + Delta0 A^{-1} Q^{-1})
    const Matrix t = matmul(Delta0, matmul(inverse_spd(a), qinv));
    Matrix prop = qinv + 0.5 * (t + transpose(t));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) prop(i, j) = prop(j, i) = 0.5 * (prop(i, j) + prop(j, i));

    Matrix dir = prop - a;
    bool accepted = false;
    for (int half = 0; half < 40 && !accepted; ++half) {
      const double alpha = std::pow(0.5, half);
      const Matrix cand = a + alpha * dir;
      const double fc = objective(cand);
      if (fc < fa - 1e-16) {
        a = cand;
        fa = fc;
        accepted = true;
      }
    }
    if (!accepted) {
      // steepest descent on the same objective
      dir = -1.0 * res;
      for (int half = 0; half < 60 && !accepted; ++half) {
        const double alpha = std::pow(0.5, half);
        const Matrix cand = a + alpha * dir;
        const double fc = objective(cand);
        if (fc < fa - 1e-18) {
          a = cand;
          fa = fc;
          accepted = true;
        }
      }
    }
    if (!accepted) break;
  }
  if (!converged && max_abs(residual(a)) > target) {
    // last resort: simplex on the upper-triangular coordinates
    const int dims = n * (n + 1) / 2;
    auto unpack = [&](const std::vector<double>& z) {
      Matrix m(n);
      int t = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          m(i, j) = m(j, i) = z[t++];
        }
      return m;
    };
    std::vector<double> z0(dims);
    int t = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) z0[t++] = a(i, j);
    auto f = [&](const std::vector<double>& z) { return objective(unpack(z)); };
    const auto zbest = detail::nelder_mead(f, z0, 1e-3, 20000, 1e-16);
    const Matrix cand = unpack(zbest);
    if (objective(cand) < fa) {
      a = cand;
      fa = objective(cand);
    }
  }
  if (max_abs(residual(a)) > tol::grad)
    throw NoConvergenceError("lemma4_value: stationarity not reached");
  return Lemma4Result{fa, a};
}

}  // namespace glasskit::bounds
