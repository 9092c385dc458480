#pragma once

#include <vector>

#include "glasskit/model.hpp"

namespace glasskit::parisi {

/// k-level replica-symmetry-breaking scheme: weights m_0..m_k with
/// 0 = m_0 <= ... <= m_k = 1, overlaps q_0..q_{k+1} nondecreasing in [0, 1]
/// with q_{k+1} = 1, and a parameter b > 0 used only by the (1.3)-style form.
struct RsbScheme {
  int k = 1;
  std::vector<double> m;  // size k + 1
  std::vector<double> q;  // size k + 2
  double b = 0.0;

  void validate() const;
};

enum class Form { Parisi13 = 13, CrisantiSommers14 = 14 };

/// Single-system free-energy functional, log-determinant style form.  Inverse
/// temperature enters by the beta^2 xi substitution.  DomainError if any
/// D_l = b - d_l fails to be positive.
double eval_parisi_13(const ModelSpec& model, const RsbScheme& scheme);

/// Crisanti-Sommers form of the same functional.  DomainError if any delta_l
/// appearing in a logarithm or denominator fails to be positive.
double eval_cs_14(const ModelSpec& model, const RsbScheme& scheme);

struct MinimizeResult {
  RsbScheme scheme;
  double value;
};

/// Minimize the chosen form over feasible k-level schemes (k in {1, 2}).
/// Derivative-free search with ordering constraints; the winner satisfies
/// projected first-order stationarity within tol::grad.
MinimizeResult minimize_parisi(const ModelSpec& model, int k, Form form);

/// 2-spin self-overlap.  trivial marks the h = 0, beta <= 1 branch (q = 0).
struct QSolution {
  double q;
  bool trivial;
};

/// For h = 0 returns 1 - 1/beta (beta > 1) or the trivial tag; for h != 0 the
/// unique root in (0, 1) of h^2 + beta^2 q = q / (1-q)^2, sign-scanned over a
/// 10^4-point grid.  MultipleRootsError if more than one crossing shows up.
QSolution solve_q_2spin(const ModelSpec& model);

/// Unique positive root of 1/p = (1+x)/x^2 log(1+x) - 1/x.  Returns 0 for
/// p = 2 (the boundary limit).
double solve_x(int p);

/// Critical data of the p-spin 2-RSB functional at h = 0:
/// x solves the p-equation, delta = x/(1+x), gamma = ((p-1)/p) x^2/(1+x), and
/// (q, m) is the stationary pair with qm = x(1-q).
struct PspinCritical {
  double x;
  double delta;
  double gamma;
  double q;
  double m;
};

/// Stationary (q, m) for p >= 4, h = 0 in the nontrivial phase.  Candidate
/// roots of beta^2 q^{p-2} (1-q)^2 (1+x) = 1 are lifted to (q, m) pairs and
/// the functional value breaks ties.  TrivialPhaseError in the trivial phase,
/// NoRootError when no admissible candidate exists.
PspinCritical pspin_critical(const ModelSpec& model);

/// true iff sup over s in [0, 1) of beta^2 xi(s) + log(1-s) + s is <= tol::zero.
/// The sup is always >= 0 (s = 0 contributes exactly 0).
bool check_trivial_phase(const ModelSpec& model);

/// Closed form (2 beta - 3/2 - log beta)/2, valid for p = 2, h = 0, beta > 1.
double p2_closed_form(double beta);

/// Replica-symmetric value at overlap q for p = 2:
/// (h^2(1-q) + q/(1-q) + log(1-q) + beta^2 (xi(1) - xi(q)))/2.
double rs_value(const ModelSpec& model, double q);

/// Limiting free energy of a single system: p = 2 via the replica-symmetric
/// value at the solved q; p >= 4 (h = 0) via the critical-point assembly, or
/// beta^2 xi(1)/2 in the trivial phase.
double free_energy(const ModelSpec& model);

}  // namespace glasskit::parisi
