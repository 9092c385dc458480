#pragma once

#include <string>
#include <vector>

#include "glasskit/matrix.hpp"
#include "glasskit/model.hpp"

namespace glasskit::bounds {

/// Outcome of comparing a coupled-replica bound against the sum of
/// single-system free energies.  A structural reason ("not PSD") marks
/// configurations that are geometrically impossible rather than merely
/// energetically suppressed.
struct ExclusionVerdict {
  double bound = 0.0;
  double trivial_sum = 0.0;
  bool excluded = false;
  double margin_used = 0.0;
  std::string reason;
};

/// Input to the interpolation bound: constraint Q plays the top matrix of the
/// sequence, Qseq holds Q^1..Q^k (Q^0 = 0 implicit), A is the top recursion
/// matrix, and m_1 < ... < m_k = 1.
struct BoundInput {
  int p = 2;
  OverlapMatrix Q;
  std::vector<double> betas;
  std::vector<double> hs;
  std::vector<double> m;
  std::vector<Matrix> Qseq;
  Matrix A;
};

/// Right side of the interpolation bound, halved so it bounds F rather than
/// 2F, with the vanishing remainder dropped.  DomainError if some increment
/// matrix fails nonnegative definiteness or some A_l fails positive
/// definiteness.
double guerra_bound(const BoundInput& input);

/// log r + r^2/2 on (0, 1], 2r - 3/2 on [1, oo); continuously differentiable
/// at r = 1.  DomainError for r <= 0.
double f_theorem1(double r);

/// tau(a) = (a - 1 - log a)/2, a > 0.
double tau(double a);

/// (n/2)(3 beta - 2 - log beta - t (beta - 1/2)); equals n P(beta) at t = 1.
double psi_t(double beta, int n, double t);

/// Eigenvalue bound for coupled 2-spin systems at h = 0: rescale Q by
/// sqrt(beta_j beta_j'), take eigenvalues r_j, and compare
/// sum_j (f(r_j) - log beta_j)/2 against sum_j P(beta_j).  The verdict is
/// spectral: excluded iff min_j r_j < 1 - margin.
ExclusionVerdict bound_theorem1(const OverlapMatrix& Q, const std::vector<double>& betas);

/// Three equal-temperature replicas in the lone overlap configuration that
/// could break ultrametricity: [[1,q,q],[q,1,-q],[q,-q,1]] with q = 1 - 1/beta.
/// For beta >= 2 the matrix is not positive definite and the verdict reports
/// that instead.  Requires beta > 1.
ExclusionVerdict ultrametricity_verdict(double beta);

/// Concentration value of the cross overlap of two 2-spin systems.  Zero if
/// exactly one field vanishes; BothFieldsZeroError if both do.
double chaos_u0(const ModelSpec& m1, const ModelSpec& m2);

/// Numeric report of whether u0 lies in the window |u| <= sqrt(q1 q2) the
/// analysis covers (equality holds for identical parameter pairs).
bool chaos_u0_in_window(const ModelSpec& m1, const ModelSpec& m2);

/// Two-system coupled-field bound at overlap u with replica-symmetric
/// parameters (a1, a2, lambda).  DomainError when a1 a2 - lambda^2 <= 0.
double coupled_field_bound_U(const ModelSpec& m1, const ModelSpec& m2, double u, double a1,
                             double a2, double lambda);

/// Central-difference lambda-derivative of the coupled-field bound.
double coupled_field_dlambda(const ModelSpec& m1, const ModelSpec& m2, double u, double a1,
                             double a2, double lambda, double step = 1e-5);

/// 1/m0 = 1/m1 + 1/m2 from the two critical weights (p >= 4, h = 0).
double pspin_m0(const ModelSpec& m1, const ModelSpec& m2);

/// Coupled p-spin bound U(m, c) at cross overlap |u| = c sqrt(q1 q2),
/// evaluated from the displayed block sums.
double pspin_coupled_U(const ModelSpec& m1, const ModelSpec& m2, double c, double m);

/// Same value through the critical-point simplifications; cross-check path.
double pspin_coupled_U_reduced(const ModelSpec& m1, const ModelSpec& m2, double c, double m);

/// Closed-form m-derivative of U(m, c) at m = m0 (the 1/m0^2 prefactor
/// included); vanishes at c = 0 and c = 1 and is negative between.
double pspin_dc(const ModelSpec& m1, const ModelSpec& m2, double c);

/// Second-regime p-spin bound U(n, a) for the overlap range u > q (two copies
/// at equal temperature).
double pspin_tail_U(const ModelSpec& model, double u, double n_param, double a);

/// a0(u) = 1/(1-q) + beta^2 (xi'(u) - xi'(q)); U(1, a0) recovers 2 P(beta).
double pspin_tail_a0(const ModelSpec& model, double u);

/// Closed-form n-derivative of U(n, a0) at n = 1; zero at u = q, negative for
/// u > q.
double pspin_tail_d(const ModelSpec& model, double u);

struct Lemma4Result {
  double value;
  Matrix minimizer;
};

/// inf over symmetric positive definite A of
///   (Tr(A Q) + Tr(A^{-1} Delta0) - n - log |A|)/2
/// for positive definite Q and nonnegative definite Delta0.  Damped fixed
/// point on the stationarity condition with gradient and Nelder-Mead
/// fallbacks; the objective is convex so the stationary point is global.
Lemma4Result lemma4_value(const Matrix& Q, const Matrix& Delta0);

}  // namespace glasskit::bounds
