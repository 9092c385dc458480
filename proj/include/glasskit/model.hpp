#pragma once

#include <cmath>

#include "glasskit/errors.hpp"

namespace glasskit {

// Shared numeric contracts.  All matrices handled by the bound modules are
// O(1)-scaled and at most 16x16, so absolute tolerances are used throughout.
namespace tol {
inline constexpr double sym = 1e-12;        // admissible matrix asymmetry
inline constexpr double psd = 1e-10;        // smallest-eigenvalue slack
inline constexpr double recon = 1e-10;      // eigendecomposition reconstruction
inline constexpr double root = 1e-12;       // scalar root residual
inline constexpr double identity = 1e-10;   // algebraic identity residual
inline constexpr double grad = 1e-6;        // first-order stationarity
inline constexpr double zero = 1e-12;       // sup <= 0 decision slack
inline constexpr int iter_budget = 10000;
// A configuration is declared excluded only when its verdict quantity clears
// this margin, so verdicts are reproducible despite the strict inequalities
// in the underlying statements.
inline constexpr double exclusion_margin = 1e-8;
}  // namespace tol

/// Pure p-spin spherical model: interaction order p (even, >= 2), inverse
/// temperature beta > 0, external field h.  The covariance function is
/// xi(q) = q^p / p with theta(q) = q xi'(q) - xi(q).
struct ModelSpec {
  int p;
  double beta;
  double h;

  ModelSpec(int p_, double beta_, double h_ = 0.0) : p(p_), beta(beta_), h(h_) {
    if (p < 2 || p % 2 != 0) throw DomainError("ModelSpec: p must be even and >= 2");
    if (!(beta > 0.0)) throw DomainError("ModelSpec: beta must be positive");
  }
};

inline double xi(const ModelSpec& m, double q) { return std::pow(q, m.p) / m.p; }

inline double xi_prime(const ModelSpec& m, double q) { return std::pow(q, m.p - 1); }

/// theta(q) = q xi'(q) - xi(q) = (1 - 1/p) q^p.
inline double theta(const ModelSpec& m, double q) {
  return (1.0 - 1.0 / m.p) * std::pow(q, m.p);
}

}  // namespace glasskit
