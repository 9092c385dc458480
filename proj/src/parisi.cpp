#include "glasskit/parisi.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "optimize.hpp"

namespace glasskit::parisi {

namespace {

constexpr double kQMax = 1.0 - 1e-9;  // keeps 1 - q away from the log singularity
constexpr double kTinyWeight = 1e-12;

// 2-RSB functional at h = 0, q_1 = 0: the displayed two-parameter form.
double two_rsb_value(const ModelSpec& model, double q, double m) {
  const double b2 = model.beta * model.beta;
  return 0.5 * (b2 * xi(model, 1.0) + (m - 1.0) * b2 * xi(model, q) +
                (1.0 - 1.0 / m) * std::log1p(-q) + (1.0 / m) * std::log(1.0 - q * (1.0 - m)));
}

}  // namespace

void RsbScheme::validate() const {
  if (k < 1) throw DomainError("RsbScheme: k must be >= 1");
  if (static_cast<int>(m.size()) != k + 1 || static_cast<int>(q.size()) != k + 2)
    throw DomainError("RsbScheme: m needs k+1 entries and q needs k+2");
  if (std::abs(m.front()) > 1e-15 || std::abs(m.back() - 1.0) > 1e-12)
    throw DomainError("RsbScheme: m_0 = 0 and m_k = 1 required");
  for (int l = 0; l < k; ++l)
    if (m[l] > m[l + 1] + 1e-15) throw DomainError("RsbScheme: m must be nondecreasing");
  if (std::abs(q.back() - 1.0) > 1e-12) throw DomainError("RsbScheme: q_{k+1} = 1 required");
  for (std::size_t l = 0; l < q.size(); ++l) {
    if (q[l] < -1e-15 || q[l] > 1.0 + 1e-15) throw DomainError("RsbScheme: q must lie in [0, 1]");
    if (l > 0 && q[l] < q[l - 1] - 1e-15)
      throw DomainError("RsbScheme: q must be nondecreasing");
  }
}

double eval_parisi_13(const ModelSpec& model, const RsbScheme& s) {
  s.validate();
  if (!(s.b > 0.0)) throw DomainError("eval_parisi_13: b must be positive");
  const int k = s.k;
  const double b2 = model.beta * model.beta;

  std::vector<double> xp(k + 2);
  for (int l = 0; l <= k + 1; ++l) xp[l] = xi_prime(model, s.q[l]);

  // d_l = sum_{l <= p <= k} m_p beta^2 (xi'(q_{p+1}) - xi'(q_p)), D_l = b - d_l
  std::vector<double> d(k + 2, 0.0);
  for (int l = k; l >= 1; --l) d[l] = d[l + 1] + s.m[l] * b2 * (xp[l + 1] - xp[l]);
  std::vector<double> dd(k + 2);
  for (int l = 1; l <= k + 1; ++l) {
    dd[l] = s.b - d[l];
    if (!(dd[l] > 0.0)) throw DomainError("eval_parisi_13: D_l must be positive");
  }

  double val = s.b - 1.0 - std::log(s.b) + (model.h * model.h + b2 * xp[1]) / dd[1];
  for (int l = 1; l <= k; ++l) {
    const double gap = b2 * (xp[l + 1] - xp[l]);
    val += (s.m[l] > kTinyWeight) ? std::log(dd[l + 1] / dd[l]) / s.m[l] : gap / dd[l + 1];
    val -= s.m[l] * b2 * (theta(model, s.q[l + 1]) - theta(model, s.q[l]));
  }
  return 0.5 * val;
}

double eval_cs_14(const ModelSpec& model, const RsbScheme& s) {
  s.validate();
  const int k = s.k;
  const double b2 = model.beta * model.beta;

  // delta_l = sum_{l <= p <= k} m_p (q_{p+1} - q_p)
  std::vector<double> del(k + 2, 0.0);
  for (int l = k; l >= 1; --l) del[l] = del[l + 1] + s.m[l] * (s.q[l + 1] - s.q[l]);
  for (int l = 1; l <= k; ++l)
    if (!(del[l] > 0.0)) throw DomainError("eval_cs_14: delta_l must be positive");

  double val = model.h * model.h * del[1] + s.q[1] / del[1] + std::log(del[k]);
  for (int l = 1; l <= k - 1; ++l)
    val += (s.m[l] > kTinyWeight) ? std::log(del[l] / del[l + 1]) / s.m[l]
                                  : (s.q[l + 1] - s.q[l]) / del[l + 1];
  for (int l = 1; l <= k; ++l)
    val += s.m[l] * b2 * (xi(model, s.q[l + 1]) - xi(model, s.q[l]));
  return 0.5 * val;
}

MinimizeResult minimize_parisi(const ModelSpec& model, int k, Form form) {
  if (k < 1 || k > 2) throw DomainError("minimize_parisi: k must be 1 or 2");
  const int dim = (k == 1) ? 1 : 3;  // (q1) or (q1, q2, m1)

  auto build = [&](const std::vector<double>& z, double b) {
    RsbScheme s;
    s.k = k;
    if (k == 1) {
      s.m = {0.0, 1.0};
      s.q = {0.0, z[0], 1.0};
    } else {
      s.m = {0.0, z[2], 1.0};
      s.q = {0.0, z[0], z[1], 1.0};
    }
    s.b = b;
    return s;
  };

  auto feasible = [&](const std::vector<double>& z) {
    if (k == 1) return z[0] >= 0.0 && z[0] <= kQMax;
    return z[0] >= 0.0 && z[0] <= z[1] && z[1] <= kQMax && z[2] >= 0.0 && z[2] <= 1.0;
  };

  auto d1_of = [&](const RsbScheme& s) {
    const double b2 = model.beta * model.beta;
    double d = 0.0;
    for (int l = 1; l <= k; ++l)
      d += s.m[l] * b2 * (xi_prime(model, s.q[l + 1]) - xi_prime(model, s.q[l]));
    return d;
  };

  auto value_at = [&](const std::vector<double>& z, double* b_out) -> double {
    if (!feasible(z)) return 1e100;
    try {
      if (form == Form::CrisantiSommers14) {
        if (b_out) *b_out = 0.0;
        return eval_cs_14(model, build(z, 1.0));
      }
      // nest the b-minimization: D_1 > 0 bounds b from below by d_1
      const RsbScheme probe = build(z, 1.0);
      const double lo = d1_of(probe) + 1e-10;
      const double hi = lo + 7.0 + model.h * model.h +
                        model.beta * model.beta * (xi_prime(model, 1.0) + 1.0);
      auto fb = [&](double b) {
        try {
          return eval_parisi_13(model, build(z, b));
        } catch (const DomainError&) {
          return 1e100;
        }
      };
      const double b = detail::golden_min(fb, lo, hi);
      if (b_out) *b_out = b;
      return fb(b);
    } catch (const DomainError&) {
      return 1e100;
    }
  };
  auto value = [&](const std::vector<double>& z) { return value_at(z, nullptr); };

  // coarse feasible-grid start
  std::vector<double> best;
  double fbest = 1e100;
  if (k == 1) {
    for (int i = 0; i <= 64; ++i) {
      const std::vector<double> z{kQMax * i / 64.0};
      const double f = value(z);
      if (f < fbest) {
        fbest = f;
        best = z;
      }
    }
  } else {
    for (int i2 = 1; i2 <= 32; ++i2) {
      const double q2 = kQMax * i2 / 32.0;
      for (const double q1 : {0.0, 0.25 * q2, 0.5 * q2, q2}) {
        for (int im = 1; im <= 16; ++im) {
          const std::vector<double> z{q1, q2, im / 16.0};
          const double f = value(z);
          if (f < fbest) {
            fbest = f;
            best = z;
          }
        }
      }
    }
    best = detail::nelder_mead(value, best, 0.02, 4000);
  }

  auto bracket = [&](int j, const std::vector<double>& z) -> std::pair<double, double> {
    if (k == 1) return {0.0, kQMax};
    if (j == 0) return {0.0, z[1]};
    if (j == 1) return {z[0], kQMax};
    return {0.0, 1.0};
  };

  // cyclic golden refinement on the free coordinates
  double fcur = value(best);
  for (int round = 0; round < 100; ++round) {
    const double before = fcur;
    for (int j = 0; j < dim; ++j) {
      auto z = best;
      const auto [lo, hi] = bracket(j, z);
      auto f1 = [&](double t) {
        z[j] = t;
        return value(z);
      };
      const double t = detail::golden_min(f1, lo, hi);
      z[j] = t;
      const double f = value(z);
      if (f < fcur) {
        fcur = f;
        best = z;
      }
    }
    if (before - fcur < 1e-15) break;
  }
  if (fcur >= 1e99) throw NoConvergenceError("minimize_parisi: no feasible point found");

  // projected first-order stationarity on each coordinate
  const double step = 1e-6;
  for (int j = 0; j < dim; ++j) {
    const auto [lo, hi] = bracket(j, best);
    const double x = best[j];
    auto fd = [&](double t) {
      auto z = best;
      z[j] = t;
      return value(z);
    };
    const bool at_lo = x - lo < 1e-7, at_hi = hi - x < 1e-7;
    double g;
    if (at_lo)
      g = (fd(std::min(x + step, hi)) - fd(x)) / step;
    else if (at_hi)
      g = (fd(x) - fd(x - step)) / step;
    else
      g = (fd(x + step) - fd(x - step)) / (2.0 * step);
    const bool ok = (at_lo && g >= -tol::grad) || (at_hi && g <= tol::grad) ||
                    std::abs(g) <= tol::grad;
    if (!ok) throw NoConvergenceError("minimize_parisi: stationarity not reached");
  }

  double bopt = 0.0;
  const double fval = value_at(best, &bopt);
  return MinimizeResult{build(best, bopt), fval};
}

QSolution solve_q_2spin(const ModelSpec& model) {
  if (model.p != 2) throw DomainError("solve_q_2spin: p = 2 only");
  const double beta = model.beta, h = model.h;
  if (h == 0.0) {
    if (beta <= 1.0) return {0.0, true};
    return {1.0 - 1.0 / beta, false};
  }
  auto phi = [&](double q) {
    const double r = 1.0 - q;
    return h * h + beta * beta * q - q / (r * r);
  };
  const int grid = 10000;
  const double hi = 1.0 - 1e-9;
  int crossings = 0;
  double blo = 0.0, bhi = hi;
  double prev = phi(0.0);
  for (int i = 1; i <= grid; ++i) {
    const double q = hi * i / grid;
    const double cur = phi(q);
    if (prev > 0.0 && cur <= 0.0) {
      ++crossings;
      blo = hi * (i - 1) / grid;
      bhi = q;
    } else if (prev <= 0.0 && cur > 0.0) {
      ++crossings;  // re-entry would contradict uniqueness just as well
    }
    prev = cur;
  }
  if (crossings > 1) throw MultipleRootsError("solve_q_2spin: more than one sign change");
  if (crossings == 0) throw NoRootError("solve_q_2spin: no sign change on (0, 1)");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (blo + bhi);
    if (phi(mid) > 0.0)
      blo = mid;
    else
      bhi = mid;
  }
  return {0.5 * (blo + bhi), false};
}

double solve_x(int p) {
  if (p < 2 || p % 2 != 0) throw DomainError("solve_x: p must be even and >= 2");
  if (p == 2) return 0.0;  // boundary: the right-hand side tends to 1/2 as x -> 0+
  auto r = [&](double x) { return (1.0 + x) / (x * x) * std::log1p(x) - 1.0 / x - 1.0 / p; };
  double lo = 1e-6, hi = 100.0;
  while (r(hi) > 0.0) hi *= 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (r(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

bool check_trivial_phase(const ModelSpec& model) {
  if (model.h != 0.0) throw DomainError("check_trivial_phase: defined for h = 0");
  const double b2 = model.beta * model.beta;
  auto phi = [&](double s) { return b2 * xi(model, s) + std::log1p(-s) + s; };
  const int grid = 10000;
  const double hi = 1.0 - 1e-9;
  double smax = 0.0, fmax = 0.0;  // s = 0 contributes exactly 0
  for (int i = 0; i <= grid; ++i) {
    const double s = hi * i / grid;
    const double f = phi(s);
    if (f > fmax) {
      fmax = f;
      smax = s;
    }
  }
  const double lo = std::max(0.0, smax - hi / grid);
  const double up = std::min(hi, smax + hi / grid);
  const double refined = detail::golden_min([&](double s) { return -phi(s); }, lo, up);
  fmax = std::max(fmax, phi(refined));
  return fmax <= tol::zero;
}

PspinCritical pspin_critical(const ModelSpec& model) {
  if (model.p < 4 || model.p % 2 != 0)
    throw DomainError("pspin_critical: p must be even and >= 4");
  if (model.h != 0.0) throw DomainError("pspin_critical: defined for h = 0");
  if (check_trivial_phase(model))
    throw TrivialPhaseError("pspin_critical: model is in the trivial phase");

  const int p = model.p;
  const double x = solve_x(p);
  const double delta = x / (1.0 + x);
  const double gamma = (p - 1.0) / p * x * x / (1.0 + x);
  const double b2 = model.beta * model.beta;

  // reduced scalar equation: beta^2 q^{p-2} (1-q)^2 (1+x) = 1
  auto g = [&](double q) {
    return b2 * std::pow(q, p - 2) * (1.0 - q) * (1.0 - q) * (1.0 + x) - 1.0;
  };
  const int grid = 10000;
  std::vector<double> roots;
  double prev = g(1e-12);
  for (int i = 1; i <= grid; ++i) {
    const double q = static_cast<double>(i) / grid * kQMax;
    const double cur = g(q);
    if ((prev < 0.0 && cur >= 0.0) || (prev >= 0.0 && cur < 0.0)) {
      double lo = kQMax * (i - 1) / grid, hi = q;
      double flo = prev;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = g(mid);
        if ((flo < 0.0) == (fm < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev = cur;
  }

  double qbest = -1.0, mbest = -1.0, fbest = 1e100;
  for (const double q : roots) {
    double m = x * (1.0 - q) / q;
    if (m > 1.0 && m < 1.0 + 1e-9) m = 1.0;
    if (!(m > 0.0 && m <= 1.0)) continue;
    const double f = two_rsb_value(model, q, m);
    if (f < fbest) {
      fbest = f;
      qbest = q;
      mbest = m;
    }
  }
  if (qbest < 0.0)
    throw NoRootError("pspin_critical: no admissible (q, m) candidate");

  // stationarity of the displayed two-parameter functional
  const double q = qbest, m = mbest;
  const double r1 = b2 * xi_prime(model, q) -
                    (1.0 / m) * (1.0 / (1.0 - q) - 1.0 / (1.0 - q + m * q));
  const double r2 = b2 * xi(model, q) -
                    (std::log((1.0 - q + q * m) / (1.0 - q)) / (m * m) -
                     (q / m) / (1.0 - q + q * m));
  if (std::abs(r1) > tol::identity || std::abs(r2) > tol::identity)
    throw NoConvergenceError("pspin_critical: critical-point residual too large");

  return PspinCritical{x, delta, gamma, q, m};
}

double p2_closed_form(double beta) {
  if (!(beta > 1.0)) throw DomainError("p2_closed_form: beta must exceed 1");
  return 0.5 * (2.0 * beta - 1.5 - std::log(beta));
}

double rs_value(const ModelSpec& model, double q) {
  if (model.p != 2) throw DomainError("rs_value: p = 2 only");
  if (!(q >= 0.0 && q < 1.0)) throw DomainError("rs_value: q must lie in [0, 1)");
  const double b2 = model.beta * model.beta;
  return 0.5 * (model.h * model.h * (1.0 - q) + q / (1.0 - q) + std::log1p(-q) +
                b2 * (xi(model, 1.0) - xi(model, q)));
}

double free_energy(const ModelSpec& model) {
  if (model.p == 2) {
    const QSolution s = solve_q_2spin(model);
    return rs_value(model, s.q);
  }
  if (model.h != 0.0) throw DomainError("free_energy: p >= 4 requires h = 0");
  if (check_trivial_phase(model))
    return 0.5 * model.beta * model.beta * xi(model, 1.0);
  const PspinCritical c = pspin_critical(model);
  const double b2 = model.beta * model.beta;
  const double b = 1.0 / (1.0 - c.q);
  const double two_p = b2 * xi_prime(model, 1.0) - b2 * xi_prime(model, c.q) + b - 1.0 -
                       std::log(b) - std::log1p(-c.delta) / c.m - c.gamma / c.m -
                       b2 * (theta(model, 1.0) - theta(model, c.q));
  return 0.5 * two_p;
}

}  // namespace glasskit::parisi
