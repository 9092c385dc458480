#include "glasskit/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace glasskit::mc {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                            std::uint64_t c) {
  std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                   static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                   static_cast<std::uint32_t>(c), 0x9e3779b9u};
  return std::mt19937_64(sq);
}

struct Stats {
  double mean = 0.0, var = 0.0;
};

Stats mean_var(const std::vector<double>& x) {
  Stats s;
  if (x.empty()) return s;
  s.mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double acc = 0.0;
  for (double v : x) acc += (v - s.mean) * (v - s.mean);
  s.var = x.size() > 1 ? acc / (x.size() - 1) : 0.0;
  return s;
}

// batch-means effective sample size of one series
double effective_size(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  if (n < 10) return n;
  const int nb = std::min(20, n / 5);
  const int len = n / nb;
  std::vector<double> bm(nb);
  for (int b = 0; b < nb; ++b) {
    double acc = 0.0;
    for (int i = 0; i < len; ++i) acc += x[b * len + i];
    bm[b] = acc / len;
  }
  const Stats sx = mean_var(x);
  const Stats sb = mean_var(bm);
  if (sb.var <= 0.0) return n;
  const double se2 = sb.var / nb;
  return std::min<double>(n, sx.var / se2);
}

Histogram build_histogram(const std::vector<double>& samples, double width) {
  Histogram h;
  h.width = width > 0 ? width : 0.02;
  h.lo = -1.0;
  const int nb = std::max(1, static_cast<int>(std::ceil(2.0 / h.width)));
  h.mass.assign(nb, 0.0);
  if (samples.empty()) return h;
  for (double v : samples) {
    int bin = static_cast<int>(std::floor((v - h.lo) / h.width));
    bin = std::clamp(bin, 0, nb - 1);
    h.mass[bin] += 1.0;
  }
  for (double& m : h.mass) m /= samples.size();
  return h;
}

}  // namespace

void McConfig::validate() const {
  if (N < 16) throw DomainError("McConfig: N must be >= 16");
  if (!(sweeps > burn_in && burn_in >= 0)) throw DomainError("McConfig: sweeps > burn_in >= 0");
  if (replicas < 1) throw DomainError("McConfig: replicas must be >= 1");
  if (thin < 1) throw DomainError("McConfig: thin must be >= 1");
  if (!(epsilon > 0.0)) throw DomainError("McConfig: epsilon must be positive");
}

double Histogram::mode() const {
  int best = 0;
  for (int i = 1; i < static_cast<int>(mass.size()); ++i)
    if (mass[i] > mass[best]) best = i;
  return center(best);
}

double Histogram::mass_in(double a, double b) const {
  if (b < a) std::swap(a, b);
  double acc = 0.0;
  for (int i = 0; i < static_cast<int>(mass.size()); ++i) {
    const double blo = lo + i * width, bhi = blo + width;
    const double ov = std::max(0.0, std::min(b, bhi) - std::max(a, blo));
    acc += mass[i] * (ov / width);
  }
  return acc;
}

Matrix goe_coupling(int n, std::uint64_t seed) {
  if (n < 2) throw DomainError("goe_coupling: n must be >= 2");
  auto rng = make_stream(seed, 0x60e, 0, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = normal(rng);
  Matrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = 0.5 * (g(i, j) + g(j, i));
  return m;
}

DisorderSample sample_disorder(int n, std::uint64_t seed) {
  const Matrix m = goe_coupling(n, seed);
  auto eig = sym_eigen_rr(m);
  DisorderSample d;
  d.n = n;
  d.seed = seed;
  d.eigenvalues = std::move(eig.eigenvalues);
  d.rotation = std::move(eig.rotation);
  d.field_weights.assign(n, 0.0);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += d.rotation(k, i);
    d.field_weights[k] = acc;
  }
  return d;
}

Chain::Chain(const DisorderSample& disorder, const ModelSpec& model, std::uint64_t stream)
    : dis_(&disorder),
      model_(model),
      rng_(make_stream(stream, 0xc4a1, disorder.seed, 1)),
      energy_scale_(model.beta / (std::sqrt(2.0) * std::sqrt(static_cast<double>(disorder.n)))) {
  if (model_.p != 2) throw DomainError("Chain: p = 2 only");
  const int n = dis_->n;
  std::normal_distribution<double> normal(0.0, 1.0);
  s_.resize(n);
  double norm2 = 0.0;
  for (double& v : s_) {
    v = normal(rng_);
    norm2 += v * v;
  }
  const double scale = std::sqrt(n / norm2);
  for (double& v : s_) v *= scale;
}

void Chain::sweep() {
  const int n = dis_->n;
  std::uniform_int_distribution<int> pick_i(0, n - 1);
  std::uniform_int_distribution<int> pick_j(0, n - 2);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& lam = dis_->eigenvalues;
  const auto& w = dis_->field_weights;
  const double h = model_.h;
  for (int step = 0; step < n; ++step) {
    const int i = pick_i(rng_);
    int j = pick_j(rng_);
    if (j >= i) ++j;
    const double phi = angle(rng_);
    const double c = std::cos(phi), sn = std::sin(phi);
    const double si = s_[i], sj = s_[j];
    const double ni = c * si + sn * sj;
    const double nj = -sn * si + c * sj;
    double dlog = energy_scale_ * (lam[i] * (ni * ni - si * si) + lam[j] * (nj * nj - sj * sj));
    if (h != 0.0) dlog += h * (w[i] * (ni - si) + w[j] * (nj - sj));
    ++proposed_;
    if (dlog >= 0.0 || unit(rng_) < std::exp(dlog)) {
      s_[i] = ni;
      s_[j] = nj;
      ++accepted_;
    }
  }
}

void Chain::run(int sweeps) {
  for (int t = 0; t < sweeps; ++t) sweep();
}

double Chain::hamiltonian() const {
  const int n = dis_->n;
  double acc = 0.0;
  for (int k = 0; k < n; ++k) acc += dis_->eigenvalues[k] * s_[k] * s_[k];
  return acc / (std::sqrt(2.0) * std::sqrt(static_cast<double>(n)));
}

double Chain::overlap(const Chain& other) const {
  const int n = dis_->n;
  double acc = 0.0;
  for (int k = 0; k < n; ++k) acc += s_[k] * other.s_[k];
  return acc / n;
}

double Chain::acceptance_rate() const {
  return proposed_ ? static_cast<double>(accepted_) / proposed_ : 0.0;
}

namespace {

struct ReplicateSamples {
  std::vector<double> cross;  // thinned cross overlaps, one per record step
};

// Runs the two chains of replicate r and records thinned cross overlaps.
ReplicateSamples run_replicate(const ModelSpec& m1, const ModelSpec& m2, const McConfig& cfg,
                               int r) {
  const DisorderSample dis = sample_disorder(cfg.N, cfg.seed + 0x1000003ULL * (r + 1));
  Chain a(dis, m1, cfg.seed * 0x100000001b3ULL + 2 * r);
  Chain b(dis, m2, cfg.seed * 0x100000001b3ULL + 2 * r + 1);
  a.run(cfg.burn_in);
  b.run(cfg.burn_in);
  const int nrec = (cfg.sweeps - cfg.burn_in) / cfg.thin;
  ReplicateSamples out;
  out.cross.reserve(nrec);
  for (int t = 0; t < nrec; ++t) {
    a.run(cfg.thin);
    b.run(cfg.thin);
    out.cross.push_back(a.overlap(b));
  }
  return out;
}

}  // namespace

McEstimate estimate_overlap_moments(const ModelSpec& model1, const ModelSpec& model2,
                                    const McConfig& config, int moment, ExecMode mode,
                                    std::vector<OverlapTrace>* trace) {
  config.validate();
  if (model1.p != 2 || model2.p != 2)
    throw DomainError("estimate_overlap_moments: p = 2 only");
  if (moment < 1) throw DomainError("estimate_overlap_moments: moment must be >= 1");

  const int reps = config.replicas;
  std::vector<ReplicateSamples> out(reps);
  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < reps; ++r) out[r] = run_replicate(model1, model2, config, r);
  } else {
    for (int r = 0; r < reps; ++r) out[r] = run_replicate(model1, model2, config, r);
  }

  std::vector<double> all;
  std::vector<double> rep_means(reps, 0.0);
  double n_eff = 0.0;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> powed(out[r].cross.size());
    for (std::size_t t = 0; t < out[r].cross.size(); ++t)
      powed[t] = std::pow(out[r].cross[t], moment);
    rep_means[r] = mean_var(powed).mean;
    n_eff += effective_size(powed);
    all.insert(all.end(), out[r].cross.begin(), out[r].cross.end());
    if (trace)
      for (std::size_t t = 0; t < out[r].cross.size(); ++t)
        trace->push_back({config.burn_in + static_cast<int>(t + 1) * config.thin, r,
                          out[r].cross[t]});
  }
  if (n_eff < 100.0)
    throw ChainTooShortError("estimate_overlap_moments: effective sample size below 100");

  McEstimate e;
  e.mean = mean_var(rep_means).mean;
  if (reps >= 2) {
    e.std_error = std::sqrt(mean_var(rep_means).var / reps);
  } else {
    std::vector<double> powed(all.size());
    for (std::size_t t = 0; t < all.size(); ++t) powed[t] = std::pow(all[t], moment);
    const Stats s = mean_var(powed);
    e.std_error = std::sqrt(s.var / std::max(1.0, effective_size(powed)));
  }
  e.n_eff = n_eff;
  e.histogram = build_histogram(all, config.epsilon);
  return e;
}

namespace {

struct Lemma2Samples {
  double lhs = 0.0, e1 = 0.0, e2 = 0.0;
};

Lemma2Samples run_lemma2_replicate(const ModelSpec& m1, const ModelSpec& m2,
                                   const McConfig& cfg, int k_power, int r) {
  const DisorderSample dis = sample_disorder(cfg.N, cfg.seed + 0x1000003ULL * (r + 1));
  Chain a1(dis, m1, cfg.seed * 0x100000001b3ULL + 4 * r);
  Chain a2(dis, m1, cfg.seed * 0x100000001b3ULL + 4 * r + 1);
  Chain b1(dis, m2, cfg.seed * 0x100000001b3ULL + 4 * r + 2);
  Chain b2(dis, m2, cfg.seed * 0x100000001b3ULL + 4 * r + 3);
  for (Chain* c : {&a1, &a2, &b1, &b2}) c->run(cfg.burn_in);
  const int nrec = (cfg.sweeps - cfg.burn_in) / cfg.thin;
  double lhs = 0.0, e1 = 0.0, e2 = 0.0;
  for (int t = 0; t < nrec; ++t) {
    for (Chain* c : {&a1, &a2, &b1, &b2}) c->run(cfg.thin);
    const double r11 = std::pow(a1.overlap(b1), k_power);
    const double r12 = std::pow(a1.overlap(b2), k_power);
    const double r21 = std::pow(a2.overlap(b1), k_power);
    const double r22 = std::pow(a2.overlap(b2), k_power);
    lhs += 0.25 * (r11 + r12 + r21 + r22);
    e1 += std::pow(a1.overlap(a2), k_power);
    e2 += std::pow(b1.overlap(b2), k_power);
  }
  return {lhs / nrec, e1 / nrec, e2 / nrec};
}

}  // namespace

Lemma2Result lemma2_check(const ModelSpec& model1, const ModelSpec& model2,
                          const McConfig& config, int k_power, ExecMode mode) {
  config.validate();
  if (model1.p != 2 || model2.p != 2) throw DomainError("lemma2_check: p = 2 only");
  if (k_power < 2 || k_power % 2 != 0)
    throw DomainError("lemma2_check: k must be even and >= 2");
  const int reps = config.replicas;
  std::vector<Lemma2Samples> out(reps);
  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < reps; ++r)
      out[r] = run_lemma2_replicate(model1, model2, config, k_power, r);
  } else {
    for (int r = 0; r < reps; ++r)
      out[r] = run_lemma2_replicate(model1, model2, config, k_power, r);
  }
  std::vector<double> lhs(reps), rhs(reps);
  for (int r = 0; r < reps; ++r) {
    lhs[r] = out[r].lhs;
    rhs[r] = std::sqrt(std::max(0.0, out[r].e1 * out[r].e2));
  }
  const int total = reps * ((config.sweeps - config.burn_in) / config.thin);
  if (total < 100) throw ChainTooShortError("lemma2_check: too few recorded samples");
  Lemma2Result res;
  res.lhs = mean_var(lhs).mean;
  res.rhs = mean_var(rhs).mean;
  if (reps >= 2) {
    res.lhs_se = std::sqrt(mean_var(lhs).var / reps);
    res.rhs_se = std::sqrt(mean_var(rhs).var / reps);
  }
  return res;
}

}  // namespace glasskit::mc
