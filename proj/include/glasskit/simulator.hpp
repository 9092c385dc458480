#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "glasskit/matrix.hpp"
#include "glasskit/model.hpp"

namespace glasskit::mc {

/// One realization of the 2-spin disorder after exact diagonalization.
/// eigenvalues is the ascending spectrum of (G + G^T)/2 for iid standard
/// Gaussian G; rotation is the orthogonal O with M = O^T diag O, kept so the
/// field term sum_i sigma_i = (O 1) . s is exact in rotated coordinates.
struct DisorderSample {
  int n = 0;
  std::vector<double> eigenvalues;
  Matrix rotation;
  std::vector<double> field_weights;  // O * ones
  std::uint64_t seed = 0;
};

struct McConfig {
  int N = 400;
  int sweeps = 20000;
  int burn_in = 5000;
  int replicas = 8;  // independent disorder samples
  std::uint64_t seed = 1;
  double epsilon = 0.02;  // overlap histogram bin width
  int thin = 10;

  void validate() const;
};

struct Histogram {
  double lo = -1.0;
  double width = 0.02;
  std::vector<double> mass;  // normalized to total 1

  double center(int bin) const { return lo + (bin + 0.5) * width; }
  double mode() const;
  double mass_in(double a, double b) const;  // uniform-within-bin convention
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double n_eff = 0.0;
  Histogram histogram;
};

enum class ExecMode { Serial, Parallel };

/// Symmetrized Gaussian coupling matrix (G + G^T)/2, deterministic in seed.
Matrix goe_coupling(int n, std::uint64_t seed);

/// Draw and diagonalize one disorder realization.
DisorderSample sample_disorder(int n, std::uint64_t seed);

/// Metropolis chain on the sphere of radius sqrt(N) in rotated coordinates.
/// One update picks a random 2-plane (coordinate pair), proposes a rotation
/// angle uniform on (-pi, pi], and accepts with the Metropolis ratio of
/// exp(beta H + h sum_i sigma_i); one sweep = N pair updates.
class Chain {
 public:
  Chain(const DisorderSample& disorder, const ModelSpec& model, std::uint64_t stream);

  void sweep();
  void run(int sweeps);
  const std::vector<double>& state() const { return s_; }
  /// H_N(sigma) in spectral form: sum_k lambda_k s_k^2 / (sqrt(2) sqrt(N)).
  double hamiltonian() const;
  double overlap(const Chain& other) const;
  double acceptance_rate() const;

 private:
  const DisorderSample* dis_;
  ModelSpec model_;
  std::vector<double> s_;
  std::mt19937_64 rng_;
  double energy_scale_;  // beta / (sqrt(2) sqrt(N))
  long proposed_ = 0, accepted_ = 0;
};

struct OverlapTrace {
  int sweep;
  int pair;  // disorder replicate index
  double overlap;
};

/// Cross-overlap moment estimate for two systems sharing each disorder draw
/// (model1 == model2 gives the single-model two-replica case).  Averages over
/// config.replicas independent disorder samples; replicate fan-out runs
/// serial or OpenMP-parallel with bit-identical results.
/// ChainTooShortError if the pooled effective sample size is below 100.
McEstimate estimate_overlap_moments(const ModelSpec& model1, const ModelSpec& model2,
                                    const McConfig& config, int moment = 2,
                                    ExecMode mode = ExecMode::Parallel,
                                    std::vector<OverlapTrace>* trace = nullptr);

struct Lemma2Result {
  double lhs = 0.0, rhs = 0.0;
  double lhs_se = 0.0, rhs_se = 0.0;
};

/// Cauchy-Schwarz moment comparison: lhs = E<R^k> across the two systems,
/// rhs = sqrt(E<R^k>_1 E<R^k>_2) within each, all chains sharing disorder.
Lemma2Result lemma2_check(const ModelSpec& model1, const ModelSpec& model2,
                          const McConfig& config, int k_power,
                          ExecMode mode = ExecMode::Parallel);

}  // namespace glasskit::mc
