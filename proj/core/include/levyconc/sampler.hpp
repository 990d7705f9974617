#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "levyconc/levy_measure.hpp"
#include "levyconc/rate_functions.hpp"

namespace levyconc {

struct SamplerOptions {
  /// Worker threads; 0 picks std::thread::hardware_concurrency(). Results do
  /// not depend on this value.
  std::size_t threads = 0;
  /// Two-sided confidence of every interval the sampler reports.
  double confidence = 0.99;
};

/// Rows per chunk. Each chunk draws from its own generator, seeded from
/// (master seed, chunk index, stream tag).
inline constexpr std::size_t kChunkRows = 4096;

/// Independent child seed for sub-stream (a, b) of a master seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

struct SampleBatch {
  std::vector<double> values;  // row-major n x d
  std::size_t n = 0;
  std::size_t d = 0;
  std::uint64_t seed = 0;
  double z = 1.0;

  double at(std::size_t row, std::size_t col) const { return values[row * d + col]; }
};

/// n draws of drift * z + (jumps of the process up to time z).
SampleBatch sample_marginal(const LevyMeasure1D& m, double z, std::size_t n,
                            std::uint64_t seed, double drift = 0.0,
                            const SamplerOptions& opts = {});

SampleBatch sample_vector(const IDVectorSpec& spec, std::size_t n, std::uint64_t seed,
                          const SamplerOptions& opts = {});

/// ||X||_p of n draws of X, without materialising the n x d array.
std::vector<double> sample_norms(const IDVectorSpec& spec, double p, std::size_t n,
                                 std::uint64_t seed, const SamplerOptions& opts = {});

/// Sample mean with a two-sided CLT interval.
Estimate mean_estimate(std::span<const double> xs, std::string quantity, std::uint64_t seed,
                       double confidence);

Estimate estimate_norm_expectation(const IDVectorSpec& spec, double p, std::size_t n,
                                   std::uint64_t seed, const SamplerOptions& opts = {});

/// -log E exp(-X_1^2). Analytic for drift-free symmetric exponential and for
/// Poisson atoms with any drift; Monte Carlo otherwise (interval mapped through
/// -log, so lower l comes from the upper mean).
Estimate estimate_l(const LevyMeasure1D& m, double drift, std::size_t n, std::uint64_t seed,
                    const SamplerOptions& opts = {});

/// E|X_1|^q. Analytic for drift-free symmetric exponential and gamma laws and
/// for Poisson atoms; Monte Carlo otherwise.
Estimate estimate_abs_moment(const LevyMeasure1D& m, double drift, double q, std::size_t n,
                             std::uint64_t seed, const SamplerOptions& opts = {});

/// E X_1^2 = int u^2 nu + (drift + int u nu)^2.
Estimate second_moment(const LevyMeasure1D& m, double drift);

struct ModifiedMoments {
  Estimate mod_m_p_lower;
  Estimate mod_m_2p_upper;
  /// z at which the infimum / supremum was attained.
  double z_inf = 0.0;
  double z_sup = 0.0;
  /// Per-z estimates: (z, E|Y+ + Z+|^p, E|Y- + Z-|^p).
  std::vector<std::tuple<double, Estimate, Estimate>> per_z;
  /// Set when the lower modified moment is zero.
  std::string hint;
};

/// Evenly spaced points on [0, 1], endpoints included.
std::vector<double> default_z_grid(std::size_t points = 21);

ModifiedMoments estimate_modified_moments(const LevyMeasure1D& m, double drift, double p,
                                          std::span<const double> z_grid, std::size_t n,
                                          std::uint64_t seed, const SamplerOptions& opts = {});

/// Fills every moment a family needs (analytic where available).
MomentSet estimate_moments(const IDVectorSpec& spec, double p, std::size_t n,
                           std::uint64_t seed, const SamplerOptions& opts = {},
                           bool with_modified = false);

struct TailEstimate {
  std::vector<double> x_grid;
  std::vector<double> p_hat;
  std::vector<double> ci_low;
  std::vector<double> ci_high;
  std::vector<std::size_t> count;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double p = 2.0;
  double centering = 0.0;
  double confidence = 0.99;
  /// Intervals hold simultaneously over the grid (Bonferroni).
  bool simultaneous = true;
  /// kUpper counts norm >= centering + x, kLower counts norm <= centering - x.
  Direction direction = Direction::kUpper;
};

/// Two-sided Clopper-Pearson interval for k successes out of n.
std::pair<double, double> clopper_pearson(std::size_t k, std::size_t n, double confidence);

/// Fraction of norms with norm >= centering + x (upper) or
/// norm <= centering - x (lower) for every x.
TailEstimate tail_from_norms(std::span<const double> norms, double p,
                             std::span<const double> x_grid, double centering,
                             std::uint64_t seed, double confidence, bool simultaneous = true,
                             Direction direction = Direction::kUpper);

TailEstimate empirical_tail(const IDVectorSpec& spec, double p, std::span<const double> x_grid,
                            std::size_t n, std::uint64_t seed, double centering,
                            const SamplerOptions& opts = {}, bool simultaneous = true,
                            Direction direction = Direction::kUpper);

/// Approximation used to simulate a custom density: jumps with |u| > delta are
/// drawn from a tabulated law, smaller ones replaced by their mean.
struct CompoundPoissonApprox {
  double delta = 0.0;
  double large_rate = 0.0;
  double small_mean = 0.0;
  double discarded_variance = 0.0;
  double total_variance = 0.0;
  std::vector<double> cell_lo;
  std::vector<double> cell_hi;
  std::vector<double> cell_cdf;  // cumulative probability through each cell

  double approx_variance() const;
  double draw_jump(double uniform01, double uniform01_b) const;
};

CompoundPoissonApprox compound_poisson_approximation(const LevyMeasure1D& m,
                                                     double rel_variance = 1e-6);

}  // namespace levyconc
