#include "levyconc/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <thread>
#include <variant>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "levyconc/error.hpp"

namespace levyconc {

namespace {

using Rng = std::mt19937_64;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr std::uint64_t kTagVector = 1;
constexpr std::uint64_t kTagMarginal = 2;

Rng chunk_rng(std::uint64_t seed, std::uint64_t chunk, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32),
                    static_cast<std::uint32_t>(tag)};
  return Rng(seq);
}

std::size_t worker_count(const SamplerOptions& opts, std::size_t chunks) {
  std::size_t t = opts.threads;
  if (t == 0) t = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(t, chunks));
}

// Runs fn(chunk) for every chunk. Each chunk owns its output slot, so the
// result does not depend on scheduling.
template <class Fn>
void for_each_chunk(std::size_t n, const SamplerOptions& opts, Fn&& fn) {
  const std::size_t chunks = (n + kChunkRows - 1) / kChunkRows;
  const std::size_t workers = worker_count(opts, chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks || failed.load()) return;
      try {
        fn(c);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

double uniform01(Rng& rng) { return std::generate_canonical<double, 64>(rng); }

// Draws the pure-jump part of one coordinate at time z.
class JumpDrawer {
 public:
  explicit JumpDrawer(const LevyMeasure1D& m) : m_(m) {
    if (std::holds_alternative<CustomDensity>(m.family())) {
      approx_ = compound_poisson_approximation(m);
    }
    if (const auto* cp = std::get_if<CompoundPoisson>(&m.family())) {
      if (const auto* dj = std::get_if<DiscreteJumps>(&cp->jumps)) {
        double acc = 0.0;
        for (std::size_t i = 0; i < dj->values.size(); ++i) {
          acc += dj->probs[i];
          cdf_.push_back(acc);
          values_.push_back(dj->values[i]);
        }
        for (double& c : cdf_) c /= acc;
      }
    }
  }

  double operator()(Rng& rng, double z) const {
    return std::visit(
        Overloaded{
            [&](const SymmetricExponential& f) {
              std::gamma_distribution<double> g1(z, f.scale);
              const double a = g1(rng);
              std::gamma_distribution<double> g2(z, f.scale);
              return a - g2(rng);
            },
            [&](const GammaLevy& f) {
              std::gamma_distribution<double> g(z * f.shape, 1.0 / f.rate);
              return g(rng);
            },
            [&](const PoissonAtom& f) {
              std::poisson_distribution<long long> pois(z * f.intensity);
              return static_cast<double>(pois(rng)) * f.jump;
            },
            [&](const CompoundPoisson& f) {
              std::poisson_distribution<long long> pois(z * f.rate);
              const long long count = pois(rng);
              double s = 0.0;
              if (const auto* uj = std::get_if<UniformJumps>(&f.jumps)) {
                for (long long i = 0; i < count; ++i) s += uj->lo + (uj->hi - uj->lo) * uniform01(rng);
              } else {
                for (long long i = 0; i < count; ++i) {
                  const double u = uniform01(rng);
                  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
                  if (it == cdf_.end()) --it;
                  s += values_[static_cast<std::size_t>(it - cdf_.begin())];
                }
              }
              return s;
            },
            [&](const CustomDensity&) {
              std::poisson_distribution<long long> pois(z * approx_.large_rate);
              const long long count = pois(rng);
              double s = z * approx_.small_mean;
              for (long long i = 0; i < count; ++i) {
                const double u1 = uniform01(rng);
                const double u2 = uniform01(rng);
                s += approx_.draw_jump(u1, u2);
              }
              return s;
            }},
        m_.family());
  }

 private:
  LevyMeasure1D m_;
  CompoundPoissonApprox approx_;
  std::vector<double> cdf_;
  std::vector<double> values_;
};

struct GroupDrawer {
  JumpDrawer draw;
  double drift;
  std::size_t count;
};

std::vector<GroupDrawer> make_drawers(const IDVectorSpec& spec) {
  std::vector<GroupDrawer> out;
  for (const auto& g : spec.groups()) out.push_back({JumpDrawer(g.measure), g.drift, g.count});
  return out;
}

double z_quantile(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw ConfigError("confidence must lie in (0, 1)");
  }
  boost::math::normal_distribution<double> nd;
  return boost::math::quantile(nd, 1.0 - (1.0 - confidence) / 2.0);
}

Provenance mc_provenance(std::string quantity, std::uint64_t seed, std::size_t n,
                         double confidence) {
  Provenance p;
  p.quantity = std::move(quantity);
  p.source = Provenance::Source::kMonteCarlo;
  p.seed = seed;
  p.n = n;
  p.confidence = confidence;
  return p;
}

double poisson_log_pmf(double lambda, long long k) {
  return -lambda + static_cast<double>(k) * std::log(lambda) -
         std::lgamma(static_cast<double>(k) + 1.0);
}

// E phi(drift + a K) for K ~ Poisson(lambda), summed until the pmf is
// negligible beyond the mode.
template <class Phi>
double poisson_series(double lambda, double a, double drift, Phi&& phi) {
  const long long hi = static_cast<long long>(lambda + 40.0 * std::sqrt(lambda) + 60.0);
  double s = 0.0;
  for (long long k = 0; k <= hi; ++k) {
    s += std::exp(poisson_log_pmf(lambda, k)) * phi(drift + a * static_cast<double>(k));
  }
  return s;
}

// e^{a^2} erfc(a), stable for large a.
double scaled_erfc(double a) {
  if (a < 25.0) return std::exp(a * a) * std::erfc(a);
  const double inv = 1.0 / (a * a);
  return (1.0 - 0.5 * inv + 0.75 * inv * inv) / (a * std::sqrt(std::numbers::pi));
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  // splitmix64 over the combined words
  auto mix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return mix(mix(mix(seed) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

SampleBatch sample_marginal(const LevyMeasure1D& m, double z, std::size_t n,
                            std::uint64_t seed, double drift, const SamplerOptions& opts) {
  if (!(z > 0.0 && z <= 1.0)) throw DomainError("z must lie in (0, 1]");
  small_jump_first_moment(m);
  SampleBatch b;
  b.n = n;
  b.d = 1;
  b.seed = seed;
  b.z = z;
  b.values.resize(n);
  const JumpDrawer draw(m);
  for_each_chunk(n, opts, [&](std::size_t c) {
    Rng rng = chunk_rng(seed, c, kTagMarginal);
    const std::size_t end = std::min(n, (c + 1) * kChunkRows);
    for (std::size_t i = c * kChunkRows; i < end; ++i) b.values[i] = drift * z + draw(rng, z);
  });
  return b;
}

SampleBatch sample_vector(const IDVectorSpec& spec, std::size_t n, std::uint64_t seed,
                          const SamplerOptions& opts) {
  const std::size_t d = spec.dim();
  SampleBatch b;
  b.n = n;
  b.d = d;
  b.seed = seed;
  b.values.resize(n * d);
  const auto drawers = make_drawers(spec);
  for_each_chunk(n, opts, [&](std::size_t c) {
    Rng rng = chunk_rng(seed, c, kTagVector);
    const std::size_t end = std::min(n, (c + 1) * kChunkRows);
    for (std::size_t i = c * kChunkRows; i < end; ++i) {
      double* row = &b.values[i * d];
      for (const auto& g : drawers) {
        for (std::size_t k = 0; k < g.count; ++k) *row++ = g.drift + g.draw(rng, 1.0);
      }
    }
  });
  return b;
}

std::vector<double> sample_norms(const IDVectorSpec& spec, double p, std::size_t n,
                                 std::uint64_t seed, const SamplerOptions& opts) {
  if (!(p >= 1.0)) throw ConfigError("norm order p must be >= 1");
  std::vector<double> out(n);
  const auto drawers = make_drawers(spec);
  for_each_chunk(n, opts, [&](std::size_t c) {
    Rng rng = chunk_rng(seed, c, kTagVector);
    const std::size_t end = std::min(n, (c + 1) * kChunkRows);
    for (std::size_t i = c * kChunkRows; i < end; ++i) {
      double acc = 0.0;
      for (const auto& g : drawers) {
        for (std::size_t k = 0; k < g.count; ++k) {
          const double x = std::abs(g.drift + g.draw(rng, 1.0));
          acc += p == 2.0 ? x * x : std::pow(x, p);
        }
      }
      out[i] = p == 2.0 ? std::sqrt(acc) : std::pow(acc, 1.0 / p);
    }
  });
  return out;
}

Estimate mean_estimate(std::span<const double> xs, std::string quantity, std::uint64_t seed,
                       double confidence) {
  if (xs.size() < 2) throw ConfigError("need at least two samples for an interval");
  long double s = 0.0L;
  for (double x : xs) s += x;
  const long double mean = s / static_cast<long double>(xs.size());
  long double ss = 0.0L;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = static_cast<double>(ss / static_cast<long double>(xs.size() - 1));
  const double half = z_quantile(confidence) * std::sqrt(var / static_cast<double>(xs.size()));
  Estimate e;
  e.value = static_cast<double>(mean);
  e.lower = e.value - half;
  e.upper = e.value + half;
  e.provenance = mc_provenance(std::move(quantity), seed, xs.size(), confidence);
  return e;
}

Estimate estimate_norm_expectation(const IDVectorSpec& spec, double p, std::size_t n,
                                   std::uint64_t seed, const SamplerOptions& opts) {
  if (spec.dim() == 1) {
    // ||X||_p = |X_1| in one dimension.
    Estimate e = estimate_abs_moment(spec.coordinate(0), spec.drift(0), 1.0, n, seed, opts);
    e.provenance.quantity = "E_norm_p";
    return e;
  }
  const auto norms = sample_norms(spec, p, n, seed, opts);
  Estimate e = mean_estimate(norms, "E_norm_p", seed, opts.confidence);
  e.lower = std::max(e.lower, 0.0);
  return e;
}

Estimate estimate_l(const LevyMeasure1D& m, double drift, std::size_t n, std::uint64_t seed,
                    const SamplerOptions& opts) {
  if (const auto* f = std::get_if<SymmetricExponential>(&m.family()); f && drift == 0.0) {
    // E e^{-X^2} = (1/s) int_0^inf e^{-x^2 - x/s} dx = (sqrt(pi)/(2s)) e^{1/(4s^2)} erfc(1/(2s))
    const double a = 0.5 / f->scale;
    const double v = std::sqrt(std::numbers::pi) / (2.0 * f->scale) * scaled_erfc(a);
    return Estimate::analytic(-std::log(v), "l");
  }
  if (const auto* f = std::get_if<PoissonAtom>(&m.family())) {
    const double v = poisson_series(f->intensity, f->jump, drift,
                                    [](double x) { return std::exp(-x * x); });
    return Estimate::analytic(-std::log(v), "l");
  }
  const SampleBatch b = sample_marginal(m, 1.0, n, seed, drift, opts);
  std::vector<double> w(b.values.size());
  std::transform(b.values.begin(), b.values.end(), w.begin(),
                 [](double x) { return std::exp(-x * x); });
  const Estimate mean = mean_estimate(w, "E exp(-X_1^2)", seed, opts.confidence);
  Estimate e;
  e.value = -std::log(mean.value);
  e.lower = -std::log(std::min(mean.upper, 1.0));
  e.upper = mean.lower > 0.0 ? -std::log(mean.lower) : kInf;
  e.provenance = mean.provenance;
  e.provenance.quantity = "l";
  return e;
}

Estimate estimate_abs_moment(const LevyMeasure1D& m, double drift, double q, std::size_t n,
                             std::uint64_t seed, const SamplerOptions& opts) {
  if (!(q > 0.0)) throw ConfigError("moment order must be positive");
  const std::string name = "E|X_1|^" + [&] {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", q);
    return std::string(buf);
  }();
  if (drift == 0.0) {
    if (const auto* f = std::get_if<SymmetricExponential>(&m.family())) {
      return Estimate::analytic(std::tgamma(q + 1.0) * std::pow(f->scale, q), name);
    }
    if (const auto* f = std::get_if<GammaLevy>(&m.family())) {
      const double v =
          std::exp(std::lgamma(f->shape + q) - std::lgamma(f->shape)) * std::pow(f->rate, -q);
      return Estimate::analytic(v, name);
    }
  }
  if (const auto* f = std::get_if<PoissonAtom>(&m.family())) {
    const double v = poisson_series(f->intensity, f->jump, drift,
                                    [q](double x) { return std::pow(std::abs(x), q); });
    return Estimate::analytic(v, name);
  }
  const SampleBatch b = sample_marginal(m, 1.0, n, seed, drift, opts);
  std::vector<double> w(b.values.size());
  std::transform(b.values.begin(), b.values.end(), w.begin(),
                 [q](double x) { return std::pow(std::abs(x), q); });
  Estimate e = mean_estimate(w, name, seed, opts.confidence);
  e.lower = std::max(e.lower, 0.0);
  return e;
}

Estimate second_moment(const LevyMeasure1D& m, double drift) {
  const double mean = drift + jump_mean(m);
  return Estimate::analytic(poly_moment(m, 2.0) + mean * mean, "E_X1_sq");
}

std::vector<double> default_z_grid(std::size_t points) {
  if (points < 2) throw ConfigError("z grid needs at least two points");
  std::vector<double> z(points);
  for (std::size_t i = 0; i < points; ++i) {
    z[i] = static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return z;
}

ModifiedMoments estimate_modified_moments(const LevyMeasure1D& m, double drift, double p,
                                          std::span<const double> z_grid, std::size_t n,
                                          std::uint64_t seed, const SamplerOptions& opts) {
  if (!(p >= 1.0)) throw ConfigError("p must be >= 1");
  if (z_grid.empty()) throw ConfigError("z grid is empty");
  ModifiedMoments out;
  // (z, estimate) pairs feeding the infimum and the supremum.
  std::vector<std::pair<double, Estimate>> low_side, high_side;
  for (std::size_t i = 0; i < z_grid.size(); ++i) {
    const double z = z_grid[i];
    if (!(z >= 0.0 && z <= 1.0)) throw ConfigError("z grid points must lie in [0, 1]");
    std::vector<double> y(n, 0.0), zz(n, 0.0);
    if (z > 0.0) y = sample_marginal(m, z, n, derive_seed(seed, i, 0), drift, opts).values;
    if (z < 1.0) zz = sample_marginal(m, 1.0 - z, n, derive_seed(seed, i, 1), drift, opts).values;
    std::vector<double> pos_p(n), neg_p(n), pos_2p(n), neg_2p(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double plus = std::max(y[k], 0.0) + std::max(zz[k], 0.0);
      const double minus = std::min(y[k], 0.0) + std::min(zz[k], 0.0);
      pos_p[k] = std::pow(plus, p);
      neg_p[k] = std::pow(-minus, p);
      pos_2p[k] = pos_p[k] * pos_p[k];
      neg_2p[k] = neg_p[k] * neg_p[k];
    }
    const std::uint64_t s = derive_seed(seed, i, 0);
    const Estimate ep = mean_estimate(pos_p, "E|Y+ + Z+|^p", s, opts.confidence);
    const Estimate en = mean_estimate(neg_p, "E|Y- + Z-|^p", s, opts.confidence);
    out.per_z.emplace_back(z, ep, en);
    low_side.emplace_back(z, ep);
    low_side.emplace_back(z, en);
    high_side.emplace_back(z, mean_estimate(pos_2p, "E|Y+ + Z+|^2p", s, opts.confidence));
    high_side.emplace_back(z, mean_estimate(neg_2p, "E|Y- + Z-|^2p", s, opts.confidence));
  }
  // Interval for the min (max) of several means: componentwise min (max).
  out.mod_m_p_lower = low_side.front().second;
  out.z_inf = low_side.front().first;
  for (const auto& [z, e] : low_side) {
    if (e.value < out.mod_m_p_lower.value) out.z_inf = z;
    out.mod_m_p_lower.lower = std::min(out.mod_m_p_lower.lower, e.lower);
    out.mod_m_p_lower.value = std::min(out.mod_m_p_lower.value, e.value);
    out.mod_m_p_lower.upper = std::min(out.mod_m_p_lower.upper, e.upper);
  }
  out.mod_m_2p_upper = high_side.front().second;
  out.z_sup = high_side.front().first;
  for (const auto& [z, e] : high_side) {
    if (e.value > out.mod_m_2p_upper.value) out.z_sup = z;
    out.mod_m_2p_upper.lower = std::max(out.mod_m_2p_upper.lower, e.lower);
    out.mod_m_2p_upper.value = std::max(out.mod_m_2p_upper.value, e.value);
    out.mod_m_2p_upper.upper = std::max(out.mod_m_2p_upper.upper, e.upper);
  }
  out.mod_m_p_lower.lower = std::max(out.mod_m_p_lower.lower, 0.0);
  out.mod_m_p_lower.value = std::max(out.mod_m_p_lower.value, 0.0);
  out.mod_m_p_lower.provenance = mc_provenance("mod_m_p_lower", seed, n, opts.confidence);
  out.mod_m_2p_upper.provenance = mc_provenance("mod_m_2p_upper", seed, n, opts.confidence);
  if (!(out.mod_m_p_lower.lower > 0.0)) {
    out.mod_m_p_lower.lower = 0.0;
    out.hint = "modified moment vanishes; use the positive-case rate if coordinates are nonnegative";
  }
  return out;
}

MomentSet estimate_moments(const IDVectorSpec& spec, double p, std::size_t n,
                           std::uint64_t seed, const SamplerOptions& opts, bool with_modified) {
  MomentSet ms;
  ms.p = p;
  const auto& g = spec.groups().front();
  ms.E_norm_p = estimate_norm_expectation(spec, p, n, derive_seed(seed, 1), opts);
  ms.l = estimate_l(g.measure, g.drift, n, derive_seed(seed, 2), opts);
  ms.m_p = estimate_abs_moment(g.measure, g.drift, p, n, derive_seed(seed, 3), opts);
  ms.m_2p = estimate_abs_moment(g.measure, g.drift, 2.0 * p, n, derive_seed(seed, 4), opts);
  ms.E_X1_sq = second_moment(g.measure, g.drift);
  if (with_modified) {
    const auto z = default_z_grid();
    ModifiedMoments mm =
        estimate_modified_moments(g.measure, g.drift, p, z, n, derive_seed(seed, 5), opts);
    ms.mod_m_p_lower = mm.mod_m_p_lower;
    ms.mod_m_2p_upper = mm.mod_m_2p_upper;
  }
  return ms;
}

std::pair<double, double> clopper_pearson(std::size_t k, std::size_t n, double confidence) {
  if (n == 0 || k > n) throw ConfigError("clopper_pearson needs 0 <= k <= n, n > 0");
  const double alpha = 1.0 - confidence;
  const double kk = static_cast<double>(k), nn = static_cast<double>(n);
  const double lo = k == 0 ? 0.0 : boost::math::ibeta_inv(kk, nn - kk + 1.0, alpha / 2.0);
  const double hi = k == n ? 1.0 : boost::math::ibeta_inv(kk + 1.0, nn - kk, 1.0 - alpha / 2.0);
  return {lo, hi};
}

TailEstimate tail_from_norms(std::span<const double> norms, double p,
                             std::span<const double> x_grid, double centering,
                             std::uint64_t seed, double confidence, bool simultaneous,
                             Direction direction) {
  if (norms.empty()) throw ConfigError("no samples");
  if (!(confidence > 0.0 && confidence < 1.0)) throw ConfigError("confidence must lie in (0, 1)");
  for (std::size_t i = 1; i < x_grid.size(); ++i) {
    if (!(x_grid[i] > x_grid[i - 1])) throw ConfigError("x grid must be strictly increasing");
  }
  std::vector<double> sorted(norms.begin(), norms.end());
  std::sort(sorted.begin(), sorted.end());
  TailEstimate t;
  t.x_grid.assign(x_grid.begin(), x_grid.end());
  t.n = sorted.size();
  t.seed = seed;
  t.p = p;
  t.centering = centering;
  t.confidence = confidence;
  t.simultaneous = simultaneous;
  t.direction = direction;
  const double m = static_cast<double>(std::max<std::size_t>(1, x_grid.size()));
  const double level = simultaneous ? 1.0 - (1.0 - confidence) / m : confidence;
  for (double x : x_grid) {
    std::size_t k;
    if (direction == Direction::kUpper) {
      const auto it = std::lower_bound(sorted.begin(), sorted.end(), centering + x);
      k = static_cast<std::size_t>(sorted.end() - it);
    } else {
      const auto it = std::upper_bound(sorted.begin(), sorted.end(), centering - x);
      k = static_cast<std::size_t>(it - sorted.begin());
    }
    const auto [lo, hi] = clopper_pearson(k, t.n, level);
    t.count.push_back(k);
    t.p_hat.push_back(static_cast<double>(k) / static_cast<double>(t.n));
    t.ci_low.push_back(lo);
    t.ci_high.push_back(hi);
  }
  return t;
}

TailEstimate empirical_tail(const IDVectorSpec& spec, double p, std::span<const double> x_grid,
                            std::size_t n, std::uint64_t seed, double centering,
                            const SamplerOptions& opts, bool simultaneous,
                            Direction direction) {
  const auto norms = sample_norms(spec, p, n, seed, opts);
  return tail_from_norms(norms, p, x_grid, centering, seed, opts.confidence, simultaneous,
                         direction);
}

// ---- compound-Poisson approximation ----------------------------------------

double CompoundPoissonApprox::approx_variance() const {
  double prev = 0.0, second = 0.0;
  for (std::size_t i = 0; i < cell_cdf.size(); ++i) {
    const double w = cell_cdf[i] - prev;
    prev = cell_cdf[i];
    const double a = cell_lo[i], b = cell_hi[i];
    second += w * (a * a + a * b + b * b) / 3.0;
  }
  return large_rate * second;
}

double CompoundPoissonApprox::draw_jump(double u1, double u2) const {
  auto it = std::upper_bound(cell_cdf.begin(), cell_cdf.end(), u1);
  if (it == cell_cdf.end()) --it;
  const std::size_t c = static_cast<std::size_t>(it - cell_cdf.begin());
  return cell_lo[c] + u2 * (cell_hi[c] - cell_lo[c]);
}

CompoundPoissonApprox compound_poisson_approximation(const LevyMeasure1D& m,
                                                     double rel_variance) {
  using Gk = boost::math::quadrature::gauss_kronrod<double, 15>;
  if (!m.atoms().empty()) throw ConfigError("compound-Poisson approximation expects a density");
  for (const auto& piece : m.densities()) {
    if (!std::isfinite(piece.lo) || !std::isfinite(piece.hi)) {
      throw ConfigError("compound-Poisson approximation needs bounded support");
    }
  }
  small_jump_first_moment(m);  // throws on infinite variation

  auto integral = [&](auto&& f, double a, double b) {
    double s = 0.0;
    for (const auto& piece : m.densities()) {
      std::vector<double> cuts{a, b, 0.0};
      for (double c : piece.breakpoints) cuts.push_back(c);
      cuts.push_back(piece.lo);
      cuts.push_back(piece.hi);
      std::sort(cuts.begin(), cuts.end());
      const double lo = std::max(a, piece.lo), hi = std::min(b, piece.hi);
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double x0 = std::max(cuts[i], lo), x1 = std::min(cuts[i + 1], hi);
        if (!(x1 > x0)) continue;
        s += Gk::integrate([&](double u) { return u == 0.0 ? 0.0 : f(u) * piece.density(u); },
                           x0, x1, 10, 1e-12);
      }
    }
    return s;
  };
  auto sq = [](double u) { return u * u; };

  CompoundPoissonApprox a;
  a.total_variance = poly_moment(m, 2.0);
  const double R = support_radius(m);
  const double target = rel_variance * a.total_variance;
  double lo = std::log(R * 1e-12), hi = std::log(R);
  if (integral(sq, -std::exp(lo), std::exp(lo)) >= target) {
    throw NumericError("no truncation level meets the discarded-variance budget", rel_variance);
  }
  if (integral(sq, -R, R) < target) lo = hi;
  for (int it = 0; it < 100 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double dm = std::exp(mid);
    if (integral(sq, -dm, dm) < target) lo = mid; else hi = mid;
  }
  a.delta = std::exp(lo);
  a.discarded_variance = integral(sq, -a.delta, a.delta);
  a.small_mean = integral([](double u) { return u; }, -a.delta, a.delta);

  // Cells on [-R, -delta] and [delta, R], geometric when the segment spans
  // several orders of magnitude.
  constexpr std::size_t kCells = 2048;
  std::vector<double> masses;
  for (int side : {-1, 1}) {
    const double s0 = a.delta, s1 = R;
    if (!(s1 > s0)) continue;
    const bool geometric = s1 / s0 > 8.0;
    std::vector<double> edges(kCells + 1);
    for (std::size_t i = 0; i <= kCells; ++i) {
      const double f = static_cast<double>(i) / kCells;
      edges[i] = geometric ? s0 * std::pow(s1 / s0, f) : s0 + (s1 - s0) * f;
    }
    for (std::size_t i = 0; i < kCells; ++i) {
      double x0 = side * edges[i], x1 = side * edges[i + 1];
      if (x0 > x1) std::swap(x0, x1);
      const double mass = integral([](double) { return 1.0; }, x0, x1);
      if (mass <= 0.0) continue;
      a.cell_lo.push_back(x0);
      a.cell_hi.push_back(x1);
      masses.push_back(mass);
    }
  }
  double total = 0.0;
  for (double w : masses) {
    total += w;
    a.cell_cdf.push_back(total);
  }
  a.large_rate = total;
  if (total > 0.0) {
    for (double& c : a.cell_cdf) c /= total;
  }
  return a;
}

}  // namespace levyconc
