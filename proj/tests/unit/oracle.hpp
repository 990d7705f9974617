#pragma once

// Reference computations used by the tests. They deliberately avoid the
// library's own quadrature and special-function paths.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int n = 20000) {
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Simpson on [a, b] after splitting at the given interior points, with a
/// sqrt-substitution near a to tame integrable endpoint behaviour.
inline double simpson_split(const std::function<double(double)>& f,
                            std::vector<double> cuts, int n = 20000) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    // u = a + (b - a) s^2 puts more nodes near a.
    total += simpson([&](double s) { return f(a + (b - a) * s * s) * 2.0 * s * (b - a); }, 0.0,
                     1.0, n);
  }
  return total;
}

/// int_0^inf u^{r-1} (e^{tu} - 1) e^{-u/s} du times 2 (both half-lines).
inline double symexp_exp_moment(double scale, double t, double r) {
  const double a = 1.0 / scale;
  return 2.0 * std::tgamma(r) * (std::pow(a - t, -r) - std::pow(a, -r));
}

inline double gamma_exp_moment(double rate, double shape, double t, double r) {
  return shape * std::tgamma(r) * (std::pow(rate - t, -r) - std::pow(rate, -r));
}

/// -log E exp(-X^2) for X ~ Laplace(1): -log int_0^inf e^{-x^2 - x} dx.
inline double laplace_l() {
  return -std::log(simpson([](double x) { return std::exp(-x * x - x); }, 0.0, 12.0, 200000));
}

/// Poisson(mean) probability mass, by recurrence.
inline std::vector<double> poisson_pmf(double mean, int kmax) {
  std::vector<double> pmf(kmax + 1);
  pmf[0] = std::exp(-mean);
  for (int k = 1; k <= kmax; ++k) pmf[k] = pmf[k - 1] * mean / k;
  return pmf;
}

/// -log E exp(-(a N + drift)^2), N ~ Poisson(lambda).
inline double poisson_l(double lambda, double a, double drift = 0.0) {
  const auto pmf = poisson_pmf(lambda, 200);
  double s = 0.0;
  for (int k = 0; k <= 200; ++k) {
    const double x = a * k + drift;
    s += pmf[k] * std::exp(-x * x);
  }
  return -std::log(s);
}

/// E|a N + drift|^q, N ~ Poisson(lambda).
inline double poisson_abs_moment(double lambda, double a, double drift, double q) {
  const auto pmf = poisson_pmf(lambda, 300);
  double s = 0.0;
  for (int k = 0; k <= 300; ++k) s += pmf[k] * std::pow(std::fabs(a * k + drift), q);
  return s;
}

/// P(N >= k) for N ~ Poisson(lambda), summed from the far tail.
inline double poisson_sf(double lambda, int k) {
  if (k <= 0) return 1.0;
  const auto pmf = poisson_pmf(lambda, 400);
  double s = 0.0;
  for (int j = 400; j >= k; --j) s += pmf[j];
  return s;
}

/// Small deterministic generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  double log_uniform(double a, double b) {
    return std::exp(uniform(std::log(a), std::log(b)));
  }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }
  std::uint64_t bits() { return rng_(); }

 private:
  std::mt19937_64 rng_;
};

}  // namespace oracle
