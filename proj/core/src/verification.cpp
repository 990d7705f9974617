#include "levyconc/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "levyconc/error.hpp"
#include "levyconc/rate_functions.hpp"

namespace levyconc {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double slack_of(double bound, double p_hat) {
  if (p_hat <= 0.0) return kInf;
  return std::log(bound / p_hat);
}

void finish(Report& r) {
  bool ok = true;
  for (const auto& row : r.rows) ok = ok && row.pass;
  r.verdict = ok ? Verdict::kPass : Verdict::kFail;
}

// P(K >= k) and P(K <= k) for K ~ Poisson(lambda).
double poisson_upper(double lambda, long long k) {
  if (k <= 0) return 1.0;
  return boost::math::gamma_p(static_cast<double>(k), lambda);
}
double poisson_lower(double lambda, long long k) {
  if (k < 0) return 0.0;
  return boost::math::gamma_q(static_cast<double>(k) + 1.0, lambda);
}

double poisson_pmf(double lambda, long long k) {
  if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(-lambda + static_cast<double>(k) * std::log(lambda) -
                  std::lgamma(static_cast<double>(k) + 1.0));
}

long long poisson_cutoff(double lambda) {
  return static_cast<long long>(lambda + 30.0 * std::sqrt(lambda) + 40.0);
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "PASS";
    case Verdict::kFail: return "FAIL";
    case Verdict::kHeuristicPass: return "HEURISTIC-PASS";
    case Verdict::kHeuristicFail: return "HEURISTIC-FAIL";
  }
  return "?";
}

void Report::add(std::string key, std::string value) {
  details.emplace_back(std::move(key), std::move(value));
}

void Report::add(std::string key, double value) { add(std::move(key), fmt(value)); }

Report verify_bound(const BoundCertificate& cert, const TailEstimate& tail) {
  if (cert.x_grid != tail.x_grid) throw ConfigError("certificate and tail use different x grids");
  if (cert.p != tail.p) throw ConfigError("certificate and tail use different norm orders");
  if (cert.direction != tail.direction) {
    throw ConfigError("certificate and tail bound different deviation directions");
  }
  if (cert.centering.value != tail.centering) {
    throw ConfigError("certificate and tail use different centering values");
  }
  Report r;
  r.name = "bound:" + cert.family;
  const std::size_t m = cert.x_grid.size();
  const double level =
      tail.simultaneous ? tail.confidence : 1.0 - (1.0 - tail.confidence) / static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    ReportRow row;
    row.x = cert.x_grid[i];
    row.bound = cert.bound[i];
    row.p_hat = tail.p_hat[i];
    if (tail.simultaneous) {
      row.ci_low = tail.ci_low[i];
      row.ci_high = tail.ci_high[i];
    } else {
      const double per_point = 1.0 - (1.0 - tail.confidence) / static_cast<double>(m);
      std::tie(row.ci_low, row.ci_high) = clopper_pearson(tail.count[i], tail.n, per_point);
    }
    row.slack = slack_of(row.bound, row.p_hat);
    row.pass = row.ci_low <= row.bound;
    r.rows.push_back(row);
  }
  finish(r);
  r.add("family", cert.family);
  r.add("direction", std::string(to_string(cert.direction)));
  r.add("d", static_cast<double>(cert.d));
  r.add("p", cert.p);
  r.add("centering", cert.centering.value);
  r.add("n", static_cast<double>(tail.n));
  r.add("seed", std::to_string(tail.seed));
  r.add("simultaneous_confidence", level);
  return r;
}

Report verify_exact(const BoundCertificate& cert, const std::function<double(double)>& survival,
                    std::string oracle_name) {
  if (cert.direction != Direction::kUpper) {
    throw ConfigError("exact survival oracles cover upper deviations only");
  }
  Report r;
  r.name = "exact:" + cert.family;
  for (std::size_t i = 0; i < cert.x_grid.size(); ++i) {
    ReportRow row;
    row.x = cert.x_grid[i];
    row.bound = cert.bound[i];
    row.p_hat = survival(cert.centering.value + row.x);
    row.ci_low = row.ci_high = row.p_hat;
    row.slack = slack_of(row.bound, row.p_hat);
    row.pass = row.p_hat <= row.bound * (1.0 + 1e-12);
    r.rows.push_back(row);
  }
  finish(r);
  r.add("oracle", std::move(oracle_name));
  r.add("centering", cert.centering.value);
  return r;
}

std::optional<std::function<double(double)>> exact_norm_survival(const IDVectorSpec& spec) {
  if (spec.dim() != 1) return std::nullopt;
  const LevyMeasure1D& m = spec.coordinate(0);
  const double drift = spec.drift(0);
  if (const auto* f = std::get_if<SymmetricExponential>(&m.family()); f && drift == 0.0) {
    const double s = f->scale;
    return [s](double y) { return y <= 0.0 ? 1.0 : std::exp(-y / s); };
  }
  if (const auto* f = std::get_if<GammaLevy>(&m.family()); f && drift == 0.0) {
    const double shape = f->shape, rate = f->rate;
    return [shape, rate](double y) {
      return y <= 0.0 ? 1.0 : boost::math::gamma_q(shape, rate * y);
    };
  }
  if (const auto* f = std::get_if<PoissonAtom>(&m.family())) {
    const double lambda = f->intensity;
    // |drift + a K| = |s drift + |a| K| with s = sign(a).
    const double a = std::abs(f->jump);
    const double g = f->jump > 0 ? drift : -drift;
    return [lambda, a, g](double y) {
      if (y <= 0.0) return 1.0;
      const double eps = 1e-12;
      const long long k_hi =
          std::max<long long>(0, static_cast<long long>(std::ceil((y - g) / a - eps)));
      const long long k_lo = static_cast<long long>(std::floor((-y - g) / a + eps));
      double p = poisson_upper(lambda, k_hi);
      if (k_lo >= 0) p += poisson_lower(lambda, std::min(k_lo, k_hi - 1));
      return std::min(p, 1.0);
    };
  }
  return std::nullopt;
}

Report verify_variance_identity(const LevyMeasure1D& m, double drift, std::size_t n,
                                std::uint64_t seed, const SamplerOptions& opts) {
  const double target = poly_moment(m, 2.0);
  const SampleBatch b = sample_marginal(m, 1.0, n, seed, drift, opts);
  long double s = 0.0L;
  for (double x : b.values) s += x;
  const long double mean = s / static_cast<long double>(n);
  long double s2 = 0.0L, s4 = 0.0L;
  for (double x : b.values) {
    const long double c = x - mean;
    s2 += c * c;
    s4 += c * c * c * c;
  }
  const double var = static_cast<double>(s2 / static_cast<long double>(n - 1));
  const double mu4 = static_cast<double>(s4 / static_cast<long double>(n));
  boost::math::normal_distribution<double> nd;
  const double zq = boost::math::quantile(nd, 1.0 - (1.0 - opts.confidence) / 2.0);
  const double se = std::sqrt(std::max(mu4 - var * var, 0.0) / static_cast<double>(n));
  Report r;
  r.name = "variance_identity:" + std::string(m.family_name());
  ReportRow row;
  row.bound = target;
  row.p_hat = var;
  row.ci_low = var - zq * se;
  row.ci_high = var + zq * se;
  row.slack = var - target;
  row.pass = row.ci_low <= target && target <= row.ci_high;
  r.rows.push_back(row);
  finish(r);
  r.add("int_u2_nu", target);
  r.add("sample_variance", var);
  r.add("n", static_cast<double>(n));
  r.add("seed", std::to_string(seed));
  r.add("confidence", opts.confidence);
  return r;
}

Report verify_young(std::size_t n_trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> value(-2.0, 2.0);
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  std::uniform_int_distribution<int> support(1, 6);
  std::size_t violations = 0;
  long double worst = -1e300L;
  for (std::size_t trial = 0; trial < n_trials; ++trial) {
    const int k = support(rng);
    std::vector<long double> x(k), y(k), w(k);
    long double total = 0.0L;
    for (int i = 0; i < k; ++i) {
      x[i] = value(rng);
      y[i] = value(rng);
      w[i] = weight(rng) + 1e-3;
      total += w[i];
    }
    for (auto& wi : w) wi /= total;
    // The first trials pin the equality cases X = Y and X constant.
    if (trial == 0) x = y;
    if (trial == 1) std::fill(x.begin(), x.end(), x[0]);
    const long double lam = 2.0L * (1.0L - static_cast<long double>(weight(rng)));
    long double exy = 0, eyy = 0, ex = 0, ey = 0;
    for (int i = 0; i < k; ++i) {
      const long double ely = std::exp(lam * y[i]);
      exy += w[i] * x[i] * ely;
      eyy += w[i] * y[i] * ely;
      ey += w[i] * ely;
      ex += w[i] * std::exp(lam * x[i]);
    }
    const long double lhs = exy;
    const long double rhs = eyy + std::log(ex) / lam * ey - std::log(ey) / lam * ey;
    worst = std::max(worst, lhs - rhs);
    if (lhs > rhs + 1e-12L) ++violations;
  }
  Report r;
  r.name = "young_inequality";
  ReportRow row;
  row.bound = 0.0;
  row.p_hat = static_cast<double>(violations);
  row.slack = static_cast<double>(worst);
  row.pass = violations == 0;
  r.rows.push_back(row);
  finish(r);
  r.add("trials", static_cast<double>(n_trials));
  r.add("violations", static_cast<double>(violations));
  r.add("max_lhs_minus_rhs", static_cast<double>(worst));
  r.add("seed", std::to_string(seed));
  return r;
}

Report verify_integrability(const IDVectorSpec& spec, double lambda,
                            std::span<const std::size_t> n_schedule, std::uint64_t seed,
                            double growth_factor, const SamplerOptions& opts) {
  if (n_schedule.empty()) throw ConfigError("sample schedule is empty");
  for (std::size_t i = 1; i < n_schedule.size(); ++i) {
    if (n_schedule[i] <= n_schedule[i - 1]) throw ConfigError("sample schedule must increase");
  }
  double lambda_max = kInf, R = 0.0;
  for (const auto& g : spec.groups()) {
    const Thm3Report t = thm3_report(g.measure);
    lambda_max = std::min(lambda_max, t.lambda_max);
    R = std::max(R, t.R);
  }
  if (!(lambda > 0.0) || !(lambda < lambda_max)) {
    throw ConfigError("lambda = " + fmt(lambda) + " is outside (0, lambda_max = " +
                      fmt(lambda_max) + ")");
  }
  const std::vector<double> norms = sample_norms(spec, 2.0, n_schedule.back(), seed, opts);
  Report r;
  r.name = "integrability";
  long double acc = 0.0L;
  std::size_t done = 0;
  double lo = kInf, hi = 0.0;
  for (std::size_t stage : n_schedule) {
    for (; done < stage; ++done) {
      const double y = norms[done] / R;
      const double lg = y > 0.0 ? std::max(std::log(lambda * y), 0.0) : 0.0;
      acc += std::exp(y * lg);
    }
    const double mean = static_cast<double>(acc / static_cast<long double>(stage));
    lo = std::min(lo, mean);
    hi = std::max(hi, mean);
    ReportRow row;
    row.x = static_cast<double>(stage);
    row.p_hat = mean;
    row.bound = lo * growth_factor;
    row.pass = hi <= lo * growth_factor;
    r.rows.push_back(row);
  }
  bool ok = hi <= lo * growth_factor;
  r.verdict = ok ? Verdict::kHeuristicPass : Verdict::kHeuristicFail;
  r.add("lambda", lambda);
  r.add("lambda_max", lambda_max);
  r.add("growth_factor", growth_factor);
  r.add("seed", std::to_string(seed));
  r.add("note", "finite-sample audit of a finiteness claim; not a proof");
  return r;
}

Report verify_covariance_identity_poisson(double lambda, double a,
                                          const std::function<double(double)>& f,
                                          const std::function<double(double)>& g,
                                          double rel_tol) {
  if (!(lambda > 0.0) || !std::isfinite(a) || a == 0.0) {
    throw ConfigError("covariance identity needs lambda > 0 and a nonzero jump");
  }
  const long long K = poisson_cutoff(lambda);
  // Left side: Cov(f(X), g(X)) for X = a K.
  long double ef = 0, eg = 0, efg = 0;
  for (long long k = 0; k <= K; ++k) {
    const long double w = poisson_pmf(lambda, k);
    const double x = a * static_cast<double>(k);
    ef += w * f(x);
    eg += w * g(x);
    efg += w * f(x) * g(x);
  }
  const double lhs = static_cast<double>(efg - ef * eg);

  // Right side: U = a (K1 + K0), V = a (K2 + K0) with K1, K2 ~ Poisson(lambda z)
  // and shared K0 ~ Poisson(lambda (1 - z)).
  auto inner = [&](double z) {
    const double l1 = lambda * z, l0 = lambda * (1.0 - z);
    const long long K1 = poisson_cutoff(l1), K0 = poisson_cutoff(l0);
    std::vector<double> w1(K1 + 1), w0(K0 + 1);
    for (long long k = 0; k <= K1; ++k) w1[k] = poisson_pmf(l1, k);
    for (long long k = 0; k <= K0; ++k) w0[k] = poisson_pmf(l0, k);
    long double total = 0.0L;
    for (long long k0 = 0; k0 <= K0; ++k0) {
      // E over K1 of (f(U + a) - f(U)) and over K2 of (g(V + a) - g(V)).
      long double df = 0.0L, dg = 0.0L;
      for (long long k = 0; k <= K1; ++k) {
        const double u = a * static_cast<double>(k + k0);
        df += w1[k] * (f(u + a) - f(u));
        dg += w1[k] * (g(u + a) - g(u));
      }
      total += w0[k0] * df * dg;
    }
    return static_cast<double>(total) * lambda;
  };
  const double rhs = boost::math::quadrature::gauss<double, 30>::integrate(inner, 0.0, 1.0);
  Report r;
  r.name = "covariance_identity:poisson";
  ReportRow row;
  row.bound = rhs;
  row.p_hat = lhs;
  row.slack = lhs - rhs;
  row.pass = std::abs(lhs - rhs) <= rel_tol * std::max(1.0, std::abs(lhs));
  r.rows.push_back(row);
  finish(r);
  r.add("lambda", lambda);
  r.add("jump", a);
  r.add("covariance", lhs);
  r.add("integrated_representation", rhs);
  return r;
}

Report merge_reports(std::string name, std::vector<Report> children) {
  std::stable_sort(children.begin(), children.end(),
                   [](const Report& x, const Report& y) { return x.name < y.name; });
  Report r;
  r.name = std::move(name);
  bool ok = true;
  for (const auto& c : children) ok = ok && (c.heuristic() || c.passed());
  r.verdict = ok ? Verdict::kPass : Verdict::kFail;
  r.children = std::move(children);
  return r;
}

}  // namespace levyconc
