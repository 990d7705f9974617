#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "levyconc/levy_measure.hpp"
#include "levyconc/numerics.hpp"
#include "levyconc/sampler.hpp"

namespace levyconc {

enum class Verdict { kPass, kFail, kHeuristicPass, kHeuristicFail };
std::string_view to_string(Verdict v);

struct ReportRow {
  double x = 0.0;
  double bound = 0.0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  /// log(bound / p_hat); +inf when p_hat = 0.
  double slack = 0.0;
  bool pass = true;
};

struct Report {
  std::string name;
  Verdict verdict = Verdict::kPass;
  std::vector<ReportRow> rows;
  /// Ordered key/value facts about the run.
  std::vector<std::pair<std::string, std::string>> details;
  std::vector<Report> children;

  bool passed() const { return verdict == Verdict::kPass || verdict == Verdict::kHeuristicPass; }
  bool heuristic() const {
    return verdict == Verdict::kHeuristicPass || verdict == Verdict::kHeuristicFail;
  }
  void add(std::string key, std::string value);
  void add(std::string key, double value);
};

/// PASS at x when the (Bonferroni-simultaneous) empirical lower limit does not
/// exceed the bound. Throws ConfigError when grids, p or centering differ.
Report verify_bound(const BoundCertificate& cert, const TailEstimate& tail);

/// Compares the certificate with an exact survival function
/// y -> P(||X|| >= y), evaluated at centering + x.
Report verify_exact(const BoundCertificate& cert, const std::function<double(double)>& survival,
                    std::string oracle_name);

/// y -> P(||X||_p >= y) when known in closed form or by series: d = 1 with a
/// symmetric-exponential (no drift), gamma (no drift) or Poisson-atom
/// coordinate. nullopt otherwise.
std::optional<std::function<double(double)>> exact_norm_survival(const IDVectorSpec& spec);

/// Sample variance interval of X_1 against int u^2 nu(du).
Report verify_variance_identity(const LevyMeasure1D& m, double drift, std::size_t n,
                                std::uint64_t seed, const SamplerOptions& opts = {});

/// The entropy/Young inequality
///   E[X e^{lY}] <= E[Y e^{lY}] + (log E e^{lX} / l) E e^{lY} - (log E e^{lY} / l) E e^{lY}
/// on random finite-support pairs, evaluated exactly.
Report verify_young(std::size_t n_trials, std::uint64_t seed);

/// HEURISTIC: running means of exp((||X||/R) log+(lambda ||X|| / R)) over a
/// growing sample schedule must stay within `growth_factor` of each other.
Report verify_integrability(const IDVectorSpec& spec, double lambda,
                            std::span<const std::size_t> n_schedule, std::uint64_t seed,
                            double growth_factor = 1.5, const SamplerOptions& opts = {});

/// Covariance representation for X = a * Poisson(lambda):
///   Cov(f(X), g(X)) = int_0^1 E (f(U + a) - f(U)) (g(V + a) - g(V)) lambda dz
/// with U, V sharing the time-(1-z) part. Both sides by series.
Report verify_covariance_identity_poisson(double lambda, double a,
                                          const std::function<double(double)>& f,
                                          const std::function<double(double)>& g,
                                          double rel_tol = 1e-9);

/// Merges child reports, ordered by name; FAIL if any hard child fails.
Report merge_reports(std::string name, std::vector<Report> children);

}  // namespace levyconc
