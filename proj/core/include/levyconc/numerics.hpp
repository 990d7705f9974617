#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "levyconc/levy_measure.hpp"

namespace levyconc {

/// Where an input quantity came from.
struct Provenance {
  enum class Source { kAnalytic, kMonteCarlo, kDeclared, kCaller };

  std::string quantity;
  Source source = Source::kAnalytic;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  double confidence = 0.0;
  /// Which end of the interval was used ("lower", "upper", "point").
  std::string side = "point";

  static Provenance analytic(std::string quantity);
  static Provenance caller(std::string quantity);
};

std::string_view to_string(Provenance::Source s);

/// A nondecreasing h on [0, t_max) with h(0) = 0.
class RateFunction {
 public:
  RateFunction(std::string label, std::function<double(double)> eval, double t_max);

  /// Throws DomainError outside [0, t_max).
  double operator()(double t) const;

  double t_max() const { return t_max_; }
  const std::string& label() const { return label_; }

  /// Largest argument used in place of t_max^- when t_max is finite.
  double eval_limit() const;
  /// h(t_max^-): the validity supremum of the Chernoff bound built from h.
  double sup_value() const;

  RateFunction& with_param(std::string name, double value);
  RateFunction& with_input(Provenance p);
  const std::vector<std::pair<std::string, double>>& params() const { return params_; }
  const std::vector<Provenance>& inputs() const { return inputs_; }

 private:
  std::string label_;
  std::function<double(double)> eval_;
  double t_max_;
  std::vector<std::pair<std::string, double>> params_;
  std::vector<Provenance> inputs_;
};

struct NumericsOptions {
  /// Bracket width for inversion, relative to t_max (or to the initial bracket
  /// when t_max is infinite).
  double invert_rel_width = 1e-12;
  /// Relative tolerance of the outer quadratures (int h^{-1}, int h).
  double outer_rel_tol = 1e-10;
  /// Required agreement of the integral and sup forms in -log space.
  double agreement_rel_tol = 1e-6;
  unsigned max_depth = 15;
};

/// Evaluates and inverts a rate function, memoising every evaluation. Inverse
/// queries start from the tightest bracket already known. Not thread-safe;
/// create one per thread.
class RateInverter {
 public:
  explicit RateInverter(const RateFunction& h, NumericsOptions opts = {});

  double value(double t);
  /// t with h(t) = s. RangeError when s >= h(t_max^-).
  double invert(double s);
  double sup_value();
  const RateFunction& rate() const { return h_; }
  const NumericsOptions& options() const { return opts_; }
  std::size_t evaluations() const { return evaluations_; }

 private:
  const RateFunction& h_;
  NumericsOptions opts_;
  std::vector<std::pair<double, double>> cache_;  // sorted by t
  std::size_t evaluations_ = 0;
  double sup_ = -1.0;
};

double invert_monotone(const RateFunction& h, double s, const NumericsOptions& opts = {});

struct ChernoffResult {
  /// -log of the bound from the integral form int_0^x h^{-1}(s) ds.
  double neg_log_bound = 0.0;
  /// -log of the bound from the sup form sup_t [t x - int_0^t h].
  double neg_log_sup_form = 0.0;
  /// Maximiser of the sup form.
  double t_star = 0.0;
  double probability() const;
};

/// exp(-int_0^x h^{-1}(s) ds), cross-checked against the sup form. Throws
/// RangeError for x >= h(t_max^-) and NumericError if the two forms disagree.
ChernoffResult chernoff_exponent(RateInverter& h, double x);
ChernoffResult chernoff_exponent(const RateFunction& h, double x,
                                 const NumericsOptions& opts = {});
double chernoff_bound(const RateFunction& h, double x, const NumericsOptions& opts = {});

/// exp(-sup_{0<=t<=T} [t x - int_0^t 2 g(s) ds]).
ChernoffResult constrained_chernoff_exponent(const RateFunction& g, double T, double x,
                                             const NumericsOptions& opts = {});
double constrained_chernoff(const RateFunction& g, double T, double x,
                            const NumericsOptions& opts = {});

/// Largest T in (0, t_max) with T g(T) <= 1/2; t_max if t g(t) stays below 1/2.
double find_T(const RateFunction& g);

/// Checks h(0) = 0 and monotonicity on a grid; throws NumericError otherwise.
void check_rate_invariants(const RateFunction& h, std::size_t points = 48);

enum class Direction { kUpper, kLower };
std::string_view to_string(Direction d);

/// The expectation (or shifted expectation) a deviation is measured from.
struct Centering {
  std::string expression;
  double value = 0.0;
  Provenance provenance;
};

/// A tail bound tabulated on an x grid.
struct BoundCertificate {
  std::string family;
  std::string rate_label;
  std::vector<std::pair<std::string, double>> rate_params;
  std::string measure;
  std::size_t d = 1;
  double p = 2.0;
  Direction direction = Direction::kUpper;
  Centering centering;
  std::vector<double> x_grid;
  std::vector<double> bound;
  std::vector<double> neg_log_bound;
  double validity_sup = kInf;
  bool dimension_dependent = false;
  std::vector<Provenance> inputs;
  std::vector<std::string> notes;
};

/// Bound nonincreasing, in [0, 1], grid strictly inside the validity range.
void check_certificate(const BoundCertificate& cert);

/// Chernoff bound of h on every grid point, sharing one evaluation cache.
std::vector<ChernoffResult> tabulate_chernoff(const RateFunction& h,
                                              std::span<const double> x_grid,
                                              const NumericsOptions& opts = {});

}  // namespace levyconc
