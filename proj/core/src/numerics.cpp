#include "levyconc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "levyconc/error.hpp"

namespace levyconc {

namespace {

using Gk = boost::math::quadrature::gauss_kronrod<double, 31>;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Fraction of t_max used as its left limit when t_max is finite.
constexpr double kEdge = 1e-9;

template <class F>
double outer_quadrature(F&& f, double a, double b, const NumericsOptions& opts,
                        const char* what) {
  if (!(b > a)) return 0.0;
  double err = 0.0;
  const double v = Gk::integrate(f, a, b, opts.max_depth, opts.outer_rel_tol, &err);
  // An absolute error of 1e-14 in an exponent is invisible in the bound itself.
  if (!std::isfinite(v) || err > std::max(1e-14, 1e2 * opts.outer_rel_tol * std::abs(v))) {
    throw NumericError(std::string(what) + " did not converge: error " + fmt(err), err);
  }
  return v;
}

}  // namespace

Provenance Provenance::analytic(std::string quantity) {
  Provenance p;
  p.quantity = std::move(quantity);
  p.source = Source::kAnalytic;
  return p;
}

Provenance Provenance::caller(std::string quantity) {
  Provenance p;
  p.quantity = std::move(quantity);
  p.source = Source::kCaller;
  return p;
}

std::string_view to_string(Provenance::Source s) {
  switch (s) {
    case Provenance::Source::kAnalytic: return "analytic";
    case Provenance::Source::kMonteCarlo: return "monte-carlo";
    case Provenance::Source::kDeclared: return "declared";
    case Provenance::Source::kCaller: return "caller";
  }
  return "caller";
}

std::string_view to_string(Direction d) {
  return d == Direction::kUpper ? "upper" : "lower";
}

RateFunction::RateFunction(std::string label, std::function<double(double)> eval,
                           double t_max)
    : label_(std::move(label)), eval_(std::move(eval)), t_max_(t_max) {
  if (!(t_max > 0.0)) throw ConfigError("rate function needs t_max > 0");
}

double RateFunction::operator()(double t) const {
  if (!(t >= 0.0) || !(t < t_max_)) {
    throw DomainError("rate " + label_ + " evaluated at t = " + fmt(t) +
                      " outside [0, " + fmt(t_max_) + ")");
  }
  const double v = eval_(t);
  if (std::isnan(v)) throw NumericError("rate " + label_ + " returned NaN", kInf);
  return v;
}

double RateFunction::eval_limit() const {
  return std::isfinite(t_max_) ? t_max_ * (1.0 - kEdge) : kInf;
}

double RateFunction::sup_value() const {
  return std::isfinite(t_max_) ? (*this)(eval_limit()) : kInf;
}

RateFunction& RateFunction::with_param(std::string name, double value) {
  params_.emplace_back(std::move(name), value);
  return *this;
}

RateFunction& RateFunction::with_input(Provenance p) {
  inputs_.push_back(std::move(p));
  return *this;
}

RateInverter::RateInverter(const RateFunction& h, NumericsOptions opts)
    : h_(h), opts_(opts) {
  value(0.0);
}

double RateInverter::value(double t) {
  auto it = std::lower_bound(cache_.begin(), cache_.end(), t,
                             [](const auto& e, double x) { return e.first < x; });
  if (it != cache_.end() && it->first == t) return it->second;
  const double v = h_(t);
  ++evaluations_;
  cache_.insert(it, {t, v});
  return v;
}

double RateInverter::sup_value() {
  if (sup_ < 0.0) sup_ = std::isfinite(h_.t_max()) ? value(h_.eval_limit()) : kInf;
  return sup_;
}

double RateInverter::invert(double s) {
  if (!(s >= 0.0)) throw DomainError("cannot invert at s = " + fmt(s));
  if (s == 0.0) return 0.0;
  const double sup = sup_value();
  if (!(s < sup)) {
    throw RangeError("s = " + fmt(s) + " is not below h(t_max^-) = " + fmt(sup) +
                         " for rate " + h_.label(),
                     sup);
  }
  auto first_above = std::partition_point(cache_.begin(), cache_.end(),
                                          [s](const auto& e) { return e.second <= s; });
  auto [lo_t, lo_v] = *(first_above - 1);
  if (lo_v == s) return lo_t;
  double hi_t = 0.0;
  double hi_v = 0.0;
  if (first_above != cache_.end()) {
    std::tie(hi_t, hi_v) = *first_above;
  } else if (std::isfinite(h_.t_max())) {
    hi_t = h_.eval_limit();
    hi_v = value(hi_t);
  } else {
    hi_t = std::max(1.0, 2.0 * lo_t);
    for (int i = 0;; ++i) {
      hi_v = value(hi_t);
      if (hi_v > s) break;
      lo_t = hi_t;
      lo_v = hi_v;
      hi_t *= 2.0;
      if (i > 2000) throw NumericError("could not bracket h^{-1}(" + fmt(s) + ")", kInf);
    }
  }
  const double rel = opts_.invert_rel_width;
  auto f = [&](double t) { return value(t) - s; };
  auto tol = [rel](double a, double b) { return std::abs(b - a) <= rel * std::abs(b); };
  boost::uintmax_t iters = 400;
  const auto [a, b] =
      boost::math::tools::toms748_solve(f, lo_t, hi_t, lo_v - s, hi_v - s, tol, iters);
  if (iters >= 400) throw NumericError("inversion did not converge", std::abs(b - a));
  return 0.5 * (a + b);
}

double invert_monotone(const RateFunction& h, double s, const NumericsOptions& opts) {
  RateInverter inv(h, opts);
  return inv.invert(s);
}

double ChernoffResult::probability() const { return std::exp(-neg_log_bound); }

namespace {

void check_agreement(double a, double b, const NumericsOptions& opts,
                     const std::string& label, double x) {
  if (std::abs(a - b) > opts.agreement_rel_tol * std::max(std::abs(a), std::abs(b)) + 1e-15) {
    throw NumericError("integral and sup forms of the Chernoff exponent disagree for " +
                           label + " at x = " + fmt(x) + ": " + fmt(a) + " vs " + fmt(b),
                       std::abs(a - b));
  }
}

}  // namespace

ChernoffResult chernoff_exponent(RateInverter& inv, double x) {
  if (!(x >= 0.0)) throw DomainError("deviation x must be >= 0");
  if (x == 0.0) return {};
  const double sup = inv.sup_value();
  if (!(x < sup)) {
    throw RangeError("x = " + fmt(x) + " is outside the validity range x < h(t_max^-) = " +
                         fmt(sup) + " of " + inv.rate().label(),
                     sup);
  }
  const NumericsOptions& opts = inv.options();
  ChernoffResult r;
  r.neg_log_bound = outer_quadrature([&](double s) { return inv.invert(s); }, 0.0, x, opts,
                                     "int_0^x h^{-1}");
  r.t_star = inv.invert(x);
  const double area = outer_quadrature([&](double t) { return inv.value(t); }, 0.0, r.t_star,
                                       opts, "int_0^t h");
  r.neg_log_sup_form = r.t_star * x - area;
  check_agreement(r.neg_log_bound, r.neg_log_sup_form, opts, inv.rate().label(), x);
  return r;
}

ChernoffResult chernoff_exponent(const RateFunction& h, double x,
                                 const NumericsOptions& opts) {
  RateInverter inv(h, opts);
  return chernoff_exponent(inv, x);
}

double chernoff_bound(const RateFunction& h, double x, const NumericsOptions& opts) {
  return chernoff_exponent(h, x, opts).probability();
}

ChernoffResult constrained_chernoff_exponent(const RateFunction& g, double T, double x,
                                             const NumericsOptions& opts) {
  if (!(T > 0.0) || !(T < g.t_max())) {
    throw ConfigError("T = " + fmt(T) + " must lie in (0, t_max = " + fmt(g.t_max()) + ")");
  }
  if (!(x >= 0.0)) throw DomainError("deviation x must be >= 0");
  if (x == 0.0) return {};
  const RateFunction twice("2*" + g.label(), [&g](double t) { return 2.0 * g(t); },
                           g.t_max());
  RateInverter inv(twice, opts);
  const double cap = inv.value(T);
  ChernoffResult r;
  const double reach = std::min(x, cap);
  r.neg_log_bound = outer_quadrature([&](double s) { return inv.invert(s); }, 0.0, reach,
                                     opts, "int_0^x (2g)^{-1}");
  if (x >= cap) {
    r.t_star = T;
    r.neg_log_bound += T * (x - cap);
  } else {
    r.t_star = inv.invert(x);
  }
  const double area = outer_quadrature([&](double t) { return inv.value(t); }, 0.0, r.t_star,
                                       opts, "int_0^t 2g");
  r.neg_log_sup_form = r.t_star * x - area;
  check_agreement(r.neg_log_bound, r.neg_log_sup_form, opts, twice.label(), x);
  return r;
}

double constrained_chernoff(const RateFunction& g, double T, double x,
                            const NumericsOptions& opts) {
  return constrained_chernoff_exponent(g, T, x, opts).probability();
}

double find_T(const RateFunction& g) {
  const auto product = [&g](double t) { return t * g(t); };
  double lo = 0.0;
  double hi = 0.0;
  if (std::isfinite(g.t_max())) {
    hi = g.eval_limit();
    if (product(hi) <= 0.5) return g.t_max();
  } else {
    hi = 1.0;
    while (product(hi) <= 0.5) {
      lo = hi;
      hi *= 2.0;
      if (!std::isfinite(hi)) return kInf;
    }
  }
  // Invariant: product(lo) <= 1/2 < product(hi).
  double p_lo = product(lo);
  for (int i = 0; i < 2000 && 0.5 - p_lo > 1e-11; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double p = product(mid);
    if (p <= 0.5) {
      lo = mid;
      p_lo = p;
    } else {
      hi = mid;
    }
  }
  return lo;
}

void check_rate_invariants(const RateFunction& h, std::size_t points) {
  const double h0 = h(0.0);
  if (h0 != 0.0) throw NumericError("rate " + h.label() + " has h(0) != 0", std::abs(h0));
  const double top = std::isfinite(h.t_max()) ? 0.99 * h.t_max() : 4.0;
  double prev = 0.0;
  for (std::size_t i = 1; i <= points; ++i) {
    const double t = top * static_cast<double>(i) / static_cast<double>(points);
    const double v = h(t);
    if (v < prev * (1.0 - 1e-12)) {
      throw NumericError("rate " + h.label() + " decreases at t = " + fmt(t), prev - v);
    }
    prev = v;
  }
}

void check_certificate(const BoundCertificate& cert) {
  const std::size_t n = cert.x_grid.size();
  if (cert.bound.size() != n || cert.neg_log_bound.size() != n) {
    throw ConfigError("certificate columns have mismatched lengths");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(cert.x_grid[i] >= 0.0) || !(cert.x_grid[i] < cert.validity_sup)) {
      throw RangeError("grid point x = " + fmt(cert.x_grid[i]) + " outside validity range",
                       cert.validity_sup);
    }
    if (i > 0 && !(cert.x_grid[i] > cert.x_grid[i - 1])) {
      throw ConfigError("x grid must be strictly increasing");
    }
    if (!(cert.bound[i] >= 0.0 && cert.bound[i] <= 1.0)) {
      throw NumericError("bound outside [0, 1] at x = " + fmt(cert.x_grid[i]), cert.bound[i]);
    }
    if (std::abs(cert.bound[i] - std::exp(-cert.neg_log_bound[i])) > 1e-12 * cert.bound[i] + 1e-300) {
      throw NumericError("bound and -log bound disagree at x = " + fmt(cert.x_grid[i]),
                         cert.bound[i]);
    }
    if (i > 0 && cert.neg_log_bound[i] < cert.neg_log_bound[i - 1] * (1.0 - 1e-9)) {
      throw NumericError("bound increases at x = " + fmt(cert.x_grid[i]),
                         cert.neg_log_bound[i - 1] - cert.neg_log_bound[i]);
    }
  }
}

std::vector<ChernoffResult> tabulate_chernoff(const RateFunction& h,
                                              std::span<const double> x_grid,
                                              const NumericsOptions& opts) {
  RateInverter inv(h, opts);
  std::vector<ChernoffResult> out;
  out.reserve(x_grid.size());
  for (double x : x_grid) out.push_back(chernoff_exponent(inv, x));
  return out;
}

}  // namespace levyconc
