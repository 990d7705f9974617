#include "levyconc/rate_functions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <utility>

#include "levyconc/error.hpp"

namespace levyconc {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Rate quadratures are evaluated many times inside root finding, so they get a
// tighter tolerance than the library default to keep h smooth in t.
QuadratureOptions rate_quadrature() {
  QuadratureOptions q;
  q.abs_tol = 1e-13;
  q.rel_tol = 1e-11;
  return q;
}

// p^2 * int w(|u|) |u| (e^{t|u|} - 1) nu(du), w growing like |u|^w_degree.
RateFunction weighted_rate(std::string label, const LevyMeasure1D& m, double p,
                           std::function<double(double)> weight, double w_degree) {
  const double scale = p * p;
  auto eval = [m, weight = std::move(weight), w_degree, scale](double t) {
    if (t == 0.0) return 0.0;
    JumpIntegrand f;
    f.f = [&weight, t](double u) {
      const double a = std::abs(u);
      return weight(a) * a * std::expm1(t * a);
    };
    f.growth_rate = t;
    f.degree = w_degree + 1.0;
    f.damped = [&weight, t](double u) {
      const double a = std::abs(u);
      return -weight(a) * a * std::expm1(-t * a);
    };
    return scale * integrate(m, f, rate_quadrature()).value;
  };
  return RateFunction(std::move(label), std::move(eval), exp_moment_abscissa(m));
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(std::string(name) + " must be positive and finite, got " + fmt(v));
  }
}

void require_p(double p, double lo) {
  if (!(p >= lo) || !std::isfinite(p)) {
    throw ConfigError("p must be >= " + fmt(lo) + ", got " + fmt(p));
  }
}

}  // namespace

Estimate Estimate::analytic(double v, std::string quantity) {
  Estimate e;
  e.value = e.lower = e.upper = v;
  e.provenance = Provenance::analytic(std::move(quantity));
  return e;
}

Provenance Estimate::used(std::string_view side) const {
  Provenance p = provenance;
  p.side = lower == upper ? "point" : std::string(side);
  return p;
}

void MomentSet::check() const {
  auto nonneg = [](const std::optional<Estimate>& e, const char* name) {
    if (!e) return;
    if (!(e->lower >= 0.0) || !(e->lower <= e->value) || !(e->value <= e->upper)) {
      throw ConfigError(std::string("moment ") + name +
                        " must satisfy 0 <= lower <= value <= upper");
    }
  };
  nonneg(m_p, "m_p");
  nonneg(m_2p, "m_2p");
  nonneg(l, "l");
  nonneg(E_norm_p, "E_norm_p");
  nonneg(E_X1_sq, "E_X1_sq");
  nonneg(mod_m_p_lower, "mod_m_p_lower");
  nonneg(mod_m_2p_upper, "mod_m_2p_upper");
  if (m_p && m_2p) {
    // Cauchy-Schwarz on |X_1|^p, checked on the point values and on the
    // interval ends that could still be consistent.
    if (m_2p->upper < m_p->lower * m_p->lower * (1.0 - 1e-12)) {
      throw ConfigError("moments violate m_2p >= m_p^2: m_p = " + fmt(m_p->value) +
                        ", m_2p = " + fmt(m_2p->value));
    }
  }
  if (l && !(l->value > 0.0)) throw ConfigError("l must be positive (degenerate X_1)");
}

ProjectionSpec ProjectionSpec::from_matrix(std::span<const double> a, std::size_t d,
                                           double offset) {
  if (a.size() != d * d) throw ConfigError("projection matrix must be d x d");
  const double tol = 1e-9;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (std::abs(a[i * d + j] - a[j * d + i]) > tol) {
        throw ConfigError("projection matrix is not symmetric");
      }
      double sq = 0.0;
      for (std::size_t k = 0; k < d; ++k) sq += a[i * d + k] * a[k * d + j];
      if (std::abs(sq - a[i * d + j]) > tol) {
        throw ConfigError("projection matrix is not idempotent");
      }
    }
  }
  ProjectionSpec s;
  s.offset = offset;
  s.col_norms.resize(d);
  double trace = 0.0, sum_sq = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    double c = 0.0;
    for (std::size_t i = 0; i < d; ++i) c += a[i * d + k] * a[i * d + k];
    s.col_norms[k] = std::sqrt(c);
    sum_sq += c;
    trace += a[k * d + k];
  }
  if (std::abs(sum_sq - trace) > 1e-9 * std::max(1.0, trace)) {
    throw ConfigError("sum of squared column norms differs from the subspace dimension");
  }
  s.validate(d);
  return s;
}

ProjectionSpec ProjectionSpec::leading_coordinates(std::size_t d, std::size_t k,
                                                   double offset) {
  if (k > d) throw ConfigError("projection keeps more coordinates than d");
  ProjectionSpec s;
  s.offset = offset;
  s.col_norms.assign(d, 0.0);
  std::fill_n(s.col_norms.begin(), k, 1.0);
  s.validate(d);
  return s;
}

void ProjectionSpec::validate(std::size_t d) const {
  if (col_norms.size() != d) {
    throw ConfigError("projection has " + std::to_string(col_norms.size()) +
                      " column norms for d = " + std::to_string(d));
  }
  for (double pi : col_norms) {
    if (!(pi >= 0.0 && pi <= 1.0)) {
      throw ConfigError("projection column norm " + fmt(pi) + " outside [0, 1]");
    }
  }
  if (!(offset > 0.0)) throw ConfigError("projection offset must be positive");
}

std::string_view to_string(BoundFamily f) {
  switch (f) {
    case BoundFamily::kThm1: return "thm1";
    case BoundFamily::kThm2: return "thm2";
    case BoundFamily::kThm4: return "thm4";
    case BoundFamily::kThm5: return "thm5";
    case BoundFamily::kCor2: return "cor2";
    case BoundFamily::kCor3: return "cor3";
    case BoundFamily::kCor4: return "cor4";
    case BoundFamily::kCor5: return "cor5";
  }
  return "?";
}

BoundFamily parse_bound_family(std::string_view name) {
  for (auto f : {BoundFamily::kThm1, BoundFamily::kThm2, BoundFamily::kThm4,
                 BoundFamily::kThm5, BoundFamily::kCor2, BoundFamily::kCor3,
                 BoundFamily::kCor4, BoundFamily::kCor5}) {
    if (to_string(f) == name) return f;
  }
  throw ConfigError("unknown bound family '" + std::string(name) + "'");
}

// ---- rates ----------------------------------------------------------------

RateFunction rate_thm1(const LevyMeasure1D& m, double l) {
  if (!(l > 0.0)) throw ConfigError("l must be positive, got " + fmt(l));
  const double c1 = 8.0 + 12.0 * std::numbers::ln2 / l;
  const double c3 = 8.0 / l;
  RateFunction g(
      "thm1.g",
      [m, c1, c3](double t) {
        if (t == 0.0) return 0.0;
        return c1 * exp_moment_integral(m, t, 1.0) + c3 * exp_moment_integral(m, t, 3.0);
      },
      exp_moment_abscissa(m));
  g.with_param("l", l).with_param("c1", c1).with_param("c3", c3);
  return g;
}

RateFunction rate_thm2(const LevyMeasure1D& m, SignClass marginal, double p, double m_p,
                       double m_2p) {
  require_p(p, 2.0);
  if (marginal == SignClass::kGeneral) {
    throw ConfigError(
        "the l_p rate needs a symmetric or sign-definite marginal; use family thm5 "
        "(general-case rate) instead");
  }
  if (!(m_p > 0.0)) throw ConfigError("m_p must be positive, got " + fmt(m_p));
  require_positive(m_2p, "m_2p");
  const double c = std::pow(4.0 / m_p, 1.0 / p);
  const double K = std::pow(2.0, 2.0 * p + 1.0) * m_2p / (m_p * m_p);
  const double e = 2.0 * p - 2.0;
  RateFunction h = weighted_rate(
      "thm2.h", m, p, [c, K, e](double a) { return std::pow(1.0 + c * a, e) + K; }, e);
  h.with_param("p", p).with_param("m_p", m_p).with_param("m_2p", m_2p);
  return h;
}

RateFunction rate_thm5_positive(const LevyMeasure1D& m, double p, double m_p, double m_2p) {
  require_p(p, 2.0);
  if (m.sign_class() != SignClass::kNonnegative) {
    throw ConfigError("the positive-case rate needs a measure with nonnegative jumps");
  }
  if (!(m_p > 0.0)) throw ConfigError("m_p must be positive, got " + fmt(m_p));
  require_positive(m_2p, "m_2p");
  const double a0 = std::pow(2.0, -1.0 / p);
  const double c = std::pow(m_p, -1.0 / p);
  const double e = 2.0 * p - 2.0;
  const double K = 4.0 * std::pow(1.0 + a0, e) * m_2p / (m_p * m_p);
  RateFunction h = weighted_rate(
      "thm5.positive.h", m, p,
      [a0, c, K, e](double a) { return std::pow(a0 + c * a, e) + K; }, e);
  h.with_param("p", p).with_param("m_p", m_p).with_param("m_2p", m_2p);
  return h;
}

RateFunction rate_thm5_general(const LevyMeasure1D& m, double p, double mod_m_p_lower,
                               double mod_m_2p_upper, std::optional<std::size_t> d) {
  require_p(p, 1.0);
  if (!(mod_m_p_lower > 0.0)) {
    throw ConfigError(
        "modified moment vanishes; use the positive-case rate if coordinates are "
        "nonnegative");
  }
  require_positive(mod_m_2p_upper, "mod_m_2p_upper");
  double A = 1.0;
  if (p < 2.0) {
    if (!d || *d == 0) throw ConfigError("d is required for the general-case rate with p < 2");
    A = std::pow(static_cast<double>(*d), 2.0 / p - 1.0);
  }
  const double c = std::pow(2.0 / mod_m_p_lower, 1.0 / p);
  const double e = 2.0 * p - 2.0;
  const double K = std::pow(2.0, 2.0 * p) * mod_m_2p_upper / (mod_m_p_lower * mod_m_p_lower);
  RateFunction h = weighted_rate(
      "thm5.general.h", m, p, [A, c, K, e](double a) { return A * std::pow(1.0 + c * a, e) + K; },
      e);
  h.with_param("p", p)
      .with_param("mod_m_p_lower", mod_m_p_lower)
      .with_param("mod_m_2p_upper", mod_m_2p_upper);
  if (p < 2.0) h.with_param("d", static_cast<double>(*d));
  return h;
}

RateFunction rate_thm5(const LevyMeasure1D& m, double drift, double p,
                       const MomentSet& moments, std::size_t d) {
  const SignClass s = marginal_sign_class(m, drift);
  if (s == SignClass::kNonnegative || s == SignClass::kNonpositive) {
    if (!moments.m_p || !moments.m_2p) {
      throw ConfigError("positive-case rate needs m_p and m_2p");
    }
    const LevyMeasure1D jumps = s == SignClass::kNonnegative ? m : m.reflected();
    return rate_thm5_positive(jumps, p, moments.m_p->lower, moments.m_2p->upper);
  }
  if (!moments.mod_m_p_lower || !moments.mod_m_2p_upper) {
    throw ConfigError("general-case rate needs mod_m_p_lower and mod_m_2p_upper");
  }
  return rate_thm5_general(m, p, moments.mod_m_p_lower->lower, moments.mod_m_2p_upper->upper,
                           p < 2.0 ? std::optional<std::size_t>(d) : std::nullopt);
}

RateFunction rate_thm4(const LevyMeasure1D& m, std::size_t d, double eps, double E_norm_2) {
  return rate_thm4(IDVectorSpec::iid(m, d), eps, E_norm_2);
}

RateFunction rate_thm4(const IDVectorSpec& spec, double eps, double E_norm_2) {
  require_positive(eps, "eps");
  require_positive(E_norm_2, "E_norm_2");
  ProjectionSpec full;
  full.col_norms.assign(spec.dim(), 1.0);
  full.offset = eps * E_norm_2;
  RateFunction h = rate_projection(spec, full, ProjectionVariant::kCor3);
  RateFunction out("thm4.h", [h](double t) { return h(t); }, h.t_max());
  out.with_param("d", static_cast<double>(spec.dim()))
      .with_param("eps", eps)
      .with_param("E_norm_2", E_norm_2);
  return out;
}

RateFunction rate_projection(const IDVectorSpec& spec, const ProjectionSpec& proj,
                             ProjectionVariant variant, double E_X1_sq) {
  proj.validate(spec.dim());
  struct Term {
    LevyMeasure1D m;
    double quartic;  // sum over the group of pi_k^4
  };
  std::vector<Term> terms;
  double t_max = kInf;
  std::size_t k = 0;
  for (const auto& g : spec.groups()) {
    double q = 0.0;
    for (std::size_t i = 0; i < g.count; ++i, ++k) q += std::pow(proj.col_norms[k], 4);
    terms.push_back({g.measure, q});
    t_max = std::min(t_max, exp_moment_abscissa(g.measure));
  }

  if (variant == ProjectionVariant::kCor4) {
    if (!spec.is_iid()) throw ConfigError("the centered projection rate needs i.i.d. coordinates");
    require_positive(E_X1_sq, "E_X1_sq");
    const double c3 = 2.0 / (proj.offset * proj.offset * E_X1_sq);
    const LevyMeasure1D m = terms.front().m;
    RateFunction h(
        "cor4.h",
        [m, c3](double t) {
          if (t == 0.0) return 0.0;
          return 8.0 * exp_moment_integral(m, t, 1.0) + c3 * exp_moment_integral(m, t, 3.0);
        },
        t_max);
    h.with_param("eps", proj.offset).with_param("E_X1_sq", E_X1_sq);
    return h;
  }

  const double inv_E2 = 2.0 / (proj.offset * proj.offset);
  RateFunction h(
      "cor3.h",
      [terms, inv_E2](double t) {
        if (t == 0.0) return 0.0;
        double first = 0.0, second = 0.0;
        for (const auto& term : terms) {
          first = std::max(first, exp_moment_integral(term.m, t, 1.0));
          if (term.quartic > 0.0) second += term.quartic * exp_moment_integral(term.m, t, 3.0);
        }
        return 8.0 * first + inv_E2 * second;
      },
      t_max);
  h.with_param("E", proj.offset);
  return h;
}

RateFunction rate_cor5(const LevyMeasure1D& m, double p, std::size_t d, double eps,
                       double E_norm_p) {
  require_p(p, 2.0);
  require_positive(eps, "eps");
  require_positive(E_norm_p, "E_norm_p");
  if (d == 0) throw ConfigError("d must be positive");
  const double e = 2.0 * p - 2.0;
  const double c = std::pow(static_cast<double>(d), 1.0 / e) / (eps * E_norm_p);
  RateFunction h = weighted_rate(
      "cor5.h", m, p, [c, e](double a) { return std::pow(1.0 + c * a, e); }, e);
  h.with_param("p", p)
      .with_param("d", static_cast<double>(d))
      .with_param("eps", eps)
      .with_param("E_norm_p", E_norm_p);
  return h;
}

// ---- bounded support ------------------------------------------------------

Cor2Constants cor2_constants(const IDVectorSpec& spec, double eps, double E_norm_2) {
  require_positive(eps, "eps");
  require_positive(E_norm_2, "E_norm_2");
  Cor2Constants c;
  double max2 = 0.0, sum4 = 0.0;
  for (const auto& g : spec.groups()) {
    const double R = support_radius(g.measure);
    if (!std::isfinite(R)) {
      throw DomainError("closed-form bounded-support bound needs finite support radius; " +
                        std::string(g.measure.family_name()) + " is unbounded");
    }
    c.R = std::max(c.R, R);
    max2 = std::max(max2, poly_moment(g.measure, 2.0));
    sum4 += static_cast<double>(g.count) * poly_moment(g.measure, 4.0);
  }
  const double eE = eps * E_norm_2;
  c.V_eps_sq = 8.0 * max2 + 2.0 / (eE * eE) * sum4;
  if (!(c.R > 0.0) || !(c.V_eps_sq > 0.0)) {
    throw DomainError("closed-form bounded-support bound needs a nonzero Levy measure");
  }
  return c;
}

double cor2_neg_log_bound(double V_sq, double R, double x) {
  if (!(V_sq > 0.0) || !(R > 0.0)) throw ConfigError("V^2 and R must be positive");
  if (!(x >= 0.0)) throw DomainError("x must be nonnegative, got " + fmt(x));
  // (V^2/R^2) [(1 + y) log(1 + y) - y] with y = R x / V^2.
  const double y = R * x / V_sq;
  double core;
  if (y < 1e-4) {
    core = y * y * (0.5 - y * (1.0 / 6.0 - y / 12.0));
  } else {
    core = (1.0 + y) * std::log1p(y) - y;
  }
  return V_sq / (R * R) * core;
}

double bound_cor2(const IDVectorSpec& spec, double eps, double E_norm_2, double x) {
  const Cor2Constants c = cor2_constants(spec, eps, E_norm_2);
  return std::exp(-cor2_neg_log_bound(c.V_eps_sq, c.R, x));
}

RateFunction cor2_dominating_rate(double V_sq, double R) {
  require_positive(V_sq, "V^2");
  require_positive(R, "R");
  RateFunction h(
      "cor2.h0", [V_sq, R](double t) { return V_sq * std::expm1(t * R) / R; }, kInf);
  h.with_param("V_eps_sq", V_sq).with_param("R", R);
  return h;
}

Thm3Report thm3_report(const LevyMeasure1D& m) {
  Thm3Report r;
  r.R = support_radius(m);
  if (!std::isfinite(r.R)) {
    throw DomainError("integrability report needs finite support radius");
  }
  r.V_sq = 8.0 * poly_moment(m, 2.0);
  if (!(r.V_sq > 0.0)) throw DomainError("integrability report needs a nonzero Levy measure");
  r.lambda_max = r.R * r.R / (std::numbers::e * r.V_sq);
  r.statement = "E exp((||X||_2/R) log(lambda ||X||_2/R)) < inf for lambda < " +
                fmt(r.lambda_max) + " (V^2 = " + fmt(r.V_sq) + ", R = " + fmt(r.R) + ")";
  return r;
}

// ---- certificates ---------------------------------------------------------

bool family_applicable(BoundFamily family, const IDVectorSpec& spec, std::string* reason) {
  auto fail = [reason](std::string why) {
    if (reason) *reason = std::move(why);
    return false;
  };
  const bool iid = spec.is_iid();
  const auto& g0 = spec.groups().front();
  switch (family) {
    case BoundFamily::kThm1:
      if (!iid) return fail("needs i.i.d. coordinates");
      if (!(exp_moment_abscissa(g0.measure) > 0.0)) return fail("needs M > 0");
      return true;
    case BoundFamily::kThm2: {
      if (!iid) return fail("needs i.i.d. coordinates");
      if (marginal_sign_class(g0.measure, g0.drift) == SignClass::kGeneral) {
        return fail("needs a symmetric or sign-definite marginal");
      }
      return true;
    }
    case BoundFamily::kThm5:
    case BoundFamily::kCor5:
      if (!iid) return fail("needs i.i.d. coordinates");
      return true;
    case BoundFamily::kCor4:
      if (!iid) return fail("needs i.i.d. coordinates");
      if (std::abs(g0.drift + jump_mean(g0.measure)) > 1e-12) {
        return fail("needs centered coordinates");
      }
      return true;
    case BoundFamily::kThm4:
    case BoundFamily::kCor3:
      return true;
    case BoundFamily::kCor2:
      for (const auto& g : spec.groups()) {
        if (!std::isfinite(support_radius(g.measure))) return fail("needs finite support radius");
      }
      return true;
  }
  return fail("unknown family");
}

namespace {

const Estimate& need(const std::optional<Estimate>& e, const char* name, BoundFamily f) {
  if (!e) {
    throw ConfigError("family " + std::string(to_string(f)) + " needs moment input " + name);
  }
  return *e;
}

std::string measure_label(const IDVectorSpec& spec) {
  std::string s;
  for (const auto& g : spec.groups()) {
    if (!s.empty()) s += ",";
    s += std::string(g.measure.family_name());
    if (g.drift != 0.0) s += "+" + fmt(g.drift);
    if (spec.groups().size() > 1) s += "x" + std::to_string(g.count);
  }
  return s;
}

void fill_from_rate(BoundCertificate& cert, const RateFunction& h) {
  cert.rate_label = h.label();
  cert.rate_params = h.params();
  for (const auto& in : h.inputs()) cert.inputs.push_back(in);
}

void tabulate_constrained(BoundCertificate& cert, const RateFunction& g,
                          const NumericsOptions& opts) {
  double T = find_T(g);
  if (std::isfinite(g.t_max()) && T >= g.eval_limit()) T = g.eval_limit();
  cert.rate_params.emplace_back("T", T);
  cert.validity_sup = kInf;
  for (double x : cert.x_grid) {
    const ChernoffResult r = constrained_chernoff_exponent(g, T, x, opts);
    cert.neg_log_bound.push_back(r.neg_log_bound);
    cert.bound.push_back(r.probability());
  }
}

void tabulate_rate(BoundCertificate& cert, const RateFunction& h, const NumericsOptions& opts) {
  cert.validity_sup = h.sup_value();
  for (double x : cert.x_grid) {
    if (!(x < cert.validity_sup)) {
      throw RangeError("x = " + fmt(x) + " is outside the validity range x < " +
                           fmt(cert.validity_sup),
                       cert.validity_sup);
    }
  }
  for (const ChernoffResult& r : tabulate_chernoff(h, cert.x_grid, opts)) {
    cert.neg_log_bound.push_back(r.neg_log_bound);
    cert.bound.push_back(r.probability());
  }
}

}  // namespace

BoundCertificate make_certificate(const IDVectorSpec& spec, const MomentSet& moments,
                                  const CertificateRequest& req) {
  moments.check();
  const BoundFamily fam = req.family;
  std::string why;
  if (!family_applicable(fam, spec, &why)) {
    throw ConfigError("family " + std::string(to_string(fam)) + " does not apply: " + why);
  }
  const bool lower_ok = fam == BoundFamily::kThm4 || fam == BoundFamily::kCor2 ||
                        fam == BoundFamily::kCor3 || fam == BoundFamily::kCor4 ||
                        fam == BoundFamily::kCor5;
  if (req.direction == Direction::kLower && !lower_ok) {
    throw ConfigError("family " + std::string(to_string(fam)) +
                      " has no lower-deviation form; use thm4, cor2, cor3, cor4 or cor5");
  }
  const bool needs_l2 = fam == BoundFamily::kThm1 || fam == BoundFamily::kThm4 ||
                        fam == BoundFamily::kCor2 || fam == BoundFamily::kCor3 ||
                        fam == BoundFamily::kCor4;
  if (needs_l2 && moments.p != 2.0) {
    throw ConfigError("family " + std::string(to_string(fam)) + " bounds the l_2 norm; p must be 2");
  }
  if ((fam == BoundFamily::kCor3 || fam == BoundFamily::kCor4) && !req.projection) {
    throw ConfigError("family " + std::string(to_string(fam)) + " needs a projection");
  }

  BoundCertificate cert;
  cert.family = std::string(to_string(fam));
  cert.measure = measure_label(spec);
  cert.d = spec.dim();
  cert.p = moments.p;
  cert.direction = req.direction;
  cert.x_grid = req.x_grid;
  const bool upper = req.direction == Direction::kUpper;
  const auto& g0 = spec.groups().front();
  const double p = moments.p;

  // Centering (1 + s eps) E, with E taken at the end that shrinks the event.
  auto centre = [&](const Estimate& E, double factor, std::string expr) {
    const double v = upper ? E.upper : E.lower;
    cert.centering = {std::move(expr), factor * v, E.used(upper ? "upper" : "lower")};
  };

  switch (fam) {
    case BoundFamily::kThm1: {
      const Estimate& l = need(moments.l, "l", fam);
      const Estimate& E = need(moments.E_norm_p, "E_norm_p", fam);
      RateFunction g = rate_thm1(g0.measure, l.lower);
      g.with_input(l.used("lower"));
      fill_from_rate(cert, g);
      centre(E, 1.0, "E||X||_2");
      tabulate_constrained(cert, g, req.numerics);
      break;
    }
    case BoundFamily::kThm2: {
      const Estimate& mp = need(moments.m_p, "m_p", fam);
      const Estimate& m2p = need(moments.m_2p, "m_2p", fam);
      const Estimate& E = need(moments.E_norm_p, "E_norm_p", fam);
      const SignClass s = marginal_sign_class(g0.measure, g0.drift);
      const LevyMeasure1D jumps =
          s == SignClass::kNonpositive ? g0.measure.reflected() : g0.measure;
      RateFunction h = rate_thm2(jumps, s, p, mp.lower, m2p.upper);
      h.with_input(mp.used("lower")).with_input(m2p.used("upper"));
      fill_from_rate(cert, h);
      centre(E, 1.0, "E||X||_p");
      tabulate_rate(cert, h, req.numerics);
      break;
    }
    case BoundFamily::kThm5: {
      const Estimate& E = need(moments.E_norm_p, "E_norm_p", fam);
      RateFunction h = rate_thm5(g0.measure, g0.drift, p, moments, spec.dim());
      const bool positive = h.label() == "thm5.positive.h";
      if (positive) {
        h.with_input(moments.m_p->used("lower")).with_input(moments.m_2p->used("upper"));
      } else {
        h.with_input(moments.mod_m_p_lower->used("lower"))
            .with_input(moments.mod_m_2p_upper->used("upper"));
        cert.dimension_dependent = p < 2.0;
      }
      fill_from_rate(cert, h);
      centre(E, 1.0, "E||X||_p");
      tabulate_rate(cert, h, req.numerics);
      break;
    }
    case BoundFamily::kThm4: {
      const Estimate& E = need(moments.E_norm_p, "E_norm_p", fam);
      RateFunction h = rate_thm4(spec, req.eps, E.lower);
      h.with_input(E.used("lower"));
      fill_from_rate(cert, h);
      cert.dimension_dependent = true;
      if (upper) {
        centre(E, 1.0 + req.eps, "(1+eps)E||X||_2");
      } else {
        centre(E, 1.0 - req.eps, "(1-eps)E||X||_2");
      }
      tabulate_rate(cert, h, req.numerics);
      break;
    }
    case BoundFamily::kCor2: {
      const Estimate& E = need(moments.E_norm_p, "E_norm_p", fam);
      const Cor2Constants c = cor2_constants(spec, req.eps, E.lower);
      const RateFunction h0 = cor2_dominating_rate(c.V_eps_sq, c.R);
      cert.rate_label = h0.label();
      cert.rate_params = h0.params();
      cert.rate_params.emplace_back("eps", req.eps);
      cert.rate_params.emplace_back("E_norm_2", E.lower);
      cert.inputs.push_back(E.used("lower"));
      cert.dimension_dependent = true;
      if (upper) {
        centre(E, 1.0 + req.eps, "(1+eps)E||X||_2");
      } else {
        centre(E, 1.0 - req.eps, "(1-eps)E||X||_2");
      }
      cert.validity_sup = kInf;
      RateInverter inv(h0, req.numerics);
      for (double x : cert.x_grid) {
        const double closed = cor2_neg_log_bound(c.V_eps_sq, c.R, x);
        if (x > 0.0) {
          const ChernoffResult r = chernoff_exponent(inv, x);
          const double diff = std::abs(r.neg_log_bound - closed);
          if (diff > req.numerics.agreement_rel_tol * std::max(closed, 1e-300)) {
            throw NumericError("closed form and Chernoff pipeline disagree at x = " + fmt(x),
                               diff / closed);
          }
        }
        cert.neg_log_bound.push_back(closed);
        cert.bound.push_back(std::exp(-closed));
      }
      break;
    }
    case BoundFamily::kCor3: {
      const Estimate& E = need(moments.E_norm_p, "E_norm_p", fam);
      RateFunction h = rate_projection(spec, *req.projection, ProjectionVariant::kCor3);
      fill_from_rate(cert, h);
      const double off = req.projection->offset;
      if (upper) {
        centre(E, 1.0, "E||P X||_2 + E");
      } else {
        centre(E, 1.0, "E||P X||_2 - E");
      }
      cert.centering.value += upper ? off : -off;
      cert.dimension_dependent = true;
      tabulate_rate(cert, h, req.numerics);
      break;
    }
    case BoundFamily::kCor4: {
      const Estimate& ex2 = need(moments.E_X1_sq, "E_X1_sq", fam);
      RateFunction h = rate_projection(spec, *req.projection, ProjectionVariant::kCor4, ex2.lower);
      h.with_input(ex2.used("lower"));
      fill_from_rate(cert, h);
      double sum_sq = 0.0;
      for (double pi : req.projection->col_norms) sum_sq += pi * pi;
      const double eps = req.projection->offset;
      if (upper) {
        const double root = std::sqrt(ex2.upper * sum_sq);
        cert.centering = {"(1+eps)sqrt(E||P X||_2^2)", (1.0 + eps) * root, ex2.used("upper")};
      } else {
        // The lower form follows from the E-offset rate with E = eps sqrt(E||P X||^2),
        // so the centering is E||P X||_2 - eps sqrt(E||P X||_2^2).
        const Estimate& E = need(moments.E_norm_p, "E_norm_p", fam);
        const double root = std::sqrt(ex2.upper * sum_sq);
        cert.centering = {"E||P X||_2 - eps sqrt(E||P X||_2^2)", E.lower - eps * root,
                          E.used("lower")};
        cert.inputs.push_back(ex2.used("upper"));
      }
      tabulate_rate(cert, h, req.numerics);
      break;
    }
    case BoundFamily::kCor5: {
      const Estimate& E = need(moments.E_norm_p, "E_norm_p", fam);
      RateFunction h = rate_cor5(g0.measure, p, spec.dim(), req.eps, E.lower);
      h.with_input(E.used("lower"));
      fill_from_rate(cert, h);
      cert.dimension_dependent = true;
      if (upper) {
        centre(E, 1.0 + req.eps, "(1+eps)E||X||_p");
      } else {
        centre(E, 1.0 - req.eps, "(1-eps)E||X||_p");
      }
      tabulate_rate(cert, h, req.numerics);
      break;
    }
  }
  if (std::isfinite(cert.validity_sup)) {
    cert.notes.push_back("valid for x < h(t_max^-) = " + fmt(cert.validity_sup));
  }
  for (const auto& g : spec.groups()) {
    if (std::holds_alternative<CustomDensity>(g.measure.family())) {
      cert.notes.push_back("declared M = " + fmt(exp_moment_abscissa(g.measure)) +
                           ", R = " + fmt(support_radius(g.measure)));
    }
  }
  check_certificate(cert);
  return cert;
}

BoundCertificate bound_thm1(const IDVectorSpec& spec, const MomentSet& moments,
                            std::span<const double> x_grid, const NumericsOptions& opts) {
  CertificateRequest req;
  req.family = BoundFamily::kThm1;
  req.x_grid.assign(x_grid.begin(), x_grid.end());
  req.numerics = opts;
  return make_certificate(spec, moments, req);
}

}  // namespace levyconc
