#include "levyconc/levy_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "levyconc/error.hpp"

namespace levyconc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDomain: return "domain error";
    case ErrorKind::kRange: return "range error";
    case ErrorKind::kConfig: return "configuration error";
    case ErrorKind::kNumeric: return "numeric error";
    case ErrorKind::kUnsupported: return "unsupported";
  }
  return "error";
}

std::string_view to_string(SignClass s) {
  switch (s) {
    case SignClass::kSymmetric: return "symmetric";
    case SignClass::kNonnegative: return "nonnegative";
    case SignClass::kNonpositive: return "nonpositive";
    case SignClass::kGeneral: return "general";
  }
  return "general";
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

using Gk = boost::math::quadrature::gauss_kronrod<double, 31>;

struct Accum {
  double value = 0.0;
  double error = 0.0;
};

void gk(const std::function<double(double)>& g, double a, double b,
        const QuadratureOptions& opts, Accum& acc) {
  if (!(b > a)) return;
  double err = 0.0;
  double l1 = 0.0;
  const double v = Gk::integrate(g, a, b, opts.max_depth, opts.rel_tol * 1e-2,
                                 &err, &l1);
  if (!std::isfinite(v)) {
    throw NumericError("quadrature produced a non-finite value on [" + fmt(a) +
                           ", " + fmt(b) + "]",
                       kInf);
  }
  acc.value += v;
  acc.error += err;
}

// Integral of g over [start, inf) where |g(u)| <= C u^power e^{-decay u}.
// Doubling shells stop once the envelope bound on the remainder drops below
// tail_rel_tol of the running total.
double integrate_to_infinity(const std::function<double(double)>& g, double start,
                             double decay, double power,
                             const QuadratureOptions& opts, Accum& acc,
                             double running_total) {
  if (!(decay > 0.0)) {
    throw DomainError("integrand does not decay: beyond exponential-moment abscissa");
  }
  double lo = std::max(start, 1.0);
  for (int shell = 0; shell < 400; ++shell) {
    const double hi = 2.0 * lo;
    gk(g, lo, hi, opts, acc);
    const double edge = std::abs(g(hi));
    const double k = std::max(power, 0.0);
    if (decay * hi > k) {
      const double remainder = 2.0 * edge / (decay - k / hi);
      const double scale = std::abs(running_total + acc.value);
      if (remainder <= opts.tail_rel_tol * scale || (edge == 0.0 && scale == 0.0) ||
          remainder < 1e-300) {
        return hi;
      }
    }
    lo = hi;
  }
  throw NumericError("unbounded-support cutoff search did not terminate", kInf);
}

// Integrates g * density over one piece.
double integrate_piece(const DensityPiece& piece, const JumpIntegrand& f,
                       const QuadratureOptions& opts, Accum& acc,
                       double running_total) {
  const auto g = [&](double u) {
    if (u == 0.0) return 0.0;
    if (f.damped && piece.undamped) {
      const double a = std::abs(u);
      return f.damped(u) * piece.undamped(u) * std::exp((f.growth_rate - piece.tail_decay) * a);
    }
    const double val = f.f(u);
    if (val == 0.0) return 0.0;
    return val * piece.density(u);
  };
  std::vector<double> cuts = {-1.0, 0.0, 1.0};
  cuts.insert(cuts.end(), piece.breakpoints.begin(), piece.breakpoints.end());
  const double flo = std::isfinite(piece.lo) ? piece.lo : std::min(-1.0, piece.hi);
  const double fhi = std::isfinite(piece.hi) ? piece.hi : std::max(1.0, piece.lo);
  cuts.push_back(flo);
  cuts.push_back(fhi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(),
                            [&](double c) { return c < flo || c > fhi; }),
             cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) gk(g, cuts[i], cuts[i + 1], opts, acc);

  double cutoff = 0.0;
  const double decay = piece.tail_decay - f.growth_rate;
  const double power = piece.tail_power + f.degree;
  if (!std::isfinite(piece.hi)) {
    cutoff = std::max(cutoff, integrate_to_infinity(g, fhi, decay, power, opts, acc,
                                                    running_total));
  }
  if (!std::isfinite(piece.lo)) {
    const auto mirrored = [&](double u) { return g(-u); };
    cutoff = std::max(cutoff, integrate_to_infinity(mirrored, -flo, decay, power,
                                                    opts, acc, running_total));
  }
  return cutoff;
}

// Sum of dyadic shells of g * density approaching 0 from both sides. Returns
// nullopt when the shells do not shrink geometrically.
std::optional<double> near_zero_shells(const DensityPiece& piece,
                                       const std::function<double(double)>& g) {
  double total = 0.0;
  for (int side : {1, -1}) {
    const double reach = side > 0 ? std::min(1.0, piece.hi) : std::min(1.0, -piece.lo);
    if (!(reach > 0.0)) continue;
    const bool touches_zero = side > 0 ? piece.lo <= 0.0 : piece.hi >= 0.0;
    if (!touches_zero) continue;
    double prev = -1.0;
    bool converged = false;
    double side_total = 0.0;
    double hi = reach;
    for (int j = 0; j < 400; ++j) {
      const double lo = hi / 2.0;
      Accum acc;
      const auto h = [&](double v) {
        const double u = side * v;
        return g(u) * piece.density(u);
      };
      double err = 0.0;
      acc.value = Gk::integrate(h, lo, hi, 10, 1e-10, &err);
      const double shell = std::abs(acc.value);
      side_total += shell;
      if (shell == 0.0) {
        converged = true;
        break;
      }
      if (prev > 0.0) {
        const double ratio = shell / prev;
        if (ratio <= 0.95 && shell * ratio / (1.0 - ratio) <= 1e-12 * side_total) {
          converged = true;
          break;
        }
      }
      prev = shell;
      hi = lo;
    }
    if (!converged) return std::nullopt;
    total += side_total;
  }
  return total;
}

}  // namespace

struct LevyMeasure1D::Impl {
  Family family;
  std::vector<JumpAtom> atoms;
  std::vector<DensityPiece> pieces;
  SignClass sign = SignClass::kGeneral;
  double M = kInf;
  double R = kInf;
};

LevyMeasure1D::LevyMeasure1D(Family family) {
  auto impl = std::make_shared<Impl>();
  std::visit(
      Overloaded{
          [&](const SymmetricExponential& f) {
            if (!positive_finite(f.scale)) {
              throw ConfigError("symmetric_exponential: scale must be > 0");
            }
            const double s = f.scale;
            const auto dens = [s](double u) { return std::exp(-std::abs(u) / s) / std::abs(u); };
            const auto undamped = [](double u) { return 1.0 / std::abs(u); };
            impl->pieces.push_back({dens, -kInf, 0.0, 1.0 / s, -1.0, {}, undamped});
            impl->pieces.push_back({dens, 0.0, kInf, 1.0 / s, -1.0, {}, undamped});
            impl->sign = SignClass::kSymmetric;
            impl->M = 1.0 / s;
            impl->R = kInf;
          },
          [&](const GammaLevy& f) {
            if (!positive_finite(f.rate) || !positive_finite(f.shape)) {
              throw ConfigError("gamma_levy: rate and shape must be > 0");
            }
            const double a = f.rate;
            const double t0 = f.shape;
            impl->pieces.push_back(
                {[a, t0](double u) { return t0 * std::exp(-a * u) / u; }, 0.0, kInf, a,
                 -1.0, {}, [t0](double u) { return t0 / u; }});
            impl->sign = SignClass::kNonnegative;
            impl->M = a;
            impl->R = kInf;
          },
          [&](const PoissonAtom& f) {
            if (!positive_finite(f.intensity)) {
              throw ConfigError("poisson_atom: intensity must be > 0");
            }
            if (!std::isfinite(f.jump) || f.jump == 0.0) {
              throw ConfigError("poisson_atom: jump must be finite and nonzero");
            }
            impl->atoms.push_back({f.jump, f.intensity});
            impl->sign = f.jump > 0 ? SignClass::kNonnegative : SignClass::kNonpositive;
            impl->M = kInf;
            impl->R = std::abs(f.jump);
          },
          [&](const CompoundPoisson& f) {
            if (!positive_finite(f.rate)) {
              throw ConfigError("compound_poisson: rate must be > 0");
            }
            std::visit(
                Overloaded{
                    [&](const UniformJumps& j) {
                      if (!std::isfinite(j.lo) || !std::isfinite(j.hi) || !(j.lo < j.hi)) {
                        throw ConfigError("compound_poisson: uniform jumps need finite lo < hi");
                      }
                      const double dens = f.rate / (j.hi - j.lo);
                      impl->pieces.push_back({[dens](double) { return dens; }, j.lo, j.hi,
                                              0.0, 0.0, {}, {}});
                      if (j.lo >= 0.0) {
                        impl->sign = SignClass::kNonnegative;
                      } else if (j.hi <= 0.0) {
                        impl->sign = SignClass::kNonpositive;
                      } else if (j.lo == -j.hi) {
                        impl->sign = SignClass::kSymmetric;
                      }
                      impl->R = std::max(std::abs(j.lo), std::abs(j.hi));
                    },
                    [&](const DiscreteJumps& j) {
                      if (j.values.empty() || j.values.size() != j.probs.size()) {
                        throw ConfigError(
                            "compound_poisson: discrete jumps need matching values/probs");
                      }
                      double total = 0.0;
                      for (std::size_t i = 0; i < j.values.size(); ++i) {
                        if (!std::isfinite(j.values[i]) || j.values[i] == 0.0) {
                          throw ConfigError("compound_poisson: jump values must be finite and nonzero");
                        }
                        if (!(j.probs[i] >= 0.0)) {
                          throw ConfigError("compound_poisson: probs must be >= 0");
                        }
                        total += j.probs[i];
                      }
                      if (std::abs(total - 1.0) > 1e-9) {
                        throw ConfigError("compound_poisson: probs must sum to 1");
                      }
                      bool nonneg = true, nonpos = true;
                      double radius = 0.0;
                      for (std::size_t i = 0; i < j.values.size(); ++i) {
                        if (j.probs[i] == 0.0) continue;
                        impl->atoms.push_back({j.values[i], f.rate * j.probs[i] / total});
                        nonneg = nonneg && j.values[i] > 0;
                        nonpos = nonpos && j.values[i] < 0;
                        radius = std::max(radius, std::abs(j.values[i]));
                      }
                      bool symmetric = true;
                      for (const auto& a : impl->atoms) {
                        double mirror = 0.0;
                        for (const auto& b : impl->atoms) {
                          if (b.location == -a.location) mirror += b.mass;
                        }
                        double same = 0.0;
                        for (const auto& b : impl->atoms) {
                          if (b.location == a.location) same += b.mass;
                        }
                        symmetric = symmetric && std::abs(mirror - same) <= 1e-12 * same;
                      }
                      impl->sign = nonneg    ? SignClass::kNonnegative
                                   : nonpos  ? SignClass::kNonpositive
                                   : symmetric ? SignClass::kSymmetric
                                               : SignClass::kGeneral;
                      impl->R = radius;
                    }},
                f.jumps);
            impl->M = kInf;
          },
          [&](const CustomDensity& f) {
            if (!f.density) throw ConfigError("custom_density: density is empty");
            if (!std::isfinite(f.support_lo) || !std::isfinite(f.support_hi) ||
                !(f.support_lo < f.support_hi)) {
              throw ConfigError("custom_density: support must be a finite interval lo < hi");
            }
            if (!f.declared_M) {
              throw ConfigError("custom_density: field 'M' must be declared (no numeric probing)");
            }
            if (!(*f.declared_M > 0.0)) throw ConfigError("custom_density: 'M' must be > 0");
            if (f.declared_R && !(*f.declared_R > 0.0)) {
              throw ConfigError("custom_density: 'R' must be > 0");
            }
            DensityPiece piece{f.density, f.support_lo, f.support_hi, 0.0, 0.0, {}, {}};
            for (const auto& [u, k] : f.table) {
              if (u > f.support_lo && u < f.support_hi) piece.breakpoints.push_back(u);
            }
            impl->pieces.push_back(std::move(piece));
            if (f.support_lo >= 0.0) {
              impl->sign = SignClass::kNonnegative;
            } else if (f.support_hi <= 0.0) {
              impl->sign = SignClass::kNonpositive;
            }
            impl->M = *f.declared_M;
            impl->R = f.declared_R.value_or(kInf);
          }},
      family);
  impl->family = std::move(family);
  impl_ = std::move(impl);

  if (std::holds_alternative<CustomDensity>(impl_->family)) {
    const auto sq = [](double u) { return u * u; };
    if (!near_zero_shells(impl_->pieces.front(), sq)) {
      throw DomainError("custom_density: int (1 ∧ u^2) nu(du) diverges at 0");
    }
  }
}

LevyMeasure1D LevyMeasure1D::symmetric_exponential(double scale) {
  return LevyMeasure1D(SymmetricExponential{scale});
}
LevyMeasure1D LevyMeasure1D::gamma_levy(double rate, double shape) {
  return LevyMeasure1D(GammaLevy{rate, shape});
}
LevyMeasure1D LevyMeasure1D::poisson_atom(double intensity, double jump) {
  return LevyMeasure1D(PoissonAtom{intensity, jump});
}
LevyMeasure1D LevyMeasure1D::compound_poisson(double rate, UniformJumps jumps) {
  return LevyMeasure1D(CompoundPoisson{rate, jumps});
}
LevyMeasure1D LevyMeasure1D::compound_poisson(double rate, DiscreteJumps jumps) {
  return LevyMeasure1D(CompoundPoisson{rate, std::move(jumps)});
}
LevyMeasure1D LevyMeasure1D::custom_density(std::function<double(double)> density,
                                            double support_lo, double support_hi,
                                            std::optional<double> declared_M,
                                            std::optional<double> declared_R) {
  return LevyMeasure1D(CustomDensity{std::move(density), support_lo, support_hi,
                                     declared_M, declared_R, {}});
}

LevyMeasure1D LevyMeasure1D::custom_table(std::vector<std::pair<double, double>> nodes,
                                          std::optional<double> declared_M,
                                          std::optional<double> declared_R) {
  if (nodes.size() < 2) throw ConfigError("custom_density: density_table needs >= 2 nodes");
  std::sort(nodes.begin(), nodes.end());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!std::isfinite(nodes[i].first) || !std::isfinite(nodes[i].second) ||
        nodes[i].second < 0.0) {
      throw ConfigError("custom_density: density_table entries must be finite, k >= 0");
    }
    if (i > 0 && nodes[i].first == nodes[i - 1].first) {
      throw ConfigError("custom_density: density_table has duplicate u");
    }
  }
  auto shared = std::make_shared<const std::vector<std::pair<double, double>>>(nodes);
  auto density = [shared](double u) {
    const auto& t = *shared;
    if (u < t.front().first || u > t.back().first) return 0.0;
    auto it = std::lower_bound(t.begin(), t.end(), u,
                               [](const auto& node, double x) { return node.first < x; });
    if (it == t.begin()) return it->second;
    const auto& [u1, k1] = *it;
    const auto& [u0, k0] = *(it - 1);
    return k0 + (k1 - k0) * (u - u0) / (u1 - u0);
  };
  CustomDensity c{density, nodes.front().first, nodes.back().first, declared_M,
                  declared_R, nodes};
  return LevyMeasure1D(std::move(c));
}

const Family& LevyMeasure1D::family() const { return impl_->family; }

std::string_view LevyMeasure1D::family_name() const {
  return std::visit(Overloaded{
                        [](const SymmetricExponential&) { return "symmetric_exponential"; },
                        [](const GammaLevy&) { return "gamma_levy"; },
                        [](const PoissonAtom&) { return "poisson_atom"; },
                        [](const CompoundPoisson&) { return "compound_poisson"; },
                        [](const CustomDensity&) { return "custom_density"; }},
                    impl_->family);
}

std::span<const JumpAtom> LevyMeasure1D::atoms() const { return impl_->atoms; }
std::span<const DensityPiece> LevyMeasure1D::densities() const { return impl_->pieces; }
SignClass LevyMeasure1D::sign_class() const { return impl_->sign; }
double LevyMeasure1D::abscissa() const { return impl_->M; }
double LevyMeasure1D::support_radius() const { return impl_->R; }

LevyMeasure1D LevyMeasure1D::reflected() const {
  return std::visit(
      Overloaded{
          [&](const SymmetricExponential&) { return *this; },
          [](const GammaLevy&) -> LevyMeasure1D {
            throw UnsupportedError("gamma_levy has no reflected family");
          },
          [](const PoissonAtom& f) { return poisson_atom(f.intensity, -f.jump); },
          [](const CompoundPoisson& f) {
            return std::visit(
                Overloaded{[&](const UniformJumps& j) {
                             return compound_poisson(f.rate, UniformJumps{-j.hi, -j.lo});
                           },
                           [&](const DiscreteJumps& j) {
                             DiscreteJumps r = j;
                             for (auto& v : r.values) v = -v;
                             return compound_poisson(f.rate, std::move(r));
                           }},
                f.jumps);
          },
          [](const CustomDensity& f) {
            CustomDensity r = f;
            auto dens = f.density;
            r.density = [dens](double u) { return dens(-u); };
            r.support_lo = -f.support_hi;
            r.support_hi = -f.support_lo;
            for (auto& [u, k] : r.table) u = -u;
            std::sort(r.table.begin(), r.table.end());
            return LevyMeasure1D(std::move(r));
          }},
      impl_->family);
}

IntegralResult integrate(const LevyMeasure1D& m, const JumpIntegrand& f,
                         const QuadratureOptions& opts) {
  IntegralResult out;
  for (const auto& atom : m.atoms()) out.value += atom.mass * f.f(atom.location);
  Accum acc;
  for (const auto& piece : m.densities()) {
    out.cutoff = std::max(out.cutoff, integrate_piece(piece, f, opts, acc, out.value));
  }
  out.value += acc.value;
  out.error = acc.error;
  const double allowed = std::max(opts.abs_tol, opts.rel_tol * std::abs(out.value));
  if (!(out.error <= allowed)) {
    throw NumericError("quadrature over nu did not converge: achieved error " +
                           fmt(out.error) + " > " + fmt(allowed),
                       out.error);
  }
  return out;
}

namespace {

void check_t(const LevyMeasure1D& m, double t) {
  if (!(t >= 0.0) || std::isnan(t)) throw DomainError("t must be >= 0");
  if (!(t < m.abscissa())) {
    throw DomainError("t = " + fmt(t) + " is beyond exponential-moment abscissa M = " +
                      fmt(m.abscissa()));
  }
}

}  // namespace

double exp_moment_integral_quadrature(const LevyMeasure1D& m, double t, double r,
                                      const QuadratureOptions& opts) {
  check_t(m, t);
  if (!(r > 0.0)) throw DomainError("power r must be > 0");
  if (t == 0.0) return 0.0;
  JumpIntegrand f{[t, r](double u) {
                    const double a = std::abs(u);
                    return std::pow(a, r) * std::expm1(t * a);
                  },
                  t, r,
                  [t, r](double u) {
                    const double a = std::abs(u);
                    return -std::pow(a, r) * std::expm1(-t * a);
                  }};
  return integrate(m, f, opts).value;
}

double exp_moment_integral(const LevyMeasure1D& m, double t, double r) {
  check_t(m, t);
  if (!(r > 0.0)) throw DomainError("power r must be > 0");
  if (t == 0.0) return 0.0;
  const Family& fam = m.family();
  if (const auto* f = std::get_if<SymmetricExponential>(&fam)) {
    const double s = f->scale;
    return 2.0 * std::tgamma(r) * std::pow(s, r) * std::expm1(-r * std::log1p(-s * t));
  }
  if (const auto* f = std::get_if<GammaLevy>(&fam)) {
    return f->shape * std::tgamma(r) * std::pow(f->rate, -r) *
           std::expm1(-r * std::log1p(-t / f->rate));
  }
  if (!m.atoms().empty() && m.densities().empty()) {
    double sum = 0.0;
    for (const auto& a : m.atoms()) {
      const double au = std::abs(a.location);
      sum += a.mass * std::pow(au, r) * std::expm1(t * au);
    }
    return sum;
  }
  return exp_moment_integral_quadrature(m, t, r);
}

double poly_moment_quadrature(const LevyMeasure1D& m, double q,
                              const QuadratureOptions& opts) {
  if (!(q > 0.0)) throw DomainError("power q must be > 0");
  if (std::holds_alternative<CustomDensity>(m.family())) {
    const auto g = [q](double u) { return std::pow(std::abs(u), q); };
    if (!near_zero_shells(m.densities().front(), g)) {
      throw DomainError("int |u|^" + fmt(q) + " nu(du) diverges at 0");
    }
  }
  JumpIntegrand f{[q](double u) { return std::pow(std::abs(u), q); }, 0.0, q, {}};
  return integrate(m, f, opts).value;
}

double poly_moment(const LevyMeasure1D& m, double q) {
  if (!(q > 0.0)) throw DomainError("power q must be > 0");
  const Family& fam = m.family();
  if (const auto* f = std::get_if<SymmetricExponential>(&fam)) {
    return 2.0 * std::tgamma(q) * std::pow(f->scale, q);
  }
  if (const auto* f = std::get_if<GammaLevy>(&fam)) {
    return f->shape * std::tgamma(q) * std::pow(f->rate, -q);
  }
  if (const auto* f = std::get_if<CompoundPoisson>(&fam)) {
    if (const auto* u = std::get_if<UniformJumps>(&f->jumps)) {
      const auto prim = [q](double x) {  // int_0^x |v|^q dv, signed
        return std::copysign(std::pow(std::abs(x), q + 1.0) / (q + 1.0), x);
      };
      return f->rate * (prim(u->hi) - prim(u->lo)) / (u->hi - u->lo);
    }
  }
  if (!m.atoms().empty() && m.densities().empty()) {
    double sum = 0.0;
    for (const auto& a : m.atoms()) sum += a.mass * std::pow(std::abs(a.location), q);
    return sum;
  }
  return poly_moment_quadrature(m, q);
}

double exp_moment_abscissa(const LevyMeasure1D& m) { return m.abscissa(); }
double support_radius(const LevyMeasure1D& m) { return m.support_radius(); }

double levy_condition_integral(const LevyMeasure1D& m) {
  const auto g = [](double u) { return std::min(1.0, u * u); };
  for (const auto& piece : m.densities()) {
    if (!near_zero_shells(piece, g)) {
      throw DomainError("int (1 ∧ u^2) nu(du) diverges at 0");
    }
  }
  return integrate(m, {g, 0.0, 0.0, {}}).value;
}

double small_jump_first_moment(const LevyMeasure1D& m) {
  const Family& fam = m.family();
  if (const auto* f = std::get_if<SymmetricExponential>(&fam)) {
    return -2.0 * f->scale * std::expm1(-1.0 / f->scale);
  }
  if (const auto* f = std::get_if<GammaLevy>(&fam)) {
    return -f->shape * std::expm1(-f->rate) / f->rate;
  }
  const auto g = [](double u) { return std::abs(u) <= 1.0 ? std::abs(u) : 0.0; };
  for (const auto& piece : m.densities()) {
    if (!near_zero_shells(piece, g)) {
      throw UnsupportedError(
          "infinite-variation measure: int_{|u|<=1} |u| nu(du) diverges; not simulated");
    }
  }
  return integrate(m, {g, 0.0, 0.0, {}}).value;
}

double jump_mean(const LevyMeasure1D& m) {
  const Family& fam = m.family();
  if (std::holds_alternative<SymmetricExponential>(fam)) return 0.0;
  if (const auto* f = std::get_if<GammaLevy>(&fam)) return f->shape / f->rate;
  small_jump_first_moment(m);
  return integrate(m, {[](double u) { return u; }, 0.0, 1.0, {}}).value;
}

SignClass marginal_sign_class(const LevyMeasure1D& m, double drift) {
  switch (m.sign_class()) {
    case SignClass::kSymmetric:
      return drift == 0.0 ? SignClass::kSymmetric : SignClass::kGeneral;
    case SignClass::kNonnegative:
      return drift >= 0.0 ? SignClass::kNonnegative : SignClass::kGeneral;
    case SignClass::kNonpositive:
      return drift <= 0.0 ? SignClass::kNonpositive : SignClass::kGeneral;
    case SignClass::kGeneral:
      return SignClass::kGeneral;
  }
  return SignClass::kGeneral;
}

IDVectorSpec IDVectorSpec::iid(LevyMeasure1D m, std::size_t d, double drift) {
  if (d < 1) throw ConfigError("d must be >= 1");
  if (!std::isfinite(drift)) throw ConfigError("drift must be finite");
  small_jump_first_moment(m);
  IDVectorSpec s;
  s.groups_.push_back({std::move(m), drift, d});
  s.dim_ = d;
  s.iid_ = true;
  return s;
}

IDVectorSpec IDVectorSpec::independent(std::vector<LevyMeasure1D> measures,
                                       std::vector<double> drifts) {
  if (measures.empty()) throw ConfigError("coordinate list must be nonempty");
  if (drifts.empty()) drifts.assign(measures.size(), 0.0);
  if (drifts.size() != measures.size()) {
    throw ConfigError("drift list length must equal the number of coordinates");
  }
  IDVectorSpec s;
  s.dim_ = measures.size();
  s.iid_ = false;
  for (std::size_t k = 0; k < measures.size(); ++k) {
    if (!std::isfinite(drifts[k])) throw ConfigError("drift must be finite");
    small_jump_first_moment(measures[k]);
    s.groups_.push_back({std::move(measures[k]), drifts[k], 1});
  }
  return s;
}

const LevyMeasure1D& IDVectorSpec::coordinate(std::size_t k) const {
  if (k >= dim_) throw ConfigError("coordinate index out of range");
  return iid_ ? groups_.front().measure : groups_[k].measure;
}

double IDVectorSpec::drift(std::size_t k) const {
  if (k >= dim_) throw ConfigError("coordinate index out of range");
  return iid_ ? groups_.front().drift : groups_[k].drift;
}

IDVectorSpec IDVectorSpec::with_dim(std::size_t d) const {
  if (!iid_) throw ConfigError("with_dim requires an i.i.d. spec");
  return iid(groups_.front().measure, d, groups_.front().drift);
}

}  // namespace levyconc
