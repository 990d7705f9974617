#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace levyconc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Lévy-measure families. Densities are with respect to Lebesgue measure on
// R \ {0}.

/// nu(du) = exp(-|u| / scale) / |u| du. The time-1 law is Laplace(scale).
struct SymmetricExponential {
  double scale = 1.0;
};

/// nu(du) = shape * exp(-rate u) / u du on u > 0. The time-z law is
/// Gamma(z * shape, rate).
struct GammaLevy {
  double rate = 1.0;
  double shape = 1.0;
};

/// nu = intensity * delta_jump.
struct PoissonAtom {
  double intensity = 1.0;
  double jump = 1.0;
};

struct UniformJumps {
  double lo = 0.0;
  double hi = 1.0;
};

struct DiscreteJumps {
  std::vector<double> values;
  std::vector<double> probs;
};

/// nu = rate * (law of one jump).
struct CompoundPoisson {
  double rate = 1.0;
  std::variant<UniformJumps, DiscreteJumps> jumps;
};

/// Caller-supplied density on a bounded interval. M and R are never inferred;
/// they are echoed into every certificate built from this measure.
struct CustomDensity {
  std::function<double(double)> density;
  double support_lo = 0.0;
  double support_hi = 0.0;
  std::optional<double> declared_M;
  std::optional<double> declared_R;
  /// Node table (u, k(u)) when the density is piecewise linear; empty for a
  /// function-backed density.
  std::vector<std::pair<double, double>> table;
};

using Family = std::variant<SymmetricExponential, GammaLevy, PoissonAtom,
                            CompoundPoisson, CustomDensity>;

/// Sign structure of a law on R.
enum class SignClass { kSymmetric, kNonnegative, kNonpositive, kGeneral };

std::string_view to_string(SignClass s);

struct JumpAtom {
  double location;
  double mass;
};

/// One absolutely continuous piece of a Lévy measure. For pieces with an
/// infinite end, |density(u)| <= C |u|^tail_power exp(-tail_decay |u|).
struct DensityPiece {
  std::function<double(double)> density;
  double lo;
  double hi;
  double tail_decay = 0.0;
  double tail_power = 0.0;
  /// Interior points where the density is not smooth.
  std::vector<double> breakpoints;
  /// density(u) * exp(tail_decay |u|), when known in closed form. Lets
  /// integrands near the abscissa be evaluated without overflow.
  std::function<double(double)> undamped;
};

/// A one-dimensional Lévy measure. Immutable and cheap to copy; safe to share
/// across threads.
class LevyMeasure1D {
 public:
  explicit LevyMeasure1D(Family family);

  static LevyMeasure1D symmetric_exponential(double scale);
  static LevyMeasure1D gamma_levy(double rate, double shape);
  static LevyMeasure1D poisson_atom(double intensity, double jump);
  static LevyMeasure1D compound_poisson(double rate, UniformJumps jumps);
  static LevyMeasure1D compound_poisson(double rate, DiscreteJumps jumps);
  static LevyMeasure1D custom_density(std::function<double(double)> density,
                                      double support_lo, double support_hi,
                                      std::optional<double> declared_M,
                                      std::optional<double> declared_R);
  /// Piecewise-linear density through the (u, k) nodes, zero outside them.
  static LevyMeasure1D custom_table(std::vector<std::pair<double, double>> nodes,
                                    std::optional<double> declared_M,
                                    std::optional<double> declared_R);

  const Family& family() const;
  std::string_view family_name() const;

  std::span<const JumpAtom> atoms() const;
  std::span<const DensityPiece> densities() const;

  /// Sign structure of the jumps (the drift-free marginal).
  SignClass sign_class() const;

  /// M = sup{t : int_{|u|>1} e^{t|u|} nu(du) < inf}.
  double abscissa() const;
  /// R = inf{rho : nu(|u| > rho) = 0}.
  double support_radius() const;

  /// u -> -u push-forward.
  LevyMeasure1D reflected() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

struct QuadratureOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-8;
  /// Remainder beyond the cutoff must stay below this fraction of the total.
  double tail_rel_tol = 1e-12;
  unsigned max_depth = 15;
};

/// Integrand f(u) against nu. The caller promises |f(u)| = O(|u|^degree
/// e^{growth_rate |u|}) at infinity and f(u) = O(|u|) at zero.
struct JumpIntegrand {
  std::function<double(double)> f;
  double growth_rate = 0.0;
  double degree = 0.0;
  /// Optional f(u) * exp(-growth_rate |u|).
  std::function<double(double)> damped;
};

struct IntegralResult {
  double value = 0.0;
  double error = 0.0;
  /// Largest |u| reached on an unbounded piece (0 when none).
  double cutoff = 0.0;
};

/// Integrates f against nu: atoms are summed, densities are integrated by
/// adaptive Gauss-Kronrod split at 0 and |u| = 1, with doubling shells and an
/// exponential envelope for unbounded pieces.
IntegralResult integrate(const LevyMeasure1D& m, const JumpIntegrand& f,
                         const QuadratureOptions& opts = {});

/// int |u|^r (e^{t|u|} - 1) nu(du). Closed form where the family admits one,
/// quadrature otherwise. Requires 0 <= t < M.
double exp_moment_integral(const LevyMeasure1D& m, double t, double r);
double exp_moment_integral_quadrature(const LevyMeasure1D& m, double t, double r,
                                      const QuadratureOptions& opts = {});

/// int |u|^q nu(du).
double poly_moment(const LevyMeasure1D& m, double q);
double poly_moment_quadrature(const LevyMeasure1D& m, double q,
                              const QuadratureOptions& opts = {});

double exp_moment_abscissa(const LevyMeasure1D& m);
double support_radius(const LevyMeasure1D& m);

/// int (1 ∧ u^2) nu(du); throws DomainError when it diverges.
double levy_condition_integral(const LevyMeasure1D& m);

/// int_{|u|<=1} |u| nu(du); throws UnsupportedError on infinite variation.
double small_jump_first_moment(const LevyMeasure1D& m);

/// int u nu(du): the mean of the drift-free time-1 marginal.
double jump_mean(const LevyMeasure1D& m);

/// Sign class of drift + (pure-jump marginal).
SignClass marginal_sign_class(const LevyMeasure1D& m, double drift);

/// Law of an ID vector with independent coordinates. Coordinate k is
/// drift_k plus the uncompensated sum of its jumps, so every coordinate
/// measure must have finite variation.
class IDVectorSpec {
 public:
  struct Group {
    LevyMeasure1D measure;
    double drift;
    std::size_t count;
  };

  static IDVectorSpec iid(LevyMeasure1D m, std::size_t d, double drift = 0.0);
  static IDVectorSpec independent(std::vector<LevyMeasure1D> measures,
                                  std::vector<double> drifts = {});

  std::size_t dim() const { return dim_; }
  bool is_iid() const { return iid_; }
  const LevyMeasure1D& coordinate(std::size_t k) const;
  double drift(std::size_t k) const;
  /// Coordinates sharing a law, in coordinate order.
  const std::vector<Group>& groups() const { return groups_; }

  /// Same coordinate law(s), different dimension (i.i.d. specs only).
  IDVectorSpec with_dim(std::size_t d) const;

 private:
  IDVectorSpec() = default;
  std::vector<Group> groups_;
  std::size_t dim_ = 0;
  bool iid_ = true;
};

}  // namespace levyconc
