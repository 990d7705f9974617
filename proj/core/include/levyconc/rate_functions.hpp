#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "levyconc/levy_measure.hpp"
#include "levyconc/numerics.hpp"

namespace levyconc {

/// A scalar input with a confidence interval. Analytic values have
/// lower == value == upper.
struct Estimate {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  Provenance provenance;

  static Estimate analytic(double v, std::string quantity);
  /// Copy of the provenance tagged with the interval end actually consumed.
  Provenance used(std::string_view side) const;
};

/// Moment inputs consumed by the rate functions. Which fields are required
/// depends on the bound family.
struct MomentSet {
  double p = 2.0;
  std::optional<Estimate> m_p;             // E|X_1|^p
  std::optional<Estimate> m_2p;            // E|X_1|^{2p}
  std::optional<Estimate> l;               // -log E exp(-X_1^2)
  std::optional<Estimate> E_norm_p;        // E||X||_p
  std::optional<Estimate> E_X1_sq;         // E X_1^2
  std::optional<Estimate> mod_m_p_lower;   // inf over z of sign-split p-th moments
  std::optional<Estimate> mod_m_2p_upper;  // sup over z of sign-split 2p-th moments

  /// Cauchy-Schwarz m_2p >= m_p^2, l > 0, nonnegativity.
  void check() const;
};

/// Column norms pi_k = ||Pi_S e_k||_2 of an orthogonal projection, plus the
/// offset E (cor3 form) or epsilon (cor4 form).
struct ProjectionSpec {
  std::vector<double> col_norms;
  double offset = 0.0;

  /// From a row-major d x d projection matrix; checks symmetry, idempotence and
  /// sum pi_k^2 == trace.
  static ProjectionSpec from_matrix(std::span<const double> matrix, std::size_t d,
                                    double offset);
  /// Projection onto the first k coordinate axes of R^d.
  static ProjectionSpec leading_coordinates(std::size_t d, std::size_t k, double offset);
  void validate(std::size_t d) const;
};

enum class BoundFamily { kThm1, kThm2, kThm4, kThm5, kCor2, kCor3, kCor4, kCor5 };

std::string_view to_string(BoundFamily f);
BoundFamily parse_bound_family(std::string_view name);

// ---- rate functions -------------------------------------------------------

/// g(t) = (8 + 12 log 2 / l) I_1(t) + (8 / l) I_3(t), I_r the exponential-moment
/// integral of order r. Consumed by the constrained Chernoff bound.
RateFunction rate_thm1(const LevyMeasure1D& m, double l);

/// Dimension-free l_p rate for symmetric or nonnegative marginals.
RateFunction rate_thm2(const LevyMeasure1D& m, SignClass marginal, double p, double m_p,
                       double m_2p);

/// Sharper constants for nonnegative coordinates. The measure must have
/// nonnegative jumps.
RateFunction rate_thm5_positive(const LevyMeasure1D& m, double p, double m_p, double m_2p);

/// General-sign rate built on the modified moments. For 1 <= p < 2 the first
/// weight carries d^{2/p - 1} and `d` is required.
RateFunction rate_thm5_general(const LevyMeasure1D& m, double p, double mod_m_p_lower,
                               double mod_m_2p_upper,
                               std::optional<std::size_t> d = std::nullopt);

/// Routes a marginal to the positive-case rate when it is sign-definite and to
/// the general-case rate otherwise.
RateFunction rate_thm5(const LevyMeasure1D& m, double drift, double p,
                       const MomentSet& moments, std::size_t d);

RateFunction rate_thm4(const LevyMeasure1D& m, std::size_t d, double eps, double E_norm_2);
/// Independent-coordinate version (the cor3 rate with S = R^d).
RateFunction rate_thm4(const IDVectorSpec& spec, double eps, double E_norm_2);

enum class ProjectionVariant { kCor3, kCor4 };

/// kCor3 uses the caller's pi_k and offset E; kCor4 (i.i.d., centered) uses
/// offset = eps and E X_1^2.
RateFunction rate_projection(const IDVectorSpec& spec, const ProjectionSpec& proj,
                             ProjectionVariant variant, double E_X1_sq = 0.0);

RateFunction rate_cor5(const LevyMeasure1D& m, double p, std::size_t d, double eps,
                       double E_norm_p);

// ---- closed-form bounded-support bound ------------------------------------

struct Cor2Constants {
  double V_eps_sq = 0.0;
  double R = 0.0;
};

Cor2Constants cor2_constants(const IDVectorSpec& spec, double eps, double E_norm_2);
/// -log of exp(x/R - (x/R + V^2/R^2) log(1 + R x / V^2)).
double cor2_neg_log_bound(double V_sq, double R, double x);
double bound_cor2(const IDVectorSpec& spec, double eps, double E_norm_2, double x);
/// h0(t) = V^2 (e^{tR} - 1) / R, whose Chernoff transform is the closed form.
RateFunction cor2_dominating_rate(double V_sq, double R);

struct Thm3Report {
  double V_sq = 0.0;
  double lambda_max = 0.0;
  double R = 0.0;
  std::string statement;
};

/// V^2 = 8 int u^2 nu(du), lambda_max = R^2 / (e V^2).
Thm3Report thm3_report(const LevyMeasure1D& m);

// ---- certificates ---------------------------------------------------------

struct CertificateRequest {
  BoundFamily family = BoundFamily::kThm1;
  Direction direction = Direction::kUpper;
  double eps = 0.5;
  /// Required for kCor3 / kCor4.
  std::optional<ProjectionSpec> projection;
  std::vector<double> x_grid;
  NumericsOptions numerics;
};

/// Builds a certificate from Monte Carlo or analytic moments. Inputs in rate
/// denominators use their lower confidence limit, inputs in numerators their
/// upper limit; the centering uses the end that shrinks the event.
BoundCertificate make_certificate(const IDVectorSpec& spec, const MomentSet& moments,
                                  const CertificateRequest& request);

BoundCertificate bound_thm1(const IDVectorSpec& spec, const MomentSet& moments,
                            std::span<const double> x_grid,
                            const NumericsOptions& opts = {});

/// Whether a family's hypotheses hold for the vector (sign conditions, bounded
/// support, i.i.d.-ness). `reason` receives the first failing hypothesis.
bool family_applicable(BoundFamily family, const IDVectorSpec& spec,
                       std::string* reason = nullptr);

}  // namespace levyconc
