#include <cmath>
#include <numbers>
#include <string>

#include "doctest.h"
#include "levyconc/error.hpp"
#include "levyconc/rate_functions.hpp"
#include "oracle.hpp"

using namespace levyconc;
using doctest::Approx;

namespace {

// -log E exp(-X^2) for a standard Laplace variable, frozen from oracle::laplace_l().
constexpr double kLaplaceL = 0.60579336747233;
// -log E exp(-N^2), N ~ Poisson(1), frozen from oracle::poisson_l(1, 1).
constexpr double kPoissonL = 0.68005078142189;

double I(const LevyMeasure1D& m, double t, double r) { return exp_moment_integral(m, t, r); }

MomentSet analytic_moments(double p, double m_p, double m_2p, double E, double l = 1.0) {
  MomentSet ms;
  ms.p = p;
  ms.m_p = Estimate::analytic(m_p, "m_p");
  ms.m_2p = Estimate::analytic(m_2p, "m_2p");
  ms.E_norm_p = Estimate::analytic(E, "E_norm_p");
  ms.l = Estimate::analytic(l, "l");
  return ms;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, i / (n - 1.0)));
  return g;
}

}  // namespace

TEST_CASE("frozen inputs match their oracles") {
  CHECK(oracle::laplace_l() == Approx(kLaplaceL).epsilon(1e-10));
  CHECK(oracle::poisson_l(1.0, 1.0) == Approx(kPoissonL).epsilon(1e-12));
}

TEST_CASE("sub-Gaussian-regime rate for the symmetric exponential measure") {
  const auto m = LevyMeasure1D::symmetric_exponential(1.0);
  const RateFunction g = rate_thm1(m, kLaplaceL);
  CHECK(g(0.0) == 0.0);
  const double t = 0.05;
  const double c1 = 8.0 + 12.0 * std::log(2.0) / kLaplaceL, c3 = 8.0 / kLaplaceL;
  const double want = c1 * 2.0 * t / (1.0 - t) + c3 * 4.0 * (std::pow(1.0 - t, -3.0) - 1.0);
  CHECK(g(t) == Approx(want).epsilon(1e-12));
  CHECK(g(t) == Approx(11.0746).epsilon(1e-4));
  const double T = find_T(g);
  CHECK(T == Approx(0.0476205).epsilon(1e-5));
  CHECK(T > 0.06 / 1.5);
  CHECK(T < 0.06 * 1.5);
  CHECK_THROWS_AS(rate_thm1(m, 0.0), ConfigError);
}

TEST_CASE("sub-Gaussian-regime rate for a Poisson atom") {
  const auto m = LevyMeasure1D::poisson_atom(1.0, 1.0);
  const RateFunction g = rate_thm1(m, kPoissonL);
  const double c = 8.0 + 12.0 * std::log(2.0) / kPoissonL + 8.0 / kPoissonL;
  CHECK(g(0.1) == Approx(c * std::expm1(0.1)).epsilon(1e-12));
  const double T = find_T(g);
  CHECK(T * g(T) <= 0.5);
  CHECK(T * g(T) >= 0.5 - 1e-9);
}

TEST_CASE("dimension-free l_p rate") {
  const auto pa = LevyMeasure1D::poisson_atom(1.0, 1.0);
  const RateFunction h = rate_thm2(pa, SignClass::kNonnegative, 2.0, 2.0, 15.0);
  CHECK(h(0.0) == 0.0);
  const double coef = 4.0 * (std::pow(1.0 + std::sqrt(2.0), 2.0) + 120.0);
  CHECK(h(0.1) == Approx(coef * std::expm1(0.1)).epsilon(1e-10));
  CHECK(h(0.1) == Approx(52.94).epsilon(1e-3));

  // Binomial expansion of (1 + c|u|)^2 + K against the closed-form integrals.
  const auto m = LevyMeasure1D::symmetric_exponential(1.0);
  const RateFunction hs = rate_thm2(m, SignClass::kSymmetric, 2.0, 2.0, 24.0);
  const double c = std::sqrt(2.0), K = 32.0 * 24.0 / 4.0;
  for (double t : {0.1, 0.4, 0.8}) {
    const double want = 4.0 * ((1.0 + K) * I(m, t, 1.0) + 2.0 * c * I(m, t, 2.0) +
                               c * c * I(m, t, 3.0));
    CHECK(hs(t) == Approx(want).epsilon(1e-8));
  }
  CHECK_THROWS_AS(rate_thm2(m, SignClass::kGeneral, 2.0, 2.0, 24.0), ConfigError);
  CHECK_THROWS_AS(rate_thm2(m, SignClass::kSymmetric, 1.5, 2.0, 24.0), ConfigError);
}

TEST_CASE("positive-case rate and its dominance over the l_p rate") {
  const auto pa = LevyMeasure1D::poisson_atom(1.0, 1.0);
  const RateFunction pos = rate_thm5_positive(pa, 2.0, 2.0, 15.0);
  const RateFunction thm2 = rate_thm2(pa, SignClass::kNonnegative, 2.0, 2.0, 15.0);
  const double a0 = 1.0 / std::sqrt(2.0);
  const double coef = 4.0 * (2.0 + std::pow(1.0 + a0, 2.0) * 15.0);
  for (double t : {0.1, 0.5, 1.0}) {
    CHECK(pos(t) == Approx(coef * std::expm1(t)).epsilon(1e-10));
    CHECK(pos(t) <= thm2(t));
  }
  CHECK_THROWS_AS(rate_thm5_positive(LevyMeasure1D::symmetric_exponential(1.0), 2.0, 2.0, 24.0),
                  ConfigError);
}

TEST_CASE("general-case rate") {
  const auto m = LevyMeasure1D::symmetric_exponential(1.0);
  const RateFunction h = rate_thm5_general(m, 2.0, 2.0, 24.0);
  const double c = 1.0, K = 16.0 * 24.0 / 4.0;
  for (double t : {0.2, 0.6}) {
    const double want =
        4.0 * ((1.0 + K) * I(m, t, 1.0) + 2.0 * c * I(m, t, 2.0) + c * c * I(m, t, 3.0));
    CHECK(h(t) == Approx(want).epsilon(1e-8));
  }
  try {
    rate_thm5_general(m, 2.0, 0.0, 24.0);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("modified moment vanishes") != std::string::npos);
  }
  CHECK_THROWS_AS(rate_thm5_general(m, 1.5, 1.0, 2.0), ConfigError);
  const RateFunction h15 = rate_thm5_general(m, 1.5, 1.0, 2.0, 16);
  CHECK(h15(0.3) > rate_thm5_general(m, 1.5, 1.0, 2.0, 4)(0.3));
}

TEST_CASE("thm5 routing") {
  const auto pa = LevyMeasure1D::poisson_atom(1.0, 1.0);
  MomentSet ms = analytic_moments(2.0, 2.0, 15.0, 1.0);
  CHECK(rate_thm5(pa, 0.0, 2.0, ms, 3).label() == "thm5.positive.h");
  const auto neg = LevyMeasure1D::poisson_atom(1.0, -1.0);
  const RateFunction reflected = rate_thm5(neg, 0.0, 2.0, ms, 3);
  CHECK(reflected.label() == "thm5.positive.h");
  CHECK(reflected(0.5) == Approx(rate_thm5_positive(pa, 2.0, 2.0, 15.0)(0.5)));
  CHECK_THROWS_AS(rate_thm5(pa, -1.0, 2.0, ms, 3), ConfigError);
  ms.mod_m_p_lower = Estimate::analytic(0.0, "mod_m_p_lower");
  ms.mod_m_2p_upper = Estimate::analytic(3.0, "mod_m_2p_upper");
  CHECK_THROWS_AS(rate_thm5(pa, -1.0, 2.0, ms, 3), ConfigError);
  ms.mod_m_p_lower = Estimate::analytic(0.5, "mod_m_p_lower");
  CHECK(rate_thm5(pa, -1.0, 2.0, ms, 3).label() == "thm5.general.h");
}

TEST_CASE("Euclidean rate and projections") {
  const auto m = LevyMeasure1D::symmetric_exponential(1.0);
  CHECK(rate_thm4(m, 1, 1.0, 1.0)(0.5) == Approx(72.0).epsilon(1e-12));
  CHECK(rate_thm4(m, 1, 1.0, 1.0)(0.0) == 0.0);
  const auto spec4 = IDVectorSpec::iid(m, 4);
  const auto half = ProjectionSpec::leading_coordinates(4, 2, 1.0);
  CHECK(rate_projection(spec4, half, ProjectionVariant::kCor3)(0.5) ==
        Approx(128.0).epsilon(1e-12));
  ProjectionSpec zero{{0.0, 0.0, 0.0, 0.0}, 1.0};
  CHECK(rate_projection(spec4, zero, ProjectionVariant::kCor3)(0.5) ==
        Approx(8.0 * 2.0).epsilon(1e-12));
  const auto full = ProjectionSpec::leading_coordinates(4, 4, 0.5 * 3.0);
  const RateFunction t4 = rate_thm4(spec4, 0.5, 3.0);
  const RateFunction c3 = rate_projection(spec4, full, ProjectionVariant::kCor3);
  for (double t : {0.1, 0.5, 0.9}) CHECK(t4(t) == Approx(c3(t)).epsilon(1e-14));

  // With E||X||_2 = sqrt(2d) the rate does not depend on d.
  const double eps = 0.7;
  const double a = rate_thm4(m, 100, eps, std::sqrt(200.0))(0.5);
  const double b = rate_thm4(m, 10000, eps, std::sqrt(20000.0))(0.5);
  CHECK(a == Approx(b).epsilon(1e-12));
  CHECK(a == Approx(8.0 * 2.0 + 28.0 / (eps * eps)).epsilon(1e-12));
}

TEST_CASE("centered projection rate") {
  const auto pa = LevyMeasure1D::poisson_atom(1.0, 1.0);
  const auto spec = IDVectorSpec::iid(pa, 5, -1.0);
  const auto proj = ProjectionSpec::leading_coordinates(5, 3, 0.5);
  const RateFunction h = rate_projection(spec, proj, ProjectionVariant::kCor4, 1.0);
  CHECK(h(0.0) == 0.0);
  CHECK(h(0.3) > 0.0);
  CHECK_THROWS_AS(rate_projection(spec, proj, ProjectionVariant::kCor4, 0.0), ConfigError);
}

TEST_CASE("projection specs from matrices") {
  // Projection onto span{(1, 1)/sqrt 2}.
  const std::vector<double> P{0.5, 0.5, 0.5, 0.5};
  const ProjectionSpec s = ProjectionSpec::from_matrix(P, 2, 1.0);
  CHECK(s.col_norms[0] == Approx(std::sqrt(0.5)));
  CHECK(s.col_norms[1] == Approx(std::sqrt(0.5)));
  const std::vector<double> notproj{1.0, 0.5, 0.5, 1.0};
  CHECK_THROWS_AS(ProjectionSpec::from_matrix(notproj, 2, 1.0), ConfigError);
  CHECK_THROWS_AS(ProjectionSpec::leading_coordinates(2, 3, 1.0), ConfigError);
}

TEST_CASE("shifted l_p rate") {
  const auto pa = LevyMeasure1D::poisson_atom(1.0, 1.0);
  const RateFunction h = rate_cor5(pa, 2.0, 4, 1.0, 2.0);
  for (double t : {0.1, 1.0}) CHECK(h(t) == Approx(16.0 * std::expm1(t)).epsilon(1e-12));
  double prev = kInf;
  for (double E : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double v = rate_cor5(pa, 2.0, 4, 1.0, E)(0.5);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("bounded-support closed form") {
  CHECK(std::exp(-cor2_neg_log_bound(8.0, 1.0, 0.0)) == 1.0);
  CHECK(std::exp(-cor2_neg_log_bound(8.0, 1.0, 8.0)) ==
        Approx(std::exp(8.0 - 16.0 * std::log(2.0))).epsilon(1e-12));
  CHECK(std::exp(-cor2_neg_log_bound(8.0, 1.0, 8.0)) == Approx(0.04548).epsilon(1e-3));
  // Small-y series against the direct expression.
  const double y = 3e-5, direct = (1.0 + y) * std::log1p(y) - y;
  CHECK(cor2_neg_log_bound(1.0, 1.0, y) == Approx(direct).epsilon(1e-9));

  const auto spec = IDVectorSpec::iid(LevyMeasure1D::poisson_atom(1.0, 1.0), 10);
  const Cor2Constants c = cor2_constants(spec, 1.0, 3.0);
  CHECK(c.R == 1.0);
  CHECK(c.V_eps_sq == Approx(8.0 + 2.0 / 9.0 * 10.0));
  CHECK_THROWS_AS(
      cor2_constants(IDVectorSpec::iid(LevyMeasure1D::symmetric_exponential(1.0), 2), 1.0, 1.0),
      DomainError);
}

TEST_CASE("integrability report constants") {
  const Thm3Report pa = thm3_report(LevyMeasure1D::poisson_atom(1.0, 1.0));
  CHECK(pa.V_sq == Approx(8.0));
  CHECK(pa.lambda_max == Approx(1.0 / (8.0 * std::numbers::e)));
  const Thm3Report scaled = thm3_report(LevyMeasure1D::poisson_atom(1.0, 3.5));
  CHECK(scaled.lambda_max == Approx(pa.lambda_max).epsilon(1e-12));
  const Thm3Report cp =
      thm3_report(LevyMeasure1D::compound_poisson(1.0, UniformJumps{0.0, 1.0}));
  CHECK(cp.V_sq == Approx(8.0 / 3.0));
  CHECK(cp.lambda_max == Approx(3.0 / (8.0 * std::numbers::e)));
  CHECK_THROWS(thm3_report(LevyMeasure1D::symmetric_exponential(1.0)));
}

TEST_CASE("certificate for a Laplace coordinate dominates the exact tail") {
  const auto spec = IDVectorSpec::iid(LevyMeasure1D::symmetric_exponential(1.0), 1);
  MomentSet ms = analytic_moments(2.0, 2.0, 24.0, 1.0, kLaplaceL);
  const auto grid = log_grid(0.01, 60.0, 40);
  const BoundCertificate cert = bound_thm1(spec, ms, grid);
  CHECK(cert.centering.value == 1.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(cert.bound[i] >= std::exp(-(1.0 + grid[i])));
  }
  CHECK(cert.validity_sup == kInf);
}

TEST_CASE("certificates for every family satisfy the invariants") {
  const auto pa = IDVectorSpec::iid(LevyMeasure1D::poisson_atom(1.0, 1.0), 10);
  MomentSet ms = analytic_moments(2.0, 2.0, 15.0, 3.5, kPoissonL);
  ms.E_X1_sq = Estimate::analytic(2.0, "E_X1_sq");
  ms.mod_m_p_lower = Estimate::analytic(0.3, "mod");
  ms.mod_m_2p_upper = Estimate::analytic(15.0, "mod2");
  CertificateRequest req;
  req.x_grid = log_grid(0.5, 20.0, 12);
  for (auto fam : {BoundFamily::kThm1, BoundFamily::kThm2, BoundFamily::kThm4, BoundFamily::kThm5,
                   BoundFamily::kCor2, BoundFamily::kCor5}) {
    CAPTURE(to_string(fam));
    req.family = fam;
    const BoundCertificate cert = make_certificate(pa, ms, req);
    CHECK(cert.family == std::string(to_string(fam)));
    CHECK_NOTHROW(check_certificate(cert));
    CHECK(cert.bound.front() <= 1.0);
    CHECK(cert.centering.value >= 3.5);
  }
  req.family = BoundFamily::kCor3;
  req.projection = ProjectionSpec::leading_coordinates(10, 4, 1.0);
  CHECK_NOTHROW(make_certificate(pa, ms, req));
  req.family = BoundFamily::kThm2;
  req.direction = Direction::kLower;
  CHECK_THROWS_AS(make_certificate(pa, ms, req), ConfigError);
  req.family = BoundFamily::kCor5;
  const BoundCertificate lower = make_certificate(pa, ms, req);
  CHECK(lower.direction == Direction::kLower);
  CHECK(lower.centering.value == Approx(0.5 * 3.5));
}

TEST_CASE("dimension-free certificates are identical across d") {
  MomentSet ms = analytic_moments(2.0, 2.0, 15.0, 1.0);
  CertificateRequest req;
  req.family = BoundFamily::kThm2;
  req.x_grid = log_grid(0.5, 20.0, 10);
  const auto m = LevyMeasure1D::poisson_atom(1.0, 1.0);
  const BoundCertificate c1 = make_certificate(IDVectorSpec::iid(m, 1), ms, req);
  for (std::size_t d : {10u, 1000u}) {
    ms.E_norm_p = Estimate::analytic(std::sqrt(2.0 * d), "E_norm_p");
    const BoundCertificate cd = make_certificate(IDVectorSpec::iid(m, d), ms, req);
    CHECK(cd.bound == c1.bound);
    CHECK(cd.rate_params == c1.rate_params);
    CHECK_FALSE(cd.dimension_dependent);
  }
}

TEST_CASE("family applicability") {
  const auto lap = IDVectorSpec::iid(LevyMeasure1D::symmetric_exponential(1.0), 3);
  std::string why;
  CHECK_FALSE(family_applicable(BoundFamily::kCor2, lap, &why));
  CHECK_FALSE(why.empty());
  CHECK(family_applicable(BoundFamily::kThm2, lap));
  const auto gen =
      IDVectorSpec::iid(LevyMeasure1D::compound_poisson(1.0, UniformJumps{-1.0, 2.0}), 3);
  CHECK_FALSE(family_applicable(BoundFamily::kThm2, gen));
  CHECK(family_applicable(BoundFamily::kThm5, gen));
  CHECK(parse_bound_family("cor4") == BoundFamily::kCor4);
  CHECK_THROWS_AS(parse_bound_family("thm9"), ConfigError);
}

TEST_CASE("property: closed form matches the Chernoff pipeline on random constants") {
  oracle::Gen gen(31337);
  for (int trial = 0; trial < 20; ++trial) {
    const double V2 = gen.log_uniform(0.1, 100.0), R = gen.log_uniform(0.05, 20.0);
    const RateFunction h0 = cor2_dominating_rate(V2, R);
    for (double x : log_grid(1e-3, 1e3, 8)) {
      CHECK(chernoff_exponent(h0, x).neg_log_bound ==
            Approx(cor2_neg_log_bound(V2, R, x)).epsilon(1e-6));
    }
  }
}

TEST_CASE("property: every rate is zero at zero and nondecreasing") {
  oracle::Gen gen(8080);
  for (int trial = 0; trial < 12; ++trial) {
    const double scale = gen.log_uniform(0.3, 3.0);
    const auto lap = LevyMeasure1D::symmetric_exponential(scale);
    const auto pa = LevyMeasure1D::poisson_atom(gen.log_uniform(0.2, 5.0), gen.uniform(0.2, 3.0));
    const double p = gen.uniform(2.0, 4.0);
    const double mp = gen.log_uniform(0.5, 5.0), m2p = mp * mp * gen.uniform(1.0, 5.0);
    const std::size_t d = static_cast<std::size_t>(gen.integer(1, 500));
    CHECK_NOTHROW(check_rate_invariants(rate_thm1(lap, gen.uniform(0.1, 2.0))));
    CHECK_NOTHROW(check_rate_invariants(rate_thm2(lap, SignClass::kSymmetric, p, mp, m2p)));
    CHECK_NOTHROW(check_rate_invariants(rate_thm5_positive(pa, p, mp, m2p)));
    CHECK_NOTHROW(check_rate_invariants(rate_thm5_general(lap, p, mp, m2p)));
    CHECK_NOTHROW(check_rate_invariants(rate_thm4(pa, d, gen.uniform(0.1, 2.0), gen.uniform(0.5, 30.0))));
    CHECK_NOTHROW(check_rate_invariants(rate_cor5(lap, p, d, gen.uniform(0.1, 2.0), gen.uniform(0.5, 30.0))));
  }
}
