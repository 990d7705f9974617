#include <cmath>
#include <numbers>

#include "doctest.h"
#include "levyconc/error.hpp"
#include "levyconc/levy_measure.hpp"
#include "oracle.hpp"

using namespace levyconc;
using doctest::Approx;

TEST_CASE("exponential-moment integrals of the symmetric exponential measure") {
  const auto m = LevyMeasure1D::symmetric_exponential(1.0);
  CHECK(exp_moment_integral(m, 0.5, 1.0) == Approx(2.0).epsilon(1e-12));
  CHECK(exp_moment_integral(m, 0.5, 3.0) == Approx(28.0).epsilon(1e-12));
  CHECK(exp_moment_integral(m, 0.0, 1.0) == 0.0);
  CHECK(exp_moment_integral_quadrature(m, 0.5, 1.0) == Approx(2.0).epsilon(1e-8));
  CHECK(exp_moment_integral_quadrature(m, 0.5, 3.0) == Approx(28.0).epsilon(1e-8));
  CHECK_THROWS_AS(exp_moment_integral(m, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(exp_moment_integral(m, -0.1, 1.0), DomainError);
}

TEST_CASE("exponential-moment integral of a Poisson atom") {
  const auto m = LevyMeasure1D::poisson_atom(1.0, 1.0);
  CHECK(exp_moment_integral(m, 1.0, 1.0) == Approx(std::numbers::e - 1.0).epsilon(1e-14));
  const auto m2 = LevyMeasure1D::poisson_atom(2.5, -0.7);
  CHECK(exp_moment_integral(m2, 0.3, 2.0) ==
        Approx(2.5 * 0.49 * std::expm1(0.3 * 0.7)).epsilon(1e-14));
}

TEST_CASE("gamma and compound Poisson integrals against Simpson oracles") {
  const auto g = LevyMeasure1D::gamma_levy(2.5, 1.3);
  for (double t : {0.1, 1.0, 2.2}) {
    for (double r : {1.0, 2.0, 3.0}) {
      const double want = oracle::gamma_exp_moment(2.5, 1.3, t, r);
      CHECK(exp_moment_integral(g, t, r) == Approx(want).epsilon(1e-10));
      CHECK(exp_moment_integral_quadrature(g, t, r) == Approx(want).epsilon(1e-7));
    }
  }
  const auto cp = LevyMeasure1D::compound_poisson(3.0, UniformJumps{-0.5, 1.0});
  for (double t : {0.0, 0.7, 4.0}) {
    const double want = oracle::simpson(
        [t](double u) { return 3.0 / 1.5 * std::pow(std::fabs(u), 2.0) * std::expm1(t * std::fabs(u)); },
        -0.5, 1.0);
    CHECK(exp_moment_integral(cp, t, 2.0) == Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("polynomial moments") {
  const auto m = LevyMeasure1D::symmetric_exponential(1.0);
  CHECK(poly_moment(m, 2.0) == Approx(2.0).epsilon(1e-12));
  CHECK(poly_moment(m, 4.0) == Approx(12.0).epsilon(1e-12));
  CHECK(poly_moment_quadrature(m, 4.0) == Approx(12.0).epsilon(1e-8));
  CHECK(poly_moment(LevyMeasure1D::poisson_atom(2.0, 3.0), 2.0) == Approx(18.0));
  const auto cp = LevyMeasure1D::compound_poisson(2.0, DiscreteJumps{{-1.0, 2.0}, {0.25, 0.75}});
  CHECK(poly_moment(cp, 2.0) == Approx(2.0 * (0.25 + 0.75 * 4.0)));
  CHECK(poly_moment(cp, 2.0) == Approx(poly_moment_quadrature(cp, 2.0)));
}

TEST_CASE("abscissa and support radius") {
  CHECK(exp_moment_abscissa(LevyMeasure1D::symmetric_exponential(1.0)) == 1.0);
  CHECK(exp_moment_abscissa(LevyMeasure1D::symmetric_exponential(2.0)) == 0.5);
  CHECK(exp_moment_abscissa(LevyMeasure1D::poisson_atom(1.0, 1.0)) == kInf);
  CHECK(exp_moment_abscissa(LevyMeasure1D::gamma_levy(2.5, 1.0)) == 2.5);
  CHECK(support_radius(LevyMeasure1D::poisson_atom(1.0, 1.0)) == 1.0);
  CHECK(support_radius(LevyMeasure1D::symmetric_exponential(1.0)) == kInf);
  CHECK(support_radius(LevyMeasure1D::compound_poisson(1.0, UniformJumps{-0.5, 0.5})) == 0.5);
}

TEST_CASE("Levy condition, small-jump and mean integrals") {
  const auto m = LevyMeasure1D::symmetric_exponential(1.0);
  const double inner = oracle::simpson([](double u) { return u * std::exp(-u); }, 0.0, 1.0);
  const double outer =
      oracle::simpson([](double u) { return std::exp(-u) / u; }, 1.0, 60.0, 200000);
  CHECK(levy_condition_integral(m) == Approx(2.0 * (inner + outer)).epsilon(1e-8));
  const double first = oracle::simpson([](double u) { return std::exp(-u); }, 0.0, 1.0);
  CHECK(small_jump_first_moment(m) == Approx(2.0 * first).epsilon(1e-8));
  CHECK(jump_mean(m) == Approx(0.0).epsilon(1e-12));
  CHECK(jump_mean(LevyMeasure1D::gamma_levy(2.0, 3.0)) == Approx(1.5));
  CHECK(jump_mean(LevyMeasure1D::poisson_atom(2.0, -1.5)) == Approx(-3.0));
}

TEST_CASE("sign classes and reflection") {
  CHECK(LevyMeasure1D::symmetric_exponential(1.0).sign_class() == SignClass::kSymmetric);
  CHECK(LevyMeasure1D::gamma_levy(1.0, 1.0).sign_class() == SignClass::kNonnegative);
  CHECK(LevyMeasure1D::poisson_atom(1.0, -1.0).sign_class() == SignClass::kNonpositive);
  const auto cp = LevyMeasure1D::compound_poisson(1.0, UniformJumps{-1.0, 2.0});
  CHECK(cp.sign_class() == SignClass::kGeneral);
  CHECK(LevyMeasure1D::compound_poisson(1.0, UniformJumps{-1.0, 1.0}).sign_class() ==
        SignClass::kSymmetric);
  const auto pa = LevyMeasure1D::poisson_atom(1.0, 1.0);
  CHECK(marginal_sign_class(pa, 0.0) == SignClass::kNonnegative);
  CHECK(marginal_sign_class(pa, -1.0) == SignClass::kGeneral);
  CHECK(marginal_sign_class(pa, 0.5) == SignClass::kNonnegative);
  const auto r = cp.reflected();
  CHECK(support_radius(r) == 2.0);
  CHECK(jump_mean(r) == Approx(-jump_mean(cp)));
  CHECK_THROWS_AS(LevyMeasure1D::gamma_levy(1.0, 1.0).reflected(), UnsupportedError);
}

TEST_CASE("custom densities echo declared constants and integrate like built-ins") {
  const auto m = LevyMeasure1D::custom_density([](double u) { return 2.0 * u; }, 0.0, 1.0,
                                               1.0, std::nullopt);
  CHECK(exp_moment_abscissa(m) == 1.0);
  CHECK(support_radius(m) == kInf);
  CHECK(poly_moment(m, 2.0) == Approx(0.5).epsilon(1e-8));
  const auto tab = LevyMeasure1D::custom_table({{0.0, 0.0}, {1.0, 2.0}}, 3.0, 1.0);
  CHECK(poly_moment(tab, 2.0) == Approx(0.5).epsilon(1e-8));
  CHECK(support_radius(tab) == 1.0);
  CHECK_THROWS_AS(LevyMeasure1D::custom_density([](double) { return 1.0; }, 0.0, 1.0,
                                                std::nullopt, std::nullopt),
                  ConfigError);
  CHECK_THROWS_AS(LevyMeasure1D::custom_table({{0.0, 1.0}}, 1.0, std::nullopt), ConfigError);
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(LevyMeasure1D::symmetric_exponential(0.0), ConfigError);
  CHECK_THROWS_AS(LevyMeasure1D::gamma_levy(-1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(LevyMeasure1D::poisson_atom(1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(LevyMeasure1D::compound_poisson(1.0, UniformJumps{1.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(LevyMeasure1D::compound_poisson(1.0, DiscreteJumps{{1.0}, {0.5}}),
                  ConfigError);
  CHECK_THROWS_AS(IDVectorSpec::iid(LevyMeasure1D::poisson_atom(1.0, 1.0), 0), ConfigError);
}

TEST_CASE("vector specs group identical coordinates") {
  const auto a = LevyMeasure1D::poisson_atom(1.0, 1.0);
  const auto b = LevyMeasure1D::symmetric_exponential(1.0);
  const auto spec = IDVectorSpec::independent({a, a, b}, {0.0, 0.0, 1.0});
  CHECK(spec.dim() == 3);
  CHECK_FALSE(spec.is_iid());
  CHECK(spec.drift(2) == 1.0);
  CHECK_THROWS_AS(spec.with_dim(5), ConfigError);
  const auto iid = IDVectorSpec::iid(a, 4, 0.5).with_dim(9);
  CHECK(iid.dim() == 9);
  CHECK(iid.drift(8) == 0.5);
}

TEST_CASE("property: closed forms agree with quadrature on random arguments") {
  oracle::Gen gen(20240611);
  for (int trial = 0; trial < 60; ++trial) {
    const double scale = gen.log_uniform(0.2, 5.0);
    const auto m = LevyMeasure1D::symmetric_exponential(scale);
    const double t = gen.uniform(0.0, 0.95) / scale;
    const double r = static_cast<double>(gen.integer(1, 4));
    const double want = oracle::symexp_exp_moment(scale, t, r);
    CHECK(exp_moment_integral(m, t, r) == Approx(want).epsilon(1e-10));
    CHECK(exp_moment_integral_quadrature(m, t, r) == Approx(want).epsilon(1e-7));
  }
  for (int trial = 0; trial < 40; ++trial) {
    const double rate = gen.log_uniform(0.2, 5.0), shape = gen.log_uniform(0.2, 5.0);
    const auto m = LevyMeasure1D::gamma_levy(rate, shape);
    const double t = gen.uniform(0.0, 0.95) * rate;
    const double r = gen.uniform(0.5, 4.0);
    CHECK(exp_moment_integral_quadrature(m, t, r) ==
          Approx(oracle::gamma_exp_moment(rate, shape, t, r)).epsilon(1e-7));
  }
}

TEST_CASE("property: exponential-moment integrals are nondecreasing in t") {
  const LevyMeasure1D ms[] = {LevyMeasure1D::symmetric_exponential(1.0),
                              LevyMeasure1D::gamma_levy(2.0, 0.5),
                              LevyMeasure1D::poisson_atom(1.0, -2.0),
                              LevyMeasure1D::compound_poisson(2.0, UniformJumps{0.0, 1.0})};
  for (const auto& m : ms) {
    const double M = std::min(exp_moment_abscissa(m), 3.0);
    for (double r : {1.0, 3.0}) {
      double prev = 0.0;
      for (int i = 1; i <= 25; ++i) {
        const double v = exp_moment_integral(m, M * i / 26.0, r);
        CHECK(v >= prev);
        prev = v;
      }
    }
  }
}
