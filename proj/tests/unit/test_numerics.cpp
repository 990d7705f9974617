#include <cmath>
#include <numbers>

#include "doctest.h"
#include "levyconc/error.hpp"
#include "levyconc/numerics.hpp"
#include "oracle.hpp"

using namespace levyconc;
using doctest::Approx;

namespace {

RateFunction linear(double c) {
  return RateFunction("linear", [c](double t) { return c * t; }, kInf);
}

RateFunction bennett(double V2, double R) {
  return RateFunction("bennett", [V2, R](double t) { return V2 * std::expm1(t * R) / R; }, kInf);
}

/// Closed form of int_0^x (1/R) log(1 + R s / V^2) ds.
double bennett_exponent(double V2, double R, double x) {
  const double y = R * x / V2;
  return V2 / (R * R) * ((1.0 + y) * std::log1p(y) - y);
}

}  // namespace

TEST_CASE("rate functions reject arguments outside their domain") {
  RateFunction h("capped", [](double t) { return t * t; }, 2.0);
  CHECK(h(1.0) == 1.0);
  CHECK_THROWS_AS(h(2.0), DomainError);
  CHECK_THROWS_AS(h(-1.0), DomainError);
  CHECK(h.eval_limit() < 2.0);
  CHECK(h.sup_value() == Approx(4.0).epsilon(1e-6));
}

TEST_CASE("monotone inversion") {
  CHECK(invert_monotone(linear(3.0), 3.0) == Approx(1.0).epsilon(1e-10));
  CHECK(invert_monotone(bennett(8.0, 1.0), 8.0 * (std::numbers::e - 1.0)) ==
        Approx(1.0).epsilon(1e-10));
  CHECK(invert_monotone(linear(3.0), 0.0) == 0.0);
  RateFunction capped("capped", [](double t) { return t; }, 1.0);
  CHECK_THROWS_AS(invert_monotone(capped, 2.0), RangeError);
}

TEST_CASE("rate inverter memoises evaluations") {
  const RateFunction h = bennett(2.0, 1.5);
  RateInverter inv(h);
  const double t1 = inv.invert(3.0);
  const std::size_t first = inv.evaluations();
  CHECK(inv.invert(3.0) == t1);
  CHECK(inv.evaluations() == first);
  CHECK(inv.invert(3.1) > t1);
  CHECK(inv.evaluations() - first < first);
  CHECK(inv.value(t1) == Approx(3.0).epsilon(1e-9));
}

TEST_CASE("Chernoff bounds of linear and exponential rates") {
  CHECK(chernoff_bound(linear(1.0), 1e-12) == Approx(1.0));
  CHECK(chernoff_bound(linear(1.0), 2.0) == Approx(std::exp(-2.0)).epsilon(1e-9));
  CHECK(chernoff_bound(bennett(8.0, 1.0), 8.0) ==
        Approx(std::exp(8.0 - 16.0 * std::log(2.0))).epsilon(1e-8));
  const ChernoffResult r = chernoff_exponent(bennett(8.0, 1.0), 8.0);
  CHECK(r.neg_log_bound == Approx(r.neg_log_sup_form).epsilon(1e-8));
  CHECK(r.t_star == Approx(std::log(2.0)).epsilon(1e-6));
  RateFunction capped("capped", [](double t) { return t; }, 1.0);
  CHECK_THROWS_AS(chernoff_bound(capped, 1.5), RangeError);
}

TEST_CASE("constrained Chernoff transform") {
  const RateFunction g("id", [](double t) { return t; }, kInf);
  CHECK(constrained_chernoff(g, 1.0, 1e-12) == Approx(1.0));
  CHECK(constrained_chernoff(g, 1.0, 1.0) == Approx(std::exp(-0.25)).epsilon(1e-9));
  CHECK(constrained_chernoff(g, 0.25, 1.0) == Approx(std::exp(-0.1875)).epsilon(1e-9));
}

TEST_CASE("find_T") {
  const double t0 = 0.7;
  const RateFunction g("lin", [t0](double t) { return t / (2.0 * t0 * t0); }, kInf);
  CHECK(find_T(g) == Approx(t0).epsilon(1e-9));
  const RateFunction pg("poisson", [](double t) { return 20.0 * std::expm1(t); }, kInf);
  const double T = find_T(pg);
  CHECK(T * pg(T) <= 0.5);
  CHECK(T * pg(T) >= 0.5 - 1e-9);
  const RateFunction small("small", [](double t) { return 0.01 * t / (1.0 + t); }, 3.0);
  CHECK(find_T(small) == 3.0);
}

TEST_CASE("rate invariants are enforced") {
  CHECK_NOTHROW(check_rate_invariants(bennett(1.0, 1.0)));
  const RateFunction bad("bad", [](double t) { return std::sin(10.0 * t); }, 3.0);
  CHECK_THROWS_AS(check_rate_invariants(bad), NumericError);
  const RateFunction shifted("shifted", [](double t) { return 1.0 + t; }, kInf);
  CHECK_THROWS_AS(check_rate_invariants(shifted), NumericError);
}

TEST_CASE("certificate validation") {
  BoundCertificate c;
  c.family = "test";
  c.x_grid = {1.0, 2.0, 3.0};
  c.bound = {0.9, 0.5, 0.1};
  c.neg_log_bound = {-std::log(0.9), -std::log(0.5), -std::log(0.1)};
  CHECK_NOTHROW(check_certificate(c));
  c.bound = {0.5, 0.9, 0.1};
  CHECK_THROWS_AS(check_certificate(c), NumericError);
  c.bound = {0.9, 0.5, 0.1};
  c.validity_sup = 2.5;
  CHECK_THROWS(check_certificate(c));
}

TEST_CASE("property: Chernoff pipeline reproduces closed forms") {
  oracle::Gen gen(4242);
  for (int trial = 0; trial < 25; ++trial) {
    const double c = gen.log_uniform(0.05, 20.0);
    const double x = gen.log_uniform(0.01, 30.0);
    CHECK(chernoff_exponent(linear(c), x).neg_log_bound ==
          Approx(x * x / (2.0 * c)).epsilon(1e-7));
  }
  for (int trial = 0; trial < 25; ++trial) {
    const double V2 = gen.log_uniform(0.1, 50.0), R = gen.log_uniform(0.1, 10.0);
    const double x = gen.log_uniform(0.01, 100.0);
    const ChernoffResult r = chernoff_exponent(bennett(V2, R), x);
    CHECK(r.neg_log_bound == Approx(bennett_exponent(V2, R, x)).epsilon(1e-7));
    CHECK(r.neg_log_sup_form == Approx(r.neg_log_bound).epsilon(1e-6));
  }
}

TEST_CASE("property: tabulated bounds are nonincreasing and match pointwise evaluation") {
  oracle::Gen gen(99);
  for (int trial = 0; trial < 5; ++trial) {
    const double V2 = gen.log_uniform(0.5, 5.0), R = gen.log_uniform(0.5, 2.0);
    const RateFunction h = bennett(V2, R);
    std::vector<double> grid;
    for (int i = 0; i < 20; ++i) grid.push_back(0.1 * std::pow(1.3, i));
    const auto tab = tabulate_chernoff(h, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(tab[i].neg_log_bound == Approx(chernoff_exponent(h, grid[i]).neg_log_bound));
      if (i > 0) CHECK(tab[i].neg_log_bound >= tab[i - 1].neg_log_bound);
    }
  }
}
