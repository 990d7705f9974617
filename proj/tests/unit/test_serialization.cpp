#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "levyconc/error.hpp"
#include "levyconc/serialization.hpp"
#include "oracle.hpp"

using namespace levyconc;
using doctest::Approx;
using nlohmann::json;

namespace {

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

BoundCertificate sample_certificate(BoundFamily fam) {
  const auto spec = IDVectorSpec::iid(LevyMeasure1D::poisson_atom(1.0, 1.0), 3);
  MomentSet ms;
  ms.p = 2.0;
  ms.m_p = Estimate::analytic(2.0, "m_p");
  ms.m_2p = Estimate::analytic(15.0, "m_2p");
  ms.E_norm_p = Estimate{2.0, 1.9, 2.1, Provenance::analytic("E_norm_p")};
  ms.l = Estimate::analytic(0.68, "l");
  CertificateRequest req;
  req.family = fam;
  req.x_grid = {0.5, 1.0, 2.0, 4.0};
  return make_certificate(spec, ms, req);
}

}  // namespace

TEST_CASE("double formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(kInf) == "inf");
  CHECK(format_double(-kInf) == "-inf");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("measure JSON round trips") {
  for (const auto& name : measure_preset_names()) {
    CAPTURE(name);
    const LevyMeasure1D m = measure_preset(name);
    const std::string text = measure_to_json(m);
    const LevyMeasure1D back = measure_from_json(text);
    CHECK(measure_to_json(back) == text);
    CHECK(poly_moment(back, 2.0) == poly_moment(m, 2.0));
  }
  const auto m = measure_from_json(
      R"({"family":"compound_poisson","rate":2,"jumps":{"type":"discrete","values":[-1,2],"probs":[0.5,0.5]}})");
  CHECK(poly_moment(m, 2.0) == Approx(5.0));
  const auto g = measure_from_json(R"({"family":"gamma_levy","rate":2.5,"shape":1,"M":2.5})");
  CHECK(exp_moment_abscissa(g) == 2.5);
}

TEST_CASE("custom density schema") {
  const auto m = measure_from_json(
      R"({"family":"custom_density","M":1.0,"R":null,"density_table":[[0.1,1.0],[1.0,0.5],[2.0,0.0]]})");
  CHECK(exp_moment_abscissa(m) == 1.0);
  CHECK(support_radius(m) == kInf);
  const auto back = measure_from_json(measure_to_json(m));
  CHECK(measure_to_json(back) == measure_to_json(m));
  CHECK_THROWS_AS(measure_from_json(R"({"family":"custom_density","density_table":[[0.1,1],[1,0]]})"),
                  ConfigError);
}

TEST_CASE("measure JSON errors") {
  CHECK_THROWS_AS(measure_from_json(R"({"family":"stable"})"), ConfigError);
  CHECK_THROWS_AS(measure_from_json(R"({"family":"symmetric_exponential"})"), ConfigError);
  CHECK_THROWS_AS(measure_from_json(R"({"family":"symmetric_exponential","scale":1,"M":2})"),
                  ConfigError);
  CHECK_THROWS_AS(measure_from_json("{not json"), ConfigError);
  CHECK_THROWS_AS(measure_preset("cauchy"), ConfigError);
}

TEST_CASE("measures resolve from presets, inline JSON and files") {
  CHECK(resolve_measure("laplace").family_name() == measure_preset("laplace").family_name());
  CHECK(poly_moment(resolve_measure(R"({"family":"poisson_atom","intensity":2,"jump":3})"), 2.0) ==
        Approx(18.0));
  const std::string path = "levyconc_test_measure.json";
  {
    std::ofstream out(path);
    out << R"({"family":"gamma_levy","rate":1,"shape":2})";
  }
  CHECK(jump_mean(resolve_measure(path)) == Approx(2.0));
  std::remove(path.c_str());
  CHECK_THROWS_AS(resolve_measure("no/such/file.json"), ConfigError);
}

TEST_CASE("certificate JSON and CSV") {
  for (auto fam : {BoundFamily::kThm1, BoundFamily::kThm2, BoundFamily::kCor2}) {
    const BoundCertificate cert = sample_certificate(fam);
    const std::string text = certificate_to_json(cert);
    const BoundCertificate back = certificate_from_json(text);
    CHECK(certificate_to_json(back) == text);
    CHECK(back.bound == cert.bound);
    CHECK(back.validity_sup == cert.validity_sup);
    const std::string csv = certificate_to_csv(cert);
    CHECK(csv.rfind("x,bound,family,direction,validity_sup,centering_value\n", 0) == 0);
    CHECK(count_lines(csv) == cert.x_grid.size() + 1);
  }
  const json j = json::parse(certificate_to_json(sample_certificate(BoundFamily::kThm1)));
  CHECK(j["validity_sup"] == "inf");
  json bad = j;
  bad["bound"][1] = 1.5;
  CHECK_THROWS(certificate_from_json(bad.dump()));
}

TEST_CASE("tail and report serialization") {
  const auto spec = IDVectorSpec::iid(LevyMeasure1D::poisson_atom(1.0, 1.0), 3);
  const BoundCertificate cert = sample_certificate(BoundFamily::kThm2);
  const TailEstimate tail = empirical_tail(spec, 2.0, cert.x_grid, 2000, 5, cert.centering.value);
  const std::string tj = tail_to_json(tail);
  const TailEstimate back = tail_from_json(tj);
  CHECK(tail_to_json(back) == tj);
  CHECK(back.ci_low == tail.ci_low);
  CHECK(back.direction == tail.direction);
  const Report r = verify_bound(cert, tail);
  const std::string csv = report_to_csv(r);
  CHECK(csv.rfind("x,bound,p_hat,ci_low,ci_high,pass\n", 0) == 0);
  CHECK(count_lines(csv) == cert.x_grid.size() + 1);
  CHECK(csv.find(",PASS\n") != std::string::npos);
  const json rj = json::parse(report_to_json(r));
  CHECK(rj["verdict"] == "PASS");
  CHECK(rj["rows"].size() == cert.x_grid.size());
  CHECK(report_to_text(r).find("PASS") != std::string::npos);
}

TEST_CASE("sample batches export to CSV") {
  const auto spec = IDVectorSpec::iid(LevyMeasure1D::poisson_atom(1.0, 1.0), 3);
  const SampleBatch b = sample_vector(spec, 5, 9);
  const std::string csv = batch_to_csv(b);
  CHECK(csv.rfind("x1,x2,x3\n", 0) == 0);
  CHECK(count_lines(csv) == 6);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  CHECK(std::stod(line.substr(0, line.find(','))) == b.values[0]);
}

TEST_CASE("property: random measures survive a JSON round trip") {
  oracle::Gen gen(1234);
  for (int trial = 0; trial < 30; ++trial) {
    LevyMeasure1D m = LevyMeasure1D::symmetric_exponential(1.0);
    switch (gen.integer(0, 3)) {
      case 0: m = LevyMeasure1D::symmetric_exponential(gen.log_uniform(0.01, 100.0)); break;
      case 1: m = LevyMeasure1D::gamma_levy(gen.log_uniform(0.01, 100.0), gen.log_uniform(0.01, 10.0)); break;
      case 2: m = LevyMeasure1D::poisson_atom(gen.log_uniform(0.01, 100.0), gen.uniform(-5.0, 5.0)); break;
      default: {
        const double lo = gen.uniform(-3.0, 3.0);
        m = LevyMeasure1D::compound_poisson(gen.log_uniform(0.1, 10.0),
                                            UniformJumps{lo, lo + gen.log_uniform(0.01, 5.0)});
      }
    }
    const std::string text = measure_to_json(m);
    const LevyMeasure1D back = measure_from_json(text);
    CHECK(measure_to_json(back) == text);
    CHECK(poly_moment(back, 2.0) == poly_moment(m, 2.0));
    CHECK(exp_moment_abscissa(back) == exp_moment_abscissa(m));
  }
}
