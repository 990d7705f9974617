#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "levyconc/levyconc.hpp"

namespace levyconc::cli {
namespace {

using ojson = nlohmann::ordered_json;

/// Library or validation error attributed to one command-line field.
class FieldError : public std::runtime_error {
 public:
  FieldError(std::string field, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

template <class F>
auto attributed(const std::string& field, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const FieldError&) {
    throw;
  } catch (const Error& e) {
    throw FieldError(field, e.what());
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

double parse_number(const std::string& field, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FieldError(field, "not a number: '" + s + "'");
  }
}

std::size_t parse_count(const std::string& field, const std::string& s) {
  const double v = parse_number(field, s);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) {
    throw FieldError(field, "expected a nonnegative integer, got '" + s + "'");
  }
  return static_cast<std::size_t>(v);
}

std::vector<double> number_list(const std::string& field, const std::string& s) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) out.push_back(parse_number(field, part));
  if (out.empty()) throw FieldError(field, "empty list");
  return out;
}

std::vector<std::size_t> count_list(const std::string& field, const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& part : split(s, ',')) {
    const std::size_t v = parse_count(field, part);
    if (v == 0) throw FieldError(field, "dimension must be positive");
    out.push_back(v);
  }
  if (out.empty()) throw FieldError(field, "empty list");
  return out;
}

std::string read_file(const std::string& field, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FieldError(field, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FieldError("--out", "cannot write '" + path + "'");
  out << text;
  if (!out) throw FieldError("--out", "write failed for '" + path + "'");
}

struct RawFlags {
  std::string d = "1", p = "2", eps = "0.5", family = "thm1";
  std::string n = "100000", seed;
  std::string proj_coords = "0";
};

struct Resolved {
  RunConfig cfg;
  LevyMeasure1D measure = LevyMeasure1D::symmetric_exponential(1.0);
  std::vector<BoundFamily> families;
  Direction direction = Direction::kUpper;
};

std::uint64_t default_seed() {
  const char* env = std::getenv("LEVYCONC_SEED");
  if (env == nullptr || *env == '\0') return 12345;
  const std::string s(env);
  std::size_t used = 0;
  try {
    const unsigned long long v = std::stoull(s, &used, 10);
    if (used == s.size() && s.front() != '-') return v;
  } catch (const std::exception&) {
  }
  throw FieldError("LEVYCONC_SEED", "not an unsigned integer: '" + s + "'");
}

ojson config_json(const Resolved& r) {
  const RunConfig& c = r.cfg;
  ojson j;
  j["command"] = c.command;
  if (c.command == "report") {
    j["cert"] = c.cert_path;
    j["tail"] = c.tail_path;
    j["format"] = c.format;
    return j;
  }
  j["measure"] = ojson::parse(measure_to_json(r.measure));
  j["drift"] = format_double(c.drift);
  auto& dj = j["d"] = ojson::array();
  for (auto v : c.d) dj.push_back(v);
  auto& pj = j["p"] = ojson::array();
  for (auto v : c.p) pj.push_back(format_double(v));
  auto& ej = j["eps"] = ojson::array();
  for (auto v : c.eps) ej.push_back(format_double(v));
  j["family"] = c.family;
  j["direction"] = c.direction;
  j["x"] = c.x_spec;
  j["n"] = c.n;
  j["seed"] = c.seed;
  j["confidence"] = format_double(c.confidence);
  j["format"] = c.format;
  j["proj_coords"] = c.proj_coords;
  j["proj_offset"] = format_double(c.proj_offset);
  j["invert_rel_width"] = format_double(c.numerics.invert_rel_width);
  j["outer_rel_tol"] = format_double(c.numerics.outer_rel_tol);
  j["agreement_rel_tol"] = format_double(c.numerics.agreement_rel_tol);
  return j;
}

std::string csv_preamble(const ojson& config) {
  return "# levyconc " + std::string(version()) + "\n# config: " + config.dump() + "\n";
}

std::string wrap_json(const ojson& config, const char* key, const std::string& payload) {
  ojson j;
  j["levyconc_version"] = std::string(version());
  j["config"] = config;
  j[key] = ojson::parse(payload);
  return j.dump(2) + "\n";
}

/// Accepts a bare object or one wrapped by this tool under `key`.
std::string unwrap(const std::string& field, const std::string& text, const char* key) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const std::exception& e) {
    throw FieldError(field, std::string("invalid JSON: ") + e.what());
  }
  if (j.is_object() && j.contains(key)) return j[key].dump();
  return j.dump();
}

// ---- computation ----------------------------------------------------------

struct Job {
  IDVectorSpec spec;
  IDVectorSpec norm_spec;  // the vector whose norm the certificate controls
  BoundFamily family;
  double p;
  double eps;
};

bool needs_modified(const Job& job, const Resolved& r) {
  if (job.family != BoundFamily::kThm5) return false;
  const SignClass sc = marginal_sign_class(r.measure, r.cfg.drift);
  return sc != SignClass::kNonnegative && sc != SignClass::kNonpositive;
}

bool lower_allowed(BoundFamily f) {
  return f == BoundFamily::kThm4 || f == BoundFamily::kCor2 || f == BoundFamily::kCor3 ||
         f == BoundFamily::kCor4 || f == BoundFamily::kCor5;
}

Job make_job(const Resolved& r, std::size_t d, double p, double eps, BoundFamily fam) {
  IDVectorSpec spec =
      attributed("--measure", [&] { return IDVectorSpec::iid(r.measure, d, r.cfg.drift); });
  std::string reason;
  if (!family_applicable(fam, spec, &reason)) {
    throw FieldError("--family", std::string(to_string(fam)) + " is not applicable: " + reason);
  }
  if (r.direction == Direction::kLower && !lower_allowed(fam)) {
    throw FieldError("--direction",
                     std::string(to_string(fam)) + " has no lower-deviation form");
  }
  IDVectorSpec norm_spec = spec;
  if (fam == BoundFamily::kCor3 || fam == BoundFamily::kCor4) {
    const std::size_t k = r.cfg.proj_coords == 0 ? d : r.cfg.proj_coords;
    if (k > d) throw FieldError("--proj-coords", "keeps more coordinates than d");
    norm_spec = spec.with_dim(k);
  }
  return {spec, norm_spec, fam, p, eps};
}

BoundCertificate certify(const Resolved& r, const Job& job, const SamplerOptions& sopts) {
  const RunConfig& c = r.cfg;
  MomentSet moments = attributed("--measure", [&] {
    return estimate_moments(job.spec, job.p, c.n, derive_seed(c.seed, 1), sopts,
                            needs_modified(job, r));
  });
  CertificateRequest req;
  req.family = job.family;
  req.direction = r.direction;
  req.eps = job.eps;
  req.x_grid = c.x_grid;
  req.numerics = c.numerics;
  if (job.family == BoundFamily::kCor3 || job.family == BoundFamily::kCor4) {
    moments.E_norm_p = attributed("--measure", [&] {
      return estimate_norm_expectation(job.norm_spec, 2.0, c.n, derive_seed(c.seed, 1, 1),
                                       sopts);
    });
    double offset = job.eps;
    if (job.family == BoundFamily::kCor3) {
      offset = c.proj_offset > 0.0 ? c.proj_offset : job.eps * moments.E_norm_p->lower;
    }
    req.projection = attributed("--proj-offset", [&] {
      return ProjectionSpec::leading_coordinates(job.spec.dim(), job.norm_spec.dim(), offset);
    });
  }
  return attributed("--x", [&] { return make_certificate(job.spec, moments, req); });
}

std::vector<BoundFamily> parse_families(const std::string& s) {
  std::vector<BoundFamily> out;
  for (const auto& part : split(s, ',')) {
    out.push_back(attributed("--family", [&] { return parse_bound_family(part); }));
  }
  if (out.empty()) throw FieldError("--family", "empty list");
  return out;
}

template <class T>
const T& single(const std::vector<T>& v, const char* field, const std::string& cmd) {
  if (v.size() != 1) throw FieldError(field, cmd + " takes a single value; use sweep for lists");
  return v.front();
}

// ---- commands --------------------------------------------------------------

int cmd_bound(const Resolved& r, std::ostream& out) {
  const RunConfig& c = r.cfg;
  const Job job = make_job(r, single(c.d, "--d", c.command), single(c.p, "--p", c.command),
                           single(c.eps, "--eps", c.command),
                           single(r.families, "--family", c.command));
  SamplerOptions sopts{c.threads, c.confidence};
  const BoundCertificate cert = certify(r, job, sopts);
  const ojson config = config_json(r);
  std::string text = c.format == "json"
                         ? wrap_json(config, "certificate", certificate_to_json(cert))
                         : csv_preamble(config) + certificate_to_csv(cert);
  if (c.out.empty()) {
    out << text;
  } else {
    write_file(c.out, text);
  }
  return 0;
}

std::string render_report(const Report& report, const ojson& config, const std::string& format) {
  if (format == "json") return wrap_json(config, "report", report_to_json(report));
  return csv_preamble(config) + report_to_csv(report);
}

int cmd_verify(const Resolved& r, std::ostream& out) {
  const RunConfig& c = r.cfg;
  if (c.n < 100) throw FieldError("--n", "verify needs n >= 100");
  const Job job = make_job(r, single(c.d, "--d", c.command), single(c.p, "--p", c.command),
                           single(c.eps, "--eps", c.command),
                           single(r.families, "--family", c.command));
  SamplerOptions sopts{c.threads, c.confidence};
  const BoundCertificate cert = certify(r, job, sopts);
  const TailEstimate tail = attributed("--measure", [&] {
    return empirical_tail(job.norm_spec, job.p, c.x_grid, c.n, derive_seed(c.seed, 2),
                          cert.centering.value, sopts, true, cert.direction);
  });
  Report report = verify_bound(cert, tail);
  const ojson config = config_json(r);
  const std::string rendered = render_report(report, config, c.format);
  if (c.out.empty()) {
    out << rendered;
  } else {
    write_file(c.out + ".certificate.json",
               wrap_json(config, "certificate", certificate_to_json(cert)));
    write_file(c.out + ".tail.json", wrap_json(config, "tail", tail_to_json(tail)));
    write_file(c.out + ".report." + c.format, rendered);
  }
  return report.passed() ? 0 : 1;
}

int cmd_sweep(const Resolved& r, std::ostream& out) {
  const RunConfig& c = r.cfg;
  SamplerOptions sopts{c.threads, c.confidence};
  ojson rows = ojson::array();
  std::string csv = "family,d,p,eps,x,bound,neg_log_bound\n";
  for (BoundFamily fam : r.families) {
    for (std::size_t d : c.d) {
      for (double p : c.p) {
        for (double eps : c.eps) {
          const Job job = make_job(r, d, p, eps, fam);
          const BoundCertificate cert = certify(r, job, sopts);
          for (std::size_t i = 0; i < cert.x_grid.size(); ++i) {
            csv += cert.family + "," + std::to_string(d) + "," + format_double(p) + "," +
                   format_double(eps) + "," + format_double(cert.x_grid[i]) + "," +
                   format_double(cert.bound[i]) + "," + format_double(cert.neg_log_bound[i]) +
                   "\n";
            ojson row;
            row["family"] = cert.family;
            row["d"] = d;
            row["p"] = format_double(p);
            row["eps"] = format_double(eps);
            row["x"] = format_double(cert.x_grid[i]);
            row["bound"] = format_double(cert.bound[i]);
            row["neg_log_bound"] = format_double(cert.neg_log_bound[i]);
            rows.push_back(std::move(row));
          }
        }
      }
    }
  }
  const ojson config = config_json(r);
  std::string text = c.format == "json" ? wrap_json(config, "rows", rows.dump())
                                        : csv_preamble(config) + csv;
  if (c.out.empty()) {
    out << text;
  } else {
    write_file(c.out, text);
  }
  return 0;
}

int cmd_report(const Resolved& r, std::ostream& out) {
  const RunConfig& c = r.cfg;
  if (c.cert_path.empty()) throw FieldError("--cert", "required");
  if (c.tail_path.empty()) throw FieldError("--tail", "required");
  const BoundCertificate cert = attributed("--cert", [&] {
    return certificate_from_json(unwrap("--cert", read_file("--cert", c.cert_path), "certificate"));
  });
  const TailEstimate tail = attributed("--tail", [&] {
    return tail_from_json(unwrap("--tail", read_file("--tail", c.tail_path), "tail"));
  });
  Report report = attributed("--tail", [&] { return verify_bound(cert, tail); });
  const std::string rendered = c.format == "text"
                                   ? report_to_text(report)
                                   : render_report(report, config_json(r), c.format);
  if (c.out.empty()) {
    out << rendered;
  } else {
    write_file(c.out, rendered);
  }
  return report.passed() ? 0 : 1;
}

void add_common(CLI::App* app, RunConfig& c, RawFlags& raw) {
  app->add_option("--measure", c.measure,
                  "preset name, inline JSON object or path to a measure JSON file")
      ->required();
  app->add_option("--drift", c.drift, "drift of every coordinate");
  app->add_option("--d", raw.d, "dimension (comma list for sweep)");
  app->add_option("--p", raw.p, "norm exponent (comma list for sweep)");
  app->add_option("--eps", raw.eps, "epsilon of the shifted families (comma list for sweep)");
  app->add_option("--family", raw.family,
                  "thm1|thm2|thm4|thm5|cor2|cor3|cor4|cor5 (comma list for sweep)");
  app->add_option("--direction", c.direction, "upper|lower");
  app->add_option("--x", c.x_spec, "x grid min:max:count:log|lin");
  app->add_option("--n", raw.n, "Monte Carlo sample size");
  app->add_option("--seed", raw.seed, "master seed (default $LEVYCONC_SEED or 12345)");
  app->add_option("--confidence", c.confidence, "two-sided confidence level");
  app->add_option("--format", c.format, "csv|json");
  app->add_option("--out", c.out, "output path (verify: prefix of three files)");
  app->add_option("--threads", c.threads, "worker threads, 0 = hardware concurrency");
  app->add_option("--proj-coords", raw.proj_coords,
                  "cor3/cor4: number of leading coordinates kept (0 = all)");
  app->add_option("--proj-offset", c.proj_offset, "cor3: offset E (0 = eps * E||P X||_2)");
  app->add_option("--invert-rel-width", c.numerics.invert_rel_width,
                  "relative bracket width of rate inversion");
  app->add_option("--outer-rel-tol", c.numerics.outer_rel_tol,
                  "relative tolerance of the outer quadratures");
  app->add_option("--agreement-rel-tol", c.numerics.agreement_rel_tol,
                  "required agreement of integral and sup forms");
}

Resolved resolve(RunConfig c, const RawFlags& raw) {
  Resolved r;
  if (c.command != "report") {
    r.measure = attributed("--measure", [&] { return resolve_measure(c.measure); });
    if (!std::isfinite(c.drift)) throw FieldError("--drift", "must be finite");
    c.d = count_list("--d", raw.d);
    c.p = number_list("--p", raw.p);
    for (double p : c.p) {
      if (!(p >= 1.0) || !std::isfinite(p)) throw FieldError("--p", "p must be a finite value >= 1");
    }
    c.eps = number_list("--eps", raw.eps);
    for (double e : c.eps) {
      if (!(e > 0.0) || !std::isfinite(e)) throw FieldError("--eps", "eps must be positive");
    }
    c.family = split(raw.family, ',');
    r.families = parse_families(raw.family);
    if (c.direction != "upper" && c.direction != "lower") {
      throw FieldError("--direction", "expected upper or lower, got '" + c.direction + "'");
    }
    r.direction = c.direction == "upper" ? Direction::kUpper : Direction::kLower;
    c.x_grid = attributed("--x", [&] { return parse_grid(c.x_spec); });
    c.n = parse_count("--n", raw.n);
    if (c.n == 0) throw FieldError("--n", "must be positive");
    c.seed = raw.seed.empty() ? default_seed() : [&] {
      std::size_t used = 0;
      try {
        const unsigned long long v = std::stoull(raw.seed, &used, 10);
        if (used == raw.seed.size() && raw.seed.front() != '-') return static_cast<std::uint64_t>(v);
      } catch (const std::exception&) {
      }
      throw FieldError("--seed", "not an unsigned integer: '" + raw.seed + "'");
    }();
    if (!(c.confidence > 0.0 && c.confidence < 1.0)) {
      throw FieldError("--confidence", "must lie in (0, 1)");
    }
    c.proj_coords = parse_count("--proj-coords", raw.proj_coords);
    if (c.proj_offset < 0.0 || !std::isfinite(c.proj_offset)) {
      throw FieldError("--proj-offset", "must be finite and nonnegative");
    }
    auto positive = [](double v, const char* field) {
      if (!(v > 0.0) || !std::isfinite(v)) throw FieldError(field, "must be positive");
    };
    positive(c.numerics.invert_rel_width, "--invert-rel-width");
    positive(c.numerics.outer_rel_tol, "--outer-rel-tol");
    positive(c.numerics.agreement_rel_tol, "--agreement-rel-tol");
    if (c.format != "csv" && c.format != "json") {
      throw FieldError("--format", "expected csv or json, got '" + c.format + "'");
    }
  } else if (c.format != "csv" && c.format != "json" && c.format != "text") {
    throw FieldError("--format", "expected csv, json or text, got '" + c.format + "'");
  }
  r.cfg = std::move(c);
  return r;
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 4) throw ConfigError("grid must be min:max:count:log|lin");
  double lo, hi;
  try {
    lo = std::stod(parts[0]);
    hi = std::stod(parts[1]);
  } catch (const std::exception&) {
    throw ConfigError("grid bounds must be numbers");
  }
  std::size_t count = 0;
  try {
    std::size_t used = 0;
    const long long v = std::stoll(parts[2], &used);
    if (used != parts[2].size() || v < 0) throw std::invalid_argument(parts[2]);
    count = static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("grid count must be a nonnegative integer");
  }
  const std::string& kind = parts[3];
  if (count < 2) throw ConfigError("grid count must be at least 2");
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
    throw ConfigError("grid needs finite min < max");
  }
  if (kind != "log" && kind != "lin") throw ConfigError("grid spacing must be log or lin");
  if (kind == "log" && !(lo > 0.0)) throw ConfigError("log grid needs min > 0");
  if (!(lo > 0.0)) throw ConfigError("grid must lie in x > 0");
  std::vector<double> grid(count);
  const double last = static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / last;
    grid[i] = kind == "log" ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)))
                            : lo + f * (hi - lo);
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Concentration bounds for norms of infinitely divisible vectors", "levyconc"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);
  RunConfig cfg;
  RawFlags raw;

  auto* bound = app.add_subcommand("bound", "tabulate a tail-bound certificate");
  auto* verify = app.add_subcommand("verify", "certificate, Monte Carlo tail and report");
  auto* sweep = app.add_subcommand("sweep", "tabulate bounds over lists of d, p, eps, family");
  auto* report = app.add_subcommand("report", "verify a stored certificate against a stored tail");
  for (auto* sub : {bound, verify, sweep}) add_common(sub, cfg, raw);
  report->add_option("--cert", cfg.cert_path, "certificate JSON")->required();
  report->add_option("--tail", cfg.tail_path, "tail estimate JSON")->required();
  report->add_option("--format", cfg.format, "csv|json|text");
  report->add_option("--out", cfg.out, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "levyconc: error: " << e.what() << "\n";
    return 2;
  }

  for (auto* sub : {bound, verify, sweep, report}) {
    if (sub->parsed()) cfg.command = sub->get_name();
  }

  try {
    const Resolved r = resolve(cfg, raw);
    if (r.cfg.command == "bound") return cmd_bound(r, out);
    if (r.cfg.command == "verify") return cmd_verify(r, out);
    if (r.cfg.command == "sweep") return cmd_sweep(r, out);
    return cmd_report(r, out);
  } catch (const FieldError& e) {
    err << "levyconc: error: " << e.field() << ": " << e.what() << "\n";
  } catch (const Error& e) {
    err << "levyconc: error: " << to_string(e.kind()) << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "levyconc: error: " << e.what() << "\n";
  }
  return 2;
}

}  // namespace levyconc::cli
