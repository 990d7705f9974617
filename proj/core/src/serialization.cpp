#include "levyconc/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "levyconc/error.hpp"

#ifndef LEVYCONC_VERSION
#define LEVYCONC_VERSION "0.0.0"
#endif

namespace levyconc {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// JSON has no infinities; they travel as strings.
json num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double to_num(const json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::nan("");
  }
  if (j.is_null()) return kInf;
  throw ConfigError("field '" + field + "' must be a number");
}

const json& field(const json& j, const std::string& name) {
  if (!j.contains(name)) throw ConfigError("missing field '" + name + "'");
  return j.at(name);
}

double number_field(const json& j, const std::string& name) {
  return to_num(field(j, name), name);
}

json parse(std::string_view text, const char* what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + ": invalid JSON: " + e.what());
  }
}

Direction parse_direction(const std::string& s) {
  if (s == "upper") return Direction::kUpper;
  if (s == "lower") return Direction::kLower;
  throw ConfigError("direction must be 'upper' or 'lower', got '" + s + "'");
}

json provenance_json(const Provenance& p) {
  return json{{"quantity", p.quantity},
              {"source", std::string(to_string(p.source))},
              {"seed", p.seed},
              {"n", p.n},
              {"confidence", p.confidence},
              {"side", p.side}};
}

Provenance provenance_from(const json& j) {
  Provenance p;
  p.quantity = field(j, "quantity").get<std::string>();
  const auto src = field(j, "source").get<std::string>();
  bool found = false;
  for (auto s : {Provenance::Source::kAnalytic, Provenance::Source::kMonteCarlo,
                 Provenance::Source::kDeclared, Provenance::Source::kCaller}) {
    if (to_string(s) == src) {
      p.source = s;
      found = true;
    }
  }
  if (!found) throw ConfigError("unknown provenance source '" + src + "'");
  p.seed = field(j, "seed").get<std::uint64_t>();
  p.n = field(j, "n").get<std::size_t>();
  p.confidence = number_field(j, "confidence");
  p.side = field(j, "side").get<std::string>();
  return p;
}

json doubles(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::vector<double> doubles_from(const json& j, const std::string& name) {
  std::vector<double> out;
  for (const auto& x : field(j, name)) out.push_back(to_num(x, name));
  return out;
}

json report_json(const Report& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"x", num(row.x)},
                    {"bound", num(row.bound)},
                    {"p_hat", num(row.p_hat)},
                    {"ci_low", num(row.ci_low)},
                    {"ci_high", num(row.ci_high)},
                    {"slack", num(row.slack)},
                    {"pass", row.pass}});
  }
  json details = json::array();
  for (const auto& [k, v] : r.details) details.push_back({k, v});
  json children = json::array();
  for (const auto& c : r.children) children.push_back(report_json(c));
  return json{{"name", r.name},
              {"verdict", std::string(to_string(r.verdict))},
              {"details", details},
              {"rows", rows},
              {"children", children}};
}

void report_text(const Report& r, int indent, std::ostringstream& out) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  out << pad << r.name << ": " << to_string(r.verdict) << "\n";
  for (const auto& [k, v] : r.details) out << pad << "  " << k << " = " << v << "\n";
  if (!r.rows.empty()) {
    out << pad << "  x bound p_hat ci_low ci_high slack pass\n";
    for (const auto& row : r.rows) {
      out << pad << "  " << format_double(row.x) << " " << format_double(row.bound) << " "
          << format_double(row.p_hat) << " " << format_double(row.ci_low) << " "
          << format_double(row.ci_high) << " " << format_double(row.slack) << " "
          << (row.pass ? "PASS" : "FAIL") << "\n";
    }
  }
  for (const auto& c : r.children) report_text(c, indent + 2, out);
}

}  // namespace

std::string_view version() { return LEVYCONC_VERSION; }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---- measures -------------------------------------------------------------

LevyMeasure1D measure_from_json(std::string_view text) {
  const json j = parse(text, "measure");
  if (!j.is_object()) throw ConfigError("measure: expected a JSON object");
  const auto fam = field(j, "family").get<std::string>();
  std::optional<LevyMeasure1D> m;
  if (fam == "symmetric_exponential") {
    m = LevyMeasure1D::symmetric_exponential(number_field(j, "scale"));
  } else if (fam == "gamma_levy") {
    m = LevyMeasure1D::gamma_levy(number_field(j, "rate"), number_field(j, "shape"));
  } else if (fam == "poisson_atom") {
    m = LevyMeasure1D::poisson_atom(number_field(j, "intensity"), number_field(j, "jump"));
  } else if (fam == "compound_poisson") {
    const double rate = number_field(j, "rate");
    const json& jumps = field(j, "jumps");
    const auto type = field(jumps, "type").get<std::string>();
    if (type == "uniform") {
      m = LevyMeasure1D::compound_poisson(
          rate, UniformJumps{number_field(jumps, "lo"), number_field(jumps, "hi")});
    } else if (type == "discrete") {
      m = LevyMeasure1D::compound_poisson(
          rate, DiscreteJumps{doubles_from(jumps, "values"), doubles_from(jumps, "probs")});
    } else {
      throw ConfigError("measure: jumps.type must be 'uniform' or 'discrete'");
    }
  } else if (fam == "custom_density") {
    std::vector<std::pair<double, double>> nodes;
    for (const auto& node : field(j, "density_table")) {
      if (!node.is_array() || node.size() != 2) {
        throw ConfigError("measure: density_table entries must be [u, k] pairs");
      }
      nodes.emplace_back(to_num(node[0], "density_table"), to_num(node[1], "density_table"));
    }
    if (!j.contains("M")) throw ConfigError("custom_density: field 'M' must be declared");
    std::optional<double> M = to_num(j.at("M"), "M");
    std::optional<double> R;
    if (j.contains("R") && !j.at("R").is_null()) R = to_num(j.at("R"), "R");
    return LevyMeasure1D::custom_table(std::move(nodes), M, R);
  } else {
    throw ConfigError("measure: unknown family '" + fam + "'");
  }
  for (const char* key : {"M", "R"}) {
    if (!j.contains(key)) continue;
    const double declared = to_num(j.at(key), key);
    const double actual = std::string(key) == "M" ? m->abscissa() : m->support_radius();
    const bool same = declared == actual ||
                      std::abs(declared - actual) <= 1e-12 * std::abs(actual);
    if (!same) {
      throw ConfigError(std::string("measure: declared ") + key + " = " +
                        format_double(declared) + " differs from the family's value " +
                        format_double(actual));
    }
  }
  return *m;
}

std::string measure_to_json(const LevyMeasure1D& m) {
  json j = std::visit(
      Overloaded{
          [](const SymmetricExponential& f) {
            return json{{"family", "symmetric_exponential"}, {"scale", f.scale}};
          },
          [](const GammaLevy& f) {
            return json{{"family", "gamma_levy"}, {"rate", f.rate}, {"shape", f.shape}};
          },
          [](const PoissonAtom& f) {
            return json{{"family", "poisson_atom"}, {"intensity", f.intensity}, {"jump", f.jump}};
          },
          [](const CompoundPoisson& f) {
            json jumps = std::visit(
                Overloaded{[](const UniformJumps& u) {
                             return json{{"type", "uniform"}, {"lo", u.lo}, {"hi", u.hi}};
                           },
                           [](const DiscreteJumps& d) {
                             return json{{"type", "discrete"}, {"values", d.values},
                                         {"probs", d.probs}};
                           }},
                f.jumps);
            return json{{"family", "compound_poisson"}, {"rate", f.rate}, {"jumps", jumps}};
          },
          [](const CustomDensity& f) {
            if (f.table.empty()) {
              throw UnsupportedError("a function-backed custom density has no JSON form");
            }
            json table = json::array();
            for (const auto& [u, k] : f.table) table.push_back({u, k});
            json out{{"family", "custom_density"}, {"density_table", table}};
            out["M"] = num(*f.declared_M);
            out["R"] = f.declared_R ? json(*f.declared_R) : json(nullptr);
            return out;
          }},
      m.family());
  return j.dump();
}

LevyMeasure1D measure_preset(std::string_view name) {
  if (name == "laplace" || name == "symmetric_exponential") {
    return LevyMeasure1D::symmetric_exponential(1.0);
  }
  if (name == "gamma") return LevyMeasure1D::gamma_levy(1.0, 1.0);
  if (name == "poisson_atom") return LevyMeasure1D::poisson_atom(1.0, 1.0);
  if (name == "compound_poisson_uniform") {
    return LevyMeasure1D::compound_poisson(1.0, UniformJumps{0.0, 1.0});
  }
  if (name == "compound_poisson_symmetric") {
    return LevyMeasure1D::compound_poisson(1.0, UniformJumps{-1.0, 1.0});
  }
  throw ConfigError("unknown measure preset '" + std::string(name) + "'");
}

std::vector<std::string> measure_preset_names() {
  return {"laplace", "symmetric_exponential", "gamma", "poisson_atom",
          "compound_poisson_uniform", "compound_poisson_symmetric"};
}

LevyMeasure1D resolve_measure(std::string_view arg) {
  if (!arg.empty() && arg.front() == '{') return measure_from_json(arg);
  for (const auto& p : measure_preset_names()) {
    if (p == arg) return measure_preset(arg);
  }
  std::ifstream in{std::string(arg)};
  if (!in) {
    throw ConfigError("measure: '" + std::string(arg) +
                      "' is neither a preset, inline JSON nor a readable file");
  }
  std::ostringstream s;
  s << in.rdbuf();
  return measure_from_json(s.str());
}

// ---- certificates ---------------------------------------------------------

std::string certificate_to_json(const BoundCertificate& c) {
  json params = json::array();
  for (const auto& [k, v] : c.rate_params) params.push_back({k, num(v)});
  json inputs = json::array();
  for (const auto& p : c.inputs) inputs.push_back(provenance_json(p));
  json j{{"family", c.family},
         {"rate_label", c.rate_label},
         {"rate_params", params},
         {"measure", c.measure},
         {"d", c.d},
         {"p", num(c.p)},
         {"direction", std::string(to_string(c.direction))},
         {"centering",
          {{"expression", c.centering.expression},
           {"value", num(c.centering.value)},
           {"provenance", provenance_json(c.centering.provenance)}}},
         {"x", doubles(c.x_grid)},
         {"bound", doubles(c.bound)},
         {"neg_log_bound", doubles(c.neg_log_bound)},
         {"validity_sup", num(c.validity_sup)},
         {"dimension_dependent", c.dimension_dependent},
         {"inputs", inputs},
         {"notes", c.notes}};
  return j.dump(2);
}

BoundCertificate certificate_from_json(std::string_view text) {
  const json j = parse(text, "certificate");
  BoundCertificate c;
  try {
    c.family = field(j, "family").get<std::string>();
    c.rate_label = field(j, "rate_label").get<std::string>();
    for (const auto& kv : field(j, "rate_params")) {
      c.rate_params.emplace_back(kv.at(0).get<std::string>(), to_num(kv.at(1), "rate_params"));
    }
    c.measure = field(j, "measure").get<std::string>();
    c.d = field(j, "d").get<std::size_t>();
    c.p = number_field(j, "p");
    c.direction = parse_direction(field(j, "direction").get<std::string>());
    const json& cen = field(j, "centering");
    c.centering.expression = field(cen, "expression").get<std::string>();
    c.centering.value = number_field(cen, "value");
    c.centering.provenance = provenance_from(field(cen, "provenance"));
    c.x_grid = doubles_from(j, "x");
    c.bound = doubles_from(j, "bound");
    c.neg_log_bound = doubles_from(j, "neg_log_bound");
    c.validity_sup = number_field(j, "validity_sup");
    c.dimension_dependent = field(j, "dimension_dependent").get<bool>();
    for (const auto& p : field(j, "inputs")) c.inputs.push_back(provenance_from(p));
    for (const auto& n : field(j, "notes")) c.notes.push_back(n.get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("certificate: ") + e.what());
  }
  check_certificate(c);
  return c;
}

std::string certificate_to_csv(const BoundCertificate& c) {
  std::string out = "x,bound,family,direction,validity_sup,centering_value\n";
  for (std::size_t i = 0; i < c.x_grid.size(); ++i) {
    out += format_double(c.x_grid[i]) + "," + format_double(c.bound[i]) + "," + c.family + "," +
           std::string(to_string(c.direction)) + "," + format_double(c.validity_sup) + "," +
           format_double(c.centering.value) + "\n";
  }
  return out;
}

// ---- tails ----------------------------------------------------------------

std::string tail_to_json(const TailEstimate& t) {
  json j{{"x", doubles(t.x_grid)},
         {"p_hat", doubles(t.p_hat)},
         {"ci_low", doubles(t.ci_low)},
         {"ci_high", doubles(t.ci_high)},
         {"count", t.count},
         {"n", t.n},
         {"seed", t.seed},
         {"p", num(t.p)},
         {"centering", num(t.centering)},
         {"confidence", num(t.confidence)},
         {"simultaneous", t.simultaneous},
         {"direction", std::string(to_string(t.direction))}};
  return j.dump(2);
}

TailEstimate tail_from_json(std::string_view text) {
  const json j = parse(text, "tail");
  TailEstimate t;
  try {
    t.x_grid = doubles_from(j, "x");
    t.p_hat = doubles_from(j, "p_hat");
    t.ci_low = doubles_from(j, "ci_low");
    t.ci_high = doubles_from(j, "ci_high");
    t.count = field(j, "count").get<std::vector<std::size_t>>();
    t.n = field(j, "n").get<std::size_t>();
    t.seed = field(j, "seed").get<std::uint64_t>();
    t.p = number_field(j, "p");
    t.centering = number_field(j, "centering");
    t.confidence = number_field(j, "confidence");
    t.simultaneous = field(j, "simultaneous").get<bool>();
    t.direction = parse_direction(field(j, "direction").get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("tail: ") + e.what());
  }
  const std::size_t m = t.x_grid.size();
  if (t.p_hat.size() != m || t.ci_low.size() != m || t.ci_high.size() != m ||
      t.count.size() != m) {
    throw ConfigError("tail: columns have mismatched lengths");
  }
  return t;
}

// ---- reports --------------------------------------------------------------

std::string report_to_json(const Report& r) { return report_json(r).dump(2); }

std::string report_to_text(const Report& r) {
  std::ostringstream out;
  report_text(r, 0, out);
  return out.str();
}

std::string report_to_csv(const Report& r) {
  std::string out = "x,bound,p_hat,ci_low,ci_high,pass\n";
  auto emit = [&](const Report& rep) {
    for (const auto& row : rep.rows) {
      out += format_double(row.x) + "," + format_double(row.bound) + "," +
             format_double(row.p_hat) + "," + format_double(row.ci_low) + "," +
             format_double(row.ci_high) + "," + (row.pass ? "PASS" : "FAIL") + "\n";
    }
  };
  emit(r);
  for (const auto& c : r.children) emit(c);
  return out;
}

std::string batch_to_csv(const SampleBatch& b) {
  std::string out;
  for (std::size_t j = 0; j < b.d; ++j) out += (j ? ",x" : "x") + std::to_string(j + 1);
  out += "\n";
  for (std::size_t i = 0; i < b.n; ++i) {
    for (std::size_t j = 0; j < b.d; ++j) {
      if (j) out += ",";
      out += format_double(b.values[i * b.d + j]);
    }
    out += "\n";
  }
  return out;
}

}  // namespace levyconc
