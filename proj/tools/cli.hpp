#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "levyconc/numerics.hpp"

namespace levyconc::cli {

/// Resolved command-line configuration.
struct RunConfig {
  std::string command;
  std::string measure;
  double drift = 0.0;
  std::vector<std::size_t> d{1};
  std::vector<double> p{2.0};
  std::vector<double> eps{0.5};
  std::vector<std::string> family{"thm1"};
  std::string direction = "upper";
  std::string x_spec = "0.5:20:40:log";
  std::vector<double> x_grid;
  std::size_t n = 100000;
  std::uint64_t seed = 12345;
  double confidence = 0.99;
  std::string format = "csv";
  std::string out;
  std::size_t threads = 0;
  /// Coordinates kept by the projection families (0 keeps all d).
  std::size_t proj_coords = 0;
  /// Offset E of the projection rate; 0 uses eps * E||P X||_2.
  double proj_offset = 0.0;
  NumericsOptions numerics;
  std::string cert_path;
  std::string tail_path;
};

/// Grid from "min:max:count:log|lin".
std::vector<double> parse_grid(const std::string& spec);

/// Runs one invocation. Returns 0 on success, 1 when a verification fails and
/// 2 on configuration or library errors (one-line diagnostic on `err`).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace levyconc::cli
