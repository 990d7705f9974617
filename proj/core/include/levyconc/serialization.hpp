#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "levyconc/levy_measure.hpp"
#include "levyconc/numerics.hpp"
#include "levyconc/sampler.hpp"
#include "levyconc/verification.hpp"

namespace levyconc {

/// Library version string.
std::string_view version();

/// "%.17g", with "inf" / "-inf" / "nan" for non-finite values.
std::string format_double(double v);

/// Measure JSON:
///   {"family": "symmetric_exponential", "scale": s}
///   {"family": "gamma_levy", "rate": a, "shape": t0}
///   {"family": "poisson_atom", "intensity": l, "jump": a}
///   {"family": "compound_poisson", "rate": r,
///    "jumps": {"type": "uniform", "lo": a, "hi": b} |
///             {"type": "discrete", "values": [...], "probs": [...]}}
///   {"family": "custom_density", "density_table": [[u, k], ...], "M": m, "R": r | null}
/// Optional "M" / "R" on built-in families must match the computed values.
LevyMeasure1D measure_from_json(std::string_view text);
std::string measure_to_json(const LevyMeasure1D& m);

/// laplace, symmetric_exponential, gamma, poisson_atom, compound_poisson_uniform,
/// compound_poisson_symmetric.
LevyMeasure1D measure_preset(std::string_view name);
std::vector<std::string> measure_preset_names();

/// A preset name, inline JSON (starts with '{') or a path to a JSON file.
LevyMeasure1D resolve_measure(std::string_view arg);

std::string certificate_to_json(const BoundCertificate& cert);
BoundCertificate certificate_from_json(std::string_view text);
/// Columns: x, bound, family, direction, validity_sup, centering_value.
std::string certificate_to_csv(const BoundCertificate& cert);

std::string tail_to_json(const TailEstimate& tail);
TailEstimate tail_from_json(std::string_view text);

std::string report_to_json(const Report& report);
std::string report_to_text(const Report& report);
/// Columns: x, bound, p_hat, ci_low, ci_high, pass.
std::string report_to_csv(const Report& report);

/// One row per draw, columns x1..xd.
std::string batch_to_csv(const SampleBatch& batch);

}  // namespace levyconc
