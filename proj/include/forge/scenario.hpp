#pragma once

// Scenario files and the run driver behind the forge command line.
//
// A scenario is a JSON object {kind, params, sampling, output}. Running it
// writes artifacts and manifest.json into the output directory; the manifest
// is written on every exit path, including input and numerical errors.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "forge/immersion.hpp"
#include "forge/sampling.hpp"

namespace forge {

enum ExitCode : int { kExitPass = 0, kExitCheckFailure = 1, kExitInputError = 2, kExitNumericalFailure = 3 };

/// Command-line overrides; unset fields keep the scenario's values.
struct Overrides {
  std::optional<double> tol;  // replaces every threshold tolerance
  std::optional<std::size_t> steps;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output;
};

struct Scenario {
  std::string kind;
  nlohmann::json params;
  SamplingOptions sampling;  // jet.h_first = fd_step, jet.h_second = 10 fd_step
  double fd_step = 1e-4;
  std::filesystem::path output;
  std::string digest;  // of the scenario file content, independent of key order
  Overrides overrides;
};

/// Parses and fully validates a scenario (kind-specific params included).
/// Throws InputError naming the offending field, or the byte position of a
/// syntax error.
Scenario parse_scenario(std::string_view text, const Overrides& overrides = {});
Scenario load_scenario(const std::filesystem::path& file, const Overrides& overrides = {});

/// 64-bit FNV-1a over the canonical (sorted-key, compact) serialization, as hex.
std::string scenario_digest(const nlohmann::json& doc);

struct RunOutcome {
  int exit_code = kExitPass;
  nlohmann::json manifest;
  std::filesystem::path manifest_path;
};

RunOutcome run_scenario(const Scenario& scenario);

/// Loads and runs a scenario file. Validation failures still produce a
/// manifest (exit code 2) when an output directory can be determined.
RunOutcome run_scenario_file(const std::filesystem::path& file, const Overrides& overrides = {});

/// Built-in charts for export: circle, plane, clifford_torus, great_sphere[:n],
/// torus_legendrian[:n], quadric:l1,l2,..., quadric_lagrangian:l1,l2,...
Chart builtin_chart(std::string_view name);

/// "32x32" -> {32, 32}. Throws InputError on malformed input or zero counts.
std::vector<std::size_t> parse_grid(std::string_view text);

/// Writes <out>/<name>.csv for a built-in chart; returns the file path.
std::filesystem::path export_builtin(std::string_view chart, std::string_view grid, const std::filesystem::path& out,
                                     bool with_mean_curvature = false);

}  // namespace forge
