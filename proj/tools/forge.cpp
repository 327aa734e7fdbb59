// forge: run, validate and export soliton scenarios.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "forge/errors.hpp"
#include "forge/scenario.hpp"

namespace {

struct Options {
  std::string scenario;
  std::optional<double> tol;
  std::optional<std::size_t> steps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::string chart;
  std::string grid;
  bool with_h = false;
};

forge::Overrides overrides_from(const Options& o) {
  forge::Overrides ov;
  ov.tol = o.tol;
  ov.steps = o.steps;
  ov.seed = o.seed;
  if (o.out) ov.output = *o.out;
  return ov;
}

void print_summary(const forge::RunOutcome& r) {
  const auto& m = r.manifest;
  for (const auto& c : m["checks"]) {
    char value[32] = "nan";
    if (!c["value"].is_null()) std::snprintf(value, sizeof value, "%.3e", c["value"].get<double>());
    std::printf("%-4s %s = %s (%s %g)\n", c["pass"].get<bool>() ? "ok" : "FAIL", c["name"].get<std::string>().c_str(),
                value, c["comparison"].get<std::string>().c_str(), c["threshold"].get<double>());
  }
  if (m.contains("error")) {
    if (m["error"]["type"] == "input_error") {
      std::fprintf(stderr, "forge: input error: %s\n", m["error"]["message"].get<std::string>().c_str());
      std::printf("input_error, manifest %s\n", r.manifest_path.string().c_str());
      return;
    }
    std::fprintf(stderr, "forge: %s in %s: %s\n", m["error"]["type"].get<std::string>().c_str(),
                 m["error"]["stage"].get<std::string>().c_str(), m["error"]["message"].get<std::string>().c_str());
  }
  std::printf("%s (%s), manifest %s\n", m["status"].get<std::string>().c_str(), m["kind"].get<std::string>().c_str(),
              r.manifest_path.string().c_str());
}

int run(const Options& o) {
  const auto outcome = forge::run_scenario_file(o.scenario, overrides_from(o));
  print_summary(outcome);
  return outcome.exit_code;
}

int validate(const Options& o) {
  const auto sc = forge::load_scenario(o.scenario, overrides_from(o));
  std::printf("valid %s scenario, digest %s\n", sc.kind.c_str(), sc.digest.c_str());
  return forge::kExitPass;
}

int export_chart(const Options& o) {
  const std::filesystem::path dir = o.out.value_or(".");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw forge::InputError("cannot create " + dir.string() + ": " + ec.message());
  const auto file = forge::export_builtin(o.chart, o.grid, dir, o.with_h);
  std::printf("wrote %s\n", file.string().c_str());
  return forge::kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Construct and verify Lagrangian mean curvature flow solitons"};
  app.set_version_flag("--version", FORGE_VERSION);
  app.require_subcommand(1);
  Options o;

  auto add_overrides = [&](CLI::App* cmd) {
    cmd->add_option("scenario", o.scenario, "Scenario JSON file")->required();
    cmd->add_option("--tol", o.tol, "Replace every residual tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--steps", o.steps, "Override integrator step count")->check(CLI::Range(16, 1 << 26));
    cmd->add_option("--seed", o.seed, "Override the sampling seed");
    cmd->add_option("--out", o.out, "Override the output directory");
  };
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write artifacts plus manifest.json");
  add_overrides(run_cmd);
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario without running it");
  add_overrides(validate_cmd);
  auto* export_cmd = app.add_subcommand("export", "Write a built-in chart as a CSV mesh");
  export_cmd->add_option("--chart", o.chart, "circle, plane, clifford_torus, great_sphere[:n], ...")->required();
  export_cmd->add_option("--grid", o.grid, "Samples per parameter, e.g. 32x32")->required();
  export_cmd->add_option("--out", o.out, "Output directory");
  export_cmd->add_flag("--with-h", o.with_h, "Append mean curvature columns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? forge::kExitPass : forge::kExitInputError;
  }

  try {
    if (*run_cmd) return run(o);
    if (*validate_cmd) return validate(o);
    return export_chart(o);
  } catch (const forge::InputError& e) {
    std::fprintf(stderr, "forge: input error: %s\n", e.what());
    return forge::kExitInputError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "forge: numerical failure: %s\n", e.what());
    return forge::kExitNumericalFailure;
  }
}
