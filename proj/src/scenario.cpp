#include "forge/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "forge/errors.hpp"
#include "forge/initial_data.hpp"
#include "forge/kernels.hpp"
#include "forge/kr_profile.hpp"
#include "forge/mesh_io.hpp"
#include "forge/soliton_zoo.hpp"

namespace forge {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr double kPi = std::numbers::pi;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Typed access to a JSON object that remembers which keys were read, so that
// unknown (typically misspelled) keys can be reported.
class Params {
 public:
  Params(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw InputError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }
  std::string where(const std::string& key) const { return join(path_, key); }

  double number(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_number()) throw InputError(where(key) + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw InputError(where(key) + ": must be finite");
    return x;
  }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  long long integer(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_number_integer()) throw InputError(where(key) + ": expected an integer");
    return v.get<long long>();
  }
  std::size_t count(const std::string& key, std::size_t fallback, std::size_t min = 1) const {
    if (!has(key)) return fallback;
    const long long v = integer(key);
    if (v < static_cast<long long>(min)) throw InputError(where(key) + ": must be >= " + std::to_string(min));
    return static_cast<std::size_t>(v);
  }

  std::string text(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_string()) throw InputError(where(key) + ": expected a string");
    return v.get<std::string>();
  }
  std::string text(const std::string& key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_boolean()) throw InputError(where(key) + ": expected true or false");
    return v.get<bool>();
  }

  /// A number or an array of numbers.
  std::vector<double> numbers(const std::string& key) const {
    const json& v = at(key);
    std::vector<double> out;
    if (v.is_number()) {
      out.push_back(v.get<double>());
    } else if (v.is_array() && !v.empty()) {
      for (const auto& e : v) {
        if (!e.is_number()) throw InputError(where(key) + ": expected numbers");
        out.push_back(e.get<double>());
      }
    } else {
      throw InputError(where(key) + ": expected a number or a non-empty array of numbers");
    }
    for (double x : out) {
      if (!std::isfinite(x)) throw InputError(where(key) + ": must be finite");
    }
    return out;
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
    return has(key) ? numbers(key) : fallback;
  }

  std::vector<std::size_t> counts(const std::string& key, std::vector<std::size_t> fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_array()) throw InputError(where(key) + ": expected an array of positive integers");
    std::vector<std::size_t> out;
    for (const auto& e : v) {
      if (!e.is_number_integer() || e.get<long long>() < 1) {
        throw InputError(where(key) + ": expected an array of positive integers");
      }
      out.push_back(e.get<std::size_t>());
    }
    return out;
  }

  Params object(const std::string& key) const { return Params(at(key), where(key)); }
  const json& raw(const std::string& key) const { return at(key); }

  /// Throws on keys that were never read.
  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!used_.count(key)) throw InputError(where(key) + ": unknown key");
    }
  }

 private:
  const json& at(const std::string& key) const {
    if (!obj_.contains(key)) throw InputError(where(key) + ": required");
    used_.insert(key);
    return obj_.at(key);
  }

  const json& obj_;
  std::string path_;
  mutable std::set<std::string> used_;
};

struct CheckRecord {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool at_least = false;
  bool pass = false;
};

class Context {
 public:
  Context(const Scenario& sc, fs::path dir) : scenario_(sc), dir_(std::move(dir)) {}

  const SamplingOptions& sampling() const { return scenario_.sampling; }

  void stage(std::string name) { stage_ = std::move(name); }
  const std::string& current_stage() const { return stage_; }

  /// Passes when value <= tol. --tol replaces every tolerance of this kind.
  void at_most(const std::string& name, double value, double tol) {
    add(name, value, scenario_.overrides.tol.value_or(tol), false);
  }
  /// Passes when value >= threshold (ratios and margins; not affected by --tol).
  void at_least(const std::string& name, double value, double threshold) { add(name, value, threshold, true); }
  void expect(const std::string& name, bool ok) { add(name, ok ? 1.0 : 0.0, 1.0, true); }

  fs::path artifact(const std::string& name) {
    artifacts_.push_back(name);
    return dir_ / name;
  }

  json report = json::object();
  const std::vector<CheckRecord>& checks() const { return checks_; }
  const std::vector<std::string>& artifacts() const { return artifacts_; }

 private:
  void add(const std::string& name, double value, double threshold, bool at_least) {
    stage_ = name;
    const bool pass = at_least ? value >= threshold : value <= threshold;  // NaN fails both ways
    checks_.push_back({name, value, threshold, at_least, pass});
  }

  const Scenario& scenario_;
  fs::path dir_;
  std::string stage_ = "setup";
  std::vector<CheckRecord> checks_;
  std::vector<std::string> artifacts_;
};

using Runner = std::function<void(Context&)>;

// ---------------------------------------------------------------- helpers

std::vector<std::size_t> uniform_grid(std::size_t dims, std::size_t per_axis) {
  return std::vector<std::size_t>(dims, per_axis);
}

std::vector<std::size_t> mesh_grid(const Params& p, std::size_t dims, std::size_t per_axis) {
  auto grid = p.counts("mesh", uniform_grid(dims, per_axis));
  if (grid.size() != dims) {
    throw InputError(p.where("mesh") + ": need " + std::to_string(dims) + " counts, one per chart axis");
  }
  return grid;
}

double isotropy_of(const Chart& chart, const SamplingOptions& s) {
  const auto pts = sample_domain(chart.domain(), s.n_samples, s.seed, s.jet.clearance());
  return max_isotropy_residual(sample_geometry(chart, pts, s.jet));
}

ProfileParams profile_params(int m, double kappa, double lambda, double mu, const Params& p) {
  ProfileParams pp;
  pp.model = {m, kappa};
  pp.lambda = lambda;
  pp.mu = mu;
  pp.sigma0 = p.number("sigma0", 1.0);
  pp.phi0 = p.number("phi0", 2.0);
  pp.c = p.number("c", 0.0);
  pp.sigma_max = p.number("sigma_max", 10.0);
  pp.validate();
  return pp;
}

int model_m(const Params& p) {
  const long long m = p.has("m") ? p.integer("m") : 1;
  if (m < 1 || m > 16) throw InputError(p.where("m") + ": must be in [1, 16]");
  return static_cast<int>(m);
}

std::vector<double> kappas(const Params& p) {
  if (p.has("kappa") && p.has("alpha")) throw InputError(p.where("alpha") + ": give kappa or alpha, not both");
  if (p.has("alpha")) {
    auto v = p.numbers("alpha");
    for (double& x : v) x += 2.0;
    return v;
  }
  return p.numbers("kappa");
}

std::string tuple_label(double kappa, double lambda, double mu) {
  return "[kappa=" + short_number(kappa) + ",lambda=" + short_number(lambda) + ",mu=" + short_number(mu) + "]";
}

double profile_fd_residual(const Profile& prof, double sigma) {
  const double h = 1e-3;
  const double d = (-prof.phi(sigma + 2 * h) + 8 * prof.phi(sigma + h) - 8 * prof.phi(sigma - h) +
                    prof.phi(sigma - 2 * h)) /
                   (12 * h);
  const double scale = std::max({1.0, std::abs(prof.phi(sigma)), std::abs(prof.dphi(sigma))});
  return std::abs(d - profile_slope(prof.params(), sigma, prof.phi(sigma))) / scale;
}

json diagnostics_json(const ProfileDiagnostics& d) {
  json j;
  j["sign_changes"] = d.sign_changes;
  j["positivity"] = d.positivity ? json::array({d.positivity->first, d.positivity->second}) : json(nullptr);
  j["growth_ratio"] = d.growth_ratio;
  j["sigma_end"] = d.sigma_end;
  return j;
}

double numeric_at(const ProfileParams& pp, std::size_t steps, double sigma) {
  try {
    return solve_profile_numeric(pp, steps).phi(sigma);
  } catch (const BlowUpError& e) {
    throw NumericalError(std::string(e.what()) + " (last valid sigma " + short_number(e.last_valid_sigma()) + ")");
  }
}

// ---------------------------------------------------------------- kr_profile

Runner prepare_kr_profile(const Params& p, const Scenario& sc) {
  std::vector<ProfileParams> tuples;
  const bool sweep = p.has("random_tuples");
  if (sweep) {
    const Params r = p.object("random_tuples");
    const std::size_t n = r.count("count", 20);
    const auto seed = static_cast<std::uint64_t>(r.count("seed", 0, 0));
    const auto ms = r.numbers("m", {1, 2, 3});
    const auto kr = r.numbers("kappa", {-2.0, 6.0});
    const auto ls = r.numbers("lambda", {-1, 0, 1});
    const auto mr = r.numbers("mu", {-2.0, 2.0});
    r.finish();
    if (kr.size() != 2 || mr.size() != 2) throw InputError(p.where("random_tuples") + ": kappa and mu are [lo, hi]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto pick = [&](const std::vector<double>& v) { return v[static_cast<std::size_t>(unit(rng) * v.size()) % v.size()]; };
    for (std::size_t i = 0; i < n; ++i) {
      const int m = static_cast<int>(pick(ms));
      const double kappa = kr[0] + (kr[1] - kr[0]) * unit(rng);
      const double lambda = pick(ls);
      const double mu = mr[0] + (mr[1] - mr[0]) * unit(rng);
      if (m < 1) throw InputError(p.where("random_tuples.m") + ": must be positive");
      tuples.push_back(profile_params(m, kappa, lambda, mu, p));
    }
  } else {
    const int m = model_m(p);
    const auto ks = kappas(p);
    if (ks.size() != 1) throw InputError(p.where("kappa") + ": expected a single value");
    tuples.push_back(profile_params(m, ks[0], p.number("lambda"), p.number("mu"), p));
  }
  const std::size_t steps = sc.overrides.steps.value_or(p.count("steps", 1u << 14, 16));
  if (steps < 16) throw InputError("steps: must be >= 16");
  const std::size_t grid = p.count("grid", 256, 8);
  const std::size_t order_steps = p.count("order_steps", 0, 0);
  if (order_steps != 0 && order_steps < 16) throw InputError(p.where("order_steps") + ": must be >= 16");
  p.finish();

  return [=](Context& ctx) {
    json rows = json::array();
    std::vector<std::vector<double>> sweep_rows;
    for (std::size_t t = 0; t < tuples.size(); ++t) {
      const ProfileParams& pp = tuples[t];
      const std::string label = tuples.size() > 1 ? "[" + std::to_string(t) + "]" : "";
      ctx.stage("closed_vs_rk4" + label);
      const Profile closed = solve_profile_closed(pp);
      const double ref = closed.phi(pp.sigma_max);
      const double rk = numeric_at(pp, steps, pp.sigma_max);
      const double rel = std::abs(rk - ref) / std::max(1.0, std::abs(ref));
      ctx.at_most("closed_vs_rk4" + label, rel, 1e-8);

      ctx.stage("ode_residual" + label);
      double worst = 0.0;
      const double lo = pp.sigma0 + 0.01, hi = pp.sigma_max - 0.01;
      for (std::size_t i = 0; i < grid; ++i) {
        worst = std::max(worst, profile_fd_residual(closed, lo + (hi - lo) * (i + 0.5) / static_cast<double>(grid)));
      }
      ctx.at_most("ode_residual" + label, worst, 1e-8);

      if (order_steps) {
        ctx.stage("rk4_order" + label);
        const double e1 = std::abs(numeric_at(pp, order_steps, pp.sigma_max) - ref);
        const double e2 = std::abs(numeric_at(pp, 2 * order_steps, pp.sigma_max) - ref);
        ctx.at_least("rk4_order" + label, std::log2(e1 / e2), 3.5);
      }

      json row;
      row["m"] = pp.model.m;
      row["kappa"] = pp.model.kappa;
      row["lambda"] = pp.lambda;
      row["mu"] = pp.mu;
      row["phi_sigma_max_closed"] = ref;
      row["phi_sigma_max_rk4"] = rk;
      if (!sweep) {
        row["diagnostics"] = diagnostics_json(profile_diagnostics(closed));
        const Profile numeric = solve_profile_numeric(pp, steps);
        std::vector<std::vector<double>> out;
        for (std::size_t i = 0; i < grid; ++i) {
          const double s = pp.sigma0 + (pp.sigma_max - pp.sigma0) * static_cast<double>(i) / (grid - 1.0);
          out.push_back({s, closed.phi(s), numeric.phi(s), closed.dphi(s)});
        }
        const std::vector<std::string> header{"sigma", "phi_closed", "phi_rk4", "dphi_closed"};
        write_csv(ctx.artifact("profile.csv"), header, out);
      } else {
        sweep_rows.push_back({static_cast<double>(pp.model.m), pp.model.kappa, pp.lambda, pp.mu, ref, rk, rel});
      }
      rows.push_back(row);
    }
    if (sweep) {
      const std::vector<std::string> header{"m", "kappa", "lambda", "mu", "phi_closed", "phi_rk4", "rel_diff"};
      write_csv(ctx.artifact("sweep.csv"), header, sweep_rows);
    }
    ctx.report["profiles"] = rows;
    ctx.report["steps"] = steps;
  };
}

// ---------------------------------------------------------------- kr_verify

Runner prepare_kr_verify(const Params& p, const Scenario& sc) {
  const int m = model_m(p);
  const auto ks = kappas(p);
  const auto ls = p.numbers("lambda");
  const auto mus = p.numbers("mu");
  std::vector<ProfileParams> tuples;
  for (double k : ks) {
    for (double l : ls) {
      for (double mu : mus) {
        if (!(k > 0.0)) throw InputError(p.where("kappa") + ": the model cone needs kappa > 0");
        tuples.push_back(profile_params(m, k, l, mu, p));
      }
    }
  }
  const Annulus annulus{p.number("r_min", 0.8), p.number("r_max", 1.2)};
  if (!(0.0 < annulus.r_min && annulus.r_min <= annulus.r_max)) {
    throw InputError(p.where("r_min") + ": need 0 < r_min <= r_max");
  }
  const std::size_t points = p.count("points", 20);
  const double h = p.number("h", 1e-3);
  if (!(h > 0.0 && h < 0.1)) throw InputError(p.where("h") + ": must be in (0, 0.1)");
  const double shift = p.number("control_shift", 0.0);
  const double perturb = p.number("perturb", 0.0);
  const bool calabi_yau = p.flag("calabi_yau", false);
  p.finish();
  if (calabi_yau) {
    for (const auto& pp : tuples) {
      if (pp.lambda != 0.0 || pp.mu != 0.0 || pp.model.kappa != 2.0 * m + 2.0) {
        throw InputError(p.where("calabi_yau") + ": needs kappa = 2m + 2, lambda = 0, mu = 0");
      }
    }
  }
  const std::uint64_t seed = sc.sampling.seed;

  return [=](Context& ctx) {
    const auto pts = annulus_points(m, annulus, points, seed);
    std::vector<std::vector<double>> rows;
    double overall = 0.0;
    for (const auto& pp : tuples) {
      const std::string label = tuple_label(pp.model.kappa, pp.lambda, pp.mu);
      ctx.stage("soliton_residual" + label);
      const Profile prof = perturb != 0.0 ? solve_profile_closed(pp).shifted(perturb) : solve_profile_closed(pp);
      const auto res = soliton_residuals(potential_for_annulus(prof, annulus, h), pts, h);
      const double worst = *std::max_element(res.begin(), res.end());
      overall = std::max(overall, worst);
      ctx.at_most("soliton_residual" + label, worst, 1e-4);

      if (calabi_yau) {
        ctx.stage("calabi_yau");
        const double slope = pp.phi0 / pp.sigma0;
        double profile_err = 0.0;
        for (int i = 0; i <= 900; ++i) {
          const double s = 1.0 + 0.01 * i;
          profile_err = std::max(profile_err, std::abs(prof.phi(s) - slope * s));
        }
        ctx.at_most("cy_profile", profile_err, 1e-10);
        const auto pot = potential_for_annulus(prof, annulus, h);
        const auto n = static_cast<Eigen::Index>(m + 1);
        const ComplexMatrix half = 0.5 * ComplexMatrix::Identity(n, n);
        double metric_err = 0.0, ricci = 0.0;
        for (const auto& z : pts) {
          metric_err = std::max(metric_err, (cone_metric_at(z, pot) - half).cwiseAbs().maxCoeff());
          ricci = std::max(ricci, ricci_form_at(z, pot, h).cwiseAbs().maxCoeff());
        }
        if (pp.phi0 == 2.0 * pp.sigma0) ctx.at_most("cone_metric_half_identity", metric_err, 1e-10);
        ctx.at_most("ricci_max_entry", ricci, 1e-5);
      }
      std::vector<double> bad(res.size(), 0.0);
      if (shift != 0.0) {
        ctx.stage("control" + label);
        bad = soliton_residuals(potential_for_annulus(prof.shifted(shift), annulus, h), pts, h);
        // perturbed profile must miss the tolerance by two orders of magnitude
        const double tol = sc.overrides.tol.value_or(1e-4);
        ctx.at_least("control" + label, *std::max_element(bad.begin(), bad.end()), 100.0 * tol);
      }
      for (std::size_t i = 0; i < pts.size(); ++i) {
        rows.push_back({pp.model.kappa, pp.lambda, pp.mu, static_cast<double>(i), pts[i].norm(), res[i], bad[i]});
      }
    }
    const std::vector<std::string> header{"kappa", "lambda", "mu", "point", "radius", "residual", "control_residual"};
    write_csv(ctx.artifact("residuals.csv"), header, rows);
    ctx.report["max_residual"] = overall;
    ctx.report["tuples"] = tuples.size();
    ctx.report["calibration"] = {{"lambda_scale", kFrozenCalibration.lambda_scale},
                                 {"potential_scale", kFrozenCalibration.potential_scale}};
  };
}

// ---------------------------------------------------------------- quadric

QuadricSpec quadric_spec(const Params& p, const std::string& key = "lambdas") {
  QuadricSpec spec{p.numbers(key)};
  try {
    spec.validate();
  } catch (const InputError& e) {
    throw InputError(p.where(key) + ": " + e.what());
  }
  return spec;
}

Runner prepare_quadric(const Params& p, const Scenario&) {
  const QuadricSpec spec = quadric_spec(p);
  const double s_min = p.number("s_min", 0.0);
  const double s_max = p.number("s_max", 2 * kPi);
  if (!(s_min < s_max)) throw InputError(p.where("s_max") + ": need s_min < s_max");
  const Chart chart = build_quadric_lagrangian(spec, s_min, s_max);
  const auto grid = mesh_grid(p, chart.dim_domain(), 16);
  p.finish();

  return [=](Context& ctx) {
    ctx.stage("isotropy");
    ctx.at_most("isotropy", isotropy_of(chart, ctx.sampling()), 1e-6);
    ctx.stage("fit");
    const SolitonFit fit = fit_soliton(chart, ctx.sampling());
    ctx.at_most("fit_a", std::abs(fit.a + spec.trace()), 1e-4);
    ctx.at_most("fit_b", fit.b.norm(), 1e-6);
    ctx.at_most("fit_residual", fit.residual, 1e-5);
    ctx.stage("mesh");
    export_mesh(chart, grid, ctx.artifact("mesh.csv"));
    ctx.report["a"] = fit.a;
    ctx.report["expected_a"] = -spec.trace();
    ctx.report["b_norm"] = fit.b.norm();
    ctx.report["kernel_dim"] = fit.kernel_dim;
    ctx.report["fit_residual"] = fit.residual;
  };
}

// ---------------------------------------------------------------- flow_trace

const char* kind_name(TraceSlice::Kind k) {
  switch (k) {
    case TraceSlice::Kind::regular: return "regular";
    case TraceSlice::Kind::degenerate_cone: return "degenerate_cone";
    case TraceSlice::Kind::degenerate_point: return "degenerate_point";
    case TraceSlice::Kind::empty: return "empty";
  }
  return "?";
}

Runner prepare_flow_trace(const Params& p, const Scenario& sc) {
  const QuadricSpec spec = quadric_spec(p);
  const auto ts = p.numbers("t");
  const std::size_t points = p.count("points", 64);
  const std::string expect_t0 = p.text("expect_t0", "");
  if (!expect_t0.empty() && expect_t0 != "degenerate_cone" && expect_t0 != "degenerate_point") {
    throw InputError(p.where("expect_t0") + ": expected degenerate_cone or degenerate_point");
  }
  p.finish();
  const std::uint64_t seed = sc.sampling.seed;

  return [=](Context& ctx) {
    ctx.stage("trace");
    const auto slices = flow_trace(spec, ts, points, seed);
    json out = json::array();
    const std::size_t n = spec.n();
    std::vector<std::string> header;
    for (std::size_t j = 1; j <= n; ++j) header.push_back("x" + std::to_string(j));

    const TraceSlice* ref_neg = nullptr;
    const TraceSlice* ref_pos = nullptr;
    for (const auto& s : slices) {
      const std::string tag = "[t=" + short_number(s.t) + "]";
      std::vector<std::vector<double>> rows;
      double constraint = 0.0;
      for (const auto& x : s.points) {
        rows.emplace_back(x.data(), x.data() + x.size());
        double q = 0.0;
        for (std::size_t j = 0; j < n; ++j) q += spec.lambdas[j] * x[static_cast<Eigen::Index>(j)] * x[static_cast<Eigen::Index>(j)];
        constraint = std::max(constraint, std::abs(q - s.level) / std::max(1.0, std::abs(s.level)));
      }
      write_csv(ctx.artifact("slice_t" + short_number(s.t) + ".csv"), header, rows);
      if (s.kind == TraceSlice::Kind::regular) {
        ctx.at_most("constraint" + tag, constraint, 1e-10);
        const TraceSlice*& ref = s.t < 0.0 ? ref_neg : ref_pos;
        if (!ref) {
          ref = &s;
        } else {
          const double factor = std::sqrt(s.t / ref->t);
          double worst = 0.0;
          for (std::size_t i = 0; i < s.points.size(); ++i) {
            worst = std::max(worst, (s.points[i] - factor * ref->points[i]).cwiseAbs().maxCoeff());
          }
          ctx.at_most("homothety[t=" + short_number(ref->t) + "->" + short_number(s.t) + "]", worst, 1e-10);
        }
      }
      if (s.t == 0.0) {
        const bool flagged = s.kind == TraceSlice::Kind::degenerate_cone || s.kind == TraceSlice::Kind::degenerate_point;
        ctx.expect("t0_degeneration", flagged && (expect_t0.empty() || expect_t0 == kind_name(s.kind)));
      }
      out.push_back({{"t", s.t}, {"level", s.level}, {"kind", kind_name(s.kind)}, {"points", s.points.size()}});
    }
    ctx.report["slices"] = out;
  };
}

// ---------------------------------------------------------------- initial data

InitialData datum_from(const Params& d) {
  const std::string type = d.text("type");
  InitialData id = [&]() {
    if (type == "sphere") return sphere_initial_data(d.count("n", 3, 2));
    if (type == "quadric") return quadric_initial_data(quadric_spec(d));
    throw InputError(d.where("type") + ": unknown datum '" + type + "' (sphere, quadric)");
  }();
  const double eps = d.number("perturb", 0.0);
  d.finish();
  return eps != 0.0 ? perturbed_initial_data(id, eps) : id;
}

Runner prepare_initial_data_check(const Params& p, const Scenario&) {
  const InitialData id = datum_from(p.object("datum"));
  const auto grid = mesh_grid(p, id.sigma.dim_domain(), 16);
  p.finish();
  return [=](Context& ctx) {
    ctx.stage("mesh");
    export_mesh(id.sigma, grid, ctx.artifact("datum.csv"));
    ctx.stage("initial_data");
    const auto r = check_initial_data(id, ctx.sampling(), 1e-8);
    ctx.at_most("initial_data", r.max_residual, 1e-8);
    if (id.sigma.dim_domain() + 1 == id.n()) {
      ctx.stage("constant_angle");
      const auto a = check_constant_angle(id, ctx.sampling());
      ctx.at_most("constant_angle", a.max_deviation, 1e-8);
      ctx.report["mean_angle"] = a.mean_angle;
      ctx.report["angle_deviation_mod_pi"] = a.max_deviation_mod_pi;
    }
    if (id.quadric) {
      ctx.stage("hyperquadric_legendrian");
      const auto q = check_quadric_legendrian(id.sigma, id.quadric->Lambda, id.quadric->c, ctx.sampling());
      ctx.at_most("hyperquadric_legendrian", q.legendrian_residual, 1e-6);
      ctx.at_most("hyperquadric_curvature", q.mean_curvature_residual, 1e-5);
      ctx.at_most("hyperquadric_level", q.level_residual, 1e-8);
    }
    ctx.report["samples"] = r.samples;
  };
}

// ---------------------------------------------------------------- developing

struct DriverSpec {
  std::string name;
  Driver fn;
  bool special = false;
};

DriverSpec driver_from(const Params& p, const std::string& key) {
  const std::string name = p.text(key, "one");
  if (name == "one") return {name, [](double) { return cplx{1.0, 0.0}; }};
  if (name == "zero") return {name, [](double) { return cplx{0.0, 0.0}; }};
  if (name == "rotation") return {name, [](double s) { return std::polar(1.0, s); }};
  if (name == "special_lagrangian") return {name, {}, true};
  throw InputError(p.where(key) + ": unknown driver '" + name + "' (one, zero, rotation, special_lagrangian)");
}

double s_max_of(const Params& p, const std::string& key = "s_max") {
  const double s = p.number(key);
  if (!(s > 0.0)) throw InputError(p.where(key) + ": must be positive");
  return s;
}

DevelopingPath develop_with(const InitialData& id, const DriverSpec& d, double s_max, std::size_t steps) {
  return d.special ? develop_special_lagrangian(id, s_max, steps) : develop(id, d.fn, s_max, steps);
}

void write_path_csv(Context& ctx, const DevelopingPath& path) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < path.grid().size(); ++i) {
    const cplx det = cx_det(path.A()[i]);
    rows.push_back({path.grid()[i], path.unwrapped_angle()[i], std::abs(det), path.alpha()[i].real(),
                    path.alpha()[i].imag()});
  }
  const std::vector<std::string> header{"s", "arg_det_A", "abs_det_A", "alpha_re", "alpha_im"};
  write_csv(ctx.artifact("path.csv"), header, rows);
}

double closed_form_error(const DevelopingPath& path, const InitialData& id) {
  const auto n = static_cast<Eigen::Index>(id.n());
  double err = 0.0;
  for (std::size_t i = 0; i < path.grid().size(); ++i) {
    ComplexMatrix expect = ComplexMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) expect(j, j) = std::polar(1.0, id.quadric->Lambda(j, j).real() * path.grid()[i]);
    err = std::max(err, (path.A()[i] - expect).cwiseAbs().maxCoeff());
    err = std::max(err, path.a()[i].cwiseAbs().maxCoeff());
  }
  return err;
}

bool is_diagonal_quadric(const InitialData& id) {
  if (!id.quadric) return false;
  const ComplexMatrix& l = id.quadric->Lambda;
  return (l - ComplexMatrix(l.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0 &&
         l.diagonal().imag().cwiseAbs().maxCoeff() == 0.0;
}

Runner prepare_develop(const Params& p, const Scenario& sc) {
  const InitialData id = datum_from(p.object("datum"));
  const DriverSpec driver = driver_from(p, "driver");
  const double s_max = s_max_of(p);
  const std::size_t steps = sc.overrides.steps.value_or(p.count("steps", default_developing_steps(s_max), 16));
  if (steps < 16) throw InputError("steps: must be >= 16");
  const std::size_t convergence = p.count("convergence_steps", 0, 0);
  if (convergence != 0 && convergence < 16) throw InputError(p.where("convergence_steps") + ": must be >= 16");
  const auto grid = mesh_grid(p, id.sigma.dim_domain() + 1, 16);
  p.finish();

  return [=](Context& ctx) {
    ctx.stage("develop");
    const DevelopingPath path = develop_with(id, driver, s_max, steps);
    const Chart chart = developed_chart(path, id);
    ctx.stage("isotropy");
    const double iso = isotropy_of(chart, ctx.sampling());
    ctx.at_most("isotropy", iso, 1e-6);
    if (is_diagonal_quadric(id) && driver.name == "one") {
      ctx.at_most("closed_form", closed_form_error(path, id), 1e-8);
    }
    if (id.sigma.dim_domain() + 1 == id.n()) {
      ctx.stage("angle_formula");
      ctx.at_most("angle_formula", angle_formula_check(path, id, ctx.sampling()).max_deviation, 1e-6);
    }
    if (convergence) {
      ctx.stage("isotropy_convergence");
      const double coarse = isotropy_of(developed_chart(develop_with(id, driver, s_max, convergence), id), ctx.sampling());
      const double fine =
          isotropy_of(developed_chart(develop_with(id, driver, s_max, 4 * convergence), id), ctx.sampling());
      ctx.at_most("isotropy_quadrupled", fine, 1e-6);
      ctx.at_least("isotropy_convergence", coarse / fine, 8.0);
      ctx.report["isotropy_coarse"] = coarse;
      ctx.report["isotropy_fine"] = fine;
    }
    ctx.stage("mesh");
    export_mesh(chart, grid, ctx.artifact("mesh.csv"));
    write_path_csv(ctx, path);
    ctx.report["isotropy"] = iso;
    ctx.report["steps"] = steps;
    ctx.report["driver"] = driver.name;
  };
}

Runner prepare_special_lagrangian(const Params& p, const Scenario& sc) {
  const Params dp = p.object("datum");
  const bool sphere = dp.text("type") == "sphere" && !dp.has("perturb");
  const InitialData id = datum_from(dp);
  if (id.sigma.dim_domain() + 1 != id.n()) throw InputError(p.where("datum") + ": need a hypersurface datum");
  const double s_max = s_max_of(p);
  const std::size_t steps = sc.overrides.steps.value_or(p.count("steps", default_developing_steps(s_max), 16));
  if (steps < 16) throw InputError("steps: must be >= 16");
  const auto grid = p.counts("grid", uniform_grid(id.n(), 20));
  if (grid.size() != id.n()) throw InputError(p.where("grid") + ": need one count per chart axis");
  const auto mesh = mesh_grid(p, id.n(), 16);
  p.finish();

  return [=](Context& ctx) {
    ctx.stage("develop");
    const DevelopingPath path = develop_special_lagrangian(id, s_max, steps);
    const Chart chart = developed_chart(path, id);

    ctx.stage("angle_constancy");
    const JetOptions& jo = ctx.sampling().jet;
    const auto pts = grid_domain(chart.domain(), grid, jo.clearance());
    const auto geo = sample_geometry(chart, pts, jo);
    double dev = 0.0;
    for (const auto& g : geo) {
      if (!g.angle) throw NumericalError("special_lagrangian: tangent frame is not totally real");
      dev = std::max(dev, angle_distance(*g.angle, *geo.front().angle));
    }
    ctx.at_most("angle_constancy", dev, 1e-6);
    ctx.report["angle"] = *geo.front().angle;

    ctx.stage("isotropy");
    ctx.at_most("isotropy", max_isotropy_residual(geo), 1e-6);
    ctx.stage("angle_formula");
    ctx.at_most("angle_formula", angle_formula_check(path, id, ctx.sampling()).max_deviation, 1e-6);
    if (sphere) {
      ctx.stage("conserved");
      double conserved = 0.0, scalar = 0.0;
      const auto n = static_cast<Eigen::Index>(id.n());
      for (const auto& A : path.A()) {
        const cplx w = A(0, 0);
        conserved = std::max(conserved, std::abs(std::pow(w, static_cast<int>(n)).real() - 1.0));
        scalar = std::max(scalar, (A - w * ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff());
      }
      ctx.at_most("conserved_re_w_n", conserved, 1e-8);
      ctx.at_most("scalar_ansatz", scalar, 1e-10);
    }
    ctx.stage("mesh");
    export_mesh(chart, mesh, ctx.artifact("mesh.csv"));
    write_path_csv(ctx, path);
    ctx.report["steps"] = steps;
  };
}

Runner prepare_twisted_product(const Params& p, const Scenario& sc) {
  const InitialData first = datum_from(p.object("first"));
  const InitialData second = datum_from(p.object("second"));
  const json& c = p.raw("C");
  Eigen::Matrix2d C;
  if (!c.is_array() || c.size() != 2) throw InputError(p.where("C") + ": expected [[c11, c12], [c21, c22]]");
  for (int i = 0; i < 2; ++i) {
    if (!c[i].is_array() || c[i].size() != 2) throw InputError(p.where("C") + ": expected [[c11, c12], [c21, c22]]");
    for (int j = 0; j < 2; ++j) {
      if (!c[i][j].is_number()) throw InputError(p.where("C") + ": entries must be numbers");
      C(i, j) = c[i][j].get<double>();
    }
  }
  const DriverSpec d1 = driver_from(p, "driver1");
  const DriverSpec d2 = driver_from(p, "driver2");
  if (d1.special || d2.special) throw InputError(p.where("driver1") + ": two-parameter developing needs prescribed drivers");
  const double s1 = p.has("s1_max") ? s_max_of(p, "s1_max") : 1.0;
  const double s2 = p.has("s2_max") ? s_max_of(p, "s2_max") : 1.0;
  const std::size_t steps = sc.overrides.steps.value_or(p.count("steps", 0, 0));
  if (steps != 0 && steps < 16) throw InputError("steps: must be >= 16");
  const auto mesh_per_axis = p.count("mesh_per_axis", 6);
  const bool swap_check = p.flag("swap_check", true);
  p.finish();
  const TwistedProduct tp = twisted_product(first, second, C);

  return [=](Context& ctx) {
    ctx.stage("initial_data_first");
    ctx.at_most("initial_data_first", check_initial_data(tp.first(), ctx.sampling(), 1e-8).max_residual, 1e-8);
    ctx.stage("initial_data_second");
    ctx.at_most("initial_data_second", check_initial_data(tp.second(), ctx.sampling(), 1e-8).max_residual, 1e-8);

    ctx.stage("two_parameter_developing");
    const std::size_t n1 = steps ? steps : default_developing_steps(s1);
    const std::size_t n2 = steps ? steps : default_developing_steps(s2);
    const auto dev = develop_two_param(tp, d1.fn, d2.fn, s1, s2, n1, n2);
    ctx.at_most("commutator", dev.commutator, 1e-8);
    ctx.expect("lagrangian_dimension", dev.chart.dim_domain() == dev.chart.dim_ambient());
    ctx.stage("isotropy");
    ctx.at_most("isotropy", isotropy_of(dev.chart, ctx.sampling()), 1e-6);

    if (swap_check) {
      ctx.stage("factor_order");
      TwistedProduct swapped = tp;
      std::swap(swapped.B1, swapped.B2);
      std::swap(swapped.b1, swapped.b2);
      const auto other = develop_two_param(swapped, d2.fn, d1.fn, s2, s1, n2, n1);
      const std::size_t k = tp.sigma.dim_domain();
      double diff = 0.0;
      const auto& s = ctx.sampling();
      for (auto u : sample_domain(dev.chart.domain(), s.n_samples, s.seed, 0.0)) {
        DomainPoint v = u;
        std::swap(v[k], v[k + 1]);
        diff = std::max(diff, (dev.chart(u) - other.chart(v)).cwiseAbs().maxCoeff());
      }
      ctx.at_most("factor_order", diff, 1e-10);
    }
    ctx.stage("mesh");
    export_mesh(dev.chart, uniform_grid(dev.chart.dim_domain(), mesh_per_axis), ctx.artifact("mesh.csv"));
    ctx.report["dimension"] = dev.chart.dim_domain();
    ctx.report["ambient"] = dev.chart.dim_ambient();
    ctx.report["commutator"] = dev.commutator;
  };
}

// ---------------------------------------------------------------- fit

Runner prepare_fit(const Params& p, const Scenario&) {
  Chart chart = builtin_chart(p.text("chart"));
  const double scale = p.number("scale", 1.0);
  if (!(scale > 0.0)) throw InputError(p.where("scale") + ": must be positive");
  if (scale != 1.0) chart = chart.scaled(scale);
  const std::optional<double> expect_a = p.has("expect_a") ? std::optional(p.number("expect_a")) : std::nullopt;
  std::optional<std::vector<double>> expect_b;
  if (p.has("expect_b")) {
    expect_b = p.numbers("expect_b");
    if (expect_b->size() == 1 && expect_b->front() == 0.0) expect_b->assign(2 * chart.dim_ambient(), 0.0);
    if (expect_b->size() != 2 * chart.dim_ambient()) {
      throw InputError(p.where("expect_b") + ": need 2n interleaved components (or 0)");
    }
  }
  const auto grid = mesh_grid(p, chart.dim_domain(), chart.dim_domain() == 1 ? 64 : 16);
  p.finish();

  return [=](Context& ctx) {
    ctx.stage("mesh");
    export_mesh(chart, grid, ctx.artifact("mesh.csv"));
    ctx.stage("fit");
    const SolitonFit fit = fit_soliton(chart, ctx.sampling());
    ctx.at_most("fit_residual", fit.residual, 1e-5);
    if (expect_a) ctx.at_most("fit_a", std::abs(fit.a - *expect_a), 1e-4);
    if (expect_b) {
      const Eigen::Map<const Eigen::VectorXd> eb(expect_b->data(), static_cast<Eigen::Index>(expect_b->size()));
      ctx.at_most("fit_b", (fit.b - eb).norm(), 1e-6);
    }
    ctx.report["a"] = fit.a;
    ctx.report["b"] = std::vector<double>(fit.b.data(), fit.b.data() + fit.b.size());
    ctx.report["residual"] = fit.residual;
    ctx.report["kernel_dim"] = fit.kernel_dim;
    ctx.report["samples"] = fit.samples;
  };
}

// ---------------------------------------------------------------- dispatch

Runner prepare(const Scenario& sc) {
  const Params p(sc.params, "params");
  if (sc.kind == "kr_profile") return prepare_kr_profile(p, sc);
  if (sc.kind == "kr_verify") return prepare_kr_verify(p, sc);
  if (sc.kind == "quadric") return prepare_quadric(p, sc);
  if (sc.kind == "flow_trace") return prepare_flow_trace(p, sc);
  if (sc.kind == "initial_data_check") return prepare_initial_data_check(p, sc);
  if (sc.kind == "develop") return prepare_develop(p, sc);
  if (sc.kind == "special_lagrangian") return prepare_special_lagrangian(p, sc);
  if (sc.kind == "twisted_product") return prepare_twisted_product(p, sc);
  if (sc.kind == "fit") return prepare_fit(p, sc);
  throw InputError("kind: unknown scenario kind '" + sc.kind + "'");
}

std::vector<double> parse_list(std::string_view text, const std::string& what) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss{std::string(text)};
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw InputError(what + ": cannot parse '" + item + "' as a number");
    }
  }
  if (out.empty()) throw InputError(what + ": empty list");
  return out;
}

std::size_t parse_dim(std::string_view arg, std::size_t fallback, const std::string& what) {
  if (arg.empty()) return fallback;
  const auto v = parse_list(arg, what);
  if (v.size() != 1 || v[0] < 2 || v[0] != std::floor(v[0])) throw InputError(what + ": expected an integer >= 2");
  return static_cast<std::size_t>(v[0]);
}

}  // namespace

std::string scenario_digest(const json& doc) {
  const std::string canonical = doc.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Scenario parse_scenario(std::string_view text, const Overrides& overrides) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw InputError("syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  const Params top(doc, "");
  Scenario sc;
  sc.digest = scenario_digest(doc);
  sc.overrides = overrides;
  sc.kind = top.text("kind");
  sc.params = top.has("params") ? top.raw("params") : json::object();
  if (!sc.params.is_object()) throw InputError("params: expected an object");
  sc.output = top.has("output") ? fs::path(top.text("output")) : fs::path("forge-out");
  if (top.has("sampling")) {
    const Params s = top.object("sampling");
    sc.sampling.n_samples = s.count("n_samples", 200, 4);
    sc.sampling.seed = static_cast<std::uint64_t>(s.count("seed", 0, 0));
    sc.fd_step = s.number("fd_step", 1e-4);
    s.finish();
  }
  top.finish();
  if (!(sc.fd_step > 0.0 && sc.fd_step <= 1e-2)) throw InputError("sampling.fd_step: must be in (0, 0.01]");
  sc.sampling.jet = JetOptions{sc.fd_step, 10.0 * sc.fd_step};
  if (overrides.seed) sc.sampling.seed = *overrides.seed;
  if (overrides.output) sc.output = *overrides.output;
  if (overrides.tol && !(*overrides.tol > 0.0)) throw InputError("--tol: must be positive");
  if (overrides.steps && *overrides.steps < 16) throw InputError("--steps: must be >= 16");
  prepare(sc);  // validates kind-specific params
  return sc;
}

Scenario load_scenario(const fs::path& file, const Overrides& overrides) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InputError("cannot read scenario file " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), overrides);
}

RunOutcome run_scenario(const Scenario& sc) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome out;
  std::error_code ec;
  fs::create_directories(sc.output, ec);
  if (ec) throw InputError("cannot create output directory " + sc.output.string() + ": " + ec.message());

  Context ctx(sc, sc.output);
  json error = nullptr;
  try {
    const Runner runner = prepare(sc);
    runner(ctx);
  } catch (const InputError& e) {
    out.exit_code = kExitInputError;
    error = {{"type", "input_error"}, {"message", e.what()}, {"stage", ctx.current_stage()}};
  } catch (const NumericalError& e) {
    out.exit_code = kExitNumericalFailure;
    error = {{"type", "numerical_failure"}, {"message", e.what()}, {"stage", ctx.current_stage()}};
  } catch (const std::exception& e) {
    out.exit_code = kExitNumericalFailure;
    error = {{"type", "numerical_failure"}, {"message", e.what()}, {"stage", ctx.current_stage()}};
  }

  json checks = json::array();
  json tolerances = json::object();
  json failed = json::array();
  for (const auto& c : ctx.checks()) {
    checks.push_back({{"name", c.name},
                      {"value", std::isfinite(c.value) ? json(c.value) : json(nullptr)},
                      {"comparison", c.at_least ? ">=" : "<="},
                      {"threshold", c.threshold},
                      {"pass", c.pass}});
    tolerances[c.name] = c.threshold;
    if (!c.pass) failed.push_back(c.name);
  }
  if (!error.is_null()) failed.push_back(error["stage"]);
  if (out.exit_code == kExitPass && !failed.empty()) out.exit_code = kExitCheckFailure;

  static const char* const kStatus[] = {"pass", "check_failure", "input_error", "numerical_failure"};
  json overrides = json::object();
  if (sc.overrides.tol) overrides["tol"] = *sc.overrides.tol;
  if (sc.overrides.steps) overrides["steps"] = *sc.overrides.steps;
  if (sc.overrides.seed) overrides["seed"] = *sc.overrides.seed;

  json m;
  m["tool"] = "forge";
  m["version"] = FORGE_VERSION;
  m["kind"] = sc.kind;
  m["scenario_digest"] = sc.digest;
  m["overrides"] = overrides;
  m["sampling"] = {{"n_samples", sc.sampling.n_samples}, {"seed", sc.sampling.seed}, {"fd_step", sc.fd_step}};
  m["threads"] = thread_cap();
  m["status"] = kStatus[out.exit_code];
  m["exit_code"] = out.exit_code;
  m["checks"] = checks;
  m["tolerances"] = tolerances;
  m["failed_checks"] = failed;
  if (!error.is_null()) m["error"] = error;
  m["report"] = ctx.report;
  m["artifacts"] = ctx.artifacts();
  m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  out.manifest_path = sc.output / "manifest.json";
  std::ofstream f(out.manifest_path, std::ios::binary | std::ios::trunc);
  f << m.dump(2) << '\n';
  if (!f) throw InputError("I/O failure writing " + out.manifest_path.string());
  out.manifest = std::move(m);
  return out;
}

RunOutcome run_scenario_file(const fs::path& file, const Overrides& overrides) {
  std::string text;
  try {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw InputError("cannot read scenario file " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    text = buf.str();
    return run_scenario(parse_scenario(text, overrides));
  } catch (const InputError& e) {
    // best effort: locate the output directory and record the rejection
    std::optional<fs::path> dir = overrides.output;
    json doc = json::parse(text, nullptr, false);
    if (!dir && doc.is_object() && doc.contains("output") && doc["output"].is_string()) {
      dir = fs::path(doc["output"].get<std::string>());
    }
    if (!dir) throw;
    std::error_code ec;
    fs::create_directories(*dir, ec);
    if (ec) throw;
    json m;
    m["tool"] = "forge";
    m["version"] = FORGE_VERSION;
    m["kind"] = doc.is_object() && doc.contains("kind") ? doc["kind"] : json(nullptr);
    m["scenario_digest"] = doc.is_discarded() ? json(nullptr) : json(scenario_digest(doc));
    m["status"] = "input_error";
    m["exit_code"] = static_cast<int>(kExitInputError);
    m["checks"] = json::array();
    const std::string msg = e.what();
    m["failed_checks"] = json::array({msg.substr(0, msg.find(':'))});
    m["error"] = {{"type", "input_error"}, {"message", msg}, {"stage", "validate"}};
    m["wall_time_s"] = 0.0;
    RunOutcome out;
    out.exit_code = kExitInputError;
    out.manifest_path = *dir / "manifest.json";
    std::ofstream f(out.manifest_path, std::ios::binary | std::ios::trunc);
    f << m.dump(2) << '\n';
    out.manifest = std::move(m);
    return out;
  }
}

Chart builtin_chart(std::string_view name) {
  const auto colon = name.find(':');
  const std::string base(name.substr(0, colon));
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : name.substr(colon + 1);
  const std::string what = "chart '" + std::string(name) + "'";

  if (base == "circle") {
    const double r = arg.empty() ? 1.0 : parse_list(arg, what).at(0);
    if (!(r > 0.0)) throw InputError(what + ": radius must be positive");
    return Chart(1, 1, Box{{0.0}, {2 * kPi}}, [r](std::span<const double> u) -> ComplexVector {
      return ComplexVector::Constant(1, std::polar(r, u[0]));
    });
  }
  if (base == "plane") {
    if (!arg.empty()) throw InputError(what + ": takes no arguments");
    return Chart(2, 2, Box{{-1.0, -1.0}, {1.0, 1.0}}, [](std::span<const double> u) -> ComplexVector {
      ComplexVector z(2);
      z << cplx{u[0], 0.0}, cplx{u[1], 0.0};
      return z;
    });
  }
  if (base == "clifford_torus") {
    if (!arg.empty()) throw InputError(what + ": takes no arguments");
    return build_quadric_lagrangian({{1.0, 1.0}}, 0.0, 2 * kPi);
  }
  if (base == "great_sphere") return legendrian_catalog("great_sphere", parse_dim(arg, 3, what));
  if (base == "torus_legendrian") return legendrian_catalog("torus", parse_dim(arg, 3, what));
  if (base == "torus_cone") return cone_over(legendrian_catalog("torus", parse_dim(arg, 3, what)), 0.5, 1.5);
  if (base == "quadric" || base == "quadric_lagrangian") {
    QuadricSpec spec{parse_list(arg, what)};
    spec.validate();
    return base == "quadric" ? real_quadric_chart(spec) : build_quadric_lagrangian(spec, 0.0, 2 * kPi);
  }
  throw InputError("unknown chart '" + std::string(name) +
                   "' (circle, plane, clifford_torus, great_sphere, torus_legendrian, torus_cone, quadric, "
                   "quadric_lagrangian)");
}

std::vector<std::size_t> parse_grid(std::string_view text) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = std::min(text.find('x', pos), text.size());
    const std::string item(text.substr(pos, next - pos));
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos || item.size() > 9) {
      throw InputError("--grid: expected counts like 32x32, got '" + std::string(text) + "'");
    }
    const auto v = static_cast<std::size_t>(std::stoul(item));
    if (v == 0) throw InputError("--grid: counts must be positive");
    out.push_back(v);
    pos = next + 1;
  }
  return out;
}

fs::path export_builtin(std::string_view chart_name, std::string_view grid_text, const fs::path& out,
                        bool with_mean_curvature) {
  const Chart chart = builtin_chart(chart_name);
  const auto grid = parse_grid(grid_text);
  if (grid.size() != chart.dim_domain()) {
    throw InputError("--grid: chart '" + std::string(chart_name) + "' has " + std::to_string(chart.dim_domain()) +
                     " parameters, got " + std::to_string(grid.size()) + " counts");
  }
  std::string stem(chart_name);
  std::replace(stem.begin(), stem.end(), ':', '_');
  std::replace(stem.begin(), stem.end(), ',', '_');
  const fs::path file = out / (stem + ".csv");
  export_mesh(chart, grid, file, with_mean_curvature);
  return file;
}

}  // namespace forge
