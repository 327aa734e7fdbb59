#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "forge/immersion.hpp"
#include "forge/sampling.hpp"

namespace forge {

struct QuadricSpec {
  std::vector<double> lambdas;

  /// Throws InputError unless every lambda is nonzero and the sum is positive.
  void validate() const;
  double trace() const;
  std::size_t n() const { return lambdas.size(); }
};

/// One connected sheet of {sum lambda_i x_i^2 = level} in R^n subset C^n.
/// level > 0 uses the sheet where the positive group carries cosh / the
/// sphere; level < 0 swaps the roles of the two groups. The chart is real
/// (imaginary parts zero) and has dimension n - 1.
Chart real_quadric_chart(const QuadricSpec& spec, double level = 1.0);

/// (p, s) -> (x_1(p) e^{i lambda_1 s}, ..., x_n(p) e^{i lambda_n s}), s last.
Chart build_quadric_lagrangian(const QuadricSpec& spec, double s_min, double s_max);

struct TraceSlice {
  enum class Kind { regular, degenerate_cone, degenerate_point, empty };

  double t = 0.0;
  double level = 0.0;  // right-hand side (-2t) sum lambda_i
  Kind kind = Kind::regular;
  std::vector<Eigen::VectorXd> points;  // points of R^n on the slice
};

/// Slices of the flow trace sum lambda_i x_i^2 = (-2t) sum lambda_i. Points are
/// sampled at the same chart parameters for every t, so slices of equal sign
/// are homothetic point by point.
std::vector<TraceSlice> flow_trace(const QuadricSpec& spec, std::span<const double> t_values,
                                   std::size_t points_per_slice = 64, std::uint64_t seed = 0);

/// (p, s) -> gamma(s) X(p), s last. Checks |X| = 1 and omega(X, V) = 0 on
/// samples of the Legendrian (tolerance 1e-8) and throws InputError otherwise.
Chart build_curve_times_legendrian(std::function<cplx(double)> gamma, double s_min, double s_max,
                                   const Chart& legendrian);

/// "great_sphere": unit S^{n-1} in R^n; "torus": (e^{i theta_1}, ..., e^{i theta_n}) / sqrt(n)
/// with sum theta_j = 0. n >= 2.
Chart legendrian_catalog(std::string_view name, std::size_t n);

/// (p, r) -> r X(p) for r in [r_min, r_max], r last.
Chart cone_over(const Chart& link, double r_min, double r_max);

struct SolitonFit {
  double a = 0.0;
  Eigen::VectorXd b;  // R^{2n}, interleaved
  double residual = 0.0;
  std::size_t kernel_dim = 0;  // rank deficiency of the normal equations
  std::size_t samples = 0;
};

/// Least squares for H = (aX + b)^perp over sampled points. Rank-deficient
/// normal equations are solved by the minimum-norm (pseudo-inverse) rule.
SolitonFit fit_soliton(const Chart& chart, const SamplingOptions& sampling);

}  // namespace forge
