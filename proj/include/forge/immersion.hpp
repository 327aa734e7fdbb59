#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "forge/cx_geometry.hpp"

namespace forge {

using DomainPoint = std::vector<double>;

/// Axis-aligned parameter box [lo_i, hi_i].
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dim() const { return lo.size(); }
  bool contains(std::span<const double> u, double margin = 0.0) const;
  /// Cartesian product: this box's axes followed by other's.
  Box times(const Box& other) const;
};

/// A parametrized patch u in Box subset R^k -> C^n. The map must be pure
/// (callable concurrently) and smooth on the open box.
class Chart {
 public:
  using Map = std::function<ComplexVector(std::span<const double>)>;

  Chart(std::size_t dim_domain, std::size_t dim_ambient, Box domain, Map map);

  std::size_t dim_domain() const { return dim_domain_; }
  std::size_t dim_ambient() const { return dim_ambient_; }
  const Box& domain() const { return domain_; }

  /// Evaluates the map; throws NumericalError on non-finite output.
  ComplexVector operator()(std::span<const double> u) const;

  /// Same map, post-composed with z -> scale * z.
  Chart scaled(double scale) const;

 private:
  std::size_t dim_domain_;
  std::size_t dim_ambient_;
  Box domain_;
  Map map_;
};

struct JetOptions {
  double h_first = 1e-4;
  double h_second = 1e-3;

  double clearance() const { return 2.0 * std::max(h_first, h_second); }
};

/// Central-difference 2-jet of a chart at one parameter point.
struct JetSample {
  ComplexVector point;
  std::vector<ComplexVector> first;   // k entries, dX/du_i
  std::vector<ComplexVector> second;  // k*k entries, row-major d2X/du_i du_j
  double h_first = 0.0;
  double h_second = 0.0;

  std::size_t k() const { return first.size(); }
  const ComplexVector& d2(std::size_t i, std::size_t j) const { return second[i * k() + j]; }
};

struct GeometrySample {
  Eigen::MatrixXd metric;
  Eigen::MatrixXd metric_inverse;
  ComplexVector mean_curvature;
  Eigen::MatrixXd omega_pullback;
  std::optional<double> angle;  // only for k = n with a totally real tangent frame
};

/// Throws InputError when u is closer than 2h to the boundary of the domain,
/// NumericalError on non-finite evaluations.
JetSample jet(const Chart& chart, std::span<const double> u, const JetOptions& opts = {});

/// Induced metric, mean curvature H = (g^{ij} d_i d_j X)^perp, pulled-back
/// Kaehler form and (for k = n) the Lagrangian angle of the coordinate frame.
/// Throws NumericalError when the metric is singular or has condition > 1e10.
GeometrySample geometry_at(const JetSample& jet);

/// v minus its tangential part, orthogonality taken in Re herm.
ComplexVector normal_project(const ComplexVector& v, const JetSample& jet);

/// Orthonormal (in Re herm) basis of the tangent space, ordered and oriented
/// as the coordinate frame (Gram-Schmidt).
std::vector<ComplexVector> orthonormal_tangent(const JetSample& jet);

/// Max |omega(d_i X, d_j X)| over i < j.
double max_omega(const GeometrySample& g);

}  // namespace forge
