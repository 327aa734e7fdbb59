#pragma once

// Developing isotropic data by curves in the complex affine group.
//
// An isotropic chart Sigma with (B, b) is initial data when
// <V, B X + b> = 0 for every tangent V. Solutions of
//   A^* A' = alpha B,  A^* a' = alpha b,  A(0) = I, a(0) = 0
// sweep Sigma to the isotropic family A(s) Sigma + a(s); the driver
// alpha = conj(det A) gives special Lagrangians when the angle of
// T_p Sigma + R(B X_p + b) does not depend on p.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "forge/immersion.hpp"
#include "forge/sampling.hpp"
#include "forge/soliton_zoo.hpp"

namespace forge {

struct Hyperquadric {
  ComplexMatrix Lambda;  // Hermitian
  double c = 1.0;        // level of Re <Lambda X, X>
};

struct InitialData {
  Chart sigma;
  ComplexMatrix B;
  ComplexVector b;
  std::optional<Hyperquadric> quadric;

  std::size_t n() const { return sigma.dim_ambient(); }
};

/// Unit S^{n-1} in R^n with B = iI, b = 0 (hyperquadric Lambda = I, c = 1).
InitialData sphere_initial_data(std::size_t n);

/// Sigma multiplied by e^{i eps f(p)}, f = sum_i sin(u_i + 0.3 i): a motion along
/// J X, so the datum keeps |X| but leaves the initial-data condition for eps != 0.
/// B and b are kept; the hyperquadric is dropped.
InitialData perturbed_initial_data(const InitialData& id, double eps);

/// {sum lambda_i x_i^2 = 1} in R^n with B = i Lambda, b = 0.
InitialData quadric_initial_data(const QuadricSpec& spec);

struct InitialDataReport {
  double max_residual = 0.0;
  std::size_t samples = 0;
  bool pass = false;
};

/// max |<V, B X + b>| over samples and an orthonormal tangent basis V.
InitialDataReport check_initial_data(const InitialData& id, const SamplingOptions& sampling, double tol);

struct AngleReport {
  double mean_angle = 0.0;
  double max_deviation = 0.0;         // mod 2 pi, coordinate-frame orientation
  double max_deviation_mod_pi = 0.0;  // orientation-free fallback
  std::size_t samples = 0;
};

/// Lagrangian angle of (tangent basis, B X + b); needs k = n - 1.
double initial_frame_angle(const InitialData& id, const JetSample& js);

/// Orientation of the tangent basis is the coordinate orientation of the
/// chart, which is continuous over its connected parameter box.
AngleReport check_constant_angle(const InitialData& id, const SamplingOptions& sampling);

struct QuadricLegendrianReport {
  double legendrian_residual = 0.0;       // max |omega(Lambda X, V)|
  double mean_curvature_residual = 0.0;   // max |omega(-H_h + Lambda^2 X / |Lambda X|^2, V)|
  double level_residual = 0.0;            // max |Re <Lambda X, X> - c|
  std::size_t samples = 0;
};

/// H_h is the mean curvature of Sigma inside the hyperquadric, obtained from
/// the ambient one by removing (tr_Sigma of the hypersurface second
/// fundamental form) along the unit normal Lambda X / |Lambda X|.
QuadricLegendrianReport check_quadric_legendrian(const Chart& sigma, const ComplexMatrix& Lambda, double c,
                                                 const SamplingOptions& sampling);

using Driver = std::function<cplx(double)>;

enum class DriverKind { prescribed, special_lagrangian };

/// Discrete solution of the developing ODE on s_0 = 0 < ... < s_N with cubic
/// Hermite dense output (node slopes from the ODE right-hand side).
class DevelopingPath {
 public:
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<ComplexMatrix>& A() const { return A_; }
  const std::vector<ComplexVector>& a() const { return a_; }
  const std::vector<ComplexMatrix>& dA() const { return dA_; }
  const std::vector<ComplexVector>& da() const { return da_; }
  const std::vector<cplx>& alpha() const { return alpha_; }
  /// Continuous branch of arg det A(s_i).
  const std::vector<double>& unwrapped_angle() const { return angle_; }
  DriverKind driver() const { return kind_; }
  double s_max() const { return grid_.back(); }

  ComplexMatrix A_at(double s) const;
  ComplexVector a_at(double s) const;

 private:
  friend DevelopingPath integrate_developing(const ComplexMatrix&, const ComplexVector&, DriverKind, const Driver&,
                                             double, std::size_t);
  std::vector<double> grid_;
  std::vector<ComplexMatrix> A_, dA_;
  std::vector<ComplexVector> a_, da_;
  std::vector<cplx> alpha_;
  std::vector<double> angle_;
  DriverKind kind_ = DriverKind::prescribed;
};

/// RK4 for A' = (A^*)^{-1} alpha B, a' = (A^*)^{-1} alpha b on [0, s_max]
/// (linear solve per stage). With DriverKind::special_lagrangian the driver
/// argument is ignored and alpha = conj(det A). Throws NumericalError when
/// |det A| < 1e-12 or consecutive arg det A values jump by pi/2 or more.
DevelopingPath integrate_developing(const ComplexMatrix& B, const ComplexVector& b, DriverKind kind,
                                   const Driver& alpha, double s_max, std::size_t steps);

DevelopingPath develop(const InitialData& id, const Driver& alpha, double s_max, std::size_t steps);
DevelopingPath develop_special_lagrangian(const InitialData& id, double s_max, std::size_t steps);

/// Default step count, 512 per unit of s (at least 16).
std::size_t default_developing_steps(double s_max);

/// (p, s) -> A(s) X(p) + a(s), s last, s in [0, s_max].
Chart developed_chart(const DevelopingPath& path, const InitialData& id);

struct AngleFormulaReport {
  double max_deviation = 0.0;
  std::size_t samples = 0;
};

/// Compares arg det of (A(s_i) V, A'(s_i) X + a'(s_i)) with
/// arg det A(s_i) + arg alpha(s_i) + theta(0, p) at grid nodes.
AngleFormulaReport angle_formula_check(const DevelopingPath& path, const InitialData& id,
                                       const SamplingOptions& sampling, std::size_t s_nodes = 16);

struct TwistedProduct {
  Chart sigma;
  ComplexMatrix B1, B2;  // c11 B~1 + c12 B~2 and c21 B~1 + c22 B~2
  ComplexVector b1, b2;

  InitialData first() const { return {sigma, B1, b1, std::nullopt}; }
  InitialData second() const { return {sigma, B2, b2, std::nullopt}; }
};

TwistedProduct twisted_product(const InitialData& id1, const InitialData& id2, const Eigen::Matrix2d& C);

struct TwoParameterDevelopment {
  DevelopingPath first, second;
  Chart chart;  // (p, s1, s2) -> A1(s1) (A2(s2) X(p) + a2(s2)) + a1(s1)
  double commutator = 0.0;  // max ||A1 A2 - A2 A1|| on sampled node pairs
};

/// Throws NumericalError when the factors fail to commute (> 1e-8).
TwoParameterDevelopment develop_two_param(const TwistedProduct& tp, const Driver& alpha1, const Driver& alpha2,
                                          double s1_max, double s2_max, std::size_t steps1, std::size_t steps2);

}  // namespace forge
