#pragma once

// Kaehler-Ricci gradient solitons of Calabi type on a Kaehler cone.
//
// On a cone with transverse Kaehler-Einstein form omega^T (Ric^T = kappa omega^T)
// and radial variable s = log r, the ansatz omega^T + i ddbar F(s) with
// sigma = 1 + F'(s), phi(sigma) = F''(s) turns the gradient soliton equation
// with potential Q = mu sigma + c into the linear profile ODE
//
//   phi'(sigma) + (m / sigma - mu) phi(sigma) - (kappa + 2 lambda sigma) = 0.
//
// The model cone used for pointwise verification is C^{m+1} \ {0} with radius
// function r = |z|^e, e = (2m + 2) / kappa, i.e. the cone over a round sphere
// whose transverse Fubini-Study form is rescaled to Einstein constant kappa.

#include <cstddef>
#include <functional>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "forge/cx_geometry.hpp"
#include "forge/errors.hpp"
#include "forge/kernels.hpp"

namespace forge {

struct SasakiModel {
  int m = 1;           // transverse complex dimension
  double kappa = 4.0;  // transverse Einstein constant

  static SasakiModel from_alpha(int m, double alpha) { return {m, alpha + 2.0}; }
  /// eta-Einstein constants: Ric_g = alpha g + beta eta (x) eta.
  double alpha() const { return kappa - 2.0; }
  double beta() const { return 2.0 * m - alpha(); }
  /// Exponent e in r = |z|^e for the model cone; requires kappa > 0.
  double cone_exponent() const;
};

struct ProfileParams {
  SasakiModel model{};
  double lambda = 0.0;  // +1 expanding, 0 steady, -1 shrinking
  double mu = 0.0;      // slope of Q = mu sigma + c
  double sigma0 = 1.0;
  double phi0 = 2.0;  // phi(sigma0)
  double c = 0.0;
  double sigma_max = 10.0;

  void validate() const;
};

/// phi'(sigma) as dictated by the profile ODE.
double profile_slope(const ProfileParams& p, double sigma, double phi);

/// sigma -> phi(sigma) together with phi'(sigma), valid on [sigma_lo, sigma_hi].
class Profile {
 public:
  using Fn = std::function<double(double)>;

  Profile(ProfileParams params, Fn phi, Fn dphi, double sigma_lo, double sigma_hi);

  const ProfileParams& params() const { return params_; }
  double sigma_lo() const { return lo_; }
  double sigma_hi() const { return hi_; }
  double phi(double sigma) const;
  double dphi(double sigma) const;
  double ode_residual(double sigma) const { return dphi(sigma) - profile_slope(params_, sigma, phi(sigma)); }

  /// Same parametrization with phi replaced by phi + delta (phi' unchanged).
  Profile shifted(double delta) const;

 private:
  ProfileParams params_;
  Fn phi_;
  Fn dphi_;
  double lo_;
  double hi_;
};

/// Integrating-factor solution
///   phi = sigma^-m e^{mu sigma} [C + int_{sigma0}^{sigma} t^m e^{-mu t}(kappa + 2 lambda t) dt],
/// integral by adaptive Gauss-Kronrod (abs 1e-12, rel 1e-10). Valid for all sigma > 0.
Profile solve_profile_closed(const ProfileParams& params);

/// Thrown when |phi| exceeds 1e12 during RK4 integration.
class BlowUpError : public NumericalError {
 public:
  BlowUpError(double last_sigma, const std::string& what) : NumericalError(what), last_sigma_(last_sigma) {}
  double last_valid_sigma() const { return last_sigma_; }

 private:
  double last_sigma_;
};

/// Fixed-step RK4 on [sigma0, sigma_max] with quintic Hermite dense output.
Profile solve_profile_numeric(const ProfileParams& params, std::size_t steps);

/// Radial Kaehler potential obtained from a profile by integrating
/// d sigma / ds = phi(sigma), F'(s) = sigma - 1 with sigma(0) = anchor, F(0) = 0.
class RadialPotential {
 public:
  double s_min() const { return s_.front(); }
  double s_max() const { return s_.back(); }
  double sigma(double s) const;
  double F(double s) const;
  const Profile& profile() const { return profile_; }
  /// Exponent e of the model cone, s = e log|z|.
  double exponent() const { return exponent_; }

 private:
  friend RadialPotential profile_to_potential(const Profile&, double, double, std::size_t, std::optional<double>);
  RadialPotential(Profile profile, double exponent) : profile_(std::move(profile)), exponent_(exponent) {}

  Profile profile_;
  double exponent_;
  std::vector<double> s_, sigma_, dsigma_, ddsigma_, f_;
};

/// Throws NumericalError if phi <= 0 is met (sigma(s) must be monotone).
/// steps_per_unit sets the s-grid density; anchor defaults to sigma0.
RadialPotential profile_to_potential(const Profile& profile, double s_min, double s_max,
                                     std::size_t steps_per_unit = 1024,
                                     std::optional<double> sigma_anchor = std::nullopt);

/// g_{i jbar} = P'(s) d_i dbar_j s + P''(s) d_i s dbar_j s with P = s + F(s),
/// on C^{m+1} \ {0}. Throws NumericalError if g is not positive definite.
ComplexMatrix cone_metric_at(const ComplexVector& z, const RadialPotential& pot);

/// Matrix of d_{z_i} d_{zbar_j} f by central differences in the 2n real
/// coordinates (step h), Hermitian-symmetrized.
ComplexMatrix complex_hessian(const std::function<double(const ComplexVector&)>& f, const ComplexVector& z,
                              double h);

/// R_{i jbar} = -d_i dbar_j log det g.
ComplexMatrix ricci_form_at(const ComplexVector& z, const RadialPotential& pot, double h = 1e-3);

/// Normalization linking the displayed profile ODE to the pointwise identity
///   -1/2 rho(omega) = lambda_scale * lambda * omega + i ddbar(potential_scale * mu * sigma).
/// Frozen once from the (m = 1, lambda = -1) calibration run; see tests.
struct SolitonCalibration {
  double lambda_scale = 1.0;
  double potential_scale = 0.5;
};
inline constexpr SolitonCalibration kFrozenCalibration{};

/// max-entry norm of -1/2 R - lambda' g - i ddbar Q' divided by max-entry norm of g.
double soliton_residual(const ComplexVector& z, const RadialPotential& pot, double h = 1e-3,
                        const SolitonCalibration& cal = kFrozenCalibration);

/// Sample points of the annulus r_min <= |z| <= r_max in C^{m+1}:
/// Gaussian directions and uniform radii from a seeded generator.
struct Annulus {
  double r_min = 0.8;
  double r_max = 1.2;
};
std::vector<ComplexVector> annulus_points(int m, const Annulus& annulus, std::size_t count, std::uint64_t seed);

/// Potential covering the annulus with room for FD stencils of step h.
RadialPotential potential_for_annulus(const Profile& profile, const Annulus& annulus, double h = 1e-3);

/// soliton_residual at every point; serial reference or OpenMP path.
std::vector<double> soliton_residuals(const RadialPotential& pot, std::span<const ComplexVector> points,
                                      double h = 1e-3, Exec exec = Exec::parallel);

struct ProfileDiagnostics {
  std::size_t sign_changes = 0;
  std::optional<std::pair<double, double>> positivity;  // longest run with phi > 0
  double growth_ratio = 0.0;                            // phi(sigma_end) / sigma_end
  double sigma_end = 0.0;
};

ProfileDiagnostics profile_diagnostics(const Profile& profile, std::size_t grid_points = 1024);

}  // namespace forge
