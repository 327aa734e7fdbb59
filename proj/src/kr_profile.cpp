#include "forge/kr_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "forge/ode.hpp"

namespace forge {

double SasakiModel::cone_exponent() const {
  if (!(kappa > 0.0)) {
    throw InputError("model cone needs a positive transverse Einstein constant (kappa = " + std::to_string(kappa) +
                     ")");
  }
  return (2.0 * m + 2.0) / kappa;
}

void ProfileParams::validate() const {
  if (model.m < 1) throw InputError("profile: m must be a positive integer");
  if (!(sigma0 > 0.0)) throw InputError("profile: sigma0 must be positive");
  if (!(sigma_max > sigma0)) throw InputError("profile: sigma_max must exceed sigma0");
  for (double v : {model.kappa, lambda, mu, phi0, c}) {
    if (!std::isfinite(v)) throw InputError("profile: non-finite parameter");
  }
}

double profile_slope(const ProfileParams& p, double sigma, double phi) {
  return p.model.kappa + 2.0 * p.lambda * sigma - (p.model.m / sigma - p.mu) * phi;
}

Profile::Profile(ProfileParams params, Fn phi, Fn dphi, double sigma_lo, double sigma_hi)
    : params_(params), phi_(std::move(phi)), dphi_(std::move(dphi)), lo_(sigma_lo), hi_(sigma_hi) {}

double Profile::phi(double sigma) const {
  if (!(sigma >= lo_ && sigma <= hi_) || !(sigma > 0.0)) {
    throw NumericalError("profile evaluated outside its range at sigma = " + std::to_string(sigma));
  }
  return phi_(sigma);
}

double Profile::dphi(double sigma) const {
  if (!(sigma >= lo_ && sigma <= hi_) || !(sigma > 0.0)) {
    throw NumericalError("profile evaluated outside its range at sigma = " + std::to_string(sigma));
  }
  return dphi_(sigma);
}

Profile Profile::shifted(double delta) const {
  Fn inner = phi_;
  return Profile(params_, [inner, delta](double s) { return inner(s) + delta; }, dphi_, lo_, hi_);
}

Profile solve_profile_closed(const ProfileParams& params) {
  params.validate();
  const ProfileParams p = params;
  auto phi = [p](double sigma) {
    // sigma^-m e^{mu sigma} folded into the integrand for stability.
    const double m = p.model.m;
    auto integrand = [&](double t) {
      return std::pow(t / sigma, m) * std::exp(p.mu * (sigma - t)) * (p.model.kappa + 2.0 * p.lambda * t);
    };
    double integral = 0.0;
    if (sigma != p.sigma0) {
      const double a = std::min(p.sigma0, sigma);
      const double b = std::max(p.sigma0, sigma);
      double error = 0.0;
      double l1 = 0.0;
      double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, a, b, 15, 1e-10,
                                                                                    &error, &l1);
      const double bound = std::max(1e-12, 1e-10 * l1);
      if (std::isfinite(value) && error > bound) {
        // fall back to agreement with a 31-point rule
        const double check = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, a, b, 15, 1e-10);
        error = std::abs(check - value);
        value = check;
      }
      if (!std::isfinite(value) || error > bound) {
        throw NumericalError("profile quadrature did not converge at sigma = " + std::to_string(sigma));
      }
      integral = sigma > p.sigma0 ? value : -value;
    }
    const double homogeneous = std::pow(p.sigma0 / sigma, m) * std::exp(p.mu * (sigma - p.sigma0)) * p.phi0;
    return homogeneous + integral;
  };
  auto dphi = [p, phi](double sigma) { return profile_slope(p, sigma, phi(sigma)); };
  return Profile(p, phi, dphi, 0.0, std::numeric_limits<double>::infinity());
}

namespace {

double profile_curvature(const ProfileParams& p, double sigma, double phi, double dphi) {
  const double m = p.model.m;
  return 2.0 * p.lambda + (m / (sigma * sigma)) * phi - (m / sigma - p.mu) * dphi;
}

struct Table {
  double lo = 0.0;
  double h = 0.0;
  std::vector<double> y, d, c;

  double eval(double x) const {
    const double t = (x - lo) / h;
    auto i = static_cast<std::size_t>(std::clamp(std::floor(t), 0.0, static_cast<double>(y.size() - 2)));
    const double tau = t - static_cast<double>(i);
    return quintic_hermite(y[i], d[i], c[i], y[i + 1], d[i + 1], c[i + 1], h, tau);
  }
};

}  // namespace

Profile solve_profile_numeric(const ProfileParams& params, std::size_t steps) {
  params.validate();
  if (steps < 16) throw InputError("solve_profile_numeric: need at least 16 steps");
  const ProfileParams p = params;
  auto table = std::make_shared<Table>();
  table->lo = p.sigma0;
  table->h = (p.sigma_max - p.sigma0) / static_cast<double>(steps);
  table->y.reserve(steps + 1);

  auto rhs = [&p](double sigma, double phi) { return profile_slope(p, sigma, phi); };
  double phi = p.phi0;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double sigma = p.sigma0 + static_cast<double>(i) * table->h;
    const double d = rhs(sigma, phi);
    table->y.push_back(phi);
    table->d.push_back(d);
    table->c.push_back(profile_curvature(p, sigma, phi, d));
    if (i == steps) break;
    const double next = rk4_step(rhs, sigma, phi, table->h);
    if (!(std::abs(next) <= 1e12)) {
      throw BlowUpError(sigma, "profile blow-up past sigma = " + std::to_string(sigma));
    }
    phi = next;
  }
  auto phi_fn = [table](double sigma) { return table->eval(sigma); };
  auto dphi_fn = [p, table](double sigma) { return profile_slope(p, sigma, table->eval(sigma)); };
  return Profile(p, phi_fn, dphi_fn, p.sigma0, p.sigma_max);
}

RadialPotential profile_to_potential(const Profile& profile, double s_min, double s_max, std::size_t steps_per_unit,
                                     std::optional<double> sigma_anchor) {
  if (!(s_min <= 0.0 && 0.0 <= s_max && s_min < s_max)) {
    throw InputError("profile_to_potential: s range must contain the anchor s = 0");
  }
  if (steps_per_unit < 4) throw InputError("profile_to_potential: steps_per_unit too small");
  const double exponent = profile.params().model.cone_exponent();
  RadialPotential pot(profile, exponent);
  const double anchor = sigma_anchor.value_or(profile.params().sigma0);

  auto checked_phi = [&profile](double sigma) {
    const double v = profile.phi(sigma);
    if (!(v > 0.0)) {
      throw NumericalError("profile_to_potential: phi <= 0 at sigma = " + std::to_string(sigma));
    }
    return v;
  };
  auto rhs = [&](double, const Eigen::Vector2d& y) { return Eigen::Vector2d(checked_phi(y[0]), y[0] - 1.0); };

  struct Node {
    double s;
    Eigen::Vector2d y;
  };
  auto sweep = [&](double end) {
    std::vector<Node> nodes;
    const auto n = static_cast<std::size_t>(std::ceil(std::abs(end) * static_cast<double>(steps_per_unit)));
    nodes.push_back({0.0, Eigen::Vector2d(anchor, 0.0)});
    if (n == 0) return nodes;
    const double h = end / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Node& last = nodes.back();
      nodes.push_back({static_cast<double>(i + 1) * h, rk4_step(rhs, last.s, last.y, h)});
    }
    return nodes;
  };
  std::vector<Node> backward = sweep(s_min);
  std::vector<Node> forward = sweep(s_max);
  std::reverse(backward.begin(), backward.end());
  backward.pop_back();
  backward.insert(backward.end(), forward.begin(), forward.end());

  for (const Node& node : backward) {
    const double sigma = node.y[0];
    const double phi = checked_phi(sigma);
    pot.s_.push_back(node.s);
    pot.sigma_.push_back(sigma);
    pot.dsigma_.push_back(phi);
    pot.ddsigma_.push_back(profile.dphi(sigma) * phi);
    pot.f_.push_back(node.y[1]);
  }
  return pot;
}

namespace {

std::size_t locate(const std::vector<double>& grid, double s) {
  if (!(s >= grid.front() && s <= grid.back())) {
    throw NumericalError("radial potential evaluated outside its s range at s = " + std::to_string(s));
  }
  auto it = std::upper_bound(grid.begin(), grid.end(), s);
  auto i = static_cast<std::size_t>(std::distance(grid.begin(), it));
  return std::min(i == 0 ? 0 : i - 1, grid.size() - 2);
}

}  // namespace

double RadialPotential::sigma(double s) const {
  const std::size_t i = locate(s_, s);
  const double h = s_[i + 1] - s_[i];
  return quintic_hermite(sigma_[i], dsigma_[i], ddsigma_[i], sigma_[i + 1], dsigma_[i + 1], ddsigma_[i + 1], h,
                         (s - s_[i]) / h);
}

double RadialPotential::F(double s) const {
  const std::size_t i = locate(s_, s);
  const double h = s_[i + 1] - s_[i];
  return quintic_hermite(f_[i], sigma_[i] - 1.0, dsigma_[i], f_[i + 1], sigma_[i + 1] - 1.0, dsigma_[i + 1], h,
                         (s - s_[i]) / h);
}

namespace {

double radial_coordinate(const ComplexVector& z, const RadialPotential& pot) {
  const double r2 = z.squaredNorm();
  if (!(r2 > 0.0)) throw InputError("cone point must be nonzero");
  return 0.5 * pot.exponent() * std::log(r2);
}

void require_cone_dimension(const ComplexVector& z, const RadialPotential& pot) {
  if (z.size() != pot.profile().params().model.m + 1) {
    throw InputError("cone point must lie in C^{m+1}");
  }
}

double max_entry(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

ComplexMatrix cone_metric_at(const ComplexVector& z, const RadialPotential& pot) {
  require_cone_dimension(z, pot);
  const double s = radial_coordinate(z, pot);
  const double e = pot.exponent();
  const double r2 = z.squaredNorm();
  const double sigma = pot.sigma(s);
  const double phi = pot.profile().phi(sigma);

  const Eigen::Index n = z.size();
  ComplexVector ds = (e / (2.0 * r2)) * z.conjugate();
  ComplexMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g(i, i) = sigma * e * (1.0 / (2.0 * r2) - std::norm(z[i]) / (2.0 * r2 * r2)) + phi * std::norm(ds[i]);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const cplx dd = -e * std::conj(z[i]) * z[j] / (2.0 * r2 * r2);
      g(i, j) = sigma * dd + phi * ds[i] * std::conj(ds[j]);
      g(j, i) = std::conj(g(i, j));
    }
  }
  Eigen::LLT<ComplexMatrix> llt(g);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("cone metric not positive definite at |z| = " + std::to_string(std::sqrt(r2)));
  }
  return g;
}

ComplexMatrix complex_hessian(const std::function<double(const ComplexVector&)>& f, const ComplexVector& z,
                              double h) {
  const Eigen::Index n = z.size();
  const Eigen::Index dim = 2 * n;
  auto shifted = [&](Eigen::Index a, double da, Eigen::Index b, double db) {
    ComplexVector w = z;
    auto bump = [&w](Eigen::Index idx, double d) { w[idx / 2] += (idx % 2 == 0) ? cplx{d, 0.0} : cplx{0.0, d}; };
    bump(a, da);
    bump(b, db);
    const double v = f(w);
    if (!std::isfinite(v)) throw NumericalError("complex_hessian: non-finite evaluation");
    return v;
  };
  const double f0 = shifted(0, 0.0, 0, 0.0);
  Eigen::MatrixXd hr(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    hr(a, a) = (shifted(a, h, a, 0.0) - 2.0 * f0 + shifted(a, -h, a, 0.0)) / (h * h);
    for (Eigen::Index b = a + 1; b < dim; ++b) {
      hr(a, b) = (shifted(a, h, b, h) - shifted(a, h, b, -h) - shifted(a, -h, b, h) + shifted(a, -h, b, -h)) /
                 (4.0 * h * h);
      hr(b, a) = hr(a, b);
    }
  }
  ComplexMatrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double xx = hr(2 * i, 2 * j);
      const double yy = hr(2 * i + 1, 2 * j + 1);
      const double xy = hr(2 * i, 2 * j + 1);
      const double yx = hr(2 * i + 1, 2 * j);
      out(i, j) = 0.25 * cplx{xx + yy, xy - yx};
    }
  }
  return 0.5 * (out + out.adjoint());
}

namespace {

void require_clearance(const ComplexVector& z, const RadialPotential& pot, double h) {
  const double s = radial_coordinate(z, pot);
  const double ds = 2.0 * h * pot.exponent() * std::sqrt(2.0) / z.norm();
  if (!(s - ds >= pot.s_min() && s + ds <= pot.s_max())) {
    throw InputError("point lacks 2h clearance inside the potential's s range");
  }
}

}  // namespace

ComplexMatrix ricci_form_at(const ComplexVector& z, const RadialPotential& pot, double h) {
  require_cone_dimension(z, pot);
  require_clearance(z, pot, h);
  auto log_det = [&pot](const ComplexVector& w) {
    const double det = cone_metric_at(w, pot).determinant().real();
    if (!(det > 0.0)) throw NumericalError("ricci_form_at: non-positive metric determinant");
    return std::log(det);
  };
  return -complex_hessian(log_det, z, h);
}

double soliton_residual(const ComplexVector& z, const RadialPotential& pot, double h, const SolitonCalibration& cal) {
  const ProfileParams& p = pot.profile().params();
  const ComplexMatrix g = cone_metric_at(z, pot);
  const ComplexMatrix ricci = ricci_form_at(z, pot, h);
  auto sigma_of_z = [&pot](const ComplexVector& w) { return pot.sigma(radial_coordinate(w, pot)); };
  const ComplexMatrix hess_q = (cal.potential_scale * p.mu) * complex_hessian(sigma_of_z, z, h);
  const ComplexMatrix residual = -0.5 * ricci - (cal.lambda_scale * p.lambda) * g - hess_q;
  return max_entry(residual) / max_entry(g);
}

std::vector<ComplexVector> annulus_points(int m, const Annulus& annulus, std::size_t count, std::uint64_t seed) {
  if (!(0.0 < annulus.r_min && annulus.r_min <= annulus.r_max)) throw InputError("annulus: need 0 < r_min <= r_max");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ComplexVector> out;
  out.reserve(count);
  while (out.size() < count) {
    ComplexVector z(m + 1);
    for (Eigen::Index j = 0; j <= m; ++j) z[j] = cplx{gauss(rng), gauss(rng)};
    const double norm = z.norm();
    if (norm < 1e-8) continue;
    const double r = annulus.r_min + (annulus.r_max - annulus.r_min) * unit(rng);
    out.push_back((r / norm) * z);
  }
  return out;
}

RadialPotential potential_for_annulus(const Profile& profile, const Annulus& annulus, double h) {
  const double e = profile.params().model.cone_exponent();
  const double pad = 4.0 * h * e * std::sqrt(2.0) / annulus.r_min + 1e-3;
  const double s_lo = std::min(0.0, e * std::log(annulus.r_min) - pad);
  const double s_hi = std::max(0.0, e * std::log(annulus.r_max) + pad);
  return profile_to_potential(profile, s_lo, s_hi);
}

std::vector<double> soliton_residuals(const RadialPotential& pot, std::span<const ComplexVector> points, double h,
                                      Exec exec) {
  return map_indices<double>(points.size(), [&](std::size_t i) { return soliton_residual(points[i], pot, h); }, exec);
}

ProfileDiagnostics profile_diagnostics(const Profile& profile, std::size_t grid_points) {
  const ProfileParams& p = profile.params();
  const double lo = std::max(profile.sigma_lo(), p.sigma0);
  const double hi = std::min(profile.sigma_hi(), p.sigma_max);
  grid_points = std::max<std::size_t>(grid_points, 2);

  std::vector<double> sigmas(grid_points);
  std::vector<int> signs(grid_points);
  ProfileDiagnostics out;
  out.sigma_end = hi;
  for (std::size_t i = 0; i < grid_points; ++i) {
    sigmas[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    const double v = profile.phi(sigmas[i]);
    signs[i] = v > 1e-14 ? 1 : (v < -1e-14 ? -1 : 0);
    if (i + 1 == grid_points) out.growth_ratio = v / sigmas[i];
  }

  int last_sign = 0;
  for (int sign : signs) {
    if (sign != 0 && last_sign != 0 && sign != last_sign) ++out.sign_changes;
    if (sign != 0) last_sign = sign;
  }
  for (std::size_t i = 0; i < grid_points;) {
    if (signs[i] <= 0) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < grid_points && signs[j + 1] > 0) ++j;
    if (!out.positivity || sigmas[j] - sigmas[i] > out.positivity->second - out.positivity->first) {
      out.positivity = std::make_pair(sigmas[i], sigmas[j]);
    }
    i = j + 1;
  }
  return out;
}

}  // namespace forge
