#include "forge/immersion.hpp"

#include <cmath>
#include <string>

#include "forge/errors.hpp"

namespace forge {

bool Box::contains(std::span<const double> u, double margin) const {
  if (u.size() != dim()) return false;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] < lo[i] + margin || u[i] > hi[i] - margin) return false;
  }
  return true;
}

Box Box::times(const Box& other) const {
  Box out = *this;
  out.lo.insert(out.lo.end(), other.lo.begin(), other.lo.end());
  out.hi.insert(out.hi.end(), other.hi.begin(), other.hi.end());
  return out;
}

Chart::Chart(std::size_t dim_domain, std::size_t dim_ambient, Box domain, Map map)
    : dim_domain_(dim_domain), dim_ambient_(dim_ambient), domain_(std::move(domain)), map_(std::move(map)) {
  if (dim_ambient_ == 0) throw InputError("Chart: ambient dimension must be positive");
  if (dim_domain_ > dim_ambient_) throw InputError("Chart: need k <= n");
  if (domain_.lo.size() != dim_domain_ || domain_.hi.size() != dim_domain_) {
    throw InputError("Chart: domain box does not match dim_domain");
  }
  for (std::size_t i = 0; i < dim_domain_; ++i) {
    if (!(domain_.lo[i] < domain_.hi[i])) throw InputError("Chart: empty domain interval");
  }
  if (!map_) throw InputError("Chart: empty map");
}

ComplexVector Chart::operator()(std::span<const double> u) const {
  ComplexVector z = map_(u);
  if (static_cast<std::size_t>(z.size()) != dim_ambient_) {
    throw InputError("Chart: map returned a vector of dimension " + std::to_string(z.size()));
  }
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    if (!std::isfinite(z[j].real()) || !std::isfinite(z[j].imag())) {
      throw NumericalError("Chart: non-finite evaluation");
    }
  }
  return z;
}

Chart Chart::scaled(double scale) const {
  Map inner = map_;
  return Chart(dim_domain_, dim_ambient_, domain_,
               [inner, scale](std::span<const double> u) -> ComplexVector { return scale * inner(u); });
}

JetSample jet(const Chart& chart, std::span<const double> u, const JetOptions& opts) {
  const std::size_t k = chart.dim_domain();
  if (u.size() != k) throw InputError("jet: point has wrong dimension");
  if (!(opts.h_first > 0.0) || !(opts.h_second > 0.0)) throw InputError("jet: steps must be positive");
  if (!chart.domain().contains(u, opts.clearance())) {
    throw InputError("jet: point closer than 2h to the domain boundary");
  }

  JetSample out;
  out.h_first = opts.h_first;
  out.h_second = opts.h_second;
  std::vector<double> p(u.begin(), u.end());
  out.point = chart(p);

  auto eval_shifted = [&](std::size_t i, double di, std::size_t j, double dj) {
    std::vector<double> q = p;
    q[i] += di;
    q[j] += dj;
    return chart(q);
  };

  const double h1 = opts.h_first;
  out.first.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.first.push_back((eval_shifted(i, h1, i, 0.0) - eval_shifted(i, -h1, i, 0.0)) / (2.0 * h1));
  }

  const double h2 = opts.h_second;
  out.second.assign(k * k, ComplexVector::Zero(static_cast<Eigen::Index>(chart.dim_ambient())));
  for (std::size_t i = 0; i < k; ++i) {
    const ComplexVector plus = eval_shifted(i, h2, i, 0.0);
    const ComplexVector minus = eval_shifted(i, -h2, i, 0.0);
    out.second[i * k + i] = (plus - 2.0 * out.point + minus) / (h2 * h2);
    for (std::size_t j = i + 1; j < k; ++j) {
      const ComplexVector mixed = (eval_shifted(i, h2, j, h2) - eval_shifted(i, h2, j, -h2) -
                                   eval_shifted(i, -h2, j, h2) + eval_shifted(i, -h2, j, -h2)) /
                                  (4.0 * h2 * h2);
      out.second[i * k + j] = mixed;
      out.second[j * k + i] = mixed;
    }
  }
  return out;
}

namespace {

Eigen::MatrixXd induced_metric(const JetSample& jet) {
  const std::size_t k = jet.k();
  Eigen::MatrixXd g(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      g(i, j) = real_dot(jet.first[i], jet.first[j]);
      g(j, i) = g(i, j);
    }
  }
  return g;
}

Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& g) {
  if (g.rows() == 0) return g;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e10) {
    throw NumericalError("degenerate parametrization: induced metric singular (eigenvalues " +
                         std::to_string(lo) + ", " + std::to_string(hi) + ")");
  }
  return eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
}

ComplexVector project_with(const ComplexVector& v, const JetSample& jet, const Eigen::MatrixXd& ginv) {
  const std::size_t k = jet.k();
  Eigen::VectorXd dots(k);
  for (std::size_t j = 0; j < k; ++j) dots[j] = real_dot(v, jet.first[j]);
  const Eigen::VectorXd coeff = ginv * dots;
  ComplexVector out = v;
  for (std::size_t i = 0; i < k; ++i) out -= coeff[i] * jet.first[i];
  return out;
}

}  // namespace

GeometrySample geometry_at(const JetSample& jet) {
  const std::size_t k = jet.k();
  GeometrySample out;
  out.metric = induced_metric(jet);
  out.metric_inverse = checked_inverse(out.metric);

  ComplexVector laplace = ComplexVector::Zero(jet.point.size());
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) laplace += out.metric_inverse(i, j) * jet.d2(i, j);
  }
  out.mean_curvature = project_with(laplace, jet, out.metric_inverse);

  out.omega_pullback = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      out.omega_pullback(i, j) = symp(jet.first[i], jet.first[j]);
      out.omega_pullback(j, i) = -out.omega_pullback(i, j);
    }
  }

  if (k == static_cast<std::size_t>(jet.point.size())) {
    try {
      out.angle = lagrangian_angle(jet.first);
    } catch (const NumericalError&) {
      out.angle.reset();
    }
  }
  return out;
}

ComplexVector normal_project(const ComplexVector& v, const JetSample& jet) {
  if (v.size() != jet.point.size()) throw InputError("normal_project: dimension mismatch");
  return project_with(v, jet, checked_inverse(induced_metric(jet)));
}

std::vector<ComplexVector> orthonormal_tangent(const JetSample& jet) {
  std::vector<ComplexVector> basis;
  basis.reserve(jet.k());
  for (const auto& v : jet.first) {
    ComplexVector w = v;
    for (const auto& e : basis) w -= real_dot(w, e) * e;
    const double len = std::sqrt(real_dot(w, w));
    if (!(len > 1e-10 * std::max(1.0, v.norm()))) {
      throw NumericalError("orthonormal_tangent: degenerate tangent frame");
    }
    basis.push_back(w / len);
  }
  return basis;
}

double max_omega(const GeometrySample& g) {
  return g.omega_pullback.size() == 0 ? 0.0 : g.omega_pullback.cwiseAbs().maxCoeff();
}

}  // namespace forge
