#include "forge/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include "forge/errors.hpp"
#include "forge/kernels.hpp"
#include "forge/ode.hpp"

namespace forge {

InitialData sphere_initial_data(std::size_t n) {
  const auto dim = static_cast<Eigen::Index>(n);
  const ComplexMatrix identity = ComplexMatrix::Identity(dim, dim);
  return InitialData{legendrian_catalog("great_sphere", n), cplx{0.0, 1.0} * identity, ComplexVector::Zero(dim),
                     Hyperquadric{identity, 1.0}};
}

InitialData perturbed_initial_data(const InitialData& source, double eps) {
  InitialData id = source;
  const Chart base = id.sigma;
  id.sigma = Chart(base.dim_domain(), base.dim_ambient(), base.domain(), [base, eps](std::span<const double> u) -> ComplexVector {
    double f = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) f += std::sin(u[i] + 0.3 * static_cast<double>(i));
    return std::polar(1.0, eps * f) * base(u);
  });
  id.quadric.reset();
  return id;
}

InitialData quadric_initial_data(const QuadricSpec& spec) {
  spec.validate();
  const auto dim = static_cast<Eigen::Index>(spec.n());
  ComplexMatrix lambda = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) lambda(j, j) = spec.lambdas[static_cast<std::size_t>(j)];
  return InitialData{real_quadric_chart(spec, 1.0), cplx{0.0, 1.0} * lambda, ComplexVector::Zero(dim),
                     Hyperquadric{lambda, 1.0}};
}

namespace {

void require_shapes(const InitialData& id) {
  const auto n = static_cast<Eigen::Index>(id.n());
  if (id.B.rows() != n || id.B.cols() != n || id.b.size() != n) {
    throw InputError("initial data: B and b must match the ambient dimension");
  }
  if (id.sigma.dim_domain() + 1 > id.n()) throw InputError("initial data: need k <= n - 1");
}

std::vector<DomainPoint> interior_samples(const Chart& chart, const SamplingOptions& sampling) {
  return sample_domain(chart.domain(), sampling.n_samples, sampling.seed, sampling.jet.clearance());
}

}  // namespace

InitialDataReport check_initial_data(const InitialData& id, const SamplingOptions& sampling, double tol) {
  require_shapes(id);
  const auto points = interior_samples(id.sigma, sampling);
  const auto residuals = map_indices<double>(points.size(), [&](std::size_t i) {
    const JetSample js = jet(id.sigma, points[i], sampling.jet);
    const ComplexVector target = id.B * js.point + id.b;
    double worst = 0.0;
    for (const auto& v : orthonormal_tangent(js)) worst = std::max(worst, std::abs(herm(v, target)));
    return worst;
  });
  InitialDataReport report;
  report.samples = points.size();
  for (double r : residuals) report.max_residual = std::max(report.max_residual, r);
  report.pass = report.max_residual < tol;
  return report;
}

double initial_frame_angle(const InitialData& id, const JetSample& js) {
  if (js.k() + 1 != id.n()) throw InputError("initial_frame_angle: need k = n - 1");
  RealFrame frame = js.first;
  frame.push_back(id.B * js.point + id.b);
  return lagrangian_angle(frame);
}

namespace {

AngleReport summarize_angles(const std::vector<double>& angles) {
  AngleReport report;
  report.samples = angles.size();
  if (angles.empty()) return report;
  cplx sum1{0.0, 0.0};
  cplx sum2{0.0, 0.0};
  for (double a : angles) {
    sum1 += std::polar(1.0, a);
    sum2 += std::polar(1.0, 2.0 * a);
  }
  report.mean_angle = wrap_angle(std::arg(sum1));
  const double mean_mod_pi = wrap_angle(std::arg(sum2)) / 2.0;
  for (double a : angles) {
    report.max_deviation = std::max(report.max_deviation, angle_distance(a, report.mean_angle));
    report.max_deviation_mod_pi =
        std::max(report.max_deviation_mod_pi, angle_distance(a, mean_mod_pi, std::numbers::pi));
  }
  return report;
}

}  // namespace

AngleReport check_constant_angle(const InitialData& id, const SamplingOptions& sampling) {
  require_shapes(id);
  if (id.sigma.dim_domain() + 1 != id.n()) throw InputError("check_constant_angle: need k = n - 1");
  const auto points = interior_samples(id.sigma, sampling);
  const auto angles = map_indices<double>(points.size(), [&](std::size_t i) {
    return initial_frame_angle(id, jet(id.sigma, points[i], sampling.jet));
  });
  return summarize_angles(angles);
}

QuadricLegendrianReport check_quadric_legendrian(const Chart& sigma, const ComplexMatrix& Lambda, double c,
                                                 const SamplingOptions& sampling) {
  const auto n = static_cast<Eigen::Index>(sigma.dim_ambient());
  if (Lambda.rows() != n || Lambda.cols() != n) throw InputError("check_quadric_legendrian: Lambda shape");
  if ((Lambda - Lambda.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, Lambda.cwiseAbs().maxCoeff())) {
    throw InputError("check_quadric_legendrian: Lambda must be Hermitian");
  }
  const auto points = interior_samples(sigma, sampling);
  struct Row {
    double legendrian, curvature, level;
  };
  const auto rows = map_indices<Row>(points.size(), [&](std::size_t i) {
    const JetSample js = jet(sigma, points[i], sampling.jet);
    const GeometrySample geo = geometry_at(js);
    const ComplexVector lx = Lambda * js.point;
    const double lx_norm = lx.norm();
    if (!(lx_norm > 0.0)) throw NumericalError("check_quadric_legendrian: Lambda X vanishes");
    const ComplexVector nu = lx / lx_norm;

    // <d_i d_j X, nu> = -Hess f(d_i X, d_j X) / |grad f| with f = <Lambda X, X>,
    // Hess f(v, w) = 2 Re <Lambda v, w>, |grad f| = 2 |Lambda X|.
    const std::size_t k = js.k();
    double normal_trace = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        normal_trace -= geo.metric_inverse(a, b) * real_dot(Lambda * js.first[a], js.first[b]) / lx_norm;
      }
    }
    const ComplexVector h_inside = geo.mean_curvature - normal_trace * nu;
    const ComplexVector field = -h_inside + (Lambda * lx) / (lx_norm * lx_norm);

    Row row{0.0, 0.0, std::abs(real_dot(lx, js.point) - c)};
    for (const auto& v : orthonormal_tangent(js)) {
      row.legendrian = std::max(row.legendrian, std::abs(symp(lx, v)));
      row.curvature = std::max(row.curvature, std::abs(symp(field, v)));
    }
    return row;
  });
  QuadricLegendrianReport report;
  report.samples = rows.size();
  for (const auto& r : rows) {
    report.legendrian_residual = std::max(report.legendrian_residual, r.legendrian);
    report.mean_curvature_residual = std::max(report.mean_curvature_residual, r.curvature);
    report.level_residual = std::max(report.level_residual, r.level);
  }
  return report;
}

namespace {

struct DevState {
  ComplexMatrix A;
  ComplexVector a;

  DevState operator+(const DevState& o) const { return {A + o.A, a + o.a}; }
  friend DevState operator*(double s, const DevState& x) { return {s * x.A, s * x.a}; }
};

double principal(double x) {
  // (-pi, pi]
  double r = std::remainder(x, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

}  // namespace

DevelopingPath integrate_developing(const ComplexMatrix& B, const ComplexVector& b, DriverKind kind,
                                   const Driver& alpha, double s_max, std::size_t steps) {
  const Eigen::Index n = B.rows();
  if (B.cols() != n || b.size() != n || n == 0) throw InputError("develop: B must be square and match b");
  if (!(s_max > 0.0) || !std::isfinite(s_max)) throw InputError("develop: s range must be (0, s_max]");
  if (steps < 16) throw InputError("develop: need at least 16 steps");
  if (kind == DriverKind::prescribed && !alpha) throw InputError("develop: missing driver");

  auto driver_at = [&](double s, const ComplexMatrix& A) -> cplx {
    return kind == DriverKind::special_lagrangian ? std::conj(cx_det(A)) : alpha(s);
  };
  auto rhs = [&](double s, const DevState& y) -> DevState {
    const cplx det = cx_det(y.A);
    if (!(std::abs(det) >= 1e-12)) {
      throw NumericalError("develop: A(s) numerically singular near s = " + std::to_string(s));
    }
    const cplx al = kind == DriverKind::special_lagrangian ? std::conj(det) : alpha(s);
    Eigen::PartialPivLU<ComplexMatrix> lu(y.A.adjoint());
    return {lu.solve(al * B), lu.solve(al * b)};
  };

  DevelopingPath path;
  path.kind_ = kind;
  const double h = s_max / static_cast<double>(steps);
  DevState y{ComplexMatrix::Identity(n, n), ComplexVector::Zero(n)};
  double prev_angle = 0.0;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double s = static_cast<double>(i) * h;
    const DevState d = rhs(s, y);
    const double raw = std::arg(cx_det(y.A));
    const double unwrapped = i == 0 ? raw : prev_angle + principal(raw - prev_angle);
    if (i > 0 && std::abs(unwrapped - prev_angle) >= std::numbers::pi / 2) {
      throw NumericalError("develop: arg det A jumps by >= pi/2 between nodes; refine the grid");
    }
    prev_angle = unwrapped;
    path.grid_.push_back(s);
    path.A_.push_back(y.A);
    path.a_.push_back(y.a);
    path.dA_.push_back(d.A);
    path.da_.push_back(d.a);
    path.alpha_.push_back(driver_at(s, y.A));
    path.angle_.push_back(unwrapped);
    if (i < steps) y = rk4_step(rhs, s, y, h);
  }
  return path;
}

namespace {

std::pair<std::size_t, double> locate_cell(const std::vector<double>& grid, double s) {
  const double h = grid[1] - grid[0];
  const double span = grid.back();
  if (!(s >= -1e-12 * span && s <= span * (1.0 + 1e-12))) {
    throw NumericalError("developing path evaluated outside [0, s_max] at s = " + std::to_string(s));
  }
  const double t = std::clamp(s / h, 0.0, static_cast<double>(grid.size() - 1));
  const auto i = static_cast<std::size_t>(std::min(std::floor(t), static_cast<double>(grid.size() - 2)));
  return {i, t - static_cast<double>(i)};
}

}  // namespace

ComplexMatrix DevelopingPath::A_at(double s) const {
  const auto [i, tau] = locate_cell(grid_, s);
  const double h = grid_[i + 1] - grid_[i];
  return cubic_hermite<ComplexMatrix>(A_[i], dA_[i], A_[i + 1], dA_[i + 1], h, tau);
}

ComplexVector DevelopingPath::a_at(double s) const {
  const auto [i, tau] = locate_cell(grid_, s);
  const double h = grid_[i + 1] - grid_[i];
  return cubic_hermite<ComplexVector>(a_[i], da_[i], a_[i + 1], da_[i + 1], h, tau);
}

std::size_t default_developing_steps(double s_max) {
  return std::max<std::size_t>(16, static_cast<std::size_t>(std::ceil(512.0 * s_max)));
}

DevelopingPath develop(const InitialData& id, const Driver& alpha, double s_max, std::size_t steps) {
  require_shapes(id);
  return integrate_developing(id.B, id.b, DriverKind::prescribed, alpha, s_max, steps);
}

DevelopingPath develop_special_lagrangian(const InitialData& id, double s_max, std::size_t steps) {
  require_shapes(id);
  SamplingOptions probe;
  probe.n_samples = 64;
  const AngleReport angle = check_constant_angle(id, probe);
  if (angle.max_deviation > 1e-6) {
    throw InputError("develop_special_lagrangian: initial data does not have constant Lagrangian angle (deviation " +
                     std::to_string(angle.max_deviation) + ")");
  }
  return integrate_developing(id.B, id.b, DriverKind::special_lagrangian, {}, s_max, steps);
}

Chart developed_chart(const DevelopingPath& path, const InitialData& id) {
  const std::size_t k = id.sigma.dim_domain();
  Box box = id.sigma.domain().times(Box{{0.0}, {path.s_max()}});
  auto shared = std::make_shared<const DevelopingPath>(path);
  return Chart(k + 1, id.n(), box, [shared, sigma = id.sigma, k](std::span<const double> u) -> ComplexVector {
    const double s = u[k];
    return shared->A_at(s) * sigma(u.subspan(0, k)) + shared->a_at(s);
  });
}

AngleFormulaReport angle_formula_check(const DevelopingPath& path, const InitialData& id,
                                       const SamplingOptions& sampling, std::size_t s_nodes) {
  require_shapes(id);
  if (id.sigma.dim_domain() + 1 != id.n()) throw InputError("angle_formula_check: need k = n - 1");
  const std::size_t last = path.grid().size() - 1;
  s_nodes = std::clamp<std::size_t>(s_nodes, 2, last + 1);
  std::vector<std::size_t> nodes;
  for (std::size_t j = 0; j < s_nodes; ++j) nodes.push_back(j * last / (s_nodes - 1));

  const auto points = interior_samples(id.sigma, sampling);
  const auto worst = map_indices<double>(points.size(), [&](std::size_t pi) {
    const JetSample js = jet(id.sigma, points[pi], sampling.jet);
    const double theta0 = initial_frame_angle(id, js);
    double dev = 0.0;
    for (std::size_t node : nodes) {
      RealFrame frame;
      for (const auto& v : js.first) frame.push_back(path.A()[node] * v);
      frame.push_back(path.dA()[node] * js.point + path.da()[node]);
      const double measured = lagrangian_angle(frame);
      const double predicted = path.unwrapped_angle()[node] + std::arg(path.alpha()[node]) + theta0;
      dev = std::max(dev, angle_distance(measured, predicted));
    }
    return dev;
  });
  AngleFormulaReport report;
  report.samples = points.size() * nodes.size();
  for (double w : worst) report.max_deviation = std::max(report.max_deviation, w);
  return report;
}

TwistedProduct twisted_product(const InitialData& id1, const InitialData& id2, const Eigen::Matrix2d& C) {
  require_shapes(id1);
  require_shapes(id2);
  const std::size_t p = id1.n();
  const std::size_t q = id2.n();
  if (p < 2 || q < 2) throw InputError("twisted_product: need p > 1 and q > 1");
  if (!(std::abs(C.determinant()) > 1e-12)) throw InputError("twisted_product: C must be invertible");
  SamplingOptions probe;
  probe.n_samples = 32;
  for (const InitialData* id : {&id1, &id2}) {
    if (check_constant_angle(*id, probe).max_deviation > 1e-6) {
      throw InputError("twisted_product: factor is not initial data of constant Lagrangian angle");
    }
  }

  const auto P = static_cast<Eigen::Index>(p);
  const auto Q = static_cast<Eigen::Index>(q);
  ComplexMatrix t1 = ComplexMatrix::Zero(P + Q, P + Q);
  ComplexMatrix t2 = ComplexMatrix::Zero(P + Q, P + Q);
  t1.topLeftCorner(P, P) = id1.B;
  t2.bottomRightCorner(Q, Q) = id2.B;
  ComplexVector v1 = ComplexVector::Zero(P + Q);
  ComplexVector v2 = ComplexVector::Zero(P + Q);
  v1.head(P) = id1.b;
  v2.tail(Q) = id2.b;

  const std::size_t k1 = id1.sigma.dim_domain();
  const Chart s1 = id1.sigma;
  const Chart s2 = id2.sigma;
  Chart product(k1 + s2.dim_domain(), p + q, s1.domain().times(s2.domain()),
                [s1, s2, k1, P, Q](std::span<const double> u) -> ComplexVector {
                  ComplexVector z(P + Q);
                  z.head(P) = s1(u.subspan(0, k1));
                  z.tail(Q) = s2(u.subspan(k1));
                  return z;
                });
  return TwistedProduct{product,
                        C(0, 0) * t1 + C(0, 1) * t2,
                        C(1, 0) * t1 + C(1, 1) * t2,
                        C(0, 0) * v1 + C(0, 1) * v2,
                        C(1, 0) * v1 + C(1, 1) * v2};
}

TwoParameterDevelopment develop_two_param(const TwistedProduct& tp, const Driver& alpha1, const Driver& alpha2,
                                          double s1_max, double s2_max, std::size_t steps1, std::size_t steps2) {
  DevelopingPath first = integrate_developing(tp.B1, tp.b1, DriverKind::prescribed, alpha1, s1_max, steps1);
  DevelopingPath second = integrate_developing(tp.B2, tp.b2, DriverKind::prescribed, alpha2, s2_max, steps2);

  double commutator = 0.0;
  const std::size_t probes = 9;
  for (std::size_t i = 0; i < probes; ++i) {
    const ComplexMatrix& a1 = first.A()[i * (first.A().size() - 1) / (probes - 1)];
    for (std::size_t j = 0; j < probes; ++j) {
      const ComplexMatrix& a2 = second.A()[j * (second.A().size() - 1) / (probes - 1)];
      commutator = std::max(commutator, (a1 * a2 - a2 * a1).cwiseAbs().maxCoeff());
    }
  }
  if (commutator > 1e-8) {
    throw NumericalError("develop_two_param: developing factors do not commute (" + std::to_string(commutator) + ")");
  }

  const std::size_t k = tp.sigma.dim_domain();
  Box box = tp.sigma.domain().times(Box{{0.0, 0.0}, {s1_max, s2_max}});
  auto f1 = std::make_shared<const DevelopingPath>(first);
  auto f2 = std::make_shared<const DevelopingPath>(second);
  Chart chart(k + 2, tp.sigma.dim_ambient(), box,
              [f1, f2, sigma = tp.sigma, k](std::span<const double> u) -> ComplexVector {
                const ComplexVector inner = f2->A_at(u[k + 1]) * sigma(u.subspan(0, k)) + f2->a_at(u[k + 1]);
                return f1->A_at(u[k]) * inner + f1->a_at(u[k]);
              });
  return TwoParameterDevelopment{std::move(first), std::move(second), std::move(chart), commutator};
}

}  // namespace forge
