#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "forge/errors.hpp"
#include "forge/initial_data.hpp"
#include "forge/kernels.hpp"

using namespace forge;

namespace {

constexpr double kPi = std::numbers::pi;
const Driver kOne = [](double) { return cplx{1.0, 0.0}; };
const Driver kRot = [](double s) { return std::polar(1.0, s); };

double isotropy(const Chart& chart, std::size_t samples = 200) {
  const JetOptions jo{};
  const auto pts = sample_domain(chart.domain(), samples, 0, jo.clearance());
  return max_isotropy_residual(sample_geometry(chart, pts, jo));
}

// Unit sphere twisted by e^{i eps f(u)}: stays on S^{n-1}, no longer Legendrian.
InitialData bumped_sphere(std::size_t n, double eps) {
  InitialData id = sphere_initial_data(n);
  const Chart base = id.sigma;
  id.sigma = Chart(base.dim_domain(), n, base.domain(), [base, eps](std::span<const double> u) -> ComplexVector {
    double f = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) f += std::sin(u[i] + 0.3 * static_cast<double>(i));
    return std::polar(1.0, eps * f) * base(u);
  });
  id.quadric.reset();
  return id;
}

// (a e^{i b t}, c e^{i d t}) with a^2 b + c^2 d = 0 is Legendrian in S^3.
Chart legendrian_curve(double a2, double b, double d) {
  const double a = std::sqrt(a2), c = std::sqrt(1.0 - a2);
  return Chart(1, 2, Box{{0.0}, {2 * kPi}}, [=](std::span<const double> u) -> ComplexVector {
    ComplexVector z(2);
    z << std::polar(a, b * u[0]), std::polar(c, d * u[0]);
    return z;
  });
}

}  // namespace

TEST_CASE("initial data condition") {
  for (std::size_t n : {2u, 3u, 4u}) {
    const auto r = check_initial_data(sphere_initial_data(n), {}, 1e-10);
    CHECK(r.pass);
    CHECK(r.max_residual < 1e-10);
  }
  for (const auto& l : std::vector<std::vector<double>>{{2.0, 1.0}, {2.0, 1.0, 1.0}, {2.0, -1.0}, {3.0, 1.0, -1.0}}) {
    CHECK(check_initial_data(quadric_initial_data({l}), {}, 1e-8).pass);
  }
  // B = I also passes: <V, X> = 1/2 d|X|^2 (V) + i omega(X, V) vanishes on any Legendrian of the sphere.
  auto real_b = sphere_initial_data(3);
  real_b.B = ComplexMatrix::Identity(3, 3);
  CHECK(check_initial_data(real_b, {}, 1e-8).max_residual < 1e-10);

  auto wrong = sphere_initial_data(3);
  wrong.B(0, 0) = cplx{0.0, 2.0};
  const auto r = check_initial_data(wrong, {}, 1e-8);
  CHECK_FALSE(r.pass);
  CHECK(r.max_residual > 0.1);

  const auto bumped = check_initial_data(bumped_sphere(3, 0.1), {}, 1e-8);
  CHECK_FALSE(bumped.pass);
  CHECK(bumped.max_residual > 1e-2);
  auto bad_shape = sphere_initial_data(3);
  bad_shape.b = ComplexVector::Zero(2);
  CHECK_THROWS_AS(check_initial_data(bad_shape, {}, 1e-8), InputError);
}

TEST_CASE("constant angle") {
  for (std::size_t n : {2u, 3u, 4u}) CHECK(check_constant_angle(sphere_initial_data(n), {}).max_deviation < 1e-8);
  for (const auto& l : std::vector<std::vector<double>>{{2.0, 1.0}, {2.0, 1.0, 1.0}, {3.0, 1.0}}) {
    const auto rep = check_constant_angle(quadric_initial_data({l}), {});
    CHECK(rep.max_deviation < 1e-8);
    CHECK(rep.max_deviation_mod_pi <= rep.max_deviation + 1e-15);
  }
  // frame (V, iX) on the sphere has determinant i times a positive real number
  const auto sph = check_constant_angle(sphere_initial_data(3), {});
  CHECK(angle_distance(sph.mean_angle, kPi / 2, kPi) < 1e-8);

  const auto bumped = check_constant_angle(bumped_sphere(3, 0.1), {});
  CHECK(bumped.max_deviation > 1e-2);
  CHECK(bumped.max_deviation_mod_pi > 1e-2);
}

TEST_CASE("hyperquadric legendrian condition") {
  const ComplexMatrix id3 = ComplexMatrix::Identity(3, 3);
  const auto sphere = check_quadric_legendrian(legendrian_catalog("great_sphere", 3), id3, 1.0, {});
  CHECK(sphere.legendrian_residual < 1e-6);
  CHECK(sphere.mean_curvature_residual < 1e-6);
  CHECK(sphere.level_residual < 1e-12);

  const auto torus = check_quadric_legendrian(legendrian_catalog("torus", 3), id3, 1.0, {});
  CHECK(torus.legendrian_residual < 1e-6);
  CHECK(torus.mean_curvature_residual < 1e-5);

  for (const auto& l : std::vector<std::vector<double>>{{2.0, 1.0}, {2.0, 1.0, 1.0}, {3.0, 1.0, 0.5}}) {
    const auto data = quadric_initial_data({l});
    const auto rep = check_quadric_legendrian(data.sigma, data.quadric->Lambda, data.quadric->c, {});
    CHECK(rep.legendrian_residual < 1e-6);
    CHECK(rep.mean_curvature_residual < 1e-5);
    CHECK(rep.level_residual < 1e-12);
  }

  // Legendrian in S^3 but not a great circle: H inside the sphere is nonzero.
  const Chart curve = legendrian_curve(1.0 / 3.0, 2.0, -1.0);
  const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
  const auto bad = check_quadric_legendrian(curve, id2, 1.0, {});
  CHECK(bad.legendrian_residual < 1e-6);
  CHECK(bad.level_residual < 1e-12);
  CHECK(bad.mean_curvature_residual > 1e-2);
  // the great circle of the same family passes
  CHECK(check_quadric_legendrian(legendrian_curve(0.5, 1.0, -1.0), id2, 1.0, {}).mean_curvature_residual < 1e-6);

  ComplexMatrix skew = id2;
  skew(0, 1) = cplx{0.0, 1.0};
  CHECK_THROWS_AS(check_quadric_legendrian(curve, skew, 1.0, {}), InputError);
}

TEST_CASE("developing: diagonal closed form") {
  const QuadricSpec spec{{2.0, 1.0, 1.0}};
  const auto id = quadric_initial_data(spec);
  const double s_max = 2 * kPi;
  const auto path = develop(id, kOne, s_max, default_developing_steps(s_max));
  CHECK(path.A().front() == ComplexMatrix::Identity(3, 3));
  CHECK(path.a().front() == ComplexVector::Zero(3));
  double err = 0.0, err_angle = 0.0;
  for (std::size_t i = 0; i < path.grid().size(); ++i) {
    const double s = path.grid()[i];
    ComplexMatrix expect = ComplexMatrix::Zero(3, 3);
    for (Eigen::Index j = 0; j < 3; ++j) expect(j, j) = std::polar(1.0, spec.lambdas[static_cast<std::size_t>(j)] * s);
    err = std::max(err, (path.A()[i] - expect).cwiseAbs().maxCoeff());
    CHECK(path.a()[i] == ComplexVector::Zero(3));
    err_angle = std::max(err_angle, std::abs(path.unwrapped_angle()[i] - spec.trace() * s));
  }
  CHECK(err < 1e-8);
  CHECK(err_angle < 1e-8);
  // dense output between nodes
  const double s = 1.2345;
  CHECK(std::abs(path.A_at(s)(0, 0) - std::polar(1.0, 2.0 * s)) < 1e-8);
}

TEST_CASE("developing: defining relation is second order on the grid") {
  const auto id = sphere_initial_data(3);
  auto relation_error = [&](std::size_t steps) {
    const auto path = develop(id, kRot, 0.8, steps);
    const double h = path.grid()[1] - path.grid()[0];
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < path.grid().size(); ++i) {
      const ComplexMatrix dA = (path.A()[i + 1] - path.A()[i - 1]) / (2 * h);
      const ComplexMatrix rel = path.A()[i].adjoint() * dA - path.alpha()[i] * id.B;
      worst = std::max(worst, rel.cwiseAbs().maxCoeff());
    }
    return worst;
  };
  const double e1 = relation_error(64), e2 = relation_error(128), e3 = relation_error(256);
  CHECK(std::log2(e1 / e2) >= 1.9);
  CHECK(std::log2(e2 / e3) >= 1.9);
}

TEST_CASE("developing: isotropy and its convergence") {
  const auto quad = quadric_initial_data({{2.0, 1.0, 1.0}});
  const double coarse = isotropy(developed_chart(develop(quad, kOne, 2 * kPi, 64), quad));
  const double fine = isotropy(developed_chart(develop(quad, kOne, 2 * kPi, 256), quad));
  CHECK(fine < 1e-6);
  CHECK(coarse / fine >= 8.0);

  const auto sph = sphere_initial_data(3);
  CHECK(isotropy(developed_chart(develop(sph, kRot, 0.9, default_developing_steps(0.9)), sph)) < 1e-6);
  const auto q31 = quadric_initial_data({{3.0, 1.0}});
  CHECK(isotropy(developed_chart(develop(q31, kRot, 0.5, default_developing_steps(0.5)), q31)) < 1e-6);
}

TEST_CASE("developing: errors") {
  const auto sph = sphere_initial_data(3);
  // |w|^2 = 2 cos s - 1 vanishes at s = pi/3
  CHECK_THROWS_AS(develop(sph, kRot, 2.0, 2048), NumericalError);
  CHECK_THROWS_AS(develop(sph, kOne, 1.0, 8), InputError);
  CHECK_THROWS_AS(develop(sph, kOne, 0.0, 64), InputError);
  CHECK_THROWS_AS(develop(sph, Driver{}, 1.0, 64), InputError);
  CHECK_THROWS_AS(develop_special_lagrangian(bumped_sphere(3, 0.1), 0.5, 64), InputError);
  const auto path = develop(sph, kOne, 1.0, 64);
  CHECK_THROWS_AS(path.A_at(1.5), NumericalError);
}

TEST_CASE("special lagrangian developing: sphere datum") {
  for (std::size_t n : {2u, 3u}) {
    CAPTURE(n);
    const auto id = sphere_initial_data(n);
    const double s_max = n == 2 ? 1.0 : 0.5;
    const auto path = develop_special_lagrangian(id, s_max, default_developing_steps(s_max));
    CHECK(path.A().front() == ComplexMatrix::Identity(n, n));
    CHECK(path.a().front() == ComplexVector::Zero(n));
    double conserved = 0.0, scalar = 0.0;
    for (const auto& A : path.A()) {
      const cplx w = A(0, 0);
      conserved = std::max(conserved, std::abs(std::pow(w, static_cast<int>(n)).real() - 1.0));
      scalar = std::max(scalar, (A - w * ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff());
    }
    CHECK(conserved < 1e-8);
    CHECK(scalar < 1e-12);

    const Chart chart = developed_chart(path, id);
    const JetOptions jo{};
    const std::vector<std::size_t> counts(chart.dim_domain(), n == 2 ? 20 : 7);
    std::vector<std::size_t> grid_counts = counts;
    grid_counts.back() = 20;
    if (n == 2) grid_counts.front() = 20;
    const auto pts = grid_domain(chart.domain(), grid_counts, jo.clearance());
    const auto geo = sample_geometry(chart, pts, jo);
    const double ref = *geo.front().angle;
    double dev = 0.0;
    for (const auto& g : geo) dev = std::max(dev, angle_distance(*g.angle, ref));
    CHECK(dev < 1e-6);
  }
  // n = 2 closed form w = cosh s + i sinh s
  const auto path = develop_special_lagrangian(sphere_initial_data(2), 1.0, 512);
  for (double s : {0.0, 0.25, 0.6, 1.0}) CHECK(std::abs(path.A_at(s)(0, 0) - cplx{std::cosh(s), std::sinh(s)}) < 1e-8);
}

TEST_CASE("angle formula") {
  const auto quad = quadric_initial_data({{2.0, 1.0, 1.0}});
  const auto one = angle_formula_check(develop(quad, kOne, 2 * kPi, default_developing_steps(2 * kPi)), quad, {});
  CHECK(one.max_deviation < 1e-8);
  CHECK(one.samples > 0);
  const auto rot = angle_formula_check(develop(quad, kRot, 0.6, default_developing_steps(0.6)), quad, {});
  CHECK(rot.max_deviation < 1e-6);
  const auto sl = develop_special_lagrangian(quad, 0.3, default_developing_steps(0.3));
  CHECK(angle_formula_check(sl, quad, {}).max_deviation < 1e-6);
  for (std::size_t i = 0; i < sl.grid().size(); ++i) {
    CHECK(angle_distance(std::arg(sl.alpha()[i]), -sl.unwrapped_angle()[i]) < 1e-12);
  }
  const auto sph = sphere_initial_data(3);
  CHECK(angle_formula_check(develop_special_lagrangian(sph, 0.5, 256), sph, {}).max_deviation < 1e-6);
}

TEST_CASE("twisted product") {
  const auto q = quadric_initial_data({{2.0, 1.0}});
  const auto s = sphere_initial_data(2);
  Eigen::Matrix2d identity = Eigen::Matrix2d::Identity();
  const auto plain = twisted_product(q, s, identity);
  ComplexMatrix t1 = ComplexMatrix::Zero(4, 4), t2 = ComplexMatrix::Zero(4, 4);
  t1.topLeftCorner(2, 2) = q.B;
  t2.bottomRightCorner(2, 2) = s.B;
  CHECK(plain.B1 == t1);
  CHECK(plain.B2 == t2);

  Eigen::Matrix2d c;
  c << 0.7, -1.3, 0.4, 2.1;
  const auto tp = twisted_product(q, s, c);
  CHECK(tp.sigma.dim_domain() == 2);
  CHECK(tp.sigma.dim_ambient() == 4);
  CHECK(check_initial_data(tp.first(), {}, 1e-8).max_residual < 1e-8);
  CHECK(check_initial_data(tp.second(), {}, 1e-8).max_residual < 1e-8);

  Eigen::Matrix2d singular;
  singular << 1.0, 2.0, 0.5, 1.0;
  CHECK_THROWS_AS(twisted_product(q, s, singular), InputError);
  CHECK_THROWS_AS(twisted_product(q, bumped_sphere(2, 0.1), c), InputError);
}

TEST_CASE("two-parameter developing") {
  const auto q = quadric_initial_data({{2.0, 1.0}});
  const auto s = sphere_initial_data(2);
  Eigen::Matrix2d c;
  c << 0.7, -1.3, 0.4, 2.1;
  const auto tp = twisted_product(q, s, c);
  const auto dev = develop_two_param(tp, kOne, kOne, 1.0, 1.0, 512, 512);
  CHECK(dev.chart.dim_domain() == 4);
  CHECK(dev.chart.dim_ambient() == 4);
  CHECK(dev.commutator <= 1e-8);
  CHECK(isotropy(dev.chart) < 1e-6);

  const Driver zero = [](double) { return cplx{0.0, 0.0}; };
  const auto still = develop_two_param(tp, zero, zero, 1.0, 1.0, 64, 64);
  for (const auto& u : sample_domain(still.chart.domain(), 20, 3, 0.0)) {
    const std::span<const double> p(u.data(), 2);
    CHECK(still.chart(u) == tp.sigma(p));
  }

  TwistedProduct swapped = tp;
  std::swap(swapped.B1, swapped.B2);
  std::swap(swapped.b1, swapped.b2);
  const auto other = develop_two_param(swapped, kOne, kOne, 1.0, 1.0, 512, 512);
  double diff = 0.0;
  for (const auto& u : sample_domain(dev.chart.domain(), 20, 4, 0.0)) {
    const DomainPoint v{u[0], u[1], u[3], u[2]};
    diff = std::max(diff, (dev.chart(u) - other.chart(v)).cwiseAbs().maxCoeff());
  }
  CHECK(diff < 1e-10);

  TwistedProduct clash = tp;
  clash.B2 = ComplexMatrix::Zero(4, 4);
  clash.B2(0, 1) = clash.B2(1, 0) = cplx{0.0, 1.0};
  clash.B2(2, 2) = cplx{0.0, 1.0};
  CHECK_THROWS_AS(develop_two_param(clash, kOne, kOne, 1.0, 1.0, 64, 64), NumericalError);
}

TEST_CASE("serial and parallel reports agree") {
  const auto q = quadric_initial_data({{2.0, 1.0, 1.0}});
  const auto path = develop(q, kOne, 1.0, 64);
  const Chart chart = developed_chart(path, q);
  const JetOptions jo{};
  const auto pts = sample_domain(chart.domain(), 64, 5, jo.clearance());
  const auto a = sample_geometry(chart, pts, jo, Exec::serial);
  const auto b = sample_geometry(chart, pts, jo, Exec::parallel);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(a[i].mean_curvature == b[i].mean_curvature);
    CHECK(a[i].omega_pullback == b[i].omega_pullback);
  }
}
