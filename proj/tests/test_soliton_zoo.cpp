#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "forge/errors.hpp"
#include "forge/kernels.hpp"
#include "forge/sampling.hpp"
#include "forge/soliton_zoo.hpp"

using namespace forge;

namespace {

constexpr double kPi = std::numbers::pi;

double max_omega_on(const Chart& chart, std::size_t samples = 200) {
  const JetOptions jo{};
  const auto pts = sample_domain(chart.domain(), samples, 0, jo.clearance());
  return max_isotropy_residual(sample_geometry(chart, pts, jo));
}

std::vector<ComplexVector> points_on(const Chart& chart, std::size_t samples = 64) {
  std::vector<ComplexVector> out;
  for (const auto& u : sample_domain(chart.domain(), samples, 1, 0.0)) out.push_back(chart(u));
  return out;
}

Chart circle(double radius, cplx centre) {
  return Chart(1, 1, Box{{0.0}, {2 * kPi}}, [=](std::span<const double> u) -> ComplexVector {
    return ComplexVector::Constant(1, centre + std::polar(radius, u[0]));
  });
}

}  // namespace

TEST_CASE("quadric coefficient validation") {
  CHECK_THROWS_AS((QuadricSpec{{}}).validate(), InputError);
  CHECK_THROWS_AS((QuadricSpec{{1.0, 0.0}}).validate(), InputError);
  CHECK_THROWS_AS((QuadricSpec{{1.0, -2.0}}).validate(), InputError);
  CHECK_NOTHROW((QuadricSpec{{2.0, -1.0}}).validate());
  CHECK((QuadricSpec{{2.0, 1.0, 1.0}}).trace() == 4.0);
}

TEST_CASE("quadric lagrangian: clifford-type torus") {
  const Chart l = build_quadric_lagrangian({{1.0, 1.0}}, 0.0, 2 * kPi);
  CHECK(l.dim_domain() == 2);
  for (const auto& z : points_on(l)) {
    CHECK(std::abs(z.squaredNorm() - 1.0) < 1e-12);
    // z = (cos t, sin t) e^{is}: both entries share a phase.
    CHECK(std::abs((z[0] * std::conj(z[1])).imag()) < 1e-12);
  }
  CHECK(max_omega_on(l) < 1e-8);
}

TEST_CASE("quadric lagrangian: circle for a single lambda") {
  const Chart l = build_quadric_lagrangian({{2.0}}, 0.0, 2 * kPi);
  CHECK(l.dim_domain() == 1);
  for (const auto& z : points_on(l)) CHECK(std::abs(std::abs(z[0]) - 1.0 / std::sqrt(2.0)) < 1e-14);
}

TEST_CASE("real quadric: hyperbolic sheet constraint") {
  const Chart q = real_quadric_chart({{2.0, -1.0}});
  for (const auto& z : points_on(q)) {
    CHECK(z.imag().norm() == 0.0);
    CHECK(std::abs(2 * z[0].real() * z[0].real() - z[1].real() * z[1].real() - 1.0) < 1e-10);
  }
  const Chart q3 = real_quadric_chart({{3.0, 1.0, -1.0}}, 2.5);
  for (const auto& z : points_on(q3)) {
    const auto x = z.real();
    CHECK(std::abs(3 * x[0] * x[0] + x[1] * x[1] - x[2] * x[2] - 2.5) < 1e-10);
  }
  const Chart neg = real_quadric_chart({{3.0, -1.0, -1.0}}, -1.0);
  for (const auto& z : points_on(neg)) {
    const auto x = z.real();
    CHECK(std::abs(3 * x[0] * x[0] - x[1] * x[1] - x[2] * x[2] + 1.0) < 1e-10);
  }
  CHECK_THROWS_AS(real_quadric_chart(QuadricSpec{{1.0, 2.0}}, -1.0), InputError);
}

TEST_CASE("constructed charts are lagrangian") {
  for (const auto& lambdas : std::vector<std::vector<double>>{{2.0}, {1.0, 1.0}, {2.0, 1.0, 1.0}, {3.0, 1.0}, {2.0, -1.0},
                                                              {1.0, 2.0, -1.0}}) {
    CAPTURE(lambdas.size());
    CHECK(max_omega_on(build_quadric_lagrangian({lambdas}, -1.0, 1.0)) < 1e-6);
  }
  const Chart prod = build_curve_times_legendrian([](double s) { return std::polar(1.0, s); }, 0.2, 2.0,
                                                  legendrian_catalog("great_sphere", 3));
  CHECK(max_omega_on(prod) < 1e-8);
  CHECK(max_omega_on(cone_over(legendrian_catalog("torus", 3), 0.5, 1.5)) < 1e-6);
  CHECK(max_omega_on(cone_over(legendrian_catalog("great_sphere", 2), 0.5, 1.5)) < 1e-6);
}

TEST_CASE("flow trace levels and degenerations") {
  const QuadricSpec spec{{1.0, 2.0}};
  const std::vector<double> ts{-1.0, -1.0 / 6.0, 0.0, 0.5};
  const auto slices = flow_trace(spec, ts, 32, 3);
  REQUIRE(slices.size() == 4);
  CHECK(slices[0].level == doctest::Approx(6.0));
  CHECK(slices[0].kind == TraceSlice::Kind::regular);
  for (const auto& x : slices[0].points) CHECK(std::abs(x[0] * x[0] + 2 * x[1] * x[1] - 6.0) < 1e-10);
  CHECK(slices[1].level == doctest::Approx(1.0));
  CHECK(slices[2].kind == TraceSlice::Kind::degenerate_point);
  CHECK(slices[3].kind == TraceSlice::Kind::empty);
  CHECK(slices[3].points.empty());

  const std::vector<double> zero{0.0};
  const auto pinch = flow_trace({{2.0, -1.0}}, zero);
  CHECK(pinch[0].kind == TraceSlice::Kind::degenerate_cone);
  const std::vector<double> after{0.25};
  const auto flipped = flow_trace({{2.0, -1.0}}, after, 16);
  CHECK(flipped[0].kind == TraceSlice::Kind::regular);
  for (const auto& x : flipped[0].points) CHECK(std::abs(2 * x[0] * x[0] - x[1] * x[1] + 0.5) < 1e-10);
}

TEST_CASE("flow trace self-similarity") {
  const QuadricSpec spec{{1.0, 2.0}};
  const std::vector<double> ts{-0.3, -1.2, -0.7};
  const auto slices = flow_trace(spec, ts, 64, 9);
  for (std::size_t j = 1; j < slices.size(); ++j) {
    const double factor = std::sqrt(slices[j].t / slices[0].t);
    double worst = 0.0;
    for (std::size_t i = 0; i < slices[0].points.size(); ++i) {
      worst = std::max(worst, (slices[j].points[i] - factor * slices[0].points[i]).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("curve times legendrian: input checks and degenerate curve") {
  const Chart tilted(1, 2, Box{{0.0}, {2 * kPi}}, [](std::span<const double> u) -> ComplexVector {
    ComplexVector z(2);
    z << std::polar(std::cos(u[0]), u[0]), std::sin(u[0]);
    return z;
  });
  auto rot = [](double s) { return std::polar(1.0, s); };
  CHECK_THROWS_AS(build_curve_times_legendrian(rot, 0.0, 1.0, tilted), InputError);
  CHECK_THROWS_AS(build_curve_times_legendrian(rot, 0.0, 1.0, cone_over(legendrian_catalog("great_sphere", 2), 0.5, 2.0)),
                  InputError);

  const Chart flat = build_curve_times_legendrian([](double) { return cplx{1.0, 0.0}; }, 0.0, 1.0,
                                                  legendrian_catalog("great_sphere", 2));
  const DomainPoint u{1.0, 0.5};
  CHECK_THROWS_AS(geometry_at(jet(flat, u)), NumericalError);
}

TEST_CASE("curve times legendrian: special lagrangian curve") {
  // n = 2: w' = i conj(w), w(0) = 1 has w = cosh s + i sinh s, and Re(w^2) = 1.
  const Chart sl = build_curve_times_legendrian([](double s) { return cplx{std::cosh(s), std::sinh(s)}; }, 0.1, 1.5,
                                                legendrian_catalog("great_sphere", 2));
  const JetOptions jo{};
  const auto pts = sample_domain(sl.domain(), 100, 0, jo.clearance());
  const auto geo = sample_geometry(sl, pts, jo);
  REQUIRE(geo.front().angle.has_value());
  const double ref = *geo.front().angle;
  double dev = 0.0;
  for (const auto& g : geo) dev = std::max(dev, angle_distance(*g.angle, ref, std::numbers::pi));
  CHECK(dev < 1e-6);
}

TEST_CASE("legendrian catalog") {
  for (const char* name : {"great_sphere", "torus"}) {
    for (std::size_t n : {2u, 3u, 4u}) {
      const Chart x = legendrian_catalog(name, n);
      const JetOptions jo{};
      for (const auto& u : sample_domain(x.domain(), 40, 2, jo.clearance())) {
        const JetSample js = jet(x, u, jo);
        CHECK(std::abs(js.point.norm() - 1.0) < 1e-10);
        for (const auto& v : js.first) CHECK(std::abs(symp(js.point, v)) < 1e-10);
      }
    }
  }
  CHECK_THROWS_AS(legendrian_catalog("clifford", 3), InputError);
  CHECK_THROWS_AS(legendrian_catalog("torus", 1), InputError);
}

TEST_CASE("fit: circles") {
  const auto unit = fit_soliton(circle(1.0, 0.0), {});
  CHECK(unit.a == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(unit.b.norm() < 1e-6);
  CHECK(unit.residual < 1e-6);

  // H = -(X - c) / R^2 gives a = -1/R^2 and b = c / R^2.
  const auto shifted = fit_soliton(circle(2.0, cplx{0.5, -1.0}), {});
  CHECK(shifted.a == doctest::Approx(-0.25).epsilon(1e-6));
  CHECK(std::abs(shifted.b[0] - 0.125) < 1e-6);
  CHECK(std::abs(shifted.b[1] + 0.25) < 1e-6);
}

TEST_CASE("fit: quadric family") {
  for (const auto& lambdas : std::vector<std::vector<double>>{{1.0, 1.0}, {2.0}, {2.0, 1.0, 1.0}, {3.0, 1.0}}) {
    const QuadricSpec spec{lambdas};
    CAPTURE(spec.trace());
    const auto fit = fit_soliton(build_quadric_lagrangian(spec, 0.0, 2 * kPi), {});
    CHECK(std::abs(fit.a + spec.trace()) < 1e-4);
    CHECK(fit.b.norm() < 1e-6);
    CHECK(fit.residual < 1e-5);
  }
}

TEST_CASE("fit: affine plane and minimal cone") {
  const Chart plane(2, 2, Box{{-1.0, -1.0}, {1.0, 1.0}}, [](std::span<const double> u) -> ComplexVector {
    ComplexVector z(2);
    z << cplx{u[0] + 0.3, 0.0}, cplx{u[1], 0.0};
    return z;
  });
  const auto fp = fit_soliton(plane, {});
  CHECK(std::abs(fp.a) < 1e-12);
  CHECK(fp.b.norm() < 1e-12);
  CHECK(fp.residual < 1e-12);
  CHECK(fp.kernel_dim > 0);

  const auto fc = fit_soliton(cone_over(legendrian_catalog("torus", 3), 0.5, 1.5), {});
  CHECK(std::abs(fc.a) < 1e-4);
  CHECK(fc.b.norm() < 1e-4);
}

TEST_CASE("fit: scaling covariance") {
  const Chart base = circle(1.5, cplx{0.2, 0.7});
  const auto f0 = fit_soliton(base, {});
  for (double c : {0.5, 2.0, 3.0}) {
    const auto fc = fit_soliton(base.scaled(c), {});
    CHECK(std::abs(fc.a - f0.a / (c * c)) < 1e-5);
    CHECK((fc.b - f0.b / c).norm() < 1e-5);
  }
  const Chart q = build_quadric_lagrangian({{3.0, 1.0}}, 0.0, 2 * kPi);
  const auto q0 = fit_soliton(q, {});
  const auto q2 = fit_soliton(q.scaled(2.0), {});
  CHECK(std::abs(q2.a - q0.a / 4.0) < 1e-5);
}
