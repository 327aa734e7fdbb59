#include <cmath>
#include <numbers>

#include "doctest.h"
#include "forge/cx_geometry.hpp"
#include "forge/errors.hpp"
#include "test_support.hpp"

using namespace forge;
using forge::testing::random_vector;

namespace {
const cplx I{0.0, 1.0};

ComplexVector vec(std::initializer_list<cplx> xs) {
  ComplexVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (auto x : xs) v[i++] = x;
  return v;
}
}  // namespace

TEST_CASE("herm follows sum u_j conj(v_j)") {
  CHECK(std::abs(herm(vec({1.0, 0.0}), vec({I, 0.0})) - (-I)) < 1e-15);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto u = random_vector(rng, 4);
    const auto v = random_vector(rng, 4);
    const auto w = random_vector(rng, 4);
    const cplx c{forge::testing::uniform(rng, -2, 2), forge::testing::uniform(rng, -2, 2)};
    CHECK(std::abs(herm(u, v) - std::conj(herm(v, u))) < 1e-12);
    CHECK(std::abs(herm(u, u).imag()) < 1e-12);
    CHECK(herm(u, u).real() == doctest::Approx(u.squaredNorm()).epsilon(1e-12));
    // linear in the first slot, conjugate-linear in the second
    CHECK(std::abs(herm(c * u + w, v) - (c * herm(u, v) + herm(w, v))) < 1e-12);
    CHECK(std::abs(herm(u, c * v) - std::conj(c) * herm(u, v)) < 1e-12);
  }
}

TEST_CASE("dimension mismatch is an input error") {
  CHECK_THROWS_AS(herm(vec({1.0}), vec({1.0, 2.0})), InputError);
  CHECK_THROWS_AS(symp(vec({1.0}), vec({1.0, 2.0})), InputError);
}

TEST_CASE("symp normalization, antisymmetry and J-invariance") {
  CHECK(symp(vec({1.0}), vec({I})) == doctest::Approx(1.0));
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto u = random_vector(rng, 3);
    const auto v = random_vector(rng, 3);
    CHECK(std::abs(symp(u, u)) < 1e-12);
    CHECK(std::abs(symp(u, v) + symp(v, u)) < 1e-12);
    CHECK(std::abs(symp(I * u, I * v) - symp(u, v)) < 1e-12);
  }
}

TEST_CASE("cx_det on identity, diagonal phases and a row swap") {
  CHECK(std::abs(cx_det(ComplexMatrix::Identity(4, 4)) - 1.0) < 1e-15);
  const double s = 0.7;
  const double lambdas[] = {1.0, -2.0, 0.5};
  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  double total = 0.0;
  for (int j = 0; j < 3; ++j) {
    d(j, j) = std::polar(1.0, lambdas[j] * s);
    total += lambdas[j];
  }
  CHECK(std::abs(cx_det(d) - std::polar(1.0, total * s)) < 1e-14);
  ComplexMatrix swap = ComplexMatrix::Identity(3, 3);
  swap.row(0).swap(swap.row(2));
  CHECK(std::abs(cx_det(swap) + 1.0) < 1e-15);
  CHECK(std::abs(cx_det(ComplexMatrix::Zero(2, 2))) == 0.0);

  std::mt19937_64 rng(3);
  const ComplexMatrix m = forge::testing::random_matrix(rng, 5);
  CHECK(std::abs(cx_det(m) - m.determinant()) < 1e-10 * std::abs(m.determinant()));
}

TEST_CASE("lagrangian_angle of standard frames") {
  for (int n = 1; n <= 4; ++n) {
    RealFrame real;
    RealFrame imag;
    for (int j = 0; j < n; ++j) {
      ComplexVector e = ComplexVector::Zero(n);
      e[j] = 1.0;
      real.push_back(e);
      imag.push_back(I * e);
    }
    CHECK(lagrangian_angle(real) == doctest::Approx(0.0));
    CHECK(angle_distance(lagrangian_angle(imag), n * std::numbers::pi / 2) < 1e-14);
    RealFrame scaled;
    for (auto& v : imag) scaled.push_back(3.5 * v);
    CHECK(std::abs(lagrangian_angle(scaled) - lagrangian_angle(imag)) < 1e-14);
  }
}

TEST_CASE("lagrangian_angle rejects complex-dependent frames") {
  RealFrame frame{vec({1.0, 0.0}), vec({I, 0.0})};
  CHECK_THROWS_AS(lagrangian_angle(frame), NumericalError);
  RealFrame short_frame{vec({1.0, 0.0})};
  CHECK_THROWS_AS(lagrangian_angle(short_frame), InputError);
}

TEST_CASE("lagrangian_angle: phase rotation and positive real changes of basis") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 4;
    RealFrame frame;
    for (int j = 0; j < n; ++j) frame.push_back(random_vector(rng, n));
    const double base = lagrangian_angle(frame);

    const double tau = forge::testing::uniform(rng, -3.0, 3.0);
    RealFrame rotated;
    for (auto& v : frame) rotated.push_back(std::polar(1.0, tau) * v);
    CHECK(angle_distance(lagrangian_angle(rotated), base + n * tau) < 1e-10);

    Eigen::MatrixXd t = Eigen::MatrixXd::Random(n, n);
    if (t.determinant() < 0) t.col(0) *= -1.0;
    if (std::abs(t.determinant()) < 1e-3) continue;
    const ComplexMatrix changed = frame_matrix(frame) * t.cast<cplx>();
    RealFrame changed_frame;
    for (int j = 0; j < n; ++j) changed_frame.push_back(changed.col(j));
    CHECK(angle_distance(lagrangian_angle(changed_frame), base) < 1e-10);
  }
}

TEST_CASE("interleaved storage round trip") {
  std::mt19937_64 rng(5);
  const auto z = random_vector(rng, 3);
  const Eigen::VectorXd x = to_interleaved(z);
  CHECK(x[0] == z[0].real());
  CHECK(x[1] == z[0].imag());
  CHECK((from_interleaved(x) - z).norm() == 0.0);
}

TEST_CASE("wrap_angle lands in [0, 2pi)") {
  CHECK(wrap_angle(-0.5) == doctest::Approx(two_pi - 0.5));
  CHECK(wrap_angle(7.0) == doctest::Approx(7.0 - two_pi));
  CHECK(wrap_angle(two_pi) == 0.0);
  CHECK(angle_distance(0.1, two_pi - 0.1) == doctest::Approx(0.2));
}
