#include "forge/cx_geometry.hpp"

#include <cmath>
#include <string>

#include "forge/errors.hpp"

namespace forge {

namespace {

void require_same_size(const ComplexVector& u, const ComplexVector& v, const char* op) {
  if (u.size() != v.size() || u.size() == 0) {
    throw InputError(std::string(op) + ": dimension mismatch (" + std::to_string(u.size()) +
                     " vs " + std::to_string(v.size()) + ")");
  }
}

}  // namespace

cplx herm(const ComplexVector& u, const ComplexVector& v) {
  require_same_size(u, v, "herm");
  cplx acc{0.0, 0.0};
  for (Eigen::Index j = 0; j < u.size(); ++j) acc += u[j] * std::conj(v[j]);
  return acc;
}

double real_dot(const ComplexVector& u, const ComplexVector& v) {
  require_same_size(u, v, "real_dot");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    acc += u[j].real() * v[j].real() + u[j].imag() * v[j].imag();
  }
  return acc;
}

double symp(const ComplexVector& u, const ComplexVector& v) {
  require_same_size(u, v, "symp");
  return herm(v, u).imag();
}

cplx cx_det(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw InputError("cx_det: matrix is not square");
  const Eigen::Index n = m.rows();
  ComplexMatrix work = m;
  cplx det{1.0, 0.0};
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    double best = std::abs(work(col, col));
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const double mag = std::abs(work(r, col));
      if (mag > best) {
        best = mag;
        pivot = r;
      }
    }
    if (best == 0.0) return cplx{0.0, 0.0};
    if (pivot != col) {
      work.row(pivot).swap(work.row(col));
      det = -det;
    }
    const cplx diag = work(col, col);
    det *= diag;
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const cplx factor = work(r, col) / diag;
      if (factor == cplx{0.0, 0.0}) continue;
      work.row(r).tail(n - col) -= factor * work.row(col).tail(n - col);
    }
  }
  return det;
}

ComplexMatrix frame_matrix(std::span<const ComplexVector> frame) {
  if (frame.empty()) throw InputError("frame_matrix: empty frame");
  const Eigen::Index n = frame.front().size();
  ComplexMatrix m(n, static_cast<Eigen::Index>(frame.size()));
  for (std::size_t j = 0; j < frame.size(); ++j) {
    if (frame[j].size() != n) throw InputError("frame_matrix: ragged frame");
    m.col(static_cast<Eigen::Index>(j)) = frame[j];
  }
  return m;
}

double lagrangian_angle(std::span<const ComplexVector> frame) {
  const ComplexMatrix m = frame_matrix(frame);
  if (m.rows() != m.cols()) {
    throw InputError("lagrangian_angle: need n vectors in C^n, got " + std::to_string(m.cols()) +
                     " in C^" + std::to_string(m.rows()));
  }
  const cplx det = cx_det(m);
  double scale = 1.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) scale *= m.col(j).norm();
  if (!(std::abs(det) > 1e-12 * scale)) {
    throw NumericalError("lagrangian_angle: frame is not totally real (|det| = " +
                         std::to_string(std::abs(det)) + ")");
  }
  return wrap_angle(std::arg(det));
}

double wrap_angle(double x) {
  double r = std::fmod(x, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

double angle_distance(double a, double b, double period) {
  double d = std::fmod(a - b, period);
  if (d < 0.0) d += period;
  return std::min(d, period - d);
}

Eigen::VectorXd to_interleaved(const ComplexVector& z) {
  Eigen::VectorXd x(2 * z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    x[2 * j] = z[j].real();
    x[2 * j + 1] = z[j].imag();
  }
  return x;
}

ComplexVector from_interleaved(const Eigen::VectorXd& x) {
  if (x.size() % 2 != 0) throw InputError("from_interleaved: odd length");
  ComplexVector z(x.size() / 2);
  for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = cplx{x[2 * j], x[2 * j + 1]};
  return z;
}

}  // namespace forge
