#pragma once

#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace forge {

using cplx = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Ordered real-tangent vectors of C^n. For the Lagrangian angle the frame
/// must hold exactly n vectors that are C-linearly independent.
using RealFrame = std::vector<ComplexVector>;

constexpr double two_pi = 2.0 * std::numbers::pi;

/// Hermitian product <u, v> = sum_j u_j conj(v_j).
cplx herm(const ComplexVector& u, const ComplexVector& v);

/// Real inner product on R^{2n}, Re <u, v>.
double real_dot(const ComplexVector& u, const ComplexVector& v);

/// Standard Kaehler form, omega(u, v) = Im <v, u>; omega(1, i) = 1 on C.
double symp(const ComplexVector& u, const ComplexVector& v);

/// Determinant by Gaussian elimination with partial pivoting.
cplx cx_det(const ComplexMatrix& m);

/// arg det [v_1 ... v_n] in [0, 2pi). Throws NumericalError when the frame is
/// not totally real (|det| negligible against the column norms).
double lagrangian_angle(std::span<const ComplexVector> frame);

ComplexMatrix frame_matrix(std::span<const ComplexVector> frame);

/// Principal value in [0, 2pi).
double wrap_angle(double x);

/// Distance between two angles on the circle R / (period Z), in [0, period/2].
double angle_distance(double a, double b, double period = two_pi);

/// Interleaved (x1, y1, ..., xn, yn) storage used at serialization boundaries.
Eigen::VectorXd to_interleaved(const ComplexVector& z);
ComplexVector from_interleaved(const Eigen::VectorXd& x);

}  // namespace forge
