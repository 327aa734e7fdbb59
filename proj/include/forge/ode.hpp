#pragma once

#include <cstddef>

namespace forge {

/// One classical fourth-order Runge-Kutta step for y' = f(t, y). State only
/// needs +, and scalar *; works for double, Eigen matrices and small structs.
template <class State, class Rhs>
State rk4_step(const Rhs& f, double t, const State& y, double h) {
  const State k1 = f(t, y);
  const State k2 = f(t + 0.5 * h, State(y + (0.5 * h) * k1));
  const State k3 = f(t + 0.5 * h, State(y + (0.5 * h) * k2));
  const State k4 = f(t + h, State(y + h * k3));
  return State(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// Cubic Hermite interpolant on [t0, t0 + h] from endpoint values and slopes;
/// tau = (t - t0) / h in [0, 1].
template <class T>
T cubic_hermite(const T& y0, const T& d0, const T& y1, const T& d1, double h, double tau) {
  const double t2 = tau * tau;
  const double t3 = t2 * tau;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + tau;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return T(h00 * y0 + (h10 * h) * d0 + h01 * y1 + (h11 * h) * d1);
}

template <class T>
T cubic_hermite_slope(const T& y0, const T& d0, const T& y1, const T& d1, double h, double tau) {
  const double t2 = tau * tau;
  const double g00 = (6 * t2 - 6 * tau) / h;
  const double g10 = 3 * t2 - 4 * tau + 1;
  const double g01 = (-6 * t2 + 6 * tau) / h;
  const double g11 = 3 * t2 - 2 * tau;
  return T(g00 * y0 + g10 * d0 + g01 * y1 + g11 * d1);
}

/// Quintic Hermite interpolant from values, first and second derivatives.
inline double quintic_hermite(double y0, double d0, double c0, double y1, double d1, double c1, double h,
                              double tau) {
  const double t = tau;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double t4 = t3 * t;
  const double t5 = t4 * t;
  const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
  const double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
  const double h2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
  const double h3 = 0.5 * (t3 - 2 * t4 + t5);
  const double h4 = -4 * t3 + 7 * t4 - 3 * t5;
  const double h5 = 10 * t3 - 15 * t4 + 6 * t5;
  return h0 * y0 + h1 * h * d0 + h2 * h * h * c0 + h3 * h * h * c1 + h4 * h * d1 + h5 * y1;
}

}  // namespace forge
