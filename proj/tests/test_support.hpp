#pragma once

#include <cstdint>
#include <random>

#include "forge/cx_geometry.hpp"

namespace forge::testing {

inline ComplexVector random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexVector v(n);
  for (Eigen::Index j = 0; j < n; ++j) v[j] = cplx{g(rng), g(rng)};
  return v;
}

inline ComplexMatrix random_matrix(std::mt19937_64& rng, Eigen::Index n) {
  ComplexMatrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) m.col(j) = random_vector(rng, n);
  return m;
}

inline ComplexMatrix random_unitary(std::mt19937_64& rng, Eigen::Index n) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_matrix(rng, n));
  return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace forge::testing
