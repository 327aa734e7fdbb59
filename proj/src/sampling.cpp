#include "forge/sampling.hpp"

#include <array>
#include <cmath>
#include <random>

#include "forge/errors.hpp"

namespace forge {

namespace {

constexpr std::array<unsigned, 12> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

double radical_inverse(std::uint64_t index, unsigned base) {
  double inv = 1.0 / base;
  double factor = inv;
  double value = 0.0;
  while (index > 0) {
    value += static_cast<double>(index % base) * factor;
    index /= base;
    factor *= inv;
  }
  return value;
}

}  // namespace

std::vector<DomainPoint> sample_domain(const Box& box, std::size_t n, std::uint64_t seed, double margin) {
  const std::size_t k = box.dim();
  if (k > kPrimes.size()) throw InputError("sample_domain: dimension too large for Halton sampling");
  for (std::size_t i = 0; i < k; ++i) {
    if (!(box.hi[i] - box.lo[i] > 2.0 * margin)) throw InputError("sample_domain: margin exceeds domain");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> shift(k);
  for (auto& s : shift) s = unit(rng);

  std::vector<DomainPoint> out(n, DomainPoint(k));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < k; ++d) {
      double t = radical_inverse(i + 1, kPrimes[d]) + shift[d];
      t -= std::floor(t);
      const double lo = box.lo[d] + margin;
      const double hi = box.hi[d] - margin;
      out[i][d] = lo + t * (hi - lo);
    }
  }
  return out;
}

std::vector<DomainPoint> grid_domain(const Box& box, std::span<const std::size_t> counts, double margin) {
  const std::size_t k = box.dim();
  if (counts.size() != k) throw InputError("grid_domain: need one count per domain axis");
  std::size_t total = 1;
  for (auto c : counts) {
    if (c == 0) throw InputError("grid_domain: zero count");
    total *= c;
  }
  std::vector<DomainPoint> out;
  out.reserve(total);
  std::vector<std::size_t> idx(k, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    DomainPoint p(k);
    for (std::size_t d = 0; d < k; ++d) {
      const double lo = box.lo[d] + margin;
      const double hi = box.hi[d] - margin;
      p[d] = lo + (static_cast<double>(idx[d]) + 0.5) * (hi - lo) / static_cast<double>(counts[d]);
    }
    out.push_back(std::move(p));
    // last axis varies fastest
    for (std::size_t d = k; d-- > 0;) {
      if (++idx[d] < counts[d]) break;
      idx[d] = 0;
    }
  }
  return out;
}

}  // namespace forge
