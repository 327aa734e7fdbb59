#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "forge/immersion.hpp"

namespace forge {

struct SamplingOptions {
  std::size_t n_samples = 200;
  std::uint64_t seed = 0;
  JetOptions jet{};
};

/// Deterministic low-discrepancy points (Halton, Cranley-Patterson shifted by
/// the seed) in the box shrunk by `margin` on every side.
std::vector<DomainPoint> sample_domain(const Box& box, std::size_t n, std::uint64_t seed, double margin);

/// Cell-centred tensor grid; counts.size() must equal box.dim().
std::vector<DomainPoint> grid_domain(const Box& box, std::span<const std::size_t> counts, double margin = 0.0);

}  // namespace forge
