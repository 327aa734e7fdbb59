#include "forge/kernels.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace forge {

int thread_cap() {
  if (const char* env = std::getenv("SOLITON_FORGE_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return omp_get_max_threads();
}

namespace detail {

void parallel_indices(std::size_t n, void (*body)(void*, std::size_t), void* ctx,
                      std::vector<std::exception_ptr>& errors) {
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 4) num_threads(thread_cap())
  for (long long i = 0; i < count; ++i) {
    try {
      body(ctx, static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
}

}  // namespace detail

std::vector<JetSample> sample_jets(const Chart& chart, std::span<const DomainPoint> points,
                                   const JetOptions& opts, Exec exec) {
  return map_indices<JetSample>(points.size(), [&](std::size_t i) { return jet(chart, points[i], opts); }, exec);
}

std::vector<GeometrySample> sample_geometry(const Chart& chart, std::span<const DomainPoint> points,
                                            const JetOptions& opts, Exec exec) {
  return map_indices<GeometrySample>(
      points.size(), [&](std::size_t i) { return geometry_at(jet(chart, points[i], opts)); }, exec);
}

double max_isotropy_residual(std::span<const GeometrySample> samples) {
  double worst = 0.0;
  for (const auto& s : samples) worst = std::max(worst, max_omega(s));
  return worst;
}

}  // namespace forge
