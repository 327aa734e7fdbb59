#pragma once

// Data-parallel sampling kernels. Every kernel has a serial reference path
// and an OpenMP path; both write results by sample index and any reduction
// happens afterwards in index order, so the two paths agree bit for bit.

#include <cstddef>
#include <exception>
#include <type_traits>
#include <span>
#include <vector>

#include "forge/immersion.hpp"

namespace forge {

enum class Exec { serial, parallel };

/// Worker count for the parallel path: SOLITON_FORGE_THREADS if set and
/// positive, otherwise the OpenMP default.
int thread_cap();

namespace detail {
void parallel_indices(std::size_t n, void (*body)(void*, std::size_t), void* ctx,
                      std::vector<std::exception_ptr>& errors);
}

/// Calls fn(i) for i in [0, n). On failure rethrows the exception raised at the
/// lowest index, regardless of the execution path.
template <class Fn>
void for_each_index(std::size_t n, Fn&& fn, Exec exec = Exec::parallel) {
  std::vector<std::exception_ptr> errors(n);
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    auto thunk = [](void* ctx, std::size_t i) { (*static_cast<std::remove_reference_t<Fn>*>(ctx))(i); };
    detail::parallel_indices(n, thunk, static_cast<void*>(&fn), errors);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

template <class T, class Fn>
std::vector<T> map_indices(std::size_t n, Fn&& fn, Exec exec = Exec::parallel) {
  std::vector<T> out(n);
  for_each_index(n, [&](std::size_t i) { out[i] = fn(i); }, exec);
  return out;
}

std::vector<JetSample> sample_jets(const Chart& chart, std::span<const DomainPoint> points,
                                   const JetOptions& opts, Exec exec = Exec::parallel);

std::vector<GeometrySample> sample_geometry(const Chart& chart, std::span<const DomainPoint> points,
                                            const JetOptions& opts, Exec exec = Exec::parallel);

inline std::vector<GeometrySample> sample_geometry_serial(const Chart& chart, std::span<const DomainPoint> points,
                                                          const JetOptions& opts) {
  return sample_geometry(chart, points, opts, Exec::serial);
}

/// Max |omega_pullback| over the samples.
double max_isotropy_residual(std::span<const GeometrySample> samples);

}  // namespace forge
