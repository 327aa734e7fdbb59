// Serial reference path vs OpenMP path for the sampling kernels.
// Usage: bench_kernels [repeats]. Thread count follows SOLITON_FORGE_THREADS.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "forge/kernels.hpp"
#include "forge/kr_profile.hpp"
#include "forge/sampling.hpp"
#include "forge/soliton_zoo.hpp"

using namespace forge;

namespace {

double best_of(int repeats, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, std::size_t items, int repeats, const std::function<void(Exec)>& fn) {
  const double serial = best_of(repeats, [&] { fn(Exec::serial); });
  const double parallel = best_of(repeats, [&] { fn(Exec::parallel); });
  std::printf("%-28s %8zu %12.4f %12.4f %8.2fx\n", name, items, serial * 1e3, parallel * 1e3, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 5;
  std::printf("threads %d, best of %d\n", thread_cap(), repeats);
  std::printf("%-28s %8s %12s %12s %9s\n", "kernel", "items", "serial ms", "parallel ms", "speedup");

  const Chart quadric = build_quadric_lagrangian({{2.0, 1.0, 1.0}}, 0.0, 6.0);
  const JetOptions jo;
  const auto pts = sample_domain(quadric.domain(), 4000, 1, jo.clearance());
  report("sample_jets quadric(2,1,1)", pts.size(), repeats,
         [&](Exec e) { (void)sample_jets(quadric, pts, jo, e); });
  report("sample_geometry quadric", pts.size(), repeats,
         [&](Exec e) { (void)sample_geometry(quadric, pts, jo, e); });

  const Chart torus = legendrian_catalog("torus", 3);
  const auto grid = grid_domain(torus.domain(), std::vector<std::size_t>{64, 64}, jo.clearance());
  report("sample_geometry torus 64x64", grid.size(), repeats,
         [&](Exec e) { (void)sample_geometry(torus, grid, jo, e); });

  ProfileParams p;
  p.model = {1, 4.0};
  p.lambda = -1.0;
  p.mu = -1.0;
  p.phi0 = 0.5;
  const Annulus ann;
  const auto pot = potential_for_annulus(solve_profile_closed(p), ann);
  const auto zs = annulus_points(1, ann, 400, 1);
  report("soliton_residuals m=1", zs.size(), repeats, [&](Exec e) { (void)soliton_residuals(pot, zs, 1e-3, e); });
  return 0;
}
