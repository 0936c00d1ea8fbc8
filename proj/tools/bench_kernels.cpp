// Benchmark the OpenMP energy kernels against the serial reference.
#include <chrono>
#include <cmath>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "capdp/capsolve.hpp"

using namespace capdp;

namespace {

template <typename F>
double time_ms(F&& fn, int reps) {
  fn();  // warm up
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  int res = argc > 1 ? std::atoi(argv[1]) : 512;
  int reps = argc > 2 ? std::atoi(argv[2]) : 20;

  auto dom = std::make_shared<DiscreteDomain>(make_annulus({0, 0, 0}, 0.4, 1.0, res));
  DoublePhaseIntegrand itg = make_integrand(dom, 2.0, 2.5, 1.0, "dist_pow:1");
  ScalarField u(dom);
  for (long k = 0; k < dom->node_count(); ++k) {
    Vec3 x = dom->position(k);
    u[k] = std::sin(7 * x[0]) * std::cos(5 * x[1]);
  }

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (no OpenMP)\n");
#endif
  std::printf("grid: %dx%d nodes\n", dom->shape[0], dom->shape[1]);

  double e_serial = 0, e_par = 0;
  double ms_s = time_ms([&] { e_serial = energy_serial(u, itg).total; }, reps);
  double ms_p = time_ms([&] { e_par = energy(u, itg).total; }, reps);
  std::printf("energy        serial %8.3f ms   parallel %8.3f ms   speedup %.2fx\n", ms_s, ms_p,
              ms_s / ms_p);
  std::printf("energy values %.17g vs %.17g (%s)\n", e_serial, e_par,
              e_serial == e_par ? "bit-identical" : "MISMATCH");

  std::vector<double> gs, gp;
  double ms_gs = time_ms([&] { gs = energy_gradient_serial(u, itg, 1e-4); }, reps);
  double ms_gp = time_ms([&] { gp = energy_gradient(u, itg, 1e-4); }, reps);
  bool same = gs == gp;
  std::printf("gradient      serial %8.3f ms   parallel %8.3f ms   speedup %.2fx (%s)\n", ms_gs,
              ms_gp, ms_gs / ms_gp, same ? "bit-identical" : "MISMATCH");
  return same && e_serial == e_par ? 0 : 1;
}
