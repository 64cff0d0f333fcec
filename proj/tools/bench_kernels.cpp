// Timing comparison of the OpenMP kernels against their serial reference
// paths: sparse matvec, Chebyshev application, element assembly.
//
// Usage: bench_kernels [grid_edge] [degree] [repeats]

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "geofilt/chebyshev.hpp"
#include "geofilt/fem.hpp"
#include "geofilt/krige.hpp"
#include "geofilt/rng.hpp"

using namespace geofilt;

namespace {

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <typename F>
double time_best_of(int repeats, F&& body) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const double t0 = now_s();
    body();
    best = std::min(best, now_s() - t0);
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t edge = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 256;
  const std::size_t degree = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 256;
  const int repeats = argc > 3 ? std::atoi(argv[3]) : 5;

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::printf("grid %zux%zu, degree %zu, %d threads, best of %d runs\n", edge,
              edge, degree, threads, repeats);

  const TriMesh mesh = triangulate_grid(edge, edge, 1.0, 1.0);
  const AnisotropyField aniso = constant_field(mesh, 0.5, 8.0, 2.0);
  const std::size_t n = mesh.node_count();

  // assembly (parallel element loop vs the same loop pinned to one thread)
  const double t_asm = time_best_of(repeats, [&] { (void)assemble(mesh, aniso); });
#ifdef _OPENMP
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
#endif
  const double t_asm_serial =
      time_best_of(repeats, [&] { (void)assemble(mesh, aniso); });
#ifdef _OPENMP
  omp_set_num_threads(saved);
#endif
  std::printf("assemble           parallel %8.2f ms   serial %8.2f ms   x%.2f\n",
              1e3 * t_asm, 1e3 * t_asm_serial, t_asm_serial / t_asm);

  const FemOperator op = assemble(mesh, aniso);
  const std::vector<double> x = standard_normal_field(7, n);
  std::vector<double> y(n);

  const double t_spmv = time_best_of(repeats, [&] {
    for (int k = 0; k < 50; ++k) spmv(op.stiffness, x, y);
  });
  const double t_spmv_serial = time_best_of(repeats, [&] {
    for (int k = 0; k < 50; ++k) spmv_serial(op.stiffness, x, y);
  });
  std::printf("spmv (x50)         parallel %8.2f ms   serial %8.2f ms   x%.2f\n",
              1e3 * t_spmv, 1e3 * t_spmv_serial, t_spmv_serial / t_spmv);

  const SpectralModel model{CovarianceFamily::matern, 1.0, 3.0};
  const ChebyshevApprox fit = chebyshev_fit(
      [&](double v) { return g_of_lambda(model, v); }, op.eig_upper, degree);
  ChebWorkspace ws;
  const double t_apply = time_best_of(
      repeats, [&] { apply_matrix_function(op, fit, x, y, ws); });
#ifdef _OPENMP
  omp_set_num_threads(1);
#endif
  const double t_apply_serial = time_best_of(
      repeats, [&] { apply_matrix_function(op, fit, x, y, ws); });
#ifdef _OPENMP
  omp_set_num_threads(saved);
#endif
  std::printf("covariance apply   parallel %8.2f ms   serial %8.2f ms   x%.2f\n",
              1e3 * t_apply, 1e3 * t_apply_serial, t_apply_serial / t_apply);

  return 0;
}
