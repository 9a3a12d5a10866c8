// Timings of the OpenMP kernels against their serial reference twins.
// Run with OMP_NUM_THREADS set to taste.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "ottail/kernels.hpp"
#include "ottail/rng.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn, int reps) {
  fn();  // warm-up
  const auto t0 = clock_type::now();
  for (int r = 0; r < reps; ++r) fn();
  const auto t1 = clock_type::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

ot::PointList random_points(std::size_t n, int dim, std::uint64_t seed) {
  ot::CounterRng rng(seed);
  std::vector<double> flat(n * dim);
  for (std::size_t i = 0; i < flat.size(); ++i) flat[i] = rng.uniform(i, -10.0, 10.0);
  return ot::PointList(dim, std::move(flat));
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s serial %9.2f ms   omp %9.2f ms   speedup %.2fx\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());

  {
    const auto K = random_points(4000, 2, 1);
    const auto L = random_points(4000, 2, 2);
    const double s = time_ms([&] { ot::kernels::serial::hausdorff_distance(K, L); }, 3);
    const double p = time_ms([&] { ot::kernels::hausdorff_distance(K, L); }, 3);
    report("hausdorff 4000x4000 d=2", s, p);
  }

  {
    const auto xs = random_points(20000, 2, 3);
    const auto A = random_points(500, 2, 4);
    const double s = time_ms([&] { ot::kernels::serial::select_within(xs, A, 0.5); }, 3);
    const double p = time_ms([&] { ot::kernels::select_within(xs, A, 0.5); }, 3);
    report("select_within 20000x500", s, p);
  }

  {
    const auto xs = random_points(3000, 2, 5);
    std::vector<char> mask(xs.size(), 1);
    const double s = time_ms([&] { ot::kernels::serial::median_nn_spacing(xs, mask); }, 3);
    const double p = time_ms([&] { ot::kernels::median_nn_spacing(xs, mask); }, 3);
    report("nn_spacing 3000 d=2", s, p);
  }

  {
    const std::size_t pairs = 400;
    const auto xs = random_points(pairs, 2, 6);
    const auto ys = random_points(pairs, 2, 7);
    const auto& xf = xs.flat();
    const auto& yf = ys.flat();
    const double s = time_ms(
        [&] { ot::kernels::serial::sampled_cycle_scan(2, xf, yf, 4, 1e-9, 50000, 11); }, 3);
    const double p =
        time_ms([&] { ot::kernels::sampled_cycle_scan(2, xf, yf, 4, 1e-9, 50000, 11); }, 3);
    report("cycle_scan 50000 samples", s, p);
  }

  return 0;
}
