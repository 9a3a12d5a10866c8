#include <doctest.h>
#include <omp.h>

#include "ottail/kernels.hpp"
#include "ottail/rng.hpp"

using namespace ot;

namespace {

PointList random_points(std::size_t n, int dim, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> flat(n * dim);
  for (std::size_t i = 0; i < flat.size(); ++i) flat[i] = rng.uniform(i, -10.0, 10.0);
  return PointList(dim, std::move(flat));
}

}  // namespace

// The parallel kernels must agree with the serial references bit for bit,
// whatever the thread count; they only use disjoint writes and exact min/max
// reductions.
TEST_CASE("parallel kernels match serial references exactly") {
  const auto K = random_points(300, 2, 1);
  const auto L = random_points(220, 2, 2);
  const auto A = random_points(25, 2, 3);
  std::vector<char> full_mask(K.size(), 1);

  const auto xs = random_points(90, 2, 4);
  const auto ys = random_points(90, 2, 5);

  for (int threads : {1, 4}) {
    omp_set_num_threads(threads);

    CHECK(kernels::hausdorff_distance(K, L) == kernels::serial::hausdorff_distance(K, L));
    CHECK(kernels::directed_hausdorff(K, L) == kernels::serial::directed_hausdorff(K, L));
    CHECK(kernels::select_within(K, A, 1.5) == kernels::serial::select_within(K, A, 1.5));
    CHECK(kernels::median_nn_spacing(K, full_mask) ==
          kernels::serial::median_nn_spacing(K, full_mask));
    CHECK(kernels::sampled_cycle_scan(2, xs.flat(), ys.flat(), 4, 1e-9, 4000, 9) ==
          kernels::serial::sampled_cycle_scan(2, xs.flat(), ys.flat(), 4, 1e-9, 4000, 9));
  }
}

TEST_CASE("cycle_indices are valid, distinct and deterministic") {
  for (std::uint64_t c = 0; c < 200; ++c) {
    const auto idx = kernels::cycle_indices(37, 5, 77, c);
    CHECK(idx.size() >= 2);
    CHECK(idx.size() <= 5);
    for (std::size_t a = 0; a < idx.size(); ++a) {
      CHECK(idx[a] < 37);
      for (std::size_t b = a + 1; b < idx.size(); ++b) CHECK(idx[a] != idx[b]);
    }
    CHECK(kernels::cycle_indices(37, 5, 77, c) == idx);
  }
}

TEST_CASE("sampled_cycle_scan returns the smallest violating counter") {
  // anti-monotone pairing in 1D: plenty of violating 2-cycles exist
  const std::size_t n = 30;
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = static_cast<double>(i);
    ys[i] = static_cast<double>(n - 1 - i);
  }
  const long hit_par = kernels::sampled_cycle_scan(1, xs, ys, 4, 1e-9, 2000, 3);
  const long hit_ser = kernels::serial::sampled_cycle_scan(1, xs, ys, 4, 1e-9, 2000, 3);
  CHECK(hit_par == hit_ser);
  REQUIRE(hit_par >= 0);
  const auto idx = kernels::cycle_indices(n, 4, 3, static_cast<std::uint64_t>(hit_par));
  CHECK(kernels::check_cycle(1, xs, ys, idx, 1e-9).has_value());
}

TEST_CASE("nearest_index breaks ties towards the smaller index") {
  const PointList xs(1, {0.0, 2.0, 2.0, 5.0});
  CHECK(kernels::nearest_index(xs, Vec{2.1}) == 1);
  CHECK(kernels::nearest_index(xs, Vec{-3.0}) == 0);
  CHECK(kernels::nearest_index(PointList(1, {}), Vec{0.0}) == -1);
}
