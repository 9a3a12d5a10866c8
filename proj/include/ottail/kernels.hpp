#ifndef OTTAIL_KERNELS_HPP
#define OTTAIL_KERNELS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ottail/common.hpp"
#include "ottail/transport.hpp"

// Data-parallel inner loops, OpenMP-parallel by default.  Every kernel has a
// serial reference twin in kernels::serial with identical semantics; the test
// suite asserts exact agreement and tools/bench_kernels compares their speed.
// Parallel variants only use disjoint writes and exact min/max reductions, so
// results do not depend on the thread count.

namespace ot::kernels {

// Evaluates one cycle of support pairs against the reassignment inequality;
// returns the witness when the stay-put cost exceeds the shifted cost by more
// than tol * max(1, largest pair cost in the cycle).
std::optional<CycleViolation> check_cycle(int dim, const std::vector<double>& xs,
                                          const std::vector<double>& ys,
                                          std::span<const std::size_t> idx, double tol);

// Distinct support indices for sampled cycle c: length 2..max_len, drawn
// without replacement.  Pure function of (seed, c).
std::vector<std::size_t> cycle_indices(std::size_t n_pairs, int max_len, std::uint64_t seed,
                                       std::uint64_t c);

// Scans `budget` sampled cycles; returns the smallest violating cycle counter
// or -1 when all sampled cycles pass.
long sampled_cycle_scan(int dim, const std::vector<double>& xs, const std::vector<double>& ys,
                        int max_len, double tol, std::size_t budget, std::uint64_t seed);

// sup over K of the distance to L.
double directed_hausdorff(const PointList& K, const PointList& L);

// max of the two directed distances.
double hausdorff_distance(const PointList& K, const PointList& L);

// mask[p] = 1 iff point p of xs lies within eps of some point of A.
std::vector<char> select_within(const PointList& xs, const PointList& A, double eps);

// Median over selected points of the distance to the nearest other selected
// point; 0 when fewer than two points are selected.
double median_nn_spacing(const PointList& xs, const std::vector<char>& mask);

// Index of the point of xs closest to q (smallest index on ties), -1 if empty.
long nearest_index(const PointList& xs, std::span<const double> q);

namespace serial {

long sampled_cycle_scan(int dim, const std::vector<double>& xs, const std::vector<double>& ys,
                        int max_len, double tol, std::size_t budget, std::uint64_t seed);
double directed_hausdorff(const PointList& K, const PointList& L);
double hausdorff_distance(const PointList& K, const PointList& L);
std::vector<char> select_within(const PointList& xs, const PointList& A, double eps);
double median_nn_spacing(const PointList& xs, const std::vector<char>& mask);

}  // namespace serial

}  // namespace ot::kernels

#endif  // OTTAIL_KERNELS_HPP
