#include "ottail/kernels.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>

#include "ottail/rng.hpp"

namespace ot::kernels {

std::optional<CycleViolation> check_cycle(int dim, const std::vector<double>& xs,
                                          const std::vector<double>& ys,
                                          std::span<const std::size_t> idx, double tol) {
  const std::size_t L = idx.size();
  double lhs = 0.0, rhs = 0.0, scale = 1.0;
  for (std::size_t t = 0; t < L; ++t) {
    const std::size_t a = idx[t], b = idx[(t + 1) % L];
    std::span<const double> x{xs.data() + a * dim, static_cast<std::size_t>(dim)};
    std::span<const double> y{ys.data() + a * dim, static_cast<std::size_t>(dim)};
    std::span<const double> ynext{ys.data() + b * dim, static_cast<std::size_t>(dim)};
    const double stay = dist2(x, y), move = dist2(x, ynext);
    lhs += stay;
    rhs += move;
    scale = std::max({scale, stay, move});
  }
  if (lhs > rhs + tol * scale) {
    CycleViolation v;
    v.lhs_cost = lhs;
    v.rhs_cost = rhs;
    for (std::size_t t = 0; t < L; ++t) {
      const std::size_t a = idx[t];
      v.cycle.emplace_back(Vec(xs.begin() + a * dim, xs.begin() + (a + 1) * dim),
                           Vec(ys.begin() + a * dim, ys.begin() + (a + 1) * dim));
    }
    return v;
  }
  return std::nullopt;
}

std::vector<std::size_t> cycle_indices(std::size_t n_pairs, int max_len, std::uint64_t seed,
                                       std::uint64_t c) {
  CounterRng rng(seed, 0x6cb1f5a2d94e03c7ULL);
  const std::uint64_t base = c * (static_cast<std::uint64_t>(max_len) + 1);
  const int len = 2 + static_cast<int>(rng.below(base, static_cast<std::uint64_t>(max_len - 1)));

  // Without-replacement draw via a virtual Fisher-Yates: remember displaced
  // slots in a tiny list (len is small).
  std::vector<std::size_t> out;
  std::vector<std::pair<std::size_t, std::size_t>> moved;  // slot -> value
  out.reserve(len);
  for (int k = 0; k < len; ++k) {
    const std::size_t limit = n_pairs - static_cast<std::size_t>(k);
    std::size_t r = rng.below(base + 1 + k, limit);
    auto lookup = [&](std::size_t slot) {
      for (const auto& [s, v] : moved)
        if (s == slot) return v;
      return slot;
    };
    const std::size_t value = lookup(r);
    const std::size_t last = lookup(limit - 1);
    bool replaced = false;
    for (auto& [s, v] : moved) {
      if (s == r) {
        v = last;
        replaced = true;
        break;
      }
    }
    if (!replaced) moved.emplace_back(r, last);
    out.push_back(value);
  }
  return out;
}

long sampled_cycle_scan(int dim, const std::vector<double>& xs, const std::vector<double>& ys,
                        int max_len, double tol, std::size_t budget, std::uint64_t seed) {
  const std::size_t S = xs.size() / dim;
  long best = LONG_MAX;
#pragma omp parallel for schedule(static) reduction(min : best)
  for (long c = 0; c < static_cast<long>(budget); ++c) {
    const auto idx = cycle_indices(S, max_len, seed, static_cast<std::uint64_t>(c));
    if (check_cycle(dim, xs, ys, idx, tol)) best = std::min(best, c);
  }
  return best == LONG_MAX ? -1 : best;
}

double directed_hausdorff(const PointList& K, const PointList& L) {
  if (K.empty() || L.empty())
    throw std::invalid_argument("hausdorff: empty point set");
  double worst = 0.0;
  const long nk = static_cast<long>(K.size());
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (long i = 0; i < nk; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < L.size(); ++j)
      best = std::min(best, dist2(K[static_cast<std::size_t>(i)], L[j]));
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

double hausdorff_distance(const PointList& K, const PointList& L) {
  return std::max(directed_hausdorff(K, L), directed_hausdorff(L, K));
}

std::vector<char> select_within(const PointList& xs, const PointList& A, double eps) {
  std::vector<char> mask(xs.size(), 0);
  const double e2 = eps * eps;
  const long n = static_cast<long>(xs.size());
#pragma omp parallel for schedule(static)
  for (long p = 0; p < n; ++p) {
    for (std::size_t a = 0; a < A.size(); ++a) {
      if (dist2(xs[static_cast<std::size_t>(p)], A[a]) <= e2) {
        mask[static_cast<std::size_t>(p)] = 1;
        break;
      }
    }
  }
  return mask;
}

double median_nn_spacing(const PointList& xs, const std::vector<char>& mask) {
  std::vector<std::size_t> sel;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (mask[i]) sel.push_back(i);
  if (sel.size() < 2) return 0.0;

  std::vector<double> nn(sel.size());
  const long ns = static_cast<long>(sel.size());
#pragma omp parallel for schedule(static)
  for (long a = 0; a < ns; ++a) {
    double best = std::numeric_limits<double>::infinity();
    for (long b = 0; b < ns; ++b) {
      if (a == b) continue;
      best = std::min(best, dist2(xs[sel[static_cast<std::size_t>(a)]],
                                  xs[sel[static_cast<std::size_t>(b)]]));
    }
    nn[static_cast<std::size_t>(a)] = std::sqrt(best);
  }
  std::sort(nn.begin(), nn.end());
  const std::size_t h = nn.size() / 2;
  return nn.size() % 2 == 1 ? nn[h] : 0.5 * (nn[h - 1] + nn[h]);
}

long nearest_index(const PointList& xs, std::span<const double> q) {
  long best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = dist2(xs[i], q);
    if (d < best_d) {
      best_d = d;
      best = static_cast<long>(i);
    }
  }
  return best;
}

namespace serial {

long sampled_cycle_scan(int dim, const std::vector<double>& xs, const std::vector<double>& ys,
                        int max_len, double tol, std::size_t budget, std::uint64_t seed) {
  const std::size_t S = xs.size() / dim;
  for (std::size_t c = 0; c < budget; ++c) {
    const auto idx = cycle_indices(S, max_len, seed, c);
    if (check_cycle(dim, xs, ys, idx, tol)) return static_cast<long>(c);
  }
  return -1;
}

double directed_hausdorff(const PointList& K, const PointList& L) {
  if (K.empty() || L.empty())
    throw std::invalid_argument("hausdorff: empty point set");
  double worst = 0.0;
  for (std::size_t i = 0; i < K.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < L.size(); ++j) best = std::min(best, dist2(K[i], L[j]));
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

double hausdorff_distance(const PointList& K, const PointList& L) {
  return std::max(serial::directed_hausdorff(K, L), serial::directed_hausdorff(L, K));
}

std::vector<char> select_within(const PointList& xs, const PointList& A, double eps) {
  std::vector<char> mask(xs.size(), 0);
  const double e2 = eps * eps;
  for (std::size_t p = 0; p < xs.size(); ++p) {
    for (std::size_t a = 0; a < A.size(); ++a) {
      if (dist2(xs[p], A[a]) <= e2) {
        mask[p] = 1;
        break;
      }
    }
  }
  return mask;
}

double median_nn_spacing(const PointList& xs, const std::vector<char>& mask) {
  std::vector<std::size_t> sel;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (mask[i]) sel.push_back(i);
  if (sel.size() < 2) return 0.0;

  std::vector<double> nn(sel.size());
  for (std::size_t a = 0; a < sel.size(); ++a) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < sel.size(); ++b) {
      if (a == b) continue;
      best = std::min(best, dist2(xs[sel[a]], xs[sel[b]]));
    }
    nn[a] = std::sqrt(best);
  }
  std::sort(nn.begin(), nn.end());
  const std::size_t h = nn.size() / 2;
  return nn.size() % 2 == 1 ? nn[h] : 0.5 * (nn[h - 1] + nn[h]);
}

}  // namespace serial

}  // namespace ot::kernels
