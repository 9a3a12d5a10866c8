#include "ottail/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ottail/kernels.hpp"

namespace ot {

PolyhedralPotential::PolyhedralPotential(int dim, std::vector<double> slopes_flat,
                                         std::vector<double> offsets)
    : dim_(dim), slopes_(std::move(slopes_flat)), offsets_(std::move(offsets)) {
  if (dim_ <= 0) throw std::invalid_argument("PolyhedralPotential: dimension must be positive");
  if (offsets_.empty())
    throw std::invalid_argument("PolyhedralPotential: at least one affine piece required");
  if (slopes_.size() != offsets_.size() * static_cast<std::size_t>(dim_))
    throw std::invalid_argument("PolyhedralPotential: slopes/offsets length mismatch");
  dominated_.assign(offsets_.size(), 0);
}

double PolyhedralPotential::value(std::span<const double> x) const {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < pieces(); ++j)
    best = std::max(best, dot(x, slope(j)) - offsets_[j]);
  return best;
}

std::vector<std::size_t> PolyhedralPotential::active_set(std::span<const double> x,
                                                         double tol) const {
  const double v = value(x);
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < pieces(); ++j)
    if (dot(x, slope(j)) - offsets_[j] >= v - tol) out.push_back(j);
  return out;
}

void PolyhedralPotential::flag_dominated(const PointList& probe_grid) {
  std::vector<char> active(pieces(), 0);
  for (std::size_t p = 0; p < probe_grid.size(); ++p)
    for (std::size_t j : active_set(probe_grid[p], 0.0)) active[j] = 1;
  for (std::size_t j = 0; j < pieces(); ++j) dominated_[j] = active[j] ? 0 : 1;
}

MultiMapGraph::MultiMapGraph(int dim, std::vector<double> xs_flat, std::vector<double> ys_flat,
                             Role role)
    : dim_(dim), xs_(std::move(xs_flat)), ys_(std::move(ys_flat)), role_(role) {
  if (dim_ <= 0) throw std::invalid_argument("MultiMapGraph: dimension must be positive");
  if (xs_.size() != ys_.size() || xs_.size() % dim_ != 0)
    throw std::invalid_argument("MultiMapGraph: malformed pair arrays");
  // Drop exact duplicate pairs, preserving first occurrences.
  const std::size_t n = xs_.size() / dim_;
  std::vector<double> xs2, ys2;
  xs2.reserve(xs_.size());
  ys2.reserve(ys_.size());
  for (std::size_t p = 0; p < n; ++p) {
    bool dup = false;
    for (std::size_t q = 0; q < xs2.size() / dim_ && !dup; ++q) {
      dup = std::equal(xs_.begin() + p * dim_, xs_.begin() + (p + 1) * dim_,
                       xs2.begin() + q * dim_) &&
            std::equal(ys_.begin() + p * dim_, ys_.begin() + (p + 1) * dim_,
                       ys2.begin() + q * dim_);
    }
    if (!dup) {
      xs2.insert(xs2.end(), xs_.begin() + p * dim_, xs_.begin() + (p + 1) * dim_);
      ys2.insert(ys2.end(), ys_.begin() + p * dim_, ys_.begin() + (p + 1) * dim_);
    }
  }
  xs_ = std::move(xs2);
  ys_ = std::move(ys2);
}

PolyhedralPotential potential_from_duals(const std::vector<Vec>& slopes,
                                         const std::vector<double>& offsets) {
  if (slopes.empty() || slopes.size() != offsets.size())
    throw std::invalid_argument("potential_from_duals: empty or mismatched input");
  const int d = static_cast<int>(slopes.front().size());

  // Duplicate slopes: keep the lower offset, the max is unchanged.
  std::vector<double> flat;
  std::vector<double> offs;
  for (std::size_t j = 0; j < slopes.size(); ++j) {
    if (static_cast<int>(slopes[j].size()) != d)
      throw std::invalid_argument("potential_from_duals: inconsistent dimensions");
    bool merged = false;
    for (std::size_t q = 0; q < offs.size() && !merged; ++q) {
      if (std::equal(slopes[j].begin(), slopes[j].end(), flat.begin() + q * d)) {
        offs[q] = std::min(offs[q], offsets[j]);
        merged = true;
      }
    }
    if (!merged) {
      flat.insert(flat.end(), slopes[j].begin(), slopes[j].end());
      offs.push_back(offsets[j]);
    }
  }
  return PolyhedralPotential(d, std::move(flat), std::move(offs));
}

PolyhedralPotential potential_from_graph(const MultiMapGraph& graph, std::size_t base_index) {
  if (graph.role() != MultiMapGraph::Role::SubdifferentialSample)
    throw std::invalid_argument("potential_from_graph: graph must be a subdifferential sample");
  const std::size_t n = graph.size();
  if (n == 0) throw std::invalid_argument("potential_from_graph: empty graph");
  if (base_index >= n) throw std::invalid_argument("potential_from_graph: base index out of range");
  const int d = graph.dim();

  // Longest chain value out of the base pair, arc weight <y_i, x_j - x_i>.
  // Cyclic monotonicity is exactly the absence of positive cycles.
  auto weight = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (int c = 0; c < d; ++c) s += graph.y(i)[c] * (graph.x(j)[c] - graph.x(i)[c]);
    return s;
  };

  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    scale = std::max(scale, std::max(norm(graph.x(i)), norm(graph.y(i))));
  const double eps = 1e-12 * scale * scale;

  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, ninf);
  std::vector<long> pred(n, -1);
  dist[base_index] = 0.0;
  for (std::size_t round = 0; round + 1 < n; ++round) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (dist[i] == ninf) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double cand = dist[i] + weight(i, j);
        if (cand > dist[j] + eps) {
          dist[j] = cand;
          pred[j] = static_cast<long>(i);
          changed = true;
        }
      }
    }
    if (!changed) break;
  }

  // Audit round: a remaining improvement beyond the accumulated relaxation
  // slack witnesses a positive cycle.  Walk predecessors from the improved
  // node; the first repeated index closes the cycle.
  const double audit_eps = static_cast<double>(n + 1) * eps;
  for (std::size_t i = 0; i < n; ++i) {
    if (dist[i] == ninf) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (dist[i] + weight(i, j) > dist[j] + audit_eps) {
        pred[j] = static_cast<long>(i);
        std::vector<long> walk;
        std::vector<char> seen(n, 0);
        long cur = static_cast<long>(j);
        while (cur >= 0 && !seen[cur]) {
          seen[cur] = 1;
          walk.push_back(cur);
          cur = pred[cur];
        }
        std::vector<std::size_t> cycle;
        if (cur >= 0) {
          auto it = std::find(walk.begin(), walk.end(), cur);
          for (auto w = it; w != walk.end(); ++w) cycle.push_back(static_cast<std::size_t>(*w));
          std::reverse(cycle.begin(), cycle.end());
        } else {
          cycle.assign({i, j});
        }
        throw PositiveCycleError("potential_from_graph: input is not cyclically monotone",
                                 std::move(cycle));
      }
    }
  }

  // Unreachable nodes cannot occur on a complete digraph with n >= 2.
  std::vector<double> slopes_flat(graph.ys_flat());
  std::vector<double> offsets(n);
  for (std::size_t k = 0; k < n; ++k) offsets[k] = dot(graph.y(k), graph.x(k)) - dist[k];

  PolyhedralPotential psi(d, std::move(slopes_flat), std::move(offsets));
  psi.flag_dominated(probe_grid(graph));
  return psi;
}

std::vector<Vec> subdiff_eval(const PolyhedralPotential& psi, std::span<const double> x,
                              double tol) {
  if (tol < 0.0) throw std::invalid_argument("subdiff_eval: tol must be nonnegative");
  std::vector<Vec> out;
  for (std::size_t j : psi.active_set(x, tol)) {
    Vec s(psi.slope(j).begin(), psi.slope(j).end());
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
  }
  return out;
}

PolyhedralPotential scale_potential(const PolyhedralPotential& psi, double b1, double b2) {
  if (!(b1 > 0.0) || !(b2 > 0.0))
    throw std::invalid_argument("scale_potential: scale factors must be positive");
  std::vector<double> slopes(psi.slopes_flat());
  for (double& v : slopes) v /= b2;
  std::vector<double> offsets(psi.offsets());
  const double b12 = b1 * b2;
  for (double& v : offsets) v /= b12;
  return PolyhedralPotential(psi.dim(), std::move(slopes), std::move(offsets));
}

MultiMapGraph scale_graph(const MultiMapGraph& graph, double b1, double b2) {
  if (!(b1 > 0.0) || !(b2 > 0.0))
    throw std::invalid_argument("scale_graph: scale factors must be positive");
  std::vector<double> xs(graph.xs_flat()), ys(graph.ys_flat());
  for (double& v : xs) v /= b1;
  for (double& v : ys) v /= b2;
  return MultiMapGraph(graph.dim(), std::move(xs), std::move(ys), graph.role());
}

double hausdorff_distance(const PointList& K, const PointList& L) {
  return kernels::hausdorff_distance(K, L);
}

PointList image_of_set(const MultiMapGraph& graph, const PointList& A, double eps) {
  if (graph.empty()) throw std::invalid_argument("image_of_set: empty graph");
  if (eps < 0.0) throw std::invalid_argument("image_of_set: eps must be nonnegative");
  const auto mask = kernels::select_within(graph.abscissae(), A, eps);
  const int d = graph.dim();
  std::vector<double> ys;
  for (std::size_t p = 0; p < graph.size(); ++p) {
    if (!mask[p]) continue;
    auto y = graph.y(p);
    bool dup = false;
    for (std::size_t q = 0; q < ys.size() / d && !dup; ++q)
      dup = std::equal(y.begin(), y.end(), ys.begin() + q * d);
    if (!dup) ys.insert(ys.end(), y.begin(), y.end());
  }
  return PointList(d, std::move(ys));
}

namespace {

// Ordinates of `from` at exactly {a} must sit within eps of some ordinate of
// `over` whose abscissa is within eps of a.
std::optional<InclusionWitness> covered_at(const MultiMapGraph& from, const MultiMapGraph& over,
                                           std::span<const double> a, double eps,
                                           bool limit_side) {
  const double e2 = eps * eps;
  for (std::size_t p = 0; p < from.size(); ++p) {
    if (dist2(from.x(p), a) > 0.0) continue;
    bool ok = false;
    for (std::size_t q = 0; q < over.size() && !ok; ++q) {
      if (dist2(over.x(q), a) <= e2 && dist2(over.y(q), from.y(p)) <= e2) ok = true;
    }
    if (!ok) {
      InclusionWitness w;
      w.at.assign(a.begin(), a.end());
      w.uncovered.assign(from.y(p).begin(), from.y(p).end());
      w.limit_side = limit_side;
      return w;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<InclusionWitness> inclusion_check(const MultiMapGraph& limit_graph,
                                                const MultiMapGraph& approx_graph,
                                                const PointList& K, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("inclusion_check: eps must be positive");
  for (std::size_t a = 0; a < K.size(); ++a) {
    if (auto w = covered_at(limit_graph, approx_graph, K[a], eps, true)) return w;
    if (auto w = covered_at(approx_graph, limit_graph, K[a], eps, false)) return w;
  }
  return std::nullopt;
}

ConvergenceDiagnostic graphical_convergence_diagnostic(const std::vector<MultiMapGraph>& graphs,
                                                       const MultiMapGraph& limit,
                                                       const PointList& K,
                                                       const std::vector<double>& eps_grid) {
  if (graphs.empty()) throw std::invalid_argument("diagnostic: no graphs");
  if (eps_grid.empty()) throw std::invalid_argument("diagnostic: empty eps grid");
  for (std::size_t e = 1; e < eps_grid.size(); ++e)
    if (!(eps_grid[e] < eps_grid[e - 1]) || !(eps_grid[e] > 0.0))
      throw std::invalid_argument("diagnostic: eps grid must be positive and decreasing");

  ConvergenceDiagnostic out;
  const PointList limit_image = image_of_set(limit, K, 0.0);
  if (limit_image.empty()) throw std::invalid_argument("diagnostic: limit image of K is empty");

  // Interior-domain proxy: how well the limit abscissae cover K.
  out.coverage_h = kernels::directed_hausdorff(K, limit.abscissae());

  const std::size_t ng = graphs.size(), ne = eps_grid.size();
  out.cells.assign(ng * ne, {});
  const long cells = static_cast<long>(ng * ne);
#pragma omp parallel for schedule(dynamic)
  for (long c = 0; c < cells; ++c) {
    const std::size_t gi = static_cast<std::size_t>(c) / ne;
    const std::size_t ei = static_cast<std::size_t>(c) % ne;
    DiagnosticCell cell;
    cell.graph_index = gi;
    cell.eps = eps_grid[ei];
    const PointList img = image_of_set(graphs[gi], K, cell.eps);
    if (img.empty()) {
      cell.empty_image = true;
      cell.hausdorff = std::numeric_limits<double>::quiet_NaN();
      cell.inclusion_pass = false;
    } else {
      cell.empty_image = false;
      cell.hausdorff = kernels::hausdorff_distance(img, limit_image);
      cell.inclusion_pass = !inclusion_check(limit, graphs[gi], K, cell.eps).has_value();
    }
    out.cells[static_cast<std::size_t>(c)] = cell;
  }

  out.pass_eps.assign(ng, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t gi = 0; gi < ng; ++gi) {
    for (std::size_t ei = 0; ei < ne; ++ei) {
      const auto& cell = out.cells[gi * ne + ei];
      if (cell.inclusion_pass) out.pass_eps[gi] = cell.eps;  // grid is decreasing
    }
  }

  out.monotone_in_n = true;
  for (std::size_t ei = 0; ei < ne; ++ei) {
    for (std::size_t gi = 1; gi < ng; ++gi) {
      const double prev = out.cells[(gi - 1) * ne + ei].hausdorff;
      const double cur = out.cells[gi * ne + ei].hausdorff;
      if (std::isnan(prev) || std::isnan(cur) || cur > prev) {
        out.monotone_in_n = false;
        break;
      }
    }
    if (!out.monotone_in_n) break;
  }
  return out;
}

PointList probe_grid(const MultiMapGraph& graph, int points_per_axis) {
  if (graph.empty()) throw std::invalid_argument("probe_grid: empty graph");
  const int d = graph.dim();
  Vec lo(d, std::numeric_limits<double>::infinity());
  Vec hi(d, -std::numeric_limits<double>::infinity());
  for (std::size_t p = 0; p < graph.size(); ++p) {
    for (int c = 0; c < d; ++c) {
      lo[c] = std::min(lo[c], graph.x(p)[c]);
      hi[c] = std::max(hi[c], graph.x(p)[c]);
    }
  }
  for (int c = 0; c < d; ++c) {
    const double w = hi[c] - lo[c];
    const double pad = 0.1 * (w > 0.0 ? w : std::max(1.0, std::abs(lo[c])));
    lo[c] -= pad;
    hi[c] += pad;
  }

  std::size_t total = 1;
  for (int c = 0; c < d; ++c) total *= static_cast<std::size_t>(points_per_axis);
  std::vector<double> flat;
  flat.reserve(total * d);
  for (std::size_t p = 0; p < total; ++p) {
    std::size_t rem = p;
    for (int c = 0; c < d; ++c) {
      const std::size_t k = rem % points_per_axis;
      rem /= points_per_axis;
      flat.push_back(lo[c] + (hi[c] - lo[c]) * static_cast<double>(k) /
                                 static_cast<double>(points_per_axis - 1));
    }
  }
  return PointList(d, std::move(flat));
}

}  // namespace ot
