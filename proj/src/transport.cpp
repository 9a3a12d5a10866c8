#include "ottail/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ottail/kernels.hpp"
#include "ottail/rng.hpp"

namespace ot {

Coupling::Coupling(DiscreteMeasure left, DiscreteMeasure right, std::vector<Pair> pairs)
    : left_(std::move(left)), right_(std::move(right)), pairs_(std::move(pairs)) {
  if (left_.dim() != right_.dim())
    throw std::invalid_argument("Coupling: marginal dimensions differ");
  for (const auto& p : pairs_) {
    if (p.i >= left_.size() || p.j >= right_.size())
      throw std::invalid_argument("Coupling: pair index out of range");
    if (!(p.mass > 0.0)) throw std::invalid_argument("Coupling: pair mass must be positive");
  }
}

double Coupling::total_mass() const {
  double s = 0.0;
  for (const auto& p : pairs_) s += p.mass;
  return s;
}

void Coupling::check_invariants() const {
  const double tol = 1e-9 * std::max(total_mass(), 1e-300);
  std::vector<double> row(left_.size(), 0.0), col(right_.size(), 0.0);
  for (const auto& p : pairs_) {
    row[p.i] += p.mass;
    col[p.j] += p.mass;
  }
  for (std::size_t i = 0; i < left_.size(); ++i)
    if (std::abs(row[i] - left_.mass(i)) > tol)
      throw std::invalid_argument("Coupling: left marginal mismatch");
  for (std::size_t j = 0; j < right_.size(); ++j)
    if (std::abs(col[j] - right_.mass(j)) > tol)
      throw std::invalid_argument("Coupling: right marginal mismatch");
}

namespace {

double cost(const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::size_t i,
            std::size_t j) {
  return dist2(mu.point(i), nu.point(j));
}

// Transportation network simplex on the complete bipartite graph.  The basis
// is a spanning tree over m + n nodes (sources 0..m-1, targets m..m+n-1);
// arc costs are evaluated on demand, never stored.
//
// Entering arc: most negative reduced cost within a round-robin block scan,
// first hit on ties; after a run of degenerate pivots the rule drops to
// Bland's first-negative-index scan until flow moves again, which rules out
// cycling.  Leaving arc: minimum residual on the pivot cycle, smallest arc id
// on ties.  All scans are index-ordered, so the output is deterministic.
class NetworkSimplex {
 public:
  NetworkSimplex(const DiscreteMeasure& mu, const DiscreteMeasure& nu)
      : mu_(mu), nu_(nu), m_(mu.size()), n_(nu.size()), nn_(m_ + n_) {
    double rmax_mu = 0.0, rmax_nu = 0.0;
    for (std::size_t i = 0; i < m_; ++i) rmax_mu = std::max(rmax_mu, mu_.radius(i));
    for (std::size_t j = 0; j < n_; ++j) rmax_nu = std::max(rmax_nu, nu_.radius(j));
    const double diam = rmax_mu + rmax_nu;
    cost_scale_ = std::max(1.0, diam * diam);
    mass_scale_ = std::max(mu_.total_mass(), 1e-300);
    eps_enter_ = 1e-13 * cost_scale_;
  }

  std::vector<Coupling::Pair> run() {
    build_initial_basis();

    const std::size_t total_arcs = m_ * n_;
    const std::size_t block =
        std::max<std::size_t>(256, static_cast<std::size_t>(std::sqrt(double(total_arcs))));
    std::size_t scan_from = 0;
    std::size_t stall = 0;
    bool bland = false;
    const std::size_t stall_limit = nn_ + 16;
    const std::size_t pivot_cap = 2'000'000;

    for (std::size_t pivots = 0;; ++pivots) {
      if (pivots > pivot_cap) throw SolverAuditError("network simplex: pivot cap exceeded");

      const long entering = bland ? find_entering_bland() : find_entering_block(scan_from, block);
      if (entering < 0) break;  // priced out: optimal

      const bool degenerate = pivot(static_cast<std::size_t>(entering));
      scan_from = static_cast<std::size_t>(entering) + 1;
      if (scan_from >= total_arcs) scan_from = 0;

      if (degenerate) {
        if (++stall > stall_limit) bland = true;
      } else {
        stall = 0;
        bland = false;
      }
    }

    audit();
    return extract();
  }

 private:
  void build_initial_basis() {
    supply_.assign(mu_.masses().begin(), mu_.masses().end());
    demand_.assign(nu_.masses().begin(), nu_.masses().end());
    // Force exact balance; the caller has already gated the relative error.
    double sa = 0.0, sb = 0.0;
    for (double v : supply_) sa += v;
    for (double v : demand_) sb += v;
    demand_[n_ - 1] += sa - sb;

    parent_.assign(nn_, -1);
    flow_up_.assign(nn_, 0.0);
    pot_.assign(nn_, 0.0);
    depth_.assign(nn_, 0);
    adj_.assign(nn_, {});

    // Northwest corner over the canonical atom orders: m + n - 1 basic arcs.
    std::vector<std::pair<std::pair<std::size_t, std::size_t>, double>> arcs;
    arcs.reserve(nn_ - 1);
    std::size_t i = 0, j = 0;
    double ra = supply_[0], rb = demand_[0];
    while (true) {
      const double f = std::min(ra, rb);
      arcs.push_back({{i, j}, f});
      ra -= f;
      rb -= f;
      if (i == m_ - 1 && j == n_ - 1) break;
      if (ra <= 0.0 && i < m_ - 1) {
        ++i;
        ra = supply_[i];
      } else {
        ++j;
        rb = demand_[j];
      }
    }

    for (const auto& [ij, f] : arcs) {
      (void)f;
      const int u = static_cast<int>(ij.first), v = static_cast<int>(m_ + ij.second);
      adj_[u].push_back(v);
      adj_[v].push_back(u);
    }

    // Root at node 0; potentials satisfy u_i + v_j = c_ij on tree arcs.
    std::vector<int> stack{0};
    std::vector<char> seen(nn_, 0);
    seen[0] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : adj_[v]) {
        if (seen[w]) continue;
        seen[w] = 1;
        parent_[w] = v;
        depth_[w] = depth_[v] + 1;
        pot_[w] = arc_cost(v, w) - pot_[v];
        stack.push_back(w);
      }
    }
    for (const auto& [ij, f] : arcs) {
      const int u = static_cast<int>(ij.first), v = static_cast<int>(m_ + ij.second);
      if (parent_[v] == u)
        flow_up_[v] = f;
      else
        flow_up_[u] = f;
    }
  }

  double arc_cost(int a, int b) const {
    const std::size_t i = static_cast<std::size_t>(std::min(a, b));
    const std::size_t j = static_cast<std::size_t>(std::max(a, b)) - m_;
    return cost(mu_, nu_, i, j);
  }

  double reduced_cost(std::size_t arc) const {
    const std::size_t i = arc / n_, j = arc % n_;
    return cost(mu_, nu_, i, j) - pot_[i] - pot_[m_ + j];
  }

  long find_entering_block(std::size_t from, std::size_t block) const {
    const std::size_t total = m_ * n_;
    std::size_t scanned = 0, pos = from;
    long best = -1;
    double best_rc = -eps_enter_;
    while (scanned < total) {
      const std::size_t chunk = std::min(block, total - scanned);
      for (std::size_t s = 0; s < chunk; ++s) {
        const double rc = reduced_cost(pos);
        if (rc < best_rc) {
          best_rc = rc;
          best = static_cast<long>(pos);
        }
        if (++pos == total) pos = 0;
      }
      scanned += chunk;
      if (best >= 0) return best;
    }
    return -1;
  }

  long find_entering_bland() const {
    const std::size_t total = m_ * n_;
    for (std::size_t a = 0; a < total; ++a)
      if (reduced_cost(a) < -eps_enter_) return static_cast<long>(a);
    return -1;
  }

  // Cycle orientation on the bipartite tree.  The entering arc ei -> ej is
  // traversed source to target and gains theta.  On the chain from ej up to
  // the apex, a tree arc (child, parent) is traversed child -> parent, so its
  // flow decreases exactly when the child is a target node.  On the chain
  // from the apex down to ei the traversal is parent -> child, so the flow
  // decreases exactly when the child is a source node.
  bool pivot(std::size_t arc) {
    const std::size_t ei = arc / n_, ej = arc % n_;
    const int u = static_cast<int>(ei), v = static_cast<int>(m_ + ej);

    int a = u, b = v;
    chain_u_.assign(1, u);
    chain_v_.assign(1, v);
    while (depth_[a] > depth_[b]) {
      a = parent_[a];
      chain_u_.push_back(a);
    }
    while (depth_[b] > depth_[a]) {
      b = parent_[b];
      chain_v_.push_back(b);
    }
    while (a != b) {
      a = parent_[a];
      chain_u_.push_back(a);
      b = parent_[b];
      chain_v_.push_back(b);
    }

    double theta = std::numeric_limits<double>::infinity();
    int leave_child = -1;
    std::size_t leave_id = 0;
    auto consider_leaving = [&](int child) {
      const double f = flow_up_[child];
      const std::size_t id = tree_arc_id(child);
      if (f < theta || (f == theta && (leave_child < 0 || id < leave_id))) {
        theta = f;
        leave_child = child;
        leave_id = id;
      }
    };
    for (std::size_t t = 0; t + 1 < chain_v_.size(); ++t)
      if (chain_v_[t] >= static_cast<int>(m_)) consider_leaving(chain_v_[t]);
    for (std::size_t t = 0; t + 1 < chain_u_.size(); ++t)
      if (chain_u_[t] < static_cast<int>(m_)) consider_leaving(chain_u_[t]);
    if (leave_child < 0) throw SolverAuditError("network simplex: no leaving arc on cycle");

    for (std::size_t t = 0; t + 1 < chain_v_.size(); ++t) {
      const int child = chain_v_[t];
      flow_up_[child] += (child >= static_cast<int>(m_)) ? -theta : theta;
    }
    for (std::size_t t = 0; t + 1 < chain_u_.size(); ++t) {
      const int child = chain_u_[t];
      flow_up_[child] += (child < static_cast<int>(m_)) ? -theta : theta;
    }

    rewire(leave_child, u, v, theta);
    return theta <= 0.0;
  }

  std::size_t tree_arc_id(int child) const {
    const int p = parent_[child];
    const std::size_t i = static_cast<std::size_t>(std::min(child, p));
    const std::size_t j = static_cast<std::size_t>(std::max(child, p)) - m_;
    return i * n_ + j;
  }

  // Remove the tree arc above leave_child and attach the entering arc (u, v):
  // re-root the detached subtree at the entering endpoint inside it, then
  // refresh its potentials and depths.
  void rewire(int leave_child, int u, int v, double theta) {
    const int leave_parent = parent_[leave_child];
    drop_adj(leave_child, leave_parent);
    drop_adj(leave_parent, leave_child);

    in_sub_.assign(nn_, 0);
    sub_.assign(1, leave_child);
    in_sub_[leave_child] = 1;
    for (std::size_t t = 0; t < sub_.size(); ++t) {
      for (int w : adj_[sub_[t]]) {
        if (!in_sub_[w]) {
          in_sub_[w] = 1;
          sub_.push_back(w);
        }
      }
    }

    const int e_in = in_sub_[u] ? u : v;
    const int e_out = in_sub_[u] ? v : u;

    path_.clear();
    for (int x = e_in;; x = parent_[x]) {
      path_.push_back(x);
      if (x == leave_child) break;
    }
    for (std::size_t t = path_.size(); t-- > 1;) {
      const int hi = path_[t], lo = path_[t - 1];  // hi was the parent of lo
      parent_[hi] = lo;
      flow_up_[hi] = flow_up_[lo];
    }
    parent_[e_in] = e_out;
    flow_up_[e_in] = theta;
    adj_[u].push_back(v);
    adj_[v].push_back(u);

    pot_[e_in] = arc_cost(e_in, e_out) - pot_[e_out];
    depth_[e_in] = depth_[e_out] + 1;
    std::vector<int> stack{e_in};
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (int w : adj_[x]) {
        if (in_sub_[w] && parent_[w] == x) {
          pot_[w] = arc_cost(x, w) - pot_[x];
          depth_[w] = depth_[x] + 1;
          stack.push_back(w);
        }
      }
    }
  }

  void drop_adj(int a, int b) {
    auto& lst = adj_[a];
    lst.erase(std::find(lst.begin(), lst.end(), b));
  }

  void audit() const {
    const double tol = 1e-9 * cost_scale_;
    for (std::size_t a = 0; a < m_ * n_; ++a)
      if (reduced_cost(a) < -tol)
        throw SolverAuditError("network simplex audit: dual feasibility violated");
    for (std::size_t w = 1; w < nn_; ++w) {
      if (flow_up_[w] < -1e-12 * mass_scale_)
        throw SolverAuditError("network simplex audit: negative flow");
      if (flow_up_[w] > 0.0 && std::abs(reduced_cost(tree_arc_id(static_cast<int>(w)))) > tol)
        throw SolverAuditError("network simplex audit: slackness violated on support");
    }
  }

  std::vector<Coupling::Pair> extract() const {
    std::vector<Coupling::Pair> out;
    out.reserve(nn_ - 1);
    for (std::size_t w = 1; w < nn_; ++w) {
      const double f = flow_up_[w];
      if (f > 0.0) {
        const int p = parent_[w];
        const std::size_t i = static_cast<std::size_t>(std::min<int>(static_cast<int>(w), p));
        const std::size_t j = static_cast<std::size_t>(std::max<int>(static_cast<int>(w), p)) - m_;
        out.push_back({i, j, f});
      }
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
    return out;
  }

  const DiscreteMeasure& mu_;
  const DiscreteMeasure& nu_;
  std::size_t m_, n_, nn_;
  double cost_scale_ = 1.0, mass_scale_ = 1.0, eps_enter_ = 1e-13;

  std::vector<double> supply_, demand_;
  std::vector<int> parent_;
  std::vector<double> flow_up_;  // flow on the arc (node, parent)
  std::vector<double> pot_;
  std::vector<int> depth_;
  std::vector<std::vector<int>> adj_;

  // pivot scratch
  std::vector<int> chain_u_, chain_v_, sub_, path_;
  std::vector<char> in_sub_;
};

}  // namespace

Coupling solve_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.empty() || nu.empty()) throw std::invalid_argument("solve_exact: empty measure");
  if (mu.dim() != nu.dim()) throw std::invalid_argument("solve_exact: dimension mismatch");
  const double ma = mu.total_mass(), mb = nu.total_mass();
  if (std::abs(ma - mb) > 1e-12 * std::max(ma, mb))
    throw std::invalid_argument("solve_exact: unbalanced masses (" + std::to_string(ma) +
                                " vs " + std::to_string(mb) + ")");
  NetworkSimplex solver(mu, nu);
  Coupling pi(mu, nu, solver.run());
  pi.check_invariants();
  return pi;
}

Coupling brute_force_assignment(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const std::size_t n = mu.size();
  if (n != nu.size() || n == 0)
    throw std::invalid_argument("brute_force_assignment: sizes must match");
  if (n > 9) throw std::invalid_argument("brute_force_assignment: size limit is 9");
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(mu.mass(i) - mu.mass(0)) > 1e-12 * mu.mass(0) ||
        std::abs(nu.mass(i) - mu.mass(0)) > 1e-12 * mu.mass(0))
      throw std::invalid_argument("brute_force_assignment: masses must be uniform");
  }

  std::vector<std::size_t> perm(n), best(n);
  std::iota(perm.begin(), perm.end(), 0);
  best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += cost(mu, nu, i, perm[i]);
    if (c < best_cost) {
      best_cost = c;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::vector<Coupling::Pair> pairs;
  pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pairs.push_back({i, best[i], mu.mass(i)});
  return Coupling(mu, nu, std::move(pairs));
}

double transport_cost(const Coupling& pi) {
  double s = 0.0;
  for (std::size_t p = 0; p < pi.pairs().size(); ++p)
    s += pi.pairs()[p].mass * dist2(pi.source(p), pi.target(p));
  return s;
}

namespace {

// Ordered tuples of distinct indices whose first entry is the tuple minimum;
// every cycle of each orientation is then visited exactly once.
std::optional<CycleViolation> exhaustive_check(int dim, const std::vector<double>& xs,
                                               const std::vector<double>& ys, int max_len,
                                               double tol, std::size_t& checked) {
  const std::size_t S = xs.size() / dim;
  std::vector<std::size_t> idx;
  std::vector<char> used(S, 0);
  std::optional<CycleViolation> found;

  auto rec = [&](auto&& self, std::size_t first) -> void {
    if (found) return;
    if (idx.size() >= 2) {
      ++checked;
      found = kernels::check_cycle(dim, xs, ys, idx, tol);
      if (found) return;
    }
    if (idx.size() == static_cast<std::size_t>(max_len)) return;
    for (std::size_t k = first + 1; k < S; ++k) {
      if (used[k]) continue;
      used[k] = 1;
      idx.push_back(k);
      self(self, first);
      idx.pop_back();
      used[k] = 0;
      if (found) return;
    }
  };

  for (std::size_t first = 0; first + 1 < S && !found; ++first) {
    idx.assign(1, first);
    std::fill(used.begin(), used.end(), 0);
    used[first] = 1;
    rec(rec, first);
  }
  return found;
}

}  // namespace

MonotonicityReport verify_cyclic_monotonicity_pairs(int dim, const std::vector<double>& xs,
                                                    const std::vector<double>& ys,
                                                    int max_cycle_len, double tol,
                                                    std::size_t budget, std::uint64_t seed) {
  if (max_cycle_len < 2)
    throw std::invalid_argument("verify_cyclic_monotonicity: cycle length must be at least 2");
  if (!(tol > 0.0))
    throw std::invalid_argument("verify_cyclic_monotonicity: tol must be positive");
  if (xs.size() != ys.size() || xs.size() % dim != 0)
    throw std::invalid_argument("verify_cyclic_monotonicity: malformed pair arrays");

  const std::size_t S = xs.size() / dim;
  MonotonicityReport rep;
  if (S < 2) {
    rep.exhaustive = true;
    return rep;
  }

  if (S <= 12) {
    rep.exhaustive = true;
    const int max_len = std::min<int>(max_cycle_len, static_cast<int>(S));
    rep.violation = exhaustive_check(dim, xs, ys, max_len, tol, rep.cycles_checked);
    return rep;
  }

  rep.exhaustive = false;
  rep.cycles_checked = budget;
  const long hit = kernels::sampled_cycle_scan(dim, xs, ys, max_cycle_len, tol, budget, seed);
  if (hit >= 0) {
    const auto idx = kernels::cycle_indices(S, max_cycle_len, seed, static_cast<std::uint64_t>(hit));
    rep.violation = kernels::check_cycle(dim, xs, ys, idx, tol);
  }
  return rep;
}

MonotonicityReport verify_cyclic_monotonicity(const Coupling& pi, int max_cycle_len,
                                              double tol, std::size_t budget,
                                              std::uint64_t seed) {
  const int d = pi.dim();
  std::vector<double> xs, ys;
  xs.reserve(pi.pairs().size() * d);
  ys.reserve(pi.pairs().size() * d);
  for (std::size_t p = 0; p < pi.pairs().size(); ++p) {
    auto x = pi.source(p), y = pi.target(p);
    xs.insert(xs.end(), x.begin(), x.end());
    ys.insert(ys.end(), y.begin(), y.end());
  }
  return verify_cyclic_monotonicity_pairs(d, xs, ys, max_cycle_len, tol, budget, seed);
}

std::vector<double> dual_potentials(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                    const Coupling& pi) {
  if (!(pi.left() == mu) || !(pi.right() == nu))
    throw std::invalid_argument("dual_potentials: coupling marginals do not match inputs");
  const std::size_t m = mu.size(), n = nu.size();

  std::vector<std::vector<std::size_t>> tgts_of_src(m), srcs_of_tgt(n);
  for (const auto& pr : pi.pairs()) {
    tgts_of_src[pr.i].push_back(pr.j);
    srcs_of_tgt[pr.j].push_back(pr.i);
  }

  // Propagate the support equalities <x_i, y_j> - g_j = phi_i over each
  // connected component of the support graph.
  std::vector<int> comp_src(m, -1), comp_tgt(n, -1);
  std::vector<double> phi(m, 0.0), g(n, 0.0);
  int ncomp = 0;
  for (std::size_t root = 0; root < m; ++root) {
    if (comp_src[root] >= 0) continue;
    const int c = ncomp++;
    comp_src[root] = c;
    phi[root] = 0.0;
    std::vector<std::pair<bool, std::size_t>> stack{{true, root}};
    while (!stack.empty()) {
      const auto [is_src, idx] = stack.back();
      stack.pop_back();
      if (is_src) {
        for (std::size_t j : tgts_of_src[idx]) {
          if (comp_tgt[j] < 0) {
            comp_tgt[j] = c;
            g[j] = dot(mu.point(idx), nu.point(j)) - phi[idx];
            stack.push_back({false, j});
          }
        }
      } else {
        for (std::size_t i : srcs_of_tgt[idx]) {
          if (comp_src[i] < 0) {
            comp_src[i] = c;
            phi[i] = dot(mu.point(i), nu.point(idx)) - g[idx];
            stack.push_back({true, i});
          }
        }
      }
    }
  }
  for (std::size_t j = 0; j < n; ++j)
    if (comp_tgt[j] < 0)
      throw std::invalid_argument("dual_potentials: target atom missing from support");

  double scale = 1.0;
  for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, std::abs(phi[i]));
  for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(g[j]));
  const double tol = 1e-9 * scale;

  for (const auto& pr : pi.pairs()) {
    const double gap = dot(mu.point(pr.i), nu.point(pr.j)) - g[pr.j] - phi[pr.i];
    if (std::abs(gap) > tol)
      throw SlacknessError("dual_potentials: support equalities inconsistent");
  }

  // Shifts per component from the difference constraints
  // sigma_a - sigma_b <= w(a, b) = min over i in a, k in b of the dual slack.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> w(static_cast<std::size_t>(ncomp) * ncomp, inf);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double value = dot(mu.point(i), nu.point(k));
      scale = std::max(scale, std::abs(value));
      double& cell = w[static_cast<std::size_t>(comp_src[i]) * ncomp + comp_tgt[k]];
      cell = std::min(cell, phi[i] - (value - g[k]));
    }
  }
  const double tol2 = 1e-9 * scale;
  for (int c = 0; c < ncomp; ++c)
    if (w[static_cast<std::size_t>(c) * ncomp + c] < -tol2)
      throw SlacknessError("dual_potentials: in-component argmax violated");

  // Bellman-Ford from an implicit all-zero source; the final audit below
  // catches infeasible systems.
  std::vector<double> sigma(ncomp, 0.0);
  for (int round = 0; round + 1 < ncomp; ++round) {
    bool changed = false;
    for (int b = 0; b < ncomp; ++b) {
      for (int a = 0; a < ncomp; ++a) {
        if (a == b) continue;
        const double wab = w[static_cast<std::size_t>(a) * ncomp + b];
        if (wab < inf && sigma[a] > sigma[b] + wab) {
          sigma[a] = sigma[b] + wab;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }

  std::vector<double> offsets(n);
  for (std::size_t j = 0; j < n; ++j) offsets[j] = g[j] + sigma[comp_tgt[j]];

  for (std::size_t i = 0; i < m; ++i) {
    const double own = phi[i] - sigma[comp_src[i]];
    for (std::size_t k = 0; k < n; ++k) {
      if (dot(mu.point(i), nu.point(k)) - offsets[k] > own + tol2)
        throw SlacknessError("dual_potentials: argmax fails; coupling not optimal");
    }
  }

  const double gmin = *std::min_element(offsets.begin(), offsets.end());
  for (double& v : offsets) v -= gmin;
  return offsets;
}

}  // namespace ot
