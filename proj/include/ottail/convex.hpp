#ifndef OTTAIL_CONVEX_HPP
#define OTTAIL_CONVEX_HPP

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ottail/common.hpp"

namespace ot {

// Closed convex potential in max-affine form: value(x) = max_j(<x, s_j> - g_j).
// Pieces dominated everywhere on a probe grid may be flagged; flagged pieces
// still participate in evaluation (the pointwise max is unchanged either way).
class PolyhedralPotential {
 public:
  PolyhedralPotential(int dim, std::vector<double> slopes_flat, std::vector<double> offsets);

  int dim() const { return dim_; }
  std::size_t pieces() const { return offsets_.size(); }
  std::span<const double> slope(std::size_t j) const {
    return {slopes_.data() + j * dim_, static_cast<std::size_t>(dim_)};
  }
  double offset(std::size_t j) const { return offsets_[j]; }
  const std::vector<double>& slopes_flat() const { return slopes_; }
  const std::vector<double>& offsets() const { return offsets_; }

  double value(std::span<const double> x) const;

  // Indices of pieces within tol of the max at x; never empty for tol >= 0.
  std::vector<std::size_t> active_set(std::span<const double> x, double tol) const;

  // Marks pieces that are never active (tol 0) at any grid point.
  void flag_dominated(const PointList& probe_grid);
  bool dominated(std::size_t j) const { return dominated_[j] != 0; }

 private:
  int dim_;
  std::vector<double> slopes_;   // pieces() * dim_
  std::vector<double> offsets_;  // pieces()
  std::vector<char> dominated_;
};

// Finite sample of the graph of a set-valued map: (x, y) pairs, pairwise
// distinct, tagged by provenance.
class MultiMapGraph {
 public:
  enum class Role { SubdifferentialSample, CouplingSupport };

  MultiMapGraph(int dim, std::vector<double> xs_flat, std::vector<double> ys_flat, Role role);

  int dim() const { return dim_; }
  std::size_t size() const { return xs_.size() / dim_; }
  bool empty() const { return xs_.empty(); }
  Role role() const { return role_; }

  std::span<const double> x(std::size_t p) const {
    return {xs_.data() + p * dim_, static_cast<std::size_t>(dim_)};
  }
  std::span<const double> y(std::size_t p) const {
    return {ys_.data() + p * dim_, static_cast<std::size_t>(dim_)};
  }
  const std::vector<double>& xs_flat() const { return xs_; }
  const std::vector<double>& ys_flat() const { return ys_; }

  PointList abscissae() const { return PointList(dim_, xs_); }
  PointList ordinates() const { return PointList(dim_, ys_); }

  MultiMapGraph with_role(Role r) const { return MultiMapGraph(dim_, xs_, ys_, r); }

 private:
  int dim_;
  std::vector<double> xs_, ys_;
  Role role_;
};

// Thrown by potential_from_graph when the input pairs are not cyclically
// monotone; carries the violating cycle (indices into the input pairs).
class PositiveCycleError : public std::runtime_error {
 public:
  PositiveCycleError(std::string what, std::vector<std::size_t> cycle)
      : std::runtime_error(std::move(what)), cycle_(std::move(cycle)) {}
  const std::vector<std::size_t>& cycle() const { return cycle_; }

 private:
  std::vector<std::size_t> cycle_;
};

// Packages dual data as a potential.  Duplicate slopes keep the lower offset;
// the pointwise max is unchanged.
PolyhedralPotential potential_from_duals(const std::vector<Vec>& slopes,
                                         const std::vector<double>& offsets);

// Max-affine potential whose subdifferential contains a sampled cyclically
// monotone graph: one piece per pair, offsets from a longest-path relaxation
// over chains out of the base pair, value 0 at the base abscissa.  Throws
// PositiveCycleError when the graph is not cyclically monotone.
PolyhedralPotential potential_from_graph(const MultiMapGraph& graph, std::size_t base_index);

// Active slope vectors at x within tol; the exact subdifferential is their
// convex hull.  Duplicate slopes are returned once.
std::vector<Vec> subdiff_eval(const PolyhedralPotential& psi, std::span<const double> x,
                              double tol);

// (b1 b2)^{-1} psi(b1 .): slopes divide by b2, offsets by b1 * b2, hence the
// subdifferential at x is exactly the original one at b1 x divided by b2.
PolyhedralPotential scale_potential(const PolyhedralPotential& psi, double b1, double b2);

// Pairs (x, y) -> (x / b1, y / b2).
MultiMapGraph scale_graph(const MultiMapGraph& graph, double b1, double b2);

double hausdorff_distance(const PointList& K, const PointList& L);

// All ordinates whose paired abscissa lies within eps of some point of A.
PointList image_of_set(const MultiMapGraph& graph, const PointList& A, double eps);

struct InclusionWitness {
  Vec at;         // point of K where an inclusion fails
  Vec uncovered;  // ordinate with no eps-close counterpart
  bool limit_side;  // true: limit ordinate uncovered by approx; false: converse
};

// Verifies, for every singleton {a} of K, that each graph's ordinates at a
// are covered by the other graph's ordinates over the eps-ball around a,
// inflated by eps.  Returns the first failure.
std::optional<InclusionWitness> inclusion_check(const MultiMapGraph& limit_graph,
                                                const MultiMapGraph& approx_graph,
                                                const PointList& K, double eps);

struct DiagnosticCell {
  std::size_t graph_index;
  double eps;
  double hausdorff;   // d_H(T_n(K + eps B), T(K)); NaN when an image is empty
  bool empty_image;
  bool inclusion_pass;
};

struct ConvergenceDiagnostic {
  std::vector<DiagnosticCell> cells;  // ordered by (graph index, eps descending)
  std::vector<double> pass_eps;       // per graph: smallest eps passing inclusion, NaN if none
  double coverage_h;                  // max over K of distance to limit abscissae
  bool monotone_in_n;                 // hausdorff nonincreasing in n at every eps
};

// Tabulates d_H(image(graph_n, K, eps), image(limit, K, 0)) over the grid.
// eps_grid must be positive and strictly decreasing.
ConvergenceDiagnostic graphical_convergence_diagnostic(const std::vector<MultiMapGraph>& graphs,
                                                       const MultiMapGraph& limit,
                                                       const PointList& K,
                                                       const std::vector<double>& eps_grid);

// Axis-aligned probe grid: points_per_axis^dim points over the bounding box
// of the abscissae, inflated by 10%.
PointList probe_grid(const MultiMapGraph& graph, int points_per_axis = 64);

}  // namespace ot

#endif  // OTTAIL_CONVEX_HPP
