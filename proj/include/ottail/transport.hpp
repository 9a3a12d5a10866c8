#ifndef OTTAIL_TRANSPORT_HPP
#define OTTAIL_TRANSPORT_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ottail/measures.hpp"

namespace ot {

// Finitely supported coupling with tracked marginals.  Pairs reference atoms
// of the marginals by index; all pair masses are strictly positive.
class Coupling {
 public:
  struct Pair {
    std::size_t i;  // index into left marginal
    std::size_t j;  // index into right marginal
    double mass;
  };

  Coupling(DiscreteMeasure left, DiscreteMeasure right, std::vector<Pair> pairs);

  const DiscreteMeasure& left() const { return left_; }
  const DiscreteMeasure& right() const { return right_; }
  const std::vector<Pair>& pairs() const { return pairs_; }
  int dim() const { return left_.dim(); }

  std::span<const double> source(std::size_t p) const { return left_.point(pairs_[p].i); }
  std::span<const double> target(std::size_t p) const { return right_.point(pairs_[p].j); }

  double total_mass() const;

  // Checks pair-mass positivity, marginal conservation within
  // 1e-9 * total mass, and support projection.  Throws on violation.
  void check_invariants() const;

 private:
  DiscreteMeasure left_, right_;
  std::vector<Pair> pairs_;
};

// Witness against cyclic monotonicity: an ordered cycle of support pairs
// whose stay-put cost exceeds the single-shift reassignment cost.
struct CycleViolation {
  std::vector<std::pair<Vec, Vec>> cycle;
  double lhs_cost = 0.0;  // sum |x_i - y_i|^2
  double rhs_cost = 0.0;  // sum |x_i - y_{i+1}|^2, indices mod cycle length
};

struct MonotonicityReport {
  bool exhaustive = false;  // true: full certificate; false: sampled check
  std::size_t cycles_checked = 0;
  std::optional<CycleViolation> violation;
  bool passed() const { return !violation.has_value(); }
};

class SolverAuditError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SlacknessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact minimizer of sum mass * |x - y|^2 over couplings of mu and nu.
// Transportation network simplex with a deterministic pivot rule; the result
// is a basic solution with at most m + n - 1 positive pairs and is audited
// against complementary slackness before returning.
Coupling solve_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// Exhaustive permutation oracle for uniform equal-size measures, m = n <= 9.
Coupling brute_force_assignment(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

double transport_cost(const Coupling& pi);

// Checks all support cycles of length <= max_cycle_len when the support has
// at most 12 pairs (certificate); otherwise evaluates `budget` random cycles
// drawn from (seed).  tol is relative to the cycle's own cost scale, floored
// at one.
MonotonicityReport verify_cyclic_monotonicity(const Coupling& pi, int max_cycle_len,
                                              double tol, std::size_t budget = 20000,
                                              std::uint64_t seed = 0);

// Same check on a bare list of (x, y) support pairs with unit weights.
MonotonicityReport verify_cyclic_monotonicity_pairs(int dim,
                                                    const std::vector<double>& xs_flat,
                                                    const std::vector<double>& ys_flat,
                                                    int max_cycle_len, double tol,
                                                    std::size_t budget = 20000,
                                                    std::uint64_t seed = 0);

// Offsets g_j, one per target atom, such that every support pair (x, y_j)
// satisfies j in argmax_k( <x, y_k> - g_k ), normalized to min_j g_j = 0.
// Throws SlacknessError if no such offsets exist, i.e. the coupling is not
// optimal for its marginals.
std::vector<double> dual_potentials(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                    const Coupling& pi);

}  // namespace ot

#endif  // OTTAIL_TRANSPORT_HPP
