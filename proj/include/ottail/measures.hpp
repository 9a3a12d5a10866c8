#ifndef OTTAIL_MEASURES_HPP
#define OTTAIL_MEASURES_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ottail/common.hpp"

namespace ot {

// Finitely supported nonnegative measure on R^d.  Canonical form: atoms
// pairwise distinct, lexicographically sorted, no zero masses.  Total mass
// is zero only for the explicitly constructed zero measure.
class DiscreteMeasure {
 public:
  // Canonicalizes: merges duplicate points (summing masses), drops zero-mass
  // atoms, sorts points lexicographically.  Throws std::invalid_argument on
  // empty input, negative mass or dimension mismatch.
  static DiscreteMeasure make(const std::vector<Vec>& points, const std::vector<double>& masses);
  static DiscreteMeasure make_flat(int dim, std::vector<double> flat_points, std::vector<double> masses);

  static DiscreteMeasure zero(int dim);

  int dim() const { return dim_; }
  std::size_t size() const { return mass_.size(); }
  bool empty() const { return mass_.empty(); }

  std::span<const double> point(std::size_t i) const {
    return {pts_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }
  double mass(std::size_t i) const { return mass_[i]; }
  double radius(std::size_t i) const { return norm(point(i)); }
  double total_mass() const;

  const std::vector<double>& points_flat() const { return pts_; }
  const std::vector<double>& masses() const { return mass_; }

  bool operator==(const DiscreteMeasure& o) const {
    return dim_ == o.dim_ && pts_ == o.pts_ && mass_ == o.mass_;
  }

 private:
  DiscreteMeasure(int dim, std::vector<double> pts, std::vector<double> mass)
      : dim_(dim), pts_(std::move(pts)), mass_(std::move(mass)) {}

  int dim_;
  std::vector<double> pts_;   // size() * dim_, lexicographically sorted
  std::vector<double> mass_;  // size()
};

inline DiscreteMeasure make_discrete(const std::vector<Vec>& points,
                                     const std::vector<double>& masses) {
  return DiscreteMeasure::make(points, masses);
}

// Continuous test function vanishing on a ball around the origin, bounded by
// one.  Radial profile is a linear ramp from 0 at |x| = inner_radius to 1 at
// |x| = inner_radius + ramp_width.  An optional cone selector multiplies in a
// continuous angular ramp towards a unit direction u: full weight where
// cos(angle(x, u)) >= cos_min + softness, zero where cos <= cos_min.
struct TestFunctional {
  double inner_radius = 1.0;
  double ramp_width = 0.1;
  std::optional<Vec> direction;  // unit vector when present
  double cos_min = 0.0;
  double softness = 0.1;

  double operator()(std::span<const double> x) const;
};

// The fixed family used for measure comparisons: radial ramps at radii
// {0.5, 1, 2, 4} with 0.1-wide ramps, no angular selector.
std::vector<TestFunctional> default_test_family();

// Normalizing bundle for tail-rescaling experiments: auxiliary functions
// b1, b2 with indices alpha1, alpha2 and the evaluation grid in t.  The
// block-diagonal exponent matrix diag(1/alpha1 * 1_d, 1/alpha2 * 1_d) is
// implied by (alpha1, alpha2).
class TailScaling {
 public:
  using ScalarFn = std::function<double(double)>;

  // b_i(t) = t^{1/alpha_i}, the exact choice for standard Pareto radii.
  static TailScaling analytic(double alpha1, double alpha2, std::vector<double> t_grid);

  // b_i(t) from the empirical radius quantile of the given measures.
  static TailScaling empirical(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                               double alpha1, double alpha2, std::vector<double> t_grid);

  TailScaling(double alpha1, double alpha2, ScalarFn b1, ScalarFn b2,
              std::vector<double> t_grid, std::string mode);

  double alpha1() const { return alpha1_; }
  double alpha2() const { return alpha2_; }
  double b1(double t) const { return b1_(t); }
  double b2(double t) const { return b2_(t); }
  const std::vector<double>& t_grid() const { return t_grid_; }
  const std::string& mode() const { return mode_; }

 private:
  double alpha1_, alpha2_;
  ScalarFn b1_, b2_;
  std::vector<double> t_grid_;
  std::string mode_;
};

enum class AngularSpec { UniformOnSphere, FixedDirection, IidComponentwisePareto };

AngularSpec angular_spec_from_string(const std::string& s);
std::string to_string(AngularSpec a);

// Empirical measure of n iid draws, each atom mass 1/n.  For the radial specs
// (uniform-on-sphere, fixed-direction) the radius is standard Pareto(alpha);
// for iid-componentwise-pareto every coordinate is an independent Pareto(alpha).
// Bit-reproducible from (seed, stream).
DiscreteMeasure sample_regularly_varying(double alpha, AngularSpec angular, int dim,
                                         std::size_t n, std::uint64_t seed,
                                         std::uint64_t stream = 0);

// Drops atoms with |x| <= r.  May return the zero measure; callers decide
// whether that is an error.
DiscreteMeasure restrict_outside_ball(const DiscreteMeasure& mu, double r);

// t * mu(b * .): atoms x -> x/b, masses * t.
DiscreteMeasure rescale_measure(const DiscreteMeasure& mu, double t, double b);

// Radius quantile at level 1 - 1/t of a probability measure, using the
// upper generalized inverse Q(p) = inf{ r : F(r) > p }.  With this convention
// the standard Pareto(alpha) population value is exactly t^{1/alpha}, and for
// n uniform atoms and t = n the result is the largest radius.
double empirical_quantile_b(const DiscreteMeasure& mu, double t);

// max_i | integral f_i d(mu) - integral f_i d(nu) | over the family.
double m0_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                   const std::vector<TestFunctional>& family);

// Radial-stratified subsampling to at most k atoms: strata of equal mass in
// radius order, one uniformly chosen representative per stratum carrying the
// stratum's mass.  Preserves tail atoms that uniform subsampling would starve.
DiscreteMeasure quantize_radial(const DiscreteMeasure& mu, std::size_t k,
                                std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace ot

#endif  // OTTAIL_MEASURES_HPP
