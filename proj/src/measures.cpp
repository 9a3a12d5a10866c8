#include "ottail/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ottail/rng.hpp"

namespace ot {

DiscreteMeasure DiscreteMeasure::make(const std::vector<Vec>& points,
                                      const std::vector<double>& masses) {
  if (points.empty()) throw std::invalid_argument("make_discrete: empty input");
  const int d = static_cast<int>(points.front().size());
  std::vector<double> flat;
  flat.reserve(points.size() * d);
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != d)
      throw std::invalid_argument("make_discrete: dimension mismatch");
    flat.insert(flat.end(), p.begin(), p.end());
  }
  return make_flat(d, std::move(flat), masses);
}

DiscreteMeasure DiscreteMeasure::make_flat(int dim, std::vector<double> flat_points,
                                           std::vector<double> masses) {
  if (dim <= 0) throw std::invalid_argument("make_discrete: dimension must be positive");
  if (masses.empty()) throw std::invalid_argument("make_discrete: empty input");
  if (flat_points.size() != masses.size() * static_cast<std::size_t>(dim))
    throw std::invalid_argument("make_discrete: points/masses length mismatch");
  for (double m : masses) {
    if (!(m >= 0.0)) throw std::invalid_argument("make_discrete: negative mass");
  }

  const std::size_t n = masses.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto at = [&](std::size_t i) {
    return std::span<const double>(flat_points.data() + i * dim, dim);
  };
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return lex_compare(at(a), at(b)) < 0; });

  std::vector<double> pts, ms;
  pts.reserve(flat_points.size());
  ms.reserve(n);
  for (std::size_t oi = 0; oi < n; ++oi) {
    const std::size_t i = order[oi];
    if (!ms.empty()) {
      std::span<const double> prev{pts.data() + (ms.size() - 1) * dim,
                                   static_cast<std::size_t>(dim)};
      if (lex_compare(prev, at(i)) == 0) {  // duplicate point: merge masses
        ms.back() += masses[i];
        continue;
      }
    }
    pts.insert(pts.end(), at(i).begin(), at(i).end());
    ms.push_back(masses[i]);
  }

  // Drop zero-mass atoms after merging.
  std::vector<double> pts2, ms2;
  pts2.reserve(pts.size());
  ms2.reserve(ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (ms[i] > 0.0) {
      pts2.insert(pts2.end(), pts.begin() + i * dim, pts.begin() + (i + 1) * dim);
      ms2.push_back(ms[i]);
    }
  }
  if (ms2.empty())
    throw std::invalid_argument("make_discrete: all masses zero; use DiscreteMeasure::zero");
  return DiscreteMeasure(dim, std::move(pts2), std::move(ms2));
}

DiscreteMeasure DiscreteMeasure::zero(int dim) {
  if (dim <= 0) throw std::invalid_argument("zero measure: dimension must be positive");
  return DiscreteMeasure(dim, {}, {});
}

double DiscreteMeasure::total_mass() const {
  double s = 0.0;
  for (double m : mass_) s += m;
  return s;
}

double TestFunctional::operator()(std::span<const double> x) const {
  const double r = norm(x);
  if (r <= inner_radius) return 0.0;
  double w = (r - inner_radius) / ramp_width;
  if (w > 1.0) w = 1.0;
  if (direction) {
    const double c = dot(x, *direction) / r;
    double a = (c - cos_min) / softness;
    if (a <= 0.0) return 0.0;
    if (a > 1.0) a = 1.0;
    w *= a;
  }
  return w;
}

std::vector<TestFunctional> default_test_family() {
  std::vector<TestFunctional> fam;
  for (double r : {0.5, 1.0, 2.0, 4.0}) fam.push_back(TestFunctional{r, 0.1, {}, 0.0, 0.1});
  return fam;
}

TailScaling::TailScaling(double alpha1, double alpha2, ScalarFn b1, ScalarFn b2,
                         std::vector<double> t_grid, std::string mode)
    : alpha1_(alpha1),
      alpha2_(alpha2),
      b1_(std::move(b1)),
      b2_(std::move(b2)),
      t_grid_(std::move(t_grid)),
      mode_(std::move(mode)) {
  if (!(alpha1_ > 0.0) || !(alpha2_ > 0.0))
    throw std::invalid_argument("TailScaling: alpha must be positive");
  if (t_grid_.empty()) throw std::invalid_argument("TailScaling: empty t grid");
  double prev_t = 0.0, prev_b1 = 0.0, prev_b2 = 0.0;
  for (double t : t_grid_) {
    if (!(t > prev_t)) throw std::invalid_argument("TailScaling: t grid must be increasing and positive");
    const double v1 = b1_(t), v2 = b2_(t);
    if (!(v1 > 0.0) || !(v2 > 0.0))
      throw std::invalid_argument("TailScaling: b must be strictly positive on the grid");
    if (v1 < prev_b1 || v2 < prev_b2)
      throw std::invalid_argument("TailScaling: b must be nondecreasing on the grid");
    prev_t = t;
    prev_b1 = v1;
    prev_b2 = v2;
  }
}

TailScaling TailScaling::analytic(double alpha1, double alpha2, std::vector<double> t_grid) {
  auto f1 = [alpha1](double t) { return std::pow(t, 1.0 / alpha1); };
  auto f2 = [alpha2](double t) { return std::pow(t, 1.0 / alpha2); };
  return TailScaling(alpha1, alpha2, f1, f2, std::move(t_grid), "analytic");
}

TailScaling TailScaling::empirical(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                   double alpha1, double alpha2, std::vector<double> t_grid) {
  auto f1 = [mu](double t) { return empirical_quantile_b(mu, t); };
  auto f2 = [nu](double t) { return empirical_quantile_b(nu, t); };
  return TailScaling(alpha1, alpha2, f1, f2, std::move(t_grid), "empirical");
}

AngularSpec angular_spec_from_string(const std::string& s) {
  if (s == "uniform-on-sphere") return AngularSpec::UniformOnSphere;
  if (s == "fixed-direction") return AngularSpec::FixedDirection;
  if (s == "iid-componentwise-pareto") return AngularSpec::IidComponentwisePareto;
  throw std::invalid_argument("unknown angular spec: " + s);
}

std::string to_string(AngularSpec a) {
  switch (a) {
    case AngularSpec::UniformOnSphere: return "uniform-on-sphere";
    case AngularSpec::FixedDirection: return "fixed-direction";
    case AngularSpec::IidComponentwisePareto: return "iid-componentwise-pareto";
  }
  return "?";
}

DiscreteMeasure sample_regularly_varying(double alpha, AngularSpec angular, int dim,
                                         std::size_t n, std::uint64_t seed,
                                         std::uint64_t stream) {
  if (!(alpha > 0.0)) throw std::invalid_argument("sample_regularly_varying: alpha must be positive");
  if (n == 0) throw std::invalid_argument("sample_regularly_varying: n must be at least 1");
  if (dim <= 0) throw std::invalid_argument("sample_regularly_varying: dimension must be positive");

  CounterRng rng(seed, stream);
  std::vector<double> pts(n * dim);
  // Each atom owns a disjoint block of counters: one for the radius plus 2d
  // for the direction gaussians.
  const std::uint64_t stride = 2 * static_cast<std::uint64_t>(dim) + 2;
  std::vector<double> u(dim);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t base = i * stride;
    double* x = pts.data() + i * dim;
    switch (angular) {
      case AngularSpec::UniformOnSphere: {
        const double r = rng.pareto(base, alpha);
        rng.on_sphere(base + 1, std::span<double>(u));
        for (int j = 0; j < dim; ++j) x[j] = r * u[j];
        break;
      }
      case AngularSpec::FixedDirection: {
        const double r = rng.pareto(base, alpha);
        x[0] = r;
        for (int j = 1; j < dim; ++j) x[j] = 0.0;
        break;
      }
      case AngularSpec::IidComponentwisePareto: {
        for (int j = 0; j < dim; ++j) x[j] = rng.pareto(base + j, alpha);
        break;
      }
    }
  }
  std::vector<double> masses(n, 1.0 / static_cast<double>(n));
  return DiscreteMeasure::make_flat(dim, std::move(pts), std::move(masses));
}

DiscreteMeasure restrict_outside_ball(const DiscreteMeasure& mu, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("restrict_outside_ball: r must be positive");
  std::vector<double> pts, ms;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu.radius(i) > r) {
      auto p = mu.point(i);
      pts.insert(pts.end(), p.begin(), p.end());
      ms.push_back(mu.mass(i));
    }
  }
  if (ms.empty()) return DiscreteMeasure::zero(mu.dim());
  return DiscreteMeasure::make_flat(mu.dim(), std::move(pts), std::move(ms));
}

DiscreteMeasure rescale_measure(const DiscreteMeasure& mu, double t, double b) {
  if (!(t > 0.0) || !(b > 0.0))
    throw std::invalid_argument("rescale_measure: t and b must be positive");
  if (mu.empty()) return mu;
  std::vector<double> pts(mu.points_flat());
  for (double& v : pts) v /= b;
  std::vector<double> ms(mu.masses());
  for (double& m : ms) m *= t;
  return DiscreteMeasure::make_flat(mu.dim(), std::move(pts), std::move(ms));
}

double empirical_quantile_b(const DiscreteMeasure& mu, double t) {
  if (!(t > 1.0)) throw std::invalid_argument("empirical_quantile_b: t must exceed 1");
  const double total = mu.total_mass();
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("empirical_quantile_b: input must be a probability measure");

  std::vector<std::pair<double, double>> rm(mu.size());  // (radius, mass)
  for (std::size_t i = 0; i < mu.size(); ++i) rm[i] = {mu.radius(i), mu.mass(i)};
  std::sort(rm.begin(), rm.end());

  const double p = 1.0 - 1.0 / t;
  double cum = 0.0;
  for (const auto& [r, m] : rm) {
    cum += m;
    if (cum > p) return r;  // inf{ r : F(r) > p }
  }
  return rm.back().first;  // p beyond accumulated mass: largest radius
}

double m0_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                   const std::vector<TestFunctional>& family) {
  if (family.empty()) throw std::invalid_argument("m0_distance: empty test family");
  if (!mu.empty() && !nu.empty() && mu.dim() != nu.dim())
    throw std::invalid_argument("m0_distance: dimension mismatch");
  double best = 0.0;
  for (const auto& f : family) {
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) a += mu.mass(i) * f(mu.point(i));
    for (std::size_t i = 0; i < nu.size(); ++i) b += nu.mass(i) * f(nu.point(i));
    best = std::max(best, std::abs(a - b));
  }
  return best;
}

DiscreteMeasure quantize_radial(const DiscreteMeasure& mu, std::size_t k,
                                std::uint64_t seed, std::uint64_t stream) {
  if (k < 2) throw std::invalid_argument("quantize_radial: k must be at least 2");
  if (mu.size() <= k) return mu;

  const std::size_t n = mu.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return mu.radius(a) < mu.radius(b);
  });

  const double total = mu.total_mass();
  // Assign each atom to the stratum holding the midpoint of its mass interval.
  std::vector<std::vector<std::size_t>> strata(k);
  double cum = 0.0;
  for (std::size_t oi = 0; oi < n; ++oi) {
    const std::size_t i = order[oi];
    const double mid = cum + 0.5 * mu.mass(i);
    auto s = static_cast<std::size_t>(static_cast<double>(k) * mid / total);
    if (s >= k) s = k - 1;
    strata[s].push_back(i);
    cum += mu.mass(i);
  }

  CounterRng rng(seed, stream ^ 0x71a9c3d5b2e80f64ULL);
  std::vector<double> pts, ms;
  for (std::size_t s = 0; s < k; ++s) {
    if (strata[s].empty()) continue;
    double m = 0.0;
    for (std::size_t i : strata[s]) m += mu.mass(i);
    const std::size_t pick = strata[s][rng.below(s, strata[s].size())];
    auto p = mu.point(pick);
    pts.insert(pts.end(), p.begin(), p.end());
    ms.push_back(m);
  }
  return DiscreteMeasure::make_flat(mu.dim(), std::move(pts), std::move(ms));
}

}  // namespace ot
