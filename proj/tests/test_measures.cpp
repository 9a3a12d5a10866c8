#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ottail/measures.hpp"
#include "ottail/rng.hpp"

using namespace ot;

TEST_CASE("make_discrete constructs, merges and canonicalizes") {
  const auto mu = make_discrete({{1.0}, {2.0}}, {0.5, 0.5});
  CHECK(mu.size() == 2);
  CHECK(mu.total_mass() == doctest::Approx(1.0));

  const auto merged = make_discrete({{1.0}, {1.0}}, {0.3, 0.7});
  CHECK(merged.size() == 1);
  CHECK(merged.point(0)[0] == 1.0);
  CHECK(merged.mass(0) == doctest::Approx(1.0));

  // canonical order is lexicographic regardless of input order
  const auto sorted = make_discrete({{3.0, 1.0}, {1.0, 5.0}, {1.0, 2.0}}, {1, 1, 1});
  CHECK(sorted.point(0)[0] == 1.0);
  CHECK(sorted.point(0)[1] == 2.0);
  CHECK(sorted.point(2)[0] == 3.0);

  CHECK_THROWS_AS(make_discrete({{0.0, 0.0}}, {-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_discrete({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(make_discrete({{1.0}, {1.0, 2.0}}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(make_discrete({{1.0}}, {0.0}), std::invalid_argument);  // all-zero mass
}

TEST_CASE("sampler: fixed direction gives collinear Pareto atoms") {
  const auto mu = sample_regularly_varying(1.0, AngularSpec::FixedDirection, 3, 3, 7);
  CHECK(mu.size() == 3);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    CHECK(mu.radius(i) >= 1.0);
    CHECK(mu.mass(i) == doctest::Approx(1.0 / 3.0));
    CHECK(mu.point(i)[1] == 0.0);
    CHECK(mu.point(i)[2] == 0.0);
  }
}

TEST_CASE("sampler: radius survival matches the Pareto law") {
  // oracle: P(|X| > r) = r^{-alpha}; empirical within 3 standard errors
  const std::size_t n = 10000;
  const double alpha = 2.0;
  const auto mu = sample_regularly_varying(alpha, AngularSpec::UniformOnSphere, 2, n, 123);
  for (double r : {2.0, 4.0, 8.0}) {
    double frac = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
      if (mu.radius(i) > r) frac += mu.mass(i);
    const double p = std::pow(r, -alpha);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    CHECK(std::abs(frac - p) <= 3.0 * se);
  }
}

TEST_CASE("sampler: componentwise spec and error paths") {
  const auto mu = sample_regularly_varying(1.5, AngularSpec::IidComponentwisePareto, 2, 50, 9);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    CHECK(mu.point(i)[0] >= 1.0);
    CHECK(mu.point(i)[1] >= 1.0);
  }
  CHECK_THROWS_AS(sample_regularly_varying(0.0, AngularSpec::FixedDirection, 1, 5, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_regularly_varying(1.0, AngularSpec::FixedDirection, 1, 0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(angular_spec_from_string("spiral"), std::invalid_argument);
}

TEST_CASE("sampler: equal seeds are bit-identical, streams differ") {
  const auto a = sample_regularly_varying(1.0, AngularSpec::UniformOnSphere, 2, 200, 42);
  const auto b = sample_regularly_varying(1.0, AngularSpec::UniformOnSphere, 2, 200, 42);
  CHECK(a == b);
  const auto c = sample_regularly_varying(1.0, AngularSpec::UniformOnSphere, 2, 200, 43);
  CHECK_FALSE(a == c);
  const auto d = sample_regularly_varying(1.0, AngularSpec::UniformOnSphere, 2, 200, 42, 1);
  CHECK_FALSE(a == d);
}

TEST_CASE("restrict_outside_ball") {
  const auto mu = make_discrete({{0.5}, {1.5}}, {0.25, 0.75});
  const auto cut = restrict_outside_ball(mu, 1.0);
  REQUIRE(cut.size() == 1);
  CHECK(cut.point(0)[0] == 1.5);
  CHECK(cut.mass(0) == 0.75);

  CHECK(restrict_outside_ball(mu, 0.25) == mu);
  CHECK(restrict_outside_ball(mu, 10.0).empty());

  // idempotent and monotone in r
  const auto mu2 = sample_regularly_varying(1.0, AngularSpec::UniformOnSphere, 2, 100, 5);
  const auto r1 = restrict_outside_ball(mu2, 2.0);
  CHECK(restrict_outside_ball(r1, 2.0) == r1);
  const auto r2 = restrict_outside_ball(mu2, 3.0);
  for (std::size_t i = 0; i < r2.size(); ++i) {
    bool found = false;
    for (std::size_t j = 0; j < r1.size(); ++j)
      found = found || lex_compare(r2.point(i), r1.point(j)) == 0;
    CHECK(found);
  }
}

TEST_CASE("rescale_measure definition and inverse") {
  const auto mu = make_discrete({{4.0}}, {0.1});
  CHECK(rescale_measure(mu, 1.0, 1.0) == mu);

  const auto r = rescale_measure(mu, 10.0, 2.0);
  REQUIRE(r.size() == 1);
  CHECK(r.point(0)[0] == 2.0);
  CHECK(r.mass(0) == doctest::Approx(1.0));

  // dyadic b: division is exact, the round trip recovers points exactly
  const auto mu2 = sample_regularly_varying(1.0, AngularSpec::UniformOnSphere, 2, 64, 11);
  for (double b : {0.25, 0.5, 2.0, 8.0}) {
    const auto once = rescale_measure(mu2, 3.0, b);
    const auto back = rescale_measure(once, 1.0, 1.0 / b);
    REQUIRE(back.size() == mu2.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
      CHECK(back.point(i)[0] == mu2.point(i)[0]);
      CHECK(back.point(i)[1] == mu2.point(i)[1]);
      CHECK(back.mass(i) == doctest::Approx(3.0 * mu2.mass(i)).epsilon(1e-15));
    }
  }
}

TEST_CASE("rescale_measure: Pareto tail mass approaches the homogeneous limit") {
  // oracle: the limit measure assigns lambda^{-1} outside radius lambda
  const std::size_t n = 20000;
  const double t = 100.0;
  const auto mu = sample_regularly_varying(1.0, AngularSpec::FixedDirection, 1, n, 77);
  const auto scaled = rescale_measure(mu, t, t);  // b(t) = t for Pareto(1)
  for (double lambda : {1.0, 2.0}) {
    double mass = 0.0;
    for (std::size_t i = 0; i < scaled.size(); ++i)
      if (scaled.radius(i) > lambda) mass += scaled.mass(i);
    const double p = 1.0 / (t * lambda);
    const double se = t * std::sqrt(p / static_cast<double>(n));
    CHECK(std::abs(mass - 1.0 / lambda) <= 3.0 * se);
  }
}

TEST_CASE("empirical_quantile_b conventions") {
  const auto mu = make_discrete({{1.0}, {2.0}, {3.0}, {4.0}}, {0.25, 0.25, 0.25, 0.25});
  CHECK(empirical_quantile_b(mu, 4.0) == 4.0);  // 4th order statistic
  CHECK(empirical_quantile_b(mu, 2.0) == 3.0);  // F(2) = 0.5, not > 0.5
  CHECK_THROWS_AS(empirical_quantile_b(mu, 1.0), std::invalid_argument);

  const auto heavy = make_discrete({{1.0}}, {2.0});
  CHECK_THROWS_AS(empirical_quantile_b(heavy, 4.0), std::invalid_argument);
}

TEST_CASE("empirical_quantile_b concentrates at the Pareto rate") {
  const std::size_t n = 10000;
  for (double alpha : {1.0, 2.0}) {
    const auto mu = sample_regularly_varying(alpha, AngularSpec::FixedDirection, 1, n, 3);
    for (double t : {10.0, 100.0, 1000.0}) {
      const double b = empirical_quantile_b(mu, t);
      const double pop = std::pow(t, 1.0 / alpha);
      const double delta = 5.0 * pop * std::sqrt(t / static_cast<double>(n));
      CHECK(b / pop >= 1.0 - delta);
      CHECK(b / pop <= 1.0 + delta);
    }
  }
}

TEST_CASE("m0_distance over the fixed test family") {
  const auto fam = default_test_family();
  const auto mu = make_discrete({{2.0}}, {1.0});
  CHECK(m0_distance(mu, mu, fam) == 0.0);

  // unit mass at radius 2 vs the zero measure, single ramp at 1.5
  const std::vector<TestFunctional> ramp{TestFunctional{1.5, 0.1, {}, 0.0, 0.1}};
  CHECK(m0_distance(mu, DiscreteMeasure::zero(1), ramp) == doctest::Approx(1.0));

  // discrepancies hidden inside every functional's dead zone are invisible
  const auto near0_a = make_discrete({{0.1}}, {5.0});
  const auto near0_b = make_discrete({{-0.2}}, {9.0});
  CHECK(m0_distance(near0_a, near0_b, fam) == 0.0);

  CHECK_THROWS_AS(m0_distance(mu, mu, {}), std::invalid_argument);
}

TEST_CASE("m0_distance symmetry and triangle inequality") {
  const auto fam = default_test_family();
  CounterRng rng(99);
  std::uint64_t ctr = 0;
  for (int rep = 0; rep < 25; ++rep) {
    auto draw = [&](int atoms) {
      std::vector<Vec> pts;
      std::vector<double> ms;
      for (int a = 0; a < atoms; ++a) {
        pts.push_back({rng.uniform(ctr++, -5.0, 5.0), rng.uniform(ctr++, -5.0, 5.0)});
        ms.push_back(rng.uniform(ctr++, 0.01, 2.0));
      }
      return make_discrete(pts, ms);
    };
    const auto a = draw(4), b = draw(3), c = draw(5);
    const double ab = m0_distance(a, b, fam);
    const double ba = m0_distance(b, a, fam);
    CHECK(ab == ba);
    CHECK(ab <= m0_distance(a, c, fam) + m0_distance(c, b, fam) + 1e-12);
  }
}

TEST_CASE("test functionals vanish on the inner ball and stay bounded") {
  TestFunctional f{1.0, 0.1, Vec{1.0, 0.0}, 0.0, 0.1};
  CHECK(f(Vec{0.5, 0.0}) == 0.0);
  CHECK(f(Vec{-3.0, 0.0}) == 0.0);  // behind the half-space selector
  CHECK(f(Vec{3.0, 0.0}) == 1.0);
  CounterRng rng(5);
  for (int i = 0; i < 200; ++i) {
    const Vec x{rng.uniform(2 * i, -4.0, 4.0), rng.uniform(2 * i + 1, -4.0, 4.0)};
    const double v = f(x);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    if (norm(x) <= 1.0) CHECK(v == 0.0);
  }
}

TEST_CASE("quantize_radial keeps mass and the tail") {
  const auto mu = sample_regularly_varying(1.0, AngularSpec::FixedDirection, 1, 5000, 21);
  const auto q = quantize_radial(mu, 100, 21);
  CHECK(q.size() <= 100);
  CHECK(q.total_mass() == doctest::Approx(mu.total_mass()).epsilon(1e-12));

  // the top-stratum representative sits above the stratum's lower boundary,
  // i.e. above the (1 - 2/k) radius quantile; uniform subsampling would miss
  // that region entirely with noticeable probability
  std::vector<double> radii;
  for (std::size_t i = 0; i < mu.size(); ++i) radii.push_back(mu.radius(i));
  std::sort(radii.begin(), radii.end());
  double q_max = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) q_max = std::max(q_max, q.radius(i));
  CHECK(q_max >= radii[radii.size() - 2 * (radii.size() / 100) - 1]);

  CHECK(quantize_radial(mu, 100, 21) == q);    // deterministic
  CHECK(quantize_radial(mu, 6000, 21) == mu);  // k above n: unchanged
}

TEST_CASE("TailScaling validation") {
  CHECK_NOTHROW(TailScaling::analytic(1.0, 2.0, {10.0, 100.0}));
  CHECK_THROWS_AS(TailScaling::analytic(-1.0, 2.0, {10.0}), std::invalid_argument);
  CHECK_THROWS_AS(TailScaling::analytic(1.0, 2.0, {10.0, 5.0}), std::invalid_argument);
  CHECK_THROWS_AS(TailScaling(
                      1.0, 1.0, [](double) { return -1.0; }, [](double) { return 1.0; },
                      {1.0}, "x"),
                  std::invalid_argument);

  const auto mu = sample_regularly_varying(1.0, AngularSpec::FixedDirection, 1, 1000, 2);
  const auto sc = TailScaling::empirical(mu, mu, 1.0, 1.0, {10.0, 50.0});
  CHECK(sc.b1(10.0) == sc.b2(10.0));
  CHECK(sc.b1(50.0) >= sc.b1(10.0));
}
