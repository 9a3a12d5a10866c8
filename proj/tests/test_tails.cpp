#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ottail/rng.hpp"
#include "ottail/tails.hpp"

using namespace ot;

namespace {

TailScaling constant_scaling(double b1, double b2, double t) {
  return TailScaling(
      1.0, 1.0, [b1](double) { return b1; }, [b2](double) { return b2; }, {t}, "test");
}

// Discretization of the diagonal Pareto(alpha) limit coupling on [lo, hi]:
// atom mass over each radial cell is the exact integral of alpha r^{-alpha-1}.
Coupling diagonal_pareto_limit(double alpha, double lo, double hi, std::size_t cells) {
  std::vector<double> pts, ms;
  const double step = std::log(hi / lo) / static_cast<double>(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    const double a = lo * std::exp(step * static_cast<double>(c));
    const double b = lo * std::exp(step * static_cast<double>(c + 1));
    pts.push_back(a);
    ms.push_back(std::pow(a, -alpha) - std::pow(b, -alpha));
  }
  const auto marginal = DiscreteMeasure::make_flat(1, pts, ms);
  std::vector<Coupling::Pair> pairs;
  for (std::size_t i = 0; i < marginal.size(); ++i) pairs.push_back({i, i, marginal.mass(i)});
  return Coupling(marginal, marginal, std::move(pairs));
}

MultiMapGraph graph1d(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<double> xs, ys;
  for (auto [x, y] : pairs) {
    xs.push_back(x);
    ys.push_back(y);
  }
  return MultiMapGraph(1, xs, ys, MultiMapGraph::Role::CouplingSupport);
}

}  // namespace

TEST_CASE("rescale_coupling: identity and the definition") {
  const auto mu = make_discrete({{4.0, 0.0}}, {0.01});
  const auto nu = make_discrete({{8.0, 0.0}}, {0.01});
  const Coupling pi(mu, nu, {{0, 0, 0.01}});

  const auto same = rescale_coupling(pi, 1.0, constant_scaling(1.0, 1.0, 1.0));
  CHECK(same.pairs().size() == 1);
  CHECK(same.pairs()[0].mass == 0.01);
  CHECK(same.source(0)[0] == 4.0);

  const auto scaled = rescale_coupling(pi, 100.0, constant_scaling(4.0, 8.0, 100.0));
  REQUIRE(scaled.pairs().size() == 1);
  CHECK(scaled.source(0)[0] == 1.0);
  CHECK(scaled.source(0)[1] == 0.0);
  CHECK(scaled.target(0)[0] == 1.0);
  CHECK(scaled.pairs()[0].mass == doctest::Approx(1.0));
}

TEST_CASE("rescale_coupling marginals equal rescaled marginals") {
  CounterRng rng(771);
  std::uint64_t ctr = 0;
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 3 + rng.below(ctr++, 5);
    std::vector<Vec> ps, qs;
    for (std::size_t a = 0; a < n; ++a) {
      ps.push_back({rng.uniform(ctr++, 0.5, 5.0), rng.uniform(ctr++, 0.5, 5.0)});
      qs.push_back({rng.uniform(ctr++, 0.5, 5.0), rng.uniform(ctr++, 0.5, 5.0)});
    }
    const auto mu = make_discrete(ps, std::vector<double>(n, 1.0 / n));
    const auto nu = make_discrete(qs, std::vector<double>(n, 1.0 / n));
    const auto pi = solve_exact(mu, nu);

    const double t = 7.0, b1 = 2.5, b2 = 0.75;
    const auto scaled = rescale_coupling(pi, t, constant_scaling(b1, b2, t));
    scaled.check_invariants();
    CHECK(scaled.left() == rescale_measure(mu, t, b1));
    CHECK(scaled.right() == rescale_measure(nu, t, b2));
  }
}

TEST_CASE("truncate_to_annulus") {
  const auto g = graph1d({{0.5, 1.0}, {2.0, 2.0}});
  const auto all = truncate_to_annulus(g, 0.1, 10.0);
  CHECK(all.size() == 2);
  const auto one = truncate_to_annulus(g, 1.0, 3.0);
  REQUIRE(one.size() == 1);
  CHECK(one.x(0)[0] == 2.0);
  CHECK(truncate_to_annulus(g, 5.0, 10.0).empty());
  CHECK_THROWS_AS(truncate_to_annulus(g, 3.0, 1.0), std::invalid_argument);
}

TEST_CASE("map homogeneity residuals on exact power maps") {
  // identity map on a geometric grid, gamma 1: residuals vanish at grid lambdas
  std::vector<std::pair<double, double>> id_pairs;
  for (int k = -4; k <= 8; ++k) {
    const double x = std::pow(2.0, k * 0.5);
    id_pairs.push_back({x, x});
  }
  const auto id_graph = graph1d(id_pairs);
  const auto id_stats = map_homogeneity_residual(id_graph, {2.0, 4.0}, 1.0, 1e-9);
  for (const auto& st : id_stats) {
    CHECK(st.matched > 0);
    CHECK(st.median <= 1e-12);
  }

  // y = x^2 with gamma 2
  std::vector<std::pair<double, double>> sq_pairs;
  for (int k = 0; k <= 10; ++k) {
    const double x = std::pow(2.0, k * 0.5);
    sq_pairs.push_back({x, x * x});
  }
  const auto sq_stats = map_homogeneity_residual(graph1d(sq_pairs), {2.0, 4.0}, 2.0, 1e-9);
  for (const auto& st : sq_stats) {
    CHECK(st.matched > 0);
    CHECK(st.median <= 1e-11);
  }
}

TEST_CASE("map homogeneity residual: affine map worked example") {
  // y = x + 1 with gamma 1, lambda 2, base x = 1: |3 - 4| / (1 + 4) = 0.2
  const auto g = graph1d({{1.0, 2.0}, {2.0, 3.0}});
  const auto stats = map_homogeneity_residual(g, {2.0}, 1.0, 0.5, 0.9, 1.1);
  REQUIRE(stats.size() == 1);
  CHECK(stats[0].total == 1);
  CHECK(stats[0].matched == 1);
  CHECK(stats[0].median == doctest::Approx(0.2));
}

TEST_CASE("map homogeneity residual: unmatched lambdas are reported, not fatal") {
  const auto g = graph1d({{1.0, 1.0}, {1.2, 1.2}});
  const auto stats = map_homogeneity_residual(g, {8.0}, 1.0, 0.01);
  REQUIRE(stats.size() == 1);
  CHECK(stats[0].matched == 0);
  CHECK(std::isnan(stats[0].median));
}

TEST_CASE("coupling homogeneity: discretized diagonal Pareto limit") {
  const auto pi = diagonal_pareto_limit(1.0, 0.25, 8.0, 1000);
  const auto sc = TailScaling::analytic(1.0, 1.0, {10.0});
  const std::vector<Annulus> windows{{1.0, 2.0}, {2.0, 4.0}};
  const auto cells = coupling_homogeneity_residual(pi, {1.0, 1.5, 2.0}, sc, windows);
  for (const auto& cell : cells) {
    CHECK_FALSE(cell.zero_mass);
    if (cell.lambda == 1.0)
      CHECK(cell.residual == 0.0);  // exact, not approximate
    else
      CHECK(cell.residual <= 0.02);  // discretization error only
  }
}

TEST_CASE("coupling homogeneity: point mass is not homogeneous") {
  const auto mu = make_discrete({{2.0}}, {1.0});
  const Coupling point(mu, mu, {{0, 0, 1.0}});
  const auto sc = TailScaling::analytic(1.0, 1.0, {10.0});
  const auto cells = coupling_homogeneity_residual(point, {2.0}, sc, {{1.0, 3.0}});
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].residual > 0.4);
}

TEST_CASE("potential homogeneity residuals") {
  // max-affine surrogate of x^2/2 (homogeneous of degree gamma+1 = 2):
  // pieces tangent at slope grid t_j: slope t_j, offset t_j^2/2
  std::vector<double> slopes, offsets;
  for (int j = 0; j <= 160; ++j) {
    const double tj = 0.05 * j;
    slopes.push_back(tj);
    offsets.push_back(0.5 * tj * tj);
  }
  const PolyhedralPotential quad(1, slopes, offsets);
  const auto probes = PointList(1, {0.5, 1.0, 1.5, 2.0, 3.0});
  const auto stats = potential_homogeneity_residual(quad, {1.0, 2.0}, 2.0, probes);
  REQUIRE(stats.size() == 2);
  CHECK(stats[0].median == 0.0);  // lambda = 1
  CHECK(stats[1].p90 <= 2e-3);    // grid-resolution bound

  // hinge max(0, x-1) is not homogeneous: residual 0.2 at x = 2, lambda = 2
  const PolyhedralPotential hinge(1, {0.0, 1.0}, {0.0, 1.0});
  const auto hstats = potential_homogeneity_residual(hinge, {2.0}, 2.0, PointList(1, {2.0}));
  CHECK(hstats[0].median == doctest::Approx(0.2));
}

TEST_CASE("estimate_exponent") {
  std::vector<std::pair<double, double>> id_pairs, sq_pairs, noise_pairs;
  CounterRng rng(15);
  for (int i = 0; i < 60; ++i) {
    const double x = 1.0 + 0.1 * i;
    id_pairs.push_back({x, x});
    sq_pairs.push_back({x, x * x});
    noise_pairs.push_back({x, std::exp(rng.uniform(i, -2.0, 2.0))});
  }
  const auto id_est = estimate_exponent(graph1d(id_pairs), 1.0, 10.0);
  CHECK(id_est.gamma_hat == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(id_est.std_error <= 1e-12);

  const auto sq_est = estimate_exponent(graph1d(sq_pairs), 1.0, 10.0);
  CHECK(sq_est.gamma_hat == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(sq_est.gamma_hat - 2.0) <= 3.0 * sq_est.std_error + 1e-12);

  const auto noise_est = estimate_exponent(graph1d(noise_pairs), 1.0, 10.0);
  CHECK(noise_est.std_error > 0.1);  // no silent acceptance

  CHECK_THROWS_AS(estimate_exponent(graph1d({{1.0, 1.0}, {2.0, 2.0}}), 0.5, 3.0),
                  std::invalid_argument);
}

TEST_CASE("monotone 1D Pareto oracle") {
  const auto same = monotone_map_1d(1.5, 1.5);
  CHECK(same.gamma == 1.0);
  for (double x : {1.0, 2.0, 7.5}) CHECK(same.map(x) == doctest::Approx(x).epsilon(1e-15));

  const auto sq = monotone_map_1d(2.0, 1.0);
  CHECK(sq.gamma == 2.0);
  CHECK(sq.map(3.0) == doctest::Approx(9.0));
  CHECK(sq.tail_limit(3.0) == doctest::Approx(9.0));

  // the rescaled map is the same function for every t
  for (double t : {2.0, 10.0, 1000.0}) {
    for (double x : {1.0, 1.7, 4.0}) {
      CHECK(sq.rescaled_map(x, t) == doctest::Approx(sq.tail_limit(x)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(monotone_map_1d(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("run_tail_study: identity-coupled Pareto smoke test") {
  TailStudyConfig cfg;
  cfg.alpha1 = cfg.alpha2 = 1.0;
  cfg.dim = 1;
  cfg.angular = AngularSpec::FixedDirection;
  cfg.n = 3000;
  cfg.k = 600;
  cfg.t_grid = {5.0, 30.0};
  cfg.lambdas = {1.5, 2.0};
  cfg.windows = {{1.0, 4.0}};
  cfg.fit_window = {0.5, 4.0};
  cfg.seed = 1234;
  cfg.same_measure = true;

  const auto res = run_tail_study(cfg);
  CHECK(res.empty_windows.empty());
  CHECK_FALSE(res.non_smooth_limit_regime);
  REQUIRE(res.rescaled_graphs.size() == 2);
  REQUIRE(res.m0_to_final.size() == 2);
  CHECK(res.m0_to_final[1] == 0.0);  // distance of the final coupling to itself

  // identity coupling: exponent exact, residuals at matching-error level
  CHECK(res.exponent.gamma_hat == doctest::Approx(1.0).epsilon(1e-9));
  for (const auto& st : res.map_residuals) {
    CHECK(st.matched > 0);
    CHECK(st.median <= 0.1);
  }
  for (const auto& cell : res.coupling_residuals)
    if (cell.lambda == 1.0) CHECK(cell.residual == 0.0);

  // reproducibility
  const auto res2 = run_tail_study(cfg);
  CHECK(res2.exponent.gamma_hat == res.exponent.gamma_hat);
  CHECK(res2.m0_to_final == res.m0_to_final);
  REQUIRE(res2.rescaled_graphs.back().size() == res.rescaled_graphs.back().size());
  CHECK(res2.rescaled_graphs.back().xs_flat() == res.rescaled_graphs.back().xs_flat());
}

TEST_CASE("run_tail_study: empirical deviation from the analytic map shrinks in n") {
  const auto oracle = monotone_map_1d(2.0, 1.0);
  double prev_med = -1.0;
  for (std::size_t n : {std::size_t{1000}, std::size_t{10000}}) {
    TailStudyConfig cfg;
    cfg.alpha1 = 2.0;
    cfg.alpha2 = 1.0;
    cfg.dim = 1;
    cfg.n = n;
    cfg.k = n / 5;
    cfg.t_grid = {20.0};
    cfg.lambdas = {1.5};
    cfg.windows = {{0.5, 2.0}};
    cfg.fit_window = {0.3, 2.0};  // wide enough for 20 pairs at n = 1000
    cfg.seed = 99;
    const auto res = run_tail_study(cfg);
    const auto& g = res.rescaled_graphs.back();
    std::vector<double> errs;
    for (std::size_t p = 0; p < g.size(); ++p) {
      const double x = g.x(p)[0], y = g.y(p)[0];
      if (x < 0.5 || x > 2.0) continue;
      errs.push_back(std::abs(y - oracle.tail_limit(x)) / oracle.tail_limit(x));
    }
    REQUIRE(errs.size() > 5);
    std::sort(errs.begin(), errs.end());
    const double med = errs[errs.size() / 2];
    if (prev_med >= 0.0) CHECK(med < prev_med);
    prev_med = med;
  }
}

TEST_CASE("run_tail_study: empirical b mode stays near the analytic normalization") {
  TailStudyConfig cfg;
  cfg.alpha1 = cfg.alpha2 = 1.0;
  cfg.dim = 1;
  cfg.n = 4000;
  cfg.k = 500;
  cfg.t_grid = {5.0, 25.0};
  cfg.lambdas = {1.5};
  cfg.windows = {{0.5, 4.0}};
  cfg.fit_window = {0.3, 4.0};
  cfg.seed = 555;
  cfg.b_mode = "empirical";
  cfg.same_measure = true;
  const auto res = run_tail_study(cfg);
  CHECK(res.b_mode_used == "empirical");
  CHECK(res.exponent.gamma_hat == doctest::Approx(1.0).epsilon(1e-9));
  for (const auto& st : res.map_residuals) CHECK(st.median <= 0.15);
}

TEST_CASE("run_tail_study validation gates") {
  TailStudyConfig cfg;
  cfg.n = 100;
  cfg.k = 200;  // k > n
  CHECK_THROWS_AS(run_tail_study(cfg), std::invalid_argument);

  TailStudyConfig cfg2;
  cfg2.n = 500;
  cfg2.k = 100;
  cfg2.t_grid = {100.0};  // exceeds n/10
  CHECK_THROWS_AS(run_tail_study(cfg2), std::invalid_argument);
}
