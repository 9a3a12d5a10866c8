#include "ottail/tails.hpp"

#include <algorithm>
#include <cmath>

#include "ottail/kernels.hpp"

namespace ot {

namespace {

// Position of a point in the canonical order of a measure.
std::size_t locate_atom(const DiscreteMeasure& m, std::span<const double> pt) {
  std::size_t lo = 0, hi = m.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (lex_compare(m.point(mid), pt) < 0)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo == m.size() || lex_compare(m.point(lo), pt) != 0)
    throw std::logic_error("rescale_coupling: atom lookup failed");
  return lo;
}

double quantile(std::vector<double>& v, double p) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double rank = p * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(rank);
  if (lo + 1 >= v.size()) return v.back();
  const double frac = rank - static_cast<double>(lo);
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

}  // namespace

Coupling rescale_coupling(const Coupling& pi, double t, const TailScaling& scaling) {
  if (!(t > 0.0)) throw std::invalid_argument("rescale_coupling: t must be positive");
  const double b1 = scaling.b1(t), b2 = scaling.b2(t);

  DiscreteMeasure left = rescale_measure(pi.left(), t, b1);
  DiscreteMeasure right = rescale_measure(pi.right(), t, b2);

  const int d = pi.dim();
  Vec sx(d), sy(d);
  std::vector<Coupling::Pair> pairs;
  pairs.reserve(pi.pairs().size());
  for (std::size_t p = 0; p < pi.pairs().size(); ++p) {
    const auto& pr = pi.pairs()[p];
    for (int c = 0; c < d; ++c) {
      sx[c] = pi.source(p)[c] / b1;
      sy[c] = pi.target(p)[c] / b2;
    }
    pairs.push_back({locate_atom(left, sx), locate_atom(right, sy), pr.mass * t});
  }
  // Rescaling can merge nearby atoms in floating point; merge duplicate index
  // pairs so the support stays canonical.
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  std::vector<Coupling::Pair> merged;
  for (const auto& pr : pairs) {
    if (!merged.empty() && merged.back().i == pr.i && merged.back().j == pr.j)
      merged.back().mass += pr.mass;
    else
      merged.push_back(pr);
  }
  return Coupling(std::move(left), std::move(right), std::move(merged));
}

DiscreteMeasure coupling_as_product_measure(const Coupling& pi) {
  const int d = pi.dim();
  std::vector<double> pts;
  std::vector<double> ms;
  pts.reserve(pi.pairs().size() * 2 * d);
  ms.reserve(pi.pairs().size());
  for (std::size_t p = 0; p < pi.pairs().size(); ++p) {
    auto x = pi.source(p), y = pi.target(p);
    pts.insert(pts.end(), x.begin(), x.end());
    pts.insert(pts.end(), y.begin(), y.end());
    ms.push_back(pi.pairs()[p].mass);
  }
  return DiscreteMeasure::make_flat(2 * d, std::move(pts), std::move(ms));
}

MultiMapGraph support_graph(const Coupling& pi) {
  const int d = pi.dim();
  std::vector<double> xs, ys;
  xs.reserve(pi.pairs().size() * d);
  ys.reserve(pi.pairs().size() * d);
  for (std::size_t p = 0; p < pi.pairs().size(); ++p) {
    auto x = pi.source(p), y = pi.target(p);
    xs.insert(xs.end(), x.begin(), x.end());
    ys.insert(ys.end(), y.begin(), y.end());
  }
  return MultiMapGraph(d, std::move(xs), std::move(ys), MultiMapGraph::Role::CouplingSupport);
}

MultiMapGraph truncate_to_annulus(const MultiMapGraph& graph, double r_in, double r_out) {
  if (!(0.0 < r_in) || !(r_in < r_out))
    throw std::invalid_argument("truncate_to_annulus: need 0 < r_in < r_out");
  const int d = graph.dim();
  std::vector<double> xs, ys;
  for (std::size_t p = 0; p < graph.size(); ++p) {
    const double r = norm(graph.x(p));
    if (r_in <= r && r <= r_out) {
      xs.insert(xs.end(), graph.x(p).begin(), graph.x(p).end());
      ys.insert(ys.end(), graph.y(p).begin(), graph.y(p).end());
    }
  }
  return MultiMapGraph(d, std::move(xs), std::move(ys), graph.role());
}

std::vector<ResidualStats> map_homogeneity_residual(const MultiMapGraph& graph,
                                                    const std::vector<double>& lambdas,
                                                    double gamma, double tol_match,
                                                    double base_r_in, double base_r_out) {
  if (graph.empty()) throw std::invalid_argument("map_homogeneity_residual: empty graph");
  for (double l : lambdas)
    if (!(l > 0.0)) throw std::invalid_argument("map_homogeneity_residual: lambda must be positive");

  const int d = graph.dim();
  const std::size_t P = graph.size();
  const PointList xs = graph.abscissae();

  std::vector<char> base_mask(P, 0);
  for (std::size_t p = 0; p < P; ++p) {
    const double r = norm(graph.x(p));
    base_mask[p] = (base_r_in <= r && r <= base_r_out) ? 1 : 0;
  }

  if (tol_match <= 0.0) tol_match = 2.0 * kernels::median_nn_spacing(xs, base_mask);

  std::vector<ResidualStats> out;
  for (double lambda : lambdas) {
    const double factor = std::pow(lambda, gamma);
    std::vector<double> res(P, std::numeric_limits<double>::quiet_NaN());
    const long np = static_cast<long>(P);
#pragma omp parallel for schedule(static)
    for (long p = 0; p < np; ++p) {
      if (!base_mask[static_cast<std::size_t>(p)]) continue;
      Vec target(d);
      for (int c = 0; c < d; ++c) target[c] = lambda * graph.x(static_cast<std::size_t>(p))[c];
      const long q = kernels::nearest_index(xs, target);
      if (q < 0 || dist(xs[static_cast<std::size_t>(q)], target) > tol_match) continue;
      double num = 0.0, ynorm = 0.0;
      for (int c = 0; c < d; ++c) {
        const double scaled = factor * graph.y(static_cast<std::size_t>(p))[c];
        const double dv = graph.y(static_cast<std::size_t>(q))[c] - scaled;
        num += dv * dv;
        ynorm += scaled * scaled;
      }
      res[static_cast<std::size_t>(p)] = std::sqrt(num) / (1.0 + std::sqrt(ynorm));
    }

    ResidualStats st;
    st.lambda = lambda;
    std::vector<double> good;
    for (std::size_t p = 0; p < P; ++p) {
      if (!base_mask[p]) continue;
      ++st.total;
      if (!std::isnan(res[p])) good.push_back(res[p]);
    }
    st.matched = good.size();
    st.median = quantile(good, 0.5);
    st.p90 = quantile(good, 0.9);
    out.push_back(st);
  }
  return out;
}

std::vector<CouplingResidualCell> coupling_homogeneity_residual(
    const Coupling& pi, const std::vector<double>& lambdas, const TailScaling& scaling,
    const std::vector<Annulus>& windows) {
  for (const auto& w : windows)
    if (!(w.r_in > 0.0) || !(w.r_in < w.r_out))
      throw std::invalid_argument("coupling_homogeneity_residual: window not bounded away from 0");

  const std::size_t P = pi.pairs().size();
  std::vector<double> radii(P);
  for (std::size_t p = 0; p < P; ++p) radii[p] = norm(pi.source(p));

  std::vector<CouplingResidualCell> out;
  for (const auto& win : windows) {
    for (double lambda : lambdas) {
      const double factor = std::pow(lambda, 1.0 / scaling.alpha1());
      double mass_win = 0.0, mass_scaled = 0.0;
      for (std::size_t p = 0; p < P; ++p) {
        const double m = pi.pairs()[p].mass;
        if (win.r_in <= radii[p] && radii[p] <= win.r_out) mass_win += m;
        const double rs = factor * radii[p];
        if (win.r_in <= rs && rs <= win.r_out) mass_scaled += m;
      }
      CouplingResidualCell cell;
      cell.window = win;
      cell.lambda = lambda;
      cell.mass_window = lambda * mass_win;
      cell.mass_scaled = mass_scaled;
      cell.zero_mass = (mass_win == 0.0);
      cell.residual = std::abs(mass_scaled - lambda * mass_win) / (lambda * mass_win + 1e-12);
      out.push_back(cell);
    }
  }
  return out;
}

std::vector<ResidualStats> potential_homogeneity_residual(const PolyhedralPotential& psi,
                                                          const std::vector<double>& lambdas,
                                                          double gamma_plus_one,
                                                          const PointList& probes) {
  if (probes.empty())
    throw std::invalid_argument("potential_homogeneity_residual: no probe points");
  const int d = psi.dim();
  if (probes.dim() != d)
    throw std::invalid_argument("potential_homogeneity_residual: dimension mismatch");

  const Vec origin(d, 0.0);
  const double shift = psi.value(origin);  // normalize to psi(0) = 0

  std::vector<ResidualStats> out;
  for (double lambda : lambdas) {
    const double factor = std::pow(lambda, gamma_plus_one);
    std::vector<double> res(probes.size());
    const long np = static_cast<long>(probes.size());
#pragma omp parallel for schedule(static)
    for (long p = 0; p < np; ++p) {
      const auto x = probes[static_cast<std::size_t>(p)];
      Vec lx(d);
      for (int c = 0; c < d; ++c) lx[c] = lambda * x[c];
      const double v = psi.value(x) - shift;
      const double vl = psi.value(lx) - shift;
      res[static_cast<std::size_t>(p)] =
          std::abs(vl - factor * v) / (1.0 + factor * std::abs(v));
    }
    ResidualStats st;
    st.lambda = lambda;
    st.total = st.matched = probes.size();
    st.median = quantile(res, 0.5);
    st.p90 = quantile(res, 0.9);
    out.push_back(st);
  }
  return out;
}

ExponentEstimate estimate_exponent(const MultiMapGraph& graph, double r_in, double r_out) {
  std::vector<double> lx, ly;
  for (std::size_t p = 0; p < graph.size(); ++p) {
    const double rx = norm(graph.x(p)), ry = norm(graph.y(p));
    if (rx < r_in || rx > r_out || rx == 0.0 || ry == 0.0) continue;
    lx.push_back(std::log(rx));
    ly.push_back(std::log(ry));
  }
  const std::size_t n = lx.size();
  if (n < 20)
    throw std::invalid_argument("estimate_exponent: fewer than 20 pairs in the fitting window");

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = lx[i] - mx, dy = ly[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0)
    throw std::invalid_argument("estimate_exponent: degenerate abscissae in the window");

  ExponentEstimate est;
  est.n_pairs = n;
  est.gamma_hat = sxy / sxx;
  const double rss = std::max(0.0, syy - est.gamma_hat * sxy);
  est.std_error = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  return est;
}

double MonotonePareto1d::map(double x) const { return x <= 1.0 ? 1.0 : std::pow(x, gamma); }

double MonotonePareto1d::rescaled_map(double x, double t) const {
  return map(std::pow(t, 1.0 / alpha1) * x) / std::pow(t, 1.0 / alpha2);
}

double MonotonePareto1d::tail_limit(double x) const { return std::pow(x, gamma); }

MonotonePareto1d monotone_map_1d(double alpha1, double alpha2) {
  if (!(alpha1 > 0.0) || !(alpha2 > 0.0))
    throw std::invalid_argument("monotone_map_1d: alpha must be positive");
  return MonotonePareto1d{alpha1, alpha2, alpha1 / alpha2};
}

TailStudyResult run_tail_study(const TailStudyConfig& cfg) {
  if (cfg.k < 2 || cfg.n < cfg.k)
    throw std::invalid_argument("run_tail_study: need n >= k >= 2");
  if (cfg.t_grid.empty()) throw std::invalid_argument("run_tail_study: empty t grid");
  const double t_max = cfg.t_grid.back();
  if (t_max > static_cast<double>(cfg.n) / 10.0)
    throw std::invalid_argument(
        "run_tail_study: max t exceeds n/10, the quantile range constraint");
  if (cfg.windows.empty()) throw std::invalid_argument("run_tail_study: no windows");
  if (cfg.b_mode != "analytic" && cfg.b_mode != "empirical")
    throw std::invalid_argument("run_tail_study: b_mode must be analytic or empirical");

  TailStudyResult res;
  res.config = cfg;
  res.t_grid = cfg.t_grid;
  res.b_mode_used = cfg.b_mode;
  res.non_smooth_limit_regime =
      (cfg.angular == AngularSpec::FixedDirection && cfg.dim >= 2);

  const DiscreteMeasure mu =
      sample_regularly_varying(cfg.alpha1, cfg.angular, cfg.dim, cfg.n, cfg.seed, 0);
  const DiscreteMeasure nu =
      cfg.same_measure
          ? mu
          : sample_regularly_varying(cfg.alpha2, cfg.angular, cfg.dim, cfg.n, cfg.seed, 1);

  const DiscreteMeasure mu_k = quantize_radial(mu, cfg.k, cfg.seed, 2);
  const DiscreteMeasure nu_k = cfg.same_measure ? mu_k : quantize_radial(nu, cfg.k, cfg.seed, 3);

  const TailScaling scaling =
      cfg.b_mode == "analytic"
          ? TailScaling::analytic(cfg.alpha1, cfg.alpha2, cfg.t_grid)
          : TailScaling::empirical(mu, nu, cfg.alpha1, cfg.alpha2, cfg.t_grid);

  const Coupling pi = solve_exact(mu_k, nu_k);

  // Graphs keep every pair that any window or lambda-match can touch.
  double span_lo = std::numeric_limits<double>::infinity(), span_hi = 0.0;
  for (const auto& w : cfg.windows) {
    span_lo = std::min(span_lo, w.r_in);
    span_hi = std::max(span_hi, w.r_out);
  }
  span_lo = std::min(span_lo, cfg.fit_window.r_in);
  span_hi = std::max(span_hi, cfg.fit_window.r_out);
  double lam_lo = 1.0, lam_hi = 1.0;
  for (double l : cfg.lambdas) {
    lam_lo = std::min(lam_lo, l);
    lam_hi = std::max(lam_hi, l);
  }
  span_lo *= lam_lo;
  span_hi *= lam_hi;

  const std::size_t nt = cfg.t_grid.size();
  res.rescaled_couplings.reserve(nt);
  for (std::size_t ti = 0; ti < nt; ++ti)
    res.rescaled_couplings.push_back(rescale_coupling(pi, cfg.t_grid[ti], scaling));

  std::vector<MultiMapGraph> graphs;
  graphs.reserve(nt);
  for (std::size_t ti = 0; ti < nt; ++ti) {
    MultiMapGraph g = truncate_to_annulus(support_graph(res.rescaled_couplings[ti]),
                                          span_lo, span_hi);
    if (g.empty()) res.empty_windows.push_back(ti);
    graphs.push_back(std::move(g));
  }
  res.rescaled_graphs = graphs;

  // Product-space discrepancy of each rescaled coupling to the final one.
  const auto family = default_test_family();
  res.m0_to_final.assign(nt, 0.0);
  const DiscreteMeasure final_prod = coupling_as_product_measure(res.rescaled_couplings.back());
  const long lnt = static_cast<long>(nt);
#pragma omp parallel for schedule(dynamic)
  for (long ti = 0; ti < lnt; ++ti) {
    const DiscreteMeasure prod =
        coupling_as_product_measure(res.rescaled_couplings[static_cast<std::size_t>(ti)]);
    res.m0_to_final[static_cast<std::size_t>(ti)] = m0_distance(prod, final_prod, family);
  }

  const double gamma = cfg.alpha1 / cfg.alpha2;
  res.per_t_map_residuals.assign(nt, {});
  for (std::size_t ti = 0; ti < nt; ++ti) {
    if (graphs[ti].empty()) continue;
    res.per_t_map_residuals[ti] =
        map_homogeneity_residual(graphs[ti], cfg.lambdas, gamma, 0.0,
                                 cfg.windows.front().r_in, cfg.windows.front().r_out);
  }

  if (!graphs.back().empty()) {
    for (const auto& w : cfg.windows) {
      auto stats = map_homogeneity_residual(graphs.back(), cfg.lambdas, gamma, 0.0,
                                            w.r_in, w.r_out);
      for (const auto& st : stats) {
        res.map_residuals.push_back(st);
        res.map_residual_windows.push_back(w);
      }
    }
    res.coupling_residuals = coupling_homogeneity_residual(res.rescaled_couplings.back(),
                                                           cfg.lambdas, scaling, cfg.windows);
    res.exponent =
        estimate_exponent(graphs.back(), cfg.fit_window.r_in, cfg.fit_window.r_out);
  }

  return res;
}

}  // namespace ot
