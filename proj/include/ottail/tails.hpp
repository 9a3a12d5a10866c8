#ifndef OTTAIL_TAILS_HPP
#define OTTAIL_TAILS_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ottail/convex.hpp"
#include "ottail/measures.hpp"
#include "ottail/transport.hpp"

namespace ot {

// t * pi(B(t) .): pairs (x, y) -> (x / b1(t), y / b2(t)), masses * t.
// Marginals of the result equal the same rescaling of the input marginals.
Coupling rescale_coupling(const Coupling& pi, double t, const TailScaling& scaling);

// The rescaled coupling viewed as a measure on the product space R^{2d}.
DiscreteMeasure coupling_as_product_measure(const Coupling& pi);

// Support pairs of a coupling as a graph sample.
MultiMapGraph support_graph(const Coupling& pi);

// Keeps pairs with r_in <= |x| <= r_out.  May return an empty graph.
MultiMapGraph truncate_to_annulus(const MultiMapGraph& graph, double r_in, double r_out);

struct ResidualStats {
  double lambda = 0.0;
  std::size_t matched = 0;
  std::size_t total = 0;
  double median = std::numeric_limits<double>::quiet_NaN();
  double p90 = std::numeric_limits<double>::quiet_NaN();
};

// Residuals of the map-homogeneity law y(lambda x) ~ lambda^gamma y(x): for
// every base pair and every lambda, the nearest-abscissa match to lambda x is
// accepted within tol_match and contributes |y' - lambda^gamma y| /
// (1 + lambda^gamma |y|).  Base pairs may be restricted to an annulus window;
// matches always search the whole graph.  tol_match <= 0 selects the default
// of twice the median nearest-neighbor spacing of the window's abscissae.
std::vector<ResidualStats> map_homogeneity_residual(const MultiMapGraph& graph,
                                                    const std::vector<double>& lambdas,
                                                    double gamma, double tol_match,
                                                    double base_r_in = 0.0,
                                                    double base_r_out =
                                                        std::numeric_limits<double>::infinity());

struct Annulus {
  double r_in;
  double r_out;
};

struct CouplingResidualCell {
  Annulus window{0, 0};
  double lambda = 0.0;
  double mass_window = 0.0;  // lambda * pi(window)
  double mass_scaled = 0.0;  // pi(window shrunk by lambda^{-E} on the source side)
  double residual = 0.0;
  bool zero_mass = false;
};

// Residuals of the coupling-homogeneity law pi(lambda^{-E} A) = lambda pi(A)
// for source-radius annuli A, where lambda^{-E} contracts source radii by
// lambda^{-1/alpha1}.  Exactly zero at lambda = 1.
std::vector<CouplingResidualCell> coupling_homogeneity_residual(
    const Coupling& pi, const std::vector<double>& lambdas, const TailScaling& scaling,
    const std::vector<Annulus>& windows);

// Residuals of psi(lambda x) ~ lambda^{gamma+1} psi(x) over probe points,
// after shifting psi so that psi(0) = 0.
std::vector<ResidualStats> potential_homogeneity_residual(const PolyhedralPotential& psi,
                                                          const std::vector<double>& lambdas,
                                                          double gamma_plus_one,
                                                          const PointList& probes);

struct ExponentEstimate {
  double gamma_hat = std::numeric_limits<double>::quiet_NaN();
  double std_error = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_pairs = 0;
};

// Least-squares slope of log|y| on log|x| over pairs with |x| in the window.
// Requires at least 20 usable pairs.
ExponentEstimate estimate_exponent(const MultiMapGraph& graph, double r_in, double r_out);

// 1D quantile-coupling oracle between standard Pareto(alpha1) and
// Pareto(alpha2) marginals: T(x) = x^{alpha1/alpha2} for x >= 1, and the
// rescaled map x -> T(b1(t) x) / b2(t) with b_i(t) = t^{1/alpha_i} equals
// x^{alpha1/alpha2} for every t.
struct MonotonePareto1d {
  double alpha1;
  double alpha2;
  double gamma;  // alpha1 / alpha2

  double map(double x) const;                    // quantile coupling
  double rescaled_map(double x, double t) const; // T(b1(t) x) / b2(t)
  double tail_limit(double x) const;             // x^gamma
};

MonotonePareto1d monotone_map_1d(double alpha1, double alpha2);

struct TailStudyConfig {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  int dim = 1;
  AngularSpec angular = AngularSpec::FixedDirection;
  std::size_t n = 10000;
  std::size_t k = 1500;
  std::vector<double> t_grid{10.0, 100.0};
  std::vector<double> lambdas{1.5, 2.0};
  std::vector<Annulus> windows{{1.0, 4.0}};
  Annulus fit_window{0.5, 4.0};
  std::uint64_t seed = 0;
  std::string b_mode = "analytic";  // or "empirical"
  bool same_measure = false;        // nu is the very same sample as mu
};

struct TailStudyResult {
  TailStudyConfig config;
  std::vector<double> t_grid;
  std::vector<MultiMapGraph> rescaled_graphs;     // truncated to the widest window span
  std::vector<Coupling> rescaled_couplings;       // untruncated, one per t
  std::vector<double> m0_to_final;                // product-space distance to final t
  std::vector<ResidualStats> map_residuals;       // final t, per (window, lambda)
  std::vector<Annulus> map_residual_windows;      // parallel to map_residuals
  std::vector<std::vector<ResidualStats>> per_t_map_residuals;  // per t, per lambda
  std::vector<CouplingResidualCell> coupling_residuals;         // final t
  ExponentEstimate exponent;                      // final t, fit window
  std::string b_mode_used;
  bool non_smooth_limit_regime = false;  // fixed-direction angular in dim >= 2
  std::vector<std::size_t> empty_windows;  // t indices whose truncation came up empty
};

// End-to-end pipeline: sample both marginals (n atoms each), quantize to k
// atoms by radial strata, solve the exact coupling, rescale along the t grid,
// truncate, and compute discrepancies, residuals and the exponent estimate.
// Fully reproducible from the seed.
TailStudyResult run_tail_study(const TailStudyConfig& cfg);

}  // namespace ot

#endif  // OTTAIL_TAILS_HPP
