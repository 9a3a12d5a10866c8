#include <omp.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ottail/io.hpp"
#include "ottail/kernels.hpp"
#include "ottail/tails.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitAudit = 3;
constexpr int kExitViolation = 4;
constexpr int kExitEmptyWindow = 5;

json violation_json(const ot::CycleViolation& v) {
  json cyc = json::array();
  for (const auto& [x, y] : v.cycle) cyc.push_back({{"x", x}, {"y", y}});
  return {{"lhs_cost", v.lhs_cost}, {"rhs_cost", v.rhs_cost}, {"cycle", cyc}};
}

int cmd_solve(const std::string& mu_file, const std::string& nu_file,
              const std::string& out_file, std::string summary_file) {
  ot::DiscreteMeasure mu = ot::io::read_measure(mu_file);
  ot::DiscreteMeasure nu = ot::io::read_measure(nu_file);

  const double ma = mu.total_mass(), mb = nu.total_mass();
  if (std::abs(ma - mb) > 1e-12 * std::max(ma, mb)) {
    std::cerr << "solve: total masses do not balance: mu has " << ot::io::format_double(ma)
              << ", nu has " << ot::io::format_double(mb) << "\n";
    return kExitValidation;
  }

  const ot::Coupling pi = ot::solve_exact(mu, nu);
  ot::io::write_coupling_csv(out_file, pi);

  const auto report = ot::verify_cyclic_monotonicity(pi, 4, 1e-9);
  std::string verdict = report.exhaustive ? "pass" : "sampled-pass";
  if (!report.passed()) verdict = "violation";

  json summary;
  summary["cost"] = json::parse(ot::io::format_double(ot::transport_cost(pi)));
  summary["pairs"] = pi.pairs().size();
  summary["monotonicity"] = verdict;
  if (summary_file.empty()) summary_file = out_file + ".summary.json";
  std::ofstream out(summary_file);
  out << summary.dump(2) << "\n";
  std::cout << summary.dump() << "\n";

  if (!report.passed()) {
    std::cerr << "solve: own output failed the monotonicity audit\n";
    return kExitAudit;
  }
  return 0;
}

int cmd_verify(const std::string& coupling_file, int max_cycle_len, double tol,
               std::size_t budget, std::uint64_t seed) {
  const ot::Coupling pi = ot::io::read_coupling_csv(coupling_file);
  const auto report = ot::verify_cyclic_monotonicity(pi, max_cycle_len, tol, budget, seed);
  json j;
  j["mode"] = report.exhaustive ? "exhaustive" : "sampled";
  j["cycles_checked"] = report.cycles_checked;
  if (report.passed()) {
    j["result"] = "pass";
    std::cout << j.dump() << "\n";
    return 0;
  }
  j["result"] = "violation";
  j["witness"] = violation_json(*report.violation);
  std::cout << j.dump() << "\n";
  return kExitViolation;
}

std::string csv_graphs(const ot::TailStudyResult& res) {
  std::ostringstream os;
  const int d = res.config.dim;
  os << "t";
  for (int c = 1; c <= d; ++c) os << ",x" << c;
  for (int c = 1; c <= d; ++c) os << ",y" << c;
  os << "\n";
  for (std::size_t ti = 0; ti < res.t_grid.size(); ++ti) {
    const auto& g = res.rescaled_graphs[ti];
    for (std::size_t p = 0; p < g.size(); ++p) {
      os << ot::io::format_double(res.t_grid[ti]);
      for (double c : g.x(p)) os << "," << ot::io::format_double(c);
      for (double c : g.y(p)) os << "," << ot::io::format_double(c);
      os << "\n";
    }
  }
  return os.str();
}

std::string csv_m0(const ot::TailStudyResult& res) {
  std::ostringstream os;
  os << "t,m0_to_final\n";
  for (std::size_t ti = 0; ti < res.t_grid.size(); ++ti)
    os << ot::io::format_double(res.t_grid[ti]) << ","
       << ot::io::format_double(res.m0_to_final[ti]) << "\n";
  return os.str();
}

std::string csv_map_residuals(const ot::TailStudyResult& res) {
  std::ostringstream os;
  os << "window_r_in,window_r_out,lambda,matched,total,median,p90\n";
  for (std::size_t r = 0; r < res.map_residuals.size(); ++r) {
    const auto& st = res.map_residuals[r];
    const auto& w = res.map_residual_windows[r];
    os << ot::io::format_double(w.r_in) << "," << ot::io::format_double(w.r_out) << ","
       << ot::io::format_double(st.lambda) << "," << st.matched << "," << st.total << ","
       << ot::io::format_double(st.median) << "," << ot::io::format_double(st.p90) << "\n";
  }
  return os.str();
}

std::string csv_coupling_residuals(const ot::TailStudyResult& res) {
  std::ostringstream os;
  os << "window_r_in,window_r_out,lambda,mass_window,mass_scaled,residual,zero_mass\n";
  for (const auto& cell : res.coupling_residuals) {
    os << ot::io::format_double(cell.window.r_in) << ","
       << ot::io::format_double(cell.window.r_out) << "," << ot::io::format_double(cell.lambda)
       << "," << ot::io::format_double(cell.mass_window) << ","
       << ot::io::format_double(cell.mass_scaled) << "," << ot::io::format_double(cell.residual)
       << "," << (cell.zero_mass ? 1 : 0) << "\n";
  }
  return os.str();
}

std::string csv_exponent(const ot::TailStudyResult& res) {
  std::ostringstream os;
  os << "gamma_hat,std_error,n_pairs,fit_r_in,fit_r_out\n";
  os << ot::io::format_double(res.exponent.gamma_hat) << ","
     << ot::io::format_double(res.exponent.std_error) << "," << res.exponent.n_pairs << ","
     << ot::io::format_double(res.config.fit_window.r_in) << ","
     << ot::io::format_double(res.config.fit_window.r_out) << "\n";
  return os.str();
}

std::string csv_plot_residuals(const ot::TailStudyResult& res) {
  std::ostringstream os;
  os << "log_t,lambda,median_residual\n";
  for (std::size_t ti = 0; ti < res.t_grid.size(); ++ti) {
    for (const auto& st : res.per_t_map_residuals[ti]) {
      os << ot::io::format_double(std::log(res.t_grid[ti])) << ","
         << ot::io::format_double(st.lambda) << "," << ot::io::format_double(st.median) << "\n";
    }
  }
  return os.str();
}

std::string csv_plot_loglog(const ot::TailStudyResult& res) {
  std::ostringstream os;
  os << "log_x,log_y\n";
  if (!res.rescaled_graphs.empty()) {
    const auto& g = res.rescaled_graphs.back();
    for (std::size_t p = 0; p < g.size(); ++p) {
      const double rx = ot::norm(g.x(p)), ry = ot::norm(g.y(p));
      if (rx > 0.0 && ry > 0.0)
        os << ot::io::format_double(std::log(rx)) << "," << ot::io::format_double(std::log(ry))
           << "\n";
    }
  }
  return os.str();
}

int cmd_tail_study(const std::string& config_file, const std::string& out_dir, bool strict,
                   long seed_override) {
  ot::TailStudyConfig cfg = ot::io::read_study_config(config_file, strict);
  if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);

  ot::io::RunManifest manifest;
  manifest.started = ot::io::timestamp_utc();
  manifest.config_hash = ot::io::fnv1a64(ot::io::canonical_config_string(cfg));
  manifest.seeds = {cfg.seed};

  const ot::TailStudyResult res = ot::run_tail_study(cfg);

  fs::create_directories(out_dir);
  const std::vector<std::pair<std::string, std::string>> tables = {
      {"rescaled_graphs.csv", csv_graphs(res)},
      {"m0_discrepancies.csv", csv_m0(res)},
      {"map_residuals.csv", csv_map_residuals(res)},
      {"coupling_residuals.csv", csv_coupling_residuals(res)},
      {"exponent.csv", csv_exponent(res)},
      {"plot_residual_medians.csv", csv_plot_residuals(res)},
      {"plot_loglog_scatter.csv", csv_plot_loglog(res)},
  };
  for (const auto& [name, content] : tables) {
    std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
    out << content;
    manifest.files.push_back({name, ot::io::fnv1a64(content)});
  }

  int status = 0;
  if (!res.empty_windows.empty()) {
    std::cerr << "tail-study: empty truncation window at " << res.empty_windows.size()
              << " grid point(s)\n";
    if (strict) status = kExitEmptyWindow;
  }
  if (res.non_smooth_limit_regime)
    std::cerr << "tail-study: fixed-direction angular in dim >= 2; "
                 "non-smooth-limit regime, homogeneity diagnostics are heuristic\n";

  manifest.finished = ot::io::timestamp_utc();
  manifest.exit_status = status;
  ot::io::write_manifest(fs::path(out_dir) / "manifest.json", manifest);

  json brief;
  brief["out_dir"] = out_dir;
  brief["gamma_hat"] = res.exponent.gamma_hat;
  brief["gamma_std_error"] = res.exponent.std_error;
  brief["b_mode"] = res.b_mode_used;
  std::cout << brief.dump() << "\n";
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact quadratic-cost optimal transport for finitely supported measures,\n"
               "with cyclic-monotonicity verification and tail-rescaling studies."};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: hardware)");

  auto* solve = app.add_subcommand("solve", "solve the exact coupling between two measures");
  std::string mu_file, nu_file, out_file, summary_file;
  solve->add_option("--mu", mu_file, "left measure JSON")->required();
  solve->add_option("--nu", nu_file, "right measure JSON")->required();
  solve->add_option("--out", out_file, "output coupling CSV")->required();
  solve->add_option("--summary", summary_file, "output summary JSON");

  auto* verify = app.add_subcommand("verify", "check a coupling file for cyclic monotonicity");
  std::string coupling_file;
  int max_cycle_len = 4;
  double tol = 1e-9;
  std::size_t budget = 20000;
  std::uint64_t vseed = 0;
  verify->add_option("--coupling", coupling_file, "coupling CSV")->required();
  verify->add_option("--max-cycle-len", max_cycle_len, "maximum cycle length");
  verify->add_option("--tol", tol, "relative tolerance");
  verify->add_option("--budget", budget, "sampled cycles for large supports");
  verify->add_option("--seed", vseed, "seed for sampled cycles");

  auto* study = app.add_subcommand("tail-study", "run a tail-rescaling study from a config");
  std::string config_file, out_dir;
  bool strict = false;
  long seed_override = -1;
  study->add_option("--config", config_file, "study config JSON")->required();
  study->add_option("--out", out_dir, "output directory")->required();
  study->add_flag("--strict", strict, "reject unknown config fields; empty windows become fatal");
  study->add_option("--seed", seed_override, "override the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (solve->parsed()) return cmd_solve(mu_file, nu_file, out_file, summary_file);
    if (verify->parsed())
      return cmd_verify(coupling_file, max_cycle_len, tol, budget, vseed);
    if (study->parsed()) return cmd_tail_study(config_file, out_dir, strict, seed_override);
  } catch (const ot::io::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ot::SolverAuditError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAudit;
  } catch (const ot::SlacknessError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAudit;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
