#include "ottail/io.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ot::io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

json load_json(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
  return j;
}

double mass_value(const json& v, const std::filesystem::path& file) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      std::size_t used = 0;
      const double parsed = std::stod(v.get<std::string>(), &used);
      if (used != v.get<std::string>().size()) throw std::invalid_argument("trailing bytes");
      return parsed;
    } catch (const std::exception&) {
      throw ParseError(file.string() + ": malformed mass string");
    }
  }
  throw ParseError(file.string() + ": mass must be a number or decimal string");
}

}  // namespace

DiscreteMeasure read_measure(const std::filesystem::path& file) {
  const json j = load_json(file);
  if (!j.is_object() || !j.contains("dim") || !j.contains("points") || !j.contains("masses"))
    throw ParseError(file.string() + ": expected {dim, points, masses}");
  const int dim = j["dim"].get<int>();
  const auto& pts = j["points"];
  const auto& ms = j["masses"];
  if (!pts.is_array() || !ms.is_array() || pts.size() != ms.size())
    throw ParseError(file.string() + ": points/masses must be arrays of equal length");

  std::vector<double> flat;
  std::vector<double> masses;
  flat.reserve(pts.size() * dim);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!pts[i].is_array() || static_cast<int>(pts[i].size()) != dim)
      throw ParseError(file.string() + ": point dimension mismatch");
    for (const auto& c : pts[i]) flat.push_back(c.get<double>());
    masses.push_back(mass_value(ms[i], file));
  }
  try {
    return DiscreteMeasure::make_flat(dim, std::move(flat), std::move(masses));
  } catch (const std::invalid_argument& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
}

void write_measure(const std::filesystem::path& file, const DiscreteMeasure& mu) {
  json j;
  j["dim"] = mu.dim();
  json pts = json::array(), ms = json::array();
  for (std::size_t i = 0; i < mu.size(); ++i) {
    json p = json::array();
    for (double c : mu.point(i)) p.push_back(json::parse(format_double(c)));
    pts.push_back(p);
    ms.push_back(json::parse(format_double(mu.mass(i))));
  }
  j["points"] = pts;
  j["masses"] = ms;
  std::ofstream out(file);
  out << j.dump(2) << "\n";
}

void write_coupling_csv(const std::filesystem::path& file, const Coupling& pi) {
  std::ofstream out(file);
  const int d = pi.dim();
  out << "i,j,mass";
  for (int c = 1; c <= d; ++c) out << ",x" << c;
  for (int c = 1; c <= d; ++c) out << ",y" << c;
  out << "\n";
  for (std::size_t p = 0; p < pi.pairs().size(); ++p) {
    const auto& pr = pi.pairs()[p];
    out << pr.i << "," << pr.j << "," << format_double(pr.mass);
    for (double c : pi.source(p)) out << "," << format_double(c);
    for (double c : pi.target(p)) out << "," << format_double(c);
    out << "\n";
  }
}

Coupling read_coupling_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open " + file.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(file.string() + ": empty file");

  // Header fixes the dimension: i,j,mass then 2d coordinate columns.
  std::size_t cols = 1;
  for (char c : line) cols += (c == ',');
  if (cols < 5 || (cols - 3) % 2 != 0)
    throw ParseError(file.string() + ": malformed coupling header");
  const int d = static_cast<int>((cols - 3) / 2);
  if (line.rfind("i,j,mass", 0) != 0)
    throw ParseError(file.string() + ": expected header i,j,mass,x...,y...");

  struct Row {
    std::size_t i, j;
    double mass;
    Vec x, y;
  };
  std::vector<Row> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::string> toks;
    while (std::getline(ss, tok, ',')) toks.push_back(tok);
    if (toks.size() != cols)
      throw ParseError(file.string() + ": wrong column count at line " +
                       std::to_string(lineno));
    Row r;
    try {
      r.i = std::stoul(toks[0]);
      r.j = std::stoul(toks[1]);
      r.mass = std::stod(toks[2]);
      for (int c = 0; c < d; ++c) r.x.push_back(std::stod(toks[3 + c]));
      for (int c = 0; c < d; ++c) r.y.push_back(std::stod(toks[3 + d + c]));
    } catch (const std::exception&) {
      throw ParseError(file.string() + ": malformed value at line " + std::to_string(lineno));
    }
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ParseError(file.string() + ": no pairs");

  // Rebuild the marginals from the rows; indices must name consistent points.
  std::size_t max_i = 0, max_j = 0;
  for (const auto& r : rows) {
    max_i = std::max(max_i, r.i);
    max_j = std::max(max_j, r.j);
  }
  std::vector<double> left_pts((max_i + 1) * d, 0.0), right_pts((max_j + 1) * d, 0.0);
  std::vector<double> left_mass(max_i + 1, 0.0), right_mass(max_j + 1, 0.0);
  std::vector<char> seen_i(max_i + 1, 0), seen_j(max_j + 1, 0);
  for (const auto& r : rows) {
    if (!(r.mass > 0.0))
      throw ParseError(file.string() + ": pair masses must be positive");
    if (seen_i[r.i]) {
      if (!std::equal(r.x.begin(), r.x.end(), left_pts.begin() + r.i * d))
        throw ParseError(file.string() + ": index i=" + std::to_string(r.i) +
                         " names two different points");
    } else {
      seen_i[r.i] = 1;
      std::copy(r.x.begin(), r.x.end(), left_pts.begin() + r.i * d);
    }
    if (seen_j[r.j]) {
      if (!std::equal(r.y.begin(), r.y.end(), right_pts.begin() + r.j * d))
        throw ParseError(file.string() + ": index j=" + std::to_string(r.j) +
                         " names two different points");
    } else {
      seen_j[r.j] = 1;
      std::copy(r.y.begin(), r.y.end(), right_pts.begin() + r.j * d);
    }
    left_mass[r.i] += r.mass;
    right_mass[r.j] += r.mass;
  }
  for (std::size_t i = 0; i <= max_i; ++i)
    if (!seen_i[i]) throw ParseError(file.string() + ": source index gap at " + std::to_string(i));
  for (std::size_t j = 0; j <= max_j; ++j)
    if (!seen_j[j]) throw ParseError(file.string() + ": target index gap at " + std::to_string(j));

  // The canonical measure order may differ from the file's index order; remap.
  DiscreteMeasure left = DiscreteMeasure::make_flat(d, left_pts, left_mass);
  DiscreteMeasure right = DiscreteMeasure::make_flat(d, right_pts, right_mass);
  auto locate = [d](const DiscreteMeasure& m, const double* pt) {
    std::span<const double> q{pt, static_cast<std::size_t>(d)};
    std::size_t lo = 0, hi = m.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (lex_compare(m.point(mid), q) < 0)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  };
  std::vector<Coupling::Pair> pairs;
  pairs.reserve(rows.size());
  for (const auto& r : rows)
    pairs.push_back({locate(left, left_pts.data() + r.i * d),
                     locate(right, right_pts.data() + r.j * d), r.mass});
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  for (std::size_t p = 1; p < pairs.size(); ++p)
    if (pairs[p].i == pairs[p - 1].i && pairs[p].j == pairs[p - 1].j)
      throw ParseError(file.string() + ": duplicate pair rows");
  Coupling pi(std::move(left), std::move(right), std::move(pairs));
  pi.check_invariants();
  return pi;
}

void write_potential(const std::filesystem::path& file, const PolyhedralPotential& psi) {
  json j;
  json slopes = json::array(), offsets = json::array();
  for (std::size_t p = 0; p < psi.pieces(); ++p) {
    json s = json::array();
    for (double c : psi.slope(p)) s.push_back(json::parse(format_double(c)));
    slopes.push_back(s);
    offsets.push_back(json::parse(format_double(psi.offset(p))));
  }
  j["slopes"] = slopes;
  j["offsets"] = offsets;
  std::ofstream out(file);
  out << j.dump(2) << "\n";
}

PolyhedralPotential read_potential(const std::filesystem::path& file) {
  const json j = load_json(file);
  if (!j.contains("slopes") || !j.contains("offsets"))
    throw ParseError(file.string() + ": expected {slopes, offsets}");
  const auto& sl = j["slopes"];
  const auto& of = j["offsets"];
  if (!sl.is_array() || !of.is_array() || sl.empty() || sl.size() != of.size())
    throw ParseError(file.string() + ": slopes/offsets must be equal-length arrays");
  const int d = static_cast<int>(sl[0].size());
  std::vector<double> flat;
  std::vector<double> offsets;
  for (std::size_t p = 0; p < sl.size(); ++p) {
    if (static_cast<int>(sl[p].size()) != d)
      throw ParseError(file.string() + ": slope dimension mismatch");
    for (const auto& c : sl[p]) flat.push_back(c.get<double>());
    offsets.push_back(of[p].get<double>());
  }
  return PolyhedralPotential(d, std::move(flat), std::move(offsets));
}

TailStudyConfig read_study_config(const std::filesystem::path& file, bool strict) {
  const json j = load_json(file);
  if (!j.is_object()) throw ParseError(file.string() + ": config must be an object");

  static const std::vector<std::string> known{
      "schema", "alpha1", "alpha2", "dim",     "angular",    "n",
      "k",      "t_grid", "lambdas", "windows", "fit_window", "seed",
      "b_mode", "same_measure"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (strict && std::find(known.begin(), known.end(), key) == known.end())
      throw ParseError(file.string() + ": unknown field '" + key + "' (strict mode)");
  }
  if (j.contains("schema") && j["schema"].get<int>() != 1)
    throw ParseError(file.string() + ": unsupported schema version");

  TailStudyConfig cfg;
  try {
    if (j.contains("alpha1")) cfg.alpha1 = j["alpha1"].get<double>();
    if (j.contains("alpha2")) cfg.alpha2 = j["alpha2"].get<double>();
    if (j.contains("dim")) cfg.dim = j["dim"].get<int>();
    if (j.contains("angular"))
      cfg.angular = angular_spec_from_string(j["angular"].get<std::string>());
    if (j.contains("n")) cfg.n = j["n"].get<std::size_t>();
    if (j.contains("k")) cfg.k = j["k"].get<std::size_t>();
    if (j.contains("t_grid")) cfg.t_grid = j["t_grid"].get<std::vector<double>>();
    if (j.contains("lambdas")) cfg.lambdas = j["lambdas"].get<std::vector<double>>();
    if (j.contains("windows")) {
      cfg.windows.clear();
      for (const auto& w : j["windows"]) {
        if (!w.is_array() || w.size() != 2)
          throw ParseError(file.string() + ": windows must be [r_in, r_out] pairs");
        cfg.windows.push_back({w[0].get<double>(), w[1].get<double>()});
      }
    }
    if (j.contains("fit_window")) {
      const auto& w = j["fit_window"];
      if (!w.is_array() || w.size() != 2)
        throw ParseError(file.string() + ": fit_window must be [r_in, r_out]");
      cfg.fit_window = {w[0].get<double>(), w[1].get<double>()};
    } else if (!cfg.windows.empty()) {
      double lo = cfg.windows.front().r_in, hi = cfg.windows.front().r_out;
      for (const auto& w : cfg.windows) {
        lo = std::min(lo, w.r_in);
        hi = std::max(hi, w.r_out);
      }
      cfg.fit_window = {0.5 * lo, hi};
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("b_mode")) cfg.b_mode = j["b_mode"].get<std::string>();
    if (j.contains("same_measure")) cfg.same_measure = j["same_measure"].get<bool>();
  } catch (const json::exception& e) {
    throw ParseError(file.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
  return cfg;
}

std::string canonical_config_string(const TailStudyConfig& cfg) {
  std::ostringstream os;
  os << "schema=1;alpha1=" << format_double(cfg.alpha1) << ";alpha2=" << format_double(cfg.alpha2)
     << ";dim=" << cfg.dim << ";angular=" << to_string(cfg.angular) << ";n=" << cfg.n
     << ";k=" << cfg.k << ";t_grid=";
  for (double t : cfg.t_grid) os << format_double(t) << ",";
  os << ";lambdas=";
  for (double l : cfg.lambdas) os << format_double(l) << ",";
  os << ";windows=";
  for (const auto& w : cfg.windows)
    os << format_double(w.r_in) << ":" << format_double(w.r_out) << ",";
  os << ";fit_window=" << format_double(cfg.fit_window.r_in) << ":"
     << format_double(cfg.fit_window.r_out) << ";seed=" << cfg.seed << ";b_mode=" << cfg.b_mode
     << ";same_measure=" << (cfg.same_measure ? 1 : 0);
  return os.str();
}

void write_manifest(const std::filesystem::path& file, const RunManifest& m) {
  json j;
  j["config_hash"] = m.config_hash;
  j["seeds"] = m.seeds;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["exit_status"] = m.exit_status;
  json files = json::array();
  for (const auto& e : m.files) files.push_back({{"file", e.file}, {"digest", e.digest}});
  j["files"] = files;
  std::ofstream out(file);
  out << j.dump(2) << "\n";
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc;
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace ot::io
