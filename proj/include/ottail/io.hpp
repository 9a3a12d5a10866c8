#ifndef OTTAIL_IO_HPP
#define OTTAIL_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ottail/convex.hpp"
#include "ottail/measures.hpp"
#include "ottail/tails.hpp"
#include "ottail/transport.hpp"

namespace ot::io {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// All floating-point output carries 17 significant digits.
std::string format_double(double v);

std::uint64_t fnv1a64(const std::string& bytes);

// Measure files: {"dim": d, "points": [[..], ..], "masses": [..]}.
// Masses may be doubles or decimal strings; duplicates merge on read.
DiscreteMeasure read_measure(const std::filesystem::path& file);
void write_measure(const std::filesystem::path& file, const DiscreteMeasure& mu);

// Coupling files: CSV `i,j,mass,x...,y...` with one coordinate column per
// axis; indices refer to the canonical ordering of the serialized measures.
void write_coupling_csv(const std::filesystem::path& file, const Coupling& pi);
Coupling read_coupling_csv(const std::filesystem::path& file);

// Potential files: {"slopes": [[..], ..], "offsets": [..]}.
void write_potential(const std::filesystem::path& file, const PolyhedralPotential& psi);
PolyhedralPotential read_potential(const std::filesystem::path& file);

// Study config: JSON with schema 1.  Unknown fields are rejected when strict.
TailStudyConfig read_study_config(const std::filesystem::path& file, bool strict);

// Canonical byte representation of a config, hashed into the manifest.
std::string canonical_config_string(const TailStudyConfig& cfg);

struct ManifestEntry {
  std::string file;
  std::uint64_t digest;
};

struct RunManifest {
  std::uint64_t config_hash = 0;
  std::vector<std::uint64_t> seeds;
  std::string started;
  std::string finished;
  int exit_status = 0;
  std::vector<ManifestEntry> files;
};

void write_manifest(const std::filesystem::path& file, const RunManifest& m);

std::string timestamp_utc();

}  // namespace ot::io

#endif  // OTTAIL_IO_HPP
