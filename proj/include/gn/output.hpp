// Persistence: trajectory CSV files (17-significant-digit, bit-exact on
// round-trip), file checksums, and the per-run manifest.
#pragma once

#include "gn/evolution.hpp"
#include "gn/observables.hpp"
#include "gn/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gn {

struct TimeseriesOptions {
  int nu_max = 10; // folded harmonic columns mhat_0 .. mhat_{nu_max}
  // Extra scalar columns, each on its own time grid (merged by time; cells
  // are blank on rows where a series has no sample).
  std::vector<std::pair<std::string, const DistanceSeries*>> scalars;
};

// CSV with header `t,deltaJ,mhat_0,...,mhat_<nu_max>[,<scalar>...]`, one row
// per sample time (union of all grids), floating point with 17 significant
// digits.  An empty record yields a header-only file.
void write_timeseries(const TrajectoryRecord& rec, const std::string& path,
                      const TimeseriesOptions& opt = {});

struct TimeseriesData {
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> rows; // row-major, blank = nullopt

  std::optional<std::size_t> column(const std::string& name) const;
};

TimeseriesData read_timeseries(const std::string& path);

// FNV-1a 64-bit checksum of a file's bytes.
std::uint64_t fnv1a64_file(const std::string& path);
std::string to_hex(std::uint64_t value);

struct ManifestFile {
  std::string path; // relative to the run directory
  std::uint64_t bytes = 0;
  std::string fnv1a64;
};

struct RunManifest {
  std::string command;
  std::string version;
  std::string config_json; // serialized effective configuration
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::vector<ManifestFile> files;
  std::vector<std::string> notes; // e.g. isolated per-point failures
};

// Collect checksums for `files` (relative names inside `dir`) and write
// dir/manifest.json atomically (temp file + rename).
void write_manifest(const std::string& dir, RunManifest manifest,
                    const std::vector<std::string>& files);

} // namespace gn
