#include "gn/output.hpp"

#include "gn/model.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace gn {

namespace {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

} // namespace

void write_timeseries(const TrajectoryRecord& rec, const std::string& path,
                      const TimeseriesOptions& opt) {
  if (opt.nu_max < 0) throw ConfigError("write_timeseries: nu_max must be >= 0");
  if (rec.times.size() != rec.sigma_series.size())
    throw ConfigError("write_timeseries: record times and samples differ in length");

  // Row grid: union of the displacement grid and every scalar grid.  Sample
  // times on a shared grid are bit-identical (same istep * dt product), so
  // exact keys merge correctly.
  std::map<double, std::size_t> row_of;
  for (Real t : rec.times) row_of.emplace(t, 0);
  for (const auto& [name, series] : opt.scalars) {
    if (!series) throw ConfigError("write_timeseries: scalar column '" + name + "' is null");
    if (series->times.size() != series->values.size())
      throw ConfigError("write_timeseries: scalar column '" + name + "' is ragged");
    for (Real t : series->times) row_of.emplace(t, 0);
  }
  std::size_t idx = 0;
  for (auto& [t, i] : row_of) i = idx++;

  const std::size_t n_harm = static_cast<std::size_t>(opt.nu_max) + 1;
  const std::size_t n_cols = 1 + 1 + n_harm + opt.scalars.size(); // t, deltaJ, mhat_*, scalars
  std::vector<std::vector<std::string>> cells(row_of.size(), std::vector<std::string>(n_cols));
  for (auto& [t, i] : row_of) cells[i][0] = format_g17(t);

  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    const std::size_t i = row_of.at(rec.times[k]);
    const OrderParameterProfile prof = decompose_order_parameter(rec.sigma_series[k]);
    if (opt.nu_max > static_cast<int>(prof.m.size()) / 2)
      throw ConfigError("write_timeseries: nu_max exceeds the number of folded harmonics");
    const HarmonicSpectrum spec = harmonics(prof.m);
    cells[i][1] = format_g17(prof.deltaJ);
    for (std::size_t nu = 0; nu < n_harm; ++nu)
      cells[i][2 + nu] = format_g17(folded_amplitude(spec, static_cast<int>(nu)));
  }
  for (std::size_t s = 0; s < opt.scalars.size(); ++s) {
    const auto& series = *opt.scalars[s].second;
    for (std::size_t k = 0; k < series.times.size(); ++k)
      cells[row_of.at(series.times[k])][2 + n_harm + s] = format_g17(series.values[k]);
  }

  std::ofstream os(path, std::ios::trunc);
  if (!os) throw ConfigError("write_timeseries: cannot open '" + path + "' for writing");
  os << "t,deltaJ";
  for (std::size_t nu = 0; nu < n_harm; ++nu) os << ",mhat_" << nu;
  for (const auto& [name, series] : opt.scalars) os << ',' << name;
  os << '\n';
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      os << row[c];
    }
    os << '\n';
  }
  if (!os.flush()) throw ConfigError("write_timeseries: write to '" + path + "' failed");
}

std::optional<std::size_t> TimeseriesData::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  return std::nullopt;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

} // namespace

TimeseriesData read_timeseries(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("read_timeseries: cannot open '" + path + "'");
  TimeseriesData data;
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("read_timeseries: '" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  data.columns = split_csv_line(line);
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != data.columns.size())
      throw ConfigError("read_timeseries: ragged row in '" + path + "'");
    std::vector<std::optional<double>> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) {
      if (cell.empty()) {
        row.emplace_back();
      } else {
        std::size_t pos = 0;
        double v = 0.0;
        try {
          v = std::stod(cell, &pos);
        } catch (const std::exception&) {
          pos = 0;
        }
        if (pos != cell.size())
          throw ConfigError("read_timeseries: bad number '" + cell + "' in '" + path + "'");
        row.emplace_back(v);
      }
    }
    data.rows.push_back(std::move(row));
  }
  return data;
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("fnv1a64_file: cannot open '" + path + "'");
  std::uint64_t hash = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (is.read(buf, sizeof(buf)) || is.gcount() > 0) {
    const std::streamsize n = is.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ull;
    }
    if (!is) break;
  }
  return hash;
}

std::string to_hex(std::uint64_t value) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

void write_manifest(const std::string& dir, RunManifest manifest,
                    const std::vector<std::string>& files) {
  namespace fs = std::filesystem;
  for (const auto& name : files) {
    const fs::path p = fs::path(dir) / name;
    ManifestFile mf;
    mf.path = name;
    mf.bytes = static_cast<std::uint64_t>(fs::file_size(p));
    mf.fnv1a64 = to_hex(fnv1a64_file(p.string()));
    manifest.files.push_back(std::move(mf));
  }

  nlohmann::json j;
  j["command"] = manifest.command;
  j["version"] = manifest.version;
  j["seed"] = manifest.seed;
  j["wall_seconds"] = manifest.wall_seconds;
  j["config"] = manifest.config_json.empty() ? nlohmann::json::object()
                                             : nlohmann::json::parse(manifest.config_json);
  j["files"] = nlohmann::json::array();
  for (const auto& f : manifest.files)
    j["files"].push_back({{"path", f.path}, {"bytes", f.bytes}, {"fnv1a64", f.fnv1a64}});
  j["notes"] = manifest.notes;

  const fs::path final_path = fs::path(dir) / "manifest.json";
  const fs::path tmp_path = fs::path(dir) / "manifest.json.tmp";
  {
    std::ofstream os(tmp_path, std::ios::trunc);
    if (!os) throw ConfigError("write_manifest: cannot open '" + tmp_path.string() + "'");
    os << j.dump(2) << '\n';
    if (!os.flush()) throw ConfigError("write_manifest: write failed");
  }
  fs::rename(tmp_path, final_path);
}

} // namespace gn
