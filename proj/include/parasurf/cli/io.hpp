#ifndef PARASURF_CLI_IO_HPP
#define PARASURF_CLI_IO_HPP

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <string>
#include <vector>

#include <json.hpp>  // vendored nlohmann/json

#include "parasurf/spectral/field.hpp"

namespace parasurf::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

inline void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
  f << text;
}

inline std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::MissingArtifacts, "missing " + path.string());
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

inline void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

/// Field values as raw little-endian float64, component-major
/// (row r*cols + c, then node), plus a JSON sidecar describing the layout.
inline void write_field(const fs::path& base, const Field& f, const std::string& name) {
  fs::create_directories(base.parent_path());
  const fs::path bin = base.string() + ".bin";
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + bin.string());
  out.write(reinterpret_cast<const char*>(f.data().data()), static_cast<std::streamsize>(f.data().size() * sizeof(double)));
  const auto& disc = *f.disc();
  json side{{"name", name},
            {"rows", f.rows()},
            {"cols", f.cols()},
            {"N", disc.N()},
            {"squares", disc.surface().n_squares()},
            {"surface", disc.surface().name()},
            {"dtype", "float64-le"},
            {"layout", "component-major; node = (square*N + j)*N + i at ((i+0.5)/N, (j+0.5)/N)"},
            {"file", bin.filename().string()}};
  write_json(base.string() + ".json", side);
}

inline Field read_field(const fs::path& base, const DiscPtr& disc) {
  const json side = json::parse(read_text(base.string() + ".json"));
  Field f(disc, side.at("rows").get<int>(), side.at("cols").get<int>());
  if (side.at("N").get<int>() != disc->N() || side.at("squares").get<int>() != disc->surface().n_squares())
    throw Error(ErrorCode::ShapeMismatch, "field file does not match the discretization");
  std::ifstream in(base.string() + ".bin", std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingArtifacts, "missing " + base.string() + ".bin");
  in.read(reinterpret_cast<char*>(f.data().data()), static_cast<std::streamsize>(f.data().size() * sizeof(double)));
  if (!in) throw Error(ErrorCode::MissingArtifacts, "truncated " + base.string() + ".bin");
  return f;
}

inline std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

inline void write_csv(const fs::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << fmt(r[i]);
    os << "\n";
  }
  write_text(path, os.str());
}

inline json mat_to_json(const Mat& m) {
  json out = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

}  // namespace parasurf::io

#endif  // PARASURF_CLI_IO_HPP
