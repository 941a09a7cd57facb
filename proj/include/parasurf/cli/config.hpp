#ifndef PARASURF_CLI_CONFIG_HPP
#define PARASURF_CLI_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "parasurf/dynamics/hamiltonian.hpp"
#include "parasurf/surface.hpp"

namespace parasurf::cli {

/// Everything one run needs. Parsed from an INI-style file, see configs/README.md.
struct ExperimentConfig {
  std::string source;  // path of the config file
  // [surface]
  std::string origami = "torus";
  int N = 32;
  int n_modes = 0;
  // [direction]
  double xi1 = 1.0;
  double xi2 = 1.6180339887498949;
  double diophantine_floor = 1e-12;
  // [hamiltonian]
  std::string terms;
  double mask_radius = 0.1;
  double mask_width = 0.2;
  // [sobolev]
  double s = 3.0;
  double t = 1.0;
  // [solver]
  double tol = 1e-9;
  double increment_tol = 1e-10;
  double obstruction_tol = 1e-10;
  int max_iter = 200;
  bool correct = false;
  std::string corrections = "fiber_poly(1,0); fiber_poly(0,1)";
  // [conjugacy]
  double t_max = 10.0;
  int n_points = 20;
  // [checks]
  int samples = 20;
  double fd_step = 1e-5;
  int check_N = 32;
  int lagrangian_N = 64;
  // [ce]
  std::string f = "1*cos_base(1,-1)";
  // [obstructions]
  std::vector<double> s_values{1.0, 2.0, 3.0};
  int n_candidates = 0;
  double min_gap_ratio = 10.0;
  // [sweep]
  std::vector<double> epsilons;
  // [run]
  std::uint64_t seed = 1;

  Direction direction() const { return Direction{xi1, xi2, diophantine_floor}; }
  SurfacePtr surface() const {
    std::filesystem::path p(origami);
    if (origami != "torus" && origami != "L3" && p.is_relative() && !source.empty()) {
      auto rel = std::filesystem::path(source).parent_path() / p;
      if (std::filesystem::exists(rel)) p = rel;
    }
    return load_origami_file(p.string());
  }
  Hamiltonian hamiltonian(const SurfacePtr& s) const {
    return Hamiltonian(s, parse_terms(terms), mask_radius, mask_width);
  }
};

namespace detail {

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(text);
  while (std::getline(ss, item, ',')) {
    item = parasurf::detail::trim(item);
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, key + ": '" + item + "' is not a number");
    }
  }
  return out;
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T v{};
  if constexpr (std::is_same_v<T, bool>) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw Error(ErrorCode::ConfigError, key + ": expected true/false, got '" + text + "'");
  } else {
    std::string rest;
    if (!(in >> v) || (in >> rest)) throw Error(ErrorCode::ConfigError, key + ": cannot read '" + text + "'");
  }
  return v;
}

}  // namespace detail

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// Named validation; every failure is a ConfigError naming the key.
inline void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::ConfigError, m); };
  if (!is_power_of_two(c.N) || c.N < 4) fail("surface.N = " + std::to_string(c.N) + " is not a power of 2 (>= 4)");
  if (!is_power_of_two(c.check_N) || c.check_N < 4) fail("checks.N must be a power of 2");
  if (!is_power_of_two(c.lagrangian_N) || c.lagrangian_N < 4) fail("checks.lagrangian_N must be a power of 2");
  if (c.n_modes < 0) fail("surface.n_modes must be >= 0");
  if (c.xi1 == 0.0 && c.xi2 == 0.0) fail("direction must be nonzero");
  if (!(c.diophantine_floor > 0)) fail("direction.diophantine_floor must be positive");
  if (!(c.tol > 0) || !(c.increment_tol > 0) || !(c.obstruction_tol > 0)) fail("solver tolerances must be positive");
  if (c.max_iter <= 0) fail("solver.max_iter must be positive");
  if (!(c.t_max >= 0) || c.n_points < 0) fail("conjugacy.t_max and conjugacy.n_points must be >= 0");
  if (c.samples <= 0) fail("checks.samples must be positive");
  if (c.fd_step < 1e-6 || c.fd_step > 1e-4) fail("checks.fd_step must lie in [1e-6, 1e-4]");
  if (c.s_values.empty()) fail("obstructions.s must list at least one order");
  if (c.mask_radius < 0 || !(c.mask_width > 0)) fail("hamiltonian mask radius/width invalid");
  parse_terms(c.terms);
  parse_terms(c.corrections);
  parse_terms(c.f);
  c.surface();
}

inline ExperimentConfig parse_config(const std::string& text, const std::string& source = "") {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("config syntax: ") + e.message() + " (line " +
                                            std::to_string(e.line()) + ")");
  }
  ExperimentConfig c;
  c.source = source;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto num = [](auto& field) {
    return Setter([&field](const std::string& k, const std::string& v) {
      field = detail::parse_value<std::decay_t<decltype(field)>>(k, v);
    });
  };
  auto str = [](std::string& field) { return Setter([&field](const std::string&, const std::string& v) { field = v; }); };
  auto list = [](std::vector<double>& field) {
    return Setter([&field](const std::string& k, const std::string& v) { field = detail::parse_list(k, v); });
  };
  const std::map<std::string, Setter> keys{
      {"surface.origami", str(c.origami)},
      {"surface.N", num(c.N)},
      {"surface.n_modes", num(c.n_modes)},
      {"direction.xi1", num(c.xi1)},
      {"direction.xi2", num(c.xi2)},
      {"direction.diophantine_floor", num(c.diophantine_floor)},
      {"hamiltonian.terms", str(c.terms)},
      {"hamiltonian.mask_radius", num(c.mask_radius)},
      {"hamiltonian.mask_width", num(c.mask_width)},
      {"sobolev.s", num(c.s)},
      {"sobolev.t", num(c.t)},
      {"solver.tol", num(c.tol)},
      {"solver.increment_tol", num(c.increment_tol)},
      {"solver.obstruction_tol", num(c.obstruction_tol)},
      {"solver.max_iter", num(c.max_iter)},
      {"solver.correct", num(c.correct)},
      {"solver.corrections", str(c.corrections)},
      {"conjugacy.t_max", num(c.t_max)},
      {"conjugacy.n_points", num(c.n_points)},
      {"checks.samples", num(c.samples)},
      {"checks.fd_step", num(c.fd_step)},
      {"checks.N", num(c.check_N)},
      {"checks.lagrangian_N", num(c.lagrangian_N)},
      {"ce.f", str(c.f)},
      {"obstructions.s", list(c.s_values)},
      {"obstructions.n_candidates", num(c.n_candidates)},
      {"obstructions.min_gap_ratio", num(c.min_gap_ratio)},
      {"sweep.epsilon", list(c.epsilons)},
      {"run.seed", num(c.seed)},
  };
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw Error(ErrorCode::ConfigError, "key '" + section + "' outside of a [section]");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      auto it = keys.find(full);
      if (it == keys.end()) throw Error(ErrorCode::ConfigError, "unknown config key '" + full + "'");
      it->second(full, parasurf::detail::trim(value.data()));
    }
  }
  validate(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot open config " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str(), path);
}

}  // namespace parasurf::cli

#endif  // PARASURF_CLI_CONFIG_HPP
