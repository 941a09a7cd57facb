#ifndef PARASURF_SURFACE_HPP
#define PARASURF_SURFACE_HPP

// Square-tiled translation surfaces (origamis), their cone points, and the
// straight-line flow in a fixed direction.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "parasurf/error.hpp"

namespace parasurf {

enum class Corner { BottomLeft = 0, BottomRight = 1, TopLeft = 2, TopRight = 3 };

/// Local coordinates of a corner inside its unit square.
inline std::array<double, 2> corner_offset(Corner c) {
  switch (c) {
    case Corner::BottomLeft: return {0.0, 0.0};
    case Corner::BottomRight: return {1.0, 0.0};
    case Corner::TopLeft: return {0.0, 1.0};
    case Corner::TopRight: return {1.0, 1.0};
  }
  return {0.0, 0.0};
}

/// A point given by (square, local x, local y) with 0 <= x, y < 1.
struct SurfacePoint {
  int square = 0;
  double x = 0.0;
  double y = 0.0;
};

struct ConePoint {
  int square = 0;  ///< a square having this vertex at its bottom-left corner
  Corner corner = Corner::BottomLeft;
  int k = 1;       ///< cone angle is 2*pi*(k+1)
  int vertex = 0;  ///< vertex id
};

/// Direction of the translation flow X_xi = xi1 X + xi2 Y.
struct Direction {
  double xi1 = 1.0;
  double xi2 = 0.0;
  double diophantine_floor = 1e-12;

  double divisor(int m, int n) const { return m * xi1 + n * xi2; }

  /// Smallest |m xi1 + n xi2| over nonzero modes with |m|, |n| <= max_mode.
  double min_divisor(int max_mode) const {
    double best = std::numeric_limits<double>::infinity();
    for (int m = -max_mode; m <= max_mode; ++m)
      for (int n = -max_mode; n <= max_mode; ++n)
        if (m != 0 || n != 0) best = std::min(best, std::abs(divisor(m, n)));
    return best;
  }

  void validate() const {
    if (xi1 == 0.0 && xi2 == 0.0)
      throw Error(ErrorCode::ConfigError, "direction must be nonzero");
    if (!(diophantine_floor > 0.0))
      throw Error(ErrorCode::ConfigError, "diophantine_floor must be positive");
  }
};

inline Direction golden_direction(double floor = 1e-12) {
  return Direction{1.0, (1.0 + std::sqrt(5.0)) / 2.0, floor};
}

class TranslationSurface {
 public:
  /// Builds and validates an origami from 0-indexed permutations.
  TranslationSurface(std::string name, std::vector<int> h, std::vector<int> v)
      : name_(std::move(name)), h_(std::move(h)), v_(std::move(v)) {
    const int n = static_cast<int>(h_.size());
    if (n == 0) throw Error(ErrorCode::ParseError, "origami needs at least one square");
    if (static_cast<int>(v_.size()) != n)
      throw Error(ErrorCode::ParseError, "h and v have different lengths");
    hinv_ = invert(h_, "h");
    vinv_ = invert(v_, "v");
    check_connected();
    build_vertices();
  }

  const std::string& name() const { return name_; }
  int n_squares() const { return static_cast<int>(h_.size()); }
  double area() const { return static_cast<double>(n_squares()); }
  int genus() const { return genus_; }
  const std::vector<ConePoint>& cone_points() const { return cones_; }
  bool is_torus() const { return n_squares() == 1; }

  int right(int s) const { return h_[s]; }
  int left(int s) const { return hinv_[s]; }
  int up(int s) const { return v_[s]; }
  int down(int s) const { return vinv_[s]; }
  const std::vector<int>& h() const { return h_; }
  const std::vector<int>& v() const { return v_; }

  int vertex_of(int square, Corner c) const {
    switch (c) {
      case Corner::BottomLeft: return vertex_bl_[square];
      case Corner::BottomRight: return vertex_bl_[h_[square]];
      case Corner::TopLeft: return vertex_bl_[v_[square]];
      case Corner::TopRight: return vertex_bl_[v_[h_[square]]];
    }
    return -1;
  }
  /// Cone parameter k of a vertex (0 for regular vertices).
  int vertex_k(int vertex) const { return vertex_k_[vertex]; }
  int n_vertices() const { return static_cast<int>(vertex_k_.size()); }
  bool is_cone_corner(int square, Corner c) const { return vertex_k(vertex_of(square, c)) > 0; }

  /// All (square, corner) incidences of a vertex; 4(k+1) of them.
  std::vector<std::pair<int, Corner>> corners_of_vertex(int vertex) const {
    std::vector<std::pair<int, Corner>> out;
    for (int s = 0; s < n_squares(); ++s)
      for (Corner c : {Corner::BottomLeft, Corner::BottomRight, Corner::TopLeft, Corner::TopRight})
        if (vertex_of(s, c) == vertex) out.emplace_back(s, c);
    return out;
  }

  /// Flat distance from a point to the nearest cone point among the corners
  /// of its own square (exact whenever the distance is below 1/2).
  double distance_to_cone_points(const SurfacePoint& p) const {
    double best = std::numeric_limits<double>::infinity();
    for (Corner c : {Corner::BottomLeft, Corner::BottomRight, Corner::TopLeft, Corner::TopRight}) {
      if (!is_cone_corner(p.square, c)) continue;
      auto o = corner_offset(c);
      best = std::min(best, std::hypot(p.x - o[0], p.y - o[1]));
    }
    return best;
  }

 private:
  static std::vector<int> invert(const std::vector<int>& p, const char* label) {
    const int n = static_cast<int>(p.size());
    std::vector<int> inv(n, -1);
    for (int i = 0; i < n; ++i) {
      if (p[i] < 0 || p[i] >= n)
        throw Error(ErrorCode::NotAPermutation,
                    std::string(label) + " maps square " + std::to_string(i + 1) + " out of range");
      if (inv[p[i]] != -1)
        throw Error(ErrorCode::NotAPermutation,
                    std::string(label) + " has duplicate image " + std::to_string(p[i] + 1));
      inv[p[i]] = i;
    }
    return inv;
  }

  void check_connected() const {
    const int n = n_squares();
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      int s = stack.back();
      stack.pop_back();
      for (int t : {h_[s], hinv_[s], v_[s], vinv_[s]})
        if (!seen[t]) {
          seen[t] = 1;
          stack.push_back(t);
        }
    }
    if (std::count(seen.begin(), seen.end(), 1) != n)
      throw Error(ErrorCode::ParseError, "origami is not connected");
  }

  // Vertices are the cycles of the commutator v h v^-1 h^-1 acting on the
  // bottom-left corners; a cycle of length k+1 has cone angle 2 pi (k+1).
  void build_vertices() {
    const int n = n_squares();
    vertex_bl_.assign(n, -1);
    int sum_k = 0;
    for (int s = 0; s < n; ++s) {
      if (vertex_bl_[s] != -1) continue;
      const int id = static_cast<int>(vertex_k_.size());
      int len = 0;
      int t = s;
      do {
        vertex_bl_[t] = id;
        ++len;
        t = v_[h_[vinv_[hinv_[t]]]];
      } while (t != s);
      vertex_k_.push_back(len - 1);
      if (len > 1) cones_.push_back(ConePoint{s, Corner::BottomLeft, len - 1, id});
      sum_k += len - 1;
    }
    // Euler characteristic V - E + F = V - 2n + n; Gauss-Bonnet: sum k = 2g - 2.
    const int euler = n_vertices() - n;
    if ((2 - euler) % 2 != 0 || sum_k != -euler)
      throw Error(ErrorCode::GaussBonnetMismatch, "cone angles inconsistent with Euler characteristic");
    genus_ = (2 - euler) / 2;
    if (genus_ < 1 || 2 * genus_ - 2 != sum_k)
      throw Error(ErrorCode::GaussBonnetMismatch, "genus " + std::to_string(genus_));
  }

  std::string name_;
  std::vector<int> h_, v_, hinv_, vinv_;
  std::vector<int> vertex_bl_;
  std::vector<int> vertex_k_;
  std::vector<ConePoint> cones_;
  int genus_ = 1;
};

using SurfacePtr = std::shared_ptr<const TranslationSurface>;

inline SurfacePtr make_torus() { return std::make_shared<TranslationSurface>("torus", std::vector<int>{0}, std::vector<int>{0}); }

/// The three-square L-shaped origami (genus 2, one cone point of angle 6 pi).
inline SurfacePtr make_l3() {
  return std::make_shared<TranslationSurface>("L3", std::vector<int>{1, 0, 2}, std::vector<int>{2, 1, 0});
}

namespace detail {

inline std::string trim(std::string s) {
  auto notspace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
  return s;
}

// Accepts either a list of 1-indexed images "2,1,3" or cycle notation "(1 2)(3)".
inline std::vector<int> parse_permutation(const std::string& text, int n, const std::string& key) {
  std::vector<int> out;
  if (text.find('(') != std::string::npos) {
    if (n <= 0) throw Error(ErrorCode::ParseError, "cycle notation for " + key + " requires squares=");
    out.resize(n);
    std::iota(out.begin(), out.end(), 0);
    std::size_t pos = 0;
    while ((pos = text.find('(', pos)) != std::string::npos) {
      auto close = text.find(')', pos);
      if (close == std::string::npos) throw Error(ErrorCode::ParseError, "unbalanced cycle in " + key);
      std::istringstream cyc(text.substr(pos + 1, close - pos - 1));
      std::vector<int> elems;
      std::string tok;
      while (cyc >> tok) {
        for (char& ch : tok)
          if (ch == ',') ch = ' ';
        std::istringstream sub(tok);
        int e;
        while (sub >> e) elems.push_back(e - 1);
      }
      for (std::size_t i = 0; i < elems.size(); ++i) {
        int from = elems[i], to = elems[(i + 1) % elems.size()];
        if (from < 0 || from >= n || to < 0 || to >= n)
          throw Error(ErrorCode::NotAPermutation, key + " cycle entry out of range");
        out[from] = to;
      }
      pos = close + 1;
    }
    return out;
  }
  std::string cleaned = text;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream in(cleaned);
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      int value = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(value - 1);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad entry '" + tok + "' in " + key);
    }
  }
  return out;
}

}  // namespace detail

/// Parses the line-oriented origami format:
///   name=<string>  squares=<n>  h=<images>  v=<images>   ('#' starts a comment)
inline SurfacePtr load_origami(const std::string& text) {
  std::istringstream in(text);
  std::string line, name = "origami", h_text, v_text;
  int squares = -1;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected key=value");
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    if (key == "name") {
      name = value;
    } else if (key == "squares") {
      try {
        squares = std::stoi(value);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "squares is not an integer");
      }
      if (squares <= 0) throw Error(ErrorCode::ParseError, "squares must be positive");
    } else if (key == "h") {
      h_text = value;
    } else if (key == "v") {
      v_text = value;
    } else {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (h_text.empty() || v_text.empty()) throw Error(ErrorCode::ParseError, "both h= and v= are required");
  auto h = detail::parse_permutation(h_text, squares, "h");
  auto v = detail::parse_permutation(v_text, squares, "v");
  if (h.size() != v.size()) throw Error(ErrorCode::ParseError, "h and v have different lengths");
  if (squares > 0 && static_cast<int>(h.size()) != squares)
    throw Error(ErrorCode::ParseError, "squares= does not match permutation length");
  return std::make_shared<TranslationSurface>(name, std::move(h), std::move(v));
}

inline SurfacePtr load_origami_file(const std::string& path) {
  if (path == "torus" || path == "builtin:torus") return make_torus();
  if (path == "L3" || path == "builtin:L3") return make_l3();
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot open origami file " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return load_origami(buf.str());
}

namespace detail {

inline double point_segment_distance(double px, double py, double ax, double ay, double bx, double by) {
  const double dx = bx - ax, dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(ax + t * dx - px, ay + t * dy - py);
}

}  // namespace detail

/// Moves p by the flat displacement (dx, dy) along the straight segment,
/// crossing square edges through the gluings. Throws HitsSingularity when the
/// segment passes within eps of a cone point.
inline SurfacePoint flat_displace(const TranslationSurface& surf, SurfacePoint p, double dx, double dy,
                                  double eps = 1e-9) {
  if (dx == 0.0 && dy == 0.0) return p;
  constexpr double inf = std::numeric_limits<double>::infinity();
  double rem = 1.0;
  auto check = [&](double tau) {
    for (Corner c : {Corner::BottomLeft, Corner::BottomRight, Corner::TopLeft, Corner::TopRight}) {
      if (!surf.is_cone_corner(p.square, c)) continue;
      auto o = corner_offset(c);
      if (detail::point_segment_distance(o[0], o[1], p.x, p.y, p.x + tau * dx, p.y + tau * dy) < eps)
        throw Error(ErrorCode::HitsSingularity, "trajectory passes through a cone point");
    }
  };
  for (int guard = 0; guard < 100000000; ++guard) {
    const double tx = dx > 0 ? (1.0 - p.x) / dx : dx < 0 ? -p.x / dx : inf;
    const double ty = dy > 0 ? (1.0 - p.y) / dy : dy < 0 ? -p.y / dy : inf;
    const double tau = std::min(tx, ty);
    if (tau >= rem) {
      check(rem);
      p.x += rem * dx;
      p.y += rem * dy;
      break;
    }
    check(tau);
    p.x += tau * dx;
    p.y += tau * dy;
    rem -= tau;
    if (tx <= ty) {
      if (dx > 0) {
        p.square = surf.right(p.square);
        p.x = 0.0;
      } else {
        p.square = surf.left(p.square);
        p.x = 1.0;
      }
    }
    if (ty <= tx) {
      if (dy > 0) {
        p.square = surf.up(p.square);
        p.y = 0.0;
      } else {
        p.square = surf.down(p.square);
        p.y = 1.0;
      }
    }
  }
  // Normalize onto [0,1)^2.
  if (p.x >= 1.0) {
    p.x -= 1.0;
    p.square = surf.right(p.square);
  }
  if (p.y >= 1.0) {
    p.y -= 1.0;
    p.square = surf.up(p.square);
  }
  if (p.x < 0.0) {
    p.x += 1.0;
    p.square = surf.left(p.square);
  }
  if (p.y < 0.0) {
    p.y += 1.0;
    p.square = surf.down(p.square);
  }
  return p;
}

/// Time-t map of the translation flow in direction xi.
inline SurfacePoint straight_flow(const TranslationSurface& surf, const Direction& d, const SurfacePoint& p, double t,
                                  double eps = 1e-9) {
  if (t == 0.0) return p;
  if (surf.distance_to_cone_points(p) < eps)
    throw Error(ErrorCode::HitsSingularity, "starting point is a cone point");
  return flat_displace(surf, p, t * d.xi1, t * d.xi2, eps);
}

/// Flat displacement vector from a to b when b lies in the square of a or in
/// one of its eight neighbours; the shortest candidate is returned.
inline std::optional<std::array<double, 2>> flat_difference(const TranslationSurface& surf, const SurfacePoint& a,
                                                            const SurfacePoint& b) {
  std::optional<std::array<double, 2>> best;
  auto consider = [&](int square, double ox, double oy) {
    if (square != b.square) return;
    std::array<double, 2> d{b.x + ox - a.x, b.y + oy - a.y};
    if (!best || std::hypot(d[0], d[1]) < std::hypot((*best)[0], (*best)[1])) best = d;
  };
  const int s = a.square;
  consider(s, 0, 0);
  consider(surf.right(s), 1, 0);
  consider(surf.left(s), -1, 0);
  consider(surf.up(s), 0, 1);
  consider(surf.down(s), 0, -1);
  consider(surf.up(surf.right(s)), 1, 1);
  consider(surf.right(surf.up(s)), 1, 1);
  consider(surf.up(surf.left(s)), -1, 1);
  consider(surf.left(surf.up(s)), -1, 1);
  consider(surf.down(surf.right(s)), 1, -1);
  consider(surf.right(surf.down(s)), 1, -1);
  consider(surf.down(surf.left(s)), -1, -1);
  consider(surf.left(surf.down(s)), -1, -1);
  return best;
}

}  // namespace parasurf

#endif  // PARASURF_SURFACE_HPP
