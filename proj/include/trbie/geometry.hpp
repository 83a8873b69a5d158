#pragma once
/**
 * @file geometry.hpp
 * @brief Flat-panel boundary meshes of closed scatterers.
 *
 * Every loop is oriented counter-clockwise so the outward normal (pointing
 * into the exterior medium) is the tangent rotated clockwise.
 */

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "trbie/errors.hpp"

namespace trbie {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

struct Panel {
  Vec2 start, end, mid;
  double length = 0.0;
  Vec2 tangent;  // unit, start -> end
  Vec2 normal;   // unit, outward
  int scatterer = 0;
};

struct Circle {
  Vec2 center;
  double radius = 0.0;
};

/// Closed polygon; vertices listed once (the closing edge is implicit).
struct Polyline {
  std::vector<Vec2> vertices;
};

struct Scatterer {
  std::variant<Circle, Polyline> shape;
  int n_panels = 0;  // circle: total panels; polyline: panels per edge
};

struct BoundaryMesh {
  std::vector<Panel> panels;
  int n_scatterers = 0;

  std::size_t size() const { return panels.size(); }
  const Panel& operator[](std::size_t i) const { return panels[i]; }
};

namespace detail {

inline Panel make_panel(Vec2 a, Vec2 b, int owner) {
  Panel p;
  p.start = a;
  p.end = b;
  p.mid = 0.5 * (a + b);
  const Vec2 d = b - a;
  p.length = norm(d);
  if (!(p.length > 0.0)) throw ConfigError("degenerate panel of zero length");
  p.tangent = (1.0 / p.length) * d;
  p.normal = {p.tangent.y, -p.tangent.x};
  p.scatterer = owner;
  return p;
}

inline double signed_area(const std::vector<Vec2>& v) {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * a;
}

inline bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

// Even-odd test against the closed panel loop of one scatterer.
inline bool inside_loop(const std::vector<Panel>& panels, int owner, Vec2 p) {
  bool in = false;
  for (const auto& pn : panels) {
    if (pn.scatterer != owner) continue;
    const Vec2 a = pn.start, b = pn.end;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < xc) in = !in;
    }
  }
  return in;
}

}  // namespace detail

/// Circle with n panels whose endpoints sit at uniform angles.
/// `allow_coarse` lifts the n >= 8 floor (used only for exact-geometry tests).
inline BoundaryMesh mesh_circle(Vec2 center, double radius, int n_panels, int owner = 0,
                                bool allow_coarse = false) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("circle radius must be positive");
  if (n_panels < (allow_coarse ? 3 : 8)) throw ConfigError("circle needs at least 8 panels");
  BoundaryMesh mesh;
  mesh.n_scatterers = owner + 1;
  mesh.panels.reserve(n_panels);
  auto vertex = [&](int j) {
    const double t = 2.0 * std::numbers::pi * (j % n_panels) / n_panels;
    return Vec2{center.x + radius * std::cos(t), center.y + radius * std::sin(t)};
  };
  for (int j = 0; j < n_panels; ++j) mesh.panels.push_back(detail::make_panel(vertex(j), vertex(j + 1), owner));
  return mesh;
}

/// Closed polygon, each edge split into `per_edge` equal panels; clockwise input is reversed.
inline BoundaryMesh mesh_polyline(std::vector<Vec2> vertices, int per_edge, int owner = 0) {
  if (vertices.size() < 3) throw ConfigError("polyline needs at least 3 vertices");
  if (per_edge < 1) throw ConfigError("polyline needs at least 1 panel per edge");
  const double area = detail::signed_area(vertices);
  if (area == 0.0) throw ConfigError("polyline encloses zero area");
  if (area < 0.0) std::reverse(vertices.begin(), vertices.end());
  BoundaryMesh mesh;
  mesh.n_scatterers = owner + 1;
  const std::size_t nv = vertices.size();
  for (std::size_t i = 0; i < nv; ++i) {
    const Vec2 a = vertices[i], b = vertices[(i + 1) % nv];
    for (int j = 0; j < per_edge; ++j) {
      const Vec2 p = a + (static_cast<double>(j) / per_edge) * (b - a);
      const Vec2 q = a + (static_cast<double>(j + 1) / per_edge) * (b - a);
      mesh.panels.push_back(detail::make_panel(p, q, owner));
    }
  }
  return mesh;
}

/**
 * Mesh several scatterers into one mesh (scatterer ids follow input order).
 * Rejects intersecting or nested scatterers; with `waveguide` set, also any
 * scatterer not strictly inside |x1| < 1/2.
 */
inline BoundaryMesh build_mesh(const std::vector<Scatterer>& scatterers, bool waveguide) {
  if (scatterers.empty()) throw ConfigError("at least one scatterer is required");
  BoundaryMesh mesh;
  mesh.n_scatterers = static_cast<int>(scatterers.size());
  for (std::size_t s = 0; s < scatterers.size(); ++s) {
    const auto& sc = scatterers[s];
    BoundaryMesh part;
    const int id = static_cast<int>(s);
    if (const auto* c = std::get_if<Circle>(&sc.shape)) {
      part = mesh_circle(c->center, c->radius, sc.n_panels, id);
      if (waveguide && std::abs(c->center.x) + c->radius >= 0.5)
        throw ConfigError("scatterer " + std::to_string(s) + " is not strictly inside the strip |x1| < 1/2");
    } else {
      part = mesh_polyline(std::get<Polyline>(sc.shape).vertices, sc.n_panels, id);
      if (waveguide) {
        for (const auto& p : part.panels)
          if (std::abs(p.start.x) >= 0.5)
            throw ConfigError("scatterer " + std::to_string(s) + " is not strictly inside the strip |x1| < 1/2");
      }
    }
    mesh.panels.insert(mesh.panels.end(), part.panels.begin(), part.panels.end());
  }
  // Pairwise disjointness: no crossing edges and no loop inside another.
  for (std::size_t i = 0; i < mesh.size(); ++i)
    for (std::size_t j = i + 1; j < mesh.size(); ++j) {
      const auto& a = mesh.panels[i];
      const auto& b = mesh.panels[j];
      if (a.scatterer == b.scatterer) continue;
      if (detail::segments_intersect(a.start, a.end, b.start, b.end))
        throw ConfigError("scatterers " + std::to_string(a.scatterer) + " and " + std::to_string(b.scatterer) +
                          " intersect");
    }
  for (int s = 0; s < mesh.n_scatterers; ++s) {
    Vec2 probe{};
    for (const auto& p : mesh.panels)
      if (p.scatterer == s) {
        probe = p.start;
        break;
      }
    for (int t = 0; t < mesh.n_scatterers; ++t)
      if (t != s && detail::inside_loop(mesh.panels, t, probe))
        throw ConfigError("scatterer " + std::to_string(s) + " lies inside scatterer " + std::to_string(t));
  }
  return mesh;
}

inline double max_panel_length(const BoundaryMesh& mesh) {
  double h = 0.0;
  for (const auto& p : mesh.panels) h = std::max(h, p.length);
  return h;
}

/// CSV: scatterer_id,x_start,y_start,x_end,y_end,nx,ny
inline void write_mesh_csv(const BoundaryMesh& mesh, std::ostream& os) {
  os << "scatterer_id,x_start,y_start,x_end,y_end,nx,ny\n";
  os.precision(17);
  for (const auto& p : mesh.panels)
    os << p.scatterer << ',' << p.start.x << ',' << p.start.y << ',' << p.end.x << ',' << p.end.y << ','
       << p.normal.x << ',' << p.normal.y << '\n';
}

}  // namespace trbie
