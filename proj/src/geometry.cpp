#include "bem2d/geometry.hpp"

#include <algorithm>
#include <numbers>

#include "bem2d/errors.hpp"

namespace bem2d {

double distance(const Segment& s, Vec2 p) {
  const Vec2 d = s.b - s.a;
  const double len2 = dot(d, d);
  double t = len2 > 0.0 ? dot(p - s.a, d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (s.a + t * d));
}

bool strictly_inside(const Segment& e, Vec2 x) {
  const Vec2 t = e.tangent();
  const double s = dot(x - e.a, t), len = e.length();
  return s > 0.0 && s < len && std::abs(cross(t, x - e.a)) <= 1e-12 * len;
}

namespace {

bool segments_intersect(const Segment& s, const Segment& t) {
  auto orient = [](Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); };
  const double d1 = orient(t.a, t.b, s.a);
  const double d2 = orient(t.a, t.b, s.b);
  const double d3 = orient(s.a, s.b, t.a);
  const double d4 = orient(s.a, s.b, t.b);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  // Touching or collinear overlap.
  if (d1 == 0 && distance(t, s.a) == 0) return true;
  if (d2 == 0 && distance(t, s.b) == 0) return true;
  if (d3 == 0 && distance(s, t.a) == 0) return true;
  if (d4 == 0 && distance(s, t.b) == 0) return true;
  return false;
}

}  // namespace

double distance(const Segment& s, const Segment& t) {
  if (segments_intersect(s, t)) return 0.0;
  return std::min({distance(s, t.a), distance(s, t.b), distance(t, s.a), distance(t, s.b)});
}

BoundaryGeometry::BoundaryGeometry(std::vector<Vec2> raw_vertices, bool closed, double scale_factor)
    : closed_(closed), scale_(scale_factor) {
  if (!(scale_factor > 0.0) || !std::isfinite(scale_factor))
    throw InvalidGeometry("scale factor must be positive and finite");
  const std::size_t need = closed ? 3 : 2;
  if (raw_vertices.size() < need)
    throw InvalidGeometry("too few vertices for a " + std::string(closed ? "closed polygon" : "polygonal arc"));
  vertices_.reserve(raw_vertices.size());
  for (const Vec2& v : raw_vertices) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw InvalidGeometry("non-finite vertex coordinate");
    vertices_.push_back(scale_factor * v);
  }
  const int ne = edge_count();
  for (int e = 0; e < ne; ++e)
    if (!(edge(e).length() > 0.0)) throw InvalidGeometry("zero-length edge " + std::to_string(e));

  // Simplicity: non-adjacent edges must not touch.
  for (int e = 0; e < ne; ++e) {
    for (int f = e + 1; f < ne; ++f) {
      const bool adjacent = f == e + 1 || (closed_ && e == 0 && f == ne - 1);
      if (adjacent) {
        // Adjacent edges may only share their common vertex: reject fold-backs.
        const Segment s = edge(e), t = edge(f);
        if (cross(s.b - s.a, t.b - t.a) == 0.0 && dot(s.b - s.a, t.b - t.a) < 0.0)
          throw InvalidGeometry("edges " + std::to_string(e) + " and " + std::to_string(f) + " fold back");
        continue;
      }
      if (segments_intersect(edge(e), edge(f)))
        throw InvalidGeometry("boundary is self-intersecting (edges " + std::to_string(e) + ", " +
                              std::to_string(f) + ")");
    }
  }
}

Segment BoundaryGeometry::edge(int e) const {
  const std::size_t n = vertices_.size();
  return {vertices_[static_cast<std::size_t>(e)], vertices_[(static_cast<std::size_t>(e) + 1) % n]};
}

double BoundaryGeometry::total_length() const {
  double sum = 0.0;
  for (int e = 0; e < edge_count(); ++e) sum += edge(e).length();
  return sum;
}

double BoundaryGeometry::diameter() const {
  double d = 0.0;
  for (const Vec2& p : vertices_)
    for (const Vec2& q : vertices_) d = std::max(d, norm(p - q));
  return d;
}

bool BoundaryGeometry::is_corner(int vertex) const {
  const int n = static_cast<int>(vertices_.size());
  if (!closed_ && (vertex == 0 || vertex == n - 1)) return true;
  const Vec2 prev = vertices_[static_cast<std::size_t>((vertex + n - 1) % n)];
  const Vec2 cur = vertices_[static_cast<std::size_t>(vertex)];
  const Vec2 next = vertices_[static_cast<std::size_t>((vertex + 1) % n)];
  const Vec2 u = cur - prev, v = next - cur;
  return std::abs(cross(u, v)) > 1e-14 * norm(u) * norm(v) || dot(u, v) < 0.0;
}

bool BoundaryGeometry::same_as(const BoundaryGeometry& other) const {
  return this == &other || (closed_ == other.closed_ && vertices_ == other.vertices_);
}

BoundaryGeometry slit_geometry() { return BoundaryGeometry({{-1.0, 0.0}, {1.0, 0.0}}, false, 1.0); }

BoundaryGeometry zshape_geometry(double scale) {
  // The two straight-angle vertices (0,-1) and (1,0) keep every edge of unit
  // length except the top and the reentrant diagonal.
  return BoundaryGeometry({{-1.0, -1.0},
                           {0.0, -1.0},
                           {1.0, -1.0},
                           {1.0, 0.0},
                           {1.0, 1.0},
                           {-1.0, 1.0},
                           {-1.0, 0.0},
                           {0.0, 0.0}},
                          true, scale);
}

BoundaryGeometry square_geometry(double side) {
  return BoundaryGeometry({{0.0, 0.0}, {side, 0.0}, {side, side}, {0.0, side}}, true, 1.0);
}

}  // namespace bem2d
