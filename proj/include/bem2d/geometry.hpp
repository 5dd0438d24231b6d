#pragma once

#include <cmath>
#include <vector>

namespace bem2d {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

struct Segment {
  Vec2 a;
  Vec2 b;

  double length() const { return norm(b - a); }
  Vec2 midpoint() const { return 0.5 * (a + b); }
  Vec2 tangent() const {
    const double h = length();
    return {(b.x - a.x) / h, (b.y - a.y) / h};
  }
  // Right-hand normal; outward for counter-clockwise polygons.
  Vec2 normal() const {
    const Vec2 t = tangent();
    return {t.y, -t.x};
  }
  Vec2 point(double s) const { return a + s * tangent(); }
};

double distance(const Segment& s, Vec2 p);
double distance(const Segment& s, const Segment& t);
// x lies on e (to 1e-12 relative) and strictly between its end points.
bool strictly_inside(const Segment& e, Vec2 x);

// Polygonal boundary (closed) or polygonal arc (open). Coordinates are stored
// already scaled; the raw vertices times scale_factor.
class BoundaryGeometry {
 public:
  BoundaryGeometry(std::vector<Vec2> raw_vertices, bool closed, double scale_factor = 1.0);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  bool closed() const { return closed_; }
  double scale_factor() const { return scale_; }

  int edge_count() const { return static_cast<int>(closed_ ? vertices_.size() : vertices_.size() - 1); }
  Segment edge(int e) const;
  double total_length() const;
  double diameter() const;

  // Interior angle at a vertex differs from pi (or the vertex ends an open arc).
  bool is_corner(int vertex) const;

  bool same_as(const BoundaryGeometry& other) const;

 private:
  std::vector<Vec2> vertices_;
  bool closed_;
  double scale_;
};

// Open arc (-1,1) x {0}.
BoundaryGeometry slit_geometry();

// L-shaped domain with a reentrant corner of interior angle 7pi/4 at the origin.
BoundaryGeometry zshape_geometry(double scale = 0.125);

// Axis-aligned square [0,side]^2, counter-clockwise.
BoundaryGeometry square_geometry(double side);

}  // namespace bem2d
