#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "bem2d/geometry.hpp"

namespace bem2d {

// Position of an element in the binary bisection tree of its root (an element
// of the initial mesh). Heap numbering: the root has code 1, the sons of code c
// are 2c (lower arclength half) and 2c+1.
struct ElementKey {
  std::uint32_t root = 0;
  std::uint64_t code = 1;

  static constexpr int kMaxGeneration = 62;

  int generation() const { return std::bit_width(code) - 1; }
  ElementKey father() const { return {root, code >> 1}; }
  ElementKey son(int which) const { return {root, 2 * code + static_cast<std::uint64_t>(which)}; }
  bool is_ancestor_of(const ElementKey& other) const;

  // Dyadic arclength positions within the root, scaled to 2^62.
  std::uint64_t left_position() const;
  std::uint64_t right_position() const;

  friend bool operator==(const ElementKey&, const ElementKey&) = default;
  friend std::strong_ordering operator<=>(const ElementKey& a, const ElementKey& b);
};

struct ElementKeyHash {
  std::size_t operator()(const ElementKey& k) const noexcept {
    std::uint64_t h = k.code * 0x9E3779B97F4A7C15ull ^ (static_cast<std::uint64_t>(k.root) << 1);
    h ^= h >> 31;
    return static_cast<std::size_t>(h);
  }
};

struct Element {
  ElementKey key;
  Segment segment;
  double h = 0.0;  // root length times 2^-generation, exact under bisection
  int edge = 0;    // geometry edge carrying the element

  double length() const { return h; }
  int generation() const { return key.generation(); }
};

// Interior node with its abutting elements; plus is on the lower-arclength side.
struct Node {
  int plus = -1;
  int minus = -1;
  friend bool operator==(const Node&, const Node&) = default;
};

class Mesh {
 public:
  Mesh(std::shared_ptr<const BoundaryGeometry> geometry, std::vector<Element> elements);

  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  const Element& operator[](std::size_t i) const { return elements_[i]; }
  const std::vector<Element>& elements() const { return elements_; }
  const BoundaryGeometry& geometry() const { return *geometry_; }
  const std::shared_ptr<const BoundaryGeometry>& geometry_ptr() const { return geometry_; }
  bool closed() const { return geometry_->closed(); }

  std::optional<int> left_neighbor(int i) const;
  std::optional<int> right_neighbor(int i) const;

  // Nodes between consecutive elements; for closed curves node 0 sits between
  // the last and the first element. Open-arc end points are excluded.
  std::vector<Node> interior_nodes() const;

  double total_length() const;
  double length(int i) const { return elements_[static_cast<std::size_t>(i)].h; }
  std::vector<double> lengths() const;

  std::unordered_map<ElementKey, int, ElementKeyHash> index_map() const;

 private:
  std::shared_ptr<const BoundaryGeometry> geometry_;
  std::vector<Element> elements_;
};

// Lengths proportional to edge lengths, every edge receives at least one element.
Mesh make_initial_mesh(std::shared_ptr<const BoundaryGeometry> geometry, int n0);

// Bisect the marked elements plus the closure needed to keep the generation of
// neighbouring elements within one of each other.
Mesh refine(const Mesh& mesh, std::span<const int> marked);

Mesh uniform_refinement(const Mesh& mesh);

// Coarsest common refinement of two refinements of the same initial mesh.
Mesh overlay(const Mesh& a, const Mesh& b);

// max over neighbouring elements of h_T / h_T'
double shape_regularity(const Mesh& mesh);

class MeshHierarchy {
 public:
  explicit MeshHierarchy(Mesh coarse);

  // Appends a refinement of the current finest mesh.
  void push_back(Mesh finer);

  int finest_level() const { return static_cast<int>(levels_.size()) - 1; }
  std::size_t level_count() const { return levels_.size(); }
  const Mesh& level(int l) const { return levels_.at(static_cast<std::size_t>(l)); }
  const Mesh& finest() const { return levels_.back(); }

  // For level l >= 1: index in level l-1 of the element itself or its father.
  const std::vector<int>& parent(int l) const;
  // For level l >= 1: element created by bisection at this level.
  const std::vector<char>& is_new(int l) const;

  // Interior nodes that are new at level l or whose support shrank.
  std::vector<Node> new_node_set(int l) const;

 private:
  std::vector<Mesh> levels_;
  std::vector<std::vector<int>> parent_;
  std::vector<std::vector<char>> is_new_;
};

// CSV with columns element_id,node_left_x,node_left_y,node_right_x,node_right_y,h,generation,father_id.
// father_id refers to the element (or its father) in previous, -1 without one.
void write_mesh_csv(std::ostream& out, const Mesh& mesh, const Mesh* previous = nullptr);

}  // namespace bem2d
