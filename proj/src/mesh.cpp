#include "bem2d/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "bem2d/errors.hpp"
#include "csv_format.hpp"

namespace bem2d {

bool ElementKey::is_ancestor_of(const ElementKey& other) const {
  if (root != other.root) return false;
  const int g = generation(), go = other.generation();
  return go > g && (other.code >> (go - g)) == code;
}

std::uint64_t ElementKey::left_position() const {
  const int g = generation();
  return (code - (std::uint64_t{1} << g)) << (kMaxGeneration - g);
}

std::uint64_t ElementKey::right_position() const {
  const int g = generation();
  return (code - (std::uint64_t{1} << g) + 1) << (kMaxGeneration - g);
}

std::strong_ordering operator<=>(const ElementKey& a, const ElementKey& b) {
  if (auto c = a.root <=> b.root; c != 0) return c;
  if (auto c = a.left_position() <=> b.left_position(); c != 0) return c;
  return a.code <=> b.code;
}

Mesh::Mesh(std::shared_ptr<const BoundaryGeometry> geometry, std::vector<Element> elements)
    : geometry_(std::move(geometry)), elements_(std::move(elements)) {
  if (!geometry_) throw InvalidInput("mesh without geometry");
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    const Element& e = elements_[i];
    if (!(e.h > 0.0)) throw InvalidInput("element " + std::to_string(i) + " has non-positive length");
    if (e.edge < 0 || e.edge >= geometry_->edge_count())
      throw InvalidInput("element " + std::to_string(i) + " lies on an unknown edge");
    if (i + 1 < elements_.size() && !(e.segment.b == elements_[i + 1].segment.a))
      throw InvalidInput("elements " + std::to_string(i) + " and " + std::to_string(i + 1) +
                         " are not contiguous");
  }
}

std::optional<int> Mesh::left_neighbor(int i) const {
  if (i > 0) return i - 1;
  if (closed() && size() > 1) return static_cast<int>(size()) - 1;
  return std::nullopt;
}

std::optional<int> Mesh::right_neighbor(int i) const {
  const int n = static_cast<int>(size());
  if (i + 1 < n) return i + 1;
  if (closed() && n > 1) return 0;
  return std::nullopt;
}

std::vector<Node> Mesh::interior_nodes() const {
  const int n = static_cast<int>(size());
  std::vector<Node> nodes;
  if (n == 0) return nodes;
  nodes.reserve(static_cast<std::size_t>(n));
  if (closed()) nodes.push_back({n - 1, 0});
  for (int i = 1; i < n; ++i) nodes.push_back({i - 1, i});
  return nodes;
}

double Mesh::total_length() const {
  double sum = 0.0;
  for (const Element& e : elements_) sum += e.h;
  return sum;
}

std::vector<double> Mesh::lengths() const {
  std::vector<double> h(size());
  for (std::size_t i = 0; i < size(); ++i) h[i] = elements_[i].h;
  return h;
}

std::unordered_map<ElementKey, int, ElementKeyHash> Mesh::index_map() const {
  std::unordered_map<ElementKey, int, ElementKeyHash> map;
  map.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) map.emplace(elements_[i].key, static_cast<int>(i));
  return map;
}

Mesh make_initial_mesh(std::shared_ptr<const BoundaryGeometry> geometry, int n0) {
  if (!geometry) throw InvalidInput("missing geometry");
  const int ne = geometry->edge_count();
  if (n0 < ne)
    throw InvalidInput("n0 = " + std::to_string(n0) + " is smaller than the number of edges (" +
                       std::to_string(ne) + ")");
  std::vector<double> len(static_cast<std::size_t>(ne));
  for (int e = 0; e < ne; ++e) len[static_cast<std::size_t>(e)] = geometry->edge(e).length();
  const double total = geometry->total_length();

  std::vector<int> count(static_cast<std::size_t>(ne));
  int sum = 0;
  for (int e = 0; e < ne; ++e) {
    const auto k = static_cast<int>(std::lround(n0 * len[static_cast<std::size_t>(e)] / total));
    count[static_cast<std::size_t>(e)] = std::max(1, k);
    sum += count[static_cast<std::size_t>(e)];
  }
  // Fix the total by adjusting the edge whose element length moves least.
  while (sum != n0) {
    int best = -1;
    double best_h = 0.0;
    for (int e = 0; e < ne; ++e) {
      const auto ue = static_cast<std::size_t>(e);
      if (sum > n0) {
        if (count[ue] == 1) continue;
        const double h = len[ue] / (count[ue] - 1);
        if (best < 0 || h < best_h) best = e, best_h = h;
      } else {
        const double h = len[ue] / count[ue];
        if (best < 0 || h > best_h) best = e, best_h = h;
      }
    }
    count[static_cast<std::size_t>(best)] += sum > n0 ? -1 : 1;
    sum += sum > n0 ? -1 : 1;
  }

  std::vector<Element> elements;
  elements.reserve(static_cast<std::size_t>(n0));
  for (int e = 0; e < ne; ++e) {
    const Segment edge = geometry->edge(e);
    const int k = count[static_cast<std::size_t>(e)];
    const double h = len[static_cast<std::size_t>(e)] / k;
    Vec2 a = edge.a;
    for (int i = 0; i < k; ++i) {
      const Vec2 b = i + 1 == k ? edge.b : edge.a + (static_cast<double>(i + 1) / k) * (edge.b - edge.a);
      Element el;
      el.key = {static_cast<std::uint32_t>(elements.size()), 1};
      el.segment = {a, b};
      el.h = h;
      el.edge = e;
      elements.push_back(el);
      a = b;
    }
  }
  return Mesh(std::move(geometry), std::move(elements));
}

namespace {

void bisect_into(const Element& e, std::vector<Element>& out) {
  if (e.generation() >= ElementKey::kMaxGeneration)
    throw InvalidInput("maximum refinement depth reached");
  const Vec2 m = 0.5 * (e.segment.a + e.segment.b);
  Element left = e, right = e;
  left.key = e.key.son(0);
  right.key = e.key.son(1);
  left.segment = {e.segment.a, m};
  right.segment = {m, e.segment.b};
  left.h = right.h = 0.5 * e.h;
  out.push_back(left);
  out.push_back(right);
}

}  // namespace

Mesh refine(const Mesh& mesh, std::span<const int> marked) {
  if (mesh.empty()) throw InvalidInput("cannot refine an empty mesh");
  const int n = static_cast<int>(mesh.size());
  std::vector<char> bisect(static_cast<std::size_t>(n), 0);
  std::vector<int> work;
  for (int m : marked) {
    if (m < 0 || m >= n) throw InvalidInput("marked element " + std::to_string(m) + " out of range");
    if (!bisect[static_cast<std::size_t>(m)]) {
      bisect[static_cast<std::size_t>(m)] = 1;
      work.push_back(m);
    }
  }
  if (work.empty()) return mesh;

  auto new_generation = [&](int i) { return mesh[static_cast<std::size_t>(i)].generation() + bisect[static_cast<std::size_t>(i)]; };
  while (!work.empty()) {
    const int i = work.back();
    work.pop_back();
    const int g = new_generation(i);
    for (auto nb : {mesh.left_neighbor(i), mesh.right_neighbor(i)}) {
      if (!nb) continue;
      if (new_generation(*nb) < g - 1) {
        bisect[static_cast<std::size_t>(*nb)] = 1;
        work.push_back(*nb);
      }
    }
  }

  std::vector<Element> out;
  out.reserve(mesh.size() + static_cast<std::size_t>(std::count(bisect.begin(), bisect.end(), 1)));
  for (int i = 0; i < n; ++i) {
    if (bisect[static_cast<std::size_t>(i)])
      bisect_into(mesh[static_cast<std::size_t>(i)], out);
    else
      out.push_back(mesh[static_cast<std::size_t>(i)]);
  }
  return Mesh(mesh.geometry_ptr(), std::move(out));
}

Mesh uniform_refinement(const Mesh& mesh) {
  std::vector<int> all(mesh.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return refine(mesh, all);
}

Mesh overlay(const Mesh& a, const Mesh& b) {
  if (!a.geometry().same_as(b.geometry())) throw InvalidInput("overlay of meshes on different geometries");
  std::vector<Element> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  auto incompatible = [] { return InvalidInput("overlay: meshes do not share an initial mesh"); };
  while (i < a.size() && j < b.size()) {
    const Element& ea = a[i];
    const Element& eb = b[j];
    if (ea.key.root != eb.key.root || ea.key.left_position() != eb.key.left_position()) throw incompatible();
    if (ea.key == eb.key) {
      if (!(ea.segment.a == eb.segment.a) || !(ea.segment.b == eb.segment.b)) throw incompatible();
      out.push_back(ea);
      ++i, ++j;
    } else if (ea.key.is_ancestor_of(eb.key)) {
      // b is finer here: copy b's elements until they cover ea.
      const auto end = ea.key.right_position();
      while (j < b.size() && b[j].key.root == ea.key.root && b[j].key.right_position() <= end) out.push_back(b[j++]);
      if (out.back().key.right_position() != end) throw incompatible();
      ++i;
    } else if (eb.key.is_ancestor_of(ea.key)) {
      const auto end = eb.key.right_position();
      while (i < a.size() && a[i].key.root == eb.key.root && a[i].key.right_position() <= end) out.push_back(a[i++]);
      if (out.back().key.right_position() != end) throw incompatible();
      ++j;
    } else {
      throw incompatible();
    }
  }
  if (i != a.size() || j != b.size()) throw incompatible();
  return Mesh(a.geometry_ptr(), std::move(out));
}

double shape_regularity(const Mesh& mesh) {
  if (mesh.empty()) throw InvalidInput("shape regularity of an empty mesh");
  double ratio = 1.0;
  for (const Node& nd : mesh.interior_nodes()) {
    const double hp = mesh.length(nd.plus), hm = mesh.length(nd.minus);
    ratio = std::max(ratio, std::max(hp / hm, hm / hp));
  }
  return ratio;
}

MeshHierarchy::MeshHierarchy(Mesh coarse) {
  if (coarse.empty()) throw InvalidInput("hierarchy needs a nonempty coarse mesh");
  levels_.push_back(std::move(coarse));
  parent_.emplace_back();
  is_new_.emplace_back();
}

void MeshHierarchy::push_back(Mesh finer) {
  const Mesh& coarse = levels_.back();
  if (!finer.geometry().same_as(coarse.geometry())) throw InvalidInput("hierarchy levels on different geometries");
  const auto index = coarse.index_map();
  std::vector<int> parent(finer.size());
  std::vector<char> fresh(finer.size(), 0);
  std::size_t fresh_count = 0;
  for (std::size_t i = 0; i < finer.size(); ++i) {
    const ElementKey k = finer[i].key;
    if (auto it = index.find(k); it != index.end()) {
      parent[i] = it->second;
    } else if (auto f = index.find(k.father()); k.generation() > 0 && f != index.end()) {
      parent[i] = f->second;
      fresh[i] = 1;
      ++fresh_count;
    } else {
      throw InvalidInput("level " + std::to_string(levels_.size()) + " is not a one-step refinement of the previous level");
    }
  }
  if (fresh_count % 2 != 0 || finer.size() != coarse.size() + fresh_count / 2)
    throw InvalidInput("level " + std::to_string(levels_.size()) + " does not tile the previous level");
  levels_.push_back(std::move(finer));
  parent_.push_back(std::move(parent));
  is_new_.push_back(std::move(fresh));
}

const std::vector<int>& MeshHierarchy::parent(int l) const {
  if (l < 1 || l > finest_level()) throw InvalidInput("parent map requested for level " + std::to_string(l));
  return parent_[static_cast<std::size_t>(l)];
}

const std::vector<char>& MeshHierarchy::is_new(int l) const {
  if (l < 1 || l > finest_level()) throw InvalidInput("refinement flags requested for level " + std::to_string(l));
  return is_new_[static_cast<std::size_t>(l)];
}

std::vector<Node> MeshHierarchy::new_node_set(int l) const {
  if (l < 1 || l > finest_level())
    throw InvalidInput("new node set is defined for levels 1.." + std::to_string(finest_level()) +
                       ", got " + std::to_string(l));
  const auto& fresh = is_new_[static_cast<std::size_t>(l)];
  std::vector<Node> out;
  for (const Node& nd : level(l).interior_nodes())
    if (fresh[static_cast<std::size_t>(nd.plus)] || fresh[static_cast<std::size_t>(nd.minus)]) out.push_back(nd);
  return out;
}

void write_mesh_csv(std::ostream& out, const Mesh& mesh, const Mesh* previous) {
  using detail::fmt;
  std::unordered_map<ElementKey, int, ElementKeyHash> prev;
  if (previous) prev = previous->index_map();
  out << "element_id,node_left_x,node_left_y,node_right_x,node_right_y,h,generation,father_id\n";
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const Element& e = mesh[i];
    int father = -1;
    if (previous) {
      if (auto it = prev.find(e.key); it != prev.end())
        father = it->second;
      else if (auto f = prev.find(e.key.father()); e.generation() > 0 && f != prev.end())
        father = f->second;
    }
    out << i << ',' << fmt(e.segment.a.x) << ',' << fmt(e.segment.a.y) << ',' << fmt(e.segment.b.x) << ','
        << fmt(e.segment.b.y) << ',' << fmt(e.h) << ',' << e.generation() << ',' << father << '\n';
  }
}

}  // namespace bem2d
