#include "egadv/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace egadv {
namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

int pow4(int n) { return 1 << (2 * n); }

Triangle red_child(const Triangle& t, int c) {
  const Point mab = 0.5 * (t.v[0] + t.v[1]);
  const Point mbc = 0.5 * (t.v[1] + t.v[2]);
  const Point mca = 0.5 * (t.v[2] + t.v[0]);
  switch (c) {
    case 0: return Triangle{{t.v[0], mab, mca}};
    case 1: return Triangle{{mab, t.v[1], mbc}};
    case 2: return Triangle{{mca, mbc, t.v[2]}};
    default: return Triangle{{mab, mbc, mca}};
  }
}

// Leaf-local edge containing x: the barycentric coordinate opposite edge e
// (vertex (e+2)%3) vanishes on it.
int local_edge_of(const Triangle& t, const Point& x) {
  const Point xi = t.to_reference(x);
  const std::array<double, 3> bary{1.0 - xi.x() - xi.y(), xi.x(), xi.y()};
  int best = 0;
  double best_val = std::numeric_limits<double>::max();
  for (int e = 0; e < 3; ++e) {
    const double v = std::abs(bary[static_cast<std::size_t>((e + 2) % 3)]);
    if (v < best_val) best_val = v, best = e;
  }
  return best;
}

}  // namespace

Triangle CoarseMesh::triangle(std::size_t i) const {
  const auto& t = triangles[i];
  return Triangle{{vertices[static_cast<std::size_t>(t[0])], vertices[static_cast<std::size_t>(t[1])],
                   vertices[static_cast<std::size_t>(t[2])]}};
}

std::size_t CoarseMesh::edge_count() const {
  std::set<EdgeKey> edges;
  for (const auto& t : triangles)
    for (int e = 0; e < 3; ++e) edges.insert(edge_key(t[static_cast<std::size_t>(e)], t[static_cast<std::size_t>((e + 1) % 3)]));
  return edges.size();
}

double CoarseMesh::total_area() const {
  double a = 0.0;
  for (std::size_t i = 0; i < size(); ++i) a += triangle(i).area();
  return a;
}

CoarseMesh make_mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles,
                     const BoundaryTagger& tagger, int level) {
  CoarseMesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.triangles = std::move(triangles);
  mesh.level = level;
  const auto nv = static_cast<int>(mesh.vertices.size());
  for (auto& t : mesh.triangles) {
    for (int v : t)
      if (v < 0 || v >= nv) throw std::invalid_argument("triangle references missing vertex");
    Triangle geom{{mesh.vertices[static_cast<std::size_t>(t[0])], mesh.vertices[static_cast<std::size_t>(t[1])],
                   mesh.vertices[static_cast<std::size_t>(t[2])]}};
    const double a = geom.signed_area();
    if (!(std::abs(a) > 0.0)) throw std::invalid_argument("degenerate triangle");
    if (a < 0.0) std::swap(t[1], t[2]);
  }
  std::map<EdgeKey, int> count;
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) ++count[edge_key(t[static_cast<std::size_t>(e)], t[static_cast<std::size_t>((e + 1) % 3)])];
  mesh.edge_tags.resize(mesh.triangles.size());
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& t = mesh.triangles[i];
    for (std::size_t e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      const int c = count[edge_key(a, b)];
      if (c > 2) throw std::invalid_argument("edge shared by more than two triangles");
      mesh.edge_tags[i][e] =
          c == 2 ? kInteriorEdge
                 : (tagger ? tagger(mesh.vertices[static_cast<std::size_t>(a)], mesh.vertices[static_cast<std::size_t>(b)]) : 0);
    }
  }
  return mesh;
}

CoarseMesh build_unit_square_mesh(int level) {
  if (level < 1) throw std::invalid_argument("mesh level must be >= 1, got " + std::to_string(level));
  CoarseMesh mesh;
  mesh.vertices = {Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1), Point(0.5, 0.5)};
  mesh.triangles = {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
  mesh.edge_tags = {{kBottom, kInteriorEdge, kInteriorEdge},
                    {kRight, kInteriorEdge, kInteriorEdge},
                    {kTop, kInteriorEdge, kInteriorEdge},
                    {kLeft, kInteriorEdge, kInteriorEdge}};
  mesh.level = 1;
  while (mesh.level < level) mesh = refine_red(mesh);
  return mesh;
}

CoarseMesh refine_red(const CoarseMesh& mesh) {
  CoarseMesh out;
  out.vertices = mesh.vertices;
  out.level = mesh.level + 1;
  out.triangles.reserve(4 * mesh.size());
  out.edge_tags.reserve(4 * mesh.size());
  std::map<EdgeKey, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = edge_key(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back(0.5 * (mesh.vertices[static_cast<std::size_t>(a)] + mesh.vertices[static_cast<std::size_t>(b)]));
    midpoint.emplace(key, id);
    return id;
  };
  constexpr int in = kInteriorEdge;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const auto [a, b, c] = mesh.triangles[i];
    const auto [t0, t1, t2] = mesh.edge_tags[i];
    const int mab = mid(a, b), mbc = mid(b, c), mca = mid(c, a);
    out.triangles.push_back({a, mab, mca});
    out.edge_tags.push_back({t0, in, t2});
    out.triangles.push_back({mab, b, mbc});
    out.edge_tags.push_back({t0, t1, in});
    out.triangles.push_back({mca, mbc, c});
    out.edge_tags.push_back({in, t1, t2});
    out.triangles.push_back({mab, mbc, mca});
    out.edge_tags.push_back({in, in, in});
  }
  return out;
}

TwoLevelMesh::TwoLevelMesh(CoarseMesh coarse, std::vector<int> marks, int max_depth)
    : coarse_(std::move(coarse)), marks_(std::move(marks)), max_depth_(max_depth) {
  if (max_depth_ < 0) throw std::invalid_argument("max refinement depth must be >= 0");
  if (marks_.size() != coarse_.size())
    throw std::invalid_argument("one refinement mark per coarse element required");
  for (int d : marks_)
    if (d < 0 || d > max_depth_)
      throw std::invalid_argument("refinement mark " + std::to_string(d) + " outside [0, " +
                                  std::to_string(max_depth_) + "]");

  fine_ = coarse_;
  for (int d = 0; d < max_depth_; ++d) fine_ = refine_red(fine_);

  leaf_begin_.resize(coarse_.size() + 1, 0);
  for (std::size_t k = 0; k < coarse_.size(); ++k) {
    leaf_begin_[k] = static_cast<int>(leaves_.size());
    const int depth = marks_[k];
    std::vector<Triangle> cells{coarse_.triangle(k)};
    for (int d = 0; d < depth; ++d) {
      std::vector<Triangle> next;
      next.reserve(4 * cells.size());
      for (const auto& t : cells)
        for (int c = 0; c < 4; ++c) next.push_back(red_child(t, c));
      cells = std::move(next);
    }
    for (std::size_t s = 0; s < cells.size(); ++s)
      leaves_.push_back(Leaf{cells[s], static_cast<int>(k), depth, static_cast<int>(s)});
  }
  leaf_begin_[coarse_.size()] = static_cast<int>(leaves_.size());
  build_faces();
}

std::pair<int, int> TwoLevelMesh::leaves_of_coarse(std::size_t k) const {
  return {leaf_begin_[k], leaf_begin_[k + 1] - leaf_begin_[k]};
}

int TwoLevelMesh::leaf_of_fine(std::size_t fine_cell) const {
  const auto per_coarse = static_cast<std::size_t>(pow4(max_depth_));
  const std::size_t k = fine_cell / per_coarse;
  const std::size_t local = fine_cell % per_coarse;
  const auto per_leaf = static_cast<std::size_t>(pow4(max_depth_ - marks_[k]));
  return leaf_begin_[k] + static_cast<int>(local / per_leaf);
}

std::pair<int, int> TwoLevelMesh::fine_cells_of_leaf(std::size_t leaf) const {
  const Leaf& l = leaves_[leaf];
  const int per_leaf = pow4(max_depth_ - l.depth);
  return {l.parent * pow4(max_depth_) + l.index_in_parent * per_leaf, per_leaf};
}

void TwoLevelMesh::build_faces() {
  struct Accumulator {
    int minus, plus, tag;
    std::array<int, 2> local_edge;
    Point origin;
    Vector2 direction;
    double smin = std::numeric_limits<double>::max();
    double smax = std::numeric_limits<double>::lowest();
  };
  // Key: (minus leaf, plus leaf or -1, minus-local edge for boundary faces).
  std::map<std::tuple<int, int, int>, Accumulator> groups;
  std::map<EdgeKey, std::pair<int, int>> seen;  // fine edge -> (fine cell, local edge)

  auto add_piece = [&](int leaf_a, int fine_a, int edge_a, int leaf_b) {
    const auto& ft = fine_.triangles[static_cast<std::size_t>(fine_a)];
    const Point p = fine_.vertices[static_cast<std::size_t>(ft[static_cast<std::size_t>(edge_a)])];
    const Point q = fine_.vertices[static_cast<std::size_t>(ft[static_cast<std::size_t>((edge_a + 1) % 3)])];
    const Point m = 0.5 * (p + q);
    int minus = leaf_a, plus = leaf_b;
    if (plus >= 0 && plus < minus) std::swap(minus, plus);
    const Triangle& tm = leaves_[static_cast<std::size_t>(minus)].geometry;
    const int em = local_edge_of(tm, m);
    const int ep = plus >= 0 ? local_edge_of(leaves_[static_cast<std::size_t>(plus)].geometry, m) : -1;
    const auto key = std::make_tuple(minus, plus, plus >= 0 ? -1 : em);
    auto it = groups.find(key);
    if (it == groups.end()) {
      const Point a = tm.v[static_cast<std::size_t>(em)];
      const Point b = tm.v[static_cast<std::size_t>((em + 1) % 3)];
      Accumulator acc{minus, plus, kInteriorEdge, {em, ep}, a, (b - a).normalized()};
      if (plus < 0) acc.tag = fine_.edge_tags[static_cast<std::size_t>(fine_a)][static_cast<std::size_t>(edge_a)];
      it = groups.emplace(key, acc).first;
    }
    auto& acc = it->second;
    for (const Point& x : {p, q}) {
      const double s = acc.direction.dot(x - acc.origin);
      acc.smin = std::min(acc.smin, s);
      acc.smax = std::max(acc.smax, s);
    }
  };

  for (std::size_t f = 0; f < fine_.size(); ++f) {
    const auto& t = fine_.triangles[f];
    const int leaf_f = leaf_of_fine(f);
    for (int e = 0; e < 3; ++e) {
      const auto key = edge_key(t[static_cast<std::size_t>(e)], t[static_cast<std::size_t>((e + 1) % 3)]);
      if (fine_.edge_tags[f][static_cast<std::size_t>(e)] != kInteriorEdge) {
        add_piece(leaf_f, static_cast<int>(f), e, -1);
        continue;
      }
      auto it = seen.find(key);
      if (it == seen.end()) {
        seen.emplace(key, std::make_pair(static_cast<int>(f), e));
        continue;
      }
      const int leaf_g = leaf_of_fine(static_cast<std::size_t>(it->second.first));
      if (leaf_g != leaf_f) add_piece(leaf_f, static_cast<int>(f), e, leaf_g);
      seen.erase(it);
    }
  }

  faces_.clear();
  faces_.reserve(groups.size());
  std::map<std::pair<int, int>, int> faces_per_leaf_edge;
  for (const auto& [key, acc] : groups) {
    Face face;
    face.endpoints = {acc.origin + acc.smin * acc.direction, acc.origin + acc.smax * acc.direction};
    face.kind = acc.plus >= 0 ? FaceKind::interior : FaceKind::boundary;
    face.boundary_tag = acc.tag;
    face.minus = acc.minus;
    face.plus = acc.plus;
    face.local_edge = acc.local_edge;
    face.length = acc.smax - acc.smin;
    face.normal = Vector2(acc.direction.y(), -acc.direction.x());
    faces_.push_back(face);
    ++faces_per_leaf_edge[{acc.minus, acc.local_edge[0]}];
    if (acc.plus >= 0) ++faces_per_leaf_edge[{acc.plus, acc.local_edge[1]}];
  }
  hanging_nodes_ = 0;
  for (const auto& [key, n] : faces_per_leaf_edge) hanging_nodes_ += n - 1;
}

double TwoLevelMesh::min_leaf_diameter() const {
  double h = std::numeric_limits<double>::max();
  for (const auto& l : leaves_) h = std::min(h, l.geometry.diameter());
  return h;
}

std::optional<int> TwoLevelMesh::locate(const Point& x) const {
  for (std::size_t k = 0; k < coarse_.size(); ++k) {
    if (!coarse_.triangle(k).contains(x)) continue;
    const auto [first, count] = leaves_of_coarse(k);
    for (int l = first; l < first + count; ++l)
      if (leaves_[static_cast<std::size_t>(l)].geometry.contains(x)) return l;
  }
  return std::nullopt;
}

TwoLevelMesh build_two_level(const CoarseMesh& coarse, std::vector<int> marks, int max_depth) {
  return TwoLevelMesh(coarse, std::move(marks), max_depth);
}

double weak_quasi_uniformity_ratio(const TwoLevelMesh& mesh) {
  double ratio = 1.0;
  for (std::size_t k = 0; k < mesh.coarse().size(); ++k) {
    if (mesh.marks()[k] == 0) continue;
    const auto [first, count] = mesh.leaves_of_coarse(k);
    double hmin = std::numeric_limits<double>::max(), hmax = 0.0;
    for (int l = first; l < first + count; ++l) {
      const double h = mesh.leaves()[static_cast<std::size_t>(l)].geometry.diameter();
      hmin = std::min(hmin, h);
      hmax = std::max(hmax, h);
    }
    ratio = std::max(ratio, hmax / hmin);
  }
  return ratio;
}

}  // namespace egadv
