#pragma once

#include "egadv/geometry.hpp"

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace egadv {

/// Tags used by build_unit_square_mesh for the four sides of (0,1)^2.
enum UnitSquareSide : int { kBottom = 0, kRight = 1, kTop = 2, kLeft = 3 };

inline constexpr int kInteriorEdge = -1;

/// Conforming straight-edged triangulation. Triangles are counterclockwise;
/// local edge e runs from vertex e to vertex (e+1)%3 and carries a boundary
/// tag >= 0 or kInteriorEdge.
struct CoarseMesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 3>> edge_tags;
  int level = 1;

  [[nodiscard]] std::size_t size() const { return triangles.size(); }
  [[nodiscard]] Triangle triangle(std::size_t i) const;
  /// Number of distinct edges (interior + boundary).
  [[nodiscard]] std::size_t edge_count() const;
  [[nodiscard]] double total_area() const;
};

/// Tagger for boundary edges of a user-supplied triangulation, called with
/// the two edge endpoints.
using BoundaryTagger = std::function<int(const Point&, const Point&)>;

/// Builds a CoarseMesh from raw connectivity: orients triangles
/// counterclockwise, finds boundary edges and tags them (tag 0 if no tagger).
/// Throws std::invalid_argument on degenerate triangles or edges shared by
/// more than two triangles.
[[nodiscard]] CoarseMesh make_mesh(std::vector<Point> vertices,
                                   std::vector<std::array<int, 3>> triangles,
                                   const BoundaryTagger& tagger = {}, int level = 1);

/// Unit square split along both diagonals (level 1, four triangles), red
/// refined level-1 times. Throws std::invalid_argument for level < 1.
[[nodiscard]] CoarseMesh build_unit_square_mesh(int level);

/// Red refinement: every triangle is replaced by its four midpoint children.
/// Child c of triangle p gets index 4p + c (corner children 0..2 at vertex c,
/// child 3 in the middle). Existing vertices keep their indices.
[[nodiscard]] CoarseMesh refine_red(const CoarseMesh& mesh);

enum class FaceKind { interior, boundary };

/// Face of the two-level skeleton: the full common segment of two leaves, or
/// a leaf edge on the domain boundary. The normal points from minus to plus
/// (outward of minus); endpoints are ordered so that normal = rot(-90) of
/// (endpoints[1] - endpoints[0]) / length.
struct Face {
  std::array<Point, 2> endpoints;
  FaceKind kind = FaceKind::interior;
  int boundary_tag = kInteriorEdge;
  int minus = -1;
  int plus = -1;
  std::array<int, 2> local_edge{-1, -1};  // leaf-local edge index on each side
  Vector2 normal = Vector2::Zero();
  double length = 0.0;

  [[nodiscard]] Point point(double s) const {
    return endpoints[0] + s * (endpoints[1] - endpoints[0]);
  }
};

/// Leaf cell of the two-level mesh: an unrefined coarse triangle (depth 0) or
/// a depth-d red-refinement subcell of a coarse triangle.
struct Leaf {
  Triangle geometry;
  int parent = -1;
  int depth = 0;
  int index_in_parent = 0;
};

/// Coarse mesh with per-element refinement marks, its leaves, the conforming
/// embedding mesh at the maximal depth and the face skeleton. Immutable.
class TwoLevelMesh {
 public:
  /// Throws std::invalid_argument if a mark is negative, exceeds max_depth, or
  /// marks.size() does not match the coarse mesh.
  TwoLevelMesh(CoarseMesh coarse, std::vector<int> marks, int max_depth);

  [[nodiscard]] const CoarseMesh& coarse() const { return coarse_; }
  [[nodiscard]] std::span<const int> marks() const { return marks_; }
  [[nodiscard]] int max_depth() const { return max_depth_; }

  [[nodiscard]] const std::vector<Leaf>& leaves() const { return leaves_; }
  [[nodiscard]] std::size_t leaf_count() const { return leaves_.size(); }
  /// Leaves of coarse element k occupy [first, first + count).
  [[nodiscard]] std::pair<int, int> leaves_of_coarse(std::size_t k) const;

  /// Conforming mesh at depth max_depth (T_h).
  [[nodiscard]] const CoarseMesh& fine() const { return fine_; }
  [[nodiscard]] int leaf_of_fine(std::size_t fine_cell) const;
  /// Fine cells of a leaf occupy [first, first + count).
  [[nodiscard]] std::pair<int, int> fine_cells_of_leaf(std::size_t leaf) const;

  [[nodiscard]] const std::vector<Face>& faces() const { return faces_; }
  /// Number of leaf vertices lying strictly inside an edge of another leaf.
  [[nodiscard]] int hanging_node_count() const { return hanging_nodes_; }

  [[nodiscard]] double min_leaf_diameter() const;
  /// Leaf containing x (closed), or nullopt if x is outside the mesh.
  [[nodiscard]] std::optional<int> locate(const Point& x) const;

 private:
  void build_faces();

  CoarseMesh coarse_;
  std::vector<int> marks_;
  int max_depth_;
  CoarseMesh fine_;
  std::vector<Leaf> leaves_;
  std::vector<int> leaf_begin_;  // per coarse element, size N_el + 1
  std::vector<Face> faces_;
  int hanging_nodes_ = 0;
};

/// Builds the two-level mesh. Equivalent to the TwoLevelMesh constructor.
[[nodiscard]] TwoLevelMesh build_two_level(const CoarseMesh& coarse, std::vector<int> marks,
                                           int max_depth);

/// Largest ratio (max subcell diameter) / (min subcell diameter) over refined
/// coarse elements; 1 when nothing is refined.
[[nodiscard]] double weak_quasi_uniformity_ratio(const TwoLevelMesh& mesh);

}  // namespace egadv
