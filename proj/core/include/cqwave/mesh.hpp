#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace cqwave {

using Point2 = std::array<double, 2>;

/// Conforming P1 triangulation with one ordered boundary loop.
/// Triangles are counter-clockwise; boundary_edges trace the loop
/// counter-clockwise (interior to the left, outward normal to the right);
/// boundary_vertices[i] is the first endpoint of boundary_edges[i].
struct TriangleMesh {
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 2>> boundary_edges;
  std::vector<int> boundary_vertices;
  /// Set for disk meshes: refinement projects new boundary vertices onto the
  /// origin-centred circle of this radius.
  std::optional<double> circle_radius;
};

/// Hexagonal-fan disk triangulation refined `level` times; boundary vertices
/// lie on the circle |x| = R. Level 0: 7 vertices, 6 triangles, 6 boundary
/// edges.
TriangleMesh generate_disk(double R, int level);

/// L-shape with corners (-1,-1),(1,-1),(1,3),(-3,3),(-3,1),(-1,1); uniform
/// squares of side 2^{-level+1} split into two triangles.
TriangleMesh generate_lshape(int level);

/// Red refinement: each triangle into four via edge midpoints; boundary
/// midpoints are projected onto the circle when circle_radius is set.
TriangleMesh refine_uniform(const TriangleMesh& m);

/// Plain-text format: "nv nt nb" counts line, nv lines "x y", nt lines
/// "i j k", nb lines "i j" in loop order; 0-based indices, 17 significant
/// digits. load_mesh reports parse failures with their line number.
void save_mesh(const TriangleMesh& m, const std::string& path);
TriangleMesh load_mesh(const std::string& path);

/// Validates the documented invariants (positive areas, edge manifoldness,
/// closed ordered loop, outward normals); throws std::runtime_error on the
/// first violation.
void check_mesh(const TriangleMesh& m);

double mesh_area(const TriangleMesh& m);
double min_angle_deg(const TriangleMesh& m);
/// Longest triangle edge.
double mesh_h(const TriangleMesh& m);

}  // namespace cqwave
