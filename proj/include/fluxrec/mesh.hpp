#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "fluxrec/types.hpp"

namespace fluxrec {

enum class EdgeKind : std::uint8_t { Interior, Dirichlet, Neumann };

char edge_kind_code(EdgeKind kind);

class MeshError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A tagged boundary segment, given by its two end vertices.
struct BoundaryEdge {
    int v0 = 0;
    int v1 = 0;
    EdgeKind kind = EdgeKind::Dirichlet;
};

/// Edge with a fixed orientation. `v[0] < v[1]`. `tri[0]` is the triangle with
/// the smaller index (the "plus" side); `tri[1]` is -1 on the boundary. The
/// unit normal points out of `tri[0]`.
struct Edge {
    std::array<int, 2> v{};
    std::array<int, 2> tri{-1, -1};
    EdgeKind kind = EdgeKind::Interior;

    bool is_boundary() const { return tri[1] < 0; }
};

/// Conforming triangulation of a polygonal domain.
///
/// Triangles are stored counterclockwise. Local edge `i` of a triangle is the
/// side opposite its local vertex `i`. Construction derives the edge topology
/// and validates every invariant; a `Mesh` is immutable afterwards.
class Mesh {
public:
    Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
         const std::vector<BoundaryEdge> &boundary, std::vector<int> generation = {});

    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_triangles() const { return triangles_.size(); }
    std::size_t num_edges() const { return edges_.size(); }

    const std::vector<Vec2> &vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>> &triangles() const { return triangles_; }
    const std::vector<Edge> &edges() const { return edges_; }
    const std::vector<int> &generation() const { return generation_; }

    const Vec2 &vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
    const std::array<int, 3> &triangle(int t) const { return triangles_[static_cast<std::size_t>(t)]; }
    const Edge &edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
    /// Global edge index of local edge `i` (opposite local vertex `i`).
    int triangle_edge(int t, int i) const { return tri_edges_[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)]; }
    const std::array<int, 3> &triangle_edges(int t) const { return tri_edges_[static_cast<std::size_t>(t)]; }

    std::array<Vec2, 3> corners(int t) const;
    double area(int t) const;
    Vec2 centroid(int t) const;
    /// Unit normal of edge `e`, pointing out of `edge(e).tri[0]`.
    Vec2 normal(int e) const;
    /// +1 if `t` is the plus triangle of `e`, -1 otherwise.
    int orientation(int e, int t) const;
    /// Vertex of `t` opposite edge `e`.
    int opposite_vertex(int e, int t) const;

    std::vector<BoundaryEdge> boundary_edges() const;
    bool has_kind(EdgeKind kind) const;
    double total_area() const;

    /// Checks all structural invariants; throws `MeshError` on violation.
    void validate() const;

private:
    void build_topology(const std::vector<BoundaryEdge> &boundary);

    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<int> generation_;
    std::vector<Edge> edges_;
    std::vector<std::array<int, 3>> tri_edges_;
};

/// Tags of the four sides of an axis-aligned rectangle.
struct SideKinds {
    EdgeKind left = EdgeKind::Dirichlet;
    EdgeKind right = EdgeKind::Dirichlet;
    EdgeKind bottom = EdgeKind::Dirichlet;
    EdgeKind top = EdgeKind::Dirichlet;
};

/// n x n squares, each split by the diagonal from its bottom-right to its
/// top-left corner.
Mesh build_initial_square_mesh(Vec2 corner_lo, Vec2 corner_hi, int n, const SideKinds &sides = {});

/// Longest-edge bisection of every marked triangle, closed to a conforming mesh.
/// With `all_sides` every side of a marked triangle is bisected (four children).
Mesh longest_edge_refine(const Mesh &mesh, const std::vector<int> &marked, bool all_sides = false);

Mesh uniform_refine(const Mesh &mesh);

/// Diameter h_K (longest side).
double element_diameter(const Mesh &mesh, int t);
double edge_length(const Mesh &mesh, int e);
/// Local index (0..2) of the longest side of `t`; ties go to the lowest global edge index.
int longest_local_edge(const Mesh &mesh, int t);

double max_diameter(const Mesh &mesh);
double min_diameter(const Mesh &mesh);
/// Smallest interior angle over all triangles, in degrees.
double min_angle_degrees(const Mesh &mesh);

/// Plain-text dump: `vertices N triangles M edges E`, then `v x y` lines,
/// `t a b c generation` lines and `e a b plus minus kind` lines with kind in
/// {I, D, N}.
void write_mesh_text(std::ostream &out, const Mesh &mesh);
Mesh read_mesh_text(std::istream &in);

}  // namespace fluxrec
