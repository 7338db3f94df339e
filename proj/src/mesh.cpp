#include "fluxrec/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace fluxrec {

namespace {

std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

EdgeKind kind_from_code(char c) {
    switch (c) {
        case 'I': return EdgeKind::Interior;
        case 'D': return EdgeKind::Dirichlet;
        case 'N': return EdgeKind::Neumann;
        default: throw MeshError(std::string("unknown edge kind code '") + c + "'");
    }
}

}  // namespace

char edge_kind_code(EdgeKind kind) {
    switch (kind) {
        case EdgeKind::Interior: return 'I';
        case EdgeKind::Dirichlet: return 'D';
        case EdgeKind::Neumann: return 'N';
    }
    return '?';
}

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
           const std::vector<BoundaryEdge> &boundary, std::vector<int> generation)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), generation_(std::move(generation)) {
    if (generation_.empty()) generation_.assign(triangles_.size(), 0);
    if (generation_.size() != triangles_.size()) throw MeshError("generation count does not match triangle count");
    if (triangles_.empty()) throw MeshError("mesh has no triangles");
    const int nv = static_cast<int>(vertices_.size());
    for (const auto &tri : triangles_) {
        for (int v : tri) {
            if (v < 0 || v >= nv) throw MeshError("triangle references a vertex out of range");
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) throw MeshError("triangle with repeated vertex");
    }
    build_topology(boundary);
    validate();
}

void Mesh::build_topology(const std::vector<BoundaryEdge> &boundary) {
    std::unordered_map<std::uint64_t, int> index;
    index.reserve(triangles_.size() * 2);
    tri_edges_.assign(triangles_.size(), {-1, -1, -1});
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto &tri = triangles_[t];
        for (int i = 0; i < 3; ++i) {
            const int a = tri[static_cast<std::size_t>((i + 1) % 3)];
            const int b = tri[static_cast<std::size_t>((i + 2) % 3)];
            auto [it, inserted] = index.try_emplace(edge_key(a, b), static_cast<int>(edges_.size()));
            if (inserted) {
                Edge e;
                e.v = {std::min(a, b), std::max(a, b)};
                e.tri = {static_cast<int>(t), -1};
                edges_.push_back(e);
            } else {
                Edge &e = edges_[static_cast<std::size_t>(it->second)];
                if (e.tri[1] >= 0) throw MeshError("edge shared by more than two triangles");
                e.tri[1] = static_cast<int>(t);
            }
            tri_edges_[t][static_cast<std::size_t>(i)] = it->second;
        }
    }

    std::size_t tagged = 0;
    for (const auto &b : boundary) {
        auto it = index.find(edge_key(b.v0, b.v1));
        if (it == index.end()) throw MeshError("boundary tag refers to a non-existent edge");
        Edge &e = edges_[static_cast<std::size_t>(it->second)];
        if (!e.is_boundary()) throw MeshError("boundary tag refers to an interior edge");
        if (b.kind == EdgeKind::Interior) throw MeshError("boundary edge tagged as interior");
        if (e.kind != EdgeKind::Interior) throw MeshError("boundary edge tagged twice");
        e.kind = b.kind;
        ++tagged;
    }
    for (const auto &e : edges_) {
        if (e.is_boundary() && e.kind == EdgeKind::Interior) throw MeshError("boundary edge without a tag");
    }
    (void)tagged;
}

std::array<Vec2, 3> Mesh::corners(int t) const {
    const auto &tri = triangle(t);
    return {vertex(tri[0]), vertex(tri[1]), vertex(tri[2])};
}

double Mesh::area(int t) const {
    const auto p = corners(t);
    return 0.5 * cross(p[1] - p[0], p[2] - p[0]);
}

Vec2 Mesh::centroid(int t) const {
    const auto p = corners(t);
    return (1.0 / 3.0) * (p[0] + p[1] + p[2]);
}

Vec2 Mesh::normal(int e) const {
    const Edge &ed = edge(e);
    const Vec2 a = vertex(ed.v[0]);
    const Vec2 b = vertex(ed.v[1]);
    const Vec2 d = b - a;
    const double len = norm(d);
    Vec2 n{d.y / len, -d.x / len};
    // Orient outward from the plus triangle.
    const Vec2 opp = vertex(opposite_vertex(e, ed.tri[0]));
    if (dot(n, a - opp) < 0.0) n = -n;
    return n;
}

int Mesh::orientation(int e, int t) const {
    const Edge &ed = edge(e);
    if (ed.tri[0] == t) return 1;
    if (ed.tri[1] == t) return -1;
    throw MeshError("triangle is not adjacent to edge");
}

int Mesh::opposite_vertex(int e, int t) const {
    const auto &te = triangle_edges(t);
    for (int i = 0; i < 3; ++i) {
        if (te[static_cast<std::size_t>(i)] == e) return triangle(t)[static_cast<std::size_t>(i)];
    }
    throw MeshError("triangle is not adjacent to edge");
}

std::vector<BoundaryEdge> Mesh::boundary_edges() const {
    std::vector<BoundaryEdge> out;
    for (const auto &e : edges_) {
        if (e.is_boundary()) out.push_back({e.v[0], e.v[1], e.kind});
    }
    return out;
}

bool Mesh::has_kind(EdgeKind kind) const {
    return std::any_of(edges_.begin(), edges_.end(), [kind](const Edge &e) { return e.kind == kind; });
}

double Mesh::total_area() const {
    double s = 0.0;
    for (int t = 0; t < static_cast<int>(num_triangles()); ++t) s += area(t);
    return s;
}

void Mesh::validate() const {
    for (int t = 0; t < static_cast<int>(num_triangles()); ++t) {
        if (!(area(t) > 0.0)) {
            std::ostringstream msg;
            msg << "triangle " << t << " has non-positive signed area";
            throw MeshError(msg.str());
        }
    }
    std::vector<char> used(vertices_.size(), 0);
    for (const auto &tri : triangles_)
        for (int v : tri) used[static_cast<std::size_t>(v)] = 1;
    if (std::find(used.begin(), used.end(), 0) != used.end()) throw MeshError("mesh has an unreferenced vertex");

    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const Edge &ed = edges_[e];
        if (ed.tri[1] >= 0) {
            if (ed.kind != EdgeKind::Interior) throw MeshError("interior edge carries a boundary tag");
            if (ed.tri[0] >= ed.tri[1]) throw MeshError("edge orientation invariant violated");
            // Consistent orientation: the two triangles traverse the edge in opposite directions.
            auto direction = [&](int t) {
                const auto &tri = triangle(t);
                for (int i = 0; i < 3; ++i) {
                    if (tri[static_cast<std::size_t>(i)] == ed.v[0])
                        return tri[static_cast<std::size_t>((i + 1) % 3)] == ed.v[1] ? 1 : -1;
                }
                return 0;
            };
            if (direction(ed.tri[0]) * direction(ed.tri[1]) != -1)
                throw MeshError("adjacent triangles have inconsistent orientation");
        }
    }
    if (!has_kind(EdgeKind::Dirichlet)) throw MeshError("Dirichlet boundary is empty");
}

Mesh build_initial_square_mesh(Vec2 lo, Vec2 hi, int n, const SideKinds &sides) {
    if (n < 1) throw MeshError("number of subdivisions must be at least 1");
    if (!(hi.x > lo.x) || !(hi.y > lo.y)) throw MeshError("degenerate rectangle");
    const int m = n + 1;
    std::vector<Vec2> verts;
    verts.reserve(static_cast<std::size_t>(m * m));
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            // Exact end coordinates so that boundary vertices lie exactly on the sides.
            const double x = i == n ? hi.x : lo.x + (hi.x - lo.x) * i / n;
            const double y = j == n ? hi.y : lo.y + (hi.y - lo.y) * j / n;
            verts.push_back({x, y});
        }
    }
    auto id = [m](int i, int j) { return j * m + i; };
    std::vector<std::array<int, 3>> tris;
    tris.reserve(static_cast<std::size_t>(2 * n * n));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int bl = id(i, j), br = id(i + 1, j), tl = id(i, j + 1), tr = id(i + 1, j + 1);
            // Diagonal br -- tl.
            tris.push_back({bl, br, tl});
            tris.push_back({br, tr, tl});
        }
    }
    std::vector<BoundaryEdge> boundary;
    for (int i = 0; i < n; ++i) {
        boundary.push_back({id(i, 0), id(i + 1, 0), sides.bottom});
        boundary.push_back({id(i, n), id(i + 1, n), sides.top});
        boundary.push_back({id(0, i), id(0, i + 1), sides.left});
        boundary.push_back({id(n, i), id(n, i + 1), sides.right});
    }
    return Mesh(std::move(verts), std::move(tris), boundary);
}

double edge_length(const Mesh &mesh, int e) {
    const Edge &ed = mesh.edge(e);
    return norm(mesh.vertex(ed.v[1]) - mesh.vertex(ed.v[0]));
}

int longest_local_edge(const Mesh &mesh, int t) {
    const auto &te = mesh.triangle_edges(t);
    int best = 0;
    double best_len = edge_length(mesh, te[0]);
    for (int i = 1; i < 3; ++i) {
        const double len = edge_length(mesh, te[static_cast<std::size_t>(i)]);
        const double scale = std::max(len, best_len);
        if (len > best_len + 1e-12 * scale) {
            best = i;
            best_len = len;
        } else if (len >= best_len - 1e-12 * scale && te[static_cast<std::size_t>(i)] < te[static_cast<std::size_t>(best)]) {
            best = i;
            best_len = std::max(len, best_len);
        }
    }
    return best;
}

double element_diameter(const Mesh &mesh, int t) {
    const auto &te = mesh.triangle_edges(t);
    return std::max({edge_length(mesh, te[0]), edge_length(mesh, te[1]), edge_length(mesh, te[2])});
}

double max_diameter(const Mesh &mesh) {
    double h = 0.0;
    for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) h = std::max(h, element_diameter(mesh, t));
    return h;
}

double min_diameter(const Mesh &mesh) {
    double h = std::numeric_limits<double>::infinity();
    for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) h = std::min(h, element_diameter(mesh, t));
    return h;
}

double min_angle_degrees(const Mesh &mesh) {
    double best = 180.0;
    for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
        const auto p = mesh.corners(t);
        for (int i = 0; i < 3; ++i) {
            const Vec2 u = p[static_cast<std::size_t>((i + 1) % 3)] - p[static_cast<std::size_t>(i)];
            const Vec2 v = p[static_cast<std::size_t>((i + 2) % 3)] - p[static_cast<std::size_t>(i)];
            const double angle = std::atan2(std::abs(cross(u, v)), dot(u, v)) * 180.0 / std::numbers::pi;
            best = std::min(best, angle);
        }
    }
    return best;
}

void write_mesh_text(std::ostream &out, const Mesh &mesh) {
    const auto old_precision = out.precision(17);
    out << "vertices " << mesh.num_vertices() << " triangles " << mesh.num_triangles() << " edges "
        << mesh.num_edges() << '\n';
    for (const auto &v : mesh.vertices()) out << "v " << v.x << ' ' << v.y << '\n';
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto &tri = mesh.triangles()[t];
        out << "t " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' ' << mesh.generation()[t] << '\n';
    }
    for (const auto &e : mesh.edges()) {
        out << "e " << e.v[0] << ' ' << e.v[1] << ' ' << e.tri[0] << ' ' << e.tri[1] << ' ' << edge_kind_code(e.kind)
            << '\n';
    }
    out.precision(old_precision);
}

Mesh read_mesh_text(std::istream &in) {
    std::string word;
    std::size_t nv = 0, nt = 0, ne = 0;
    if (!(in >> word) || word != "vertices" || !(in >> nv >> word) || word != "triangles" || !(in >> nt >> word) ||
        word != "edges" || !(in >> ne))
        throw MeshError("malformed mesh header");
    std::vector<Vec2> verts(nv);
    std::vector<std::array<int, 3>> tris(nt);
    std::vector<int> gen(nt);
    std::vector<BoundaryEdge> boundary;
    for (auto &v : verts) {
        if (!(in >> word >> v.x >> v.y) || word != "v") throw MeshError("malformed vertex line");
    }
    for (std::size_t t = 0; t < nt; ++t) {
        if (!(in >> word >> tris[t][0] >> tris[t][1] >> tris[t][2] >> gen[t]) || word != "t")
            throw MeshError("malformed triangle line");
    }
    for (std::size_t e = 0; e < ne; ++e) {
        int a = 0, b = 0, p = 0, q = 0;
        char code = 0;
        if (!(in >> word >> a >> b >> p >> q >> code) || word != "e") throw MeshError("malformed edge line");
        const EdgeKind kind = kind_from_code(code);
        if (kind != EdgeKind::Interior) boundary.push_back({a, b, kind});
    }
    return Mesh(std::move(verts), std::move(tris), boundary, std::move(gen));
}

}  // namespace fluxrec
