#include <deque>

#include "fluxrec/mesh.hpp"

namespace fluxrec {

namespace {

// Splits every triangle according to the bisected-edge set. `split` must be
// closed: a triangle with any bisected side has its longest side bisected.
// Children come from bisecting through the longest side first, then through
// the midpoints of the remaining bisected sides.
Mesh bisect_edges(const Mesh &mesh, const std::vector<int> &longest, const std::vector<char> &split) {
    const int nt = static_cast<int>(mesh.num_triangles());
    const int ne = static_cast<int>(mesh.num_edges());

    std::vector<Vec2> verts = mesh.vertices();
    std::vector<int> mid(static_cast<std::size_t>(ne), -1);
    for (int e = 0; e < ne; ++e) {
        if (!split[static_cast<std::size_t>(e)]) continue;
        const Edge &ed = mesh.edge(e);
        mid[static_cast<std::size_t>(e)] = static_cast<int>(verts.size());
        verts.push_back(midpoint(mesh.vertex(ed.v[0]), mesh.vertex(ed.v[1])));
    }

    std::vector<std::array<int, 3>> tris;
    std::vector<int> gen;
    tris.reserve(mesh.num_triangles() * 2);
    gen.reserve(mesh.num_triangles() * 2);
    for (int t = 0; t < nt; ++t) {
        const auto &tri = mesh.triangle(t);
        const int g = mesh.generation()[static_cast<std::size_t>(t)];
        const int i = longest[static_cast<std::size_t>(t)];
        const int e_long = mesh.triangle_edge(t, i);
        if (!split[static_cast<std::size_t>(e_long)]) {
            tris.push_back(tri);
            gen.push_back(g);
            continue;
        }
        const int v0 = tri[static_cast<std::size_t>(i)];
        const int v1 = tri[static_cast<std::size_t>((i + 1) % 3)];
        const int v2 = tri[static_cast<std::size_t>((i + 2) % 3)];
        const int m = mid[static_cast<std::size_t>(e_long)];
        const int p = mid[static_cast<std::size_t>(mesh.triangle_edge(t, (i + 2) % 3))];  // side v0-v1
        const int q = mid[static_cast<std::size_t>(mesh.triangle_edge(t, (i + 1) % 3))];  // side v2-v0

        if (p < 0) {
            tris.push_back({v0, v1, m});
            gen.push_back(g + 1);
        } else {
            tris.push_back({m, v0, p});
            tris.push_back({m, p, v1});
            gen.push_back(g + 2);
            gen.push_back(g + 2);
        }
        if (q < 0) {
            tris.push_back({v0, m, v2});
            gen.push_back(g + 1);
        } else {
            tris.push_back({m, v2, q});
            tris.push_back({m, q, v0});
            gen.push_back(g + 2);
            gen.push_back(g + 2);
        }
    }

    std::vector<BoundaryEdge> boundary;
    for (int e = 0; e < ne; ++e) {
        const Edge &ed = mesh.edge(e);
        if (!ed.is_boundary()) continue;
        const int m = mid[static_cast<std::size_t>(e)];
        if (m < 0) {
            boundary.push_back({ed.v[0], ed.v[1], ed.kind});
        } else {
            boundary.push_back({ed.v[0], m, ed.kind});
            boundary.push_back({m, ed.v[1], ed.kind});
        }
    }
    return Mesh(std::move(verts), std::move(tris), boundary, std::move(gen));
}

std::vector<int> longest_edges(const Mesh &mesh) {
    std::vector<int> longest(mesh.num_triangles());
    for (std::size_t t = 0; t < longest.size(); ++t) longest[t] = longest_local_edge(mesh, static_cast<int>(t));
    return longest;
}

}  // namespace

// Rivara-style closure: the bisected-edge set grows until every triangle with
// a bisected side also has its longest side bisected.
Mesh longest_edge_refine(const Mesh &mesh, const std::vector<int> &marked, bool all_sides) {
    const int nt = static_cast<int>(mesh.num_triangles());
    const auto longest = longest_edges(mesh);
    std::vector<char> split(mesh.num_edges(), 0);
    std::deque<int> pending;
    auto mark_edge = [&](int e) {
        if (split[static_cast<std::size_t>(e)]) return;
        split[static_cast<std::size_t>(e)] = 1;
        for (int t : mesh.edge(e).tri)
            if (t >= 0) pending.push_back(t);
    };
    for (int t : marked) {
        if (t < 0 || t >= nt) throw MeshError("marked triangle index out of range");
        mark_edge(mesh.triangle_edge(t, longest[static_cast<std::size_t>(t)]));
        if (all_sides)
            for (int e : mesh.triangle_edges(t)) mark_edge(e);
    }
    while (!pending.empty()) {
        const int t = pending.front();
        pending.pop_front();
        mark_edge(mesh.triangle_edge(t, longest[static_cast<std::size_t>(t)]));
    }
    return bisect_edges(mesh, longest, split);
}

// Every side bisected: each triangle splits into four.
Mesh uniform_refine(const Mesh &mesh) {
    return bisect_edges(mesh, longest_edges(mesh), std::vector<char>(mesh.num_edges(), 1));
}

}  // namespace fluxrec
