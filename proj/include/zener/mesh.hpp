// mesh.hpp
// Structured triangulations of an axis-aligned rectangle. An n x n grid of
// cells is split along the bottom-left to top-right diagonal, giving 2*n^2
// congruent triangles. Connectivity follows fixed conventions so that every
// derived quantity (edge orientation, boundary tags, subdomain labels) is
// reproducible:
//   * vertices are numbered lexicographically, index = j*(n+1)+i for grid
//     node (i,j),
//   * triangles are counterclockwise,
//   * a global edge is stored as (low vertex, high vertex) and its intrinsic
//     direction runs low -> high; the global unit normal is that direction
//     rotated by -90 degrees,
//   * local edge e of a triangle is the one opposite local vertex e; its
//     traversal direction (CCW) either agrees with the global direction
//     (sign +1) or opposes it (sign -1).

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "zener/types.hpp"

namespace zener {

enum class BoundaryTag : std::uint8_t { interior = 0, dirichlet = 1, neumann = 2 };

template<typename T>
struct Rect {
    T x0 = 0, y0 = 0, x1 = 1, y1 = 1;
};

// Maps a point to a subdomain label (1-based). Must be constant on every
// triangle of the mesh it is used with; this is validated after building.
template<typename T>
using SubdomainRule = std::function<int(const Vec2<T>&)>;

// Maps the midpoint of a boundary edge to its tag. The default marks the
// whole boundary as the essential (displacement) part.
template<typename T>
using BoundaryRule = std::function<BoundaryTag(const Vec2<T>&)>;

template<typename T>
struct Mesh {
    int n = 0;
    Rect<T> rect;
    int num_subdomains = 1;

    std::vector<Vec2<T>> vertices;
    std::vector<std::array<int, 3>> triangles;      // CCW vertex ids
    std::vector<std::array<int, 2>> edges;          // (low, high) vertex ids
    std::vector<std::array<int, 3>> tri_edges;      // edge id opposite local vertex e
    std::vector<std::array<int, 3>> tri_edge_signs; // +1 CCW traversal == low->high
    std::vector<BoundaryTag> edge_tag;              // per edge
    std::vector<int> subdomain;                     // per triangle, 1-based

    // kept so refine() can rebuild with the same rules
    SubdomainRule<T> subdomain_rule;
    BoundaryRule<T> boundary_rule;

    int num_vertices() const { return int(vertices.size()); }
    int num_edges() const { return int(edges.size()); }
    int num_triangles() const { return int(triangles.size()); }

    // longest edge in the mesh (the cell diagonal for a uniform grid)
    T mesh_size() const {
        T h = 0;
        for (const auto& e : edges)
            h = std::max(h, (vertices[e[1]] - vertices[e[0]]).norm());
        return h;
    }
};

// Affine geometry of one triangle: F(xhat) = p0 + J*xhat.
template<typename T>
struct TriangleGeometry {
    Vec2<T> p0;
    Mat2<T> J;
    Mat2<T> Jinv;
    T detJ;                          // positive for CCW triangles
    std::array<Vec2<T>, 3> normal;   // outward unit normal of local edge e
    std::array<T, 3> edge_len;
    std::array<Vec2<T>, 3> edge_a;   // traversal start of local edge e
    std::array<Vec2<T>, 3> edge_b;   // traversal end
};

template<typename T>
TriangleGeometry<T> geometry(const Mesh<T>& mesh, int t)
{
    const auto& tri = mesh.triangles[t];
    const Vec2<T>& a = mesh.vertices[tri[0]];
    const Vec2<T>& b = mesh.vertices[tri[1]];
    const Vec2<T>& c = mesh.vertices[tri[2]];

    TriangleGeometry<T> g;
    g.p0 = a;
    g.J.col(0) = b - a;
    g.J.col(1) = c - a;
    g.detJ = g.J(0, 0) * g.J(1, 1) - g.J(0, 1) * g.J(1, 0);
    if (!(g.detJ > T(0)))
        throw std::runtime_error("geometry: triangle is degenerate or not CCW");
    g.Jinv = g.J.inverse();

    const std::array<const Vec2<T>*, 3> p{ &a, &b, &c };
    for (int e = 0; e < 3; ++e) {
        const Vec2<T>& pa = *p[(e + 1) % 3];
        const Vec2<T>& pb = *p[(e + 2) % 3];
        g.edge_a[e] = pa;
        g.edge_b[e] = pb;
        const Vec2<T> tang = pb - pa;
        g.edge_len[e] = tang.norm();
        // CCW traversal, so rotating the tangent by -90 degrees points outward
        g.normal[e] = Vec2<T>(tang[1], -tang[0]) / g.edge_len[e];
    }
    return g;
}

namespace detail {

template<typename T>
int subdomain_label_checked(const SubdomainRule<T>& rule, const Vec2<T>& a,
                            const Vec2<T>& b, const Vec2<T>& c)
{
    const Vec2<T> centroid = (a + b + c) / T(3);
    const int label = rule(centroid);
    if (label < 1)
        throw std::invalid_argument("build_uniform: subdomain labels must be >= 1");
    // sample strictly interior points; the rule must not cut through a triangle
    for (const Vec2<T>* v : { &a, &b, &c }) {
        const Vec2<T> q = (centroid + *v) / T(2);
        if (rule(q) != label)
            throw std::invalid_argument(
                "build_uniform: subdomain rule is not constant on a triangle");
    }
    return label;
}

} // namespace detail

template<typename T>
Mesh<T> build_uniform(int n, const Rect<T>& rect = {},
                      SubdomainRule<T> subdomain_rule = {},
                      BoundaryRule<T> boundary_rule = {})
{
    if (n < 1)
        throw std::invalid_argument("build_uniform: n must be >= 1");
    if (!(rect.x1 > rect.x0) || !(rect.y1 > rect.y0))
        throw std::invalid_argument("build_uniform: empty rectangle");

    Mesh<T> mesh;
    mesh.n = n;
    mesh.rect = rect;
    mesh.subdomain_rule = subdomain_rule;
    mesh.boundary_rule = boundary_rule;

    const T hx = (rect.x1 - rect.x0) / T(n);
    const T hy = (rect.y1 - rect.y0) / T(n);

    mesh.vertices.reserve((n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            mesh.vertices.emplace_back(rect.x0 + T(i) * hx, rect.y0 + T(j) * hy);

    const auto vid = [n](int i, int j) { return j * (n + 1) + i; };

    mesh.triangles.reserve(2 * n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const int a = vid(i, j), b = vid(i + 1, j);
            const int c = vid(i + 1, j + 1), d = vid(i, j + 1);
            mesh.triangles.push_back({ a, b, c }); // below the a-c diagonal
            mesh.triangles.push_back({ a, c, d }); // above it
        }

    // deduplicate edges; (low, high) keys give the intrinsic direction
    std::map<std::array<int, 2>, int> edge_id;
    std::vector<int> edge_use(0);
    mesh.tri_edges.resize(mesh.triangles.size());
    mesh.tri_edge_signs.resize(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int e = 0; e < 3; ++e) {
            const int va = tri[(e + 1) % 3];
            const int vb = tri[(e + 2) % 3];
            const std::array<int, 2> key{ std::min(va, vb), std::max(va, vb) };
            auto [it, inserted] = edge_id.try_emplace(key, int(mesh.edges.size()));
            if (inserted) {
                mesh.edges.push_back(key);
                edge_use.push_back(0);
            }
            mesh.tri_edges[t][e] = it->second;
            mesh.tri_edge_signs[t][e] = (va < vb) ? 1 : -1;
            ++edge_use[it->second];
        }
    }

    // boundary = edges used by exactly one triangle
    mesh.edge_tag.assign(mesh.edges.size(), BoundaryTag::interior);
    for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
        if (edge_use[e] != 1)
            continue;
        if (boundary_rule) {
            const Vec2<T> mid =
                (mesh.vertices[mesh.edges[e][0]] + mesh.vertices[mesh.edges[e][1]]) / T(2);
            mesh.edge_tag[e] = boundary_rule(mid);
            if (mesh.edge_tag[e] == BoundaryTag::interior)
                throw std::invalid_argument(
                    "build_uniform: boundary rule returned interior for a boundary edge");
        } else {
            mesh.edge_tag[e] = BoundaryTag::dirichlet;
        }
    }

    mesh.subdomain.resize(mesh.triangles.size(), 1);
    if (subdomain_rule) {
        int max_label = 1;
        for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
            const auto& tri = mesh.triangles[t];
            mesh.subdomain[t] = detail::subdomain_label_checked<T>(
                subdomain_rule, mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                mesh.vertices[tri[2]]);
            max_label = std::max(max_label, mesh.subdomain[t]);
        }
        mesh.num_subdomains = max_label;
    }
    return mesh;
}

// Uniform refinement; with the fixed diagonal convention the refined mesh is
// nested in the coarse one.
template<typename T>
Mesh<T> refine(const Mesh<T>& mesh)
{
    return build_uniform<T>(2 * mesh.n, mesh.rect, mesh.subdomain_rule,
                            mesh.boundary_rule);
}

// Plain text dump: counts first, then vertices, edges (with tag) and
// triangles (with subdomain).
template<typename T>
void dump_text(const Mesh<T>& mesh, std::ostream& os)
{
    os << mesh.num_vertices() << " " << mesh.num_edges() << " "
       << mesh.num_triangles() << "\n";
    for (const auto& v : mesh.vertices)
        os << v[0] << " " << v[1] << "\n";
    for (std::size_t e = 0; e < mesh.edges.size(); ++e)
        os << mesh.edges[e][0] << " " << mesh.edges[e][1] << " "
           << int(mesh.edge_tag[e]) << "\n";
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        os << mesh.triangles[t][0] << " " << mesh.triangles[t][1] << " "
           << mesh.triangles[t][2] << " " << mesh.subdomain[t] << "\n";
}

} // namespace zener
