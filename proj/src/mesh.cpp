#include "elast/mesh.hpp"

#include "elast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

namespace elast {

int Mesh::num_interior_facets() const {
    int n = 0;
    for (const auto& f : facets)
        if (!f.boundary) ++n;
    return n;
}

int Mesh::num_boundary_facets() const { return num_facets() - num_interior_facets(); }

double Mesh::tri_area(int t) const {
    const auto& tri = triangles[t];
    const Vec2 a = vertices[tri[0]], b = vertices[tri[1]], c = vertices[tri[2]];
    return 0.5 * cross(b - a, c - a);
}

Vec2 Mesh::tri_centroid(int t) const {
    const auto& tri = triangles[t];
    return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) * (1.0 / 3.0);
}

Mat2 Mesh::tri_jacobian(int t) const {
    const auto& tri = triangles[t];
    const Vec2 a = vertices[tri[0]], b = vertices[tri[1]], c = vertices[tri[2]];
    Mat2 j;
    j(0, 0) = b.x - a.x;
    j(0, 1) = c.x - a.x;
    j(1, 0) = b.y - a.y;
    j(1, 1) = c.y - a.y;
    return j;
}

Vec2 Mesh::map_to_physical(int t, Vec2 ref) const {
    const auto& tri = triangles[t];
    const Vec2 a = vertices[tri[0]], b = vertices[tri[1]], c = vertices[tri[2]];
    return a + (b - a) * ref.x + (c - a) * ref.y;
}

Vec2 Mesh::map_to_reference(int t, Vec2 phys) const {
    const Mat2 j = tri_jacobian(t);
    const Vec2 d = phys - vertices[triangles[t][0]];
    const double det = j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
    return {(j(1, 1) * d.x - j(0, 1) * d.y) / det, (-j(1, 0) * d.x + j(0, 0) * d.y) / det};
}

Vec2 Mesh::outward_normal(int t, int e) const {
    const auto& tri = triangles[t];
    const Vec2 p = vertices[tri[e]], q = vertices[tri[(e + 1) % 3]];
    Vec2 n = rot_cw(q - p);
    return n * (1.0 / norm(n));
}

double Mesh::min_edge_length() const {
    double m = std::numeric_limits<double>::max();
    for (const auto& f : facets) m = std::min(m, f.length);
    return m;
}

double Mesh::facet_param(int t, int e, double s_local) const {
    const auto& tri = triangles[t];
    const Facet& f = facets[tri_facets[t][e]];
    return tri[e] == f.a ? s_local : 1.0 - s_local;
}

Vec2 Mesh::edge_point(int t, int e, double s_local) const {
    const auto& tri = triangles[t];
    const Vec2 p = vertices[tri[e]], q = vertices[tri[(e + 1) % 3]];
    return p + (q - p) * s_local;
}

Mesh build_from(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles) {
    Mesh mesh;
    mesh.vertices = std::move(vertices);
    mesh.triangles = std::move(triangles);
    for (auto& tri : mesh.triangles) {
        const Vec2 a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
        if (cross(b - a, c - a) < 0.0) std::swap(tri[1], tri[2]);
        if (cross(mesh.vertices[tri[1]] - mesh.vertices[tri[0]],
                  mesh.vertices[tri[2]] - mesh.vertices[tri[0]]) <= 0.0)
            throw NonManifoldError("build_from: degenerate triangle");
    }

    std::map<std::pair<int, int>, int> facet_of;
    mesh.tri_facets.assign(mesh.triangles.size(), {-1, -1, -1});
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        for (int e = 0; e < 3; ++e) {
            const int va = mesh.triangles[t][e];
            const int vb = mesh.triangles[t][(e + 1) % 3];
            const auto key = std::minmax(va, vb);
            auto it = facet_of.find(key);
            if (it == facet_of.end()) {
                Facet f;
                f.a = key.first;
                f.b = key.second;
                f.tri[0] = t;
                f.local_edge[0] = e;
                const Vec2 d = mesh.vertices[f.b] - mesh.vertices[f.a];
                f.length = norm(d);
                f.normal = mesh.outward_normal(t, e);
                mesh.facets.push_back(f);
                it = facet_of.emplace(key, mesh.num_facets() - 1).first;
            } else {
                Facet& f = mesh.facets[it->second];
                if (f.tri[1] != -1)
                    throw NonManifoldError("build_from: facet shared by more than two triangles");
                f.tri[1] = t;
                f.local_edge[1] = e;
            }
            mesh.tri_facets[t][e] = it->second;
        }
    }
    for (auto& f : mesh.facets) f.boundary = (f.tri[1] == -1);
    return mesh;
}

Mesh build_uniform_unit_square(int level) {
    if (level < 0) throw ConfigError("build_uniform_unit_square: level must be >= 0");
    const int n = 1 << (level + 2);
    std::vector<Vec2> vertices;
    vertices.reserve(static_cast<size_t>(n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});

    auto vid = [n](int i, int j) { return j * (n + 1) + i; };
    std::vector<std::array<int, 3>> triangles;
    triangles.reserve(static_cast<size_t>(2) * n * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            // Diagonal from lower-left to upper-right.
            triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    }
    return build_from(std::move(vertices), std::move(triangles));
}

Mesh barycentric_refine(const Mesh& mesh) {
    std::vector<Vec2> vertices = mesh.vertices;
    std::vector<std::array<int, 3>> triangles;
    triangles.reserve(static_cast<size_t>(3) * mesh.triangles.size());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const int c = static_cast<int>(vertices.size());
        vertices.push_back(mesh.tri_centroid(t));
        const auto& tri = mesh.triangles[t];
        for (int e = 0; e < 3; ++e) triangles.push_back({tri[e], tri[(e + 1) % 3], c});
    }
    return build_from(std::move(vertices), std::move(triangles));
}

std::string dump_mesh(const Mesh& mesh) {
    std::ostringstream os;
    os.precision(17);
    os << "vertices " << mesh.num_vertices() << "\n";
    for (const auto& v : mesh.vertices) os << "v " << v.x << " " << v.y << "\n";
    os << "triangles " << mesh.num_triangles() << "\n";
    for (const auto& t : mesh.triangles) os << "t " << t[0] << " " << t[1] << " " << t[2] << "\n";
    return os.str();
}

} // namespace elast
