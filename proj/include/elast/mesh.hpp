#pragma once

#include "elast/vec2.hpp"

#include <array>
#include <string>
#include <vector>

namespace elast {

// A facet (edge) of the triangulation. Vertex ids satisfy a < b so that the
// parametrization x(s) = P_a + s (P_b - P_a), s in [0,1], and the tangent are
// globally unique. The stored normal is the outward normal of tri[0].
struct Facet {
    int a = -1;
    int b = -1;
    std::array<int, 2> tri = {-1, -1};
    std::array<int, 2> local_edge = {-1, -1};
    Vec2 normal;
    double length = 0.0;
    bool boundary = false;
};

// Immutable simplicial triangulation of a planar domain with facet topology.
// Triangles are counterclockwise; local edge e of triangle (v0,v1,v2) runs
// from v_e to v_{(e+1)%3}.
struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<Facet> facets;
    std::vector<std::array<int, 3>> tri_facets; // facet id per local edge

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }
    int num_facets() const { return static_cast<int>(facets.size()); }
    int num_interior_facets() const;
    int num_boundary_facets() const;

    double tri_area(int t) const;
    Vec2 tri_centroid(int t) const;
    // Affine map F(ref) = v0 + J ref with J = [v1-v0 | v2-v0].
    Mat2 tri_jacobian(int t) const;
    Vec2 map_to_physical(int t, Vec2 ref) const;
    Vec2 map_to_reference(int t, Vec2 phys) const;
    // Outward unit normal of triangle t on its local edge e.
    Vec2 outward_normal(int t, int e) const;
    double min_edge_length() const;

    // Local parameter s on [0,1] along local edge e of t (t's own vertex
    // order), mapped to the global facet parameter of tri_facets[t][e].
    double facet_param(int t, int e, double s_local) const;
    Vec2 edge_point(int t, int e, double s_local) const;
};

// Build facet topology for the given triangles (deduplicate by sorted vertex
// pair). Triangles are re-oriented counterclockwise if needed. Throws
// NonManifoldError when a facet has more than two adjacent triangles.
Mesh build_from(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles);

// n x n grid of squares with n = 2^(level+2), each square split by the
// diagonal from its lower-left to its upper-right corner.
Mesh build_uniform_unit_square(int level);

// Split every triangle into three by its barycenter; existing facets persist.
Mesh barycentric_refine(const Mesh& mesh);

// Plain-text dump (vertex lines then triangle lines); debugging aid.
std::string dump_mesh(const Mesh& mesh);

} // namespace elast
