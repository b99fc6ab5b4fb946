#include "elast/errors.hpp"
#include "elast/mesh.hpp"

#include <doctest.h>

#include <cmath>

using namespace elast;

TEST_CASE("uniform level-0 mesh counts and Euler relation") {
    const Mesh m = build_uniform_unit_square(0);
    CHECK(m.num_vertices() == 25);
    CHECK(m.num_triangles() == 32);
    CHECK(m.num_facets() == 56);
    CHECK(m.num_vertices() - m.num_facets() + m.num_triangles() == 1);
    CHECK(m.num_boundary_facets() == 16);
}

TEST_CASE("uniform meshes: smallest edge, area partition, orientation") {
    for (int level = 0; level <= 2; ++level) {
        const Mesh m = build_uniform_unit_square(level);
        CHECK(m.min_edge_length() == doctest::Approx(std::pow(2.0, -(level + 2))).epsilon(1e-14));
        double area = 0.0;
        for (int t = 0; t < m.num_triangles(); ++t) {
            CHECK(m.tri_area(t) > 0.0);
            area += m.tri_area(t);
        }
        CHECK(std::fabs(area - 1.0) < 1e-13);
        CHECK(m.num_vertices() - m.num_facets() + m.num_triangles() == 1);
    }
}

TEST_CASE("facet normals: outward for first triangle, opposite across sides") {
    const Mesh m = build_uniform_unit_square(0);
    for (int f = 0; f < m.num_facets(); ++f) {
        const Facet& facet = m.facets[f];
        const Vec2 n0 = m.outward_normal(facet.tri[0], facet.local_edge[0]);
        CHECK(std::fabs(n0.x - facet.normal.x) < 1e-14);
        CHECK(std::fabs(n0.y - facet.normal.y) < 1e-14);
        if (!facet.boundary) {
            const Vec2 n1 = m.outward_normal(facet.tri[1], facet.local_edge[1]);
            CHECK(norm(n0 + n1) < 1e-14);
            // Normal of the first side points at the second side's barycenter.
            const Vec2 mid = (m.vertices[facet.a] + m.vertices[facet.b]) * 0.5;
            CHECK(dot(facet.normal, m.tri_centroid(facet.tri[1]) - mid) > 0.0);
        }
    }
}

TEST_CASE("two-triangle square: 5 facets, 1 interior") {
    const Mesh m = build_from({{0, 0}, {1, 0}, {1, 1}, {0, 1}},
                              {{{0, 1, 2}}, {{0, 2, 3}}});
    CHECK(m.num_facets() == 5);
    CHECK(m.num_interior_facets() == 1);
}

TEST_CASE("barycentric refinement: counts, equal child areas, Euler") {
    const Mesh base = build_uniform_unit_square(0);
    const Mesh m = barycentric_refine(base);
    CHECK(m.num_triangles() == 96);
    CHECK(m.num_vertices() == 57);
    CHECK(m.num_vertices() - m.num_facets() + m.num_triangles() == 1);
    double area = 0.0;
    for (int t = 0; t < m.num_triangles(); ++t) area += m.tri_area(t);
    CHECK(std::fabs(area - 1.0) < 1e-13);

    const Mesh one = build_from({{0, 0}, {1, 0}, {0, 1}}, {{{0, 1, 2}}});
    const Mesh ref = barycentric_refine(one);
    REQUIRE(ref.num_triangles() == 3);
    for (int t = 0; t < 3; ++t) CHECK(ref.tri_area(t) == doctest::Approx(0.5 / 3.0).epsilon(1e-13));
}

TEST_CASE("non-manifold triangle set is rejected") {
    CHECK_THROWS_AS(build_from({{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, -1}},
                               {{{0, 1, 2}}, {{0, 1, 3}}, {{0, 1, 4}}}),
                    NonManifoldError);
}

TEST_CASE("reference mapping round trip and facet parametrization") {
    const Mesh m = build_uniform_unit_square(1);
    for (int t = 0; t < m.num_triangles(); t += 7) {
        const Vec2 ref{0.21, 0.37};
        const Vec2 back = m.map_to_reference(t, m.map_to_physical(t, ref));
        CHECK(norm(back - ref) < 1e-13);
        for (int e = 0; e < 3; ++e) {
            // Local edge point and global facet parameter address the same point.
            const double s_local = 0.3;
            const Vec2 x = m.edge_point(t, e, s_local);
            const Facet& f = m.facets[m.tri_facets[t][e]];
            const double s = m.facet_param(t, e, s_local);
            const Vec2 x2 = m.vertices[f.a] + (m.vertices[f.b] - m.vertices[f.a]) * s;
            CHECK(norm(x - x2) < 1e-14);
        }
    }
}

TEST_CASE("mesh dump starts with the vertex count") {
    const Mesh m = build_uniform_unit_square(0);
    const std::string text = dump_mesh(m);
    CHECK(text.rfind("vertices 25", 0) == 0);
}
