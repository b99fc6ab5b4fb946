#include "elast/dense.hpp"
#include "elast/errors.hpp"
#include "elast/projections.hpp"
#include "elast/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace elast;

namespace {

std::vector<double> random_coeffs(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> c(n);
    for (double& v : c) v = dist(rng);
    return c;
}

// Evaluates a facet-projection coefficient vector as a function of s.
double eval_facet_poly(const std::vector<double>& c, double s) {
    std::vector<double> leg(c.size());
    edge_legendre_all(static_cast<int>(c.size()), s, leg);
    double v = 0.0;
    for (size_t j = 0; j < c.size(); ++j) v += c[j] * leg[j];
    return v;
}

} // namespace

TEST_CASE("facet tangential projection: idempotent on members, exact on constants") {
    const Mesh m = build_uniform_unit_square(0);
    const int k = 2;
    const int f = 20;
    const Facet& facet = m.facets[f];
    const Vec2 tangent = (m.vertices[facet.b] - m.vertices[facet.a]) * (1.0 / facet.length);

    // Tangential-constant data is reproduced.
    auto g = [&](Vec2) { return tangent * 3.25; };
    const auto c = project_facet_tangential(m, f, k, g);
    CHECK(c[0] == doctest::Approx(3.25).epsilon(1e-13));
    for (int j = 1; j < k; ++j) CHECK(std::fabs(c[j]) < 1e-13);

    // Projection of something already in M_k(F) returns it unchanged.
    auto member = [&](Vec2 p) {
        const double s = dot(p - m.vertices[facet.a], tangent) / facet.length;
        return tangent * (0.5 * edge_legendre(0, s) - 1.25 * edge_legendre(1, s));
    };
    const auto cm = project_facet_tangential(m, f, k, member);
    CHECK(cm[0] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(cm[1] == doctest::Approx(-1.25).epsilon(1e-13));
}

TEST_CASE("facet projection of s^k matches the dense least-squares oracle") {
    const Mesh m = build_uniform_unit_square(0);
    const int k = 2; // project s^2 onto degree-1 polynomials
    const int f = 13;
    const Facet& facet = m.facets[f];
    const Vec2 pa = m.vertices[facet.a];
    const Vec2 tangent = (m.vertices[facet.b] - pa) * (1.0 / facet.length);
    auto w = [&](Vec2 p) {
        const double s = dot(p - pa, tangent) / facet.length;
        return std::pow(s, k);
    };
    const auto c = project_facet_scalar(m, f, k, w);

    // Oracle: dense normal equations on a fine point grid in s.
    const int npts = 2000;
    DMat a(npts, k);
    std::vector<double> rhs(npts);
    for (int i = 0; i < npts; ++i) {
        const double s = (i + 0.5) / npts;
        std::vector<double> leg(k);
        edge_legendre_all(k, s, leg);
        for (int j = 0; j < k; ++j) a(i, j) = leg[j];
        rhs[i] = std::pow(s, k);
    }
    const auto oracle = least_squares(a, rhs);
    for (int j = 0; j < k; ++j) CHECK(c[j] == doctest::Approx(oracle[j]).epsilon(1e-5));
    // And the residual is orthogonal to the basis (projection property).
    for (int j = 0; j < k; ++j) {
        const EdgeRule& rule = edge_rule(10);
        double mom = 0.0;
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const double s = rule.points[q];
            mom += rule.weights[q] * (std::pow(s, k) - eval_facet_poly(c, s)) * edge_legendre(j, s);
        }
        CHECK(std::fabs(mom) < 1e-13);
    }
}

TEST_CASE("broken projection: polynomials reproduced, x^k matches the Gram oracle") {
    const Mesh m = build_from({{0, 0}, {1, 0}, {0, 1}}, {{{0, 1, 2}}});
    const int kq = 1; // broken P^1
    const SpaceDescriptor q = build_broken_scalar(m, kq);

    const FieldFunction cproj = project_broken(q, [](Vec2) { return 4.5; });
    CHECK(cproj.scalar_value(0, {0.3, 0.3}) == doctest::Approx(4.5).epsilon(1e-13));
    const FieldFunction lproj = project_broken(q, [](Vec2 p) { return 1.0 + 2.0 * p.x - p.y; });
    CHECK(lproj.scalar_value(0, {0.2, 0.5}) ==
          doctest::Approx(1.0 + 2.0 * 0.2 - 0.5).epsilon(1e-12));

    // w = x^2 projected onto P^1: dense Gram oracle over the monomials {1,x,y}.
    const FieldFunction w2 = project_broken(q, [](Vec2 p) { return p.x * p.x; });
    DMat gram(3, 3);
    std::vector<double> rhs(3);
    const int e[3][2] = {{0, 0}, {1, 0}, {0, 1}};
    for (int i = 0; i < 3; ++i) {
        rhs[i] = triangle_monomial_integral(e[i][0] + 2, e[i][1]);
        for (int j = 0; j < 3; ++j)
            gram(i, j) = triangle_monomial_integral(e[i][0] + e[j][0], e[i][1] + e[j][1]);
    }
    const auto mono = lu_solve(gram, rhs);
    for (Vec2 p : {Vec2{0.25, 0.25}, Vec2{0.1, 0.7}}) {
        const double oracle = mono[0] + mono[1] * p.x + mono[2] * p.y;
        CHECK(w2.scalar_value(0, p) == doctest::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("rigid motion projection") {
    const Mesh m = build_uniform_unit_square(0);
    const int t = 9;

    // RM members are reproduced exactly.
    const RigidMotion rm{{0.7, -0.3}, 1.4};
    auto grad_rm = [&](Vec2) {
        Mat2 g;
        g(0, 1) = -rm.b;
        g(1, 0) = rm.b;
        return g;
    };
    const RigidMotion p = project_rigid_motion(m, t, [&](Vec2 x) { return rm(x); }, grad_rm);
    CHECK(p.a.x == doctest::Approx(rm.a.x).epsilon(1e-13));
    CHECK(p.a.y == doctest::Approx(rm.a.y).epsilon(1e-13));
    CHECK(p.b == doctest::Approx(rm.b).epsilon(1e-13));

    // v = (x, y): curl-free, so the projection is the mean value; verify the
    // two moment conditions against a dense 3x3 solve.
    auto v = [](Vec2 x) { return x; };
    auto grad_v = [](Vec2) {
        Mat2 g;
        g(0, 0) = g(1, 1) = 1.0;
        return g;
    };
    const RigidMotion pv = project_rigid_motion(m, t, v, grad_v);
    CHECK(std::fabs(pv.b) < 1e-13);
    // Oracle: mean-value and mean-curl matching as a 3x3 system.
    const TriangleRule& rule = triangle_rule(6);
    const double area2 = 2.0 * m.tri_area(t);
    double area = 0.0;
    Vec2 mean{0, 0}, rot{0, 0};
    for (size_t q = 0; q < rule.points.size(); ++q) {
        const Vec2 x = m.map_to_physical(t, rule.points[q]);
        const double w = rule.weights[q] * area2;
        area += w;
        mean += w * v(x);
        rot += w * Vec2{-x.y, x.x};
    }
    DMat sys(3, 3);
    sys(0, 0) = area;
    sys(0, 2) = rot.x;
    sys(1, 1) = area;
    sys(1, 2) = rot.y;
    sys(2, 2) = 2.0 * area; // mean curl of b(-y,x) = 2b
    const auto sol = lu_solve(sys, std::vector<double>{mean.x, mean.y, 0.0});
    CHECK(pv.a.x == doctest::Approx(sol[0]).epsilon(1e-12));
    CHECK(pv.a.y == doctest::Approx(sol[1]).epsilon(1e-12));

    // Tangential trace of the projection is constant per edge, in M_k(F).
    for (int e = 0; e < 3; ++e) {
        const int f = m.tri_facets[t][e];
        const auto c = project_facet_tangential(m, f, 1, [&](Vec2 x) { return pv(x); });
        const Facet& facet = m.facets[f];
        const Vec2 tangent = (m.vertices[facet.b] - m.vertices[facet.a]) * (1.0 / facet.length);
        for (double s : {0.1, 0.6}) {
            const Vec2 x = m.vertices[facet.a] + (m.vertices[facet.b] - m.vertices[facet.a]) * s;
            const double residual = dot(pv(x), tangent) - eval_facet_poly(c, s);
            CHECK(std::fabs(residual) < 1e-13);
        }
    }
}

TEST_CASE("BDM interpolation: projection property and commuting diagram") {
    const Mesh m = build_uniform_unit_square(0);
    const int k = 2;
    const SpaceDescriptor bdm = build_bdm(m, k, false);

    // Members are reproduced.
    FieldFunction u{&bdm, random_coeffs(bdm.ndof, 8u)};
    const FieldFunction pu = interpolate_bdm(bdm, u);
    for (int i = 0; i < bdm.ndof; ++i) CHECK(std::fabs(pu.coeffs[i] - u.coeffs[i]) < 1e-12);

    // Commuting diagram for v = (x^2 y, -x y^2): both sides by quadrature.
    auto v = [](Vec2 p) { return Vec2{p.x * p.x * p.y, -p.x * p.y * p.y}; };
    const FieldFunction pv = interpolate_bdm(bdm, v);
    const SpaceDescriptor qspace = build_broken_scalar(m, k - 1);
    const FieldFunction qdiv = project_broken(qspace, [](Vec2) { return 0.0; }); // div v = 0
    const TriangleRule& rule = triangle_rule(10);
    const TriangleBasis& qb = TriangleBasis::get(k - 1);
    std::vector<double> qv(qb.dim());
    for (int t = 0; t < m.num_triangles(); ++t) {
        const ElementField pvt(pv, t);
        const double area2 = 2.0 * m.tri_area(t);
        std::vector<double> moments(qb.dim(), 0.0);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            qb.values(rule.points[q], qv);
            const double d = pvt.divergence(rule.points[q]) -
                             qdiv.scalar_value(t, rule.points[q]);
            for (int i = 0; i < qb.dim(); ++i)
                moments[i] += rule.weights[q] * area2 * d * qv[i];
        }
        for (int i = 0; i < qb.dim(); ++i) CHECK(std::fabs(moments[i]) < 1e-11);
    }

    // Exactness on the divergence-free trig field: div(Pi_V u) has vanishing
    // P^{k-1} moments, elementwise.
    auto trig = [](Vec2 p) {
        return Vec2{std::sin(M_PI * p.x) * std::sin(M_PI * p.y),
                    std::cos(M_PI * p.x) * std::cos(M_PI * p.y)};
    };
    const FieldFunction pt = interpolate_bdm(bdm, trig);
    for (int t = 0; t < m.num_triangles(); t += 5) {
        const ElementField ptf(pt, t);
        const double area2 = 2.0 * m.tri_area(t);
        std::vector<double> moments(qb.dim(), 0.0);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            qb.values(rule.points[q], qv);
            for (int i = 0; i < qb.dim(); ++i)
                moments[i] += rule.weights[q] * area2 * ptf.divergence(rule.points[q]) * qv[i];
        }
        for (int i = 0; i < qb.dim(); ++i) CHECK(std::fabs(moments[i]) < 1e-11);
    }

    // Constants are in the interpolation kernel of (id - Pi_V).
    auto constant = [](Vec2) { return Vec2{0.8, -0.35}; };
    const FieldFunction pc = interpolate_bdm(bdm, constant);
    for (int t = 0; t < m.num_triangles(); t += 7)
        for (Vec2 ref : {Vec2{0.3, 0.3}, Vec2{0.1, 0.8}}) {
            const Vec2 val = pc.value(t, ref);
            CHECK(std::fabs(val.x - 0.8) < 1e-12);
            CHECK(std::fabs(val.y + 0.35) < 1e-12);
        }
}

TEST_CASE("reconstruction: averaging equals interpolation, divergence preserved") {
    const Mesh m = build_uniform_unit_square(0);
    const int k = 2;
    const SpaceDescriptor bdm = build_bdm(m, k, false);
    const SpaceDescriptor rel = build_bdm_relaxed(m, k, false);

    FieldFunction v{&rel, random_coeffs(rel.ndof, 55u)};
    const FieldFunction rec = reconstruct_relaxed(bdm, v);

    // Both routes agree: cheap averaging vs full BDM interpolation.
    const FieldFunction itp = interpolate_bdm(bdm, v);
    for (int i = 0; i < bdm.ndof; ++i) CHECK(std::fabs(rec.coeffs[i] - itp.coeffs[i]) < 1e-12);

    // Already normal-continuous members are fixed points: inject a BDM member
    // into the relaxed space (both top copies take the shared value).
    {
        const FieldFunction c{&bdm, random_coeffs(bdm.ndof, 12u)};
        FieldFunction w{&rel, std::vector<double>(rel.ndof, 0.0)};
        for (const auto& tr : reconstruction_matrix(bdm, rel)) w.coeffs[tr.col] = c.coeffs[tr.row];
        const FieldFunction back = reconstruct_relaxed(bdm, w);
        for (int i = 0; i < bdm.ndof; ++i) CHECK(std::fabs(back.coeffs[i] - c.coeffs[i]) < 1e-12);
    }

    // Elementwise divergence moments agree before/after reconstruction.
    const TriangleRule& rule = triangle_rule(10);
    const TriangleBasis& qb = TriangleBasis::get(k - 1);
    std::vector<double> qv(qb.dim());
    for (int t = 0; t < m.num_triangles(); ++t) {
        const ElementField vt(v, t);
        const ElementField rt(rec, t);
        const double area2 = 2.0 * m.tri_area(t);
        std::vector<double> moments(qb.dim(), 0.0);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            qb.values(rule.points[q], qv);
            const double d = vt.divergence(rule.points[q]) - rt.divergence(rule.points[q]);
            for (int i = 0; i < qb.dim(); ++i)
                moments[i] += rule.weights[q] * area2 * d * qv[i];
        }
        for (int i = 0; i < qb.dim(); ++i) CHECK(std::fabs(moments[i]) < 1e-12);
    }

    // Wrong-space arguments are rejected.
    FieldFunction wrong{&bdm, std::vector<double>(bdm.ndof, 0.0)};
    CHECK_THROWS_AS(reconstruct_relaxed(bdm, wrong), WrongSpaceError);
}

TEST_CASE("projections are idempotent") {
    const Mesh m = build_uniform_unit_square(0);
    const int k = 2;
    const SpaceDescriptor q = build_broken_scalar(m, k - 1);
    const FieldFunction p1 = project_broken(q, [](Vec2 p) { return std::sin(3.0 * p.x) + p.y; });
    // Apply again through an exact evaluator of p1.
    const FieldFunction p2 = project_broken(
        q, [&](Vec2 x) {
            for (int t = 0; t < m.num_triangles(); ++t) {
                const Vec2 ref = m.map_to_reference(t, x);
                if (ref.x >= -1e-12 && ref.y >= -1e-12 && ref.x + ref.y <= 1.0 + 1e-12)
                    return p1.scalar_value(t, ref);
            }
            return 0.0;
        });
    for (int i = 0; i < q.ndof; ++i) CHECK(std::fabs(p1.coeffs[i] - p2.coeffs[i]) < 1e-12);
}

TEST_CASE("div(BDM_k) covers the broken P^{k-1} space (least squares residual)") {
    const Mesh m = build_uniform_unit_square(0);
    const int k = 2;
    const SpaceDescriptor bdm = build_bdm(m, k, false);
    const SpaceDescriptor qsp = build_broken_scalar(m, k - 1);

    // D[i][j] = (div phi_j, q_i) over the orthonormal broken basis.
    const TriangleRule& rule = triangle_rule(2 * k);
    const TriangleBasis& qb = TriangleBasis::get(k - 1);
    DMat d(qsp.ndof, bdm.ndof);
    std::vector<double> qv(qb.dim());
    for (int t = 0; t < m.num_triangles(); ++t) {
        const BdmElementBasis basis(m, t, k);
        const double area2 = 2.0 * m.tri_area(t);
        const double scale = 1.0 / std::sqrt(area2);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            qb.values(rule.points[q], qv);
            for (int j = 0; j < basis.dim(); ++j) {
                const double dv = basis.divergence(j, rule.points[q]);
                for (int i = 0; i < qb.dim(); ++i)
                    d(qsp.element_dof(t, i), bdm.element_dof(t, j)) +=
                        rule.weights[q] * area2 * dv * qv[i] * scale;
            }
        }
    }
    // For every broken basis function, a BDM preimage exists: LS residual ~ 0.
    std::mt19937 rng(17u);
    std::uniform_int_distribution<int> pick(0, qsp.ndof - 1);
    for (int trial = 0; trial < 8; ++trial) {
        std::vector<double> rhs(qsp.ndof, 0.0);
        rhs[pick(rng)] = 1.0;
        const auto x = least_squares(d, rhs);
        const auto dx = d * x;
        double res = 0.0;
        for (int i = 0; i < qsp.ndof; ++i) res += (dx[i] - rhs[i]) * (dx[i] - rhs[i]);
        CHECK(std::sqrt(res) < 1e-10);
    }
}
