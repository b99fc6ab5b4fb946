#include "elast/projections.hpp"

#include "elast/errors.hpp"
#include "elast/quadrature.hpp"

#include <cmath>

namespace elast {

std::vector<double> project_facet_tangential(const Mesh& mesh, int f, int k,
                                             const VectorField& w, int quad_degree) {
    const Facet& facet = mesh.facets[f];
    const Vec2 pa = mesh.vertices[facet.a], pb = mesh.vertices[facet.b];
    const Vec2 tangent = (pb - pa) * (1.0 / facet.length);
    const EdgeRule& rule = edge_rule(quad_degree);
    std::vector<double> c(k, 0.0), leg(k);
    for (size_t q = 0; q < rule.points.size(); ++q) {
        const double s = rule.points[q];
        const Vec2 x = pa + (pb - pa) * s;
        edge_legendre_all(k, s, leg);
        const double wt = dot(w(x), tangent) * rule.weights[q];
        for (int j = 0; j < k; ++j) c[j] += wt * leg[j];
    }
    return c;
}

std::vector<double> project_facet_scalar(const Mesh& mesh, int f, int k,
                                         const ScalarField& w, int quad_degree) {
    const Facet& facet = mesh.facets[f];
    const Vec2 pa = mesh.vertices[facet.a], pb = mesh.vertices[facet.b];
    const EdgeRule& rule = edge_rule(quad_degree);
    std::vector<double> c(k, 0.0), leg(k);
    for (size_t q = 0; q < rule.points.size(); ++q) {
        const double s = rule.points[q];
        const Vec2 x = pa + (pb - pa) * s;
        edge_legendre_all(k, s, leg);
        const double wv = w(x) * rule.weights[q];
        for (int j = 0; j < k; ++j) c[j] += wv * leg[j];
    }
    return c;
}

FieldFunction project_broken(const SpaceDescriptor& broken_space, const ScalarField& w,
                             int quad_degree) {
    if (broken_space.kind != SpaceKind::BrokenScalar)
        throw WrongSpaceError("project_broken: expects a broken scalar space");
    const Mesh& mesh = *broken_space.mesh;
    const auto& tb = TriangleBasis::get(broken_space.degree);
    const TriangleRule& rule = triangle_rule(quad_degree);
    FieldFunction out{&broken_space, std::vector<double>(broken_space.ndof, 0.0)};
    std::vector<double> phi(tb.dim());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        // The per-element basis phi_i / sqrt(2|T|) is orthonormal in L2(T), so
        // projection coefficients are plain moments.
        const double area2 = 2.0 * mesh.tri_area(t);
        const double scale = 1.0 / std::sqrt(area2);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const Vec2 ref = rule.points[q];
            tb.values(ref, phi);
            const double wv = w(mesh.map_to_physical(t, ref)) * rule.weights[q] * area2 * scale;
            for (int i = 0; i < tb.dim(); ++i)
                out.coeffs[broken_space.element_dof(t, i)] += wv * phi[i];
        }
    }
    return out;
}

RigidMotion project_rigid_motion(const Mesh& mesh, int t, const VectorField& v,
                                 const std::function<Mat2(Vec2)>& grad_v, int quad_degree) {
    const TriangleRule& rule = triangle_rule(quad_degree);
    const double area2 = 2.0 * mesh.tri_area(t);
    Vec2 mean{0.0, 0.0};
    double mean_curl = 0.0;
    Vec2 moment_rot{0.0, 0.0}; // integral of (-y, x)
    double area = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
        const Vec2 ref = rule.points[q];
        const Vec2 x = mesh.map_to_physical(t, ref);
        const double w = rule.weights[q] * area2;
        mean += w * v(x);
        mean_curl += w * curl2d(grad_v(x));
        moment_rot += w * Vec2{-x.y, x.x};
        area += w;
    }
    // Conditions: int (v - a - b(-y,x)) = 0 and int curl(v - a - b(-y,x)) = 0,
    // with curl(b(-y,x)) = 2b.
    RigidMotion rm;
    rm.b = mean_curl / (2.0 * area);
    rm.a = (mean - rm.b * moment_rot) * (1.0 / area);
    return rm;
}

namespace {

// Shared assembly of BDM dof values; `trace` supplies the (averaged) normal
// trace moments, `interior` the element moments.
template <typename NormalTrace, typename ElementValue>
FieldFunction bdm_dofs_from(const SpaceDescriptor& sp, NormalTrace&& normal_at,
                            ElementValue&& value_in, int quad_degree) {
    const Mesh& mesh = *sp.mesh;
    const int k = sp.degree;
    FieldFunction out{&sp, std::vector<double>(sp.ndof, 0.0)};

    const EdgeRule& erule = edge_rule(quad_degree);
    std::vector<double> leg(k + 1);
    for (int f = 0; f < mesh.num_facets(); ++f) {
        const Facet& facet = mesh.facets[f];
        const Vec2 pa = mesh.vertices[facet.a], pb = mesh.vertices[facet.b];
        std::vector<double> mom(k + 1, 0.0);
        for (size_t q = 0; q < erule.points.size(); ++q) {
            const double s = erule.points[q];
            const Vec2 x = pa + (pb - pa) * s;
            edge_legendre_all(k + 1, s, leg);
            const double vn = normal_at(f, s, x) * erule.weights[q];
            for (int j = 0; j <= k; ++j) mom[j] += vn * leg[j];
        }
        for (int j = 0; j <= k; ++j) out.coeffs[sp.facet_dofs[f * (k + 1) + j]] = mom[j];
    }

    if (k >= 2) {
        const TriangleRule& trule = triangle_rule(quad_degree);
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            NedelecMomentBasis ned(k, mesh.tri_centroid(t), std::sqrt(2.0 * mesh.tri_area(t)));
            const int base = sp.dofs_per_element - ned.dim();
            for (size_t q = 0; q < trule.points.size(); ++q) {
                const Vec2 ref = trule.points[q];
                const Vec2 x = mesh.map_to_physical(t, ref);
                const Vec2 val = value_in(t, ref, x);
                const double w = trule.weights[q];
                for (int m = 0; m < ned.dim(); ++m)
                    out.coeffs[sp.element_dof(t, base + m)] += w * dot(val, ned.value(m, x));
            }
        }
    }
    return out;
}

} // namespace

FieldFunction interpolate_bdm(const SpaceDescriptor& bdm_space, const VectorField& v,
                              int quad_degree) {
    if (bdm_space.kind != SpaceKind::Bdm)
        throw WrongSpaceError("interpolate_bdm: target must be the BDM space");
    const Mesh& mesh = *bdm_space.mesh;
    return bdm_dofs_from(
        bdm_space,
        [&](int f, double, Vec2 x) { return dot(v(x), mesh.facets[f].normal); },
        [&](int, Vec2, Vec2 x) { return v(x); }, quad_degree);
}

FieldFunction interpolate_bdm(const SpaceDescriptor& bdm_space, const FieldFunction& v) {
    if (bdm_space.kind != SpaceKind::Bdm)
        throw WrongSpaceError("interpolate_bdm: target must be the BDM space");
    const Mesh& mesh = *bdm_space.mesh;
    const int quad_degree = std::min(2 * v.space->degree + 2, kMaxQuadDegree);

    // Cache one evaluator per element; facet moments need traces of both sides.
    std::vector<std::unique_ptr<ElementField>> fields(mesh.num_triangles());
    auto field = [&](int t) -> ElementField& {
        if (!fields[t]) fields[t] = std::make_unique<ElementField>(v, t);
        return *fields[t];
    };
    return bdm_dofs_from(
        bdm_space,
        [&](int f, double, Vec2 x) {
            const Facet& facet = mesh.facets[f];
            double vn = 0.0;
            int sides = 0;
            for (int s = 0; s < 2; ++s) {
                const int t = facet.tri[s];
                if (t < 0) continue;
                vn += dot(field(t).value(mesh.map_to_reference(t, x)), facet.normal);
                ++sides;
            }
            return vn / sides;
        },
        [&](int t, Vec2 ref, Vec2) { return field(t).value(ref); }, quad_degree);
}

FieldFunction reconstruct_relaxed(const SpaceDescriptor& bdm_space, const FieldFunction& v) {
    const SpaceDescriptor& rsp = *v.space;
    if (rsp.kind != SpaceKind::BdmRelaxed || bdm_space.kind != SpaceKind::Bdm)
        throw WrongSpaceError("reconstruct_relaxed: expects relaxed input and BDM target");
    if (bdm_space.degree != rsp.degree || bdm_space.mesh != rsp.mesh)
        throw WrongSpaceError("reconstruct_relaxed: incompatible spaces");
    FieldFunction out{&bdm_space, std::vector<double>(bdm_space.ndof, 0.0)};
    for (const auto& trip : reconstruction_matrix(bdm_space, rsp))
        out.coeffs[trip.row] += trip.value * v.coeffs[trip.col];
    return out;
}

std::vector<MapTriplet> reconstruction_matrix(const SpaceDescriptor& bdm_space,
                                              const SpaceDescriptor& relaxed_space) {
    if (bdm_space.kind != SpaceKind::Bdm || relaxed_space.kind != SpaceKind::BdmRelaxed)
        throw WrongSpaceError("reconstruction_matrix: wrong space kinds");
    const Mesh& mesh = *bdm_space.mesh;
    const int k = bdm_space.degree;
    std::vector<MapTriplet> trips;
    for (int f = 0; f < mesh.num_facets(); ++f) {
        for (int j = 0; j < k; ++j)
            trips.push_back({bdm_space.facet_dofs[f * (k + 1) + j],
                             relaxed_space.facet_dofs[f * k + j], 1.0});
        const int row = bdm_space.facet_dofs[f * (k + 1) + k];
        if (mesh.facets[f].boundary) {
            trips.push_back({row, relaxed_space.top_dofs[2 * f], 1.0});
        } else {
            trips.push_back({row, relaxed_space.top_dofs[2 * f], 0.5});
            trips.push_back({row, relaxed_space.top_dofs[2 * f + 1], 0.5});
        }
    }
    const int interior_per_tri = k * k - 1;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const int base = 3 * (k + 1);
        for (int m = 0; m < interior_per_tri; ++m)
            trips.push_back({bdm_space.element_dof(t, base + m),
                             relaxed_space.element_dof(t, base + m), 1.0});
    }
    return trips;
}

} // namespace elast
