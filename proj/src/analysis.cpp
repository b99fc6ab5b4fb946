#include "elast/analysis.hpp"

#include "elast/errors.hpp"
#include "elast/quadrature.hpp"

#include <cmath>

namespace elast {

ExactSolution zero_exact() {
    return {[](Vec2) { return Vec2{0.0, 0.0}; },
            [](Vec2) { return Mat2{}; },
            [](Vec2) { return 0.0; }};
}

ErrorReport compute_errors(const DiscreteSolution& sol, const ExactSolution& exact, double mu,
                           int quad_degree) {
    const Mesh& mesh = *sol.mesh;
    const TriangleRule& rule = triangle_rule(quad_degree);
    const EdgeRule& erule = edge_rule(quad_degree);
    const FieldFunction u_h = sol.u_field();

    double l2 = 0.0, h1 = 0.0, dv = 0.0, energy_vol = 0.0, sol_vol = 0.0, grad = 0.0;
    double energy_jump = 0.0, sol_jump = 0.0;

    const int k = sol.k;
    std::vector<double> leg(std::max(k, 1));
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const ElementField uh(u_h, t);
        const double jac = 2.0 * mesh.tri_area(t);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const Vec2 refp = rule.points[q];
            const Vec2 x = mesh.map_to_physical(t, refp);
            const double w = rule.weights[q] * jac;
            const Vec2 uv = uh.value(refp);
            const Mat2 ug = uh.gradient(refp);
            const Vec2 ev = exact.value(x) - uv;
            const Mat2 eg = exact.gradient(x) - ug;
            l2 += w * dot(ev, ev);
            h1 += w * inner(eg, eg);
            const double ediv = exact.divergence(x) - trace(ug);
            dv += w * ediv * ediv;
            const Mat2 es = sym(eg);
            energy_vol += w * 2.0 * inner(es, es);
            const Mat2 us = sym(ug);
            sol_vol += w * 2.0 * inner(us, us);
            grad += w * inner(ug, ug);
        }

        if (sol.has_facet()) {
            const FieldFunction u_f = sol.facet_field();
            for (int e = 0; e < 3; ++e) {
                const int fid = mesh.tri_facets[t][e];
                const Facet& facet = mesh.facets[fid];
                const Vec2 pa = mesh.vertices[facet.a], pb = mesh.vertices[facet.b];
                const Vec2 tangent = (pb - pa) * (1.0 / facet.length);
                const Vec2 n_out = mesh.outward_normal(t, e);
                // Jump (u_T)^t - u_F. Substituting the exact trace for u in
                // the error jump cancels (exact traces are single-valued), so
                // the error and solution jump terms coincide.
                std::vector<double> cj(k, 0.0);
                for (size_t q = 0; q < erule.points.size(); ++q) {
                    const double s = erule.points[q];
                    const Vec2 x = pa + (pb - pa) * s;
                    const Vec2 refp = mesh.map_to_reference(t, x);
                    const Vec2 ut = uh.value(refp);
                    const Vec2 ut_tan = ut - dot(ut, n_out) * n_out;
                    const Vec2 uf = u_f.facet_value(fid, s);
                    const Vec2 jump = ut_tan - uf;
                    edge_legendre_all(k, s, leg);
                    const double wt = dot(jump, tangent) * erule.weights[q];
                    for (int m = 0; m < k; ++m) cj[m] += wt * leg[m];
                }
                for (int m = 0; m < k; ++m) {
                    // (2 / h_F) * h_F * coeff^2 in the orthonormal facet basis.
                    energy_jump += 2.0 * cj[m] * cj[m];
                    sol_jump += 2.0 * cj[m] * cj[m];
                }
            }
        }
    }

    ErrorReport r;
    r.l2_err = std::sqrt(l2);
    r.h1semi_err = std::sqrt(h1);
    r.div_err = std::sqrt(dv);
    r.energy_err = std::sqrt(mu * (energy_vol + energy_jump));
    r.sol_norm_1h = std::sqrt(sol_vol + sol_jump);
    r.grad_norm = std::sqrt(grad);
    return r;
}

std::vector<double> eoc_table(const std::vector<double>& errors) {
    std::vector<double> rates;
    for (size_t i = 0; i + 1 < errors.size(); ++i) {
        if (!(errors[i] > 0.0) || !(errors[i + 1] > 0.0) || !std::isfinite(errors[i]) ||
            !std::isfinite(errors[i + 1]))
            throw DegenerateErrorValue("eoc_table: zero or non-finite error");
        rates.push_back(std::log2(errors[i] / errors[i + 1]));
    }
    return rates;
}

double fitted_rate(const std::vector<double>& errors) {
    const size_t n = errors.size();
    if (n < 2) throw DegenerateErrorValue("fitted_rate: need at least two levels");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        if (!(errors[i] > 0.0) || !std::isfinite(errors[i]))
            throw DegenerateErrorValue("fitted_rate: zero or non-finite error");
        const double x = static_cast<double>(i);
        const double y = std::log2(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    // Errors shrink by 2^rate per level: rate = -slope of log2(e) vs level.
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return -slope;
}

RobustnessReport robustness_metrics(const std::vector<double>& lambdas,
                                    const std::vector<double>& norms) {
    if (lambdas.size() != norms.size() || lambdas.size() < 2)
        throw DegenerateErrorValue("robustness_metrics: need matching lambda/norm lists");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(lambdas.size());
    for (size_t i = 0; i < lambdas.size(); ++i) {
        const double x = std::log(lambdas[i]);
        const double y = std::log(std::max(norms[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    RobustnessReport r;
    r.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    r.plateau = norms.back();
    return r;
}

} // namespace elast
