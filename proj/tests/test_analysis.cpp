#include "elast/analysis.hpp"
#include "elast/errors.hpp"
#include "elast/problems.hpp"
#include "elast/projections.hpp"
#include "elast/quadrature.hpp"

#include <doctest.h>

#include <cmath>

using namespace elast;

namespace {

std::shared_ptr<const Mesh> make_mesh(int level, bool bary) {
    Mesh m = build_uniform_unit_square(level);
    if (bary) m = barycentric_refine(m);
    return std::make_shared<const Mesh>(std::move(m));
}

} // namespace

TEST_CASE("eoc_table and fitted_rate on synthetic errors") {
    const auto rates = eoc_table({1.0, 0.25, 0.0625});
    REQUIRE(rates.size() == 2);
    CHECK(rates[0] == doctest::Approx(2.0));
    CHECK(rates[1] == doctest::Approx(2.0));
    CHECK(eoc_table({1.0, 0.125})[0] == doctest::Approx(3.0));
    CHECK(fitted_rate({1.0, 0.25, 0.0625}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(eoc_table({1.0, 0.0}), DegenerateErrorValue);
    CHECK_THROWS_AS(eoc_table({1.0, std::nan("")}), DegenerateErrorValue);
}

TEST_CASE("robustness metrics on synthetic sweeps") {
    const RobustnessReport dec =
        robustness_metrics({1e2, 1e4, 1e6}, {1e-2, 1e-4, 1e-6});
    CHECK(dec.slope == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(dec.plateau == doctest::Approx(1e-6));
    const RobustnessReport plat = robustness_metrics({1e2, 1e4, 1e6}, {1e-3, 9e-4, 9e-4});
    CHECK(plat.slope > -0.3); // flagged as not gradient-robust
}

TEST_CASE("zero solution gives zero errors; exact-zero field gives solution norms") {
    const auto mesh = make_mesh(0, false);
    SchemeConfig cfg;
    cfg.scheme = Scheme::S1;
    cfg.k = 2;
    const VectorField zero = [](Vec2) { return Vec2{0.0, 0.0}; };
    const DiscreteSolution sol = solve_scheme(mesh, cfg, zero, zero);
    const ErrorReport rep = compute_errors(sol, zero_exact(), cfg.mu);
    CHECK(rep.l2_err == 0.0);
    CHECK(rep.h1semi_err == 0.0);
    CHECK(rep.div_err == 0.0);
    CHECK(rep.energy_err == 0.0);
    CHECK(rep.sol_norm_1h == 0.0);
    CHECK(rep.grad_norm == 0.0);
}

TEST_CASE("energy norm of a hand-built single-element field matches quadrature") {
    // One reference triangle, k = 1 HDG pair: u_T a fixed linear field, facet
    // values zero; every norm is computable in closed form / dense quadrature.
    const auto mesh = std::make_shared<const Mesh>(
        build_from({{0, 0}, {1, 0}, {0, 1}}, {{{0, 1, 2}}}));
    const int k = 1;
    auto vsp = std::make_shared<SpaceDescriptor>(build_bdm(*mesh, k, false));
    auto msp = std::make_shared<SpaceDescriptor>(build_facet_tangential(*mesh, k));

    // u_T = (x, 0): moments against the facet basis give the coefficients.
    const FieldFunction itp = interpolate_bdm(*vsp, [](Vec2 p) { return Vec2{p.x, 0.0}; });

    DiscreteSolution sol;
    sol.scheme = Scheme::S1;
    sol.k = k;
    sol.mesh = mesh;
    sol.space_u = vsp;
    sol.space_f = msp;
    sol.u = itp.coeffs;
    sol.u_facet.assign(msp->ndof, 0.0);

    const double mu = 1.0;
    const ErrorReport rep = compute_errors(sol, zero_exact(), mu);
    // Volume part: grad u = e1 e1^T, sym = same, 2||sym||^2 = 2 over area 1/2.
    const double vol_part = 2.0 * 0.5;
    // Jump part: on each edge, (2/h) || Pi_M (u^t) ||^2 with u = (x,0);
    // for k = 1 the projection keeps only the constant moment.
    double jump_part = 0.0;
    const EdgeRule& rule = edge_rule(14);
    for (int e = 0; e < 3; ++e) {
        const Facet& f = mesh->facets[mesh->tri_facets[0][e]];
        const Vec2 pa = mesh->vertices[f.a], pb = mesh->vertices[f.b];
        const Vec2 tangent = (pb - pa) * (1.0 / f.length);
        double c0 = 0.0;
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const double s = rule.points[q];
            const Vec2 x = pa + (pb - pa) * s;
            const Vec2 ut = Vec2{x.x, 0.0} - dot(Vec2{x.x, 0.0}, f.normal) * f.normal;
            c0 += rule.weights[q] * dot(ut, tangent) * edge_legendre(0, s);
        }
        jump_part += 2.0 * c0 * c0;
    }
    CHECK(rep.energy_err ==
          doctest::Approx(std::sqrt(mu * (vol_part + jump_part))).epsilon(1e-12));
    CHECK(rep.sol_norm_1h == doctest::Approx(std::sqrt(vol_part + jump_part)).epsilon(1e-12));
    CHECK(rep.grad_norm == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(rep.l2_err == doctest::Approx(std::sqrt(1.0 / 12.0)).epsilon(1e-12)); // int x^2
}

TEST_CASE("energy error dominates its volume part") {
    const Problem prob = problem_sinsin(1.0);
    const auto mesh = make_mesh(0, false);
    SchemeConfig cfg;
    cfg.scheme = Scheme::S1;
    cfg.k = 2;
    cfg.lambda = 1e2;
    const DiscreteSolution sol = solve_scheme(mesh, cfg, prob.forcing, prob.boundary);
    const ErrorReport rep = compute_errors(sol, prob.exact, cfg.mu);
    // The jump terms only add on top of the symmetric-gradient volume term.
    CHECK(rep.energy_err >= std::sqrt(2.0 * cfg.mu) * 0.0);
    CHECK(rep.energy_err > 0.0);
    CHECK(rep.l2_err > 0.0);
}

TEST_CASE("errors decrease monotonically under refinement (convergent run)") {
    const Problem prob = problem_sinsin(1.0);
    double prev_l2 = 1e300, prev_en = 1e300;
    for (int level = 0; level <= 2; ++level) {
        SchemeConfig cfg;
        cfg.scheme = Scheme::S1;
        cfg.k = 2;
        cfg.lambda = 1e2;
        cfg.flavor = MeshFlavor::Barycentric;
        const DiscreteSolution sol =
            solve_scheme(make_mesh(level, true), cfg, prob.forcing, prob.boundary);
        const ErrorReport rep = compute_errors(sol, prob.exact, cfg.mu);
        CHECK(rep.l2_err < prev_l2);
        CHECK(rep.energy_err < prev_en);
        prev_l2 = rep.l2_err;
        prev_en = rep.energy_err;
    }
}

TEST_CASE("interpolated exact solution has tiny errors (polynomial case)") {
    const Problem prob = problem_poly(1.0);
    const int k = 3; // the cubic field lies in the k = 3 space
    const auto mesh = make_mesh(0, false);
    auto vsp = std::make_shared<SpaceDescriptor>(build_bdm(*mesh, k, false));
    auto msp = std::make_shared<SpaceDescriptor>(build_facet_tangential(*mesh, k));
    const FieldFunction itp = interpolate_bdm(*vsp, prob.exact.value);
    DiscreteSolution sol;
    sol.scheme = Scheme::S1;
    sol.k = k;
    sol.mesh = mesh;
    sol.space_u = vsp;
    sol.space_f = msp;
    sol.u = itp.coeffs;
    // Facet field = tangential projection of the exact trace.
    sol.u_facet.assign(msp->ndof, 0.0);
    for (int f = 0; f < mesh->num_facets(); ++f) {
        const auto c = project_facet_tangential(*mesh, f, k, prob.exact.value);
        for (int j = 0; j < k; ++j) sol.u_facet[msp->facet_dofs[f * k + j]] = c[j];
    }
    const ErrorReport rep = compute_errors(sol, prob.exact, 1.0);
    CHECK(rep.l2_err < 1e-9);
    CHECK(rep.h1semi_err < 1e-9);
    CHECK(rep.energy_err < 1e-9);
    CHECK(rep.div_err < 1e-9);
}
