#include "elast/assembly.hpp"
#include "elast/dense.hpp"
#include "elast/errors.hpp"
#include "elast/projections.hpp"
#include "elast/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace elast;

namespace {

double quadratic_form(const std::vector<Triplet>& trips, const std::vector<double>& x) {
    double s = 0.0;
    for (const auto& t : trips) s += x[t.row] * t.value * x[t.col];
    return s;
}

std::vector<double> random_free_vector(const LinearSystem& sys, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> x(sys.n, 0.0);
    for (int i = 0; i < sys.n; ++i)
        if (!sys.constrained[i]) x[i] = dist(rng);
    return x;
}

} // namespace

TEST_CASE("M1 element stiffness (k=1, mu=1/2, lambda=0) matches the dense oracle") {
    const Mesh m = build_from({{0, 0}, {1, 0}, {0, 1}}, {{{0, 1, 2}}});
    SpaceDescriptor sp = build_lagrange(m, 1, true, false);
    SchemeConfig cfg;
    cfg.scheme = Scheme::M1;
    cfg.k = 1;
    cfg.mu = 0.5;
    cfg.lambda = 0.0;
    const LinearSystem sys = assemble_m1(sp, cfg, [](Vec2) { return Vec2{0, 0}; });
    DMat assembled(sys.n, sys.n);
    for (const auto& t : sys.triplets) assembled(t.row, t.col) += t.value;

    // Oracle: dense assembly from the P1 gradients on the reference triangle:
    // grad n0 = (-1,-1), n1 = (1,0), n2 = (0,1), area 1/2.
    const Vec2 g[3] = {{-1, -1}, {1, 0}, {0, 1}};
    DMat oracle(6, 6);
    for (int i = 0; i < 3; ++i)
        for (int ci = 0; ci < 2; ++ci)
            for (int j = 0; j < 3; ++j)
                for (int cj = 0; cj < 2; ++cj) {
                    const double gi[2] = {g[i].x, g[i].y};
                    const double gj[2] = {g[j].x, g[j].y};
                    double s = 0.0;
                    for (int a = 0; a < 2; ++a)
                        for (int b = 0; b < 2; ++b) {
                            const double ei =
                                0.5 * ((ci == a ? gi[b] : 0.0) + (ci == b ? gi[a] : 0.0));
                            const double ej =
                                0.5 * ((cj == a ? gj[b] : 0.0) + (cj == b ? gj[a] : 0.0));
                            s += 2.0 * cfg.mu * ei * ej;
                        }
                    oracle(2 * i + ci, 2 * j + cj) = 0.5 * s;
                }
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            CHECK(std::fabs(assembled(sp.element_dof(0, i), sp.element_dof(0, j)) - oracle(i, j)) <
                  1e-13);
}

TEST_CASE("apply_dirichlet: zero BC leaves free rows untouched") {
    const Mesh m = build_uniform_unit_square(0);
    SpaceDescriptor sp = build_lagrange(m, 1, true, true);
    SchemeConfig cfg;
    cfg.scheme = Scheme::M1;
    cfg.k = 1;
    const auto f = [](Vec2 p) { return Vec2{p.x, -p.y}; };
    const LinearSystem sys = assemble_m1(sp, cfg, f);
    const ReducedSystem red = apply_dirichlet(sys);
    for (size_t i = 0; i < red.free_to_full.size(); ++i)
        CHECK(red.rhs[i] == sys.rhs[red.free_to_full[i]]);
}

TEST_CASE("HDG system: symmetry and positive definiteness at lambda=1e5") {
    const Mesh m = barycentric_refine(build_uniform_unit_square(0));
    SchemeConfig cfg;
    cfg.scheme = Scheme::S1;
    cfg.k = 2;
    cfg.lambda = 1e5;
    const SpaceDescriptor v = build_bdm(m, cfg.k, true);
    const SpaceDescriptor mf = build_facet_tangential(m, cfg.k);
    auto f = [](Vec2 p) {
        return Vec2{2.0 * M_PI * M_PI * std::sin(M_PI * p.x) * std::sin(M_PI * p.y),
                    2.0 * M_PI * M_PI * std::cos(M_PI * p.x) * std::cos(M_PI * p.y)};
    };
    const LinearSystem sys = assemble_hdg(v, mf, cfg, f);
    const ReducedSystem red = apply_dirichlet(sys);
    CHECK(red.a.symmetry_defect() <= 1e-12 * red.a.max_abs());
    SolveStats st;
    CHECK_NOTHROW(solve_spd(red.a, red.rhs, &st));
    CHECK(st.relative_residual <= 1e-10);
}

TEST_CASE("HDG rigid-motion residual vanishes") {
    const Mesh m = build_uniform_unit_square(0);
    SchemeConfig cfg;
    cfg.scheme = Scheme::S1;
    cfg.k = 2;
    cfg.lambda = 7.0;
    SpaceDescriptor v = build_bdm(m, cfg.k, true);
    SpaceDescriptor mf = build_facet_tangential(m, cfg.k);
    const RigidMotion rm{{0.4, -0.2}, 0.9};
    set_dirichlet(v, [&](Vec2 x) { return rm(x); });
    set_dirichlet(mf, [&](Vec2 x) { return rm(x); });
    const LinearSystem sys = assemble_hdg(v, mf, cfg, [](Vec2) { return Vec2{0, 0}; });

    std::vector<double> x(sys.n, 0.0);
    const SpaceDescriptor bdm_free = build_bdm(m, cfg.k, false);
    const FieldFunction itp = interpolate_bdm(bdm_free, [&](Vec2 p) { return rm(p); });
    for (int i = 0; i < v.ndof; ++i) x[i] = itp.coeffs[i];
    for (int f = 0; f < m.num_facets(); ++f) {
        const auto c = project_facet_tangential(m, f, cfg.k, [&](Vec2 p) { return rm(p); });
        for (int j = 0; j < cfg.k; ++j) x[v.ndof + mf.facet_dofs[f * cfg.k + j]] = c[j];
    }
    std::vector<double> ax(sys.n, 0.0);
    for (const auto& t : sys.triplets) ax[t.row] += t.value * x[t.col];
    for (int i = 0; i < sys.n; ++i)
        if (!sys.constrained[i]) CHECK(std::fabs(ax[i] - sys.rhs[i]) < 1e-10);
}

TEST_CASE("a_h^lambda is exactly the grad-div part, linear in lambda") {
    const Mesh m = build_uniform_unit_square(0);
    SchemeConfig cfg;
    cfg.scheme = Scheme::S1;
    cfg.k = 2;
    cfg.lambda = 3.5;
    const SpaceDescriptor v = build_bdm(m, cfg.k, true);
    const SpaceDescriptor mf = build_facet_tangential(m, cfg.k);
    HdgSplit split;
    const LinearSystem sys = assemble_hdg(v, mf, cfg, [](Vec2) { return Vec2{0, 0}; }, &split);

    // No facet coupling in the lambda part.
    for (const auto& t : split.lambda_part) {
        CHECK(t.row < v.ndof);
        CHECK(t.col < v.ndof);
    }
    // mu part + lambda part reproduce the assembled matrix.
    CsrMatrix full = CsrMatrix::from_triplets(sys.n, sys.triplets);
    std::vector<Triplet> diff = split.mu_part;
    diff.insert(diff.end(), split.lambda_part.begin(), split.lambda_part.end());
    for (const auto& t : sys.triplets) diff.push_back({t.row, t.col, -t.value});
    CHECK(CsrMatrix::from_triplets(sys.n, diff).max_abs() < 1e-11 * full.max_abs());

    SchemeConfig cfg2 = cfg;
    cfg2.lambda = 7.0;
    HdgSplit split2;
    assemble_hdg(v, mf, cfg2, [](Vec2) { return Vec2{0, 0}; }, &split2);
    REQUIRE(split.lambda_part.size() == split2.lambda_part.size());
    for (size_t i = 0; i < split.lambda_part.size(); ++i)
        CHECK(split2.lambda_part[i].value ==
              doctest::Approx(2.0 * split.lambda_part[i].value).epsilon(1e-12));
}

TEST_CASE("penalty scaling: rigid motion stays exact when alpha0 doubles") {
    const Mesh m = build_uniform_unit_square(0);
    SchemeConfig cfg;
    cfg.scheme = Scheme::S1;
    cfg.k = 2;
    cfg.lambda = 0.0;
    SpaceDescriptor v = build_bdm(m, cfg.k, true);
    SpaceDescriptor mf = build_facet_tangential(m, cfg.k);
    const RigidMotion rm{{1.0, 2.0}, -0.7};
    set_dirichlet(v, [&](Vec2 x) { return rm(x); });
    set_dirichlet(mf, [&](Vec2 x) { return rm(x); });

    for (double alpha0 : {10.0, 20.0}) {
        SchemeConfig c = cfg;
        c.alpha0 = alpha0;
        const LinearSystem sys = assemble_hdg(v, mf, c, [](Vec2) { return Vec2{0, 0}; });
        const ReducedSystem red = apply_dirichlet(sys);
        const std::vector<double> x = solve_spd(red.a, red.rhs);
        const std::vector<double> full = expand_solution(sys, red, x);
        FieldFunction uh{&v, std::vector<double>(full.begin(), full.begin() + v.ndof)};
        for (int t = 0; t < m.num_triangles(); t += 9) {
            const Vec2 ref{0.25, 0.5};
            const Vec2 diff = uh.value(t, ref) - rm(m.map_to_physical(t, ref));
            CHECK(norm(diff) < 1e-9);
        }
    }
}

TEST_CASE("coercivity proxy: Rayleigh quotient of a_h^mu vs the norm Gram >= 0.1") {
    for (int level = 0; level <= 1; ++level) {
        for (int k : {1, 2, 3}) {
            const Mesh m = build_uniform_unit_square(level);
            SchemeConfig cfg;
            cfg.scheme = Scheme::S1;
            cfg.k = k;
            cfg.lambda = 0.0;
            cfg.alpha0 = 10.0;
            const SpaceDescriptor v = build_bdm(m, k, true);
            const SpaceDescriptor mf = build_facet_tangential(m, k);
            HdgSplit split;
            const LinearSystem sys =
                assemble_hdg(v, mf, cfg, [](Vec2) { return Vec2{0, 0}; }, &split);
            const auto gram = hdg_norm_gram(v, mf, cfg.mu);
            std::mt19937 rng(500u + k);
            double min_q = 1e300;
            for (int trial = 0; trial < 100; ++trial) {
                const std::vector<double> x = random_free_vector(sys, rng());
                const double a = quadratic_form(split.mu_part, x);
                const double g = quadratic_form(gram, x);
                REQUIRE(g > 0.0);
                min_q = std::min(min_q, a / g);
            }
            CHECK(min_q >= 0.1);
        }
    }
}

TEST_CASE("coercivity guard trips for tiny alpha0") {
    const Mesh m = build_uniform_unit_square(0);
    SchemeConfig cfg;
    cfg.scheme = Scheme::S1;
    cfg.k = 2;
    cfg.alpha0 = 1e-3;
    const SpaceDescriptor v = build_bdm(m, cfg.k, true);
    const SpaceDescriptor mf = build_facet_tangential(m, cfg.k);
    CHECK_THROWS_AS(assemble_hdg(v, mf, cfg, [](Vec2) { return Vec2{0, 0}; }), CoercivityWarning);
}

TEST_CASE("S3 load: gradient forcing annihilates divergence-free relaxed fields") {
    const Mesh m = build_uniform_unit_square(0);
    const int k = 2;
    const SpaceDescriptor rel = build_bdm_relaxed(m, k, true);
    const SpaceDescriptor mf = build_facet_tangential(m, k);
    const SpaceDescriptor bdm = build_bdm(m, k, true);
    auto grad_phi = [](Vec2 p) { return Vec2{6.0 * std::pow(p.x, 5), 6.0 * std::pow(p.y, 5)}; };
    const std::vector<double> rhs = assemble_rhs_reconstructed(rel, mf, bdm, grad_phi, 14);

    // Build an elementwise divergence-free relaxed field with zero boundary
    // normal trace by projecting a random vector onto the constraint kernel.
    const SpaceDescriptor qsp = build_broken_scalar(m, k - 1);
    const TriangleRule& rule = triangle_rule(2 * k);
    const TriangleBasis& qb = TriangleBasis::get(k - 1);
    const SpaceDescriptor rel_free = build_bdm_relaxed(m, k, false);
    int nrows = qsp.ndof;
    DMat cmat(qsp.ndof + (rel.ndof - rel.nfree()), rel_free.ndof);
    std::vector<double> qv(qb.dim());
    for (int t = 0; t < m.num_triangles(); ++t) {
        const BdmElementBasis basis(m, t, k);
        const double area2 = 2.0 * m.tri_area(t);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            qb.values(rule.points[q], qv);
            for (int j = 0; j < basis.dim(); ++j) {
                const double dv = basis.divergence(j, rule.points[q]);
                for (int i = 0; i < qb.dim(); ++i)
                    cmat(qsp.element_dof(t, i), rel_free.element_dof(t, j)) +=
                        rule.weights[q] * area2 * dv * qv[i];
            }
        }
    }
    for (int i = 0; i < rel_free.ndof; ++i)
        if (rel.constrained[i]) cmat(nrows++, i) = 1.0;
    REQUIRE(nrows == cmat.rows());

    std::mt19937 rng(4u);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v0(rel_free.ndof);
    for (double& a : v0) a = dist(rng);
    const auto cv = cmat * v0;
    DMat cct(nrows, nrows);
    for (int i = 0; i < nrows; ++i)
        for (int j = 0; j < nrows; ++j) {
            double s = 0.0;
            for (int a = 0; a < rel_free.ndof; ++a) s += cmat(i, a) * cmat(j, a);
            cct(i, j) = s;
        }
    for (int i = 0; i < nrows; ++i) cct(i, i) += 1e-12; // moment redundancy
    std::vector<double> v = v0;
    for (int pass = 0; pass < 3; ++pass) {
        const auto y = lu_solve(cct, cmat * v);
        for (int a = 0; a < rel_free.ndof; ++a) {
            double s = 0.0;
            for (int i = 0; i < nrows; ++i) s += cmat(i, a) * y[i];
            v[a] -= s;
        }
    }
    const auto residual = cmat * v;
    double rmax = 0.0;
    for (double r : residual) rmax = std::max(rmax, std::fabs(r));
    REQUIRE(rmax < 1e-12);

    double fv = 0.0;
    for (int i = 0; i < rel_free.ndof; ++i) fv += rhs[i] * v[i];
    CHECK(std::fabs(fv) < 1e-11);
}

TEST_CASE("S3 load agrees with the plain load on normal-continuous members") {
    const Mesh m = build_uniform_unit_square(0);
    const int k = 2;
    const SpaceDescriptor rel = build_bdm_relaxed(m, k, true);
    const SpaceDescriptor mf = build_facet_tangential(m, k);
    const SpaceDescriptor bdm = build_bdm(m, k, true);
    auto f = [](Vec2 p) { return Vec2{std::sin(p.x + 2.0 * p.y), std::cos(2.0 * p.x - p.y)}; };
    const std::vector<double> rhs_s3 = assemble_rhs_reconstructed(rel, mf, bdm, f, 14);
    const std::vector<double> load_bdm = assemble_load(bdm, f, 14);

    std::mt19937 rng(6u);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> wb(bdm.ndof);
    for (double& a : wb) a = dist(rng);
    std::vector<double> wr(rel.ndof, 0.0);
    for (const auto& tr : reconstruction_matrix(bdm, rel)) wr[tr.col] = wb[tr.row];
    double lhs = 0.0, rhs_plain = 0.0;
    for (int i = 0; i < rel.ndof; ++i) lhs += rhs_s3[i] * wr[i];
    for (int i = 0; i < bdm.ndof; ++i) rhs_plain += load_bdm[i] * wb[i];
    CHECK(lhs == doctest::Approx(rhs_plain).epsilon(1e-12));
}

TEST_CASE("S3 load: |f(Pi_V v) - f(v)| decays under refinement") {
    const int k = 2;
    auto f = [](Vec2 p) { return Vec2{std::sin(p.x + 2.0 * p.y), std::cos(2.0 * p.x - p.y)}; };
    std::vector<double> ratios;
    for (int level = 0; level <= 2; ++level) {
        const Mesh m = build_uniform_unit_square(level);
        const SpaceDescriptor rel = build_bdm_relaxed(m, k, false);
        const SpaceDescriptor bdm = build_bdm(m, k, false);
        const SpaceDescriptor mf = build_facet_tangential(m, k);
        const std::vector<double> rhs_rec = assemble_rhs_reconstructed(rel, mf, bdm, f, 14);
        const std::vector<double> rhs_rel = assemble_load(rel, f, 14);
        double worst = 0.0;
        std::mt19937 rng(42u);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        const TriangleRule& rule = triangle_rule(2 * k);
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<double> v(rel.ndof);
            for (double& a : v) a = dist(rng);
            double num = 0.0;
            for (int i = 0; i < rel.ndof; ++i) num += (rhs_rec[i] - rhs_rel[i]) * v[i];
            FieldFunction vf{&rel, v};
            double g2 = 0.0;
            for (int t = 0; t < m.num_triangles(); ++t) {
                const ElementField vt(vf, t);
                for (size_t q = 0; q < rule.points.size(); ++q) {
                    const Mat2 gr = vt.gradient(rule.points[q]);
                    g2 += rule.weights[q] * 2.0 * m.tri_area(t) * inner(gr, gr);
                }
            }
            worst = std::max(worst, std::fabs(num) / std::sqrt(g2));
        }
        ratios.push_back(worst);
    }
    CHECK(ratios[1] < 0.8 * ratios[0]);
    CHECK(ratios[2] < 0.8 * ratios[1]);
}

TEST_CASE("config validation") {
    SchemeConfig cfg;
    cfg.scheme = Scheme::S2;
    cfg.k = 1;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg.scheme = Scheme::SV;
    cfg.k = 2;
    cfg.flavor = MeshFlavor::Uniform;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg.flavor = MeshFlavor::Barycentric;
    CHECK_NOTHROW(validate(cfg));
    cfg.scheme = Scheme::M1;
    cfg.stokes_limit = true;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
}
