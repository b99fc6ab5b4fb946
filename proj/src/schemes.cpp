#include "elast/schemes.hpp"

#include "elast/errors.hpp"
#include "elast/projections.hpp"

#include <chrono>

namespace elast {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Element-local free DOFs: BDM interior moments plus, in the relaxed space,
// the per-side top normal moments on interior facets; Lagrange cell bubbles.
int count_condensable(const SpaceDescriptor& sp) {
    const Mesh& mesh = *sp.mesh;
    switch (sp.kind) {
        case SpaceKind::Bdm:
            return (sp.degree * sp.degree - 1) * mesh.num_triangles();
        case SpaceKind::BdmRelaxed: {
            int n = (sp.degree * sp.degree - 1) * mesh.num_triangles();
            n += 2 * mesh.num_interior_facets();
            return n;
        }
        case SpaceKind::LagrangeVec:
            return 2 * (sp.degree - 1) * (sp.degree - 2) / 2 * mesh.num_triangles();
        default:
            return 0;
    }
}

DiscreteSolution solve_lagrange(std::shared_ptr<const Mesh> mesh, const SchemeConfig& config,
                                const VectorField& forcing, const VectorField& boundary) {
    auto space = std::make_shared<SpaceDescriptor>(build_lagrange(*mesh, config.k, true, true));
    set_dirichlet(*space, boundary);
    const auto t0 = Clock::now();
    LinearSystem sys = assemble_m1(*space, config, forcing);
    ReducedSystem red = apply_dirichlet(sys);
    SolveStats st;
    SolveOptions opts;
    opts.best_effort = true;
    const std::vector<double> x = solve_spd(red.a, red.rhs, &st, opts);

    DiscreteSolution sol;
    sol.scheme = config.scheme;
    sol.k = config.k;
    sol.mesh = std::move(mesh);
    sol.space_u = space;
    sol.u = expand_solution(sys, red, x);
    sol.stats.ndof_total = static_cast<int>(red.free_to_full.size());
    sol.stats.ndof_condensable = count_condensable(*space);
    sol.stats.relative_residual = st.relative_residual;
    sol.stats.used_minres = st.used_minres;
    sol.stats.solve_seconds = seconds_since(t0);
    return sol;
}

DiscreteSolution solve_m2(std::shared_ptr<const Mesh> mesh, const SchemeConfig& config,
                          const VectorField& forcing, const VectorField& boundary) {
    auto vspace = std::make_shared<SpaceDescriptor>(build_lagrange(*mesh, config.k, true, true));
    auto pspace = std::make_shared<SpaceDescriptor>(build_lagrange(*mesh, config.k - 1, false, false));
    set_dirichlet(*vspace, boundary);
    const auto t0 = Clock::now();
    LinearSystem sys = assemble_m2(*vspace, *pspace, config, forcing);
    ReducedSystem red = apply_dirichlet(sys);
    SolveOptions opts;
    opts.leading_block = red.leading_block;
    opts.tolerance = 1e-9;
    opts.best_effort = true;
    SolveStats st;
    const std::vector<double> x = solve_symmetric_indefinite(red.a, red.rhs, opts, &st);
    const std::vector<double> full = expand_solution(sys, red, x);

    DiscreteSolution sol;
    sol.scheme = Scheme::M2;
    sol.k = config.k;
    sol.mesh = std::move(mesh);
    sol.space_u = vspace;
    sol.space_p = pspace;
    sol.u.assign(full.begin(), full.begin() + vspace->ndof);
    sol.p.assign(full.begin() + vspace->ndof, full.end());
    sol.stats.ndof_total = static_cast<int>(red.free_to_full.size());
    sol.stats.ndof_condensable = count_condensable(*vspace);
    sol.stats.relative_residual = st.relative_residual;
    sol.stats.used_minres = st.used_minres;
    sol.stats.solve_seconds = seconds_since(t0);
    return sol;
}

DiscreteSolution solve_hdg(std::shared_ptr<const Mesh> mesh, const SchemeConfig& config,
                           const VectorField& forcing, const VectorField& boundary) {
    const bool relaxed = (config.scheme != Scheme::S1);
    auto vspace = std::make_shared<SpaceDescriptor>(
        relaxed ? build_bdm_relaxed(*mesh, config.k, true) : build_bdm(*mesh, config.k, true));
    auto mspace = std::make_shared<SpaceDescriptor>(build_facet_tangential(*mesh, config.k));
    set_dirichlet(*vspace, boundary);
    set_dirichlet(*mspace, boundary);

    const auto t0 = Clock::now();
    LinearSystem sys = assemble_hdg(*vspace, *mspace, config, forcing);
    if (config.scheme == Scheme::S3) {
        const SpaceDescriptor bdm = build_bdm(*mesh, config.k, true);
        sys.rhs = assemble_rhs_reconstructed(*vspace, *mspace, bdm, forcing, 2 * config.k + 2);
    }
    ReducedSystem red = apply_dirichlet(sys);
    SolveStats st;
    SolveOptions opts;
    opts.best_effort = true;
    const std::vector<double> x = solve_spd(red.a, red.rhs, &st, opts);
    const std::vector<double> full = expand_solution(sys, red, x);

    DiscreteSolution sol;
    sol.scheme = config.scheme;
    sol.k = config.k;
    sol.mesh = std::move(mesh);
    sol.space_u = vspace;
    sol.space_f = mspace;
    sol.u.assign(full.begin(), full.begin() + vspace->ndof);
    sol.u_facet.assign(full.begin() + vspace->ndof, full.end());
    sol.stats.ndof_total = static_cast<int>(red.free_to_full.size());
    sol.stats.ndof_condensable = count_condensable(*vspace);
    sol.stats.relative_residual = st.relative_residual;
    sol.stats.used_minres = st.used_minres;
    sol.stats.solve_seconds = seconds_since(t0);
    return sol;
}

} // namespace

DiscreteSolution solve_scheme(std::shared_ptr<const Mesh> mesh, const SchemeConfig& config,
                              const VectorField& forcing, const VectorField& boundary) {
    validate(config);
    switch (config.scheme) {
        case Scheme::M1:
        case Scheme::SV:
            return solve_lagrange(std::move(mesh), config, forcing, boundary);
        case Scheme::M2:
            return solve_m2(std::move(mesh), config, forcing, boundary);
        case Scheme::S1:
        case Scheme::S2:
        case Scheme::S3:
            return solve_hdg(std::move(mesh), config, forcing, boundary);
    }
    throw ConfigError("solve_scheme: unknown scheme");
}

} // namespace elast
