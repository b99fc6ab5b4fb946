#pragma once

#include "elast/assembly.hpp"

#include <memory>

namespace elast {

struct SolutionStats {
    int ndof_total = 0;       // free DOFs entering the global solve
    int ndof_condensable = 0; // element-local DOFs (not facet-coupled)
    double relative_residual = 0.0;
    double solve_seconds = 0.0;
    bool used_minres = false;
};

// Discrete solution of one scheme: element field u_T, optional facet field
// u_F (HDG) and pressure p_h (M2). Shared pointers keep the mesh and space
// descriptors alive for the field views.
struct DiscreteSolution {
    Scheme scheme = Scheme::S1;
    int k = 0;
    std::shared_ptr<const Mesh> mesh;
    std::shared_ptr<const SpaceDescriptor> space_u;
    std::shared_ptr<const SpaceDescriptor> space_f;
    std::shared_ptr<const SpaceDescriptor> space_p;
    std::vector<double> u;
    std::vector<double> u_facet;
    std::vector<double> p;
    SolutionStats stats;

    bool has_facet() const { return space_f != nullptr; }
    FieldFunction u_field() const { return {space_u.get(), u}; }
    FieldFunction facet_field() const { return {space_f.get(), u_facet}; }
    FieldFunction pressure_field() const { return {space_p.get(), p}; }
};

// Assembles and solves one scheme on the given mesh. The mesh flavor in the
// config must describe `mesh` (checked for SV only through the config).
DiscreteSolution solve_scheme(std::shared_ptr<const Mesh> mesh, const SchemeConfig& config,
                              const VectorField& forcing, const VectorField& boundary);

} // namespace elast
