#pragma once

#include "elast/spaces.hpp"

#include <array>

namespace elast {

// L2(F) projection of a vector trace onto the tangential space M_k(F)
// (tangential Legendre polynomials of degree <= k-1). Returns the k
// coefficients in the orthonormal facet basis q_j(s) t_F.
std::vector<double> project_facet_tangential(const Mesh& mesh, int f, int k,
                                             const VectorField& w, int quad_degree = 14);

// Scalar L2(F) projection onto P^{k-1}(F); coefficients over q_0..q_{k-1}.
std::vector<double> project_facet_scalar(const Mesh& mesh, int f, int k,
                                         const ScalarField& w, int quad_degree = 14);

// Elementwise L2 projection onto the broken space (Pi_Q).
FieldFunction project_broken(const SpaceDescriptor& broken_space, const ScalarField& w,
                             int quad_degree = 14);

// Rigid motion a + b(-y, x); evaluable everywhere.
struct RigidMotion {
    Vec2 a;
    double b = 0.0;
    Vec2 operator()(Vec2 p) const { return {a.x - b * p.y, a.y + b * p.x}; }
};

// Projection onto RM(T): matches the element mean value and mean curl.
RigidMotion project_rigid_motion(const Mesh& mesh, int t, const VectorField& v,
                                 const std::function<Mat2(Vec2)>& grad_v, int quad_degree = 14);

// BDM interpolation (element-by-element moments); input may be discontinuous
// across facets, in which case the averaged normal trace is used.
FieldFunction interpolate_bdm(const SpaceDescriptor& bdm_space, const VectorField& v,
                              int quad_degree = 14);
FieldFunction interpolate_bdm(const SpaceDescriptor& bdm_space, const FieldFunction& v);

// Averaging reconstruction from the relaxed space into the conforming BDM
// space: shared DOFs are copied, the per-side top normal moments are averaged.
// Preserves the elementwise divergence.
FieldFunction reconstruct_relaxed(const SpaceDescriptor& bdm_space, const FieldFunction& v);

// The same map as a sparse matrix R (bdm.ndof x relaxed.ndof), as triplets.
struct MapTriplet {
    int row;
    int col;
    double value;
};
std::vector<MapTriplet> reconstruction_matrix(const SpaceDescriptor& bdm_space,
                                              const SpaceDescriptor& relaxed_space);

} // namespace elast
