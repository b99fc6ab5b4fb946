#pragma once

#include "elast/basis.hpp"
#include "elast/dense.hpp"
#include "elast/mesh.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace elast {

enum class SpaceKind { LagrangeScalar, LagrangeVec, Bdm, BdmRelaxed, FacetTangential, BrokenScalar };

using VectorField = std::function<Vec2(Vec2)>;
using ScalarField = std::function<double(Vec2)>;

// Discrete space over a mesh: element-local -> global DOF tables plus
// constraint flags and prescribed boundary values. Immutable after
// construction except for the prescribed values filled by set_dirichlet.
struct SpaceDescriptor {
    const Mesh* mesh = nullptr;
    SpaceKind kind = SpaceKind::LagrangeScalar;
    int degree = 1;
    bool zero_bc = false; // boundary-supported DOFs are constrained
    int ndof = 0;
    int dofs_per_element = 0;
    std::vector<int> element_dofs; // [t * dofs_per_element + i]

    std::vector<unsigned char> constrained;
    std::vector<double> prescribed;

    // Facet DOF tables.
    // Bdm:            facet f, moment j=0..k   -> facet_dofs[f*(k+1)+j]
    // BdmRelaxed:     facet f, moment j=0..k-1 -> facet_dofs[f*k+j] (shared);
    //                 top moment per side      -> top_dofs[2*f+side] (-1 if absent)
    // FacetTangential: facet f, j=0..k-1        -> facet_dofs[f*k+j]
    std::vector<int> facet_dofs;
    std::vector<int> top_dofs;

    int element_dof(int t, int i) const { return element_dofs[static_cast<size_t>(t) * dofs_per_element + i]; }
    int nfree() const;
    bool is_vector_valued() const {
        return kind == SpaceKind::LagrangeVec || kind == SpaceKind::Bdm || kind == SpaceKind::BdmRelaxed ||
               kind == SpaceKind::FacetTangential;
    }
};

SpaceDescriptor build_lagrange(const Mesh& mesh, int k, bool vector_valued, bool zero_bc);
SpaceDescriptor build_bdm(const Mesh& mesh, int k, bool zero_bc);
SpaceDescriptor build_bdm_relaxed(const Mesh& mesh, int k, bool zero_bc);
SpaceDescriptor build_facet_tangential(const Mesh& mesh, int k);
SpaceDescriptor build_broken_scalar(const Mesh& mesh, int degree);

// Fill prescribed values of constrained DOFs from Dirichlet data g, using the
// space's canonical boundary interpolation: nodal values for Lagrange, normal
// moments for (relaxed) BDM, tangential L2 projection for the facet space.
void set_dirichlet(SpaceDescriptor& space, const VectorField& g);

// Reference-element Lagrange nodal basis on the lattice {(i/k, j/k)}.
class LagrangeRefBasis {
public:
    explicit LagrangeRefBasis(int degree);
    static const LagrangeRefBasis& get(int degree);

    int dim() const { return static_cast<int>(nodes_.size()); }
    const std::vector<Vec2>& nodes() const { return nodes_; }
    void values(Vec2 ref, std::span<double> out) const;
    void gradients(Vec2 ref, std::span<Vec2> out) const; // reference gradients

private:
    int degree_;
    std::vector<Vec2> nodes_;
    DMat coeff_;
};

// Basis of the interior moment space [P^{k-2}]^2 + P^{k-2} (-y, x) on a
// triangle, in coordinates centered at `center` and scaled by 1/scale.
class NedelecMomentBasis {
public:
    NedelecMomentBasis(int k, Vec2 center, double scale);
    int dim() const { return dim_; }
    Vec2 value(int m, Vec2 phys) const;

private:
    int k_;
    int dim_;
    Vec2 center_;
    double scale_;
    std::vector<std::pair<int, int>> expo_; // monomials of degree <= k-2
};

// Element-local dual basis of the BDM degrees of freedom: shape i has
// facet-normal Legendre moments and interior Nedelec moments equal to
// delta_ij. Shared by Bdm and BdmRelaxed (the local space is identical).
class BdmElementBasis {
public:
    BdmElementBasis(const Mesh& mesh, int t, int k);

    int dim() const { return dim_; }
    int k() const { return k_; }
    Vec2 value(int i, Vec2 ref) const;
    Mat2 gradient(int i, Vec2 ref) const; // physical derivatives
    double divergence(int i, Vec2 ref) const;

    // Bulk evaluation: values/gradients of every shape at one point.
    void values(Vec2 ref, std::span<Vec2> out) const;
    void gradients(Vec2 ref, std::span<Mat2> out) const;

private:
    const Mesh* mesh_;
    int t_;
    int k_;
    int dim_;
    Mat2 jinv_t_; // transpose of the inverse Jacobian
    DMat coeff_;  // column i = product-basis coefficients of shape i
};

// A coefficient vector over a space; evaluable anywhere.
struct FieldFunction {
    const SpaceDescriptor* space = nullptr;
    std::vector<double> coeffs;

    Vec2 value(int t, Vec2 ref) const;
    Mat2 gradient(int t, Vec2 ref) const;
    double divergence(int t, Vec2 ref) const;
    double scalar_value(int t, Vec2 ref) const;
    Vec2 facet_value(int f, double s) const; // FacetTangential only
};

// Per-element evaluator; builds the local basis once and reuses it.
class ElementField {
public:
    ElementField(const FieldFunction& u, int t);

    Vec2 value(Vec2 ref) const;
    Mat2 gradient(Vec2 ref) const;
    double divergence(Vec2 ref) const { return trace(gradient(ref)); }
    double scalar_value(Vec2 ref) const;

private:
    const FieldFunction* u_;
    int t_;
    std::vector<double> local_coeffs_;
    // kind-specific helpers
    const LagrangeRefBasis* lag_ = nullptr;
    Mat2 jinv_t_;
    std::unique_ptr<BdmElementBasis> bdm_;
    const TriangleBasis* broken_ = nullptr;
    double broken_scale_ = 1.0;
};

} // namespace elast
