#pragma once

#include "elast/mesh.hpp"
#include "elast/spaces.hpp"
#include "elast/sparse.hpp"

#include <optional>

namespace elast {

enum class Scheme { M1, M2, SV, S1, S2, S3 };
enum class MeshFlavor { Uniform, Barycentric };

const char* scheme_name(Scheme s);
std::optional<Scheme> scheme_from_name(const std::string& name);

struct SchemeConfig {
    Scheme scheme = Scheme::S1;
    int k = 2;
    double mu = 1.0;
    double lambda = 1.0;
    double alpha0 = 16.0; // penalty alpha = alpha0 k^2
    MeshFlavor flavor = MeshFlavor::Uniform;
    bool stokes_limit = false;    // M2 diagnostic: drop the pressure mass block
    bool check_coercivity = true; // randomized positivity check of a_h^mu

    double alpha() const { return alpha0 * static_cast<double>(k) * k; }
};

// Throws ConfigError on inconsistent configurations (S2/S3 need k >= 2,
// M2 needs k >= 2 for the Taylor-Hood pair, SV needs a barycentric mesh).
void validate(const SchemeConfig& config);

// Assembled symmetric system over the full DOF set, constraints included.
struct LinearSystem {
    int n = 0;
    std::vector<Triplet> triplets;
    std::vector<double> rhs;
    std::vector<unsigned char> constrained;
    std::vector<double> prescribed;
    int leading_block = 0; // saddle-point hint: eliminate these DOFs first
};

struct ReducedSystem {
    CsrMatrix a;
    std::vector<double> rhs;
    std::vector<int> free_to_full;
    int n_full = 0;
    int leading_block = 0;
};

// Symmetric elimination of constrained DOFs: prescribed values move to the
// right-hand side and the system is restricted to the free DOFs.
ReducedSystem apply_dirichlet(const LinearSystem& sys);
std::vector<double> expand_solution(const LinearSystem& sys, const ReducedSystem& red,
                                    const std::vector<double>& x_free);

// (M1) and the same form on barycentric meshes (SV):
//   int 2mu grad_s(u):grad_s(v) + lambda div(u) div(v) = int f.v
LinearSystem assemble_m1(const SpaceDescriptor& space, const SchemeConfig& config,
                         const VectorField& f);

// (M2) Taylor-Hood block system [[A, B^T], [B, -1/lambda M]].
LinearSystem assemble_m2(const SpaceDescriptor& vspace, const SpaceDescriptor& pspace,
                         const SchemeConfig& config, const VectorField& f);

// HDG bilinear form (covers S1 and S2 through the choice of vspace):
// element terms, tangential consistency terms, projected tangential-jump
// penalty mu alpha/h_F, and the grad-div term. Optionally exposes the mu- and
// lambda-parts separately.
struct HdgSplit {
    std::vector<Triplet> mu_part;
    std::vector<Triplet> lambda_part;
};
LinearSystem assemble_hdg(const SpaceDescriptor& vspace, const SpaceDescriptor& mspace,
                          const SchemeConfig& config, const VectorField& f,
                          HdgSplit* split = nullptr);

// Gram matrix of the discrete norm ||.||_{mu,h} on the HDG space (volume
// symmetric-gradient part plus 2 mu/h_F projected jump part).
std::vector<Triplet> hdg_norm_gram(const SpaceDescriptor& vspace, const SpaceDescriptor& mspace,
                                   double mu);

// Plain load vector int f.phi_i over an element-supported vector space.
std::vector<double> assemble_load(const SpaceDescriptor& space, const VectorField& f,
                                  int quad_degree);

// S3 load: f(Pi_V v) for every relaxed basis function, realized as R^T times
// the BDM load vector; facet test functions receive zero load.
std::vector<double> assemble_rhs_reconstructed(const SpaceDescriptor& relaxed_space,
                                               const SpaceDescriptor& mspace,
                                               const SpaceDescriptor& bdm_space,
                                               const VectorField& f, int quad_degree);

} // namespace elast
