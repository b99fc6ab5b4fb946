#include "elast/assembly.hpp"

#include "elast/errors.hpp"
#include "elast/projections.hpp"
#include "elast/quadrature.hpp"

#include <cmath>
#include <random>

namespace elast {

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::M1: return "m1";
        case Scheme::M2: return "m2";
        case Scheme::SV: return "sv";
        case Scheme::S1: return "s1";
        case Scheme::S2: return "s2";
        case Scheme::S3: return "s3";
    }
    return "?";
}

std::optional<Scheme> scheme_from_name(const std::string& name) {
    if (name == "m1") return Scheme::M1;
    if (name == "m2") return Scheme::M2;
    if (name == "sv") return Scheme::SV;
    if (name == "s1") return Scheme::S1;
    if (name == "s2") return Scheme::S2;
    if (name == "s3") return Scheme::S3;
    return std::nullopt;
}

void validate(const SchemeConfig& config) {
    if (config.k < 1) throw ConfigError("config: k must be >= 1");
    if (config.mu <= 0.0) throw ConfigError("config: mu must be positive");
    if (config.lambda < 0.0) throw ConfigError("config: lambda must be nonnegative");
    if (config.alpha0 <= 0.0) throw ConfigError("config: alpha0 must be positive");
    if ((config.scheme == Scheme::S2 || config.scheme == Scheme::S3) && config.k < 2)
        throw ConfigError("config: S2/S3 require k >= 2");
    if (config.scheme == Scheme::M2 && config.k < 2)
        throw ConfigError("config: M2 (Taylor-Hood) requires k >= 2");
    if (config.scheme == Scheme::SV && config.flavor != MeshFlavor::Barycentric)
        throw ConfigError("config: SV runs on barycentric meshes");
    if (config.stokes_limit && config.scheme != Scheme::M2)
        throw ConfigError("config: stokes_limit applies to M2 only");
}

ReducedSystem apply_dirichlet(const LinearSystem& sys) {
    ReducedSystem red;
    red.n_full = sys.n;
    std::vector<int> full_to_free(sys.n, -1);
    for (int i = 0; i < sys.n; ++i) {
        if (!sys.constrained[i]) {
            full_to_free[i] = static_cast<int>(red.free_to_full.size());
            red.free_to_full.push_back(i);
            if (i < sys.leading_block) ++red.leading_block;
        }
    }
    const int nfree = static_cast<int>(red.free_to_full.size());
    red.rhs.resize(nfree);
    for (int i = 0; i < nfree; ++i) red.rhs[i] = sys.rhs[red.free_to_full[i]];

    std::vector<Triplet> reduced;
    reduced.reserve(sys.triplets.size());
    for (const auto& t : sys.triplets) {
        const int fi = full_to_free[t.row];
        if (fi < 0) continue;
        const int fj = full_to_free[t.col];
        if (fj >= 0) {
            reduced.push_back({fi, fj, t.value});
        } else {
            red.rhs[fi] -= t.value * sys.prescribed[t.col];
        }
    }
    red.a = CsrMatrix::from_triplets(nfree, reduced);
    return red;
}

std::vector<double> expand_solution(const LinearSystem& sys, const ReducedSystem& red,
                                    const std::vector<double>& x_free) {
    std::vector<double> full = sys.prescribed;
    for (int i = 0; i < sys.n; ++i)
        if (!sys.constrained[i] && full[i] != 0.0) full[i] = 0.0;
    for (size_t i = 0; i < red.free_to_full.size(); ++i) full[red.free_to_full[i]] = x_free[i];
    return full;
}

// ---------------------------------------------------------------------------
// Lagrange assembly (M1/SV and the M2 blocks)
// ---------------------------------------------------------------------------

namespace {

Mat2 inverse_transpose(const Mat2& j) {
    const double det = j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
    Mat2 r;
    r(0, 0) = j(1, 1) / det;
    r(0, 1) = -j(1, 0) / det;
    r(1, 0) = -j(0, 1) / det;
    r(1, 1) = j(0, 0) / det;
    return r;
}

// Symmetric-gradient contraction of two vector shape functions given the
// scalar gradients g_i, g_j and components c_i, c_j:
// 2 sym(e_{ci} g_i^T) : sym(e_{cj} g_j^T).
double sym_contract(int ci, Vec2 gi, int cj, Vec2 gj) {
    const double gi_arr[2] = {gi.x, gi.y};
    const double gj_arr[2] = {gj.x, gj.y};
    double s = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const double ei = 0.5 * ((ci == a ? gi_arr[b] : 0.0) + (ci == b ? gi_arr[a] : 0.0));
            const double ej = 0.5 * ((cj == a ? gj_arr[b] : 0.0) + (cj == b ? gj_arr[a] : 0.0));
            s += 2.0 * ei * ej;
        }
    return s;
}

} // namespace

LinearSystem assemble_m1(const SpaceDescriptor& space, const SchemeConfig& config,
                         const VectorField& f) {
    if (space.kind != SpaceKind::LagrangeVec)
        throw WrongSpaceError("assemble_m1: expects a vector Lagrange space");
    const Mesh& mesh = *space.mesh;
    const int k = space.degree;
    const auto& ref = LagrangeRefBasis::get(k);
    const int nn = ref.dim();
    const TriangleRule& rule = triangle_rule(2 * k + 2);

    LinearSystem sys;
    sys.n = space.ndof;
    sys.rhs.assign(sys.n, 0.0);
    sys.constrained.assign(space.constrained.begin(), space.constrained.end());
    sys.prescribed = space.prescribed;

    std::vector<double> vals(nn);
    std::vector<Vec2> grads(nn);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Mat2 jinv_t = inverse_transpose(mesh.tri_jacobian(t));
        const double jac = 2.0 * mesh.tri_area(t);
        const int nloc = 2 * nn;
        DMat local(nloc, nloc);
        std::vector<double> load(nloc, 0.0);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const Vec2 refp = rule.points[q];
            ref.values(refp, vals);
            ref.gradients(refp, grads);
            const double w = rule.weights[q] * jac;
            std::vector<Vec2> pg(nn);
            for (int i = 0; i < nn; ++i) pg[i] = mul(jinv_t, grads[i]);
            const Vec2 fv = f(mesh.map_to_physical(t, refp));
            for (int i = 0; i < nn; ++i) {
                load[2 * i] += w * fv.x * vals[i];
                load[2 * i + 1] += w * fv.y * vals[i];
                for (int j = 0; j < nn; ++j) {
                    for (int ci = 0; ci < 2; ++ci) {
                        // div of shape (i,ci) is the ci-component of pg[i]
                        const double divi = (ci == 0) ? pg[i].x : pg[i].y;
                        for (int cj = 0; cj < 2; ++cj) {
                            const double divj = (cj == 0) ? pg[j].x : pg[j].y;
                            const double val =
                                config.mu * sym_contract(ci, pg[i], cj, pg[j]) +
                                config.lambda * divi * divj;
                            local(2 * i + ci, 2 * j + cj) += w * val;
                        }
                    }
                }
            }
        }
        for (int i = 0; i < nloc; ++i) {
            const int gi = space.element_dof(t, i);
            sys.rhs[gi] += load[i];
            for (int j = 0; j < nloc; ++j) {
                const double v = local(i, j);
                if (v != 0.0) sys.triplets.push_back({gi, space.element_dof(t, j), v});
            }
        }
    }
    return sys;
}

LinearSystem assemble_m2(const SpaceDescriptor& vspace, const SpaceDescriptor& pspace,
                         const SchemeConfig& config, const VectorField& f) {
    if (vspace.kind != SpaceKind::LagrangeVec || pspace.kind != SpaceKind::LagrangeScalar)
        throw WrongSpaceError("assemble_m2: expects Taylor-Hood spaces");
    const Mesh& mesh = *vspace.mesh;
    const int k = vspace.degree;

    // Velocity block: the mu part of the M1 form.
    SchemeConfig mu_only = config;
    mu_only.lambda = 0.0;
    LinearSystem sys = assemble_m1(vspace, mu_only, f);

    const int nu = vspace.ndof;
    const int np = pspace.ndof;
    sys.n = nu + np;
    sys.leading_block = nu;
    sys.rhs.resize(sys.n, 0.0);
    sys.constrained.resize(sys.n, 0);
    sys.prescribed.resize(sys.n, 0.0);

    const auto& vref = LagrangeRefBasis::get(k);
    const auto& pref = LagrangeRefBasis::get(k - 1);
    const TriangleRule& rule = triangle_rule(2 * k + 2);
    std::vector<Vec2> vg(vref.dim());
    std::vector<double> pv(pref.dim());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Mat2 jinv_t = inverse_transpose(mesh.tri_jacobian(t));
        const double jac = 2.0 * mesh.tri_area(t);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const Vec2 refp = rule.points[q];
            vref.gradients(refp, vg);
            pref.values(refp, pv);
            const double w = rule.weights[q] * jac;
            for (int i = 0; i < vref.dim(); ++i) {
                const Vec2 pg = mul(jinv_t, vg[i]);
                const double div_x = pg.x, div_y = pg.y;
                const int gx = vspace.element_dof(t, 2 * i);
                const int gy = vspace.element_dof(t, 2 * i + 1);
                for (int j = 0; j < pref.dim(); ++j) {
                    const int gp = nu + pspace.element_dof(t, j);
                    const double bx = w * div_x * pv[j];
                    const double by = w * div_y * pv[j];
                    sys.triplets.push_back({gp, gx, bx});
                    sys.triplets.push_back({gx, gp, bx});
                    sys.triplets.push_back({gp, gy, by});
                    sys.triplets.push_back({gy, gp, by});
                }
            }
            if (!config.stokes_limit) {
                for (int i = 0; i < pref.dim(); ++i) {
                    const int gi = nu + pspace.element_dof(t, i);
                    for (int j = 0; j < pref.dim(); ++j)
                        sys.triplets.push_back(
                            {gi, nu + pspace.element_dof(t, j), -w * pv[i] * pv[j] / config.lambda});
                }
            }
        }
    }
    if (config.stokes_limit) {
        // The pressure is defined up to a constant; pin one DOF. Consistent
        // for boundary data with vanishing net flux.
        sys.constrained[nu] = 1;
        sys.prescribed[nu] = 0.0;
    }
    return sys;
}

// ---------------------------------------------------------------------------
// HDG assembly
// ---------------------------------------------------------------------------

namespace {

struct HdgWeights {
    double consistency = 1.0;   // tangential consistency terms on/off
    double penalty = 0.0;       // coefficient of the projected-jump product
    double lambda = 0.0;        // grad-div coefficient
    bool with_load = false;
};

void hdg_element_loop(const SpaceDescriptor& vspace, const SpaceDescriptor& mspace,
                      double mu, const HdgWeights& weights, const VectorField* f,
                      std::vector<Triplet>* mu_out, std::vector<Triplet>* lambda_out,
                      std::vector<double>* rhs) {
    const Mesh& mesh = *vspace.mesh;
    const int k = vspace.degree;
    const int nb = (k + 1) * (k + 2);
    const int nloc = nb + 3 * k;
    const int n_v = vspace.ndof;
    const TriangleRule& vrule = triangle_rule(2 * k + 2);
    const EdgeRule& erule = edge_rule(2 * k + 2);

    std::vector<Vec2> shape_vals(nb);
    std::vector<Mat2> shape_grads(nb);
    std::vector<double> leg(k);
    std::vector<int> gdof(nloc);

    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const BdmElementBasis basis(mesh, t, k);
        DMat local_mu(nloc, nloc), local_lambda(nloc, nloc);
        std::vector<double> load(nloc, 0.0);

        for (int i = 0; i < nb; ++i) gdof[i] = vspace.element_dof(t, i);
        for (int e = 0; e < 3; ++e) {
            const int fid = mesh.tri_facets[t][e];
            for (int j = 0; j < k; ++j) gdof[nb + e * k + j] = n_v + mspace.facet_dofs[fid * k + j];
        }

        // Volume: 2mu grad_s : grad_s and lambda div div (+ load).
        const double jac = 2.0 * mesh.tri_area(t);
        for (size_t q = 0; q < vrule.points.size(); ++q) {
            const Vec2 refp = vrule.points[q];
            basis.values(refp, shape_vals);
            basis.gradients(refp, shape_grads);
            const double w = vrule.weights[q] * jac;
            std::vector<Mat2> symg(nb);
            std::vector<double> divs(nb);
            for (int i = 0; i < nb; ++i) {
                symg[i] = sym(shape_grads[i]);
                divs[i] = trace(shape_grads[i]);
            }
            for (int i = 0; i < nb; ++i) {
                for (int j = 0; j <= i; ++j) {
                    const double vmu = w * 2.0 * mu * inner(symg[i], symg[j]);
                    local_mu(i, j) += vmu;
                    if (i != j) local_mu(j, i) += vmu;
                    if (weights.lambda != 0.0) {
                        const double vl = w * weights.lambda * divs[i] * divs[j];
                        local_lambda(i, j) += vl;
                        if (i != j) local_lambda(j, i) += vl;
                    }
                }
                if (weights.with_load) {
                    const Vec2 fv = (*f)(mesh.map_to_physical(t, refp));
                    load[i] += w * dot(fv, shape_vals[i]);
                }
            }
        }

        // Facet terms. For each local dof we track the jump trace
        // J(v) = (v_T)^t - v_F on this edge and its M_k(F) coefficients.
        for (int e = 0; e < 3; ++e) {
            const int fid = mesh.tri_facets[t][e];
            const Facet& facet = mesh.facets[fid];
            const Vec2 pa = mesh.vertices[facet.a], pb = mesh.vertices[facet.b];
            const Vec2 tangent = (pb - pa) * (1.0 / facet.length);
            const Vec2 n_out = mesh.outward_normal(t, e);
            const size_t nq = erule.points.size();

            // Projected-jump coefficients, BDM part: proj[i][m].
            DMat proj(nb, k);
            // Pointwise traces at quadrature nodes.
            std::vector<Vec2> jump_q(static_cast<size_t>(nb) * nq);
            std::vector<Vec2> sigma_q(static_cast<size_t>(nb) * nq); // 2mu grad_s(phi) n
            for (size_t q = 0; q < nq; ++q) {
                const double s = erule.points[q];
                const Vec2 x = pa + (pb - pa) * s;
                const Vec2 refp = mesh.map_to_reference(t, x);
                basis.values(refp, shape_vals);
                basis.gradients(refp, shape_grads);
                edge_legendre_all(k, s, leg);
                for (int i = 0; i < nb; ++i) {
                    const Vec2 v = shape_vals[i];
                    const Vec2 vt = v - dot(v, n_out) * n_out;
                    jump_q[i * nq + q] = vt;
                    sigma_q[i * nq + q] = mul(sym(shape_grads[i]), n_out) * (2.0 * mu);
                    const double wt = erule.weights[q] * dot(vt, tangent);
                    for (int m = 0; m < k; ++m) proj(i, m) += wt * leg[m];
                }
            }

            // BDM x BDM and BDM x facet couplings.
            for (size_t q = 0; q < nq; ++q) {
                const double w = erule.weights[q] * facet.length;
                edge_legendre_all(k, erule.points[q], leg);
                for (int i = 0; i < nb; ++i) {
                    const Vec2 ji = jump_q[i * nq + q];
                    const Vec2 si = sigma_q[i * nq + q];
                    if (weights.consistency != 0.0) {
                        for (int j = 0; j < nb; ++j) {
                            local_mu(i, j) -= weights.consistency * w *
                                              (dot(sigma_q[j * nq + q], ji) + dot(si, jump_q[j * nq + q]));
                        }
                        // Facet dof (e, m): jump contribution -q_m(s) tangent.
                        for (int m = 0; m < k; ++m) {
                            const double jv = -leg[m];
                            const double val = weights.consistency * w * dot(si, tangent) * jv;
                            local_mu(i, nb + e * k + m) -= val;
                            local_mu(nb + e * k + m, i) -= val;
                        }
                    }
                }
            }

            // Penalty in coefficient space: facet dofs project to -delta.
            if (weights.penalty != 0.0) {
                for (int m = 0; m < k; ++m) {
                    const int fi = nb + e * k + m;
                    local_mu(fi, fi) += weights.penalty;
                    for (int i = 0; i < nb; ++i) {
                        local_mu(fi, i) -= weights.penalty * proj(i, m);
                        local_mu(i, fi) -= weights.penalty * proj(i, m);
                    }
                }
                for (int i = 0; i < nb; ++i)
                    for (int j = 0; j < nb; ++j) {
                        double s = 0.0;
                        for (int m = 0; m < k; ++m) s += proj(i, m) * proj(j, m);
                        local_mu(i, j) += weights.penalty * s;
                    }
            }
        }

        for (int i = 0; i < nloc; ++i) {
            if (rhs && weights.with_load) (*rhs)[gdof[i]] += load[i];
            for (int j = 0; j < nloc; ++j) {
                if (mu_out && local_mu(i, j) != 0.0)
                    mu_out->push_back({gdof[i], gdof[j], local_mu(i, j)});
                if (lambda_out && local_lambda(i, j) != 0.0)
                    lambda_out->push_back({gdof[i], gdof[j], local_lambda(i, j)});
            }
        }
    }
}

} // namespace

LinearSystem assemble_hdg(const SpaceDescriptor& vspace, const SpaceDescriptor& mspace,
                          const SchemeConfig& config, const VectorField& f, HdgSplit* split) {
    if (vspace.kind != SpaceKind::Bdm && vspace.kind != SpaceKind::BdmRelaxed)
        throw WrongSpaceError("assemble_hdg: element space must be (relaxed) BDM");
    if (mspace.kind != SpaceKind::FacetTangential || mspace.degree != vspace.degree)
        throw WrongSpaceError("assemble_hdg: facet space mismatch");

    LinearSystem sys;
    sys.n = vspace.ndof + mspace.ndof;
    sys.rhs.assign(sys.n, 0.0);
    sys.constrained.assign(sys.n, 0);
    sys.prescribed.assign(sys.n, 0.0);
    for (int i = 0; i < vspace.ndof; ++i) {
        sys.constrained[i] = vspace.constrained[i];
        sys.prescribed[i] = vspace.prescribed[i];
    }
    for (int i = 0; i < mspace.ndof; ++i) {
        sys.constrained[vspace.ndof + i] = mspace.constrained[i];
        sys.prescribed[vspace.ndof + i] = mspace.prescribed[i];
    }

    HdgWeights w;
    w.consistency = 1.0;
    w.penalty = config.mu * config.alpha(); // mu (alpha/h) over ds with h = h_F
    w.lambda = config.lambda;
    w.with_load = true;

    std::vector<Triplet> mu_part, lambda_part;
    hdg_element_loop(vspace, mspace, config.mu, w, &f, &mu_part, &lambda_part, &sys.rhs);

    if (config.check_coercivity) {
        // a_h^mu must be positive on zero-BC vectors; a cheap randomized probe.
        CsrMatrix amu = CsrMatrix::from_triplets(sys.n, mu_part);
        std::mt19937 rng(20240817u);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> x(sys.n, 0.0);
            for (int i = 0; i < sys.n; ++i)
                if (!sys.constrained[i]) x[i] = dist(rng);
            const std::vector<double> ax = amu.multiply(x);
            double q = 0.0;
            for (int i = 0; i < sys.n; ++i) q += x[i] * ax[i];
            if (!(q > 0.0))
                throw CoercivityWarning("assemble_hdg: a_h^mu not positive on a random vector; "
                                        "increase alpha0");
        }
    }

    sys.triplets = std::move(mu_part);
    sys.triplets.insert(sys.triplets.end(), lambda_part.begin(), lambda_part.end());
    if (split) {
        // Rebuild the split lists (cheap relative to the solve).
        split->mu_part.clear();
        split->lambda_part.clear();
        HdgWeights wm = w;
        wm.with_load = false;
        wm.lambda = 0.0;
        hdg_element_loop(vspace, mspace, config.mu, wm, nullptr, &split->mu_part, nullptr, nullptr);
        HdgWeights wl;
        wl.consistency = 0.0;
        wl.penalty = 0.0;
        wl.lambda = config.lambda;
        hdg_element_loop(vspace, mspace, config.mu, wl, nullptr, nullptr, &split->lambda_part,
                         nullptr);
    }
    return sys;
}

std::vector<Triplet> hdg_norm_gram(const SpaceDescriptor& vspace, const SpaceDescriptor& mspace,
                                   double mu) {
    HdgWeights w;
    w.consistency = 0.0;
    w.penalty = 2.0 * mu; // (2/h_F) ||Pi_M jump||^2 integrated over the facet
    w.lambda = 0.0;
    std::vector<Triplet> gram;
    hdg_element_loop(vspace, mspace, mu, w, nullptr, &gram, nullptr, nullptr);
    return gram;
}

std::vector<double> assemble_load(const SpaceDescriptor& space, const VectorField& f,
                                  int quad_degree) {
    const Mesh& mesh = *space.mesh;
    std::vector<double> load(space.ndof, 0.0);
    const TriangleRule& rule = triangle_rule(quad_degree);
    if (space.kind == SpaceKind::Bdm || space.kind == SpaceKind::BdmRelaxed) {
        const int nb = space.dofs_per_element;
        std::vector<Vec2> vals(nb);
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            const BdmElementBasis basis(mesh, t, space.degree);
            const double jac = 2.0 * mesh.tri_area(t);
            for (size_t q = 0; q < rule.points.size(); ++q) {
                basis.values(rule.points[q], vals);
                const Vec2 fv = f(mesh.map_to_physical(t, rule.points[q]));
                const double w = rule.weights[q] * jac;
                for (int i = 0; i < nb; ++i)
                    load[space.element_dof(t, i)] += w * dot(fv, vals[i]);
            }
        }
        return load;
    }
    if (space.kind == SpaceKind::LagrangeVec) {
        const auto& ref = LagrangeRefBasis::get(space.degree);
        std::vector<double> vals(ref.dim());
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            const double jac = 2.0 * mesh.tri_area(t);
            for (size_t q = 0; q < rule.points.size(); ++q) {
                ref.values(rule.points[q], vals);
                const Vec2 fv = f(mesh.map_to_physical(t, rule.points[q]));
                const double w = rule.weights[q] * jac;
                for (int i = 0; i < ref.dim(); ++i) {
                    load[space.element_dof(t, 2 * i)] += w * fv.x * vals[i];
                    load[space.element_dof(t, 2 * i + 1)] += w * fv.y * vals[i];
                }
            }
        }
        return load;
    }
    throw WrongSpaceError("assemble_load: unsupported space");
}

std::vector<double> assemble_rhs_reconstructed(const SpaceDescriptor& relaxed_space,
                                               const SpaceDescriptor& mspace,
                                               const SpaceDescriptor& bdm_space,
                                               const VectorField& f, int quad_degree) {
    const std::vector<double> bdm_load = assemble_load(bdm_space, f, quad_degree);
    std::vector<double> rhs(relaxed_space.ndof + mspace.ndof, 0.0);
    for (const auto& t : reconstruction_matrix(bdm_space, relaxed_space))
        rhs[t.col] += t.value * bdm_load[t.row];
    return rhs;
}

} // namespace elast
