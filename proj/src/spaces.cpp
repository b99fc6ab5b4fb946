#include "elast/spaces.hpp"

#include "elast/errors.hpp"
#include "elast/quadrature.hpp"

#include <cmath>
#include <mutex>

namespace elast {

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

std::vector<unsigned char> boundary_vertex_flags(const Mesh& mesh) {
    std::vector<unsigned char> flag(mesh.num_vertices(), 0);
    for (const auto& f : mesh.facets) {
        if (f.boundary) {
            flag[f.a] = 1;
            flag[f.b] = 1;
        }
    }
    return flag;
}

} // namespace

int SpaceDescriptor::nfree() const {
    int n = 0;
    for (int i = 0; i < ndof; ++i)
        if (!constrained[i]) ++n;
    return n;
}

// ---------------------------------------------------------------------------
// Lagrange spaces
// ---------------------------------------------------------------------------

LagrangeRefBasis::LagrangeRefBasis(int degree) : degree_(degree) {
    const auto& tb = TriangleBasis::get(degree);
    for (int j = 0; j <= degree; ++j)
        for (int i = 0; i <= degree - j; ++i)
            nodes_.push_back({static_cast<double>(i) / degree, static_cast<double>(j) / degree});
    if (degree == 0) nodes_ = {{1.0 / 3.0, 1.0 / 3.0}};
    const int n = dim();
    DMat vander(n, n);
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) {
        tb.values(nodes_[i], vals);
        for (int m = 0; m < n; ++m) vander(i, m) = vals[m];
    }
    coeff_ = inverse(vander.transposed());
}

const LagrangeRefBasis& LagrangeRefBasis::get(int degree) {
    constexpr int kMax = 10;
    if (degree < 1 || degree > kMax)
        throw UnsupportedDegreeError("LagrangeRefBasis: degree " + std::to_string(degree));
    static std::mutex m;
    static const LagrangeRefBasis* cache[kMax + 1] = {};
    std::lock_guard<std::mutex> lock(m);
    if (!cache[degree]) cache[degree] = new LagrangeRefBasis(degree);
    return *cache[degree];
}

void LagrangeRefBasis::values(Vec2 ref, std::span<double> out) const {
    const auto& tb = TriangleBasis::get(degree_);
    const int n = dim();
    std::vector<double> v(n);
    tb.values(ref, v);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int m = 0; m < n; ++m) s += coeff_(i, m) * v[m];
        out[i] = s;
    }
}

void LagrangeRefBasis::gradients(Vec2 ref, std::span<Vec2> out) const {
    const auto& tb = TriangleBasis::get(degree_);
    const int n = dim();
    std::vector<Vec2> g(n);
    tb.gradients(ref, g);
    for (int i = 0; i < n; ++i) {
        Vec2 s{0.0, 0.0};
        for (int m = 0; m < n; ++m) s += coeff_(i, m) * g[m];
        out[i] = s;
    }
}

namespace {

// Classification of the reference lattice node (i,j), i+j <= k.
struct LatticeNode {
    enum Kind { Vertex, Edge, Interior } kind;
    int which;     // vertex id 0..2 / edge id 0..2 / interior counter
    int along;     // for edge nodes: step 1..k-1 from vertex `which`
};

std::vector<LatticeNode> classify_lattice(int k) {
    std::vector<LatticeNode> out;
    int interior = 0;
    for (int j = 0; j <= k; ++j) {
        for (int i = 0; i <= k - j; ++i) {
            LatticeNode n{};
            if (i == 0 && j == 0) {
                n = {LatticeNode::Vertex, 0, 0};
            } else if (i == k && j == 0) {
                n = {LatticeNode::Vertex, 1, 0};
            } else if (i == 0 && j == k) {
                n = {LatticeNode::Vertex, 2, 0};
            } else if (j == 0) {
                n = {LatticeNode::Edge, 0, i};
            } else if (i + j == k) {
                n = {LatticeNode::Edge, 1, j};
            } else if (i == 0) {
                n = {LatticeNode::Edge, 2, k - j};
            } else {
                n = {LatticeNode::Interior, interior++, 0};
            }
            out.push_back(n);
        }
    }
    return out;
}

} // namespace

SpaceDescriptor build_lagrange(const Mesh& mesh, int k, bool vector_valued, bool zero_bc) {
    if (k < 1) throw UnsupportedOrderError("build_lagrange: k must be >= 1");
    SpaceDescriptor sp;
    sp.mesh = &mesh;
    sp.kind = vector_valued ? SpaceKind::LagrangeVec : SpaceKind::LagrangeScalar;
    sp.degree = k;
    sp.zero_bc = zero_bc;

    const int nv = mesh.num_vertices();
    const int ne = mesh.num_facets();
    const int per_edge = k - 1;
    const int per_tri = (k - 1) * (k - 2) / 2;
    const int nscalar = nv + per_edge * ne + per_tri * mesh.num_triangles();
    const int comps = vector_valued ? 2 : 1;
    sp.ndof = comps * nscalar;

    const auto lattice = classify_lattice(k);
    const int nodes_per_elem = static_cast<int>(lattice.size());
    sp.dofs_per_element = comps * nodes_per_elem;
    sp.element_dofs.resize(static_cast<size_t>(mesh.num_triangles()) * sp.dofs_per_element);

    std::vector<unsigned char> node_on_boundary(nscalar, 0);
    const auto bvertex = boundary_vertex_flags(mesh);
    for (int v = 0; v < nv; ++v) node_on_boundary[v] = bvertex[v];

    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int ln = 0; ln < nodes_per_elem; ++ln) {
            const auto& node = lattice[ln];
            int scalar_id = -1;
            switch (node.kind) {
                case LatticeNode::Vertex:
                    scalar_id = tri[node.which];
                    break;
                case LatticeNode::Edge: {
                    const int f = mesh.tri_facets[t][node.which];
                    const Facet& facet = mesh.facets[f];
                    const int from = tri[node.which];
                    const int p = (from == facet.a) ? node.along - 1 : k - node.along - 1;
                    scalar_id = nv + f * per_edge + p;
                    if (facet.boundary) node_on_boundary[scalar_id] = 1;
                    break;
                }
                case LatticeNode::Interior:
                    scalar_id = nv + per_edge * ne + t * per_tri + node.which;
                    break;
            }
            for (int c = 0; c < comps; ++c)
                sp.element_dofs[static_cast<size_t>(t) * sp.dofs_per_element + comps * ln + c] =
                    comps * scalar_id + c;
        }
    }

    sp.constrained.assign(sp.ndof, 0);
    sp.prescribed.assign(sp.ndof, 0.0);
    if (zero_bc) {
        for (int s = 0; s < nscalar; ++s)
            if (node_on_boundary[s])
                for (int c = 0; c < comps; ++c) sp.constrained[comps * s + c] = 1;
    }
    return sp;
}

// ---------------------------------------------------------------------------
// BDM spaces
// ---------------------------------------------------------------------------

NedelecMomentBasis::NedelecMomentBasis(int k, Vec2 center, double scale)
    : k_(k), center_(center), scale_(scale) {
    const int nk2 = k >= 2 ? (k - 1) * k / 2 : 0;
    for (int total = 0; total <= k - 2; ++total)
        for (int a = total; a >= 0; --a) expo_.emplace_back(a, total - a);
    dim_ = 2 * nk2 + (k >= 2 ? k - 1 : 0);
}

Vec2 NedelecMomentBasis::value(int m, Vec2 phys) const {
    const Vec2 p = (phys - center_) * (1.0 / scale_);
    const int nk2 = static_cast<int>(expo_.size());
    if (m < 2 * nk2) {
        const auto [a, b] = expo_[m / 2];
        const double v = std::pow(p.x, a) * std::pow(p.y, b);
        return (m % 2 == 0) ? Vec2{v, 0.0} : Vec2{0.0, v};
    }
    // Rotational part: homogeneous degree k-2 monomials times (-y, x).
    const int idx = m - 2 * nk2; // x^(k-2-idx) y^idx
    const double v = std::pow(p.x, k_ - 2 - idx) * std::pow(p.y, idx);
    return Vec2{-p.y * v, p.x * v};
}

BdmElementBasis::BdmElementBasis(const Mesh& mesh, int t, int k)
    : mesh_(&mesh), t_(t), k_(k), dim_((k + 1) * (k + 2)) {
    jinv_t_ = inverse_transpose(mesh.tri_jacobian(t));
    const auto& tb = TriangleBasis::get(k);
    const int nscalar = tb.dim();
    DMat moments(dim_, dim_);

    // Facet-normal Legendre moments in the unit facet parametrization (the
    // 1/h_F normalization keeps the dual shapes O(1) on fine meshes).
    const EdgeRule& erule = edge_rule(2 * k + 2);
    std::vector<double> phi(nscalar), leg(k + 1);
    for (int e = 0; e < 3; ++e) {
        const Facet& f = mesh.facets[mesh.tri_facets[t][e]];
        const Vec2 pa = mesh.vertices[f.a], pb = mesh.vertices[f.b];
        for (size_t q = 0; q < erule.points.size(); ++q) {
            const double s = erule.points[q];
            const Vec2 x = pa + (pb - pa) * s;
            const Vec2 ref = mesh.map_to_reference(t, x);
            tb.values(ref, phi);
            edge_legendre_all(k + 1, s, leg);
            const double w = erule.weights[q];
            for (int j = 0; j <= k; ++j) {
                const double wq = w * leg[j];
                for (int m = 0; m < nscalar; ++m) {
                    moments(e * (k + 1) + j, 2 * m + 0) += wq * phi[m] * f.normal.x;
                    moments(e * (k + 1) + j, 2 * m + 1) += wq * phi[m] * f.normal.y;
                }
            }
        }
    }

    // Interior moments against the Nedelec space, normalized by the element
    // measure (element-mean moments).
    if (k >= 2) {
        NedelecMomentBasis ned(k, mesh.tri_centroid(t), std::sqrt(2.0 * mesh.tri_area(t)));
        const TriangleRule& trule = triangle_rule(2 * k);
        for (size_t q = 0; q < trule.points.size(); ++q) {
            const Vec2 ref = trule.points[q];
            const Vec2 phys = mesh.map_to_physical(t, ref);
            tb.values(ref, phi);
            const double w = trule.weights[q];
            for (int m = 0; m < ned.dim(); ++m) {
                const Vec2 nm = ned.value(m, phys);
                for (int s = 0; s < nscalar; ++s) {
                    moments(3 * (k + 1) + m, 2 * s + 0) += w * phi[s] * nm.x;
                    moments(3 * (k + 1) + m, 2 * s + 1) += w * phi[s] * nm.y;
                }
            }
        }
    }

    coeff_ = inverse(moments);
}

Vec2 BdmElementBasis::value(int i, Vec2 ref) const {
    const auto& tb = TriangleBasis::get(k_);
    const int nscalar = tb.dim();
    std::vector<double> phi(nscalar);
    tb.values(ref, phi);
    Vec2 out{0.0, 0.0};
    for (int m = 0; m < nscalar; ++m) {
        out.x += coeff_(2 * m + 0, i) * phi[m];
        out.y += coeff_(2 * m + 1, i) * phi[m];
    }
    return out;
}

Mat2 BdmElementBasis::gradient(int i, Vec2 ref) const {
    const auto& tb = TriangleBasis::get(k_);
    const int nscalar = tb.dim();
    std::vector<Vec2> g(nscalar);
    tb.gradients(ref, g);
    Mat2 out;
    for (int m = 0; m < nscalar; ++m) {
        const Vec2 gp = mul(jinv_t_, g[m]); // physical gradient of scalar basis m
        out(0, 0) += coeff_(2 * m + 0, i) * gp.x;
        out(0, 1) += coeff_(2 * m + 0, i) * gp.y;
        out(1, 0) += coeff_(2 * m + 1, i) * gp.x;
        out(1, 1) += coeff_(2 * m + 1, i) * gp.y;
    }
    return out;
}

double BdmElementBasis::divergence(int i, Vec2 ref) const { return trace(gradient(i, ref)); }

void BdmElementBasis::values(Vec2 ref, std::span<Vec2> out) const {
    const auto& tb = TriangleBasis::get(k_);
    const int nscalar = tb.dim();
    std::vector<double> phi(nscalar);
    tb.values(ref, phi);
    for (int i = 0; i < dim_; ++i) {
        Vec2 v{0.0, 0.0};
        for (int m = 0; m < nscalar; ++m) {
            v.x += coeff_(2 * m + 0, i) * phi[m];
            v.y += coeff_(2 * m + 1, i) * phi[m];
        }
        out[i] = v;
    }
}

void BdmElementBasis::gradients(Vec2 ref, std::span<Mat2> out) const {
    const auto& tb = TriangleBasis::get(k_);
    const int nscalar = tb.dim();
    std::vector<Vec2> g(nscalar);
    tb.gradients(ref, g);
    for (int i = 0; i < dim_; ++i) {
        Mat2 m2;
        for (int m = 0; m < nscalar; ++m) {
            const Vec2 gp = mul(jinv_t_, g[m]);
            m2(0, 0) += coeff_(2 * m + 0, i) * gp.x;
            m2(0, 1) += coeff_(2 * m + 0, i) * gp.y;
            m2(1, 0) += coeff_(2 * m + 1, i) * gp.x;
            m2(1, 1) += coeff_(2 * m + 1, i) * gp.y;
        }
        out[i] = m2;
    }
}

namespace {

SpaceDescriptor build_bdm_impl(const Mesh& mesh, int k, bool zero_bc, bool relaxed) {
    if (k < 1) throw UnsupportedOrderError("build_bdm: k must be >= 1");
    if (relaxed && k < 2) throw UnsupportedOrderError("build_bdm_relaxed: k must be >= 2");
    SpaceDescriptor sp;
    sp.mesh = &mesh;
    sp.kind = relaxed ? SpaceKind::BdmRelaxed : SpaceKind::Bdm;
    sp.degree = k;
    sp.zero_bc = zero_bc;

    const int ne = mesh.num_facets();
    const int nt = mesh.num_triangles();
    const int interior_per_tri = k * k - 1;

    int next = 0;
    if (!relaxed) {
        sp.facet_dofs.resize(static_cast<size_t>(ne) * (k + 1));
        for (int f = 0; f < ne; ++f)
            for (int j = 0; j <= k; ++j) sp.facet_dofs[f * (k + 1) + j] = next++;
    } else {
        sp.facet_dofs.resize(static_cast<size_t>(ne) * k);
        for (int f = 0; f < ne; ++f)
            for (int j = 0; j < k; ++j) sp.facet_dofs[f * k + j] = next++;
        sp.top_dofs.assign(static_cast<size_t>(2) * ne, -1);
        for (int f = 0; f < ne; ++f) {
            sp.top_dofs[2 * f] = next++;
            if (!mesh.facets[f].boundary) sp.top_dofs[2 * f + 1] = next++;
        }
    }
    const int interior_base = next;
    next += interior_per_tri * nt;
    sp.ndof = next;

    sp.dofs_per_element = 3 * (k + 1) + interior_per_tri;
    sp.element_dofs.resize(static_cast<size_t>(nt) * sp.dofs_per_element);
    for (int t = 0; t < nt; ++t) {
        int* dofs = &sp.element_dofs[static_cast<size_t>(t) * sp.dofs_per_element];
        for (int e = 0; e < 3; ++e) {
            const int f = mesh.tri_facets[t][e];
            const int side = (mesh.facets[f].tri[0] == t) ? 0 : 1;
            for (int j = 0; j <= k; ++j) {
                int gdof;
                if (!relaxed) {
                    gdof = sp.facet_dofs[f * (k + 1) + j];
                } else if (j < k) {
                    gdof = sp.facet_dofs[f * k + j];
                } else {
                    gdof = sp.top_dofs[2 * f + side];
                }
                dofs[e * (k + 1) + j] = gdof;
            }
        }
        for (int m = 0; m < interior_per_tri; ++m)
            dofs[3 * (k + 1) + m] = interior_base + t * interior_per_tri + m;
    }

    sp.constrained.assign(sp.ndof, 0);
    sp.prescribed.assign(sp.ndof, 0.0);
    if (zero_bc) {
        for (int f = 0; f < ne; ++f) {
            if (!mesh.facets[f].boundary) continue;
            if (!relaxed) {
                for (int j = 0; j <= k; ++j) sp.constrained[sp.facet_dofs[f * (k + 1) + j]] = 1;
            } else {
                for (int j = 0; j < k; ++j) sp.constrained[sp.facet_dofs[f * k + j]] = 1;
                sp.constrained[sp.top_dofs[2 * f]] = 1;
            }
        }
    }
    return sp;
}

} // namespace

SpaceDescriptor build_bdm(const Mesh& mesh, int k, bool zero_bc) {
    return build_bdm_impl(mesh, k, zero_bc, false);
}

SpaceDescriptor build_bdm_relaxed(const Mesh& mesh, int k, bool zero_bc) {
    return build_bdm_impl(mesh, k, zero_bc, true);
}

SpaceDescriptor build_facet_tangential(const Mesh& mesh, int k) {
    if (k < 1) throw UnsupportedOrderError("build_facet_tangential: k must be >= 1");
    SpaceDescriptor sp;
    sp.mesh = &mesh;
    sp.kind = SpaceKind::FacetTangential;
    sp.degree = k;
    sp.zero_bc = true;
    const int ne = mesh.num_facets();
    sp.ndof = ne * k;
    sp.facet_dofs.resize(sp.ndof);
    for (int i = 0; i < sp.ndof; ++i) sp.facet_dofs[i] = i;
    sp.constrained.assign(sp.ndof, 0);
    sp.prescribed.assign(sp.ndof, 0.0);
    for (int f = 0; f < ne; ++f)
        if (mesh.facets[f].boundary)
            for (int j = 0; j < k; ++j) sp.constrained[f * k + j] = 1;
    return sp;
}

SpaceDescriptor build_broken_scalar(const Mesh& mesh, int degree) {
    if (degree < 0) throw UnsupportedOrderError("build_broken_scalar: degree must be >= 0");
    SpaceDescriptor sp;
    sp.mesh = &mesh;
    sp.kind = SpaceKind::BrokenScalar;
    sp.degree = degree;
    const int dim = scalar_basis_dim(degree);
    sp.dofs_per_element = dim;
    sp.ndof = dim * mesh.num_triangles();
    sp.element_dofs.resize(sp.ndof);
    for (int i = 0; i < sp.ndof; ++i) sp.element_dofs[i] = i;
    sp.constrained.assign(sp.ndof, 0);
    sp.prescribed.assign(sp.ndof, 0.0);
    return sp;
}

// ---------------------------------------------------------------------------
// Dirichlet data
// ---------------------------------------------------------------------------

void set_dirichlet(SpaceDescriptor& space, const VectorField& g) {
    const Mesh& mesh = *space.mesh;
    const int k = space.degree;
    switch (space.kind) {
        case SpaceKind::LagrangeVec: {
            // Nodal interpolation at boundary nodes; walk elements and set
            // every constrained dof from its node position.
            const auto& ref = LagrangeRefBasis::get(k);
            for (int t = 0; t < mesh.num_triangles(); ++t) {
                for (int ln = 0; ln < ref.dim(); ++ln) {
                    const int dx = space.element_dof(t, 2 * ln);
                    const int dy = space.element_dof(t, 2 * ln + 1);
                    if (!space.constrained[dx] && !space.constrained[dy]) continue;
                    const Vec2 x = mesh.map_to_physical(t, ref.nodes()[ln]);
                    const Vec2 v = g(x);
                    if (space.constrained[dx]) space.prescribed[dx] = v.x;
                    if (space.constrained[dy]) space.prescribed[dy] = v.y;
                }
            }
            break;
        }
        case SpaceKind::Bdm:
        case SpaceKind::BdmRelaxed: {
            const EdgeRule& rule = edge_rule(14);
            std::vector<double> leg(k + 1);
            for (int f = 0; f < mesh.num_facets(); ++f) {
                const Facet& facet = mesh.facets[f];
                if (!facet.boundary) continue;
                const Vec2 pa = mesh.vertices[facet.a], pb = mesh.vertices[facet.b];
                std::vector<double> mom(k + 1, 0.0);
                for (size_t q = 0; q < rule.points.size(); ++q) {
                    const double s = rule.points[q];
                    const Vec2 x = pa + (pb - pa) * s;
                    edge_legendre_all(k + 1, s, leg);
                    const double gn = dot(g(x), facet.normal) * rule.weights[q];
                    for (int j = 0; j <= k; ++j) mom[j] += gn * leg[j];
                }
                for (int j = 0; j <= k; ++j) {
                    int dof;
                    if (space.kind == SpaceKind::Bdm) {
                        dof = space.facet_dofs[f * (k + 1) + j];
                    } else {
                        dof = (j < k) ? space.facet_dofs[f * k + j] : space.top_dofs[2 * f];
                    }
                    if (space.constrained[dof]) space.prescribed[dof] = mom[j];
                }
            }
            break;
        }
        case SpaceKind::FacetTangential: {
            const EdgeRule& rule = edge_rule(14);
            std::vector<double> leg(k);
            for (int f = 0; f < mesh.num_facets(); ++f) {
                const Facet& facet = mesh.facets[f];
                if (!facet.boundary) continue;
                const Vec2 pa = mesh.vertices[facet.a], pb = mesh.vertices[facet.b];
                const Vec2 tangent = (pb - pa) * (1.0 / facet.length);
                for (size_t q = 0; q < rule.points.size(); ++q) {
                    const double s = rule.points[q];
                    const Vec2 x = pa + (pb - pa) * s;
                    edge_legendre_all(k, s, leg);
                    const double gt = dot(g(x), tangent) * rule.weights[q];
                    for (int j = 0; j < k; ++j) space.prescribed[f * k + j] += gt * leg[j];
                }
            }
            break;
        }
        default:
            throw WrongSpaceError("set_dirichlet: unsupported space kind");
    }
}

// ---------------------------------------------------------------------------
// Field evaluation
// ---------------------------------------------------------------------------

ElementField::ElementField(const FieldFunction& u, int t) : u_(&u), t_(t) {
    const SpaceDescriptor& sp = *u.space;
    const Mesh& mesh = *sp.mesh;
    switch (sp.kind) {
        case SpaceKind::LagrangeScalar:
        case SpaceKind::LagrangeVec:
            lag_ = &LagrangeRefBasis::get(sp.degree);
            jinv_t_ = inverse_transpose(mesh.tri_jacobian(t));
            break;
        case SpaceKind::Bdm:
        case SpaceKind::BdmRelaxed:
            bdm_ = std::make_unique<BdmElementBasis>(mesh, t, sp.degree);
            break;
        case SpaceKind::BrokenScalar:
            broken_ = &TriangleBasis::get(sp.degree);
            broken_scale_ = 1.0 / std::sqrt(2.0 * mesh.tri_area(t));
            break;
        default:
            throw WrongSpaceError("ElementField: space has no element support");
    }
    local_coeffs_.resize(sp.dofs_per_element);
    for (int i = 0; i < sp.dofs_per_element; ++i) local_coeffs_[i] = u.coeffs[sp.element_dof(t, i)];
}

Vec2 ElementField::value(Vec2 ref) const {
    const SpaceDescriptor& sp = *u_->space;
    if (lag_) {
        if (sp.kind != SpaceKind::LagrangeVec)
            throw WrongSpaceError("ElementField::value: scalar space");
        std::vector<double> v(lag_->dim());
        lag_->values(ref, v);
        Vec2 out{0.0, 0.0};
        for (int i = 0; i < lag_->dim(); ++i) {
            out.x += local_coeffs_[2 * i] * v[i];
            out.y += local_coeffs_[2 * i + 1] * v[i];
        }
        return out;
    }
    if (bdm_) {
        std::vector<Vec2> v(bdm_->dim());
        bdm_->values(ref, v);
        Vec2 out{0.0, 0.0};
        for (int i = 0; i < bdm_->dim(); ++i) out += local_coeffs_[i] * v[i];
        return out;
    }
    throw WrongSpaceError("ElementField::value: not vector-valued");
}

Mat2 ElementField::gradient(Vec2 ref) const {
    const SpaceDescriptor& sp = *u_->space;
    if (lag_) {
        if (sp.kind != SpaceKind::LagrangeVec)
            throw WrongSpaceError("ElementField::gradient: scalar space");
        std::vector<Vec2> g(lag_->dim());
        lag_->gradients(ref, g);
        Mat2 out;
        for (int i = 0; i < lag_->dim(); ++i) {
            const Vec2 gp = mul(jinv_t_, g[i]);
            out(0, 0) += local_coeffs_[2 * i] * gp.x;
            out(0, 1) += local_coeffs_[2 * i] * gp.y;
            out(1, 0) += local_coeffs_[2 * i + 1] * gp.x;
            out(1, 1) += local_coeffs_[2 * i + 1] * gp.y;
        }
        return out;
    }
    if (bdm_) {
        std::vector<Mat2> g(bdm_->dim());
        bdm_->gradients(ref, g);
        Mat2 out;
        for (int i = 0; i < bdm_->dim(); ++i) out += g[i] * local_coeffs_[i];
        return out;
    }
    throw WrongSpaceError("ElementField::gradient: not vector-valued");
}

double ElementField::scalar_value(Vec2 ref) const {
    const SpaceDescriptor& sp = *u_->space;
    if (lag_ && sp.kind == SpaceKind::LagrangeScalar) {
        std::vector<double> v(lag_->dim());
        lag_->values(ref, v);
        double out = 0.0;
        for (int i = 0; i < lag_->dim(); ++i) out += local_coeffs_[i] * v[i];
        return out;
    }
    if (broken_) {
        std::vector<double> v(broken_->dim());
        broken_->values(ref, v);
        double out = 0.0;
        for (int i = 0; i < broken_->dim(); ++i) out += local_coeffs_[i] * v[i];
        return out * broken_scale_;
    }
    throw WrongSpaceError("ElementField::scalar_value: not scalar-valued");
}

Vec2 FieldFunction::value(int t, Vec2 ref) const { return ElementField(*this, t).value(ref); }
Mat2 FieldFunction::gradient(int t, Vec2 ref) const { return ElementField(*this, t).gradient(ref); }
double FieldFunction::divergence(int t, Vec2 ref) const { return trace(gradient(t, ref)); }
double FieldFunction::scalar_value(int t, Vec2 ref) const { return ElementField(*this, t).scalar_value(ref); }

Vec2 FieldFunction::facet_value(int f, double s) const {
    const SpaceDescriptor& sp = *space;
    if (sp.kind != SpaceKind::FacetTangential)
        throw WrongSpaceError("facet_value: not a facet space");
    const Mesh& mesh = *sp.mesh;
    const Facet& facet = mesh.facets[f];
    const Vec2 tangent = (mesh.vertices[facet.b] - mesh.vertices[facet.a]) * (1.0 / facet.length);
    const int k = sp.degree;
    std::vector<double> leg(k);
    edge_legendre_all(k, s, leg);
    double c = 0.0;
    for (int j = 0; j < k; ++j) c += coeffs[sp.facet_dofs[f * k + j]] * leg[j];
    return tangent * c;
}

} // namespace elast
