#pragma once

#include "elast/dense.hpp"
#include "elast/vec2.hpp"

#include <span>
#include <utility>
#include <vector>

namespace elast {

// Exact integral of x^a y^b over the reference triangle: a! b! / (a+b+2)!.
double triangle_monomial_integral(int a, int b);

inline constexpr int scalar_basis_dim(int degree) { return (degree + 1) * (degree + 2) / 2; }

// L2-orthonormal polynomial basis on the reference triangle, built by
// Gram-Schmidt on graded monomials with exact moments.
class TriangleBasis {
public:
    explicit TriangleBasis(int degree);

    int degree() const { return degree_; }
    int dim() const { return dim_; }

    void values(Vec2 p, std::span<double> out) const;
    void gradients(Vec2 p, std::span<Vec2> out) const;

    // Cached instances per degree (immutable after construction).
    static const TriangleBasis& get(int degree);

private:
    int degree_;
    int dim_;
    std::vector<std::pair<int, int>> expo_;
    DMat coeff_; // row i = expansion of basis function i over monomials
};

// Orthonormal shifted Legendre polynomials on [0,1]:
// p_n(s) = sqrt(2n+1) P_n(2s-1), so that int_0^1 p_m p_n ds = delta_mn.
double edge_legendre(int n, double s);
void edge_legendre_all(int count, double s, std::span<double> out);

} // namespace elast
