#pragma once

#include "elast/analysis.hpp"
#include "elast/expression.hpp"

#include <optional>
#include <string>

namespace elast {

// One benchmark configuration: forcing, Dirichlet data and, when available,
// the exact solution fields.
struct Problem {
    std::string name;
    VectorField forcing;
    VectorField boundary;
    ExactSolution exact = zero_exact();
    bool has_exact = false;
};

// u = (sin(pi x) sin(pi y), cos(pi x) cos(pi y)), divergence-free,
// f = 2 mu pi^2 u, nonhomogeneous Dirichlet data.
Problem problem_sinsin(double mu);

// Gradient forcing f = grad(x^6 + y^6), homogeneous Dirichlet data; the exact
// displacement tends to zero as lambda grows, solution norms are reported
// against the zero field.
Problem problem_gradient_x6y6();

// u = (x^2 y, -x y^2), divergence-free cubic, f = (-2 mu y, 2 mu x).
// Reproduced exactly by the HDG schemes for k >= 3.
Problem problem_poly(double mu);

// u = (y^2, x^2), divergence-free quadratic, f = (-2 mu, -2 mu);
// reproduced exactly already at k = 2.
Problem problem_poly_quadratic(double mu);

// Thermoelastic forcing f = -(2 mu + 3 lambda) alpha_th grad(theta) with
// homogeneous Dirichlet data; no closed-form displacement.
Problem problem_thermo(const Expression& theta, double alpha_th, double mu, double lambda);

// Lookup by CLI name (ex1, ex2, manufactured-poly, thermo). Thermo requires
// theta; others ignore it.
Problem make_problem(const std::string& name, double mu, double lambda,
                     const std::optional<Expression>& theta, double alpha_th);

} // namespace elast
