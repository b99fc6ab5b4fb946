#pragma once

#include "elast/schemes.hpp"

namespace elast {

// Analytic reference fields for error evaluation.
struct ExactSolution {
    VectorField value;
    std::function<Mat2(Vec2)> gradient;
    ScalarField divergence;
};

ExactSolution zero_exact();

// Error norms (quadrature degree 14) plus the discrete solution norms.
// energy_err is ||u - u_h||_{mu,h}; for HDG solutions the projected
// tangential-jump terms use the exact trace in place of u. Schemes without a
// facet field fall back to the jump-free volume norm.
struct ErrorReport {
    double l2_err = 0.0;
    double h1semi_err = 0.0; // broken full-gradient seminorm
    double div_err = 0.0;
    double energy_err = 0.0;
    double sol_norm_1h = 0.0; // ||u_h||_{1,h}
    double grad_norm = 0.0;   // ||grad_h u_T||
};

ErrorReport compute_errors(const DiscreteSolution& sol, const ExactSolution& exact, double mu,
                           int quad_degree = 14);

// Per-step rates log2(e_L / e_{L+1}) under mesh halving.
// Throws DegenerateErrorValue on zero or non-finite errors.
std::vector<double> eoc_table(const std::vector<double>& errors);

// Least-squares convergence rate over all levels (slope of log2 e vs level).
double fitted_rate(const std::vector<double>& errors);

// Fit of log(norm) against log(lambda): slope -1 signals the gradient-robust
// decay, slope ~0 a plateau. plateau = norm at the largest lambda.
struct RobustnessReport {
    double slope = 0.0;
    double plateau = 0.0;
};
RobustnessReport robustness_metrics(const std::vector<double>& lambdas,
                                    const std::vector<double>& norms);

} // namespace elast
