#pragma once

#include "elast/vec2.hpp"

#include <vector>

namespace elast {

// Quadrature on the reference triangle {x >= 0, y >= 0, x + y <= 1}.
// Weights are positive and sum to the reference measure 1/2.
struct TriangleRule {
    std::vector<Vec2> points;
    std::vector<double> weights;
    int exactness = 0;
};

// Quadrature on the reference edge [0, 1]; weights sum to 1.
struct EdgeRule {
    std::vector<double> points;
    std::vector<double> weights;
    int exactness = 0;
};

inline constexpr int kMaxQuadDegree = 20;

// Rules are cached internally; references stay valid for the program lifetime.
const TriangleRule& triangle_rule(int degree);
const EdgeRule& edge_rule(int degree);

// Gauss-Legendre nodes/weights on [0,1], exact through degree 2n-1.
void gauss_legendre(int n, std::vector<double>& points, std::vector<double>& weights);

} // namespace elast
