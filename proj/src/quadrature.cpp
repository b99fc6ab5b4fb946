#include "elast/quadrature.hpp"

#include "elast/errors.hpp"

#include <cmath>
#include <mutex>

namespace elast {

void gauss_legendre(int n, std::vector<double>& points, std::vector<double>& weights) {
    points.resize(n);
    weights.resize(n);
    // Nodes on [-1,1] by Newton iteration from the Chebyshev guess, then mapped to [0,1].
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            if (n == 1) p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            const double pn = (n == 1) ? x : p1;
            const double pm = (n == 1) ? 1.0 : p0;
            pp = n * (x * pn - pm) / (x * x - 1.0);
            const double dx = pn / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        points[n - 1 - i] = 0.5 * (1.0 + x);
        weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * pp * pp);
    }
}

namespace {

TriangleRule make_triangle_rule(int degree) {
    TriangleRule rule;
    rule.exactness = degree;
    if (degree <= 1) {
        rule.points = {{1.0 / 3.0, 1.0 / 3.0}};
        rule.weights = {0.5};
        return rule;
    }
    // Conical product: x = xi (1 - eta), y = eta with Jacobian (1 - eta).
    // The eta direction carries one extra polynomial degree from the Jacobian.
    const int m_xi = (degree + 2) / 2;
    const int m_eta = (degree + 3) / 2;
    std::vector<double> px, wx, pe, we;
    gauss_legendre(m_xi, px, wx);
    gauss_legendre(m_eta, pe, we);
    for (int j = 0; j < m_eta; ++j) {
        for (int i = 0; i < m_xi; ++i) {
            const double eta = pe[j];
            rule.points.push_back({px[i] * (1.0 - eta), eta});
            rule.weights.push_back(wx[i] * we[j] * (1.0 - eta));
        }
    }
    return rule;
}

EdgeRule make_edge_rule(int degree) {
    EdgeRule rule;
    rule.exactness = degree;
    const int n = (degree + 2) / 2;
    gauss_legendre(n, rule.points, rule.weights);
    return rule;
}

std::mutex cache_mutex;

} // namespace

const TriangleRule& triangle_rule(int degree) {
    if (degree < 1 || degree > kMaxQuadDegree)
        throw UnsupportedDegreeError("triangle_rule: degree " + std::to_string(degree) +
                                     " outside supported range [1," + std::to_string(kMaxQuadDegree) + "]");
    static TriangleRule cache[kMaxQuadDegree + 1];
    static bool built[kMaxQuadDegree + 1] = {};
    std::lock_guard<std::mutex> lock(cache_mutex);
    if (!built[degree]) {
        cache[degree] = make_triangle_rule(degree);
        built[degree] = true;
    }
    return cache[degree];
}

const EdgeRule& edge_rule(int degree) {
    if (degree < 1 || degree > kMaxQuadDegree)
        throw UnsupportedDegreeError("edge_rule: degree " + std::to_string(degree) +
                                     " outside supported range [1," + std::to_string(kMaxQuadDegree) + "]");
    static EdgeRule cache[kMaxQuadDegree + 1];
    static bool built[kMaxQuadDegree + 1] = {};
    std::lock_guard<std::mutex> lock(cache_mutex);
    if (!built[degree]) {
        cache[degree] = make_edge_rule(degree);
        built[degree] = true;
    }
    return cache[degree];
}

} // namespace elast
