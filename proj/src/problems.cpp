#include "elast/problems.hpp"

#include "elast/errors.hpp"

#include <cmath>

namespace elast {

Problem problem_sinsin(double mu) {
    Problem p;
    p.name = "ex1";
    const double pi = M_PI;
    auto u = [pi](Vec2 x) {
        return Vec2{std::sin(pi * x.x) * std::sin(pi * x.y), std::cos(pi * x.x) * std::cos(pi * x.y)};
    };
    p.forcing = [mu, pi, u](Vec2 x) { return 2.0 * mu * pi * pi * u(x); };
    p.boundary = u;
    p.exact.value = u;
    p.exact.gradient = [pi](Vec2 x) {
        Mat2 g;
        g(0, 0) = pi * std::cos(pi * x.x) * std::sin(pi * x.y);
        g(0, 1) = pi * std::sin(pi * x.x) * std::cos(pi * x.y);
        g(1, 0) = -pi * std::sin(pi * x.x) * std::cos(pi * x.y);
        g(1, 1) = -pi * std::cos(pi * x.x) * std::sin(pi * x.y);
        return g;
    };
    p.exact.divergence = [](Vec2) { return 0.0; };
    p.has_exact = true;
    return p;
}

Problem problem_gradient_x6y6() {
    Problem p;
    p.name = "ex2";
    p.forcing = [](Vec2 x) { return Vec2{6.0 * std::pow(x.x, 5), 6.0 * std::pow(x.y, 5)}; };
    p.boundary = [](Vec2) { return Vec2{0.0, 0.0}; };
    p.has_exact = false;
    return p;
}

Problem problem_poly(double mu) {
    Problem p;
    p.name = "manufactured-poly";
    auto u = [](Vec2 x) { return Vec2{x.x * x.x * x.y, -x.x * x.y * x.y}; };
    p.forcing = [mu](Vec2 x) { return Vec2{-2.0 * mu * x.y, 2.0 * mu * x.x}; };
    p.boundary = u;
    p.exact.value = u;
    p.exact.gradient = [](Vec2 x) {
        Mat2 g;
        g(0, 0) = 2.0 * x.x * x.y;
        g(0, 1) = x.x * x.x;
        g(1, 0) = -x.y * x.y;
        g(1, 1) = -2.0 * x.x * x.y;
        return g;
    };
    p.exact.divergence = [](Vec2) { return 0.0; };
    p.has_exact = true;
    return p;
}

Problem problem_poly_quadratic(double mu) {
    Problem p;
    p.name = "manufactured-poly2";
    auto u = [](Vec2 x) { return Vec2{x.y * x.y, x.x * x.x}; };
    p.forcing = [mu](Vec2) { return Vec2{-2.0 * mu, -2.0 * mu}; };
    p.boundary = u;
    p.exact.value = u;
    p.exact.gradient = [](Vec2 x) {
        Mat2 g;
        g(0, 1) = 2.0 * x.y;
        g(1, 0) = 2.0 * x.x;
        return g;
    };
    p.exact.divergence = [](Vec2) { return 0.0; };
    p.has_exact = true;
    return p;
}

Problem problem_thermo(const Expression& theta, double alpha_th, double mu, double lambda) {
    Problem p;
    p.name = "thermo";
    const double coeff = -(2.0 * mu + 3.0 * lambda) * alpha_th;
    const Expression dx = theta.derivative('x');
    const Expression dy = theta.derivative('y');
    p.forcing = [coeff, dx, dy](Vec2 x) { return Vec2{coeff * dx.eval(x), coeff * dy.eval(x)}; };
    p.boundary = [](Vec2) { return Vec2{0.0, 0.0}; };
    p.has_exact = false;
    return p;
}

Problem make_problem(const std::string& name, double mu, double lambda,
                     const std::optional<Expression>& theta, double alpha_th) {
    if (name == "ex1") return problem_sinsin(mu);
    if (name == "ex2") return problem_gradient_x6y6();
    if (name == "manufactured-poly") return problem_poly(mu);
    if (name == "thermo") {
        if (!theta) throw ConfigError("thermo example needs --theta <expression>");
        return problem_thermo(*theta, alpha_th, mu, lambda);
    }
    throw ConfigError("unknown example '" + name + "' (ex1, ex2, manufactured-poly, thermo)");
}

} // namespace elast
