#pragma once

#include "elast/vec2.hpp"

#include <memory>
#include <string>

namespace elast {

// Tiny arithmetic expressions over x and y: +, -, *, /, ^ (constant
// exponents for differentiation), sin, cos, pi, numeric literals.
// Parse errors raise ConfigError.
class Expression {
public:
    static Expression parse(const std::string& text);

    double eval(Vec2 p) const;
    Expression derivative(char var) const; // var in {'x','y'}
    Vec2 gradient(Vec2 p) const;
    std::string to_string() const;

    Expression(Expression&&) noexcept;
    Expression& operator=(Expression&&) noexcept;
    Expression(const Expression&);
    Expression& operator=(const Expression&);
    ~Expression();

    struct Node; // implementation detail, defined in the .cpp

private:
    explicit Expression(std::shared_ptr<const Node> root);
    std::shared_ptr<const Node> root_;
};

} // namespace elast
