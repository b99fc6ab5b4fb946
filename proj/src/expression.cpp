#include "elast/expression.hpp"

#include "elast/errors.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace elast {

struct Expression::Node {
    enum Kind { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos } kind;
    double value = 0.0; // Const
    char var = 'x';     // Var
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

NodePtr make_const(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Const;
    n->value = v;
    return n;
}

NodePtr make_var(char c) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Var;
    n->var = c;
    return n;
}

NodePtr make_node(Node::Kind kind, NodePtr a, NodePtr b = nullptr) {
    // Light constant folding keeps derivatives compact.
    if (a && a->kind == Node::Const && (!b || b->kind == Node::Const)) {
        const double av = a->value, bv = b ? b->value : 0.0;
        switch (kind) {
            case Node::Add: return make_const(av + bv);
            case Node::Sub: return make_const(av - bv);
            case Node::Mul: return make_const(av * bv);
            case Node::Div: return make_const(av / bv);
            case Node::Pow: return make_const(std::pow(av, bv));
            case Node::Neg: return make_const(-av);
            case Node::Sin: return make_const(std::sin(av));
            case Node::Cos: return make_const(std::cos(av));
            default: break;
        }
    }
    if (kind == Node::Mul && ((a->kind == Node::Const && a->value == 0.0) ||
                              (b && b->kind == Node::Const && b->value == 0.0)))
        return make_const(0.0);
    if (kind == Node::Mul && a->kind == Node::Const && a->value == 1.0) return b;
    if (kind == Node::Mul && b && b->kind == Node::Const && b->value == 1.0) return a;
    if (kind == Node::Add && a->kind == Node::Const && a->value == 0.0) return b;
    if (kind == Node::Add && b && b->kind == Node::Const && b->value == 0.0) return a;
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    NodePtr parse() {
        NodePtr e = expression();
        skip_ws();
        if (pos_ != text_.size())
            throw ConfigError("expression: trailing input at position " + std::to_string(pos_));
        return e;
    }

private:
    const std::string& text_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr expression() {
        NodePtr e = term();
        while (true) {
            if (consume('+')) e = make_node(Node::Add, e, term());
            else if (consume('-')) e = make_node(Node::Sub, e, term());
            else return e;
        }
    }

    NodePtr term() {
        NodePtr e = unary();
        while (true) {
            if (consume('*')) e = make_node(Node::Mul, e, unary());
            else if (consume('/')) e = make_node(Node::Div, e, unary());
            else return e;
        }
    }

    NodePtr unary() {
        if (consume('-')) return make_node(Node::Neg, unary());
        if (consume('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (consume('^')) return make_node(Node::Pow, base, unary()); // right associative
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw ConfigError("expression: unexpected end of input");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t used = 0;
            const double v = std::stod(text_.substr(pos_), &used);
            pos_ += used;
            return make_const(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t end = pos_;
            while (end < text_.size() && std::isalnum(static_cast<unsigned char>(text_[end]))) ++end;
            const std::string name = text_.substr(pos_, end - pos_);
            pos_ = end;
            if (name == "x") return make_var('x');
            if (name == "y") return make_var('y');
            if (name == "pi") return make_const(M_PI);
            if (name == "sin" || name == "cos") {
                if (!consume('(')) throw ConfigError("expression: expected '(' after " + name);
                NodePtr arg = expression();
                if (!consume(')')) throw ConfigError("expression: expected ')'");
                return make_node(name == "sin" ? Node::Sin : Node::Cos, arg);
            }
            throw ConfigError("expression: unknown identifier '" + name + "'");
        }
        if (consume('(')) {
            NodePtr e = expression();
            if (!consume(')')) throw ConfigError("expression: expected ')'");
            return e;
        }
        throw ConfigError(std::string("expression: unexpected character '") + c + "'");
    }
};

double eval_node(const Node* n, Vec2 p) {
    switch (n->kind) {
        case Node::Const: return n->value;
        case Node::Var: return n->var == 'x' ? p.x : p.y;
        case Node::Add: return eval_node(n->a.get(), p) + eval_node(n->b.get(), p);
        case Node::Sub: return eval_node(n->a.get(), p) - eval_node(n->b.get(), p);
        case Node::Mul: return eval_node(n->a.get(), p) * eval_node(n->b.get(), p);
        case Node::Div: return eval_node(n->a.get(), p) / eval_node(n->b.get(), p);
        case Node::Pow: return std::pow(eval_node(n->a.get(), p), eval_node(n->b.get(), p));
        case Node::Neg: return -eval_node(n->a.get(), p);
        case Node::Sin: return std::sin(eval_node(n->a.get(), p));
        case Node::Cos: return std::cos(eval_node(n->a.get(), p));
    }
    return 0.0;
}

NodePtr diff_node(const NodePtr& n, char var) {
    switch (n->kind) {
        case Node::Const: return make_const(0.0);
        case Node::Var: return make_const(n->var == var ? 1.0 : 0.0);
        case Node::Add: return make_node(Node::Add, diff_node(n->a, var), diff_node(n->b, var));
        case Node::Sub: return make_node(Node::Sub, diff_node(n->a, var), diff_node(n->b, var));
        case Node::Mul:
            return make_node(Node::Add, make_node(Node::Mul, diff_node(n->a, var), n->b),
                             make_node(Node::Mul, n->a, diff_node(n->b, var)));
        case Node::Div:
            return make_node(
                Node::Div,
                make_node(Node::Sub, make_node(Node::Mul, diff_node(n->a, var), n->b),
                          make_node(Node::Mul, n->a, diff_node(n->b, var))),
                make_node(Node::Mul, n->b, n->b));
        case Node::Pow: {
            if (n->b->kind != Node::Const)
                throw ConfigError("expression: '^' needs a constant exponent for derivatives");
            const double e = n->b->value;
            return make_node(Node::Mul, make_const(e),
                             make_node(Node::Mul, make_node(Node::Pow, n->a, make_const(e - 1.0)),
                                       diff_node(n->a, var)));
        }
        case Node::Neg: return make_node(Node::Neg, diff_node(n->a, var));
        case Node::Sin:
            return make_node(Node::Mul, make_node(Node::Cos, n->a), diff_node(n->a, var));
        case Node::Cos:
            return make_node(Node::Neg,
                             make_node(Node::Mul, make_node(Node::Sin, n->a), diff_node(n->a, var)));
    }
    return make_const(0.0);
}

void print_node(const Node* n, std::ostringstream& os) {
    switch (n->kind) {
        case Node::Const: os << n->value; return;
        case Node::Var: os << n->var; return;
        case Node::Neg:
            os << "(-";
            print_node(n->a.get(), os);
            os << ")";
            return;
        case Node::Sin:
        case Node::Cos:
            os << (n->kind == Node::Sin ? "sin(" : "cos(");
            print_node(n->a.get(), os);
            os << ")";
            return;
        default: {
            const char op = n->kind == Node::Add   ? '+'
                            : n->kind == Node::Sub ? '-'
                            : n->kind == Node::Mul ? '*'
                            : n->kind == Node::Div ? '/'
                                                   : '^';
            os << "(";
            print_node(n->a.get(), os);
            os << op;
            print_node(n->b.get(), os);
            os << ")";
        }
    }
}

} // namespace

Expression::Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;
Expression::Expression(const Expression&) = default;
Expression& Expression::operator=(const Expression&) = default;
Expression::~Expression() = default;

Expression Expression::parse(const std::string& text) {
    Parser p(text);
    return Expression(p.parse());
}

double Expression::eval(Vec2 p) const { return eval_node(root_.get(), p); }

Expression Expression::derivative(char var) const { return Expression(diff_node(root_, var)); }

Vec2 Expression::gradient(Vec2 p) const {
    return {derivative('x').eval(p), derivative('y').eval(p)};
}

std::string Expression::to_string() const {
    std::ostringstream os;
    print_node(root_.get(), os);
    return os.str();
}

} // namespace elast
