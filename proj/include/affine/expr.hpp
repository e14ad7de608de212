#ifndef AFFINE_EXPR_HPP
#define AFFINE_EXPR_HPP

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "affine/dual.hpp"

namespace affine {

// Closed-form scalar fields over one global chart. The primitive set is fixed
// (constants, coordinates, +, -, *, /, sin, cos, exp, pow) so that forward AD
// through the tree is exact to rounding.
enum class Op {
    constant,
    coord,
    add,
    sub,
    neg,
    mul,
    div,
    sine,
    cosine,
    expn,
    power,  // pow(a, fixed real exponent)
};

class Expr;

struct ExprNode {
    Op op = Op::constant;
    double value = 0.0;  // constant value, or exponent for power
    int index = 0;       // coordinate index, 1-based
    std::shared_ptr<const ExprNode> a, b;
};

class Expr {
public:
    Expr() : n_(constant_node(0.0)) {}
    explicit Expr(std::shared_ptr<const ExprNode> n) : n_(std::move(n)) {}

    static Expr constant(double c) { return Expr(constant_node(c)); }
    static Expr coord(int index_1_based);

    const ExprNode& node() const { return *n_; }
    bool is_constant() const { return n_->op == Op::constant; }
    double constant_value() const { return n_->value; }

    template <class T>
    T eval(const T* x, int dim) const { return eval_node(*n_, x, dim); }
    template <class T>
    T eval(const std::vector<T>& x) const { return eval_node(*n_, x.data(), static_cast<int>(x.size())); }

    // Largest coordinate index referenced (0 if none).
    int max_coord() const { return max_coord_node(*n_); }

    std::string str() const;

private:
    static std::shared_ptr<const ExprNode> constant_node(double c) {
        auto n = std::make_shared<ExprNode>();
        n->op = Op::constant;
        n->value = c;
        return n;
    }

    template <class T>
    static T eval_node(const ExprNode& n, const T* x, int dim) {
        switch (n.op) {
            case Op::constant: return T(n.value);
            case Op::coord:
                if (n.index < 1 || n.index > dim)
                    throw std::out_of_range("expression references x" + std::to_string(n.index) +
                                            " but the space has dimension " + std::to_string(dim));
                return x[n.index - 1];
            case Op::add: return eval_node(*n.a, x, dim) + eval_node(*n.b, x, dim);
            case Op::sub: return eval_node(*n.a, x, dim) - eval_node(*n.b, x, dim);
            case Op::neg: return -eval_node(*n.a, x, dim);
            case Op::mul: return eval_node(*n.a, x, dim) * eval_node(*n.b, x, dim);
            case Op::div: return eval_node(*n.a, x, dim) / eval_node(*n.b, x, dim);
            case Op::sine: return sin(eval_node(*n.a, x, dim));
            case Op::cosine: return cos(eval_node(*n.a, x, dim));
            case Op::expn: return exp(eval_node(*n.a, x, dim));
            case Op::power: return pow(eval_node(*n.a, x, dim), n.value);
        }
        throw std::logic_error("unreachable expression op");
    }

    static int max_coord_node(const ExprNode& n) {
        int m = (n.op == Op::coord) ? n.index : 0;
        if (n.a) m = std::max(m, max_coord_node(*n.a));
        if (n.b) m = std::max(m, max_coord_node(*n.b));
        return m;
    }

    std::shared_ptr<const ExprNode> n_;

    friend Expr make_unary(Op op, const Expr& a);
    friend Expr make_binary(Op op, const Expr& a, const Expr& b);
    friend Expr pow(const Expr& a, double c);
};

Expr make_unary(Op op, const Expr& a);
Expr make_binary(Op op, const Expr& a, const Expr& b);

inline Expr operator+(const Expr& a, const Expr& b) { return make_binary(Op::add, a, b); }
inline Expr operator-(const Expr& a, const Expr& b) { return make_binary(Op::sub, a, b); }
inline Expr operator-(const Expr& a) { return make_unary(Op::neg, a); }
inline Expr operator*(const Expr& a, const Expr& b) { return make_binary(Op::mul, a, b); }
inline Expr operator/(const Expr& a, const Expr& b) { return make_binary(Op::div, a, b); }
inline Expr operator*(double c, const Expr& a) { return Expr::constant(c) * a; }
inline Expr operator+(double c, const Expr& a) { return Expr::constant(c) + a; }
inline Expr sin(const Expr& a) { return make_unary(Op::sine, a); }
inline Expr cos(const Expr& a) { return make_unary(Op::cosine, a); }
inline Expr exp(const Expr& a) { return make_unary(Op::expn, a); }
Expr pow(const Expr& a, double c);

// Prefix s-expression syntax, e.g. "(sin (* x1 x2))". Coordinates are x1..xD.
// Throws std::runtime_error with position information on malformed input.
Expr parse_expr(const std::string& text);

}  // namespace affine

#endif
