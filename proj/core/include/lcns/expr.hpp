#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace lcns {

enum class Var : int { X1 = 0, X2 = 1, X3 = 2, T = 3, Rho = 4 };

struct EvalPoint {
    double x[3] = {0.0, 0.0, 0.0};
    double t = 0.0;
    double rho = 0.0;
};

/// Closed expression grammar for manufactured data:
///   sums, differences, products and quotients of numbers, pi, x|x1, y|x2,
///   z|x3, t, rho, sin(.), cos(.), exp(.), and powers with constant exponent.
/// Immutable; differentiation is symbolic.
class Expr {
public:
    Expr();
    static Expr parse(std::string_view src);
    static Expr constant(double c);
    static Expr variable(Var v);

    double eval(const EvalPoint& p) const;
    Expr diff(Var v) const;
    bool depends_on(Var v) const;
    bool is_constant() const;
    bool is_zero() const;
    std::string str() const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);

    struct Node;

private:
    explicit Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
    std::shared_ptr<const Node> n_;
    friend Expr make_node(int, double, Var, Expr, Expr);
};

}  // namespace lcns
