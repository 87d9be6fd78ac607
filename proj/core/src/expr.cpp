#include "lcns/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "lcns/error.hpp"

namespace lcns {

namespace {
enum Kind { kConst, kVar, kAdd, kSub, kMul, kDiv, kNeg, kPow, kSin, kCos, kExp };
}

struct Expr::Node {
    int kind = kConst;
    double value = 0.0;  // constant, or exponent for kPow
    Var var = Var::X1;
    Expr a, b;
};

Expr make_node(int kind, double value, Var var, Expr a, Expr b) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = kind;
    n->value = value;
    n->var = var;
    n->a = std::move(a);
    n->b = std::move(b);
    return Expr(std::shared_ptr<const Expr::Node>(std::move(n)));
}

Expr::Expr() : n_(nullptr) {}

Expr Expr::constant(double c) { return make_node(kConst, c, Var::X1, Expr(), Expr()); }
Expr Expr::variable(Var v) { return make_node(kVar, 0.0, v, Expr(), Expr()); }

bool Expr::is_constant() const { return !n_ || n_->kind == kConst; }
bool Expr::is_zero() const { return !n_ || (n_->kind == kConst && n_->value == 0.0); }

namespace {
double cval(const Expr& e) { return e.eval(EvalPoint{}); }
bool is_one(const Expr& e) { return e.is_constant() && cval(e) == 1.0; }
}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.is_constant() && b.is_constant()) return Expr::constant(cval(a) + cval(b));
    return make_node(kAdd, 0.0, Var::X1, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
    if (b.is_zero()) return a;
    if (a.is_zero()) return -b;
    if (a.is_constant() && b.is_constant()) return Expr::constant(cval(a) - cval(b));
    return make_node(kSub, 0.0, Var::X1, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_zero() || b.is_zero()) return Expr::constant(0.0);
    if (is_one(a)) return b;
    if (is_one(b)) return a;
    if (a.is_constant() && b.is_constant()) return Expr::constant(cval(a) * cval(b));
    return make_node(kMul, 0.0, Var::X1, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_constant() && cval(b) == 0.0) raise(ErrorKind::ParseError, "division by constant zero");
    if (a.is_zero()) return Expr::constant(0.0);
    if (is_one(b)) return a;
    if (a.is_constant() && b.is_constant()) return Expr::constant(cval(a) / cval(b));
    return make_node(kDiv, 0.0, Var::X1, a, b);
}

Expr operator-(const Expr& a) {
    if (a.is_constant()) return Expr::constant(-cval(a));
    return make_node(kNeg, 0.0, Var::X1, a, Expr());
}

namespace {

Expr power(const Expr& base, double p) {
    if (p == 0.0) return Expr::constant(1.0);
    if (p == 1.0) return base;
    if (base.is_constant()) return Expr::constant(std::pow(cval(base), p));
    return make_node(kPow, p, Var::X1, base, Expr());
}

Expr func(int kind, const Expr& a) {
    if (a.is_constant()) {
        const double x = cval(a);
        return Expr::constant(kind == kSin ? std::sin(x) : kind == kCos ? std::cos(x) : std::exp(x));
    }
    return make_node(kind, 0.0, Var::X1, a, Expr());
}

}  // namespace

double Expr::eval(const EvalPoint& p) const {
    if (!n_) return 0.0;
    const Node& n = *n_;
    switch (n.kind) {
        case kConst: return n.value;
        case kVar:
            switch (n.var) {
                case Var::X1: return p.x[0];
                case Var::X2: return p.x[1];
                case Var::X3: return p.x[2];
                case Var::T: return p.t;
                case Var::Rho: return p.rho;
            }
            return 0.0;
        case kAdd: return n.a.eval(p) + n.b.eval(p);
        case kSub: return n.a.eval(p) - n.b.eval(p);
        case kMul: return n.a.eval(p) * n.b.eval(p);
        case kDiv: return n.a.eval(p) / n.b.eval(p);
        case kNeg: return -n.a.eval(p);
        case kPow: {
            const double x = n.a.eval(p);
            const double e = n.value;
            if (e == std::floor(e) && std::abs(e) <= 16) {
                double r = 1.0;
                for (int k = 0; k < static_cast<int>(std::abs(e)); ++k) r *= x;
                return e < 0 ? 1.0 / r : r;
            }
            return std::pow(x, e);
        }
        case kSin: return std::sin(n.a.eval(p));
        case kCos: return std::cos(n.a.eval(p));
        case kExp: return std::exp(n.a.eval(p));
    }
    return 0.0;
}

bool Expr::depends_on(Var v) const {
    if (!n_) return false;
    const Node& n = *n_;
    if (n.kind == kConst) return false;
    if (n.kind == kVar) return n.var == v;
    return n.a.depends_on(v) || n.b.depends_on(v);
}

Expr Expr::diff(Var v) const {
    if (!n_ || !depends_on(v)) return constant(0.0);
    const Node& n = *n_;
    switch (n.kind) {
        case kVar: return constant(1.0);
        case kAdd: return n.a.diff(v) + n.b.diff(v);
        case kSub: return n.a.diff(v) - n.b.diff(v);
        case kMul: return n.a.diff(v) * n.b + n.a * n.b.diff(v);
        case kDiv: return (n.a.diff(v) * n.b - n.a * n.b.diff(v)) / power(n.b, 2.0);
        case kNeg: return -n.a.diff(v);
        case kPow: return constant(n.value) * power(n.a, n.value - 1.0) * n.a.diff(v);
        case kSin: return func(kCos, n.a) * n.a.diff(v);
        case kCos: return -(func(kSin, n.a) * n.a.diff(v));
        case kExp: return func(kExp, n.a) * n.a.diff(v);
        default: return constant(0.0);
    }
}

std::string Expr::str() const {
    if (!n_) return "0";
    const Node& n = *n_;
    std::ostringstream os;
    os.precision(17);
    switch (n.kind) {
        case kConst: os << n.value; break;
        case kVar: {
            static const char* names[] = {"x1", "x2", "x3", "t", "rho"};
            os << names[static_cast<int>(n.var)];
            break;
        }
        case kAdd: os << "(" << n.a.str() << " + " << n.b.str() << ")"; break;
        case kSub: os << "(" << n.a.str() << " - " << n.b.str() << ")"; break;
        case kMul: os << n.a.str() << "*" << n.b.str(); break;
        case kDiv: os << n.a.str() << "/(" << n.b.str() << ")"; break;
        case kNeg: os << "-(" << n.a.str() << ")"; break;
        case kPow: os << "(" << n.a.str() << ")^" << n.value; break;
        case kSin: os << "sin(" << n.a.str() << ")"; break;
        case kCos: os << "cos(" << n.a.str() << ")"; break;
        case kExp: os << "exp(" << n.a.str() << ")"; break;
    }
    return os.str();
}

namespace {

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    Expr parse_all() {
        Expr e = sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& why) {
        raise(ErrorKind::ParseError, why + " at offset " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr sum() {
        Expr e = product();
        for (;;) {
            if (eat('+')) e = e + product();
            else if (eat('-')) e = e - product();
            else return e;
        }
    }
    Expr product() {
        Expr e = unary();
        for (;;) {
            if (eat('*')) e = e * unary();
            else if (eat('/')) e = e / unary();
            else return e;
        }
    }
    Expr unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return pow_expr();
    }
    Expr pow_expr() {
        Expr base = primary();
        if (eat('^')) {
            Expr ex = unary();
            if (!ex.is_constant()) fail("exponent must be constant");
            return power(base, ex.eval(EvalPoint{}));
        }
        return base;
    }
    Expr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        const char c = s_[pos_];
        if (eat('(')) {
            Expr e = sum();
            if (!eat(')')) fail("missing ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const std::string tail(s_.substr(pos_));
            char* end = nullptr;
            const double v = std::strtod(tail.c_str(), &end);
            if (end == tail.c_str()) fail("bad number");
            pos_ += static_cast<std::size_t>(end - tail.c_str());
            return Expr::constant(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t b = pos_;
            while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string id(s_.substr(b, pos_ - b));
            if (id == "pi") return Expr::constant(std::numbers::pi);
            if (id == "x" || id == "x1") return Expr::variable(Var::X1);
            if (id == "y" || id == "x2") return Expr::variable(Var::X2);
            if (id == "z" || id == "x3") return Expr::variable(Var::X3);
            if (id == "t") return Expr::variable(Var::T);
            if (id == "rho") return Expr::variable(Var::Rho);
            int kind = -1;
            if (id == "sin") kind = kSin;
            if (id == "cos") kind = kCos;
            if (id == "exp") kind = kExp;
            if (kind < 0) fail("unknown identifier '" + id + "'");
            if (!eat('(')) fail("expected '(' after " + id);
            Expr arg = sum();
            if (!eat(')')) fail("missing ')'");
            return func(kind, arg);
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr Expr::parse(std::string_view src) { return Parser(src).parse_all(); }

}  // namespace lcns
