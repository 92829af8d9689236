#include "srlab/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace srlab {

using Op = ScalarExpr::Op;

ScalarExpr ScalarExpr::make(Op op, NodePtr a, NodePtr b, double v, int idx) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->value = v;
    n->index = idx;
    n->a = std::move(a);
    n->b = std::move(b);
    return ScalarExpr(NodePtr(std::move(n)));
}

ScalarExpr ScalarExpr::constant(double c) { return make(Op::Const, nullptr, nullptr, c); }

ScalarExpr ScalarExpr::var(int index0) {
    if (index0 < 0 || index0 >= 9) throw std::invalid_argument("variable index out of range x1..x9");
    return make(Op::Var, nullptr, nullptr, 0.0, index0);
}

ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.is_constant() && b.is_constant()) return ScalarExpr::constant(a.constant_value() + b.constant_value());
    return ScalarExpr::make(Op::Add, a.node_, b.node_);
}

ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b) {
    if (b.is_zero()) return a;
    if (a.is_constant() && b.is_constant()) return ScalarExpr::constant(a.constant_value() - b.constant_value());
    if (a.is_zero()) return -b;
    return ScalarExpr::make(Op::Sub, a.node_, b.node_);
}

ScalarExpr operator-(const ScalarExpr& a) {
    if (a.is_constant()) return ScalarExpr::constant(-a.constant_value());
    if (a.node_->op == Op::Neg) return ScalarExpr(a.node_->a);
    return ScalarExpr::make(Op::Neg, a.node_);
}

ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b) {
    if (a.is_zero() || b.is_zero()) return ScalarExpr::constant(0.0);
    if (a.is_one()) return b;
    if (b.is_one()) return a;
    if (a.is_constant() && b.is_constant()) return ScalarExpr::constant(a.constant_value() * b.constant_value());
    return ScalarExpr::make(Op::Mul, a.node_, b.node_);
}

ScalarExpr operator/(const ScalarExpr& a, const ScalarExpr& b) {
    if (b.is_one()) return a;
    if (a.is_zero() && !b.is_zero()) return ScalarExpr::constant(0.0);
    if (a.is_constant() && b.is_constant() && b.constant_value() != 0.0)
        return ScalarExpr::constant(a.constant_value() / b.constant_value());
    return ScalarExpr::make(Op::Div, a.node_, b.node_);
}

ScalarExpr pow(const ScalarExpr& a, int k) {
    if (k == 0) return ScalarExpr::constant(1.0);
    if (k == 1) return a;
    if (a.is_constant()) return ScalarExpr::constant(std::pow(a.constant_value(), k));
    return ScalarExpr::make(Op::Pow, a.node_, nullptr, 0.0, k);
}

ScalarExpr sin(const ScalarExpr& a) {
    if (a.is_constant()) return ScalarExpr::constant(std::sin(a.constant_value()));
    return ScalarExpr::make(Op::Sin, a.node_);
}

ScalarExpr cos(const ScalarExpr& a) {
    if (a.is_constant()) return ScalarExpr::constant(std::cos(a.constant_value()));
    return ScalarExpr::make(Op::Cos, a.node_);
}

ScalarExpr exp(const ScalarExpr& a) {
    if (a.is_constant()) return ScalarExpr::constant(std::exp(a.constant_value()));
    return ScalarExpr::make(Op::Exp, a.node_);
}

ScalarExpr sqrt(const ScalarExpr& a) {
    if (a.is_constant() && a.constant_value() >= 0.0) return ScalarExpr::constant(std::sqrt(a.constant_value()));
    return ScalarExpr::make(Op::Sqrt, a.node_);
}

double ScalarExpr::eval(std::span<const double> x) const {
    const Node& n = *node_;
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::Var:
            if (static_cast<std::size_t>(n.index) >= x.size())
                throw EvalError("variable x" + std::to_string(n.index + 1) + " beyond point dimension");
            return x[static_cast<std::size_t>(n.index)];
        case Op::Add: return ScalarExpr(n.a).eval(x) + ScalarExpr(n.b).eval(x);
        case Op::Sub: return ScalarExpr(n.a).eval(x) - ScalarExpr(n.b).eval(x);
        case Op::Mul: return ScalarExpr(n.a).eval(x) * ScalarExpr(n.b).eval(x);
        case Op::Div: {
            double den = ScalarExpr(n.b).eval(x);
            if (den == 0.0) throw EvalError("division by zero");
            return ScalarExpr(n.a).eval(x) / den;
        }
        case Op::Pow: {
            double base = ScalarExpr(n.a).eval(x);
            if (n.index < 0 && base == 0.0) throw EvalError("zero raised to a negative power");
            return std::pow(base, n.index);
        }
        case Op::Neg: return -ScalarExpr(n.a).eval(x);
        case Op::Sin: return std::sin(ScalarExpr(n.a).eval(x));
        case Op::Cos: return std::cos(ScalarExpr(n.a).eval(x));
        case Op::Exp: return std::exp(ScalarExpr(n.a).eval(x));
        case Op::Sqrt: {
            double v = ScalarExpr(n.a).eval(x);
            if (v < 0.0) throw EvalError("square root of a negative value");
            return std::sqrt(v);
        }
    }
    throw EvalError("corrupt expression node");
}

ScalarExpr ScalarExpr::diff(int var0) const {
    const Node& n = *node_;
    ScalarExpr a = n.a ? ScalarExpr(n.a) : ScalarExpr();
    ScalarExpr b = n.b ? ScalarExpr(n.b) : ScalarExpr();
    switch (n.op) {
        case Op::Const: return constant(0.0);
        case Op::Var: return constant(n.index == var0 ? 1.0 : 0.0);
        case Op::Add: return a.diff(var0) + b.diff(var0);
        case Op::Sub: return a.diff(var0) - b.diff(var0);
        case Op::Mul: return a.diff(var0) * b + a * b.diff(var0);
        case Op::Div: return (a.diff(var0) * b - a * b.diff(var0)) / (b * b);
        case Op::Pow: return constant(n.index) * pow(a, n.index - 1) * a.diff(var0);
        case Op::Neg: return -a.diff(var0);
        case Op::Sin: return cos(a) * a.diff(var0);
        case Op::Cos: return -(sin(a) * a.diff(var0));
        case Op::Exp: return exp(a) * a.diff(var0);
        case Op::Sqrt: return a.diff(var0) / (constant(2.0) * sqrt(a));
    }
    throw EvalError("corrupt expression node");
}

ScalarExpr ScalarExpr::substitute(const std::vector<ScalarExpr>& exprs) const {
    const Node& n = *node_;
    ScalarExpr a = n.a ? ScalarExpr(n.a).substitute(exprs) : ScalarExpr();
    ScalarExpr b = n.b ? ScalarExpr(n.b).substitute(exprs) : ScalarExpr();
    switch (n.op) {
        case Op::Const: return constant(n.value);
        case Op::Var:
            if (static_cast<std::size_t>(n.index) >= exprs.size())
                throw EvalError("substitution list shorter than variable index");
            return exprs[static_cast<std::size_t>(n.index)];
        case Op::Add: return a + b;
        case Op::Sub: return a - b;
        case Op::Mul: return a * b;
        case Op::Div: return a / b;
        case Op::Pow: return pow(a, n.index);
        case Op::Neg: return -a;
        case Op::Sin: return sin(a);
        case Op::Cos: return cos(a);
        case Op::Exp: return exp(a);
        case Op::Sqrt: return sqrt(a);
    }
    throw EvalError("corrupt expression node");
}

int ScalarExpr::min_dimension() const {
    const Node& n = *node_;
    int d = 0;
    if (n.op == Op::Var) d = n.index + 1;
    if (n.a) d = std::max(d, ScalarExpr(n.a).min_dimension());
    if (n.b) d = std::max(d, ScalarExpr(n.b).min_dimension());
    return d;
}

namespace {

int precedence(Op op) {
    switch (op) {
        case Op::Add:
        case Op::Sub: return 1;
        case Op::Mul:
        case Op::Div: return 2;
        case Op::Neg: return 3;
        case Op::Pow: return 4;
        default: return 5;
    }
}

void print_node(std::ostream& os, const ScalarExpr::Node& n, int parent_prec) {
    int prec = precedence(n.op);
    bool paren = prec < parent_prec;
    if (paren) os << '(';
    switch (n.op) {
        case Op::Const: {
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << n.value;
            std::string s = tmp.str();
            if (n.value < 0.0 && !paren) {
                os << '(' << s << ')';
            } else {
                os << s;
            }
            break;
        }
        case Op::Var: os << 'x' << (n.index + 1); break;
        case Op::Add:
            print_node(os, *n.a, prec);
            os << " + ";
            print_node(os, *n.b, prec);
            break;
        case Op::Sub:
            print_node(os, *n.a, prec);
            os << " - ";
            print_node(os, *n.b, prec + 1);
            break;
        case Op::Mul:
            print_node(os, *n.a, prec);
            os << "*";
            print_node(os, *n.b, prec);
            break;
        case Op::Div:
            print_node(os, *n.a, prec);
            os << "/";
            print_node(os, *n.b, prec + 1);
            break;
        case Op::Pow:
            print_node(os, *n.a, prec + 1);
            os << "^" << n.index;
            break;
        case Op::Neg:
            os << "-";
            print_node(os, *n.a, prec + 1);
            break;
        case Op::Sin:
            os << "sin(";
            print_node(os, *n.a, 0);
            os << ')';
            break;
        case Op::Cos:
            os << "cos(";
            print_node(os, *n.a, 0);
            os << ')';
            break;
        case Op::Exp:
            os << "exp(";
            print_node(os, *n.a, 0);
            os << ')';
            break;
        case Op::Sqrt:
            os << "sqrt(";
            print_node(os, *n.a, 0);
            os << ')';
            break;
    }
    if (paren) os << ')';
}

}  // namespace

std::string ScalarExpr::str() const {
    std::ostringstream os;
    print_node(os, *node_, 0);
    return os.str();
}

namespace {

struct Parser {
    const std::string& text;
    int n;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool peek_is(char c) {
        skip_ws();
        return pos < text.size() && text[pos] == c;
    }

    bool accept(char c) {
        if (peek_is(c)) {
            ++pos;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos);
    }

    ScalarExpr expression() {
        ScalarExpr e = term();
        for (;;) {
            if (accept('+')) {
                e = e + term();
            } else if (accept('-')) {
                e = e - term();
            } else {
                return e;
            }
        }
    }

    ScalarExpr term() {
        ScalarExpr e = unary();
        for (;;) {
            if (accept('*')) {
                e = e * unary();
            } else if (accept('/')) {
                e = e / unary();
            } else {
                return e;
            }
        }
    }

    ScalarExpr unary() {
        if (accept('-')) return -unary();
        accept('+');
        return power();
    }

    ScalarExpr power() {
        ScalarExpr base = atom();
        if (accept('^')) {
            skip_ws();
            bool neg = false;
            if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
                neg = text[pos] == '-';
                ++pos;
            }
            std::size_t start = pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            if (pos == start) throw ParseError("expected integer exponent after '^'", pos);
            int k = std::stoi(text.substr(start, pos - start));
            return pow(base, neg ? -k : k);
        }
        return base;
    }

    ScalarExpr atom() {
        skip_ws();
        if (pos >= text.size()) throw ParseError("unexpected end of expression", pos);
        char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        if (c == '(') {
            ++pos;
            ScalarExpr e = expression();
            expect(')');
            return e;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos);
    }

    ScalarExpr number() {
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.' || text[pos] == 'e' ||
                text[pos] == 'E' ||
                ((text[pos] == '+' || text[pos] == '-') && pos > start &&
                 (text[pos - 1] == 'e' || text[pos - 1] == 'E'))))
            ++pos;
        try {
            std::size_t used = 0;
            double v = std::stod(text.substr(start, pos - start), &used);
            if (used != pos - start) throw ParseError("malformed number", start);
            return ScalarExpr::constant(v);
        } catch (const std::invalid_argument&) {
            throw ParseError("malformed number", start);
        }
    }

    ScalarExpr identifier() {
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        std::string name = text.substr(start, pos - start);
        if (name.size() == 2 && name[0] == 'x' && std::isdigit(static_cast<unsigned char>(name[1]))) {
            int idx = name[1] - '0';
            if (idx < 1 || idx > 9) throw ParseError("variables are x1..x9", start);
            if (idx > n)
                throw ParseError("variable " + name + " exceeds dimension " + std::to_string(n), start);
            return ScalarExpr::var(idx - 1);
        }
        if (name == "sin" || name == "cos" || name == "exp") {
            expect('(');
            ScalarExpr arg = expression();
            expect(')');
            if (name == "sin") return sin(arg);
            if (name == "cos") return cos(arg);
            return exp(arg);
        }
        if (name == "pi") return ScalarExpr::constant(3.14159265358979323846);
        throw ParseError("unknown identifier '" + name + "'", start);
    }
};

}  // namespace

ScalarExpr parse_expr(const std::string& text, int n) {
    if (n < 1 || n > 9) throw std::invalid_argument("dimension must be in 1..9");
    Parser p{text, n};
    ScalarExpr e = p.expression();
    p.skip_ws();
    if (p.pos != text.size()) throw ParseError("trailing characters", p.pos);
    return e;
}

}  // namespace srlab
