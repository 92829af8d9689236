#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace srlab {

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
    std::size_t position;
};

/// Immutable expression tree over variables x1..xn with exact symbolic
/// differentiation. Simplification is limited to constant folding and
/// zero/one elimination; no canonical form.
class ScalarExpr {
public:
    enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Sqrt };

    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

    struct Node {
        Op op;
        double value = 0.0;  // Const
        int index = 0;       // Var: 0-based variable index; Pow: integer exponent
        NodePtr a, b;
    };

    ScalarExpr() : ScalarExpr(constant(0.0)) {}

    static ScalarExpr constant(double c);
    static ScalarExpr var(int index0);  // 0-based

    bool is_constant() const { return node_->op == Op::Const; }
    bool is_zero() const { return is_constant() && node_->value == 0.0; }
    bool is_one() const { return is_constant() && node_->value == 1.0; }
    double constant_value() const { return node_->value; }

    double eval(std::span<const double> x) const;
    ScalarExpr diff(int var0) const;

    /// Substitute each variable x_i by exprs[i].
    ScalarExpr substitute(const std::vector<ScalarExpr>& exprs) const;

    std::string str() const;

    /// Largest variable index referenced, plus one (0 for constants).
    int min_dimension() const;

    const Node& node() const { return *node_; }

    friend ScalarExpr operator+(const ScalarExpr&, const ScalarExpr&);
    friend ScalarExpr operator-(const ScalarExpr&, const ScalarExpr&);
    friend ScalarExpr operator*(const ScalarExpr&, const ScalarExpr&);
    friend ScalarExpr operator/(const ScalarExpr&, const ScalarExpr&);
    friend ScalarExpr operator-(const ScalarExpr&);
    friend ScalarExpr pow(const ScalarExpr&, int k);
    friend ScalarExpr sin(const ScalarExpr&);
    friend ScalarExpr cos(const ScalarExpr&);
    friend ScalarExpr exp(const ScalarExpr&);
    friend ScalarExpr sqrt(const ScalarExpr&);

private:
    explicit ScalarExpr(NodePtr n) : node_(std::move(n)) {}
    static ScalarExpr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0, int idx = 0);
    NodePtr node_;
};

ScalarExpr operator+(const ScalarExpr&, const ScalarExpr&);
ScalarExpr operator-(const ScalarExpr&, const ScalarExpr&);
ScalarExpr operator*(const ScalarExpr&, const ScalarExpr&);
ScalarExpr operator/(const ScalarExpr&, const ScalarExpr&);
ScalarExpr operator-(const ScalarExpr&);
ScalarExpr pow(const ScalarExpr&, int k);
ScalarExpr sin(const ScalarExpr&);
ScalarExpr cos(const ScalarExpr&);
ScalarExpr exp(const ScalarExpr&);
ScalarExpr sqrt(const ScalarExpr&);

inline ScalarExpr operator*(double c, const ScalarExpr& e) { return ScalarExpr::constant(c) * e; }
inline ScalarExpr operator*(const ScalarExpr& e, double c) { return ScalarExpr::constant(c) * e; }
inline ScalarExpr operator+(const ScalarExpr& e, double c) { return e + ScalarExpr::constant(c); }
inline ScalarExpr operator-(const ScalarExpr& e, double c) { return e - ScalarExpr::constant(c); }

/// Parse an expression in the documented grammar (variables x1..xn,
/// decimal literals, + - * / ^, sin/cos/exp calls). Throws ParseError.
ScalarExpr parse_expr(const std::string& text, int n);

}  // namespace srlab
