#pragma once

// Small expression language for user-defined metrics and scalar fields.
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := ['-'] base ('^' ['-'] integer)?
//   base   := number | var | fn '(' expr ')' | '(' expr ')'
//   var    := 'x' digit+ | 'y' digit+
//   fn     := 'sqrt' | 'exp' | 'log' | 'sin' | 'cos'
//
// Variables are 1-based (x1..xn, y1..yn). Evaluation is templated so the
// same tree runs on doubles and on jets.

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "finsler/error.hpp"
#include "finsler/jet.hpp"

namespace finsler {

class MetricExpr {
public:
    enum class Kind { Number, VarX, VarY, Neg, Add, Sub, Mul, Div, PowInt, Sqrt, Exp, Log, Sin, Cos };

    struct Node {
        Kind kind;
        double number = 0.0;  // Number
        int index = 0;        // VarX / VarY (0-based), PowInt exponent
        int lhs = -1;
        int rhs = -1;
    };

    /// Parses `source`; variables must satisfy index <= dim. Throws ParseError.
    static MetricExpr parse(const std::string& source, int dim);

    const std::string& source() const { return source_; }
    int dim() const { return dim_; }
    bool uses_y() const;
    bool uses_x() const;

    template <class T>
    T evaluate(std::span<const T> x, std::span<const T> y) const {
        return eval_node<T>(root_, x, y);
    }

private:
    template <class T>
    T eval_node(int id, std::span<const T> x, std::span<const T> y) const;

    std::string source_;
    int dim_ = 0;
    std::vector<Node> nodes_;
    int root_ = -1;
    friend class ExprParser;
};

namespace detail {
inline double pow_int(double a, int k) { return std::pow(a, k); }
inline Jet pow_int(const Jet& a, int k) { return powi(a, k); }
inline double checked_div(double a, double b) {
    if (b == 0.0) throw ArithmeticDomainError("division by zero in expression");
    return a / b;
}
inline Jet checked_div(const Jet& a, const Jet& b) { return a / b; }
inline double checked_sqrt(double a) {
    if (a < 0.0) throw ArithmeticDomainError("sqrt of a negative value in expression");
    return std::sqrt(a);
}
inline Jet checked_sqrt(const Jet& a) { return sqrt(a); }
inline double checked_log(double a) {
    if (!(a > 0.0)) throw ArithmeticDomainError("log of a nonpositive value in expression");
    return std::log(a);
}
inline Jet checked_log(const Jet& a) { return log(a); }
}  // namespace detail

template <class T>
T MetricExpr::eval_node(int id, std::span<const T> x, std::span<const T> y) const {
    using std::cos;
    using std::exp;
    using std::sin;
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    switch (n.kind) {
        case Kind::Number: return constant_like(x.empty() ? y[0] : x[0], n.number);
        case Kind::VarX: return x[static_cast<std::size_t>(n.index)];
        case Kind::VarY: return y[static_cast<std::size_t>(n.index)];
        case Kind::Neg: return -eval_node<T>(n.lhs, x, y);
        case Kind::Add: return eval_node<T>(n.lhs, x, y) + eval_node<T>(n.rhs, x, y);
        case Kind::Sub: return eval_node<T>(n.lhs, x, y) - eval_node<T>(n.rhs, x, y);
        case Kind::Mul: return eval_node<T>(n.lhs, x, y) * eval_node<T>(n.rhs, x, y);
        case Kind::Div: return detail::checked_div(eval_node<T>(n.lhs, x, y), eval_node<T>(n.rhs, x, y));
        case Kind::PowInt: return detail::pow_int(eval_node<T>(n.lhs, x, y), n.index);
        case Kind::Sqrt: return detail::checked_sqrt(eval_node<T>(n.lhs, x, y));
        case Kind::Exp: return exp(eval_node<T>(n.lhs, x, y));
        case Kind::Log: return detail::checked_log(eval_node<T>(n.lhs, x, y));
        case Kind::Sin: return sin(eval_node<T>(n.lhs, x, y));
        case Kind::Cos: return cos(eval_node<T>(n.lhs, x, y));
    }
    throw Error("corrupt expression tree");
}

}  // namespace finsler
