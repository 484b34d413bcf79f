#pragma once

/**
 * @file expr.hpp
 * @brief Immutable expression trees for smooth functions on R^n.
 *
 * Nodes are shared, so derivative trees reuse the subtrees of their source.
 * Two construction paths exist: Expr::make_* builds exactly the node asked
 * for (the parser uses it so printing round-trips), while the arithmetic
 * operators fold literal constants, zeros and ones.
 */

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "weil/error.hpp"

namespace weil {

enum class Op { constant, variable, add, sub, mul, div, pow, neg, call };
enum class Primitive { exp, log, sin, cos, sqrt };

inline const char* primitive_name(Primitive p) {
    switch (p) {
    case Primitive::exp: return "exp";
    case Primitive::log: return "log";
    case Primitive::sin: return "sin";
    case Primitive::cos: return "cos";
    case Primitive::sqrt: return "sqrt";
    }
    return "?";
}

class Expr;

struct ExprNode {
    Op op = Op::constant;
    double value = 0.0;  // constant
    int index = 0;       // variable index (1-based) or integer exponent
    Primitive fn = Primitive::exp;
    std::shared_ptr<const ExprNode> lhs, rhs;
};

class Expr {
public:
    Expr() : Expr(make_constant(0.0)) {}
    Expr(double c) : Expr(make_constant(c)) {}  // NOLINT: literals read naturally in formulas

    static Expr make_constant(double c) {
        auto n = std::make_shared<ExprNode>();
        n->op = Op::constant;
        n->value = c;
        return Expr(std::move(n));
    }
    /// Variable x_i, 1-based.
    static Expr make_variable(int i) {
        if (i < 1) throw VariableOutOfRange("variable index must be >= 1", 0);
        auto n = std::make_shared<ExprNode>();
        n->op = Op::variable;
        n->index = i;
        return Expr(std::move(n));
    }
    static Expr make_binary(Op op, const Expr& a, const Expr& b) {
        auto n = std::make_shared<ExprNode>();
        n->op = op;
        n->lhs = a.node_;
        n->rhs = b.node_;
        return Expr(std::move(n));
    }
    static Expr make_pow(const Expr& a, int k) {
        auto n = std::make_shared<ExprNode>();
        n->op = Op::pow;
        n->index = k;
        n->lhs = a.node_;
        return Expr(std::move(n));
    }
    static Expr make_neg(const Expr& a) {
        auto n = std::make_shared<ExprNode>();
        n->op = Op::neg;
        n->lhs = a.node_;
        return Expr(std::move(n));
    }
    static Expr make_call(Primitive fn, const Expr& a) {
        auto n = std::make_shared<ExprNode>();
        n->op = Op::call;
        n->fn = fn;
        n->lhs = a.node_;
        return Expr(std::move(n));
    }

    Op op() const noexcept { return node_->op; }
    double value() const noexcept { return node_->value; }
    int index() const noexcept { return node_->index; }
    int exponent() const noexcept { return node_->index; }
    Primitive primitive() const noexcept { return node_->fn; }
    Expr lhs() const { return Expr(node_->lhs); }
    Expr rhs() const { return Expr(node_->rhs); }
    const ExprNode* node() const noexcept { return node_.get(); }

    bool is_constant() const noexcept { return op() == Op::constant; }
    bool is_constant(double c) const noexcept { return is_constant() && value() == c; }

    /// Largest variable index referenced (0 for a constant expression).
    int max_variable() const;

private:
    explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const ExprNode> node_;
};

inline Expr var(int i) { return Expr::make_variable(i); }

// Folding constructors ------------------------------------------------------

inline Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return a.value() + b.value();
    if (a.is_constant(0.0)) return b;
    if (b.is_constant(0.0)) return a;
    return Expr::make_binary(Op::add, a, b);
}
inline Expr operator-(const Expr& a) {
    if (a.is_constant()) return -a.value();
    if (a.op() == Op::neg) return a.lhs();
    return Expr::make_neg(a);
}
inline Expr operator-(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return a.value() - b.value();
    if (b.is_constant(0.0)) return a;
    if (a.is_constant(0.0)) return -b;
    return Expr::make_binary(Op::sub, a, b);
}
inline Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return a.value() * b.value();
    if (a.is_constant(0.0) || b.is_constant(0.0)) return 0.0;
    if (a.is_constant(1.0)) return b;
    if (b.is_constant(1.0)) return a;
    if (a.is_constant(-1.0)) return -b;
    if (b.is_constant(-1.0)) return -a;
    return Expr::make_binary(Op::mul, a, b);
}
inline Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_constant(1.0)) return a;
    if (a.is_constant(0.0) && !b.is_constant(0.0)) return 0.0;
    if (a.is_constant() && b.is_constant() && b.value() != 0.0) return a.value() / b.value();
    return Expr::make_binary(Op::div, a, b);
}
inline Expr pow(const Expr& a, int k) {
    if (k == 0) return 1.0;
    if (k == 1) return a;
    if (a.is_constant(0.0) && k > 0) return 0.0;
    if (a.is_constant(1.0)) return 1.0;
    return Expr::make_pow(a, k);
}
inline Expr call(Primitive fn, const Expr& a) { return Expr::make_call(fn, a); }
inline Expr exp(const Expr& a) { return call(Primitive::exp, a); }
inline Expr log(const Expr& a) { return call(Primitive::log, a); }
inline Expr sin(const Expr& a) { return call(Primitive::sin, a); }
inline Expr cos(const Expr& a) { return call(Primitive::cos, a); }
inline Expr sqrt(const Expr& a) { return call(Primitive::sqrt, a); }

inline int Expr::max_variable() const {
    switch (op()) {
    case Op::constant: return 0;
    case Op::variable: return index();
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div: return std::max(lhs().max_variable(), rhs().max_variable());
    case Op::pow:
    case Op::neg:
    case Op::call: return lhs().max_variable();
    }
    return 0;
}

/// Formal partial derivative with respect to x_i (1-based).
inline Expr partial(const Expr& f, int i) {
    switch (f.op()) {
    case Op::constant: return 0.0;
    case Op::variable: return f.index() == i ? 1.0 : 0.0;
    case Op::add: return partial(f.lhs(), i) + partial(f.rhs(), i);
    case Op::sub: return partial(f.lhs(), i) - partial(f.rhs(), i);
    case Op::neg: return -partial(f.lhs(), i);
    case Op::mul: {
        const Expr a = f.lhs(), b = f.rhs();
        return partial(a, i) * b + a * partial(b, i);
    }
    case Op::div: {
        const Expr a = f.lhs(), b = f.rhs();
        const Expr da = partial(a, i), db = partial(b, i);
        if (db.is_constant(0.0)) return da / b;
        return (da * b - a * db) / pow(b, 2);
    }
    case Op::pow: {
        const int k = f.exponent();
        const Expr a = f.lhs();
        return Expr(static_cast<double>(k)) * pow(a, k - 1) * partial(a, i);
    }
    case Op::call: {
        const Expr a = f.lhs();
        const Expr da = partial(a, i);
        if (da.is_constant(0.0)) return 0.0;
        switch (f.primitive()) {
        case Primitive::exp: return f * da;
        case Primitive::log: return da / a;
        case Primitive::sin: return cos(a) * da;
        case Primitive::cos: return -(sin(a) * da);
        case Primitive::sqrt: return da / (Expr(2.0) * f);
        }
    }
    }
    return 0.0;
}

/// Gradient (d/dx_1 f, .., d/dx_n f).
inline std::vector<Expr> gradient(const Expr& f, int n) {
    std::vector<Expr> g;
    g.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) g.push_back(partial(f, i));
    return g;
}

// Printing -------------------------------------------------------------------
//
// Composite nodes are fully parenthesized and constants use the shortest
// representation that reads back to the same double, so parse(to_string(e))
// rebuilds e node for node (negative literals come back as neg(constant)).

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("cannot format constant");
    return std::string(buf, end);
}

inline void print(const Expr& e, std::string& out) {
    switch (e.op()) {
    case Op::constant:
        if (e.value() < 0 || (e.value() == 0.0 && std::signbit(e.value()))) {
            out += "(-";
            out += format_double(-e.value());
            out += ')';
        } else {
            out += format_double(e.value());
        }
        return;
    case Op::variable:
        out += 'x';
        out += std::to_string(e.index());
        return;
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div: {
        static constexpr const char* symbol[] = {"", "", " + ", " - ", " * ", " / "};
        out += '(';
        print(e.lhs(), out);
        out += symbol[static_cast<int>(e.op())];
        print(e.rhs(), out);
        out += ')';
        return;
    }
    case Op::pow:
        out += '(';
        print(e.lhs(), out);
        out += '^';
        out += std::to_string(e.exponent());
        out += ')';
        return;
    case Op::neg:
        out += "(-";
        print(e.lhs(), out);
        out += ')';
        return;
    case Op::call:
        out += primitive_name(e.primitive());
        out += '(';
        print(e.lhs(), out);
        out += ')';
        return;
    }
}

}  // namespace detail

inline std::string to_string(const Expr& e) {
    std::string out;
    detail::print(e, out);
    return out;
}

/// Node-for-node equality (same shape, same literals).
inline bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.node() == b.node()) return true;
    if (a.op() != b.op()) return false;
    switch (a.op()) {
    case Op::constant: return a.value() == b.value();
    case Op::variable: return a.index() == b.index();
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div: return structurally_equal(a.lhs(), b.lhs()) && structurally_equal(a.rhs(), b.rhs());
    case Op::pow: return a.exponent() == b.exponent() && structurally_equal(a.lhs(), b.lhs());
    case Op::neg: return structurally_equal(a.lhs(), b.lhs());
    case Op::call: return a.primitive() == b.primitive() && structurally_equal(a.lhs(), b.lhs());
    }
    return false;
}

}  // namespace weil
