#pragma once

/**
 * @file parse.hpp
 * @brief Recursive-descent parser for expressions over x1..xn.
 *
 *   expr     := term (('+' | '-') term)*
 *   term     := unary (('*' | '/') unary)*
 *   unary    := '-' unary | power
 *   power    := primary ('^' exponent)?
 *   exponent := '-'? int ('^' exponent)? | '(' '-'? int ')'
 *   primary  := number | ident | '(' expr ')' | func '(' expr ')'
 *
 * '^' binds tighter than unary minus, so -x1^2 is -(x1^2). Exponents are
 * integer literals; a chain x^a^b groups to the right and is folded to the
 * single integer a^b.
 */

#include <cctype>
#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>

#include "weil/expr.hpp"

namespace weil {

namespace detail {

class ExprParser {
public:
    ExprParser(std::string_view text, int dimension) : text_(text), n_(dimension) {}

    Expr parse() {
        Expr e = parse_expr();
        skip_space();
        if (i_ < text_.size()) throw SyntaxError("unexpected character '" + std::string(1, text_[i_]) + "'", i_);
        return e;
    }

private:
    Expr parse_expr() {
        Expr e = parse_term();
        for (;;) {
            if (accept('+')) e = Expr::make_binary(Op::add, e, parse_term());
            else if (accept('-')) e = Expr::make_binary(Op::sub, e, parse_term());
            else return e;
        }
    }

    Expr parse_term() {
        Expr e = parse_unary();
        for (;;) {
            if (accept('*')) e = Expr::make_binary(Op::mul, e, parse_unary());
            else if (accept('/')) e = Expr::make_binary(Op::div, e, parse_unary());
            else return e;
        }
    }

    Expr parse_unary() {
        if (accept('-')) return Expr::make_neg(parse_unary());
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_primary();
        if (!accept('^')) return base;
        return Expr::make_pow(base, parse_exponent());
    }

    int parse_exponent() {
        const std::size_t at = pos();
        long long k = 0;
        if (accept('(')) {
            const bool negative = accept('-');
            k = parse_int();
            if (negative) k = -k;
            expect(')');
        } else {
            const bool negative = accept('-');
            k = parse_int();
            if (negative) k = -k;
        }
        if (accept('^')) {
            const int e = parse_exponent();
            if (e < 0) throw SyntaxError("negative exponent in exponent chain", at);
            long long folded = 1;
            for (int j = 0; j < e; ++j) {
                folded *= k;
                if (folded > 1'000'000 || folded < -1'000'000) throw SyntaxError("exponent too large", at);
            }
            k = folded;
        }
        if (k > 1'000'000 || k < -1'000'000) throw SyntaxError("exponent too large", at);
        return static_cast<int>(k);
    }

    long long parse_int() {
        skip_space();
        const std::size_t start = i_;
        long long v = 0;
        while (i_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i_]))) {
            v = v * 10 + (text_[i_] - '0');
            if (v > 1'000'000'000) throw SyntaxError("exponent too large", start);
            ++i_;
        }
        if (i_ == start) throw SyntaxError("expected integer exponent", start);
        if (i_ < text_.size() && (text_[i_] == '.' || text_[i_] == 'e' || text_[i_] == 'E'))
            throw SyntaxError("exponent must be an integer; write exp(a*log(x)) for real powers", start);
        return v;
    }

    Expr parse_primary() {
        skip_space();
        if (i_ >= text_.size()) throw SyntaxError("unexpected end of input", i_);
        const char c = text_[i_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (c == '(') {
            ++i_;
            Expr e = parse_expr();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        throw SyntaxError("unexpected character '" + std::string(1, c) + "'", i_);
    }

    Expr parse_number() {
        const std::size_t start = i_;
        auto digits = [&] {
            const std::size_t s = i_;
            while (i_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i_]))) ++i_;
            return i_ > s;
        };
        bool any = digits();
        if (i_ < text_.size() && text_[i_] == '.') {
            ++i_;
            any = digits() || any;
        }
        if (!any) throw SyntaxError("malformed number", start);
        if (i_ < text_.size() && (text_[i_] == 'e' || text_[i_] == 'E')) {
            ++i_;
            if (i_ < text_.size() && (text_[i_] == '+' || text_[i_] == '-')) ++i_;
            if (!digits()) throw SyntaxError("malformed exponent in number", start);
        }
        double value = 0.0;
        const auto [end, ec] = std::from_chars(text_.data() + start, text_.data() + i_, value);
        if (ec != std::errc() || end != text_.data() + i_) throw SyntaxError("malformed number", start);
        return Expr::make_constant(value);
    }

    Expr parse_identifier() {
        const std::size_t start = i_;
        while (i_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_'))
            ++i_;
        const std::string_view name = text_.substr(start, i_ - start);
        for (Primitive p : {Primitive::exp, Primitive::log, Primitive::sin, Primitive::cos, Primitive::sqrt}) {
            if (name == primitive_name(p)) {
                expect('(');
                Expr arg = parse_expr();
                expect(')');
                return Expr::make_call(p, arg);
            }
        }
        if (name.size() >= 2 && name[0] == 'x' && name[1] != '0') {
            bool numeric = true;
            for (std::size_t k = 1; k < name.size(); ++k)
                numeric = numeric && std::isdigit(static_cast<unsigned char>(name[k]));
            if (numeric) {
                int index = 0;
                const auto [end, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
                if (ec != std::errc() || index > n_)
                    throw VariableOutOfRange("variable " + std::string(name) + " exceeds dimension " +
                                                 std::to_string(n_),
                                             start);
                return Expr::make_variable(index);
            }
        }
        throw UnknownIdentifier("unknown identifier '" + std::string(name) + "'", start);
    }

    void skip_space() {
        while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
    }
    std::size_t pos() {
        skip_space();
        return i_;
    }
    bool accept(char c) {
        skip_space();
        if (i_ < text_.size() && text_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) throw SyntaxError(std::string("expected '") + c + "'", pos());
    }

    std::string_view text_;
    int n_;
    std::size_t i_ = 0;
};

}  // namespace detail

/// Parses `source` as a function on R^n. Positions in errors are 0-based offsets.
inline Expr parse(std::string_view source, int n) { return detail::ExprParser(source, n).parse(); }

}  // namespace weil
