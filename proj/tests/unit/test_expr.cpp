#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "weil/weil.hpp"

using namespace weil;

namespace {

double at(const Expr& f, std::vector<double> x) { return eval_real(f, x); }

/// Random expression over x1..xn built with the raw constructors.
Expr random_tree(Rng& rng, int n, int depth) {
    if (depth == 0 || uniform_int(rng, 0, 3) == 0) {
        if (uniform_int(rng, 0, 1)) return var(uniform_int(rng, 1, n));
        return Expr::make_constant(std::round(uniform(rng, -5.0, 5.0) * 1000.0) / 1000.0 + 1e-7 * uniform(rng, 0, 1));
    }
    switch (uniform_int(rng, 0, 6)) {
    case 0: return Expr::make_binary(Op::add, random_tree(rng, n, depth - 1), random_tree(rng, n, depth - 1));
    case 1: return Expr::make_binary(Op::sub, random_tree(rng, n, depth - 1), random_tree(rng, n, depth - 1));
    case 2: return Expr::make_binary(Op::mul, random_tree(rng, n, depth - 1), random_tree(rng, n, depth - 1));
    case 3: return Expr::make_binary(Op::div, random_tree(rng, n, depth - 1), random_tree(rng, n, depth - 1));
    case 4: return Expr::make_pow(random_tree(rng, n, depth - 1), uniform_int(rng, -3, 4));
    case 5: return Expr::make_neg(random_tree(rng, n, depth - 1));
    default: {
        const Primitive fns[] = {Primitive::exp, Primitive::log, Primitive::sin, Primitive::cos, Primitive::sqrt};
        return Expr::make_call(fns[uniform_int(rng, 0, 4)], random_tree(rng, n, depth - 1));
    }
    }
}

}  // namespace

TEST(Parse, Precedence) {
    EXPECT_DOUBLE_EQ(at(parse("1 + 2 * 3", 1), {0}), 7.0);
    EXPECT_DOUBLE_EQ(at(parse("2 * 3 ^ 2", 1), {0}), 18.0);
    EXPECT_DOUBLE_EQ(at(parse("-x1^2", 1), {3.0}), -9.0);
    EXPECT_DOUBLE_EQ(at(parse("(-x1)^2", 1), {3.0}), 9.0);
    EXPECT_DOUBLE_EQ(at(parse("8 / 4 / 2", 1), {0}), 1.0);
    EXPECT_DOUBLE_EQ(at(parse("8 - 4 - 2", 1), {0}), 2.0);
    EXPECT_DOUBLE_EQ(at(parse("x1^2^3", 1), {2.0}), 256.0);
    EXPECT_DOUBLE_EQ(at(parse("x1^-1", 1), {4.0}), 0.25);
    EXPECT_DOUBLE_EQ(at(parse("x1^(-2)", 1), {2.0}), 0.25);
    EXPECT_DOUBLE_EQ(at(parse("--x1", 1), {2.0}), 2.0);
    EXPECT_DOUBLE_EQ(at(parse("1.5e1 + .5", 1), {0}), 15.5);
}

TEST(Parse, Functions) {
    const Expr f = parse("x1^2 * sin(x2) + exp(x1*x2)", 2);
    const double x = 0.7, y = -1.3;
    EXPECT_NEAR(at(f, {x, y}), x * x * std::sin(y) + std::exp(x * y), 1e-15);
    EXPECT_NEAR(at(parse("sqrt(x1) + log(x1) + cos(x1)", 1), {2.0}), std::sqrt(2.0) + std::log(2.0) + std::cos(2.0),
                1e-15);
}

TEST(Parse, Errors) {
    EXPECT_THROW(parse("x3", 2), VariableOutOfRange);
    EXPECT_THROW(parse("x0", 2), UnknownIdentifier);
    EXPECT_THROW(parse("y1", 2), UnknownIdentifier);
    EXPECT_THROW(parse("tan(x1)", 2), UnknownIdentifier);
    EXPECT_THROW(parse("x1^2.5", 2), SyntaxError);
    EXPECT_THROW(parse("x1^x2", 2), SyntaxError);
    EXPECT_THROW(parse("(x1 + 1", 2), SyntaxError);
    EXPECT_THROW(parse("", 2), SyntaxError);
    EXPECT_THROW(parse("x1 +", 2), SyntaxError);
    EXPECT_THROW(parse("x1 x2", 2), SyntaxError);
    try {
        parse("x1 + x7", 3);
        FAIL();
    } catch (const VariableOutOfRange& e) {
        EXPECT_EQ(e.position(), 5u);
    }
    try {
        parse("x1 * (x2 $ 1)", 3);
        FAIL();
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.position(), 9u);
    }
}

TEST(Print, RoundTripIsStructural) {
    for (const char* src : {"x1^2*sin(x2) + exp(x1*x2)", "-x1^2", "(x1 - 2.5)/(x2 + 1e-3)", "sqrt(x1)^-3",
                            "x1 - (x2 - x1)", "0.1 + 0.2"}) {
        const Expr e = parse(src, 2);
        const Expr again = parse(to_string(e), 2);
        EXPECT_TRUE(structurally_equal(e, again)) << src << " -> " << to_string(e);
        EXPECT_EQ(to_string(again), to_string(e));
    }
}

TEST(Print, RoundTripRandomTreesBitExact) {
    Rng rng(99);
    std::vector<double> x{0.3, -0.7, 1.1};
    for (int t = 0; t < 300; ++t) {
        const Expr e = random_tree(rng, 3, 5);
        const Expr again = parse(to_string(e), 3);
        EXPECT_EQ(to_string(again), to_string(e));
        double a = 0, b = 0;
        bool ok_a = true, ok_b = true;
        try { a = eval_real(e, x); } catch (const DomainError&) { ok_a = false; }
        try { b = eval_real(again, x); } catch (const DomainError&) { ok_b = false; }
        ASSERT_EQ(ok_a, ok_b);
        if (ok_a && !std::isnan(a)) {
            EXPECT_EQ(a, b) << to_string(e);
        }
    }
}

TEST(Expr, FoldingConstructors) {
    const Expr x = var(1);
    EXPECT_TRUE((x * 0.0).is_constant(0.0));
    EXPECT_TRUE(structurally_equal(x * 1.0, x));
    EXPECT_TRUE(structurally_equal(x + 0.0, x));
    EXPECT_TRUE(structurally_equal(-(-x), x));
    EXPECT_TRUE((Expr(2.0) * Expr(3.0)).is_constant(6.0));
    EXPECT_TRUE(pow(x, 0).is_constant(1.0));
    EXPECT_EQ(x.max_variable(), 1);
    EXPECT_EQ((var(2) * var(5)).max_variable(), 5);
}

TEST(Expr, PartialExamples) {
    // d/dx1 (x1^2 * x2) = 2 x1 x2
    const Expr f = var(1) * var(1) * var(2);
    EXPECT_DOUBLE_EQ(at(partial(f, 1), {3.0, 2.0}), 12.0);
    EXPECT_DOUBLE_EQ(at(partial(f, 2), {3.0, 2.0}), 9.0);
    EXPECT_TRUE(partial(f, 3).is_constant(0.0));
    EXPECT_TRUE(partial(Expr(4.0), 1).is_constant(0.0));
    const Expr g = parse("exp(x1) * sin(x1) / (1 + x1^2) + log(x1) - sqrt(x1) + cos(x1)^3", 1);
    const double x = 0.8;
    const double expected = std::exp(x) * std::sin(x) / (1 + x * x) + std::exp(x) * std::cos(x) / (1 + x * x) -
                            std::exp(x) * std::sin(x) * 2 * x / ((1 + x * x) * (1 + x * x)) + 1 / x -
                            0.5 / std::sqrt(x) - 3 * std::cos(x) * std::cos(x) * std::sin(x);
    EXPECT_NEAR(at(partial(g, 1), {x}), expected, 1e-13);
}

TEST(Expr, PartialsCommute) {
    Rng rng(4);
    for (int t = 0; t < 50; ++t) {
        const Expr f = random_polynomial(rng, 3, 4) * exp(random_polynomial(rng, 3, 2));
        const Expr a = partial(partial(f, 1), 2), b = partial(partial(f, 2), 1);
        EXPECT_TRUE(expr_equal_numeric(a, b, 3, 10, 1e-12, rng));
    }
}

TEST(Expr, LinearityAndProductRule) {
    Rng rng(6);
    for (int t = 0; t < 50; ++t) {
        const Expr f = random_polynomial(rng, 2), g = sin(random_polynomial(rng, 2));
        for (int i = 1; i <= 2; ++i) {
            EXPECT_TRUE(expr_equal_numeric(partial(f + g, i), partial(f, i) + partial(g, i), 2, 5, 1e-12, rng));
            EXPECT_TRUE(
                expr_equal_numeric(partial(f * g, i), partial(f, i) * g + f * partial(g, i), 2, 5, 1e-12, rng));
        }
    }
}

TEST(Eval, RealDomainErrors) {
    EXPECT_THROW(eval_real(parse("log(x1)", 1), std::vector<double>{-1.0}), DomainError);
    EXPECT_THROW(eval_real(parse("sqrt(x1)", 1), std::vector<double>{-1.0}), DomainError);
    EXPECT_THROW(eval_real(parse("1/x1", 1), std::vector<double>{0.0}), DomainError);
    EXPECT_THROW(eval_real(parse("x1^-1", 1), std::vector<double>{0.0}), DomainError);
}

TEST(Eval, NumericEqualityResamplesOutsideDomain) {
    Rng rng(1);
    const Expr f = parse("exp(log(x1))", 1), g = var(1);
    EXPECT_TRUE(expr_equal_numeric(f, g, 1, 20, 1e-12, rng));
    EXPECT_FALSE(expr_equal_numeric(var(1), var(1) + 1e-3, 1, 20, 1e-9, rng));
    EXPECT_THROW(expr_equal_numeric(parse("log(-1 - x1^2)", 1), Expr(0.0), 1, 5, 1e-9, rng), SamplingExhausted);
}
