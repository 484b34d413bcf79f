#pragma once

/**
 * @file eval.hpp
 * @brief Evaluation of expressions over R and over a Weil algebra.
 *
 * Evaluating f at a near point xi = (xi_1, .., xi_n) in A^n gives the lift
 * f^A(xi). Arithmetic nodes use the algebra operations; a primitive g at
 * a = c + nu (c real, nu nilpotent) is the Taylor sum
 *     sum_{k=0..h} g^(k)(c) nu^k / k!
 * which is exact because nu^{h+1} = 0. Over the dual numbers this is
 * forward-mode differentiation.
 */

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "weil/algebra.hpp"
#include "weil/expr.hpp"
#include "weil/random.hpp"

namespace weil {

/// A point of M^A in the global chart: one algebra element per coordinate.
struct NearPoint {
    AlgebraPtr algebra;
    std::vector<WeilElement> coords;

    std::size_t dimension() const noexcept { return coords.size(); }

    /// The origin x of the near point: augmentation of every coordinate.
    std::vector<double> base() const {
        std::vector<double> x;
        x.reserve(coords.size());
        for (const auto& c : coords) x.push_back(c.augmentation());
        return x;
    }

    /// Lift of a real point: coordinates x_i * 1.
    static NearPoint at(const AlgebraPtr& alg, std::span<const double> x) {
        NearPoint p{alg, {}};
        for (double v : x) p.coords.push_back(WeilElement::constant(alg, v));
        return p;
    }

    /// From the n*r real coordinates of M^A, coordinate-major.
    static NearPoint from_real_coordinates(const AlgebraPtr& alg, std::size_t n, std::span<const double> flat) {
        const std::size_t r = alg->dim();
        if (flat.size() != n * r) throw DimensionMismatch("expected n*dim(A) real coordinates");
        NearPoint p{alg, {}};
        for (std::size_t i = 0; i < n; ++i)
            p.coords.emplace_back(alg, std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(i * r),
                                                           flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * r)));
        return p;
    }
};

namespace detail {

struct RealArithmetic {
    using value_type = double;

    double constant(double c) const { return c; }
    double add(double a, double b) const { return a + b; }
    double sub(double a, double b) const { return a - b; }
    double mul(double a, double b) const { return a * b; }
    double neg(double a) const { return -a; }
    double div(double a, double b) const {
        if (b == 0.0) throw DomainError("division by zero");
        return a / b;
    }
    double pow(double a, int k) const {
        if (k < 0 && a == 0.0) throw DomainError("negative power of zero");
        return std::pow(a, k);
    }
    double call(Primitive fn, double a) const {
        switch (fn) {
        case Primitive::exp: return std::exp(a);
        case Primitive::sin: return std::sin(a);
        case Primitive::cos: return std::cos(a);
        case Primitive::log:
            if (!(a > 0.0)) throw DomainError("log of non-positive value " + std::to_string(a));
            return std::log(a);
        case Primitive::sqrt:
            if (!(a >= 0.0)) throw DomainError("sqrt of negative value " + std::to_string(a));
            return std::sqrt(a);
        }
        return 0.0;
    }
};

/// g^(k)(c)/k! for k = 0..h.
inline std::vector<double> taylor_coefficients(Primitive fn, double c, int h) {
    std::vector<double> d(static_cast<std::size_t>(h) + 1);
    switch (fn) {
    case Primitive::exp: {
        double term = std::exp(c);
        for (int k = 0; k <= h; ++k) {
            d[k] = term;
            term /= (k + 1);
        }
        break;
    }
    case Primitive::sin:
    case Primitive::cos: {
        const double s = std::sin(c), co = std::cos(c);
        // derivatives of sin cycle through sin, cos, -sin, -cos
        const double cycle_sin[4] = {s, co, -s, -co};
        const double cycle_cos[4] = {co, -s, -co, s};
        const double* cycle = fn == Primitive::sin ? cycle_sin : cycle_cos;
        double inv_fact = 1.0;
        for (int k = 0; k <= h; ++k) {
            if (k) inv_fact /= k;
            d[k] = cycle[k % 4] * inv_fact;
        }
        break;
    }
    case Primitive::log: {
        if (!(c > 0.0)) throw DomainError("log of non-positive base value " + std::to_string(c));
        d[0] = std::log(c);
        double inv_pow = 1.0;
        for (int k = 1; k <= h; ++k) {
            inv_pow /= c;
            d[k] = ((k % 2) ? 1.0 : -1.0) * inv_pow / k;
        }
        break;
    }
    case Primitive::sqrt: {
        if (!(c > 0.0)) throw DomainError("sqrt is not smooth at base value " + std::to_string(c));
        // binom(1/2, k) c^{1/2 - k}
        double binom = 1.0;
        double power = std::sqrt(c);
        for (int k = 0; k <= h; ++k) {
            if (k) {
                binom *= (0.5 - (k - 1)) / k;
                power /= c;
            }
            d[k] = binom * power;
        }
        break;
    }
    }
    return d;
}

struct WeilArithmetic {
    using value_type = WeilElement;
    AlgebraPtr alg;

    WeilElement constant(double c) const { return WeilElement::constant(alg, c); }
    WeilElement add(const WeilElement& a, const WeilElement& b) const { return a + b; }
    WeilElement sub(const WeilElement& a, const WeilElement& b) const { return a - b; }
    WeilElement mul(const WeilElement& a, const WeilElement& b) const { return a * b; }
    WeilElement neg(const WeilElement& a) const { return -a; }
    WeilElement div(const WeilElement& a, const WeilElement& b) const { return a * inverse(b); }
    WeilElement pow(const WeilElement& a, int k) const {
        if (k < 0) return weil::pow(inverse(a), -k);
        return weil::pow(a, k);
    }
    WeilElement call(Primitive fn, const WeilElement& a) const {
        const double c = a.augmentation();
        const WeilElement nu = a.nilpotent_part();
        if (nu.is_zero()) return WeilElement::constant(alg, RealArithmetic{}.call(fn, c));
        const std::vector<double> d = taylor_coefficients(fn, c, alg->height());
        WeilElement sum = WeilElement::constant(alg, d[0]);
        WeilElement power = nu;
        for (std::size_t k = 1; k < d.size(); ++k) {
            sum += power * d[k];
            if (k + 1 < d.size()) {
                power = power * nu;
                if (power.is_zero()) break;
            }
        }
        return sum;
    }

    static WeilElement inverse(const WeilElement& b) {
        try {
            return invert(b);
        } catch (const NotInvertible& e) {
            throw DomainError(std::string("division by a non-invertible element: ") + e.what());
        }
    }
};

/// Bottom-up evaluation with a per-call cache keyed on shared nodes.
template <class Arithmetic>
class Evaluator {
public:
    using Value = typename Arithmetic::value_type;

    Evaluator(const Arithmetic& arith, std::span<const Value> x) : arith_(arith), x_(x) {}

    Value operator()(const Expr& e) {
        const ExprNode* key = e.node();
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        Value v = compute(e);
        if (e.op() != Op::constant && e.op() != Op::variable) cache_.emplace(key, v);
        return v;
    }

private:
    Value compute(const Expr& e) {
        switch (e.op()) {
        case Op::constant: return arith_.constant(e.value());
        case Op::variable: {
            const auto i = static_cast<std::size_t>(e.index());
            if (i > x_.size())
                throw DimensionMismatch("variable x" + std::to_string(i) + " beyond evaluation point of dimension " +
                                        std::to_string(x_.size()));
            return x_[i - 1];
        }
        case Op::add: return arith_.add((*this)(e.lhs()), (*this)(e.rhs()));
        case Op::sub: return arith_.sub((*this)(e.lhs()), (*this)(e.rhs()));
        case Op::mul: return arith_.mul((*this)(e.lhs()), (*this)(e.rhs()));
        case Op::div: return arith_.div((*this)(e.lhs()), (*this)(e.rhs()));
        case Op::pow: return arith_.pow((*this)(e.lhs()), e.exponent());
        case Op::neg: return arith_.neg((*this)(e.lhs()));
        case Op::call: return arith_.call(e.primitive(), (*this)(e.lhs()));
        }
        return arith_.constant(0.0);
    }

    const Arithmetic& arith_;
    std::span<const Value> x_;
    std::unordered_map<const ExprNode*, Value> cache_;
};

}  // namespace detail

inline double eval_real(const Expr& f, std::span<const double> x) {
    detail::RealArithmetic arith;
    return detail::Evaluator<detail::RealArithmetic>(arith, x)(f);
}

/// f^A(xi). Throws DomainError at bad base points, AlgebraMismatch across coordinates.
inline WeilElement eval_weil(const Expr& f, const NearPoint& xi) {
    for (const auto& c : xi.coords) require_same_algebra(xi.algebra, c.algebra());
    detail::WeilArithmetic arith{xi.algebra};
    return detail::Evaluator<detail::WeilArithmetic>(arith, xi.coords)(f);
}

// Sampling ---------------------------------------------------------------------

inline std::vector<double> random_point(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::vector<double> x(n);
    for (double& v : x) v = uniform(rng, lo, hi);
    return x;
}

inline WeilElement random_element(Rng& rng, const AlgebraPtr& alg) {
    std::vector<double> c(alg->dim());
    for (double& v : c) v = uniform(rng, -1.0, 1.0);
    return {alg, std::move(c)};
}

inline WeilElement random_nilpotent(Rng& rng, const AlgebraPtr& alg) {
    WeilElement x = random_element(rng, alg);
    x[0] = 0.0;
    return x;
}

/// Near point over `base` with nilpotent parts uniform in [-1,1].
inline NearPoint random_near_point(Rng& rng, const AlgebraPtr& alg, std::span<const double> base) {
    NearPoint p{alg, {}};
    for (double b : base) {
        WeilElement c = random_nilpotent(rng, alg);
        c[0] = b;
        p.coords.push_back(std::move(c));
    }
    return p;
}

/// Base uniform in [-1,1]^n, nilpotent parts uniform in [-1,1].
inline NearPoint random_near_point(Rng& rng, const AlgebraPtr& alg, std::size_t n) {
    const std::vector<double> base = random_point(rng, n);
    return random_near_point(rng, alg, base);
}

/// Numeric identity test: |f - g| <= tol (1 + |f|) at `samples` points of [-1,1]^n.
/// Points where either side leaves its domain are redrawn, up to 10x oversampling.
inline bool expr_equal_numeric(const Expr& f, const Expr& g, int n, int samples, double tol, Rng& rng) {
    int accepted = 0;
    const int budget = 10 * samples;
    for (int attempt = 0; attempt < budget && accepted < samples; ++attempt) {
        const std::vector<double> x = random_point(rng, static_cast<std::size_t>(n));
        double fv = 0.0, gv = 0.0;
        try {
            fv = eval_real(f, x);
            gv = eval_real(g, x);
        } catch (const DomainError&) {
            continue;
        }
        if (!std::isfinite(fv) || !std::isfinite(gv)) continue;
        ++accepted;
        if (std::abs(fv - gv) > tol * (1.0 + std::abs(fv))) return false;
    }
    if (accepted < samples)
        throw SamplingExhausted("only " + std::to_string(accepted) + " of " + std::to_string(samples) +
                                " sample points were in the domain");
    return true;
}

}  // namespace weil
