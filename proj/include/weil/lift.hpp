#pragma once

/**
 * @file lift.hpp
 * @brief Prolongation of functions, vector fields and forms from R^n to M^A.
 *
 * A-valued functions on M^A are represented by the finite sums
 *     phi = sum_k a_k * f_k^A        (a_k in A, f_k an expression)
 * This class contains every lift and every A-constant and is closed under
 * sums, products (f^A g^A = (fg)^A), field brackets and the A-linear
 * extension X -> X~ of derivations, so everything below stays symbolic.
 *
 * Term lists are never normalized; identities are checked by evaluation.
 */

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "weil/eval.hpp"
#include "weil/linalg.hpp"

namespace weil {

struct LiftedTerm {
    WeilElement coeff;
    Expr fn;
};

class LiftedFunction {
public:
    LiftedFunction(AlgebraPtr alg, int n) : alg_(std::move(alg)), n_(n) {}

    /// f^A
    static LiftedFunction lift(const AlgebraPtr& alg, int n, const Expr& f) {
        LiftedFunction phi(alg, n);
        phi.add_term(WeilElement::unit(alg), f);
        return phi;
    }
    /// a * 1^A
    static LiftedFunction constant(const WeilElement& a, int n) {
        LiftedFunction phi(a.algebra(), n);
        phi.add_term(a, 1.0);
        return phi;
    }

    const AlgebraPtr& algebra() const noexcept { return alg_; }
    int dimension() const noexcept { return n_; }
    const std::vector<LiftedTerm>& terms() const noexcept { return terms_; }

    void add_term(WeilElement a, Expr f) {
        require_same_algebra(alg_, a.algebra());
        if (f.max_variable() > n_)
            throw DimensionMismatch("expression uses x" + std::to_string(f.max_variable()) +
                                    " on R^" + std::to_string(n_));
        if (a.is_zero() || f.is_constant(0.0)) return;
        terms_.push_back({std::move(a), std::move(f)});
    }

    /// phi(xi) = sum a_k f_k^A(xi)
    WeilElement operator()(const NearPoint& xi) const {
        require_same_algebra(alg_, xi.algebra);
        WeilElement sum = WeilElement::zero(alg_);
        for (const auto& t : terms_) sum += t.coeff * eval_weil(t.fn, xi);
        return sum;
    }

    LiftedFunction& operator+=(const LiftedFunction& o) {
        check_compatible(o);
        for (const auto& t : o.terms_) terms_.push_back(t);
        return *this;
    }
    LiftedFunction& operator-=(const LiftedFunction& o) { return *this += -o; }

    friend LiftedFunction operator+(LiftedFunction a, const LiftedFunction& b) { return a += b; }
    friend LiftedFunction operator-(LiftedFunction a, const LiftedFunction& b) { return a -= b; }
    friend LiftedFunction operator-(LiftedFunction a) {
        for (auto& t : a.terms_) t.coeff = -t.coeff;
        return a;
    }
    friend LiftedFunction operator*(const WeilElement& a, const LiftedFunction& phi) {
        require_same_algebra(a.algebra(), phi.alg_);
        LiftedFunction out(phi.alg_, phi.n_);
        for (const auto& t : phi.terms_) out.add_term(a * t.coeff, t.fn);
        return out;
    }
    friend LiftedFunction operator*(double s, LiftedFunction phi) {
        for (auto& t : phi.terms_) t.coeff *= s;
        return phi;
    }
    /// Pointwise product, using f^A g^A = (fg)^A.
    friend LiftedFunction operator*(const LiftedFunction& a, const LiftedFunction& b) {
        a.check_compatible(b);
        LiftedFunction out(a.alg_, a.n_);
        for (const auto& s : a.terms_)
            for (const auto& t : b.terms_) out.add_term(s.coeff * t.coeff, s.fn * t.fn);
        return out;
    }

private:
    void check_compatible(const LiftedFunction& o) const {
        require_same_algebra(alg_, o.alg_);
        if (n_ != o.n_) throw DimensionMismatch("lifted functions on different dimensions");
    }

    AlgebraPtr alg_;
    int n_;
    std::vector<LiftedTerm> terms_;
};

inline LiftedFunction lift_function(const AlgebraPtr& alg, int n, const Expr& f) {
    return LiftedFunction::lift(alg, n, f);
}

/// Real view xi -> a_alpha^*(phi(xi)) of an A-valued function.
class ComponentFunction {
public:
    ComponentFunction(LiftedFunction phi, std::size_t alpha) : phi_(std::move(phi)), alpha_(alpha) {
        if (alpha_ >= phi_.algebra()->dim())
            throw IndexOutOfRange("component " + std::to_string(alpha_) + " of an algebra of dimension " +
                                  std::to_string(phi_.algebra()->dim()));
    }
    double operator()(const NearPoint& xi) const { return phi_(xi)[alpha_]; }
    /// Evaluates on the n * dim(A) real coordinates of M^A, coordinate-major.
    double operator()(std::span<const double> coordinates) const {
        return (*this)(NearPoint::from_real_coordinates(phi_.algebra(), static_cast<std::size_t>(phi_.dimension()),
                                                        coordinates));
    }

private:
    LiftedFunction phi_;
    std::size_t alpha_;
};

inline ComponentFunction component_extract(const LiftedFunction& phi, std::size_t alpha) {
    return ComponentFunction(phi, alpha);
}

// Vector fields ----------------------------------------------------------------

/// theta = sum theta^i d/dx_i on R^n.
struct VectorFieldBase {
    std::vector<Expr> components;

    int dimension() const noexcept { return static_cast<int>(components.size()); }

    /// theta(f) = sum theta^i d_i f
    Expr operator()(const Expr& f) const {
        Expr sum = 0.0;
        for (std::size_t i = 0; i < components.size(); ++i)
            sum = sum + components[i] * partial(f, static_cast<int>(i) + 1);
        return sum;
    }
};

inline VectorFieldBase coordinate_field(int n, int i) {
    VectorFieldBase theta{std::vector<Expr>(static_cast<std::size_t>(n), Expr(0.0))};
    theta.components[static_cast<std::size_t>(i)] = 1.0;
    return theta;
}

/// [theta, eta]^i = theta(eta^i) - eta(theta^i)
inline VectorFieldBase lie_bracket(const VectorFieldBase& theta, const VectorFieldBase& eta) {
    if (theta.dimension() != eta.dimension()) throw DimensionMismatch("fields on different dimensions");
    VectorFieldBase out;
    for (int i = 0; i < theta.dimension(); ++i)
        out.components.push_back(theta(eta.components[i]) - eta(theta.components[i]));
    return out;
}

/**
 * Vector field on M^A as a derivation C^inf(R^n) -> C^inf(M^A, A):
 *     X(f) = sum_i X^i (d_i f)^A.
 *
 * Components are either lifted-class functions (symbolic) or only
 * evaluable at a point, as for Hamiltonian fields of a non-constant form.
 * Symbolic operations on a pointwise field throw NotSymbolic.
 */
class VectorFieldA {
public:
    using PointwiseComponents = std::function<WeilVector(const NearPoint&)>;

    VectorFieldA(AlgebraPtr alg, int n, std::vector<LiftedFunction> components)
        : alg_(std::move(alg)), n_(n), symbolic_(std::move(components)) {
        if (static_cast<int>(symbolic_->size()) != n_) throw DimensionMismatch("need one component per coordinate");
        for (const auto& c : *symbolic_) {
            require_same_algebra(alg_, c.algebra());
            if (c.dimension() != n_) throw DimensionMismatch("component on a different dimension");
        }
    }

    static VectorFieldA pointwise(AlgebraPtr alg, int n, PointwiseComponents fn) {
        VectorFieldA x(std::move(alg), n);
        x.pointwise_ = std::move(fn);
        return x;
    }

    const AlgebraPtr& algebra() const noexcept { return alg_; }
    int dimension() const noexcept { return n_; }
    bool is_symbolic() const noexcept { return symbolic_.has_value(); }

    const std::vector<LiftedFunction>& components() const {
        if (!symbolic_) throw NotSymbolic("vector field has only pointwise components");
        return *symbolic_;
    }

    WeilVector at(const NearPoint& xi) const {
        if (!symbolic_) return pointwise_(xi);
        WeilVector out;
        out.reserve(symbolic_->size());
        for (const auto& c : *symbolic_) out.push_back(c(xi));
        return out;
    }

    /// X(f) as a lifted-class function.
    LiftedFunction operator()(const Expr& f) const {
        LiftedFunction sum(alg_, n_);
        const auto& comps = components();
        for (int i = 0; i < n_; ++i) {
            const Expr df = partial(f, i + 1);
            if (df.is_constant(0.0)) continue;
            sum += comps[static_cast<std::size_t>(i)] * LiftedFunction::lift(alg_, n_, df);
        }
        return sum;
    }

    /// X(f)(xi); works for pointwise fields too.
    WeilElement apply_at(const Expr& f, const NearPoint& xi) const { return apply_at(f, xi, at(xi)); }

    WeilElement apply_at(const Expr& f, const NearPoint& xi, const WeilVector& components_at_xi) const {
        WeilElement sum = WeilElement::zero(alg_);
        for (int i = 0; i < n_; ++i) {
            const Expr df = partial(f, i + 1);
            if (df.is_constant(0.0)) continue;
            sum += components_at_xi[static_cast<std::size_t>(i)] * eval_weil(df, xi);
        }
        return sum;
    }

    friend VectorFieldA operator+(const VectorFieldA& x, const VectorFieldA& y) {
        x.check_compatible(y);
        std::vector<LiftedFunction> c;
        for (int i = 0; i < x.n_; ++i) c.push_back(x.components()[i] + y.components()[i]);
        return {x.alg_, x.n_, std::move(c)};
    }
    friend VectorFieldA operator-(const VectorFieldA& x, const VectorFieldA& y) {
        x.check_compatible(y);
        std::vector<LiftedFunction> c;
        for (int i = 0; i < x.n_; ++i) c.push_back(x.components()[i] - y.components()[i]);
        return {x.alg_, x.n_, std::move(c)};
    }
    /// Module structure over C^inf(M^A, A).
    friend VectorFieldA operator*(const LiftedFunction& phi, const VectorFieldA& x) {
        std::vector<LiftedFunction> c;
        for (const auto& comp : x.components()) c.push_back(phi * comp);
        return {x.alg_, x.n_, std::move(c)};
    }

private:
    VectorFieldA(AlgebraPtr alg, int n) : alg_(std::move(alg)), n_(n) {}

    void check_compatible(const VectorFieldA& o) const {
        require_same_algebra(alg_, o.alg_);
        if (n_ != o.n_) throw DimensionMismatch("fields on different dimensions");
    }

    AlgebraPtr alg_;
    int n_;
    std::optional<std::vector<LiftedFunction>> symbolic_;
    PointwiseComponents pointwise_;
};

/// theta^A: components are the lifts of theta's components.
inline VectorFieldA lift_vector_field(const AlgebraPtr& alg, const VectorFieldBase& theta) {
    std::vector<LiftedFunction> c;
    for (const auto& comp : theta.components) c.push_back(LiftedFunction::lift(alg, theta.dimension(), comp));
    return {alg, theta.dimension(), std::move(c)};
}

/// (d/dx_i)^A, i 0-based.
inline VectorFieldA coordinate_field_a(const AlgebraPtr& alg, int n, int i) {
    return lift_vector_field(alg, coordinate_field(n, i));
}

inline void require_compatible(const VectorFieldA& x, const LiftedFunction& phi) {
    require_same_algebra(x.algebra(), phi.algebra());
    if (x.dimension() != phi.dimension()) throw DimensionMismatch("field and function on different dimensions");
}

/// X~(sum a f^A) = sum a X(f): the A-linear derivation extending X.
inline LiftedFunction extend_derivation(const VectorFieldA& x, const LiftedFunction& phi) {
    require_compatible(x, phi);
    LiftedFunction out(phi.algebra(), phi.dimension());
    for (const auto& t : phi.terms()) out += t.coeff * x(t.fn);
    return out;
}

/// X~(phi)(xi), also for pointwise fields.
inline WeilElement extend_derivation_at(const VectorFieldA& x, const LiftedFunction& phi, const NearPoint& xi) {
    require_compatible(x, phi);
    const WeilVector comps = x.at(xi);
    WeilElement sum = WeilElement::zero(phi.algebra());
    for (const auto& t : phi.terms()) sum += t.coeff * x.apply_at(t.fn, xi, comps);
    return sum;
}

/// [X, Y]^i = X~(Y^i) - Y~(X^i)
inline VectorFieldA bracket_fields(const VectorFieldA& x, const VectorFieldA& y) {
    require_same_algebra(x.algebra(), y.algebra());
    if (x.dimension() != y.dimension()) throw DimensionMismatch("fields on different dimensions");
    if (!x.is_symbolic() || !y.is_symbolic())
        throw UnrepresentableBracket("bracket of a pointwise field leaves the lifted class");
    std::vector<LiftedFunction> c;
    for (int i = 0; i < x.dimension(); ++i)
        c.push_back(extend_derivation(x, y.components()[i]) - extend_derivation(y, x.components()[i]));
    return {x.algebra(), x.dimension(), std::move(c)};
}

// Forms ------------------------------------------------------------------------

/// Strictly increasing 0-based coordinate indices.
using MultiIndex = std::vector<int>;

namespace detail {

/// Sorts `idx` in place; returns the permutation sign, or 0 on a repeated index.
inline int sort_with_sign(MultiIndex& idx) {
    int sign = 1;
    for (std::size_t i = 1; i < idx.size(); ++i)
        for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
            if (idx[j - 1] == idx[j]) return 0;
            std::swap(idx[j - 1], idx[j]);
            sign = -sign;
        }
    return sign;
}

/// All permutations of 0..p-1 with their signs.
inline std::vector<std::pair<std::vector<int>, int>> signed_permutations(int p) {
    std::vector<int> perm(static_cast<std::size_t>(p));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::pair<std::vector<int>, int>> out;
    do {
        MultiIndex copy = perm;
        out.emplace_back(perm, sort_with_sign(copy));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

/// sum over permutations of sign * prod_k m[k][perm[k]], for any commutative ring.
template <class T>
T leibniz_determinant(const std::vector<std::vector<T>>& m, T zero, const T& one) {
    const int p = static_cast<int>(m.size());
    for (const auto& [perm, sign] : signed_permutations(p)) {
        T prod = one;
        for (int k = 0; k < p; ++k) prod = prod * m[k][perm[k]];
        zero = sign > 0 ? zero + prod : zero - prod;
    }
    return zero;
}

}  // namespace detail

inline std::vector<MultiIndex> increasing_indices(int n, int p) {
    std::vector<MultiIndex> out;
    if (p < 0 || p > n) return out;
    MultiIndex idx(static_cast<std::size_t>(p));
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
        out.push_back(idx);
        int k = p - 1;
        while (k >= 0 && idx[k] == n - p + k) --k;
        if (k < 0) return out;
        ++idx[k];
        for (int j = k + 1; j < p; ++j) idx[j] = idx[j - 1] + 1;
    }
}

/// Differential p-form sum_I w_I dx^I on R^n with expression coefficients.
struct DifferentialForm {
    int dimension = 0;
    int degree = 0;
    std::map<MultiIndex, Expr> coeffs;

    static DifferentialForm function(int n, const Expr& f) {
        DifferentialForm w{n, 0, {}};
        w.add({}, f);
        return w;
    }

    /// Adds c dx^{idx}; idx in any order, signs and repeats handled.
    void add(MultiIndex idx, const Expr& c) {
        if (static_cast<int>(idx.size()) != degree) throw DimensionMismatch("multi-index of wrong degree");
        for (int i : idx)
            if (i < 0 || i >= dimension) throw IndexOutOfRange("form index out of range");
        const int sign = detail::sort_with_sign(idx);
        if (sign == 0 || c.is_constant(0.0)) return;
        auto it = coeffs.find(idx);
        const Expr term = sign > 0 ? c : -c;
        if (it == coeffs.end()) coeffs.emplace(std::move(idx), term);
        else it->second = it->second + term;
    }

    Expr coefficient(const MultiIndex& idx) const {
        auto it = coeffs.find(idx);
        return it == coeffs.end() ? Expr(0.0) : it->second;
    }
};

inline DifferentialForm exterior_derivative(const DifferentialForm& w) {
    DifferentialForm dw{w.dimension, w.degree + 1, {}};
    for (const auto& [idx, c] : w.coeffs)
        for (int j = 0; j < w.dimension; ++j) {
            MultiIndex up{j};
            up.insert(up.end(), idx.begin(), idx.end());
            dw.add(std::move(up), partial(c, j + 1));
        }
    return dw;
}

/// w(theta_1, .., theta_p) = sum_I w_I det[theta_k^{I_l}]
inline Expr apply_form(const DifferentialForm& w, const std::vector<VectorFieldBase>& fields) {
    if (static_cast<int>(fields.size()) != w.degree) throw DimensionMismatch("wrong number of arguments for form");
    Expr sum = 0.0;
    for (const auto& [idx, c] : w.coeffs) {
        std::vector<std::vector<Expr>> m(fields.size());
        for (std::size_t k = 0; k < fields.size(); ++k)
            for (int i : idx) m[k].push_back(fields[k].components[static_cast<std::size_t>(i)]);
        sum = sum + c * detail::leibniz_determinant<Expr>(m, 0.0, 1.0);
    }
    return sum;
}

/// First-slot contraction (i_theta w)(v_1..v_{p-1}) = w(theta, v_1, ..).
inline DifferentialForm interior_product(const VectorFieldBase& theta, const DifferentialForm& w) {
    if (w.degree < 1) throw DimensionMismatch("interior product of a 0-form");
    DifferentialForm out{w.dimension, w.degree - 1, {}};
    for (const auto& [idx, c] : w.coeffs)
        for (std::size_t l = 0; l < idx.size(); ++l) {
            MultiIndex rest = idx;
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(l));
            const Expr term = theta.components[static_cast<std::size_t>(idx[l])] * c;
            out.add(std::move(rest), (l % 2 == 0) ? term : -term);
        }
    return out;
}

/// A p-form evaluated at one point of M^A: coefficients in A.
struct FormValue {
    AlgebraPtr algebra;
    int dimension = 0;
    int degree = 0;
    std::map<MultiIndex, WeilElement> coeffs;

    WeilElement coefficient(const MultiIndex& idx) const {
        auto it = coeffs.find(idx);
        return it == coeffs.end() ? WeilElement::zero(algebra) : it->second;
    }

    /// Value on p tangent vectors given by their A-components.
    WeilElement operator()(const std::vector<WeilVector>& args) const {
        if (static_cast<int>(args.size()) != degree) throw DimensionMismatch("wrong number of arguments for form");
        WeilElement sum = WeilElement::zero(algebra);
        const WeilElement zero = WeilElement::zero(algebra), one = WeilElement::unit(algebra);
        for (const auto& [idx, c] : coeffs) {
            std::vector<WeilVector> m(args.size());
            for (std::size_t k = 0; k < args.size(); ++k)
                for (int i : idx) m[k].push_back(args[k][static_cast<std::size_t>(i)]);
            sum += c * detail::leibniz_determinant(m, zero, one);
        }
        return sum;
    }
};

inline FormValue interior_product(const WeilVector& x, const FormValue& w) {
    if (w.degree < 1) throw DimensionMismatch("interior product of a 0-form");
    FormValue out{w.algebra, w.dimension, w.degree - 1, {}};
    for (const auto& [idx, c] : w.coeffs)
        for (std::size_t l = 0; l < idx.size(); ++l) {
            MultiIndex rest = idx;
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(l));
            WeilElement term = x[static_cast<std::size_t>(idx[l])] * c;
            if (l % 2) term = -term;
            auto it = out.coeffs.find(rest);
            if (it == out.coeffs.end()) out.coeffs.emplace(std::move(rest), std::move(term));
            else it->second += term;
        }
    return out;
}

/// Differential A-form of degree p with lifted-class coefficients.
class FormA {
public:
    FormA(AlgebraPtr alg, int n, int p) : alg_(std::move(alg)), n_(n), p_(p) {}

    const AlgebraPtr& algebra() const noexcept { return alg_; }
    int dimension() const noexcept { return n_; }
    int degree() const noexcept { return p_; }
    const std::map<MultiIndex, LiftedFunction>& coeffs() const noexcept { return coeffs_; }

    LiftedFunction coefficient(const MultiIndex& idx) const {
        auto it = coeffs_.find(idx);
        return it == coeffs_.end() ? LiftedFunction(alg_, n_) : it->second;
    }

    /// Adds c dx^{idx}; idx in any order.
    void add(MultiIndex idx, const LiftedFunction& c) {
        if (static_cast<int>(idx.size()) != p_) throw DimensionMismatch("multi-index of wrong degree");
        for (int i : idx)
            if (i < 0 || i >= n_) throw IndexOutOfRange("form index out of range");
        const int sign = detail::sort_with_sign(idx);
        if (sign == 0 || c.terms().empty()) return;
        const LiftedFunction term = sign > 0 ? c : -c;
        auto it = coeffs_.find(idx);
        if (it == coeffs_.end()) coeffs_.emplace(std::move(idx), term);
        else it->second += term;
    }

    FormValue at(const NearPoint& xi) const {
        FormValue v{alg_, n_, p_, {}};
        for (const auto& [idx, c] : coeffs_) v.coeffs.emplace(idx, c(xi));
        return v;
    }

    static FormA function(const LiftedFunction& phi) {
        FormA w(phi.algebra(), phi.dimension(), 0);
        w.add({}, phi);
        return w;
    }

private:
    AlgebraPtr alg_;
    int n_, p_;
    std::map<MultiIndex, LiftedFunction> coeffs_;
};

/// omega^A: coefficientwise lift, so omega^A(theta_1^A, ..) = [omega(theta_1, ..)]^A.
inline FormA lift_form(const AlgebraPtr& alg, const DifferentialForm& w) {
    FormA out(alg, w.dimension, w.degree);
    for (const auto& [idx, c] : w.coeffs) out.add(idx, LiftedFunction::lift(alg, w.dimension, c));
    return out;
}

/// d^A on the lifted class: d^A(sum a w^A) = sum a (dw)^A.
inline FormA d_A(const FormA& eta) {
    FormA out(eta.algebra(), eta.dimension(), eta.degree() + 1);
    for (const auto& [idx, c] : eta.coeffs())
        for (const auto& t : c.terms())
            for (int j = 0; j < eta.dimension(); ++j) {
                const Expr df = partial(t.fn, j + 1);
                if (df.is_constant(0.0)) continue;
                MultiIndex up{j};
                up.insert(up.end(), idx.begin(), idx.end());
                LiftedFunction term(eta.algebra(), eta.dimension());
                term.add_term(t.coeff, df);
                out.add(std::move(up), term);
            }
    return out;
}

/// eta(X_1, .., X_p) as a lifted-class function (symbolic fields).
inline LiftedFunction apply_form(const FormA& eta, std::span<const VectorFieldA> fields) {
    if (static_cast<int>(fields.size()) != eta.degree()) throw DimensionMismatch("wrong number of arguments for form");
    LiftedFunction sum(eta.algebra(), eta.dimension());
    const LiftedFunction zero(eta.algebra(), eta.dimension());
    const LiftedFunction one = LiftedFunction::constant(WeilElement::unit(eta.algebra()), eta.dimension());
    for (const auto& [idx, c] : eta.coeffs()) {
        std::vector<std::vector<LiftedFunction>> m(fields.size());
        for (std::size_t k = 0; k < fields.size(); ++k)
            for (int i : idx) m[k].push_back(fields[k].components()[static_cast<std::size_t>(i)]);
        sum += c * detail::leibniz_determinant(m, zero, one);
    }
    return sum;
}

/// eta(X_1, .., X_p)(xi); fields may be pointwise.
inline WeilElement apply_form_at(const FormA& eta, std::span<const VectorFieldA> fields, const NearPoint& xi) {
    std::vector<WeilVector> args;
    for (const auto& x : fields) args.push_back(x.at(xi));
    return eta.at(xi)(args);
}

/// i_X eta, first slot.
inline FormA interior_product(const VectorFieldA& x, const FormA& eta) {
    if (eta.degree() < 1) throw DimensionMismatch("interior product of a 0-form");
    FormA out(eta.algebra(), eta.dimension(), eta.degree() - 1);
    for (const auto& [idx, c] : eta.coeffs())
        for (std::size_t l = 0; l < idx.size(); ++l) {
            MultiIndex rest = idx;
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(l));
            const LiftedFunction term = x.components()[static_cast<std::size_t>(idx[l])] * c;
            out.add(std::move(rest), (l % 2 == 0) ? term : -term);
        }
    return out;
}

/**
 * Evaluates the invariant formula for the cohomology operator directly:
 *   (d^A eta)(X_1..X_{p+1}) = sum_i (-1)^{i-1} X_i~[eta(.. ^X_i ..)]
 *                           + sum_{i<j} (-1)^{i+j} eta([X_i,X_j], .. ^X_i .. ^X_j ..)
 * Independent of d_A; used to cross-check it.
 */
inline WeilElement d_A_palais_oracle(const FormA& eta, std::span<const VectorFieldA> fields, const NearPoint& xi) {
    const int p = eta.degree();
    if (static_cast<int>(fields.size()) != p + 1) throw DimensionMismatch("need degree + 1 fields");
    for (const auto& x : fields)
        if (!x.is_symbolic()) throw UnrepresentableBracket("brackets of pointwise fields leave the lifted class");
    WeilElement sum = WeilElement::zero(eta.algebra());
    for (int i = 0; i < p + 1; ++i) {
        std::vector<VectorFieldA> rest;
        for (int k = 0; k < p + 1; ++k)
            if (k != i) rest.push_back(fields[static_cast<std::size_t>(k)]);
        const LiftedFunction inner = apply_form(eta, rest);
        const WeilElement term = extend_derivation_at(fields[static_cast<std::size_t>(i)], inner, xi);
        sum += (i % 2 == 0) ? term : -term;
    }
    for (int i = 0; i < p + 1; ++i)
        for (int j = i + 1; j < p + 1; ++j) {
            std::vector<VectorFieldA> args{
                bracket_fields(fields[static_cast<std::size_t>(i)], fields[static_cast<std::size_t>(j)])};
            for (int k = 0; k < p + 1; ++k)
                if (k != i && k != j) args.push_back(fields[static_cast<std::size_t>(k)]);
            const WeilElement term = apply_form(eta, args)(xi);
            // 1-based (-1)^{(i+1)+(j+1)} = (-1)^{i+j}
            sum += ((i + j) % 2 == 0) ? term : -term;
        }
    return sum;
}

// Random lifted-class samples ------------------------------------------------------

/// Sum of 1-4 monomials of degree <= max_degree with coefficients in [-1,1].
inline Expr random_polynomial(Rng& rng, int n, int max_degree = 3) {
    Expr sum = 0.0;
    const int terms = uniform_int(rng, 1, 4);
    for (int t = 0; t < terms; ++t) {
        Expr mono = uniform(rng, -1.0, 1.0);
        const int degree = uniform_int(rng, 0, max_degree);
        for (int d = 0; d < degree && n > 0; ++d) mono = mono * var(uniform_int(rng, 1, n));
        sum = sum + mono;
    }
    return sum;
}

/// 2-4 terms a * f^A with a uniform in [-1,1]^r and f a random polynomial.
inline LiftedFunction random_lifted_function(Rng& rng, const AlgebraPtr& alg, int n, int max_degree = 3) {
    LiftedFunction phi(alg, n);
    const int terms = uniform_int(rng, 2, 4);
    for (int t = 0; t < terms; ++t) {
        WeilElement a = random_element(rng, alg);
        phi.add_term(std::move(a), random_polynomial(rng, n, max_degree));
    }
    return phi;
}

inline VectorFieldA random_field(Rng& rng, const AlgebraPtr& alg, int n, int max_degree = 2) {
    std::vector<LiftedFunction> c;
    for (int i = 0; i < n; ++i) c.push_back(random_lifted_function(rng, alg, n, max_degree));
    return {alg, n, std::move(c)};
}

}  // namespace weil
