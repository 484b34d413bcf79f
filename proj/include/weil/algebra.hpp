#pragma once

/**
 * @file algebra.hpp
 * @brief Weil (local) algebras R[T1..Ts]/I for monomial ideals I.
 *
 * The surviving monomials form the basis, so the product of two basis
 * elements is either another basis element or zero. That makes the
 * multiplication table a partial permutation with 0/1 structure constants
 * and all table arithmetic exact.
 *
 * Basis order is (total degree, then exponent vector in descending lex
 * order), so index 0 is always the unit and R[T1,T2]/(T1^2,T2^2) has basis
 * {1, T1, T2, T1*T2}.
 */

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "weil/error.hpp"

namespace weil {

namespace tolerance {
/// Augmentation magnitude below which an element counts as non-invertible.
inline constexpr double invertible = 1e-12;
/// Pivot threshold for kernels of exact 0/1 maps.
inline constexpr double kernel = 1e-12;
/// Per-coefficient residual bound for local linear solves.
inline constexpr double solver_residual = 1e-9;
/// Relative singular-value threshold for numerical rank.
inline constexpr double rank = 1e-9;
}  // namespace tolerance

using Monomial = std::vector<int>;

inline int total_degree(const Monomial& m) { return std::accumulate(m.begin(), m.end(), 0); }

/// Recipe for a quotient R[T1..Ts]/I with I a monomial ideal.
struct AlgebraSpec {
    enum class Kind { truncated_powers, power_ideal, monomial_ideal };

    Kind kind = Kind::truncated_powers;
    int generators = 0;              // s
    std::vector<int> orders;         // truncated_powers: k_1..k_s
    int degree = 1;                  // power_ideal: k
    std::vector<Monomial> ideal;     // monomial_ideal: generator exponent vectors

    /// R[T1..Ts]/(T1^k1, .., Ts^ks)
    static AlgebraSpec truncated(std::vector<int> orders) {
        AlgebraSpec spec;
        spec.kind = Kind::truncated_powers;
        spec.generators = static_cast<int>(orders.size());
        spec.orders = std::move(orders);
        return spec;
    }
    /// R[T1..Ts]/(T1, .., Ts)^k
    static AlgebraSpec power(int s, int k) {
        AlgebraSpec spec;
        spec.kind = Kind::power_ideal;
        spec.generators = s;
        spec.degree = k;
        return spec;
    }
    static AlgebraSpec monomial(int s, std::vector<Monomial> generators) {
        AlgebraSpec spec;
        spec.kind = Kind::monomial_ideal;
        spec.generators = s;
        spec.ideal = std::move(generators);
        return spec;
    }

    bool in_ideal(const Monomial& m) const {
        switch (kind) {
        case Kind::truncated_powers:
            for (std::size_t i = 0; i < m.size(); ++i)
                if (m[i] >= orders[i]) return true;
            return false;
        case Kind::power_ideal:
            return total_degree(m) >= degree;
        case Kind::monomial_ideal:
            for (const auto& g : ideal) {
                bool divides = true;
                for (std::size_t i = 0; i < m.size(); ++i)
                    if (g[i] > m[i]) { divides = false; break; }
                if (divides) return true;
            }
            return false;
        }
        return false;
    }

    std::string to_string() const;
};

namespace detail {

inline std::string variable_name(int i) { return "T" + std::to_string(i + 1); }

inline std::string monomial_string(const Monomial& m, std::string_view unit = "1") {
    std::string out;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] == 0) continue;
        if (!out.empty()) out += '*';
        out += variable_name(static_cast<int>(i));
        if (m[i] > 1) out += '^' + std::to_string(m[i]);
    }
    return out.empty() ? std::string(unit) : out;
}

}  // namespace detail

inline std::string AlgebraSpec::to_string() const {
    if (generators == 0) return "R";
    std::string vars;
    for (int i = 0; i < generators; ++i) {
        if (i) vars += ',';
        vars += detail::variable_name(i);
    }
    std::string out = "R[" + vars + "]/(";
    switch (kind) {
    case Kind::truncated_powers:
        for (int i = 0; i < generators; ++i) {
            if (i) out += ',';
            out += detail::variable_name(i) + '^' + std::to_string(orders[i]);
        }
        return out + ")";
    case Kind::power_ideal:
        return out + vars + ")^" + std::to_string(degree);
    case Kind::monomial_ideal:
        for (std::size_t g = 0; g < ideal.size(); ++g) {
            if (g) out += ',';
            out += detail::monomial_string(ideal[g]);
        }
        return out + ")";
    }
    return out;
}

/// Immutable finite-dimensional local algebra; share it through AlgebraPtr.
class WeilAlgebra {
public:
    static constexpr std::size_t max_dim = 1024;
    static constexpr int annihilated = -1;

    explicit WeilAlgebra(AlgebraSpec spec) : spec_(std::move(spec)) {
        validate();
        enumerate_basis();
        build_table();
    }

    const AlgebraSpec& spec() const noexcept { return spec_; }
    std::string name() const { return spec_.to_string(); }
    std::size_t dim() const noexcept { return basis_.size(); }
    int generators() const noexcept { return spec_.generators; }
    const std::vector<Monomial>& basis() const noexcept { return basis_; }
    int height() const noexcept { return height_; }

    /// Basis indices of the monomials killed by every generator; they span ann(m).
    const std::vector<std::size_t>& ann_basis() const noexcept { return ann_basis_; }

    /// Index of e_i * e_j, or `annihilated` when the product lies in the ideal.
    int product_index(std::size_t i, std::size_t j) const { return table_[i * dim() + j]; }

    /// Non-annihilated products of e_i as (j, index of e_i * e_j).
    const std::vector<std::pair<std::size_t, std::size_t>>& products_of(std::size_t i) const {
        return products_[i];
    }

    std::optional<std::size_t> index_of(const Monomial& m) const {
        auto it = index_.find(m);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::string monomial_name(std::size_t i) const { return detail::monomial_string(basis_[i]); }

private:
    void validate() const {
        const int s = spec_.generators;
        if (s < 0) throw InvalidAlgebraSpec("negative generator count");
        switch (spec_.kind) {
        case AlgebraSpec::Kind::truncated_powers:
            if (spec_.orders.size() != static_cast<std::size_t>(s))
                throw InvalidAlgebraSpec("truncation order count differs from generator count");
            for (int k : spec_.orders)
                if (k < 1) throw InvalidAlgebraSpec("truncation orders must be >= 1");
            break;
        case AlgebraSpec::Kind::power_ideal:
            if (spec_.degree < 1) throw InvalidAlgebraSpec("power of the ideal must be >= 1");
            break;
        case AlgebraSpec::Kind::monomial_ideal: {
            std::vector<bool> pure(static_cast<std::size_t>(s), false);
            for (const auto& g : spec_.ideal) {
                if (g.size() != static_cast<std::size_t>(s))
                    throw InvalidAlgebraSpec("ideal generator has wrong number of exponents");
                int nonzero = 0, last = -1;
                for (int i = 0; i < s; ++i) {
                    if (g[i] < 0) throw InvalidAlgebraSpec("negative exponent in ideal generator");
                    if (g[i] > 0) { ++nonzero; last = i; }
                }
                if (nonzero == 0) throw InvalidAlgebraSpec("ideal contains the unit; quotient is zero");
                if (nonzero == 1) pure[static_cast<std::size_t>(last)] = true;
            }
            for (int i = 0; i < s; ++i)
                if (!pure[static_cast<std::size_t>(i)])
                    throw InfiniteDimensional("no pure power of " + detail::variable_name(i) +
                                              " in the ideal");
            break;
        }
        }
    }

    // The standard monomials form an order ideal, so a breadth-first walk
    // from 1 multiplying by generators reaches all of them.
    void enumerate_basis() {
        const auto s = static_cast<std::size_t>(spec_.generators);
        std::vector<Monomial> frontier{Monomial(s, 0)};
        std::map<Monomial, std::size_t> seen{{frontier.front(), 0}};
        std::vector<Monomial> found = frontier;
        while (!frontier.empty()) {
            std::vector<Monomial> next;
            for (const auto& m : frontier) {
                for (std::size_t i = 0; i < s; ++i) {
                    Monomial up = m;
                    ++up[i];
                    if (spec_.in_ideal(up) || seen.count(up)) continue;
                    seen.emplace(up, 0);
                    found.push_back(up);
                    next.push_back(std::move(up));
                    if (found.size() > max_dim)
                        throw AlgebraTooLarge("algebra dimension exceeds " + std::to_string(max_dim));
                }
            }
            frontier = std::move(next);
        }
        std::sort(found.begin(), found.end(), [](const Monomial& a, const Monomial& b) {
            const int da = total_degree(a), db = total_degree(b);
            if (da != db) return da < db;
            return a > b;
        });
        basis_ = std::move(found);
        for (std::size_t i = 0; i < basis_.size(); ++i) index_.emplace(basis_[i], i);
        height_ = 0;
        for (const auto& m : basis_) height_ = std::max(height_, total_degree(m));
    }

    void build_table() {
        const std::size_t r = dim(), s = static_cast<std::size_t>(spec_.generators);
        table_.assign(r * r, annihilated);
        products_.assign(r, {});
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < r; ++j) {
                Monomial m(s);
                for (std::size_t v = 0; v < s; ++v) m[v] = basis_[i][v] + basis_[j][v];
                if (auto k = index_of(m)) {
                    table_[i * r + j] = static_cast<int>(*k);
                    products_[i].emplace_back(j, *k);
                }
            }
        }
        for (std::size_t i = 0; i < r; ++i) {
            bool killed = true;
            for (std::size_t v = 0; v < s && killed; ++v) {
                Monomial m = basis_[i];
                ++m[v];
                killed = !index_of(m).has_value();
            }
            if (killed) ann_basis_.push_back(i);
        }
    }

    AlgebraSpec spec_;
    std::vector<Monomial> basis_;
    std::map<Monomial, std::size_t> index_;
    std::vector<int> table_;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> products_;
    std::vector<std::size_t> ann_basis_;
    int height_ = 0;
};

using AlgebraPtr = std::shared_ptr<const WeilAlgebra>;

inline AlgebraPtr build_algebra(const AlgebraSpec& spec) {
    return std::make_shared<const WeilAlgebra>(spec);
}

inline bool same_algebra(const AlgebraPtr& a, const AlgebraPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return a->generators() == b->generators() && a->basis() == b->basis();
}

inline void require_same_algebra(const AlgebraPtr& a, const AlgebraPtr& b) {
    if (!same_algebra(a, b))
        throw AlgebraMismatch("elements belong to different algebras: " +
                              (a ? a->name() : std::string("<none>")) + " vs " +
                              (b ? b->name() : std::string("<none>")));
}

/// Coefficient vector over the basis of a WeilAlgebra.
class WeilElement {
public:
    WeilElement() = default;
    WeilElement(AlgebraPtr algebra, std::vector<double> coeffs)
        : alg_(std::move(algebra)), c_(std::move(coeffs)) {
        if (!alg_) throw AlgebraMismatch("element without an algebra");
        if (c_.size() != alg_->dim())
            throw DimensionMismatch("coefficient vector has length " + std::to_string(c_.size()) +
                                    ", algebra dimension is " + std::to_string(alg_->dim()));
    }

    static WeilElement zero(const AlgebraPtr& alg) { return {alg, std::vector<double>(alg->dim(), 0.0)}; }
    static WeilElement constant(const AlgebraPtr& alg, double c) {
        WeilElement x = zero(alg);
        x.c_[0] = c;
        return x;
    }
    static WeilElement unit(const AlgebraPtr& alg) { return constant(alg, 1.0); }
    static WeilElement basis(const AlgebraPtr& alg, std::size_t i) {
        if (i >= alg->dim()) throw IndexOutOfRange("basis index " + std::to_string(i));
        WeilElement x = zero(alg);
        x.c_[i] = 1.0;
        return x;
    }

    const AlgebraPtr& algebra() const noexcept { return alg_; }
    std::size_t dim() const noexcept { return c_.size(); }
    std::span<const double> coeffs() const noexcept { return c_; }
    double operator[](std::size_t i) const { return c_[i]; }
    double& operator[](std::size_t i) { return c_[i]; }

    double augmentation() const { return c_.at(0); }
    WeilElement nilpotent_part() const {
        WeilElement n = *this;
        n.c_[0] = 0.0;
        return n;
    }
    bool in_maximal_ideal(double tol = 0.0) const { return std::abs(c_.at(0)) <= tol; }
    bool is_zero() const {
        return std::all_of(c_.begin(), c_.end(), [](double v) { return v == 0.0; });
    }
    double max_abs() const {
        double m = 0.0;
        for (double v : c_) m = std::max(m, std::abs(v));
        return m;
    }

    WeilElement& operator+=(const WeilElement& o) {
        require_same_algebra(alg_, o.alg_);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    WeilElement& operator-=(const WeilElement& o) {
        require_same_algebra(alg_, o.alg_);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    WeilElement& operator*=(double s) {
        for (double& v : c_) v *= s;
        return *this;
    }
    WeilElement& operator*=(const WeilElement& o) { return *this = *this * o; }

    friend WeilElement operator+(WeilElement a, const WeilElement& b) { return a += b; }
    friend WeilElement operator-(WeilElement a, const WeilElement& b) { return a -= b; }
    friend WeilElement operator-(WeilElement a) {
        for (double& v : a.c_) v = -v;
        return a;
    }
    friend WeilElement operator*(WeilElement a, double s) { return a *= s; }
    friend WeilElement operator*(double s, WeilElement a) { return a *= s; }
    friend WeilElement operator/(WeilElement a, double s) {
        for (double& v : a.c_) v /= s;
        return a;
    }

    friend WeilElement operator*(const WeilElement& a, const WeilElement& b) {
        require_same_algebra(a.alg_, b.alg_);
        const WeilAlgebra& alg = *a.alg_;
        std::vector<double> out(alg.dim(), 0.0);
        for (std::size_t i = 0; i < alg.dim(); ++i) {
            const double ai = a.c_[i];
            if (ai == 0.0) continue;
            for (const auto& [j, k] : alg.products_of(i)) out[k] += ai * b.c_[j];
        }
        return {a.alg_, std::move(out)};
    }

    friend bool operator==(const WeilElement& a, const WeilElement& b) {
        return same_algebra(a.alg_, b.alg_) && a.c_ == b.c_;
    }

private:
    AlgebraPtr alg_;
    std::vector<double> c_;
};

/// Multiplicative inverse via the finite Neumann series of the nilpotent part.
inline WeilElement invert(const WeilElement& x) {
    const double c = x.augmentation();
    if (std::abs(c) <= tolerance::invertible)
        throw NotInvertible("augmentation " + std::to_string(c) + " is zero within tolerance");
    const WeilElement q = x.nilpotent_part() * (-1.0 / c);
    // Horner: 1 + q(1 + q(1 + ...)), h+1 terms
    WeilElement acc = WeilElement::unit(x.algebra());
    for (int j = 0; j < x.algebra()->height(); ++j) acc = WeilElement::unit(x.algebra()) + q * acc;
    return acc * (1.0 / c);
}

inline WeilElement pow(const WeilElement& x, int k) {
    if (k < 0) return pow(invert(x), -k);
    WeilElement result = WeilElement::unit(x.algebra());
    WeilElement base = x;
    while (k > 0) {
        if (k & 1) result = result * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return result;
}

/// Real linear form on A, written in the dual basis.
struct LinearForm {
    AlgebraPtr algebra;
    std::vector<double> coeffs;
};

inline double eval_form(const LinearForm& psi, const WeilElement& x) {
    require_same_algebra(psi.algebra, x.algebra());
    double sum = 0.0;
    for (std::size_t i = 0; i < psi.coeffs.size(); ++i) sum += psi.coeffs[i] * x[i];
    return sum;
}

inline std::vector<LinearForm> dual_basis(const AlgebraPtr& alg) {
    std::vector<LinearForm> forms;
    for (std::size_t i = 0; i < alg->dim(); ++i) {
        LinearForm f{alg, std::vector<double>(alg->dim(), 0.0)};
        f.coeffs[i] = 1.0;
        forms.push_back(std::move(f));
    }
    return forms;
}

// ---------------------------------------------------------------------------
// Algebra spec strings
//
//   R
//   R[T1,..,Ts]/(T1^k1,..,Ts^ks)      truncated powers
//   R[T1,..,Ts]/(T1,..,Ts)^k          power of the maximal ideal
//   R[T1,..,Ts]/(m1,..,mq)            any monomials mi = T1^a*T2^b...
//
// Whitespace is ignored. With a single generator, "T" may stand for "T1".
// ---------------------------------------------------------------------------

namespace detail {

class SpecReader {
public:
    explicit SpecReader(std::string_view text) : text_(text) {}

    AlgebraSpec read() {
        expect('R');
        if (at_end()) return AlgebraSpec::truncated({});
        expect('[');
        const int s = read_variable_list();
        expect(']');
        expect('/');
        expect('(');
        std::vector<Monomial> gens;
        do {
            gens.push_back(read_monomial(s));
        } while (accept(','));
        expect(')');
        AlgebraSpec spec;
        if (accept('^')) {
            const std::size_t at = pos();
            const int k = read_int();
            bool ok = static_cast<int>(gens.size()) == s;
            for (int i = 0; ok && i < s; ++i) {
                Monomial expected(static_cast<std::size_t>(s), 0);
                expected[static_cast<std::size_t>(i)] = 1;
                ok = gens[static_cast<std::size_t>(i)] == expected;
            }
            if (!ok) throw SyntaxError("power form requires the ideal (T1,..,Ts)", at);
            spec = AlgebraSpec::power(s, k);
        } else if (is_truncated(gens, s)) {
            std::vector<int> orders;
            for (int i = 0; i < s; ++i) orders.push_back(gens[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)]);
            spec = AlgebraSpec::truncated(std::move(orders));
        } else {
            spec = AlgebraSpec::monomial(s, std::move(gens));
        }
        skip_space();
        if (!at_end()) throw SyntaxError("trailing characters in algebra spec", pos());
        return spec;
    }

private:
    static bool is_truncated(const std::vector<Monomial>& gens, int s) {
        if (static_cast<int>(gens.size()) != s) return false;
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j) {
                const int e = gens[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if ((i == j) != (e > 0)) return false;
            }
        return true;
    }

    int read_variable_list() {
        int s = 0;
        do {
            const std::size_t at = pos();
            const int v = read_variable(-1);
            if (v != s) throw SyntaxError("variables must be T1..Ts in order", at);
            ++s;
        } while (accept(','));
        return s;
    }

    // Returns the 0-based variable index. `s` < 0 while reading the variable list.
    int read_variable(int s) {
        skip_space();
        const std::size_t at = pos();
        expect('T');
        if (i_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i_]))) {
            const int v = read_int() - 1;
            if (v < 0 || (s >= 0 && v >= s)) throw SyntaxError("unknown variable", at);
            return v;
        }
        if (s > 1) throw SyntaxError("bare T is only allowed with one generator", at);
        return 0;
    }

    Monomial read_monomial(int s) {
        Monomial m(static_cast<std::size_t>(s), 0);
        do {
            const int v = read_variable(s);
            int e = 1;
            if (accept('^')) e = read_int();
            m[static_cast<std::size_t>(v)] += e;
        } while (accept('*'));
        return m;
    }

    int read_int() {
        skip_space();
        const std::size_t start = i_;
        long value = 0;
        while (i_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i_]))) {
            value = value * 10 + (text_[i_] - '0');
            if (value > 1'000'000) throw SyntaxError("integer too large", start);
            ++i_;
        }
        if (i_ == start) throw SyntaxError("expected integer", start);
        return static_cast<int>(value);
    }

    void skip_space() {
        while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
    }
    bool at_end() {
        skip_space();
        return i_ >= text_.size();
    }
    bool peek_is(char c) {
        skip_space();
        return i_ < text_.size() && text_[i_] == c;
    }
    bool accept(char c) {
        if (!peek_is(c)) return false;
        ++i_;
        return true;
    }
    void expect(char c) {
        if (!accept(c)) throw SyntaxError(std::string("expected '") + c + "'", pos());
    }
    std::size_t pos() {
        skip_space();
        return i_;
    }

    std::string_view text_;
    std::size_t i_ = 0;
};

}  // namespace detail

inline AlgebraSpec parse_algebra_spec(std::string_view text) { return detail::SpecReader(text).read(); }

inline AlgebraPtr build_algebra(std::string_view text) { return build_algebra(parse_algebra_spec(text)); }

inline std::string to_string(const WeilElement& x) {
    std::string out;
    const auto& alg = *x.algebra();
    for (std::size_t i = 0; i < x.dim(); ++i) {
        if (x[i] == 0.0) continue;
        if (!out.empty()) out += " + ";
        out += std::to_string(x[i]);
        if (i) out += "*" + alg.monomial_name(i);
    }
    return out.empty() ? "0" : out;
}

}  // namespace weil
