#pragma once

/**
 * @file poisson.hpp
 * @brief Poisson structures on R^n and the prolonged A-Poisson bracket.
 *
 * For a bivector pi the base bracket is {f,g} = sum pi^{ij} d_i f d_j g and
 * ad(f) = {f, .}. On M^A the vector field tau_phi acts on f by
 *     tau_phi(f) = -[ad(f)]^A~(phi)
 * and {phi, psi}_A = tau~_phi(psi). On the lifted class this collapses to
 *     {a f^A, b g^A}_A = ab ({f,g})^A
 * which is what a_bracket computes; the check suites rebuild brackets by
 * composing tau~ so that both routes are exercised.
 */

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "weil/lift.hpp"
#include "weil/report.hpp"

namespace weil {

class PoissonStructure {
public:
    /// `upper` holds pi^{ij} for 0-based i < j; missing entries are zero.
    PoissonStructure(int n, std::map<std::pair<int, int>, Expr> upper) : n_(n) {
        if (n < 1) throw DimensionMismatch("Poisson structure needs n >= 1");
        for (auto& [key, e] : upper) {
            const auto [i, j] = key;
            if (i < 0 || j < 0 || i >= n || j >= n) throw IndexOutOfRange("bivector index out of range");
            if (i >= j) throw DimensionMismatch("bivector entries must be given for i < j");
            if (e.max_variable() > n) throw DimensionMismatch("bivector entry uses a variable beyond x" + std::to_string(n));
            if (!e.is_constant(0.0)) upper_.emplace(key, std::move(e));
        }
        check_jacobi();
    }

    /// Reads the strict upper triangle of a full n x n table.
    static PoissonStructure from_matrix(const std::vector<std::vector<Expr>>& m) {
        const int n = static_cast<int>(m.size());
        std::map<std::pair<int, int>, Expr> upper;
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(m[i].size()) != n) throw DimensionMismatch("bivector table must be square");
            for (int j = i + 1; j < n; ++j) upper.emplace(std::pair{i, j}, m[i][j]);
        }
        return {n, std::move(upper)};
    }

    /// pi^{i, i+k} = 1 on R^{2k}.
    static PoissonStructure canonical(int pairs) {
        std::map<std::pair<int, int>, Expr> upper;
        for (int i = 0; i < pairs; ++i) upper.emplace(std::pair{i, i + pairs}, Expr(1.0));
        return {2 * pairs, std::move(upper)};
    }

    /// Lie-Poisson structure on so(3)*: pi^{ij} = sum_k eps_{ijk} x_k.
    static PoissonStructure so3() {
        return {3, {{{0, 1}, var(3)}, {{0, 2}, -var(2)}, {{1, 2}, var(1)}}};
    }

    int dimension() const noexcept { return n_; }

    /// pi^{ij}, 0-based, skew.
    Expr entry(int i, int j) const {
        if (i == j) return 0.0;
        const bool swapped = i > j;
        auto it = upper_.find(swapped ? std::pair{j, i} : std::pair{i, j});
        if (it == upper_.end()) return 0.0;
        return swapped ? -it->second : it->second;
    }

    const std::map<std::pair<int, int>, Expr>& upper() const noexcept { return upper_; }

    /// False when the base Jacobi identity failed on some coordinate triple.
    bool jacobi_holds() const noexcept { return jacobi_defect_ <= 1e-9; }
    double jacobi_defect() const noexcept { return jacobi_defect_; }

private:
    void check_jacobi();

    int n_;
    std::map<std::pair<int, int>, Expr> upper_;
    double jacobi_defect_ = 0.0;
};

/// {f,g} = sum pi^{ij} d_i f d_j g
inline Expr bracket_base(const PoissonStructure& p, const Expr& f, const Expr& g) {
    const int n = p.dimension();
    std::vector<Expr> df(static_cast<std::size_t>(n)), dg(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        df[i] = partial(f, i + 1);
        dg[i] = partial(g, i + 1);
    }
    Expr sum = 0.0;
    for (const auto& [key, pi] : p.upper()) {
        const auto [i, j] = key;
        sum = sum + pi * (df[i] * dg[j] - df[j] * dg[i]);
    }
    return sum;
}

/// ad(f)^j = sum_i pi^{ij} d_i f
inline VectorFieldBase hamiltonian_derivation(const PoissonStructure& p, const Expr& f) {
    const int n = p.dimension();
    VectorFieldBase out{std::vector<Expr>(static_cast<std::size_t>(n), Expr(0.0))};
    for (const auto& [key, pi] : p.upper()) {
        const auto [i, j] = key;
        out.components[j] = out.components[j] + pi * partial(f, i + 1);
        out.components[i] = out.components[i] - pi * partial(f, j + 1);
    }
    return out;
}

inline void PoissonStructure::check_jacobi() {
    jacobi_defect_ = 0.0;
    if (n_ < 3) return;
    Rng rng(0x5eed);
    std::vector<std::vector<double>> points;
    for (int s = 0; s < 8; ++s) points.push_back(random_point(rng, static_cast<std::size_t>(n_)));
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j)
            for (int k = j + 1; k < n_; ++k) {
                const Expr xi = var(i + 1), xj = var(j + 1), xk = var(k + 1);
                const Expr jac = bracket_base(*this, xi, bracket_base(*this, xj, xk)) +
                                 bracket_base(*this, xj, bracket_base(*this, xk, xi)) +
                                 bracket_base(*this, xk, bracket_base(*this, xi, xj));
                for (const auto& x : points) {
                    const double v = std::abs(eval_real(jac, x));
                    if (v > jacobi_defect_ || v != v) jacobi_defect_ = v;
                }
            }
}

inline void require_compatible(const PoissonStructure& p, const LiftedFunction& phi) {
    if (phi.dimension() != p.dimension()) throw DimensionMismatch("function and Poisson structure on different dimensions");
}

/// tau_phi(f) = -[ad(f)]^A~(phi), literally.
inline LiftedFunction tau_action(const PoissonStructure& p, const LiftedFunction& phi, const Expr& f) {
    require_compatible(p, phi);
    return -extend_derivation(lift_vector_field(phi.algebra(), hamiltonian_derivation(p, f)), phi);
}

/// tau_phi as a field on M^A, with components tau_phi(x_j).
inline VectorFieldA tau(const PoissonStructure& p, const LiftedFunction& phi) {
    std::vector<LiftedFunction> c;
    for (int j = 1; j <= p.dimension(); ++j) c.push_back(tau_action(p, phi, var(j)));
    return {phi.algebra(), p.dimension(), std::move(c)};
}

/// {phi, psi}_A by the term rule {a f^A, b g^A}_A = ab ({f,g})^A.
inline LiftedFunction a_bracket(const PoissonStructure& p, const LiftedFunction& phi, const LiftedFunction& psi) {
    require_compatible(p, phi);
    require_compatible(p, psi);
    require_same_algebra(phi.algebra(), psi.algebra());
    LiftedFunction out(phi.algebra(), p.dimension());
    for (const auto& s : phi.terms())
        for (const auto& t : psi.terms()) out.add_term(s.coeff * t.coeff, bracket_base(p, s.fn, t.fn));
    return out;
}

/// {phi, psi}_A = tau~_phi(psi), through the field tau_phi.
inline LiftedFunction a_bracket_via_tau(const PoissonStructure& p, const LiftedFunction& phi,
                                        const LiftedFunction& psi) {
    return extend_derivation(tau(p, phi), psi);
}

// Identity suites ------------------------------------------------------------------

namespace detail {

inline CheckReport start_report(std::string name, const AlgebraPtr& alg, int n, const CheckOptions& opts) {
    CheckReport r;
    r.name = std::move(name);
    r.algebra = alg->name();
    r.dimension = n;
    r.samples = opts.samples;
    r.tol = opts.tol;
    r.seed = opts.seed;
    return r;
}

inline NearPoint sample_point(Rng& rng, const AlgebraPtr& alg, int n, const CheckOptions& opts, int s) {
    if (opts.base_points.empty()) return random_near_point(rng, alg, static_cast<std::size_t>(n));
    const auto& base = opts.base_points[static_cast<std::size_t>(s) % opts.base_points.size()];
    if (static_cast<int>(base.size()) != n) throw DimensionMismatch("base point of the wrong dimension");
    return random_near_point(rng, alg, base);
}

inline void note_base_jacobi(CheckReport& r, const PoissonStructure& p) {
    if (!p.jacobi_holds())
        r.notes.push_back("warning: base bivector violates Jacobi (defect " + format_float(p.jacobi_defect()) + ")");
}

/// Runs `body(rng, xi)` for every sample; body returns the defect at that sample.
template <class Body>
CheckReport run_suite(std::string name, const AlgebraPtr& alg, int n, const CheckOptions& opts, Body&& body) {
    CheckReport r = start_report(std::move(name), alg, n, opts);
    for (int s = 0; s < opts.samples; ++s) {
        Rng rng = derive_stream(opts.seed, static_cast<std::uint64_t>(s));
        const NearPoint xi = sample_point(rng, alg, n, opts, s);
        r.record(body(rng, xi));
    }
    return r;
}

}  // namespace detail

/// max |{phi,psi}_A + {psi,phi}_A| and |{phi,phi}_A|
inline CheckReport check_skew(const PoissonStructure& p, const AlgebraPtr& alg, const CheckOptions& opts = {}) {
    const int n = p.dimension();
    CheckReport r = detail::run_suite("skew", alg, n, opts, [&](Rng& rng, const NearPoint& xi) {
        const LiftedFunction phi = random_lifted_function(rng, alg, n), psi = random_lifted_function(rng, alg, n);
        const WeilElement sym = a_bracket(p, phi, psi)(xi) + a_bracket(p, psi, phi)(xi);
        return std::max(sym.max_abs(), a_bracket(p, phi, phi)(xi).max_abs());
    });
    detail::note_base_jacobi(r, p);
    return r;
}

/// A-bilinearity in both slots: {a phi1 + phi2, psi} = a{phi1,psi} + {phi2,psi}, and on the right.
inline CheckReport check_bilinear(const PoissonStructure& p, const AlgebraPtr& alg, const CheckOptions& opts = {}) {
    const int n = p.dimension();
    CheckReport r = detail::run_suite("bilinear", alg, n, opts, [&](Rng& rng, const NearPoint& xi) {
        const WeilElement a = random_element(rng, alg);
        const LiftedFunction phi1 = random_lifted_function(rng, alg, n), phi2 = random_lifted_function(rng, alg, n);
        const LiftedFunction psi = random_lifted_function(rng, alg, n);
        const LiftedFunction comb = a * phi1 + phi2;
        const WeilElement left =
            a_bracket(p, comb, psi)(xi) - (a * a_bracket(p, phi1, psi)(xi) + a_bracket(p, phi2, psi)(xi));
        const WeilElement right =
            a_bracket(p, psi, comb)(xi) - (a * a_bracket(p, psi, phi1)(xi) + a_bracket(p, psi, phi2)(xi));
        return std::max(left.max_abs(), right.max_abs());
    });
    detail::note_base_jacobi(r, p);
    return r;
}

/// {phi, psi1 psi2} - {phi,psi1} psi2 - psi1 {phi,psi2}
inline CheckReport check_leibniz(const PoissonStructure& p, const AlgebraPtr& alg, const CheckOptions& opts = {}) {
    const int n = p.dimension();
    CheckReport r = detail::run_suite("leibniz", alg, n, opts, [&](Rng& rng, const NearPoint& xi) {
        const LiftedFunction phi = random_lifted_function(rng, alg, n);
        const LiftedFunction psi1 = random_lifted_function(rng, alg, n), psi2 = random_lifted_function(rng, alg, n);
        const WeilElement lhs = a_bracket(p, phi, psi1 * psi2)(xi);
        const WeilElement rhs = a_bracket(p, phi, psi1)(xi) * psi2(xi) + psi1(xi) * a_bracket(p, phi, psi2)(xi);
        return (lhs - rhs).max_abs();
    });
    detail::note_base_jacobi(r, p);
    return r;
}

/// {phi,{psi,chi}} + {psi,{chi,phi}} + {chi,{phi,psi}}
inline CheckReport check_jacobi(const PoissonStructure& p, const AlgebraPtr& alg, const CheckOptions& opts = {}) {
    const int n = p.dimension();
    CheckReport r = detail::run_suite("jacobi", alg, n, opts, [&](Rng& rng, const NearPoint& xi) {
        const LiftedFunction phi = random_lifted_function(rng, alg, n), psi = random_lifted_function(rng, alg, n);
        const LiftedFunction chi = random_lifted_function(rng, alg, n);
        const WeilElement j = a_bracket(p, phi, a_bracket(p, psi, chi))(xi) +
                              a_bracket(p, psi, a_bracket(p, chi, phi))(xi) +
                              a_bracket(p, chi, a_bracket(p, phi, psi))(xi);
        return j.max_abs();
    });
    detail::note_base_jacobi(r, p);
    return r;
}

/// (tau~_phi tau~_psi - tau~_psi tau~_phi)(chi) - tau~_{{phi,psi}_A}(chi), all by composing tau~.
inline CheckReport check_commutator(const PoissonStructure& p, const AlgebraPtr& alg, const CheckOptions& opts = {}) {
    const int n = p.dimension();
    CheckReport r = detail::run_suite("commutator", alg, n, opts, [&](Rng& rng, const NearPoint& xi) {
        const LiftedFunction phi = random_lifted_function(rng, alg, n), psi = random_lifted_function(rng, alg, n);
        const LiftedFunction chi = random_lifted_function(rng, alg, n);
        const VectorFieldA t_phi = tau(p, phi), t_psi = tau(p, psi);
        const WeilElement lhs = extend_derivation_at(t_phi, extend_derivation(t_psi, chi), xi) -
                                extend_derivation_at(t_psi, extend_derivation(t_phi, chi), xi);
        const WeilElement rhs = extend_derivation_at(tau(p, a_bracket_via_tau(p, phi, psi)), chi, xi);
        return (lhs - rhs).max_abs();
    });
    detail::note_base_jacobi(r, p);
    return r;
}

/**
 * {f^A, g^A}_A against ({f,g})^A for random polynomials, through both the
 * term rule and the tau~ composition.
 */
inline CheckReport check_compat(const PoissonStructure& p, const AlgebraPtr& alg, const CheckOptions& opts = {}) {
    const int n = p.dimension();
    CheckReport r = detail::run_suite("compat", alg, n, opts, [&](Rng& rng, const NearPoint& xi) {
        const Expr f = random_polynomial(rng, n), g = random_polynomial(rng, n);
        const LiftedFunction fa = lift_function(alg, n, f), ga = lift_function(alg, n, g);
        const WeilElement expected = eval_weil(bracket_base(p, f, g), xi);
        return std::max((a_bracket(p, fa, ga)(xi) - expected).max_abs(),
                        (a_bracket_via_tau(p, fa, ga)(xi) - expected).max_abs());
    });
    detail::note_base_jacobi(r, p);
    return r;
}

}  // namespace weil
