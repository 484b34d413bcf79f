#pragma once

/**
 * @file symplectic.hpp
 * @brief Symplectic forms, lifted Hamiltonian fields and the Omega^A bracket.
 *
 * Contraction is first-slot: (i_X Omega)_j = sum_i X^i Omega_ij, so X_f
 * solves Omega^T X = grad f. The induced bivector is pi = Omega^{-1}, which
 * makes X_f = ad(f). On M^A the field X_phi solves the same system over A
 * with Omega^A(xi) and d^A phi(xi).
 */

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "weil/poisson.hpp"

namespace weil {

/// Index order of the interior product.
enum class Contraction {
    first_slot,   ///< (i_X w)_j = sum_i X^i w_ij
    second_slot,  ///< (i_X w)_j = sum_i w_ji X^i
};

inline std::string format_point(std::span<const double> x) {
    std::string s = "(";
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) s += ", ";
        s += detail::format_double(x[i]);
    }
    return s + ")";
}

class SymplecticStructure {
public:
    /// `upper` holds Omega_ij for 0-based i < j on R^dim, dim even.
    SymplecticStructure(int dim, std::map<std::pair<int, int>, Expr> upper) : dim_(dim) {
        if (dim < 2 || dim % 2) throw DimensionMismatch("a symplectic form needs an even dimension >= 2");
        for (auto& [key, e] : upper) {
            const auto [i, j] = key;
            if (i < 0 || j < 0 || i >= dim || j >= dim) throw IndexOutOfRange("form index out of range");
            if (i >= j) throw DimensionMismatch("form entries must be given for i < j");
            if (e.max_variable() > dim) throw DimensionMismatch("form entry uses a variable beyond x" + std::to_string(dim));
            if (!e.is_constant(0.0)) upper_.emplace(key, std::move(e));
        }
        constant_ = std::all_of(upper_.begin(), upper_.end(), [](const auto& kv) { return kv.second.is_constant(); });
        witness();
    }

    static SymplecticStructure from_matrix(const std::vector<std::vector<Expr>>& m) {
        const int n = static_cast<int>(m.size());
        std::map<std::pair<int, int>, Expr> upper;
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(m[i].size()) != n) throw DimensionMismatch("form table must be square");
            for (int j = i + 1; j < n; ++j) upper.emplace(std::pair{i, j}, m[i][j]);
        }
        return {n, std::move(upper)};
    }

    /// sum_i dx_i ^ dx_{i+k} on R^{2k}.
    static SymplecticStructure canonical(int pairs) {
        std::map<std::pair<int, int>, Expr> upper;
        for (int i = 0; i < pairs; ++i) upper.emplace(std::pair{i, i + pairs}, Expr(1.0));
        return {2 * pairs, std::move(upper)};
    }

    int dimension() const noexcept { return dim_; }
    bool is_constant() const noexcept { return constant_; }
    bool is_closed() const noexcept { return closedness_defect_ <= 1e-9; }
    double closedness_defect() const noexcept { return closedness_defect_; }
    /// First sampled base point where the matrix was singular, if any.
    const std::optional<std::vector<double>>& degenerate_sample() const noexcept { return degenerate_at_; }
    int witness_samples() const noexcept { return witness_samples_; }

    Expr entry(int i, int j) const {
        if (i == j) return 0.0;
        const bool swapped = i > j;
        auto it = upper_.find(swapped ? std::pair{j, i} : std::pair{i, j});
        if (it == upper_.end()) return 0.0;
        return swapped ? -it->second : it->second;
    }
    const std::map<std::pair<int, int>, Expr>& upper() const noexcept { return upper_; }

    DifferentialForm form() const {
        DifferentialForm w{dim_, 2, {}};
        for (const auto& [key, e] : upper_) w.add({key.first, key.second}, e);
        return w;
    }

    SymplecticStructure scaled(double c) const {
        std::map<std::pair<int, int>, Expr> upper;
        for (const auto& [key, e] : upper_) upper.emplace(key, Expr(c) * e);
        return {dim_, std::move(upper)};
    }

    Eigen::MatrixXd at(std::span<const double> x) const {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
        for (const auto& [key, e] : upper_) {
            const double v = eval_real(e, x);
            m(key.first, key.second) = v;
            m(key.second, key.first) = -v;
        }
        return m;
    }

    /// Omega^A(xi) as a matrix over A.
    WeilMatrix at(const NearPoint& xi) const {
        const auto n = static_cast<std::size_t>(dim_);
        WeilMatrix m(n, WeilVector(n, WeilElement::zero(xi.algebra)));
        for (const auto& [key, e] : upper_) {
            const WeilElement v = eval_weil(e, xi);
            m[key.first][key.second] = v;
            m[key.second][key.first] = -v;
        }
        return m;
    }

private:
    void witness() {
        const DifferentialForm dw = exterior_derivative(form());
        Rng rng(0x5eed);
        witness_samples_ = 16;
        for (int s = 0; s < witness_samples_; ++s) {
            const std::vector<double> x = random_point(rng, static_cast<std::size_t>(dim_));
            for (const auto& [idx, c] : dw.coeffs) {
                const double v = std::abs(eval_real(c, x));
                if (v > closedness_defect_ || v != v) closedness_defect_ = v;
            }
            if (!degenerate_at_) {
                Eigen::FullPivLU<Eigen::MatrixXd> lu(at(x));
                lu.setThreshold(tolerance::invertible);
                if (!lu.isInvertible()) degenerate_at_ = x;
            }
            if (constant_) {
                witness_samples_ = 1;
                break;
            }
        }
    }

    int dim_;
    std::map<std::pair<int, int>, Expr> upper_;
    bool constant_ = true;
    double closedness_defect_ = 0.0;
    std::optional<std::vector<double>> degenerate_at_;
    int witness_samples_ = 0;
};

namespace detail {

inline constexpr double condition_limit = 1e12;

/// Inverse of a real matrix, refusing condition numbers above 1e12.
inline Eigen::MatrixXd guarded_inverse(const Eigen::MatrixXd& m, std::span<const double> x) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0, smin = s.size() ? s(s.size() - 1) : 0.0;
    if (!(smin > 0.0) || smax / smin > condition_limit)
        throw DegenerateAt("symplectic matrix is singular or ill-conditioned at " + format_point(x));
    return m.inverse();
}

/// Matrix of the linear system for X_f under the chosen contraction.
inline Eigen::MatrixXd contraction_matrix(const Eigen::MatrixXd& omega, Contraction c) {
    return c == Contraction::first_slot ? Eigen::MatrixXd(omega.transpose()) : omega;
}

inline WeilMatrix contraction_matrix(const WeilMatrix& omega, Contraction c) {
    return c == Contraction::first_slot ? transpose(omega) : omega;
}

}  // namespace detail

/**
 * Poisson structure pi = Omega^{-1}. Symbolic (a PoissonStructure) when
 * Omega has constant coefficients, otherwise evaluated point by point.
 */
class InducedPoisson {
public:
    explicit InducedPoisson(SymplecticStructure s) : s_(std::move(s)) {
        if (!s_.is_constant()) return;
        const std::vector<double> origin(static_cast<std::size_t>(s_.dimension()), 0.0);
        const Eigen::MatrixXd pi = detail::guarded_inverse(s_.at(origin), origin);
        std::map<std::pair<int, int>, Expr> upper;
        for (int i = 0; i < s_.dimension(); ++i)
            for (int j = i + 1; j < s_.dimension(); ++j) {
                const double v = 0.5 * (pi(i, j) - pi(j, i));
                if (v != 0.0) upper.emplace(std::pair{i, j}, Expr(v));
            }
        p_.emplace(s_.dimension(), std::move(upper));
    }

    const SymplecticStructure& symplectic() const noexcept { return s_; }
    int dimension() const noexcept { return s_.dimension(); }
    bool is_symbolic() const noexcept { return p_.has_value(); }

    const PoissonStructure& structure() const {
        if (!p_) throw NotSymbolic("induced bivector of a non-constant form is only available pointwise");
        return *p_;
    }

    Eigen::MatrixXd bivector_at(std::span<const double> x) const { return detail::guarded_inverse(s_.at(x), x); }

    /// pi^A(xi) = (Omega^A(xi))^{-1} over A.
    WeilMatrix bivector_at(const NearPoint& xi) const {
        const std::vector<double> x = xi.base();
        detail::guarded_inverse(s_.at(x), x);
        return invert(s_.at(xi));
    }

    /// {phi, psi}_A at xi: the term rule when symbolic, else sum pi^A_ij (d_i phi)(d_j psi).
    WeilElement bracket_at(const LiftedFunction& phi, const LiftedFunction& psi, const NearPoint& xi) const {
        if (p_) return a_bracket(*p_, phi, psi)(xi);
        const WeilMatrix pi = bivector_at(xi);
        const auto dphi = differential_at(phi, xi), dpsi = differential_at(psi, xi);
        WeilElement sum = WeilElement::zero(xi.algebra);
        for (std::size_t i = 0; i < pi.size(); ++i)
            for (std::size_t j = 0; j < pi.size(); ++j) sum += pi[i][j] * dphi[i] * dpsi[j];
        return sum;
    }

private:
    static WeilVector differential_at(const LiftedFunction& phi, const NearPoint& xi) {
        WeilVector d(static_cast<std::size_t>(phi.dimension()), WeilElement::zero(xi.algebra));
        for (const auto& t : phi.terms())
            for (int i = 0; i < phi.dimension(); ++i) {
                const Expr df = partial(t.fn, i + 1);
                if (!df.is_constant(0.0)) d[i] += t.coeff * eval_weil(df, xi);
            }
        return d;
    }

    SymplecticStructure s_;
    std::optional<PoissonStructure> p_;
};

/// X_f with i_{X_f} Omega = df, for constant-coefficient Omega.
inline VectorFieldBase hamiltonian_field_base(const SymplecticStructure& s, const Expr& f,
                                              Contraction c = Contraction::first_slot) {
    if (!s.is_constant()) throw NotSymbolic("X_f of a non-constant form: use hamiltonian_field_base_at");
    const std::vector<double> origin(static_cast<std::size_t>(s.dimension()), 0.0);
    const Eigen::MatrixXd inv = detail::guarded_inverse(detail::contraction_matrix(s.at(origin), c), origin);
    const std::vector<Expr> grad = gradient(f, s.dimension());
    VectorFieldBase x{std::vector<Expr>(grad.size(), Expr(0.0))};
    for (int i = 0; i < s.dimension(); ++i)
        for (int j = 0; j < s.dimension(); ++j)
            if (inv(i, j) != 0.0) x.components[i] = x.components[i] + Expr(inv(i, j)) * grad[j];
    return x;
}

/// X_f(x) by a real solve; works for any Omega.
inline std::vector<double> hamiltonian_field_base_at(const SymplecticStructure& s, const Expr& f,
                                                     std::span<const double> x,
                                                     Contraction c = Contraction::first_slot) {
    Eigen::VectorXd grad(s.dimension());
    for (int j = 0; j < s.dimension(); ++j) grad(j) = eval_real(partial(f, j + 1), x);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(detail::contraction_matrix(s.at(x), c));
    lu.setThreshold(tolerance::invertible);
    if (!lu.isInvertible()) throw DegenerateAt("symplectic matrix is singular at " + format_point(x));
    const Eigen::VectorXd v = lu.solve(grad);
    return {v.data(), v.data() + v.size()};
}

enum class SolveMode { automatic, symbolic, pointwise };

/**
 * X_phi with i_{X_phi} Omega^A = d^A phi. Constant Omega gives symbolic
 * components; otherwise (or with SolveMode::pointwise) each evaluation solves
 * Omega^A(xi) X = d^A phi(xi) over A.
 */
inline VectorFieldA hamiltonian_field_lifted(const SymplecticStructure& s, const LiftedFunction& phi,
                                             SolveMode mode = SolveMode::automatic,
                                             Contraction c = Contraction::first_slot) {
    const int n = s.dimension();
    if (phi.dimension() != n) throw DimensionMismatch("function and symplectic form on different dimensions");
    const AlgebraPtr alg = phi.algebra();
    const FormA dphi = d_A(FormA::function(phi));

    if (mode == SolveMode::symbolic && !s.is_constant())
        throw NotSymbolic("symbolic Hamiltonian field needs a constant-coefficient form");
    if (mode != SolveMode::pointwise && s.is_constant()) {
        const std::vector<double> origin(static_cast<std::size_t>(n), 0.0);
        const Eigen::MatrixXd inv = detail::guarded_inverse(detail::contraction_matrix(s.at(origin), c), origin);
        std::vector<LiftedFunction> comps;
        for (int i = 0; i < n; ++i) {
            LiftedFunction xi(alg, n);
            for (int j = 0; j < n; ++j)
                if (inv(i, j) != 0.0) xi += inv(i, j) * dphi.coefficient({j});
            comps.push_back(std::move(xi));
        }
        return {alg, n, std::move(comps)};
    }

    return VectorFieldA::pointwise(alg, n, [s, dphi, c, n](const NearPoint& xi) {
        WeilVector b;
        for (int j = 0; j < n; ++j) b.push_back(dphi.coefficient({j})(xi));
        try {
            return solve_linear_local(detail::contraction_matrix(s.at(xi), c), b);
        } catch (const SingularAugmentation&) {
            throw DegenerateAt("Omega^A is degenerate over base point " + format_point(xi.base()));
        }
    });
}

/// Both sides of {phi, psi}_{Omega^A} = -Omega^A(X_phi, X_psi) = X~_phi(psi) at one point.
struct OmegaBracket {
    WeilElement via_form;
    WeilElement via_derivation;
};

inline OmegaBracket bracket_omega(const SymplecticStructure& s, const LiftedFunction& phi, const LiftedFunction& psi,
                                  const NearPoint& xi, Contraction c = Contraction::first_slot) {
    const VectorFieldA x_phi = hamiltonian_field_lifted(s, phi, SolveMode::automatic, c);
    const VectorFieldA x_psi = hamiltonian_field_lifted(s, psi, SolveMode::automatic, c);
    const FormA omega = lift_form(phi.algebra(), s.form());
    const std::vector<VectorFieldA> args{x_phi, x_psi};
    return {-apply_form_at(omega, args, xi), extend_derivation_at(x_phi, psi, xi)};
}

/// X~_phi(psi) as a lifted-class function (constant Omega only).
inline LiftedFunction bracket_omega(const SymplecticStructure& s, const LiftedFunction& phi, const LiftedFunction& psi,
                                    Contraction c = Contraction::first_slot) {
    return extend_derivation(hamiltonian_field_lifted(s, phi, SolveMode::symbolic, c), psi);
}

/// Both Omega^A-bracket paths against the A-bracket of the induced Poisson structure.
inline CheckReport check_coincidence(const SymplecticStructure& s, const AlgebraPtr& alg,
                                     const CheckOptions& opts = {}) {
    const InducedPoisson induced(s);
    const int n = s.dimension();
    return detail::run_suite("coincide", alg, n, opts, [&](Rng& rng, const NearPoint& xi) {
        const LiftedFunction phi = random_lifted_function(rng, alg, n), psi = random_lifted_function(rng, alg, n);
        const WeilElement expected = induced.bracket_at(phi, psi, xi);
        const OmegaBracket got = bracket_omega(s, phi, psi, xi);
        return std::max((got.via_form - expected).max_abs(), (got.via_derivation - expected).max_abs());
    });
}

/**
 * X_{f^A} against (X_f)^A (constant Omega), the pointwise solve against the
 * symbolic one, and the residual of i_{X_{f^A}} Omega^A = d^A f^A.
 */
inline CheckReport check_hamlift(const SymplecticStructure& s, const AlgebraPtr& alg, const CheckOptions& opts = {}) {
    const int n = s.dimension();
    const FormA omega = lift_form(alg, s.form());
    CheckReport r = detail::run_suite("hamlift", alg, n, opts, [&](Rng& rng, const NearPoint& xi) {
        const Expr f = random_polynomial(rng, n);
        const LiftedFunction fa = lift_function(alg, n, f);
        const WeilVector x = hamiltonian_field_lifted(s, fa, SolveMode::pointwise).at(xi);
        double defect = 0.0;
        if (s.is_constant()) {
            const WeilVector symbolic = hamiltonian_field_lifted(s, fa, SolveMode::symbolic).at(xi);
            const WeilVector lifted = lift_vector_field(alg, hamiltonian_field_base(s, f)).at(xi);
            for (int i = 0; i < n; ++i)
                defect = std::max({defect, (x[i] - lifted[i]).max_abs(), (symbolic[i] - lifted[i]).max_abs()});
        }
        const FormValue contracted = interior_product(x, omega.at(xi));
        const FormValue df = d_A(FormA::function(fa)).at(xi);
        for (int j = 0; j < n; ++j)
            defect = std::max(defect, (contracted.coefficient({j}) - df.coefficient({j})).max_abs());
        return defect;
    });
    if (!s.is_constant()) r.notes.push_back("non-constant form: only the defining residual is checked");
    return r;
}

// Scalar forms ---------------------------------------------------------------------

/// Real matrix of psi o Omega^A at xi in the coordinates (i, alpha) -> e_i a_alpha.
inline Eigen::MatrixXd scalar_form_matrix(const SymplecticStructure& s, const LinearForm& psi, const NearPoint& xi) {
    const AlgebraPtr& alg = xi.algebra;
    require_same_algebra(alg, psi.algebra);
    const auto r = static_cast<Eigen::Index>(alg->dim());
    const auto n = static_cast<Eigen::Index>(s.dimension());
    const WeilMatrix omega = s.at(xi);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n * r, n * r);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const WeilElement& w = omega[i][j];
            if (w.is_zero()) continue;
            for (Eigen::Index a = 0; a < r; ++a) {
                const WeilElement wa = w * WeilElement::basis(alg, static_cast<std::size_t>(a));
                for (Eigen::Index c = 0; c < r; ++c)
                    b(i * r + a, j * r + c) = eval_form(psi, wa * WeilElement::basis(alg, static_cast<std::size_t>(c)));
            }
        }
    return b;
}

/// Number of singular values above 1e-9 times the largest.
inline Eigen::Index numerical_rank(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0;
    const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
    if (s(0) == 0.0) return 0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tolerance::rank * s(0)) ++rank;
    return rank;
}

struct ScalarFormVerdict {
    // predicate path
    std::size_t ann_dimension = 0;
    std::vector<double> psi_on_ann;
    bool predicate_symplectic = false;
    // rank path
    Eigen::Index full_rank = 0;
    Eigen::Index min_rank = 0;
    int samples = 0;
    bool rank_symplectic = false;

    bool agree() const noexcept { return predicate_symplectic == rank_symplectic; }
    bool symplectic() const noexcept { return predicate_symplectic && rank_symplectic; }
};

/**
 * Decides whether psi o Omega^A is symplectic on M^A twice: from
 * dim ann(m) = 1 and psi(ann(m)) != 0, and from the rank of its matrix at
 * sampled near points.
 */
inline ScalarFormVerdict scalar_form_test(const SymplecticStructure& s, const LinearForm& psi, int samples = 10,
                                          std::uint64_t seed = 1) {
    const AlgebraPtr& alg = psi.algebra;
    ScalarFormVerdict v;
    const std::vector<WeilElement> ann = annihilator_of_m(alg);
    v.ann_dimension = ann.size();
    double psi_norm = 0.0;
    for (double c : psi.coeffs) psi_norm = std::max(psi_norm, std::abs(c));
    for (const auto& a : ann) v.psi_on_ann.push_back(eval_form(psi, a));
    v.predicate_symplectic =
        ann.size() == 1 && std::abs(v.psi_on_ann[0]) > tolerance::rank * psi_norm * ann[0].max_abs();

    const int n = s.dimension();
    v.full_rank = static_cast<Eigen::Index>(n) * static_cast<Eigen::Index>(alg->dim());
    v.min_rank = v.full_rank;
    v.samples = samples;
    for (int k = 0; k < samples; ++k) {
        Rng rng = derive_stream(seed, static_cast<std::uint64_t>(k));
        const NearPoint xi = random_near_point(rng, alg, static_cast<std::size_t>(n));
        v.min_rank = std::min(v.min_rank, numerical_rank(scalar_form_matrix(s, psi, xi)));
    }
    v.rank_symplectic = v.min_rank == v.full_rank;
    return v;
}

}  // namespace weil
