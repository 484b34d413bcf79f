#pragma once

/**
 * @file linalg.hpp
 * @brief Linear algebra over a Weil algebra: the annihilator of the maximal
 * ideal and linear systems with A-valued entries.
 *
 * Systems are solved by splitting M = M0 + N, where M0 is the real
 * augmentation matrix and N has nilpotent entries, and iterating
 * x <- M0^{-1}(b - N x). The error after k sweeps lies in m^k, so h + 1
 * sweeps are exact.
 */

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "weil/algebra.hpp"

namespace weil {

using WeilVector = std::vector<WeilElement>;
/// Row-major square matrix of algebra elements.
using WeilMatrix = std::vector<WeilVector>;

inline Eigen::MatrixXd augmentation_matrix(const WeilMatrix& m) {
    const auto rows = static_cast<Eigen::Index>(m.size());
    const auto cols = rows ? static_cast<Eigen::Index>(m.front().size()) : 0;
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = m[i][j].augmentation();
    return out;
}

/// Matrix of a -> (a * T^beta)_beta over the positive-degree basis monomials.
inline Eigen::MatrixXd annihilator_map(const WeilAlgebra& alg) {
    const auto r = static_cast<Eigen::Index>(alg.dim());
    Eigen::MatrixXd map = Eigen::MatrixXd::Zero((r - 1) * r, r);
    for (Eigen::Index a = 0; a < r; ++a)
        for (Eigen::Index beta = 1; beta < r; ++beta) {
            const int k = alg.product_index(static_cast<std::size_t>(a), static_cast<std::size_t>(beta));
            if (k != WeilAlgebra::annihilated) map((beta - 1) * r + k, a) = 1.0;
        }
    return map;
}

/// Basis of ann(m) = {a : a*x = 0 for all x in m}, from the kernel of annihilator_map.
inline std::vector<WeilElement> annihilator_of_m(const AlgebraPtr& alg) {
    if (alg->dim() == 1) return {WeilElement::unit(alg)};
    Eigen::FullPivLU<Eigen::MatrixXd> lu(annihilator_map(*alg));
    lu.setThreshold(tolerance::kernel);
    const Eigen::MatrixXd kernel = lu.kernel();
    std::vector<WeilElement> basis;
    if (lu.rank() == static_cast<Eigen::Index>(alg->dim())) return basis;
    for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
        std::vector<double> coeffs(alg->dim());
        for (Eigen::Index i = 0; i < kernel.rows(); ++i) {
            const double v = kernel(i, c);
            coeffs[static_cast<std::size_t>(i)] = std::abs(v) < tolerance::kernel ? 0.0 : v;
        }
        basis.emplace_back(alg, std::move(coeffs));
    }
    return basis;
}

namespace detail {

inline WeilVector solve_real(const Eigen::FullPivLU<Eigen::MatrixXd>& lu, const WeilVector& rhs,
                             const AlgebraPtr& alg) {
    const auto n = static_cast<Eigen::Index>(rhs.size());
    const auto r = static_cast<Eigen::Index>(alg->dim());
    Eigen::MatrixXd c(n, r);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index a = 0; a < r; ++a) c(i, a) = rhs[i][a];
    const Eigen::MatrixXd y = lu.solve(c);
    WeilVector out;
    out.reserve(rhs.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        std::vector<double> coeffs(alg->dim());
        for (Eigen::Index a = 0; a < r; ++a) coeffs[a] = y(i, a);
        out.emplace_back(alg, std::move(coeffs));
    }
    return out;
}

}  // namespace detail

/// Solves M x = b over A. Throws SingularAugmentation when the augmentation of M is singular.
inline WeilVector solve_linear_local(const WeilMatrix& m, const WeilVector& b) {
    const std::size_t n = b.size();
    if (m.size() != n) throw DimensionMismatch("matrix/vector size mismatch");
    if (n == 0) return {};
    const AlgebraPtr alg = b.front().algebra();
    for (const auto& row : m) {
        if (row.size() != n) throw DimensionMismatch("matrix is not square");
        for (const auto& e : row) require_same_algebra(alg, e.algebra());
    }
    for (const auto& e : b) require_same_algebra(alg, e.algebra());

    Eigen::FullPivLU<Eigen::MatrixXd> lu(augmentation_matrix(m));
    lu.setThreshold(tolerance::invertible);
    if (!lu.isInvertible()) throw SingularAugmentation("augmentation matrix is singular");

    WeilMatrix nil(n, WeilVector(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) nil[i][j] = m[i][j].nilpotent_part();

    WeilVector x(n, WeilElement::zero(alg));
    for (int sweep = 0; sweep <= alg->height(); ++sweep) {
        WeilVector rhs = b;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (!nil[i][j].is_zero()) rhs[i] -= nil[i][j] * x[j];
        x = detail::solve_real(lu, rhs, alg);
    }
    return x;
}

inline WeilVector multiply(const WeilMatrix& m, const WeilVector& x) {
    WeilVector out;
    out.reserve(m.size());
    for (const auto& row : m) {
        WeilElement acc = WeilElement::zero(x.front().algebra());
        for (std::size_t j = 0; j < row.size(); ++j) acc += row[j] * x[j];
        out.push_back(std::move(acc));
    }
    return out;
}

inline WeilMatrix transpose(const WeilMatrix& m) {
    if (m.empty()) return m;
    WeilMatrix t(m.front().size(), WeilVector(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
    return t;
}

/// Inverse over A, column by column. Throws SingularAugmentation.
inline WeilMatrix invert(const WeilMatrix& m) {
    const std::size_t n = m.size();
    if (n == 0) return {};
    const AlgebraPtr alg = m.front().front().algebra();
    WeilMatrix inv(n, WeilVector(n));
    for (std::size_t c = 0; c < n; ++c) {
        WeilVector e(n, WeilElement::zero(alg));
        e[c] = WeilElement::unit(alg);
        const WeilVector col = solve_linear_local(m, e);
        for (std::size_t i = 0; i < n; ++i) inv[i][c] = col[i];
    }
    return inv;
}

}  // namespace weil
