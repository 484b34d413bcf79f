#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <vector>

#include "weil/weil.hpp"

using namespace weil;

namespace {

const char* const kAlgebras[] = {"R[T]/(T^2)", "R[T]/(T^3)", "R[T1,T2]/(T1,T2)^2", "R[T1,T2]/(T1^2,T2^2)"};

double max_gap(const WeilVector& x, const WeilVector& y) {
    double gap = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) gap = std::max(gap, (x[i] - y[i]).max_abs());
    return gap;
}

double max_gap(const LiftedFunction& phi, const LiftedFunction& psi, Rng& rng, int samples = 20) {
    double gap = 0.0;
    for (int s = 0; s < samples; ++s) {
        const NearPoint xi = random_near_point(rng, phi.algebra(), static_cast<std::size_t>(phi.dimension()));
        gap = std::max(gap, (phi(xi) - psi(xi)).max_abs());
    }
    return gap;
}

/// Omega_12 = w on R^2
SymplecticStructure plane(const Expr& w) { return {2, {{{0, 1}, w}}}; }

}  // namespace

TEST(Structure, Construction) {
    const SymplecticStructure c = SymplecticStructure::canonical(2);
    EXPECT_TRUE(c.is_constant());
    EXPECT_TRUE(c.is_closed());
    EXPECT_FALSE(c.degenerate_sample().has_value());
    EXPECT_EQ(c.witness_samples(), 1);
    EXPECT_EQ(c.at(std::vector<double>(4, 0.0))(0, 2), 1.0);
    EXPECT_EQ(c.at(std::vector<double>(4, 0.0))(2, 0), -1.0);
    EXPECT_THROW(SymplecticStructure(3, {}), DimensionMismatch);
    EXPECT_THROW(SymplecticStructure(2, {{{1, 0}, Expr(1.0)}}), DimensionMismatch);
    EXPECT_THROW(SymplecticStructure(2, {{{0, 2}, Expr(1.0)}}), IndexOutOfRange);

    const SymplecticStructure nc = plane(parse("exp(x1) + x2^2", 2));
    EXPECT_FALSE(nc.is_constant());
    EXPECT_TRUE(nc.is_closed());
    EXPECT_EQ(nc.witness_samples(), 16);

    // x1 dx2^dx3 + dx1^dx4 + dx2^dx3 on R^4 is not closed: d = dx1^dx2^dx3
    const SymplecticStructure open(4, {{{1, 2}, parse("1 + x1", 4)}, {{0, 3}, Expr(1.0)}});
    EXPECT_FALSE(open.is_closed());
    EXPECT_NEAR(open.closedness_defect(), 1.0, 1e-15);

    EXPECT_TRUE(plane(Expr(0.0)).degenerate_sample().has_value());
}

TEST(HamiltonianField, CanonicalPlane) {
    const SymplecticStructure c = SymplecticStructure::canonical(1);
    Rng rng(1);
    const VectorFieldBase xh = hamiltonian_field_base(c, parse("(x1^2 + x2^2)/2", 2));
    EXPECT_TRUE(expr_equal_numeric(xh.components[0], var(2), 2, 10, 1e-15, rng));
    EXPECT_TRUE(expr_equal_numeric(xh.components[1], -var(1), 2, 10, 1e-15, rng));
    const VectorFieldBase xq = hamiltonian_field_base(c, var(1));
    EXPECT_TRUE(expr_equal_numeric(xq.components[0], Expr(0.0), 2, 5, 0.0, rng));
    EXPECT_TRUE(expr_equal_numeric(xq.components[1], Expr(-1.0), 2, 5, 0.0, rng));
    const std::vector<double> at = hamiltonian_field_base_at(c, parse("x1*x2", 2), std::vector<double>{2.0, 3.0});
    EXPECT_EQ(at, (std::vector<double>{2.0, -3.0}));
    EXPECT_THROW(hamiltonian_field_base(plane(parse("1 + x1^2", 2)), var(1)), NotSymbolic);
}

TEST(HamiltonianField, IsTheInducedHamiltonianDerivation) {
    Rng rng(2);
    const SymplecticStructure s(4, {{{0, 2}, Expr(1.0)}, {{1, 3}, Expr(2.0)}, {{0, 1}, Expr(0.5)}});
    const InducedPoisson induced(s);
    const Expr f = random_polynomial(rng, 4);
    const VectorFieldBase x = hamiltonian_field_base(s, f);
    const VectorFieldBase ad = hamiltonian_derivation(induced.structure(), f);
    for (int i = 0; i < 4; ++i) EXPECT_TRUE(expr_equal_numeric(x.components[i], ad.components[i], 4, 10, 1e-12, rng));
}

TEST(HamiltonianField, HandSolvedOverDualNumbers) {
    // Omega^T X = d phi with Omega = [[0,1],[-1,0]]: X = (d2 phi, -d1 phi)
    Rng rng(3);
    const AlgebraPtr d = build_algebra("R[T]/(T^2)");
    const SymplecticStructure c = SymplecticStructure::canonical(1);
    const LiftedFunction phi = random_lifted_function(rng, d, 2);
    const VectorFieldA x = hamiltonian_field_lifted(c, phi);
    ASSERT_TRUE(x.is_symbolic());
    const FormA dphi = d_A(FormA::function(phi));
    EXPECT_LE(max_gap(x.components()[0], dphi.coefficient({1}), rng), 1e-15);
    EXPECT_LE(max_gap(x.components()[1], -dphi.coefficient({0}), rng), 1e-15);

    const LiftedFunction k = LiftedFunction::constant(random_element(rng, d), 2);
    const VectorFieldA xk = hamiltonian_field_lifted(c, k);
    for (const auto& comp : xk.components())
        EXPECT_LE(max_gap(comp, LiftedFunction(d, 2), rng), 0.0);
}

TEST(HamiltonianField, LiftOfBaseField) {
    Rng rng(4);
    for (const char* spec : kAlgebras) {
        const AlgebraPtr a = build_algebra(spec);
        for (int pairs : {1, 2}) {
            const SymplecticStructure s = SymplecticStructure::canonical(pairs);
            const int n = 2 * pairs;
            const Expr f = random_polynomial(rng, n);
            const VectorFieldA lhs = hamiltonian_field_lifted(s, lift_function(a, n, f));
            const VectorFieldA pw = hamiltonian_field_lifted(s, lift_function(a, n, f), SolveMode::pointwise);
            const VectorFieldA rhs = lift_vector_field(a, hamiltonian_field_base(s, f));
            for (int t = 0; t < 5; ++t) {
                const NearPoint xi = random_near_point(rng, a, static_cast<std::size_t>(n));
                EXPECT_LE(max_gap(lhs.at(xi), rhs.at(xi)), 1e-9) << spec;
                EXPECT_LE(max_gap(pw.at(xi), rhs.at(xi)), 1e-9) << spec;
            }
        }
    }
}

TEST(HamiltonianField, NonConstantFormIsSolvedPointwise) {
    Rng rng(5);
    const AlgebraPtr a = build_algebra("R[T]/(T^3)");
    const Expr w = parse("exp(x1) + x2^2", 2);
    const SymplecticStructure s = plane(w);
    const LiftedFunction phi = random_lifted_function(rng, a, 2);
    const VectorFieldA x = hamiltonian_field_lifted(s, phi);
    EXPECT_FALSE(x.is_symbolic());
    EXPECT_THROW(hamiltonian_field_lifted(s, phi, SolveMode::symbolic), NotSymbolic);
    const FormA dphi = d_A(FormA::function(phi));
    for (int t = 0; t < 10; ++t) {
        const NearPoint xi = random_near_point(rng, a, 2);
        const WeilElement inv = invert(eval_weil(w, xi));
        const WeilVector want{inv * dphi.coefficient({1})(xi), -(inv * dphi.coefficient({0})(xi))};
        EXPECT_LE(max_gap(x.at(xi), want), 1e-12);
    }

    CheckOptions opts;
    opts.samples = 10;
    const CheckReport r = check_hamlift(s, a, opts);
    EXPECT_TRUE(r.pass()) << format_line(r);
    EXPECT_EQ(r.notes.size(), 1u);

    // Omega_12 = x1 degenerates over x1 = 0
    const SymplecticStructure bad = plane(var(1));
    const VectorFieldA y = hamiltonian_field_lifted(bad, lift_function(a, 2, var(2)));
    const NearPoint zero = NearPoint::at(a, std::vector<double>{0.0, 1.0});
    EXPECT_THROW(y.at(zero), DegenerateAt);
    EXPECT_NO_THROW(y.at(NearPoint::at(a, std::vector<double>{1.0, 1.0})));
}

TEST(OmegaBracket, CoordinateExample) {
    // canonical Omega_12 = 1 gives {x1, x2}_Omega = -1 on both paths
    Rng rng(6);
    for (const char* spec : kAlgebras) {
        const AlgebraPtr a = build_algebra(spec);
        const SymplecticStructure c = SymplecticStructure::canonical(1);
        const LiftedFunction x1 = lift_function(a, 2, var(1)), x2 = lift_function(a, 2, var(2));
        const NearPoint xi = random_near_point(rng, a, 2);
        const OmegaBracket b = bracket_omega(c, x1, x2, xi);
        EXPECT_EQ(b.via_form, WeilElement::constant(a, -1.0));
        EXPECT_EQ(b.via_derivation, WeilElement::constant(a, -1.0));
        EXPECT_EQ(InducedPoisson(c).bracket_at(x1, x2, xi), WeilElement::constant(a, -1.0));

        const LiftedFunction phi = random_lifted_function(rng, a, 2);
        const OmegaBracket self = bracket_omega(c, phi, phi, xi);
        EXPECT_LE(self.via_form.max_abs(), 1e-12);
        EXPECT_LE(self.via_derivation.max_abs(), 1e-9);
    }
}

TEST(OmegaBracket, ScalingHalvesTheBracket) {
    Rng rng(7);
    const AlgebraPtr a = build_algebra("R[T1,T2]/(T1^2,T2^2)");
    const SymplecticStructure c = SymplecticStructure::canonical(2);
    const SymplecticStructure c2 = c.scaled(2.0);
    const LiftedFunction phi = random_lifted_function(rng, a, 4), psi = random_lifted_function(rng, a, 4);
    EXPECT_LE(max_gap(bracket_omega(c2, phi, psi), 0.5 * bracket_omega(c, phi, psi), rng), 1e-9);
}

TEST(OmegaBracket, LiftCommutation) {
    // {f^A, g^A}_Omega^A = ({f, g}_Omega)^A with {f, g}_Omega = X_f(g)
    Rng rng(8);
    for (const char* spec : kAlgebras) {
        const AlgebraPtr a = build_algebra(spec);
        const SymplecticStructure c = SymplecticStructure::canonical(2);
        const Expr f = random_polynomial(rng, 4), g = random_polynomial(rng, 4);
        const Expr base = hamiltonian_field_base(c, f)(g);
        const LiftedFunction lhs = bracket_omega(c, lift_function(a, 4, f), lift_function(a, 4, g));
        EXPECT_LE(max_gap(lhs, lift_function(a, 4, base), rng), 1e-9) << spec;
        EXPECT_LE(max_gap(lhs, a_bracket(InducedPoisson(c).structure(), lift_function(a, 4, f), lift_function(a, 4, g)), rng),
                  1e-9);
    }
}

TEST(OmegaBracket, CoincidenceSuite) {
    CheckOptions opts;
    opts.samples = 10;
    const std::vector<SymplecticStructure> forms{
        SymplecticStructure::canonical(1), SymplecticStructure::canonical(2),
        SymplecticStructure(4, {{{0, 1}, Expr(2.0)}, {{2, 3}, Expr(-0.5)}, {{0, 3}, Expr(1.0)}})};
    for (const char* spec : kAlgebras)
        for (const auto& s : forms) {
            const CheckReport r = check_coincidence(s, build_algebra(spec), opts);
            EXPECT_TRUE(r.pass()) << format_line(r);
            const CheckReport h = check_hamlift(s, build_algebra(spec), opts);
            EXPECT_TRUE(h.pass()) << format_line(h);
        }
    // non-constant form, pointwise induced bivector
    opts.tol = 1e-7;
    const CheckReport r = check_coincidence(plane(parse("exp(x1) + x2^2", 2)), build_algebra("R[T]/(T^3)"), opts);
    EXPECT_TRUE(r.pass()) << format_line(r);
}

TEST(OmegaBracket, ContractionConvention) {
    Rng rng(9);
    const AlgebraPtr a = build_algebra("R[T]/(T^3)");
    const SymplecticStructure c = SymplecticStructure::canonical(2);
    const Expr f = random_polynomial(rng, 4);
    const VectorFieldBase x1 = hamiltonian_field_base(c, f, Contraction::first_slot);
    const VectorFieldBase x2 = hamiltonian_field_base(c, f, Contraction::second_slot);
    for (int i = 0; i < 4; ++i) EXPECT_TRUE(expr_equal_numeric(x2.components[i], -x1.components[i], 4, 5, 1e-12, rng));

    const LiftedFunction phi = random_lifted_function(rng, a, 4), psi = random_lifted_function(rng, a, 4);
    const NearPoint xi = random_near_point(rng, a, 4);
    const OmegaBracket first = bracket_omega(c, phi, psi, xi, Contraction::first_slot);
    const OmegaBracket second = bracket_omega(c, phi, psi, xi, Contraction::second_slot);
    EXPECT_LE((second.via_derivation + first.via_derivation).max_abs(), 1e-9);
    EXPECT_LE((second.via_form - first.via_form).max_abs(), 1e-9);

    // the second-slot bracket is still a Poisson bracket on the class
    const LiftedFunction chi = random_lifted_function(rng, a, 4);
    auto br = [&](const LiftedFunction& u, const LiftedFunction& v) {
        return bracket_omega(c, u, v, Contraction::second_slot);
    };
    EXPECT_LE(max_gap(br(phi, psi), -br(psi, phi), rng), 1e-9);
    const LiftedFunction j = br(br(phi, psi), chi) + br(br(psi, chi), phi) + br(br(chi, phi), psi);
    EXPECT_LE(max_gap(j, LiftedFunction(a, 4), rng), 1e-8);
}

TEST(InducedPoisson, InverseOfTheForm) {
    Rng rng(10);
    const SymplecticStructure s(4, {{{0, 2}, Expr(1.0)}, {{1, 3}, Expr(3.0)}, {{0, 1}, Expr(0.25)}});
    const InducedPoisson p(s);
    ASSERT_TRUE(p.is_symbolic());
    const std::vector<double> x(4, 0.0);
    EXPECT_TRUE((p.bivector_at(x) * s.at(x)).isApprox(Eigen::MatrixXd::Identity(4, 4), 1e-14));
    EXPECT_EQ(eval_real(InducedPoisson(SymplecticStructure::canonical(1)).structure().entry(0, 1), x), -1.0);

    const AlgebraPtr a = build_algebra("R[T]/(T^3)");
    const SymplecticStructure nc = plane(parse("exp(x1) + x2^2", 2));
    const InducedPoisson q(nc);
    EXPECT_FALSE(q.is_symbolic());
    EXPECT_THROW(q.structure(), NotSymbolic);
    const NearPoint xi = random_near_point(rng, a, 2);
    const WeilMatrix pi = q.bivector_at(xi), om = nc.at(xi);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            WeilElement sum = WeilElement::zero(a);
            for (int k = 0; k < 2; ++k) sum += pi[i][k] * om[k][j];
            EXPECT_LE((sum - WeilElement::constant(a, i == j ? 1.0 : 0.0)).max_abs(), 1e-12);
        }
    EXPECT_THROW(InducedPoisson(plane(Expr(0.0))), DegenerateAt);
}

TEST(ScalarForm, Verdicts) {
    const SymplecticStructure c = SymplecticStructure::canonical(1);
    const AlgebraPtr d = build_algebra("R[T]/(T^2)");
    const auto dual = dual_basis(d);
    const ScalarFormVerdict eps = scalar_form_test(c, dual[1]);
    EXPECT_TRUE(eps.predicate_symplectic);
    EXPECT_TRUE(eps.rank_symplectic);
    EXPECT_EQ(eps.full_rank, 4);
    const ScalarFormVerdict aug = scalar_form_test(c, dual[0]);
    EXPECT_FALSE(aug.predicate_symplectic);
    EXPECT_FALSE(aug.rank_symplectic);
    EXPECT_EQ(aug.min_rank, 2);

    Rng rng(11);
    const AlgebraPtr sq = build_algebra("R[T1,T2]/(T1,T2)^2");
    std::vector<LinearForm> forms = dual_basis(sq);
    forms.push_back({sq, {random_point(rng, 3)}});
    for (const auto& psi : forms) {
        const ScalarFormVerdict v = scalar_form_test(c, psi);
        EXPECT_EQ(v.ann_dimension, 2u);
        EXPECT_FALSE(v.symplectic());
        EXPECT_TRUE(v.agree());
    }

    for (const char* spec : {"R[T]/(T^3)", "R[T1,T2]/(T1^2,T2^2)"}) {
        const AlgebraPtr a = build_algebra(spec);
        const auto top = dual_basis(a).back();
        const ScalarFormVerdict v = scalar_form_test(SymplecticStructure::canonical(2), top);
        EXPECT_TRUE(v.symplectic()) << spec;
        EXPECT_TRUE(v.agree());
    }
}

TEST(ScalarForm, RankIsBasisIndependent) {
    Rng rng(12);
    const AlgebraPtr a = build_algebra("R[T1,T2]/(T1^2,T2^2)");
    const SymplecticStructure c = SymplecticStructure::canonical(1);
    for (const auto& psi : dual_basis(a)) {
        const NearPoint xi = random_near_point(rng, a, 2);
        const Eigen::MatrixXd b = scalar_form_matrix(c, psi, xi);
        EXPECT_TRUE(b.isApprox(-b.transpose()));
        Eigen::MatrixXd p(b.rows(), b.cols());
        for (Eigen::Index i = 0; i < p.rows(); ++i)
            for (Eigen::Index j = 0; j < p.cols(); ++j) p(i, j) = std::uniform_real_distribution<double>(-1, 1)(rng);
        ASSERT_GT(std::abs(p.determinant()), 1e-6);
        EXPECT_EQ(numerical_rank(p.transpose() * b * p), numerical_rank(b));
    }
    EXPECT_EQ(numerical_rank(Eigen::MatrixXd::Zero(3, 3)), 0);
}
