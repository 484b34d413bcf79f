// Acceptance run: one line per criterion, nonzero exit if any criterion fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles/finite_difference.hpp"
#include "oracles/jet_bracket.hpp"
#include "oracles/naive_algebra.hpp"
#include "weil/weil.hpp"

using namespace weil;

namespace {

const char* const kAlgebras[] = {"R[T]/(T^2)", "R[T]/(T^3)", "R[T1,T2]/(T1,T2)^2", "R[T1,T2]/(T1^2,T2^2)"};

struct Outcome {
    bool pass = true;
    double max_defect = 0.0;
    std::string detail;

    void record(double d, double tol) {
        if (d > max_defect || d != d) max_defect = d;
        if (!(d <= tol)) pass = false;
    }
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

int failures = 0;

void report(int id, const char* title, const Outcome& o, double tol) {
    std::printf("CRITERION %2d %-28s max_defect=%.3e tol=%.1e %s%s%s\n", id, title, o.max_defect, tol,
                o.pass ? "PASS" : "FAIL", o.detail.empty() ? "" : "  ", o.detail.c_str());
    if (!o.pass) ++failures;
}

double scaled(const WeilElement& got, const WeilElement& want) {
    return (got - want).max_abs() / std::max(1.0, want.max_abs());
}

std::vector<PoissonStructure> poisson_matrix() {
    return {InducedPoisson(SymplecticStructure::canonical(1)).structure(),
            InducedPoisson(SymplecticStructure::canonical(2)).structure(), PoissonStructure::so3()};
}

CheckOptions options(int samples, double tol, std::uint64_t seed) {
    CheckOptions o;
    o.samples = samples;
    o.tol = tol;
    o.seed = seed;
    return o;
}

// 1 ------------------------------------------------------------------------------

void algebra_invariants() {
    struct Row {
        const char* spec;
        std::size_t dim;
        int height;
        std::size_t ann;
        oracle::NaiveAlgebra model;
    };
    const Row rows[] = {
        {"R[T]/(T^2)", 2, 1, 1, {1, {{2}}}},
        {"R[T]/(T^3)", 3, 2, 1, {1, {{3}}}},
        {"R[T1,T2]/(T1,T2)^2", 3, 1, 2, {2, {{2, 0}, {1, 1}, {0, 2}}}},
        {"R[T1,T2]/(T1^2,T2^2)", 4, 2, 1, {2, {{2, 0}, {0, 2}}}},
    };
    Outcome o;
    for (const Row& r : rows) {
        const AlgebraPtr a = build_algebra(r.spec);
        o.require(a->dim() == r.dim && r.model.standard_monomials().size() == r.dim, std::string(r.spec) + " dim");
        o.require(a->height() == r.height && r.model.height() == r.height, std::string(r.spec) + " height");
        o.require(annihilator_of_m(a).size() == r.ann && r.model.ann_dimension() == r.ann, std::string(r.spec) + " ann");
        const std::size_t d = a->dim();
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t k = 0; k < d; ++k) {
                    const WeilElement ei = WeilElement::basis(a, i), ej = WeilElement::basis(a, j),
                                      ek = WeilElement::basis(a, k);
                    o.record(((ei * ej) * ek - ei * (ej * ek)).max_abs(), 0.0);
                }
    }
    report(1, "algebra invariants", o, 0.0);
}

// 2 ------------------------------------------------------------------------------

void forward_ad() {
    const char* sources[] = {"x1^2*x2",         "exp(x1)*sin(x2)",        "log(2 + x1^2)",    "sqrt(2 + x2^2)",
                             "x1/(1 + x2^2)",   "cos(x1*x2)",             "exp(-x1^2 - x2^2)", "(x1 + x2)^5",
                             "sin(x1)^3 + cos(x2)^2", "x1^3*x2 - 2*x1*x2^2 + 4"};
    const AlgebraPtr d = build_algebra("R[T]/(T^2)");
    Rng rng(2);
    Outcome fd, sym;
    for (const char* src : sources) {
        const Expr f = parse(src, 2);
        const Expr d1 = partial(f, 1), d2 = partial(f, 2);
        for (int p = 0; p < 10; ++p) {
            const std::vector<double> x = random_point(rng, 2), v = random_point(rng, 2);
            const NearPoint xi{d, {WeilElement(d, {x[0], v[0]}), WeilElement(d, {x[1], v[1]})}};
            const double eps = eval_weil(f, xi)[1];
            auto along = [&](std::span<const double> t) {
                const std::vector<double> y{x[0] + t[0] * v[0], x[1] + t[0] * v[1]};
                return eval_real(f, y);
            };
            const std::vector<double> zero{0.0};
            fd.record(oracle::relative_error(eps, oracle::central_difference(along, zero, 0)), 1e-6);
            sym.record(oracle::relative_error(eps, v[0] * eval_real(d1, x) + v[1] * eval_real(d2, x)), 1e-9);
        }
    }
    Outcome o;
    o.pass = fd.pass && sym.pass;
    o.max_defect = sym.max_defect;
    char buf[64];
    std::snprintf(buf, sizeof buf, "fd=%.3e", fd.max_defect);
    o.detail = buf;
    report(2, "forward AD over D", o, 1e-9);
}

// 3 ------------------------------------------------------------------------------

void taylor() {
    struct Case {
        const char* src;
        std::function<double(double, int)> derivative;  // k-th derivative, by hand
        double lo, hi;
    };
    const Case cases[] = {
        {"exp(x1)", [](double x, int) { return std::exp(x); }, -1, 1},
        {"sin(x1)",
         [](double x, int k) {
             const double v[] = {std::sin(x), std::cos(x), -std::sin(x), -std::cos(x)};
             return v[k];
         },
         -2, 2},
        {"log(x1)",
         [](double x, int k) {
             const double v[] = {std::log(x), 1 / x, -1 / (x * x), 2 / (x * x * x)};
             return v[k];
         },
         0.5, 3},
        {"sqrt(x1)",
         [](double x, int k) {
             const double v[] = {std::sqrt(x), 0.5 / std::sqrt(x), -0.25 * std::pow(x, -1.5), 0.375 * std::pow(x, -2.5)};
             return v[k];
         },
         0.5, 3},
        {"x1^5 - 3*x1^2 + 7",
         [](double x, int k) {
             const double v[] = {std::pow(x, 5) - 3 * x * x + 7, 5 * std::pow(x, 4) - 6 * x, 20 * x * x * x - 6,
                                 60 * x * x};
             return v[k];
         },
         -2, 2},
        {"1/(1 + x1^2)",
         [](double x, int k) {
             const double q = 1 + x * x;
             const double v[] = {1 / q, -2 * x / (q * q), (6 * x * x - 2) / (q * q * q),
                                 24 * x * (1 - x * x) / (q * q * q * q)};
             return v[k];
         },
         -2, 2},
    };
    const AlgebraPtr a = build_algebra("R[T]/(T^4)");
    Rng rng(3);
    Outcome o;
    for (const Case& c : cases) {
        const Expr f = parse(c.src, 1);
        for (int p = 0; p < 10; ++p) {
            const double x = uniform(rng, c.lo, c.hi);
            const WeilElement v = eval_weil(f, NearPoint{a, {WeilElement(a, {x, 1, 0, 0})}});
            double fact = 1.0;
            for (int k = 0; k <= 3; ++k) {
                if (k) fact *= k;
                o.record(oracle::relative_error(v[static_cast<std::size_t>(k)], c.derivative(x, k) / fact), 1e-8);
            }
        }
    }
    report(3, "Taylor exactness T^4", o, 1e-8);
}

// 4 ------------------------------------------------------------------------------

void compatibility() {
    Outcome o;
    for (const char* spec : kAlgebras) {
        const AlgebraPtr a = build_algebra(spec);
        const oracle::JetAlgebra jet = oracle::adjoin_dual(a);
        std::uint64_t seed = 40;
        for (const PoissonStructure& p : poisson_matrix()) {
            const int n = p.dimension();
            std::vector<std::vector<Expr>> pi(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) pi[i].push_back(p.entry(i, j));
            for (int s = 0; s < 50; ++s) {
                Rng rng = derive_stream(++seed, static_cast<std::uint64_t>(s));
                const Expr f = random_polynomial(rng, n), g = random_polynomial(rng, n);
                const NearPoint xi = random_near_point(rng, a, static_cast<std::size_t>(n));
                const WeilElement got = a_bracket(p, lift_function(a, n, f), lift_function(a, n, g))(xi);
                o.record(scaled(got, oracle::jet_bracket(jet, pi, f, g, xi)), 1e-9);
            }
            const CheckReport r = check_compat(p, a, options(50, 1e-9, seed));
            o.record(r.max_defect, 1e-9);
        }
    }
    report(4, "compatibility {f,g}^A", o, 1e-9);
}

// 5 ------------------------------------------------------------------------------

void poisson_axioms() {
    Outcome o;
    for (const char* spec : kAlgebras) {
        const AlgebraPtr a = build_algebra(spec);
        for (const PoissonStructure& p : poisson_matrix()) {
            const CheckOptions opts = options(50, 1e-8, 5);
            for (const CheckReport& r : {check_skew(p, a, opts), check_bilinear(p, a, opts), check_leibniz(p, a, opts),
                                         check_jacobi(p, a, opts), check_commutator(p, a, opts)}) {
                o.record(r.max_defect, 1e-8);
                if (!r.pass()) o.require(false, format_line(r));
            }
        }
    }
    report(5, "A-Poisson axioms", o, 1e-8);
}

// 6 ------------------------------------------------------------------------------

void hamiltonian_lift() {
    Outcome o;
    for (const char* spec : kAlgebras)
        for (int pairs : {1, 2}) {
            const CheckReport r = check_hamlift(SymplecticStructure::canonical(pairs), build_algebra(spec),
                                                options(20, 1e-9, 6));
            o.record(r.max_defect, 1e-9);
        }
    report(6, "Hamiltonian lift", o, 1e-9);
}

// 7 ------------------------------------------------------------------------------

void coincidence() {
    Outcome o;
    for (const char* spec : kAlgebras)
        for (int pairs : {1, 2}) {
            const CheckReport r = check_coincidence(SymplecticStructure::canonical(pairs), build_algebra(spec),
                                                    options(50, 1e-8, 7));
            o.record(r.max_defect, 1e-8);
        }
    report(7, "coincidence", o, 1e-8);
}

// 8 ------------------------------------------------------------------------------

void nondegeneracy() {
    Outcome o;
    const SymplecticStructure c = SymplecticStructure::canonical(1);
    Rng rng(8);
    for (const char* spec : kAlgebras) {
        const AlgebraPtr a = build_algebra(spec);
        const auto dual = dual_basis(a);
        LinearForm random{a, std::vector<double>(a->dim())};
        for (double& x : random.coeffs) x = uniform(rng, -1.0, 1.0);
        const std::pair<const char*, LinearForm> forms[] = {{"top", dual.back()}, {"aug", dual.front()}, {"random", random}};
        for (const auto& [label, psi] : forms) {
            const ScalarFormVerdict v = scalar_form_test(c, psi, 10, 8);
            o.require(v.agree(), std::string(spec) + " " + label + " paths disagree");
            if (std::string(spec) == "R[T1,T2]/(T1,T2)^2")
                o.require(!v.predicate_symplectic && !v.rank_symplectic, std::string(spec) + " " + label + " not degenerate");
            if (std::string(spec) == "R[T]/(T^2)" && std::string(label) == "top")
                o.require(v.symplectic(), "D with the eps-form is not symplectic");
        }
    }
    report(8, "nondegeneracy criterion", o, 0.0);
}

// 9 ------------------------------------------------------------------------------

void exterior_derivative_coherence() {
    Outcome o;
    Rng rng(9);
    auto random_form = [&](int n, int p) {
        DifferentialForm w{n, p, {}};
        for (const auto& idx : increasing_indices(n, p)) w.add(idx, random_polynomial(rng, n, 2));
        return w;
    };
    for (const char* spec : kAlgebras) {
        const AlgebraPtr a = build_algebra(spec);
        for (int p = 0; p <= 2; ++p) {
            const DifferentialForm w = random_form(3, p);
            const FormA lhs = d_A(lift_form(a, w)), rhs = lift_form(a, exterior_derivative(w));
            FormA eta(a, 3, p);
            for (const auto& idx : increasing_indices(3, p)) eta.add(idx, random_lifted_function(rng, a, 3, 2));
            const FormA d_eta = d_A(eta);
            std::vector<VectorFieldA> fields;
            for (int k = 0; k <= p; ++k) fields.push_back(random_field(rng, a, 3, 1));
            for (int s = 0; s < 10; ++s) {
                const NearPoint xi = random_near_point(rng, a, 3);
                for (const auto& idx : increasing_indices(3, p + 1))
                    o.record(scaled(lhs.coefficient(idx)(xi), rhs.coefficient(idx)(xi)), 1e-9);
                const WeilElement want = d_A_palais_oracle(eta, fields, xi);
                o.record(scaled(apply_form_at(d_eta, fields, xi), want), 1e-9);
            }
        }
        // closed forms: x2^2 dx1 + 2 x1 x2 dx2 + cos(x3) dx3, and d of a random 1-form
        DifferentialForm w{3, 1, {}};
        w.add({0}, parse("x2^2", 3));
        w.add({1}, parse("2*x1*x2", 3));
        w.add({2}, parse("cos(x3)", 3));
        const FormA dw = d_A(lift_form(a, w));
        const FormA dw2 = d_A(lift_form(a, exterior_derivative(random_form(3, 1))));
        for (int s = 0; s < 10; ++s) {
            const NearPoint xi = random_near_point(rng, a, 3);
            for (const auto& idx : increasing_indices(3, 2)) o.record(dw.coefficient(idx)(xi).max_abs(), 1e-9);
            o.record(dw2.coefficient({0, 1, 2})(xi).max_abs(), 1e-9);
        }
    }
    report(9, "d^A coherence", o, 1e-9);
}

// 10 -----------------------------------------------------------------------------

void negative_control() {
    const PoissonStructure broken(4, {{{0, 1}, 1.0 + var(3)}, {{2, 3}, Expr(1.0)}});
    const CheckReport r = check_jacobi(broken, build_algebra("R[T]/(T^2)"), options(50, 1e-8, 10));
    Outcome o;
    o.max_defect = r.max_defect;
    o.require(!r.pass() && r.max_defect > 1e-3, "Jacobi suite did not fail on a broken bivector");
    o.detail = o.detail.empty() ? "jacobi suite FAIL as expected" : o.detail;
    report(10, "negative control", o, 1e-3);
}

}  // namespace

int main() {
    try {
        algebra_invariants();
        forward_ad();
        taylor();
        compatibility();
        poisson_axioms();
        hamiltonian_lift();
        coincidence();
        nondegeneracy();
        exterior_derivative_coherence();
        negative_control();
    } catch (const std::exception& e) {
        std::printf("acceptance aborted: %s\n", e.what());
        return 2;
    }
    std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
