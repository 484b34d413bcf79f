// weilctl: command-line front end for Weil-algebra prolongations.
//
//   weilctl algebra-info (--algebra SPEC | --manifest FILE)
//   weilctl lift    --manifest FILE (--function NAME | --expr SRC) --point JSON
//   weilctl bracket --manifest FILE --f NAME --g NAME --point JSON
//   weilctl check SUITE --manifest FILE [--tol X] [--seed N] [--samples K]
//
// Every command accepts --json PATH. Exit status: 0 ok, 1 a defect above
// tolerance or a verdict disagreement, 2 usage or parse error.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "weil/manifest.hpp"

namespace {

using nlohmann::json;
using namespace weil;

constexpr int exit_ok = 0;
constexpr int exit_defect = 1;
constexpr int exit_usage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string format_coeffs(const WeilElement& x) {
    std::string s = "[";
    for (std::size_t i = 0; i < x.dim(); ++i) {
        if (i) s += ", ";
        s += weil::detail::format_double(x[i] == 0.0 ? 0.0 : x[i]);
    }
    return s + "]";
}

json coeffs_json(const WeilElement& x) {
    json a = json::array();
    for (double v : x.coeffs()) a.push_back(v == 0.0 ? 0.0 : v);
    return a;
}

json report_json(const CheckReport& r) {
    return {{"name", r.name},       {"algebra", r.algebra},       {"n", r.dimension},
            {"samples", r.samples}, {"max_defect", r.max_defect}, {"tol", r.tol},
            {"seed", r.seed},       {"pass", r.pass()},           {"notes", r.notes}};
}

void write_json(const std::string& path, const json& j) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path);
    out << j.dump(2) << '\n';
}

/// Near point from a JSON array: per coordinate either a coefficient vector or a real number.
NearPoint parse_point(const std::string& text, const AlgebraPtr& alg, int n) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("--point is not valid JSON: ") + e.what());
    }
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw UsageError("--point needs " + std::to_string(n) + " coordinates");
    NearPoint xi{alg, {}};
    for (const auto& c : j) {
        if (c.is_number()) {
            xi.coords.push_back(WeilElement::constant(alg, c.get<double>()));
        } else if (c.is_array() && c.size() == alg->dim()) {
            xi.coords.emplace_back(alg, c.get<std::vector<double>>());
        } else {
            throw UsageError("each coordinate must be a number or " + std::to_string(alg->dim()) + " coefficients");
        }
    }
    return xi;
}

json algebra_json(const AlgebraPtr& alg) {
    json basis = json::array();
    for (std::size_t i = 0; i < alg->dim(); ++i) basis.push_back(alg->monomial_name(i));
    json ann = json::array();
    for (const auto& a : annihilator_of_m(alg)) ann.push_back(coeffs_json(a));
    return {{"algebra", alg->name()}, {"dim", alg->dim()}, {"basis", basis}, {"height", alg->height()},
            {"ann_dim", ann.size()},  {"ann_basis", ann}};
}

int cmd_algebra_info(const std::string& spec, const std::string& manifest_path, const std::string& json_path) {
    std::string text = spec;
    if (text.empty()) {
        if (manifest_path.empty()) throw UsageError("algebra-info needs --algebra or --manifest");
        text = load_manifest(manifest_path).algebra;
    }
    const AlgebraPtr alg = build_algebra(text);
    const json j = algebra_json(alg);
    std::cout << "algebra " << alg->name() << "\n";
    std::cout << "dim " << alg->dim() << "\n";
    std::cout << "basis";
    for (std::size_t i = 0; i < alg->dim(); ++i) std::cout << ' ' << alg->monomial_name(i);
    std::cout << "\nheight " << alg->height() << "\n";
    std::cout << "ann(m) dim " << j["ann_dim"].get<std::size_t>() << "\n";
    for (const auto& a : annihilator_of_m(alg)) std::cout << "ann(m) basis " << format_coeffs(a) << "\n";
    write_json(json_path, j);
    return exit_ok;
}

int cmd_lift(const Manifest& m, const std::string& name, const std::string& src, const std::string& point,
             const std::string& json_path) {
    if (name.empty() == src.empty()) throw UsageError("lift needs exactly one of --function or --expr");
    if (point.empty()) throw UsageError("lift needs --point");
    const Expr f = name.empty() ? parse(src, m.dimension) : m.function(name);
    const AlgebraPtr alg = build_algebra(m.algebra);
    const WeilElement v = eval_weil(f, parse_point(point, alg, m.dimension));
    std::cout << (name.empty() ? "f" : name) << "^A = " << format_coeffs(v) << "\n";
    write_json(json_path, {{"algebra", alg->name()}, {"function", to_string(f)}, {"value", coeffs_json(v)}});
    return exit_ok;
}

std::optional<PoissonStructure> poisson_of(const Manifest& m) {
    if (m.poisson) return PoissonStructure::from_matrix(*m.poisson);
    if (m.symplectic) {
        const SymplecticStructure s = SymplecticStructure::from_matrix(*m.symplectic);
        if (s.is_constant()) return InducedPoisson(s).structure();
    }
    return std::nullopt;
}

int cmd_bracket(const Manifest& m, const std::string& f_name, const std::string& g_name, const std::string& point,
                const std::string& json_path) {
    if (f_name.empty() || g_name.empty() || point.empty()) throw UsageError("bracket needs --f, --g and --point");
    if (!m.poisson && !m.symplectic) throw UsageError("bracket needs a poisson or symplectic structure");
    const AlgebraPtr alg = build_algebra(m.algebra);
    const int n = m.dimension;
    const LiftedFunction f = lift_function(alg, n, m.function(f_name)), g = lift_function(alg, n, m.function(g_name));
    const NearPoint xi = parse_point(point, alg, n);
    json j = {{"algebra", alg->name()}, {"f", f_name}, {"g", g_name}};
    if (m.poisson) {
        const WeilElement v = a_bracket(PoissonStructure::from_matrix(*m.poisson), f, g)(xi);
        std::cout << "{" << f_name << "," << g_name << "}_A = " << format_coeffs(v) << "\n";
        j["poisson"] = coeffs_json(v);
    }
    if (m.symplectic) {
        const SymplecticStructure s = SymplecticStructure::from_matrix(*m.symplectic);
        const OmegaBracket v = bracket_omega(s, f, g, xi);
        std::cout << "{" << f_name << "," << g_name << "}_Omega = " << format_coeffs(v.via_form) << "\n";
        std::cout << "X~_" << f_name << "(" << g_name << ") = " << format_coeffs(v.via_derivation) << "\n";
        j["omega"] = coeffs_json(v.via_form);
        j["omega_derivation"] = coeffs_json(v.via_derivation);
    }
    write_json(json_path, j);
    return exit_ok;
}

const std::vector<std::string> poisson_suites = {"skew", "bilinear", "leibniz", "jacobi", "commutator", "compat"};
const std::vector<std::string> symplectic_suites = {"coincide", "hamlift", "nondegen"};

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

CheckReport run_poisson_suite(const std::string& suite, const PoissonStructure& p, const AlgebraPtr& alg,
                              const CheckOptions& o) {
    if (suite == "skew") return check_skew(p, alg, o);
    if (suite == "bilinear") return check_bilinear(p, alg, o);
    if (suite == "leibniz") return check_leibniz(p, alg, o);
    if (suite == "jacobi") return check_jacobi(p, alg, o);
    if (suite == "commutator") return check_commutator(p, alg, o);
    return check_compat(p, alg, o);
}

json nondegen(const SymplecticStructure& s, const AlgebraPtr& alg, std::uint64_t seed, bool& agree) {
    std::vector<std::pair<std::string, LinearForm>> forms;
    const auto dual = dual_basis(alg);
    forms.emplace_back("top", dual.back());
    forms.emplace_back("augmentation", dual.front());
    Rng rng = derive_stream(seed, 0x4e44);
    LinearForm random{alg, std::vector<double>(alg->dim())};
    for (double& c : random.coeffs) c = uniform(rng, -1.0, 1.0);
    forms.emplace_back("random", random);

    json out = json::array();
    for (const auto& [label, psi] : forms) {
        const ScalarFormVerdict v = scalar_form_test(s, psi, 10, seed);
        agree = agree && v.agree();
        auto word = [](bool b) { return b ? "symplectic" : "degenerate"; };
        std::cout << "NONDEGEN " << label << " algebra=" << alg->name() << " ann_dim=" << v.ann_dimension
                  << " predicate=" << word(v.predicate_symplectic) << " rank=" << word(v.rank_symplectic) << " ("
                  << v.min_rank << "/" << v.full_rank << " at " << v.samples << " samples) "
                  << (v.agree() ? "AGREE" : "DISAGREE") << "\n";
        out.push_back({{"form", label},
                       {"psi", psi.coeffs},
                       {"ann_dim", v.ann_dimension},
                       {"psi_on_ann", v.psi_on_ann},
                       {"predicate", word(v.predicate_symplectic)},
                       {"rank", word(v.rank_symplectic)},
                       {"min_rank", v.min_rank},
                       {"full_rank", v.full_rank},
                       {"samples", v.samples},
                       {"agree", v.agree()}});
    }
    return out;
}

int cmd_check(const Manifest& m, const std::string& suite, const std::string& json_path) {
    const bool all = suite == "all";
    if (!all && !contains(poisson_suites, suite) && !contains(symplectic_suites, suite))
        throw UsageError("unknown suite '" + suite + "'");
    const AlgebraPtr alg = build_algebra(m.algebra);
    const std::optional<PoissonStructure> p = poisson_of(m);
    std::optional<SymplecticStructure> s;
    if (m.symplectic) s = SymplecticStructure::from_matrix(*m.symplectic);

    if (!all && contains(poisson_suites, suite) && !p)
        throw UsageError("suite '" + suite + "' needs a poisson structure (or a constant symplectic form)");
    if (!all && contains(symplectic_suites, suite) && !s) throw UsageError("suite '" + suite + "' needs a symplectic form");
    if (all && !p && !s) throw UsageError("check all needs a poisson or symplectic structure");

    CheckOptions o;
    o.samples = m.samples;
    o.tol = m.tol;
    o.seed = m.seed;
    o.base_points = m.points;

    json j = {{"algebra", alg->name()}, {"suite", suite}, {"seed", m.seed}, {"tol", m.tol}, {"samples", m.samples}};
    j["reports"] = json::array();
    bool ok = true;
    auto emit = [&](const CheckReport& r) {
        std::cout << format_line(r) << "\n";
        for (const auto& note : r.notes) std::cout << "  note: " << note << "\n";
        ok = ok && r.pass();
        j["reports"].push_back(report_json(r));
    };

    if (p && !p->jacobi_holds())
        std::cerr << "warning: base bivector violates Jacobi (defect " << format_float(p->jacobi_defect()) << ")\n";
    if (s) {
        if (!s->is_closed())
            std::cerr << "warning: symplectic form is not closed (defect " << format_float(s->closedness_defect())
                      << ")\n";
        if (s->degenerate_sample())
            throw UsageError("symplectic form is degenerate at " + format_point(*s->degenerate_sample()));
        j["nondegeneracy_witness"] = "no degeneracy found at " + std::to_string(s->witness_samples()) + " samples";
    }

    for (const auto& name : poisson_suites)
        if (p && (all || name == suite)) emit(run_poisson_suite(name, *p, alg, o));
    if (s && (all || suite == "coincide")) emit(check_coincidence(*s, alg, o));
    if (s && (all || suite == "hamlift")) emit(check_hamlift(*s, alg, o));
    if (s && (all || suite == "nondegen")) {
        bool agree = true;
        j["nondegen"] = nondegen(*s, alg, m.seed, agree);
        ok = ok && agree;
    }
    j["status"] = ok ? "PASS" : "FAIL";
    write_json(json_path, j);
    return ok ? exit_ok : exit_defect;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prolongation of Poisson and symplectic structures to Weil bundles"};
    app.require_subcommand(1);

    std::string manifest_path, json_path, algebra, function, expr, point, f_name, g_name, suite;
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
    std::optional<int> samples;

    auto* info = app.add_subcommand("algebra-info", "Basis, height and ann(m) of an algebra");
    info->add_option("--algebra", algebra, "Algebra spec, e.g. R[T1,T2]/(T1^2,T2^2)");
    info->add_option("--manifest", manifest_path, "Manifest file");
    info->add_option("--json", json_path, "Write a JSON report");

    auto* lift = app.add_subcommand("lift", "Evaluate f^A at a near point");
    lift->add_option("--manifest", manifest_path, "Manifest file")->required();
    lift->add_option("--function", function, "Function name from the manifest");
    lift->add_option("--expr", expr, "Expression source");
    lift->add_option("--point", point, "Near point as JSON, e.g. [[0,1,0]]")->required();
    lift->add_option("--json", json_path, "Write a JSON report");

    auto* bracket = app.add_subcommand("bracket", "Evaluate {f^A, g^A} at a near point");
    bracket->add_option("--manifest", manifest_path, "Manifest file")->required();
    bracket->add_option("--f", f_name, "First function name")->required();
    bracket->add_option("--g", g_name, "Second function name")->required();
    bracket->add_option("--point", point, "Near point as JSON")->required();
    bracket->add_option("--json", json_path, "Write a JSON report");

    auto* check = app.add_subcommand("check", "Run identity suites");
    check->add_option("suite", suite,
                      "skew | bilinear | leibniz | jacobi | commutator | compat | coincide | hamlift | nondegen | all")
        ->required();
    check->add_option("--manifest", manifest_path, "Manifest file")->required();
    check->add_option("--tol", tol, "Override tolerance");
    check->add_option("--seed", seed, "Override seed");
    check->add_option("--samples", samples, "Override sample count");
    check->add_option("--json", json_path, "Write a JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*info) return cmd_algebra_info(algebra, manifest_path, json_path);
        Manifest m = load_manifest(manifest_path);
        if (tol) m.tol = *tol;
        if (seed) m.seed = *seed;
        if (samples) m.samples = *samples;
        if (m.samples < 1) throw UsageError("--samples must be >= 1");
        if (*lift) return cmd_lift(m, function, expr, point, json_path);
        if (*bracket) return cmd_bracket(m, f_name, g_name, point, json_path);
        return cmd_check(m, suite, json_path);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const weil::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
}
