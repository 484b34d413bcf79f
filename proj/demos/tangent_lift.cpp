// Tangent lift of a Hamiltonian system: over the dual numbers D, the near
// point (q + dq eps, p + dp eps) is a tangent vector, and the lifted
// Hamiltonian field is the linearized flow.

#include <cstdio>

#include "weil/weil.hpp"

int main() {
    using namespace weil;
    const AlgebraPtr d = build_algebra("R[T]/(T^2)");
    const SymplecticStructure omega = SymplecticStructure::canonical(1);

    // pendulum H = p^2/2 - cos(q)
    const Expr h = parse("x2^2/2 - cos(x1)", 2);
    const VectorFieldA x_h = hamiltonian_field_lifted(omega, lift_function(d, 2, h));

    NearPoint xi{d, {WeilElement(d, {0.7, 1.0}), WeilElement(d, {0.2, 0.0})}};
    const WeilVector v = x_h.at(xi);
    std::printf("base point (q, p) = (%g, %g), tangent (dq, dp) = (1, 0)\n", xi.coords[0][0], xi.coords[1][0]);
    std::printf("X_H        = (%g, %g)\n", v[0][0], v[1][0]);
    std::printf("linearized = (%g, %g)\n", v[0][1], v[1][1]);

    const VectorFieldBase base = hamiltonian_field_base(omega, h);
    std::printf("X_H from the base field: (%s, %s)\n", to_string(base.components[0]).c_str(),
                to_string(base.components[1]).c_str());
}
