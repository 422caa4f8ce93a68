#pragma once

#include "einsel/qcore.hpp"

// Two-qubit detection stage: a detector atom coupled to a spin-1/2 so that
// after a quarter period the atom's pointer basis holds a record of the
// spin's z value. Everything here is closed form; the spectral propagator
// in operators.hpp is the oracle it is tested against.

namespace einsel {

// Spin amplitudes and coupling strength of the detection stage.
struct BitModelConfig {
    Complex a;
    Complex b;
    double g;

    // Requires |a|^2 + |b|^2 = 1 within 1e-12 and g > 0.
    BitModelConfig(Complex a, Complex b, double g);

    // Quarter period pi/(4g): the time at which the record is sharp.
    double tau() const { return M_PI / (4.0 * g); }
};

// (atom, spin) qubit register. Atom digit 0 is the pointer-up state, spin
// digit 0 is z-up; basis order (0,1,2,3) = (atom0 spin0, atom0 spin1,
// atom1 spin0, atom1 spin1).
Register pair_register();

// Coupling g * (atom conjugate involution) (x) (spin sigma_z). In pointer
// coordinates the atom factor is [[0, i], [-i, 0]]; its eigenpairs are the
// atom's conjugate basis. Commutes with the spin z observable, so the
// monitored value is undisturbed. Throws for g <= 0.
HermitianOperator h_as(double g);

// Product start: atom in the balanced pointer superposition, spin at (a, b).
PureState initial_bitbit(const BitModelConfig& cfg);

// Closed-form evolution of initial_bitbit under h_as(g) for time t:
// a |spin0> branch rotates the atom by +gt, the |spin1> branch by -gt,
// giving amplitudes (a sin(pi/4+gt), b sin(pi/4-gt), a cos(pi/4+gt),
// b cos(pi/4-gt)). At t = tau this is a perfect pointer record.
PureState evolve_bitbit(const BitModelConfig& cfg, double t);

// Projector onto the t = tau record: diagonal (|a|^2, 0, 0, |b|^2) with
// corner coherences a b* and a* b. Purity 1.
DensityMatrix rho_pure_as(const BitModelConfig& cfg);

// The same record with the corner coherences deleted; purity |a|^4 + |b|^4.
DensityMatrix rho_mix_as(const BitModelConfig& cfg);

}  // namespace einsel
