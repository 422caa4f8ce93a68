#pragma once

#include <cstdint>
#include <vector>

#include "einsel/qcore.hpp"
#include "einsel/rng.hpp"

// Amplified records: N record atoms each holding a full copy of a spin's
// pointer bit. Majority voting over any subset recovers the pointer
// information and survives local flips; the conjugate information is a
// global parity that a single flip inverts.

namespace einsel {

enum class Basis : std::uint8_t { pointer, conjugate };

struct RecordState {
    std::size_t n_atoms = 0;
    PureState state;
};

// (spin, rec_1..rec_n) qubit register.
Register record_register(std::size_t n_atoms);

// a (x) (all record atoms at bit 0) + b (x) (all at bit 1), spin included;
// requires |a|^2 + |b|^2 = 1 and n_atoms >= 1.
RecordState record_state(Complex a, Complex b, std::size_t n_atoms);

// Exchange unitary (bit 0 <-> bit 1) on each listed record atom. Indices
// are 1-based; out-of-range or duplicate indices throw.
RecordState flip_atoms(const RecordState& rec, const std::vector<std::size_t>& indices);

// Rotation into the read basis: conjugate applies the balanced involution
// (Hadamard) to every subsystem; pointer is the identity.
PureState in_measurement_basis(const PureState& psi, Basis basis);

// A joint read of the record atoms. Bit 0 is pointer-up in the pointer
// basis and the plus state in the conjugate basis; bit 1 the opposite.
struct Outcome {
    Basis basis = Basis::pointer;
    std::vector<std::uint8_t> atoms;  // one bit per record atom, in register order
};

struct MeasuredRecord {
    std::uint8_t spin = 0;  // same bit convention as the atoms
    Outcome outcome;
};

// Samples a joint outcome of spin plus every atom in the requested product
// basis with Born weights. Consumes exactly one draw, so an outcome is a
// pure function of the generator's (key, counter).
MeasuredRecord measure_record(const RecordState& rec, Basis basis, Prng& rng);

enum class MajorityVerdict : std::uint8_t { up, down, tie };

// Majority vote over the chosen atoms (1-based indices; default every
// atom). Pointer-basis outcomes only; an even split is an explicit tie,
// never a coin flip.
MajorityVerdict majority_decode(const Outcome& outcome);
MajorityVerdict majority_decode(const Outcome& outcome, const std::vector<std::size_t>& subset);

enum class ParityVerdict : std::uint8_t { plus, minus };

// Parity of a conjugate-basis read: an even count of bit-1 atoms decodes
// plus, odd decodes minus. The rule is global, so there is deliberately no
// subset variant.
ParityVerdict parity_decode(const Outcome& outcome);

// Decoder success rates under record corruption. Each trial Born-samples
// the intact record, then inverts the readout labels of the flipped atoms
// (a corrupted record line): on pointer reads that is exactly a pre-read
// exchange flip, and it is what makes a single flip invert the parity.
// Majority reads the a = 1 pointer-eigenstate record; parity reads the
// balanced conjugate-plus record in the conjugate basis. Success means the
// decoder returns the prepared label (ties fail).
struct ReliabilityPoint {
    std::size_t n_atoms = 0;
    std::size_t flip_count = 0;  // per-trial flip-set size (count variant)
    double flip_rate = 0.0;      // per-atom flip probability (rate variant)
    double majority_success = 0.0;
    double parity_success = 0.0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
};

// Uniformly random flip sets of exactly flip_count atoms per trial.
ReliabilityPoint reliability_curve(std::size_t n_atoms, std::size_t flip_count,
                                   std::size_t trials, std::uint64_t seed);

// Independent per-atom flips with probability flip_rate per trial.
ReliabilityPoint reliability_curve_rate(std::size_t n_atoms, double flip_rate,
                                        std::size_t trials, std::uint64_t seed);

}  // namespace einsel
