#include "einsel/redundancy.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace einsel {

namespace {

constexpr double kNormTol = 1e-12;

std::string rec_label(std::size_t k) { return "rec_" + std::to_string(k); }

void check_indices(const std::vector<std::size_t>& indices, std::size_t n) {
    std::vector<std::size_t> sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] < 1 || sorted[i] > n)
            throw std::domain_error("record atom index out of range");
        if (i > 0 && sorted[i] == sorted[i - 1])
            throw std::invalid_argument("record atom index repeated");
    }
}

}  // namespace

Register record_register(std::size_t n_atoms) {
    if (n_atoms < 1) throw std::invalid_argument("record: need at least one atom");
    std::vector<std::string> labels{"spin"};
    for (std::size_t k = 1; k <= n_atoms; ++k) labels.push_back(rec_label(k));
    return Register::qubits(labels);
}

RecordState record_state(Complex a, Complex b, std::size_t n_atoms) {
    if (std::abs(std::norm(a) + std::norm(b) - 1.0) > kNormTol)
        throw std::invalid_argument("record: spin amplitudes must be normalized");
    Register reg = record_register(n_atoms);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(reg.dim()));
    v(0) = a;
    v(static_cast<Eigen::Index>(reg.dim() - 1)) = b;
    return RecordState{n_atoms, PureState(std::move(reg), std::move(v))};
}

RecordState flip_atoms(const RecordState& rec, const std::vector<std::size_t>& indices) {
    check_indices(indices, rec.n_atoms);
    PureState psi = rec.state;
    for (std::size_t k : indices) psi = apply_local(psi, rec_label(k), qb::px());
    return RecordState{rec.n_atoms, std::move(psi)};
}

PureState in_measurement_basis(const PureState& psi, Basis basis) {
    if (basis == Basis::pointer) return psi;
    PureState out = psi;
    for (const auto& label : psi.reg().labels()) out = apply_local(out, label, qb::hadamard());
    return out;
}

MeasuredRecord measure_record(const RecordState& rec, Basis basis, Prng& rng) {
    const PureState read = in_measurement_basis(rec.state, basis);
    const Eigen::VectorXcd& v = read.amplitudes();

    const double r = rng.next_uniform01();
    double acc = 0.0;
    std::size_t hit = static_cast<std::size_t>(v.size()) - 1;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        acc += std::norm(v(i));
        if (r <= acc) {
            hit = static_cast<std::size_t>(i);
            break;
        }
    }

    const Register& reg = rec.state.reg();
    MeasuredRecord out;
    out.spin = static_cast<std::uint8_t>(reg.digit(hit, 0));
    out.outcome.basis = basis;
    out.outcome.atoms.resize(rec.n_atoms);
    for (std::size_t k = 1; k <= rec.n_atoms; ++k)
        out.outcome.atoms[k - 1] = static_cast<std::uint8_t>(reg.digit(hit, k));
    return out;
}

MajorityVerdict majority_decode(const Outcome& outcome) {
    std::vector<std::size_t> all(outcome.atoms.size());
    std::iota(all.begin(), all.end(), 1);
    return majority_decode(outcome, all);
}

MajorityVerdict majority_decode(const Outcome& outcome, const std::vector<std::size_t>& subset) {
    if (outcome.basis != Basis::pointer)
        throw std::invalid_argument("majority decode: outcome is not a pointer-basis read");
    if (subset.empty()) throw std::invalid_argument("majority decode: empty subset");
    check_indices(subset, outcome.atoms.size());
    std::size_t ones = 0;
    for (std::size_t k : subset) ones += outcome.atoms[k - 1];
    const std::size_t zeros = subset.size() - ones;
    if (zeros > ones) return MajorityVerdict::up;
    if (ones > zeros) return MajorityVerdict::down;
    return MajorityVerdict::tie;
}

ParityVerdict parity_decode(const Outcome& outcome) {
    if (outcome.basis != Basis::conjugate)
        throw std::invalid_argument("parity decode: outcome is not a conjugate-basis read");
    std::size_t ones = 0;
    for (std::uint8_t bit : outcome.atoms) ones += bit;
    return (ones % 2 == 0) ? ParityVerdict::plus : ParityVerdict::minus;
}

namespace {

// Bitmask of a uniformly random size-f subset of {0..n-1}: partial
// Fisher-Yates over the index array.
std::uint64_t sample_flip_set(Prng& rng, std::size_t n, std::size_t f) {
    std::array<std::uint8_t, 64> idx{};
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint8_t>(i);
    std::uint64_t mask = 0;
    for (std::size_t j = 0; j < f; ++j) {
        const std::size_t r = j + rng.next_index(n - j);
        std::swap(idx[j], idx[r]);
        mask |= std::uint64_t{1} << idx[j];
    }
    return mask;
}

std::uint64_t sample_flip_rate(Prng& rng, std::size_t n, double rate) {
    std::uint64_t mask = 0;
    for (std::size_t k = 0; k < n; ++k)
        if (rng.next_uniform01() < rate) mask |= std::uint64_t{1} << k;
    return mask;
}

Outcome mask_to_outcome(Basis basis, std::uint64_t bits, std::size_t n) {
    Outcome o;
    o.basis = basis;
    o.atoms.resize(n);
    for (std::size_t k = 0; k < n; ++k) o.atoms[k] = static_cast<std::uint8_t>((bits >> k) & 1);
    return o;
}

// Shared trial loop. Draws per trial are closed-form Born samples of the
// intact record (the pointer read of the a = 1 record is the all-zero
// outcome; the balanced conjugate-plus record's conjugate read is uniform
// over the bit patterns whose parity matches the spin bit). The tests pin
// both facts against measure_record.
template <typename FlipSampler>
ReliabilityPoint run_trials(std::size_t n, std::size_t trials, std::uint64_t seed,
                            FlipSampler&& sample_mask) {
    if (n < 1 || n > 63) throw std::invalid_argument("reliability: atom count must be in [1, 63]");
    if (trials < 1) throw std::invalid_argument("reliability: need at least one trial");
    const std::uint64_t atom_mask = (n == 63) ? ~std::uint64_t{0} >> 1 : (std::uint64_t{1} << n) - 1;

    Prng maj(RandomStream{seed}.substream("majority"));
    std::size_t maj_ok = 0;
    for (std::size_t i = 0; i < trials; ++i) {
        const std::uint64_t corrupted = sample_mask(maj);
        if (majority_decode(mask_to_outcome(Basis::pointer, corrupted, n)) == MajorityVerdict::up)
            ++maj_ok;
    }

    Prng par(RandomStream{seed}.substream("parity"));
    std::size_t par_ok = 0;
    for (std::size_t i = 0; i < trials; ++i) {
        const std::uint64_t read = par.next_u64() & atom_mask;
        const ParityVerdict truth =
            (std::popcount(read) % 2 == 0) ? ParityVerdict::plus : ParityVerdict::minus;
        const std::uint64_t corrupted = read ^ sample_mask(par);
        if (parity_decode(mask_to_outcome(Basis::conjugate, corrupted, n)) == truth) ++par_ok;
    }

    ReliabilityPoint out;
    out.n_atoms = n;
    out.trials = trials;
    out.seed = seed;
    out.majority_success = static_cast<double>(maj_ok) / static_cast<double>(trials);
    out.parity_success = static_cast<double>(par_ok) / static_cast<double>(trials);
    return out;
}

}  // namespace

ReliabilityPoint reliability_curve(std::size_t n_atoms, std::size_t flip_count,
                                   std::size_t trials, std::uint64_t seed) {
    if (flip_count > n_atoms)
        throw std::invalid_argument("reliability: flip count exceeds atom count");
    ReliabilityPoint out = run_trials(n_atoms, trials, seed, [&](Prng& rng) {
        return sample_flip_set(rng, n_atoms, flip_count);
    });
    out.flip_count = flip_count;
    return out;
}

ReliabilityPoint reliability_curve_rate(std::size_t n_atoms, double flip_rate,
                                        std::size_t trials, std::uint64_t seed) {
    if (!(flip_rate >= 0.0 && flip_rate <= 1.0))
        throw std::invalid_argument("reliability: flip rate must lie in [0, 1]");
    ReliabilityPoint out = run_trials(n_atoms, trials, seed, [&](Prng& rng) {
        return sample_flip_rate(rng, n_atoms, flip_rate);
    });
    out.flip_rate = flip_rate;
    return out;
}

}  // namespace einsel
