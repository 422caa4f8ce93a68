#pragma once

#include <utility>
#include <vector>

#include "einsel/qcore.hpp"

// Information ledger over register partitions: how much of a state's
// information sits in the subsystems themselves and how much in the
// correlations between them. All logarithms are natural (nats).

namespace einsel {

// Von Neumann entropy -sum lambda ln lambda. Eigenvalues below 1e-14
// contribute exactly zero (the 0 ln 0 limit).
double entropy(const DensityMatrix& rho);

// Information of a state on dimension d: ln d - entropy. ln d for pure
// states, 0 for the maximally mixed state; those two pins fix the sign.
double info_total(const DensityMatrix& rho);

struct InfoReport {
    double total = 0.0;              // I of the whole state
    std::vector<double> per_block;   // I_k of each block's reduction
    double aggregate = 0.0;          // sum of per_block
    double correlation = 0.0;        // total - aggregate; >= 0 when the global state is pure
    Partition partition;
};

InfoReport info_report(const DensityMatrix& rho, const Partition& partition);
// Pure-state overload: the global entropy is identically zero, so total is
// ln(register dimension) exactly.
InfoReport info_report(const PureState& psi, const Partition& partition);

// Max over the samples of |info_total at t - info_total at 0| under
// exp(-iHt). Unitary evolution conserves information; the contract for the
// return value is <= 1e-10.
double info_conservation_check(const HermitianOperator& h, const PureState& psi0,
                               const std::vector<double>& t_samples);

// Weighted mixture of pure states on a shared register.
struct Preparation {
    std::vector<std::pair<double, PureState>> components;

    // Requires nonnegative weights summing to 1 within 1e-12 and a common
    // register layout.
    explicit Preparation(std::vector<std::pair<double, PureState>> components_);
};

// sum_i w_i |psi_i><psi_i|. Distinct preparations can land on the same
// matrix; nothing downstream can tell them apart.
DensityMatrix ensemble_density(const Preparation& prep);

}  // namespace einsel
