#pragma once

#include <memory>
#include <mutex>

#include "einsel/state.hpp"

namespace einsel {

// Hermitian observable or generator over a register. The spectral
// decomposition is computed once on first use and shared between copies;
// the reconstruction V diag(e) V^dagger must round-trip to 1e-10.
class HermitianOperator {
public:
    HermitianOperator(Register reg, Eigen::MatrixXcd matrix);

    const Register& reg() const { return reg_; }
    const Eigen::MatrixXcd& matrix() const { return m_; }

    const Eigen::VectorXd& eigenvalues() const { return spectral().values; }
    const Eigen::MatrixXcd& eigenvectors() const { return spectral().vectors; }

    HermitianOperator scaled(double factor) const;
    friend HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b);

private:
    struct Spectral {
        Eigen::VectorXd values;
        Eigen::MatrixXcd vectors;
    };
    struct Cache {
        std::once_flag once;
        std::unique_ptr<Spectral> value;
    };

    const Spectral& spectral() const;

    Register reg_;
    Eigen::MatrixXcd m_;
    std::shared_ptr<Cache> cache_;
};

// exp(-i t H) applied through the spectral decomposition (hbar = 1).
PureState evolve_exact(const HermitianOperator& h, double t, const PureState& psi0);

// Dense unitary exp(-i t H).
Eigen::MatrixXcd propagator(const HermitianOperator& h, double t);

// Max-abs entry of [A, B] within tol. Operators must share a register layout;
// lift factors with embed() first.
bool commutes(const HermitianOperator& a, const HermitianOperator& b, double tol = 1e-12);

// Lift an operator into a larger register (identity on the other
// subsystems). Every label of op must appear in target.
HermitianOperator embed(const HermitianOperator& op, const Register& target);

}  // namespace einsel
