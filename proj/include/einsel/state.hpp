#pragma once

#include <Eigen/Dense>
#include <complex>

#include "einsel/register.hpp"

namespace einsel {

using Complex = std::complex<double>;

// Normalized pure state over a register. Construction validates the norm to
// 1e-12 and then rescales the residual machine error away.
class PureState {
public:
    PureState(Register reg, Eigen::VectorXcd amplitudes);

    const Register& reg() const { return reg_; }
    const Eigen::VectorXcd& amplitudes() const { return amps_; }
    Complex amplitude(std::size_t basis_index) const { return amps_(static_cast<Eigen::Index>(basis_index)); }
    std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }

private:
    Register reg_;
    Eigen::VectorXcd amps_;
};

// Unit-trace Hermitian positive-semidefinite matrix over a register.
// Construction validates hermiticity and trace to 1e-12 and the smallest
// eigenvalue down to -1e-12; the spectrum is kept for entropy work.
class DensityMatrix {
public:
    DensityMatrix(Register reg, Eigen::MatrixXcd matrix);

    const Register& reg() const { return reg_; }
    const Eigen::MatrixXcd& matrix() const { return m_; }
    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
    std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }

private:
    Register reg_;
    Eigen::MatrixXcd m_;
    Eigen::VectorXd eigenvalues_;
};

DensityMatrix outer(const PureState& psi);

// Global-phase gauge: rotate so the largest-magnitude amplitude is real and
// positive. Ties break on the lowest basis index.
PureState phase_gauged(const PureState& psi);

double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);
double max_abs_diff(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

}  // namespace einsel
